//! Differentially private learning of large-margin halfspaces with
//! certified L2 robustness.
//!
//! The crate is organized as:
//!
//! - [`halfspace`]: examples, datasets, weight vectors, margin error.
//! - [`bounds`]: closed-form generalization and sample-size calculators.
//! - [`privacy`]: noise samplers, analytic composition, RDP accounting.
//! - [`trainers`]: DP Batch Perceptron, exponential mechanism, DP-SGD,
//!   one-vs-rest training and model persistence.
//! - [`kernel`]: random Fourier features for the Gaussian kernel.
//! - [`robust`]: certified radii and robust-accuracy curves.
//! - [`data`]: IDX and libsvm loaders, preprocessing, synthetic data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod data;
pub mod error;
pub mod halfspace;
pub mod kernel;
pub mod linalg;
pub mod parallel;
pub mod privacy;
pub mod robust;
pub mod trainers;

pub use error::{Error, Result};
pub use halfspace::{
    margin_error, margin_mistakes, robust_risk, Dataset, FeatureVector, Halfspace, Label, LabeledExample,
};
pub use kernel::{gaussian_kernel, sample_feature_map, FourierFeatureMap, KernelSpec};
pub use privacy::SeededRng;
pub use trainers::{MulticlassDataset, MulticlassModel};
