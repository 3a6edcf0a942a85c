//! Noise samplers and privacy accounting.

mod composition;
mod noise;
pub mod rdp;
mod rng;

pub use composition::{
    advanced_composition, amplify_by_subsampling, perceptron_noise, perceptron_privacy_check,
    NoiseParameters, PrivacyBudget,
};
pub use noise::{poisson_subsample, sample_gaussian_vector, sample_laplace, sample_unit_vector};
pub use rdp::{
    calibrate_sigma, compose_rdp, rdp_curve, rdp_epsilon, rdp_subsampled_gaussian, rdp_to_eps,
    Calibration, RdpCurve,
};
pub use rng::{child_seed, SeededRng, GOLDEN_GAMMA};
