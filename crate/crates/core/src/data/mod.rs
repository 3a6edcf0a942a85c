//! Dataset ingestion, preprocessing and synthetic generation.

pub mod idx;
pub mod libsvm;
pub mod preprocess;
pub mod synth;

pub use idx::{load_idx_images, load_idx_labels, write_idx_images, write_idx_labels, IdxImages};
pub use libsvm::{load_libsvm, load_libsvm_with_labels, write_libsvm, LibsvmData};
pub use preprocess::{preprocess, preprocess_with, raw_dataset, PreprocessMode, RawImageSet, Scaler};
pub use synth::synth_margin_dataset;
