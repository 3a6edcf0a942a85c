//! Learners: DP Batch Perceptron, exponential mechanism, DP-SGD hinge, and
//! the one-vs-rest multiclass layer.

pub mod dpsgd;
pub mod expmech;
pub mod multiclass;
pub mod perceptron;
pub mod persist;

pub use dpsgd::{clip_to_unit, dp_sgd_hinge, dp_sgd_hinge_from, dp_sgd_hinge_with_sigma, hinge_gradient, hinge_loss, DpSgdOutcome, DpSgdParams};
pub use expmech::{candidate_scores, exponential_mechanism_learner, exponential_mechanism_select, select_exponential};
pub use multiclass::{boost, predict, train_one_vs_rest, MulticlassDataset, MulticlassModel, Trainer};
pub use perceptron::{dp_batch_perceptron, PerceptronConfig, StopMode, TrainOutcome, TrainResult};
pub use persist::{from_hex_float, load_model, model_from_json, model_to_json, save_model, to_hex_float};
