//! One-vs-rest training, argmax prediction and holdout boosting.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::halfspace::{margin_error, Dataset, FeatureVector, Halfspace, Label};
use crate::kernel::{FourierFeatureMap, KernelSpec};
use crate::linalg::dot;
use crate::privacy::SeededRng;

use super::dpsgd::{dp_sgd_hinge_with_sigma, DpSgdParams};
use super::expmech::exponential_mechanism_learner;
use super::perceptron::{dp_batch_perceptron, PerceptronConfig, TrainResult};

/// Points with class labels in `0..num_classes`.
#[derive(Debug, Clone, PartialEq)]
pub struct MulticlassDataset {
    features: Arc<Vec<FeatureVector>>,
    classes: Vec<usize>,
    num_classes: usize,
    dimension: usize,
}

impl MulticlassDataset {
    pub fn new(
        dimension: usize,
        features: Vec<FeatureVector>,
        classes: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("dimension must be positive"));
        }
        if features.len() != classes.len() {
            return Err(invalid(format!(
                "{} feature vectors but {} labels",
                features.len(),
                classes.len()
            )));
        }
        if let Some(x) = features.iter().find(|x| x.dim() != dimension) {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: x.dim(),
            });
        }
        if let Some(&c) = classes.iter().find(|&&c| c >= num_classes) {
            return Err(Error::ClassOutOfRange {
                class: c,
                num_classes,
            });
        }
        Ok(Self {
            features: Arc::new(features),
            classes,
            num_classes,
            dimension,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn features(&self) -> &[FeatureVector] {
        &self.features
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    /// Binary relabeling: `+1` iff the class equals `class`. Shares the
    /// feature storage.
    pub fn binary_view(&self, class: usize) -> Result<Dataset> {
        if class >= self.num_classes {
            return Err(Error::ClassOutOfRange {
                class,
                num_classes: self.num_classes,
            });
        }
        let labels = self.classes.iter().map(|&c| Label::from_bool(c == class)).collect();
        Dataset::from_parts(self.dimension, Arc::clone(&self.features), labels)
    }

    /// Applies the feature map to every point.
    pub fn embed(&self, map: &FourierFeatureMap) -> Result<MulticlassDataset> {
        let embedded = map
            .embed_all(&self.features)?
            .into_iter()
            .map(FeatureVector::new)
            .collect::<Result<Vec<_>>>()?;
        MulticlassDataset::new(map.output_dim(), embedded, self.classes.clone(), self.num_classes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassModel {
    /// One weight vector per class, all in the feature space.
    pub weights: Vec<Halfspace>,
    /// Feature map applied before scoring, if any.
    pub kernel: Option<KernelSpec>,
    /// Dimension of raw inputs (equals the weight dimension without a kernel).
    pub input_dimension: usize,
    /// Free-form description of how the model was produced.
    pub training: serde_json::Value,
}

impl MulticlassModel {
    pub fn new(weights: Vec<Halfspace>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(invalid(format!("need at least 2 classes, got {}", weights.len())));
        }
        let d = weights[0].dim();
        if let Some(w) = weights.iter().find(|w| w.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: w.dim(),
            });
        }
        Ok(Self {
            weights,
            kernel: None,
            input_dimension: d,
            training: serde_json::Value::Null,
        })
    }

    pub fn with_kernel(mut self, map: &FourierFeatureMap) -> Result<Self> {
        if map.output_dim() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: map.output_dim(),
            });
        }
        self.kernel = Some(map.spec());
        self.input_dimension = map.input_dim();
        Ok(self)
    }

    pub fn with_training(mut self, training: serde_json::Value) -> Self {
        self.training = training;
        self
    }

    pub fn num_classes(&self) -> usize {
        self.weights.len()
    }

    /// Dimension of the space the weights live in.
    pub fn dimension(&self) -> usize {
        self.weights[0].dim()
    }

    /// Regenerates the model's feature map from its stored spec.
    pub fn feature_map(&self) -> Result<Option<FourierFeatureMap>> {
        self.kernel
            .map(|spec| FourierFeatureMap::sample(self.input_dimension, spec))
            .transpose()
    }

    /// `<w^(y), phi>` for every class, where `phi` is already in the
    /// feature space.
    pub fn scores(&self, phi: &[f64]) -> Result<Vec<f64>> {
        if phi.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: phi.len(),
            });
        }
        Ok(self.weights.iter().map(|w| dot(w.weights(), phi)).collect())
    }

    /// Argmax class of a feature-space point, first index on ties.
    pub fn predict_features(&self, phi: &[f64]) -> Result<usize> {
        Ok(argmax_first(&self.scores(phi)?))
    }
}

pub(crate) fn argmax_first(scores: &[f64]) -> usize {
    let mut best = 0;
    for (j, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = j;
        }
    }
    best
}

/// `argmax_y <w^(y), phi(x)>` with `phi` the identity or the given map.
pub fn predict(model: &MulticlassModel, x: &[f64], map: Option<&FourierFeatureMap>) -> Result<usize> {
    match map {
        Some(m) => model.predict_features(&m.embed(x)?),
        None => model.predict_features(x),
    }
}

/// Per-class learner. DP-SGD carries its noise level so that calibration
/// happens once for all classes.
#[derive(Debug, Clone, PartialEq)]
pub enum Trainer {
    Perceptron(PerceptronConfig),
    DpSgd { params: DpSgdParams, sigma: f64 },
    ExpMech { gamma: f64, epsilon: f64, candidates: usize },
}

fn train_class(data: &MulticlassDataset, class: usize, trainer: &Trainer, rng: &mut SeededRng) -> Result<Halfspace> {
    let view = data.binary_view(class)?;
    match trainer {
        Trainer::Perceptron(cfg) => match dp_batch_perceptron(&view, cfg, rng)?.result {
            TrainResult::Weights(w) => Ok(w),
            TrainResult::Failed => Err(Error::ClassTraining {
                classes: vec![class],
                message: "no early stop within the iteration budget".into(),
            }),
        },
        Trainer::DpSgd { params, sigma } => Halfspace::new(dp_sgd_hinge_with_sigma(&view, params, *sigma, rng)?.weights),
        Trainer::ExpMech {
            gamma,
            epsilon,
            candidates,
        } => exponential_mechanism_learner(&view, *gamma, *epsilon, *candidates, rng),
    }
}

/// Trains one binary classifier per class; class `y` draws from
/// `base.child(y + 1)`. With `threads > 1` classes train concurrently;
/// the result is identical either way.
pub fn train_one_vs_rest(
    data: &MulticlassDataset,
    trainer: &Trainer,
    base: &SeededRng,
    threads: usize,
) -> Result<MulticlassModel> {
    if data.num_classes() < 2 {
        return Err(invalid(format!("need at least 2 classes, got {}", data.num_classes())));
    }
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let run = |y: usize| train_class(data, y, trainer, &mut base.child(y as u64 + 1));
    let results: Vec<Result<Halfspace>> = if threads > 1 {
        crate::parallel::with_threads(threads, || (0..data.num_classes()).into_par_iter().map(run).collect())?
    } else {
        (0..data.num_classes()).map(run).collect()
    };

    let mut weights = Vec::with_capacity(results.len());
    let mut failed = Vec::new();
    let mut messages = Vec::new();
    for (y, r) in results.into_iter().enumerate() {
        match r {
            Ok(w) => weights.push(w),
            Err(Error::ClassTraining { message, .. }) => {
                failed.push(y);
                messages.push(message);
            }
            Err(e) => return Err(e),
        }
    }
    if !failed.is_empty() {
        messages.dedup();
        return Err(Error::ClassTraining {
            classes: failed,
            message: messages.join("; "),
        });
    }
    MulticlassModel::new(weights)
}

/// Index of the candidate with the lowest holdout margin error, earliest on
/// ties.
pub fn boost(candidates: &[Halfspace], holdout: &Dataset, gamma: f64) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let mut best = 0;
    let mut best_err = f64::INFINITY;
    for (j, w) in candidates.iter().enumerate() {
        let e = margin_error(w, holdout, gamma)?;
        if e < best_err {
            best_err = e;
            best = j;
        }
    }
    Ok(best)
}
