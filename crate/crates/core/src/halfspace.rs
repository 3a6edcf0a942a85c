//! Domain types for labeled points and halfspaces, and the margin-error
//! and robust-risk quantities defined over them.
//!
//! An example `(x, y)` is *correct with margin* `gamma` under weights `w`
//! iff `y * <w, x> > gamma`. The inequality is strict, so a zero weight
//! vector makes every example a margin mistake, for every `gamma >= 0`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, norm};

/// Slack allowed on `||x|| <= 1` and on unit-norm checks.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// A point in `R^d` with finite coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if let Some(v) = components.iter().find(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite feature component {v}")));
        }
        Ok(Self(components))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Binary label in `{-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }

    pub fn from_bool(positive: bool) -> Self {
        if positive {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

impl TryFrom<i64> for Label {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        match value {
            -1 => Ok(Label::Negative),
            1 => Ok(Label::Positive),
            other => Err(Error::InvalidLabel(other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub features: FeatureVector,
    pub label: Label,
}

impl LabeledExample {
    pub fn new(features: FeatureVector, label: Label) -> Self {
        Self { features, label }
    }
}

/// `y * <w, x>`
#[inline]
pub fn signed_score(weights: &[f64], x: &FeatureVector, y: Label) -> f64 {
    y.sign() * dot(weights, x.as_slice())
}

/// A labeled sample `((x_1, y_1), ..., (x_n, y_n))` of fixed dimension.
///
/// Feature storage is shared, so relabeled views (one-vs-rest) do not copy
/// the points.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Arc<Vec<FeatureVector>>,
    labels: Vec<Label>,
    dimension: usize,
}

impl Dataset {
    pub fn new(dimension: usize, examples: Vec<LabeledExample>) -> Result<Self> {
        let (features, labels) = examples
            .into_iter()
            .map(|ex| (ex.features, ex.label))
            .unzip();
        Self::from_parts(dimension, Arc::new(features), labels)
    }

    pub fn from_parts(
        dimension: usize,
        features: Arc<Vec<FeatureVector>>,
        labels: Vec<Label>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("dimension must be positive"));
        }
        if features.len() != labels.len() {
            return Err(invalid(format!(
                "{} feature vectors but {} labels",
                features.len(),
                labels.len()
            )));
        }
        for x in features.iter() {
            if x.dim() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: x.dim(),
                });
            }
        }
        Ok(Self {
            features,
            labels,
            dimension,
        })
    }

    /// Like [`Dataset::new`], additionally requiring `||x|| <= 1 + 1e-9`
    /// for every example.
    pub fn new_unit_ball(dimension: usize, examples: Vec<LabeledExample>) -> Result<Self> {
        let ds = Self::new(dimension, examples)?;
        ds.check_unit_ball()?;
        Ok(ds)
    }

    pub fn check_unit_ball(&self) -> Result<()> {
        for (i, x) in self.features.iter().enumerate() {
            let n = x.norm();
            if n > 1.0 + NORM_TOLERANCE {
                return Err(invalid(format!(
                    "example {i} has norm {n} outside the unit ball"
                )));
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn features(&self) -> &[FeatureVector] {
        &self.features
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn get(&self, i: usize) -> (&FeatureVector, Label) {
        (&self.features[i], self.labels[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FeatureVector, Label)> + '_ {
        self.features.iter().zip(self.labels.iter().copied())
    }

    /// Subset by index, sharing nothing (copies the selected points).
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: Arc::new(indices.iter().map(|&i| self.features[i].clone()).collect()),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            dimension: self.dimension,
        }
    }
}

/// Weight vector `w` of the halfspace `x -> sgn(<w, x>)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace(Vec<f64>);

impl Halfspace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(v) = weights.iter().find(|v| !v.is_finite()) {
            return Err(invalid(format!("non-finite weight {v}")));
        }
        Ok(Self(weights))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// The standard basis vector `e_index` in `R^dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut w = vec![0.0; dim];
        w[index] = 1.0;
        Self(w)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOLERANCE
    }

    /// `w / ||w||`; fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroWeight);
        }
        Ok(Self(self.0.iter().map(|v| v / n).collect()))
    }

    /// Class prediction `+1` iff `<w, x> > 0`.
    pub fn classify(&self, x: &[f64]) -> Label {
        Label::from_bool(dot(&self.0, x) > 0.0)
    }
}

fn check_dataset(w: &Halfspace, data: &Dataset) -> Result<()> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if w.dim() != data.dimension() {
        return Err(Error::DimensionMismatch {
            expected: data.dimension(),
            found: w.dim(),
        });
    }
    Ok(())
}

/// Number of examples that are NOT correct with margin `gamma`.
pub fn margin_mistakes(w: &Halfspace, data: &Dataset, gamma: f64) -> Result<usize> {
    check_dataset(w, data)?;
    if !(gamma >= 0.0) {
        return Err(invalid(format!("margin must be non-negative, got {gamma}")));
    }
    Ok(data
        .iter()
        .filter(|&(x, y)| !(signed_score(w.weights(), x, y) > gamma))
        .count())
}

/// Fraction of examples with `y * <w, x> <= gamma`.
pub fn margin_error(w: &Halfspace, data: &Dataset, gamma: f64) -> Result<f64> {
    let mistakes = margin_mistakes(w, data, gamma)?;
    Ok(mistakes as f64 / data.len() as f64)
}

/// Empirical `gamma`-robust risk of the halfspace classifier: the margin
/// error of the normalized weights.
pub fn robust_risk(w: &Halfspace, data: &Dataset, gamma: f64) -> Result<f64> {
    margin_error(&w.normalized()?, data, gamma)
}
