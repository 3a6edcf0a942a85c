//! Certified L2 radii for multiclass linear and random-feature kernel
//! models, and robust-accuracy curves built from them.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::kernel::FourierFeatureMap;
use crate::linalg::{dot, norm, sub};
use crate::trainers::multiclass::{MulticlassDataset, MulticlassModel};

pub const CURVE_HEADER: &str = "gamma,robust_accuracy";
pub const RADII_HEADER: &str = "index,true_class,predicted_class,radius";

/// A model with its pairwise weight-difference norms precomputed.
#[derive(Debug, Clone)]
pub struct Certifier<'a> {
    model: &'a MulticlassModel,
    map: Option<&'a FourierFeatureMap>,
    /// `||w^(a) - w^(b)||`, row-major `K x K`.
    pair_norms: Vec<f64>,
    /// `sqrt(d_hat) / sigma_max(Pi)` for kernel models, 1 otherwise.
    multiplier: f64,
}

impl<'a> Certifier<'a> {
    pub fn linear(model: &'a MulticlassModel) -> Self {
        Self::build(model, None, 1.0)
    }

    pub fn kernel(model: &'a MulticlassModel, map: &'a FourierFeatureMap) -> Result<Self> {
        if map.output_dim() != model.dimension() {
            return Err(Error::DimensionMismatch {
                expected: model.dimension(),
                found: map.output_dim(),
            });
        }
        Ok(Self::build(model, Some(map), map.radius_multiplier()?))
    }

    fn build(model: &'a MulticlassModel, map: Option<&'a FourierFeatureMap>, multiplier: f64) -> Self {
        let k = model.num_classes();
        let mut pair_norms = vec![0.0; k * k];
        for a in 0..k {
            for b in a + 1..k {
                let n = norm(&sub(model.weights[a].weights(), model.weights[b].weights()));
                pair_norms[a * k + b] = n;
                pair_norms[b * k + a] = n;
            }
        }
        Self {
            model,
            map,
            pair_norms,
            multiplier,
        }
    }

    pub fn multiplier(&self) -> f64 {
        self.multiplier
    }

    /// Class scores of a raw input (embedded first for kernel models).
    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self.map {
            Some(m) => self.model.scores(&m.embed(x)?),
            None => self.model.scores(x),
        }
    }

    /// Radius from precomputed scores.
    pub fn radius_from_scores(&self, scores: &[f64], y_true: usize) -> Result<f64> {
        let k = self.model.num_classes();
        if y_true >= k {
            return Err(Error::ClassOutOfRange {
                class: y_true,
                num_classes: k,
            });
        }
        let mut r = f64::INFINITY;
        for other in (0..k).filter(|&c| c != y_true) {
            let den = self.pair_norms[y_true * k + other];
            let term = if den == 0.0 {
                0.0
            } else {
                (scores[y_true] - scores[other]) / den
            };
            r = r.min(term);
        }
        Ok(self.multiplier * r)
    }

    pub fn radius(&self, x: &[f64], y_true: usize) -> Result<f64> {
        self.radius_from_scores(&self.scores(x)?, y_true)
    }
}

/// `min_{y' != y} <w^(y) - w^(y'), x> / ||w^(y) - w^(y')||`; exact for
/// linear models, negative when `x` is misclassified.
pub fn certified_radius_linear(model: &MulticlassModel, x: &[f64], y_true: usize) -> Result<f64> {
    Certifier::linear(model).radius(x, y_true)
}

/// Lower bound on the input-space distance to a prediction change for a
/// model trained on random Fourier features.
pub fn certified_radius_kernel(
    model: &MulticlassModel,
    map: &FourierFeatureMap,
    x: &[f64],
    y_true: usize,
) -> Result<f64> {
    Certifier::kernel(model, map)?.radius(x, y_true)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusRecord {
    pub index: usize,
    pub true_class: usize,
    pub predicted_class: usize,
    pub radius: f64,
}

/// Radius and prediction for every test point, in dataset order.
pub fn certified_radii(
    model: &MulticlassModel,
    test: &MulticlassDataset,
    map: Option<&FourierFeatureMap>,
) -> Result<Vec<RadiusRecord>> {
    if test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let cert = match map {
        Some(m) => Certifier::kernel(model, m)?,
        None => Certifier::linear(model),
    };
    test.features()
        .par_iter()
        .zip(test.classes().par_iter())
        .enumerate()
        .map(|(index, (x, &y))| {
            let scores = cert.scores(x.as_slice())?;
            let predicted_class = crate::trainers::multiclass::argmax_first(&scores);
            Ok(RadiusRecord {
                index,
                true_class: y,
                predicted_class,
                radius: cert.radius_from_scores(&scores, y)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustCurve {
    pub points: Vec<(f64, f64)>,
}

/// `steps` evenly spaced values from 0 to `gamma_max` inclusive.
pub fn gamma_grid(gamma_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(invalid("gamma grid needs at least 2 points"));
    }
    if !(gamma_max > 0.0 && gamma_max.is_finite()) {
        return Err(invalid(format!("gamma max must be > 0, got {gamma_max}")));
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|k| gamma_max * k as f64 / last).collect())
}

fn check_gammas(gammas: &[f64]) -> Result<()> {
    if gammas.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
        return Err(invalid("gammas must be finite and >= 0"));
    }
    if gammas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("gammas must be strictly increasing"));
    }
    Ok(())
}

/// Fraction of radii strictly above each `gamma`.
pub fn curve_from_radii(radii: &[f64], gammas: &[f64]) -> Result<RobustCurve> {
    if radii.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_gammas(gammas)?;
    let n = radii.len() as f64;
    let points = gammas
        .iter()
        .map(|&g| (g, radii.iter().filter(|&&r| r > g).count() as f64 / n))
        .collect();
    Ok(RobustCurve { points })
}

pub fn robust_accuracy_curve(
    model: &MulticlassModel,
    test: &MulticlassDataset,
    gammas: &[f64],
    map: Option<&FourierFeatureMap>,
) -> Result<RobustCurve> {
    check_gammas(gammas)?;
    let radii: Vec<f64> = certified_radii(model, test, map)?.iter().map(|r| r.radius).collect();
    curve_from_radii(&radii, gammas)
}

/// Fraction of records whose prediction matches the label.
pub fn accuracy(records: &[RadiusRecord]) -> f64 {
    let hits = records.iter().filter(|r| r.true_class == r.predicted_class).count();
    hits as f64 / records.len() as f64
}

pub fn write_curve_csv<W: Write>(curve: &RobustCurve, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CURVE_HEADER}")?;
    for (g, a) in &curve.points {
        writeln!(out, "{g},{a}")?;
    }
    Ok(())
}

pub fn write_radii_csv<W: Write>(records: &[RadiusRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{RADII_HEADER}")?;
    for r in records {
        writeln!(out, "{},{},{},{}", r.index, r.true_class, r.predicted_class, r.radius)?;
    }
    Ok(())
}

/// Binary margin `<u, x>` with `u = (w0 - w1) / ||w0 - w1||`, signed so that
/// class 0 is positive.
pub fn binary_margin(model: &MulticlassModel, x: &[f64]) -> Result<f64> {
    if model.num_classes() != 2 {
        return Err(invalid("binary margin needs exactly 2 classes"));
    }
    let u = sub(model.weights[0].weights(), model.weights[1].weights());
    let n = norm(&u);
    if n == 0.0 {
        return Ok(0.0);
    }
    Ok(dot(&u, x) / n)
}
