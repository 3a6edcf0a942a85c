//! DP-SGD on the margin hinge loss with L2 regularization.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::halfspace::{Dataset, FeatureVector, Label};
use crate::linalg::{axpy, dot, norm};
use crate::privacy::{calibrate_sigma, poisson_subsample, sample_gaussian_vector, SeededRng};

/// Per-example gradients are clipped to this Euclidean norm.
pub const CLIP_NORM: f64 = 1.0;

/// `(gamma - y<z, x>) / (0.1 gamma)` when `y<z, x> < gamma`, else 0.
pub fn hinge_loss(z: &[f64], x: &[f64], y: Label, gamma: f64) -> f64 {
    let m = y.sign() * dot(z, x);
    if m >= gamma {
        0.0
    } else {
        (gamma - m) / (0.1 * gamma)
    }
}

/// Gradient of [`hinge_loss`] in `z` (the zero subgradient at the kink).
pub fn hinge_gradient(z: &[f64], x: &[f64], y: Label, gamma: f64) -> Vec<f64> {
    let m = y.sign() * dot(z, x);
    if m >= gamma {
        return vec![0.0; x.len()];
    }
    let c = -y.sign() / (0.1 * gamma);
    x.iter().map(|v| c * v).collect()
}

/// Scales `g` down to norm at most [`CLIP_NORM`].
pub fn clip_to_unit(g: &mut [f64]) {
    let n = norm(g);
    if n > CLIP_NORM {
        let s = CLIP_NORM / n;
        g.iter_mut().for_each(|v| *v *= s);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpSgdParams {
    pub gamma: f64,
    /// `None` trains without noise.
    pub epsilon: Option<f64>,
    pub delta: f64,
    pub batch_rate: f64,
    pub learning_rate: f64,
    pub lambda_reg: f64,
    pub epochs: u64,
}

impl DpSgdParams {
    /// `epochs * ceil(1 / q)`.
    pub fn iterations(&self) -> u64 {
        self.epochs * (1.0 / self.batch_rate).ceil() as u64
    }

    fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(invalid(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if !(self.batch_rate > 0.0 && self.batch_rate <= 1.0) {
            return Err(invalid(format!("batch rate must lie in (0, 1], got {}", self.batch_rate)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(invalid("learning rate must be positive"));
        }
        if !(self.lambda_reg >= 0.0 && self.lambda_reg.is_finite()) {
            return Err(invalid("regularization must be >= 0"));
        }
        if self.epochs == 0 {
            return Err(invalid("epochs must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpSgdOutcome {
    /// Final iterate, not normalized.
    pub weights: Vec<f64>,
    pub sigma: f64,
    pub iterations: u64,
}

pub fn dp_sgd_hinge(data: &Dataset, params: &DpSgdParams, rng: &mut SeededRng) -> Result<DpSgdOutcome> {
    params.validate()?;
    let t = params.iterations();
    let sigma = match params.epsilon {
        Some(eps) => calibrate_sigma(eps, params.delta, params.batch_rate, t)?.sigma,
        None => 0.0,
    };
    dp_sgd_hinge_with_sigma(data, params, sigma, rng)
}

/// [`dp_sgd_hinge`] with an explicit noise multiplier.
pub fn dp_sgd_hinge_with_sigma(
    data: &Dataset,
    params: &DpSgdParams,
    sigma: f64,
    rng: &mut SeededRng,
) -> Result<DpSgdOutcome> {
    dp_sgd_hinge_from(data, params, sigma, vec![0.0; data.dimension()], rng)
}

/// Runs the updates starting from `z0` instead of the origin.
pub fn dp_sgd_hinge_from(
    data: &Dataset,
    params: &DpSgdParams,
    sigma: f64,
    z0: Vec<f64>,
    rng: &mut SeededRng,
) -> Result<DpSgdOutcome> {
    params.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if z0.len() != data.dimension() {
        return Err(Error::DimensionMismatch {
            expected: data.dimension(),
            found: z0.len(),
        });
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(invalid(format!("sigma must be >= 0, got {sigma}")));
    }
    let n = data.len();
    let d = data.dimension();
    let t = params.iterations();
    let denom = params.batch_rate * n as f64;
    let mut z = z0;
    let mut sum = vec![0.0; d];
    for _ in 0..t {
        sum.fill(0.0);
        for j in poisson_subsample(n, params.batch_rate, rng) {
            let (x, y): (&FeatureVector, Label) = data.get(j);
            let mut g = hinge_gradient(&z, x.as_slice(), y, params.gamma);
            clip_to_unit(&mut g);
            axpy(&mut sum, 1.0, &g);
        }
        if sigma > 0.0 {
            axpy(&mut sum, 1.0, &sample_gaussian_vector(d, sigma, rng));
        }
        let decay = 1.0 - 2.0 * params.learning_rate * params.lambda_reg;
        for (zi, si) in z.iter_mut().zip(&sum) {
            *zi = decay * *zi - params.learning_rate * si / denom;
        }
    }
    Ok(DpSgdOutcome {
        weights: z,
        sigma,
        iterations: t,
    })
}
