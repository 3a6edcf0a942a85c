//! Closed-form sample-size and generalization calculators.
//!
//! All logarithms are natural. Bounds are returned unclamped; a failure
//! probability above 1 is a vacuous bound, not an error.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::privacy::perceptron_noise;

/// Additive gap of the large-margin generalization bound,
/// `400 * sqrt(ln(4/xi) / (n * gamma_hat^2))`.
pub fn generalization_gap(n: u64, gamma_hat: f64, xi: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if !(gamma_hat > 0.0 && gamma_hat <= 1.0) {
        return Err(invalid(format!("gamma_hat must lie in (0, 1], got {gamma_hat}")));
    }
    if !(xi > 0.0 && xi < 1.0) {
        return Err(invalid(format!("xi must lie in (0, 1), got {xi}")));
    }
    Ok(400.0 * ((4.0 / xi).ln() / (n as f64 * gamma_hat * gamma_hat)).sqrt())
}

/// The two exponent terms of the covering-number failure bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveringExponents {
    /// `36 / (g - g')^2 * ln(20 n / (g - g'))`
    pub complexity: f64,
    /// `eta^2 * alpha' * n / (4 (1 + eta)^2)`
    pub concentration: f64,
}

impl CoveringExponents {
    /// Natural log of the failure-probability bound.
    pub fn ln_bound(&self) -> f64 {
        4f64.ln() + self.complexity - self.concentration
    }
}

pub fn covering_exponents(
    n: u64,
    gamma_hat: f64,
    gamma_hat_prime: f64,
    eta: f64,
    alpha_prime: f64,
) -> Result<CoveringExponents> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    if !(gamma_hat_prime > 0.0 && gamma_hat > gamma_hat_prime) {
        return Err(invalid(format!(
            "need gamma_hat > gamma_hat_prime > 0, got {gamma_hat} and {gamma_hat_prime}"
        )));
    }
    if !(eta > 0.0) {
        return Err(invalid(format!("eta must be positive, got {eta}")));
    }
    if !(alpha_prime > 0.0 && alpha_prime < 0.5) {
        return Err(invalid(format!("alpha_prime must lie in (0, 0.5), got {alpha_prime}")));
    }
    let n = n as f64;
    let gap = gamma_hat - gamma_hat_prime;
    Ok(CoveringExponents {
        complexity: 36.0 / (gap * gap) * (20.0 * n / gap).ln(),
        concentration: eta * eta * alpha_prime * n / (4.0 * (1.0 + eta) * (1.0 + eta)),
    })
}

/// Failure-probability bound `4 * exp(complexity - concentration)`.
///
/// Overflows to `+inf` for small `n`; use [`covering_exponents`] and
/// [`CoveringExponents::ln_bound`] when the magnitude matters.
pub fn generalization_gap_covering(
    n: u64,
    gamma_hat: f64,
    gamma_hat_prime: f64,
    eta: f64,
    alpha_prime: f64,
) -> Result<f64> {
    let e = covering_exponents(n, gamma_hat, gamma_hat_prime, eta, alpha_prime)?;
    Ok(4.0 * (e.complexity - e.concentration).exp())
}

/// Parameter settings prescribed by the perceptron and exponential-mechanism
/// sample-complexity analyses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalPrescription {
    pub iterations: u64,
    pub sampling_rate: f64,
    pub sigma: f64,
    pub laplace_scale: f64,
    /// Sample size for the batch perceptron. Stored as `f64` since it
    /// routinely exceeds `u64` range for small `gamma`.
    pub n_perceptron: f64,
    pub n_exp_mech: f64,
    pub lambda_cap: f64,
    pub gamma_prime: f64,
    pub gamma_gap: f64,
}

/// `ceil(x)` that treats values within a relative `1e-9` of an integer as
/// that integer, so decimal inputs like `gamma = 0.5` give the exact count.
pub(crate) fn ceil_tolerant(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

/// Iteration count `ceil(1500 / (alpha * gamma_gap^2))`.
pub fn perceptron_iterations(alpha: f64, gamma_gap: f64) -> Result<u64> {
    if !(alpha > 0.0 && alpha < 1.0 + f64::EPSILON) {
        return Err(invalid(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if !(gamma_gap > 0.0) {
        return Err(invalid(format!("gamma_gap must be positive, got {gamma_gap}")));
    }
    let t = ceil_tolerant(1500.0 / (alpha * gamma_gap * gamma_gap));
    if t > u64::MAX as f64 {
        return Err(invalid("iteration count exceeds u64 range"));
    }
    Ok(t as u64)
}

pub fn prescribed_parameters(
    epsilon: f64,
    delta: f64,
    alpha: f64,
    gamma: f64,
    d: u64,
) -> Result<TheoreticalPrescription> {
    if !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    for (name, v) in [("delta", delta), ("alpha", alpha), ("gamma", gamma)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(invalid(format!("{name} must lie in (0, 1), got {v}")));
        }
    }
    if d == 0 {
        return Err(invalid("d must be positive"));
    }
    let gamma_prime = 0.95 * gamma;
    let gamma_gap = gamma - gamma_prime;
    let iterations = perceptron_iterations(alpha, gamma_gap)?;
    let noise = perceptron_noise(iterations, epsilon, delta)?;
    let (p, sigma) = (noise.sampling_rate, noise.sigma);

    let t = iterations as f64;
    let ln_t = t.ln();
    let d = d as f64;
    let n_perceptron = (100.0 * d.sqrt() * sigma * ln_t / (p * alpha.sqrt())
        + 1000.0 * sigma * ln_t.sqrt() / (p * alpha * gamma)
        + 100.0 * ln_t / alpha
        + 1e10 / (alpha * alpha * gamma * gamma))
        .ceil();
    let lambda_cap = 1e6 * (1.0 / alpha).ln().sqrt() * d.sqrt().max(1.0 / gamma);
    let n_exp_mech = (1e4 * lambda_cap * lambda_cap / (epsilon * alpha)
        + 1e10 / (alpha * alpha * gamma * gamma))
        .ceil();

    Ok(TheoreticalPrescription {
        iterations,
        sampling_rate: p,
        sigma,
        laplace_scale: noise.laplace_scale,
        n_perceptron,
        n_exp_mech,
        lambda_cap,
        gamma_prime,
        gamma_gap,
    })
}
