//! Analytic accounting for the batch perceptron: amplification by
//! Poisson subsampling followed by advanced composition.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrivacyBudget {
    pub epsilon: f64,
    pub delta: f64,
}

impl PrivacyBudget {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(invalid(format!("epsilon must be finite and >= 0, got {epsilon}")));
        }
        if !(0.0..1.0).contains(&delta) {
            return Err(invalid(format!("delta must lie in [0, 1), got {delta}")));
        }
        Ok(Self { epsilon, delta })
    }

    pub fn dominated_by(&self, target: &PrivacyBudget) -> bool {
        self.epsilon <= target.epsilon && self.delta <= target.delta
    }
}

/// Mechanism parameters of one perceptron run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParameters {
    /// Per-coordinate Gaussian standard deviation.
    pub sigma: f64,
    /// Laplace scale; `+inf` means no count noise.
    pub laplace_scale: f64,
    /// Poisson inclusion probability.
    pub sampling_rate: f64,
}

fn open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// `T`-fold adaptive composition of an `(eps0, delta0)`-DP mechanism:
/// `(sqrt(2T ln(1/delta0)) eps0 + 2T eps0^2, (T+1) delta0)`.
pub fn advanced_composition(eps0: f64, delta0: f64, t: u64) -> Result<PrivacyBudget> {
    open_unit("eps0", eps0)?;
    open_unit("delta0", delta0)?;
    let tf = t as f64;
    let epsilon = (2.0 * tf * (1.0 / delta0).ln()).sqrt() * eps0 + 2.0 * tf * eps0 * eps0;
    let delta = (tf + 1.0) * delta0;
    if delta >= 1.0 {
        return Err(invalid(format!("composed delta {delta} is not below 1")));
    }
    PrivacyBudget::new(epsilon, delta)
}

/// Poisson subsampling at rate `p` turns `(eps0, delta0)` into
/// `(2 p eps0, p delta0)`.
pub fn amplify_by_subsampling(eps0: f64, delta0: f64, p: f64) -> Result<PrivacyBudget> {
    open_unit("eps0", eps0)?;
    open_unit("delta0", delta0)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("p must lie in [0, 1], got {p}")));
    }
    PrivacyBudget::new(2.0 * p * eps0, p * delta0)
}

/// `p = 1/sqrt(T)`, `sigma = 100 ln(T/delta) / epsilon`,
/// `b = 100 sqrt(ln(T/delta)) / epsilon`.
pub fn perceptron_noise(t: u64, epsilon: f64, delta: f64) -> Result<NoiseParameters> {
    if t == 0 {
        return Err(invalid("T must be positive"));
    }
    if !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    open_unit("delta", delta)?;
    let tf = t as f64;
    let log_term = (tf / delta).ln();
    Ok(NoiseParameters {
        sigma: 100.0 * log_term / epsilon,
        laplace_scale: 100.0 * log_term.sqrt() / epsilon,
        sampling_rate: 1.0 / tf.sqrt(),
    })
}

/// Prescribed noise for a `T`-iteration run together with the budget that
/// amplification and advanced composition certify for it. Fails if that
/// budget is not dominated by `(epsilon, delta)`.
pub fn perceptron_privacy_check(
    epsilon: f64,
    delta: f64,
    t: u64,
) -> Result<(NoiseParameters, PrivacyBudget)> {
    open_unit("epsilon", epsilon)?;
    open_unit("delta", delta)?;
    let noise = perceptron_noise(t, epsilon, delta)?;
    let tf = t as f64;
    let eps0 = epsilon / (20.0 * (tf / delta).ln().sqrt());
    let delta0 = delta / (2.0 * tf.sqrt());
    let per_iter = amplify_by_subsampling(eps0, delta0, noise.sampling_rate)?;
    let composed = advanced_composition(per_iter.epsilon, per_iter.delta, t)?;
    // Slack covers rounding in (T+1) * delta / (2T) at T = 1.
    let slack = 1.0 + 1e-12;
    if composed.epsilon > epsilon * slack || composed.delta > delta * slack {
        return Err(Error::BudgetExceeded {
            epsilon: composed.epsilon,
            delta: composed.delta,
            target_epsilon: epsilon,
            target_delta: delta,
        });
    }
    Ok((noise, composed))
}
