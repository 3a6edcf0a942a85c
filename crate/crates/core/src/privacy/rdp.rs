//! Renyi-DP accounting for the Poisson-subsampled Gaussian mechanism with
//! L2 sensitivity 1, and calibration of the noise multiplier.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const MIN_ORDER: u32 = 2;
pub const MAX_ORDER: u32 = 128;
pub const SIGMA_BRACKET: (f64, f64) = (0.3, 1e6);
pub const CALIBRATION_MAX_ITERS: usize = 60;
pub const CALIBRATION_REL_TOL: f64 = 1e-3;

/// Renyi divergence bounds `values[i]` at orders `orders[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RdpCurve {
    orders: Vec<f64>,
    values: Vec<f64>,
}

impl RdpCurve {
    pub fn new(orders: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if orders.len() != values.len() {
            return Err(invalid("orders and values differ in length"));
        }
        if orders.iter().any(|&a| !(a > 1.0 && a.is_finite())) {
            return Err(invalid("every order must be finite and > 1"));
        }
        if orders.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("orders must be strictly increasing"));
        }
        if values.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(invalid("values must be finite and non-negative"));
        }
        Ok(Self { orders, values })
    }

    pub fn orders(&self) -> &[f64] {
        &self.orders
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// RDP of the sampled Gaussian mechanism at integer `order`:
/// `ln(sum_k C(a,k) (1-q)^(a-k) q^k exp(k(k-1) / (2 sigma^2))) / (a - 1)`,
/// summed in log space.
pub fn rdp_subsampled_gaussian(q: f64, sigma: f64, order: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid(format!("q must lie in [0, 1], got {q}")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    if !(order >= 2.0 && order.fract() == 0.0 && order <= u32::MAX as f64) {
        return Err(invalid(format!("order must be an integer >= 2, got {order}")));
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    let alpha = order as u32;
    if q == 1.0 {
        return Ok(order / (2.0 * sigma * sigma));
    }
    let ln_q = q.ln();
    let ln_1mq = (-q).ln_1p();
    let inv_two_var = 1.0 / (2.0 * sigma * sigma);
    let mut ln_binom = 0.0f64;
    let mut acc = f64::NEG_INFINITY;
    for k in 0..=alpha {
        if k > 0 {
            ln_binom += ((alpha - k + 1) as f64).ln() - (k as f64).ln();
        }
        let kf = k as f64;
        let term = ln_binom + (order - kf) * ln_1mq + kf * ln_q + kf * (kf - 1.0) * inv_two_var;
        acc = log_add_exp(acc, term);
    }
    // The exact sum is >= 1; clamp rounding below zero.
    Ok((acc / (order - 1.0)).max(0.0))
}

/// Curve over the integer orders `2..=128`.
pub fn rdp_curve(q: f64, sigma: f64) -> Result<RdpCurve> {
    let orders: Vec<f64> = (MIN_ORDER..=MAX_ORDER).map(f64::from).collect();
    let values = orders
        .iter()
        .map(|&a| rdp_subsampled_gaussian(q, sigma, a))
        .collect::<Result<Vec<_>>>()?;
    RdpCurve::new(orders, values)
}

/// `T`-fold composition; RDP adds up per order.
pub fn compose_rdp(curve: &RdpCurve, t: u64) -> Result<RdpCurve> {
    if t == 0 {
        return Err(invalid("T must be positive"));
    }
    let tf = t as f64;
    RdpCurve::new(
        curve.orders.clone(),
        curve.values.iter().map(|v| v * tf).collect(),
    )
}

/// `min_a value(a) + ln(1/delta) / (a - 1)` and the minimizing order.
/// Ties go to the smaller order.
pub fn rdp_to_eps(curve: &RdpCurve, delta: f64) -> Result<(f64, f64)> {
    if curve.is_empty() {
        return Err(invalid("empty RDP curve"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    let ln_inv_delta = -delta.ln();
    let mut best = (f64::INFINITY, curve.orders[0]);
    for (&a, &v) in curve.orders.iter().zip(&curve.values) {
        let eps = v + ln_inv_delta / (a - 1.0);
        if eps < best.0 {
            best = (eps, a);
        }
    }
    Ok(best)
}

/// Epsilon spent by `T` steps at sampling rate `q` and noise `sigma`.
pub fn rdp_epsilon(q: f64, sigma: f64, t: u64, delta: f64) -> Result<(f64, f64)> {
    rdp_to_eps(&compose_rdp(&rdp_curve(q, sigma)?, t)?, delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub sigma: f64,
    pub epsilon: f64,
    pub best_order: f64,
}

/// Smallest `sigma` in `[0.3, 1e6]` (to relative `1e-3`) whose composed RDP
/// guarantee converts to at most `epsilon` at `delta`.
pub fn calibrate_sigma(epsilon: f64, delta: f64, q: f64, t: u64) -> Result<Calibration> {
    if !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(invalid(format!("q must lie in (0, 1], got {q}")));
    }
    let (mut lo, mut hi) = SIGMA_BRACKET;
    let eval = |s: f64| rdp_epsilon(q, s, t, delta);

    let (eps_hi, order_hi) = eval(hi)?;
    if eps_hi > epsilon {
        return Err(Error::CalibrationInfeasible {
            target_epsilon: epsilon,
            target_delta: delta,
            sigma_lo: SIGMA_BRACKET.0,
            sigma_hi: SIGMA_BRACKET.1,
        });
    }
    let (eps_lo, order_lo) = eval(lo)?;
    if eps_lo <= epsilon {
        return Ok(Calibration {
            sigma: lo,
            epsilon: eps_lo,
            best_order: order_lo,
        });
    }

    let mut at_hi = (eps_hi, order_hi);
    let mut at_lo = eps_lo;
    for _ in 0..CALIBRATION_MAX_ITERS {
        if hi / lo - 1.0 <= CALIBRATION_REL_TOL {
            break;
        }
        let mid = (lo * hi).sqrt();
        let (eps_mid, order_mid) = eval(mid)?;
        if eps_mid > at_lo || eps_mid < at_hi.0 {
            let (sigma_small, eps_small, sigma_large, eps_large) = if eps_mid > at_lo {
                (lo, at_lo, mid, eps_mid)
            } else {
                (mid, eps_mid, hi, at_hi.0)
            };
            return Err(Error::NonMonotoneAccountant {
                sigma_small,
                eps_small,
                sigma_large,
                eps_large,
            });
        }
        if eps_mid <= epsilon {
            hi = mid;
            at_hi = (eps_mid, order_mid);
        } else {
            lo = mid;
            at_lo = eps_mid;
        }
    }
    Ok(Calibration {
        sigma: hi,
        epsilon: at_hi.0,
        best_order: at_hi.1,
    })
}
