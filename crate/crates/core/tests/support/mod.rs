//! Independent reference computations shared by the integration tests and
//! the acceptance suite.
#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use nalgebra::DMatrix;
use privhalf::kernel::FourierFeatureMap;
use privhalf::trainers::predict;
use privhalf::MulticlassModel;

/// Upper 1e-3 quantile of the chi-square distribution with 3 degrees of
/// freedom.
pub const CHI2_3DOF_999: f64 = 16.266_236_196_238_13;

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson over `panels` equal sub-intervals, each refined to its
/// share of the absolute tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, tol: f64) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == panels { b } else { lo + h };
            let (fa, fb) = (f(lo), f(hi));
            let fm = f(0.5 * (lo + hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            simpson_rec(&f, lo, hi, fa, fm, fb, whole, tol / panels as f64, 50)
        })
        .sum()
}

fn ln_expm1_abs(x: f64) -> f64 {
    if x > 40.0 {
        x
    } else {
        x.exp_m1().abs().ln()
    }
}

/// RDP of the Poisson-subsampled Gaussian mechanism at an integer order,
/// by numerical integration of `E_{z ~ N(0, s^2)} [(1 - q + q e^{(2z-1)/(2s^2)})^a] - 1`
/// over `[-40 s, 40 s + 1]`.
pub fn rdp_quadrature(q: f64, sigma: f64, order: f64) -> f64 {
    let var = sigma * sigma;
    let ln_norm = -0.5 * (2.0 * std::f64::consts::PI * var).ln();
    // Signed log-magnitude of mu0(z) * ((1 + q (e^t - 1))^a - 1).
    let log_g = |z: f64| -> (f64, f64) {
        let t = (2.0 * z - 1.0) / (2.0 * var);
        let inner = order * (q * t.exp_m1()).ln_1p();
        let sign = if inner < 0.0 { -1.0 } else { 1.0 };
        (sign, ln_norm - z * z / (2.0 * var) + ln_expm1_abs(inner))
    };
    let (a, b) = (-40.0 * sigma, 40.0 * sigma + 1.0);
    let scale = (0..=8000)
        .map(|i| log_g(a + (b - a) * i as f64 / 8000.0).1)
        .fold(f64::NEG_INFINITY, f64::max);
    let scaled = integrate(
        |z| {
            let (s, l) = log_g(z);
            s * (l - scale).exp()
        },
        a,
        b,
        400,
        1e-10,
    );
    // ln A with A = 1 + exp(scale) * scaled.
    let ln_a = if scale < 600.0 {
        (scale.exp() * scaled).ln_1p()
    } else {
        scale + scaled.ln()
    };
    ln_a / (order - 1.0)
}

/// Softmax of `(epsilon / 2) * scores`.
pub fn softmax_oracle(scores: &[f64], epsilon: f64) -> Vec<f64> {
    let top = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = scores.iter().map(|s| (0.5 * epsilon * (s - top)).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

/// Largest singular value of the `d x d_hat` frequency matrix via a full SVD.
pub fn svd_operator_norm(map: &FourierFeatureMap) -> f64 {
    let (d, dh) = (map.input_dim(), map.d_hat());
    let m = DMatrix::from_fn(d, dh, |r, c| map.frequency(c)[r]);
    m.singular_values().max()
}

/// Smallest radius `k * step` (`k >= 1`, at most `max_radius`) along any of
/// `angles` evenly spaced directions in the plane at which the prediction
/// differs from `class`.
pub fn polar_flip_radius(
    model: &MulticlassModel,
    map: Option<&FourierFeatureMap>,
    x: [f64; 2],
    class: usize,
    step: f64,
    max_radius: f64,
    angles: usize,
) -> Option<f64> {
    let steps = (max_radius / step).floor() as usize;
    let mut best: Option<f64> = None;
    for a in 0..angles {
        let theta = 2.0 * std::f64::consts::PI * a as f64 / angles as f64;
        let (s, c) = theta.sin_cos();
        for k in 1..=steps {
            let r = step * k as f64;
            if best.is_some_and(|b| r >= b) {
                break;
            }
            let p = [x[0] + r * c, x[1] + r * s];
            if predict(model, &p, map).unwrap() != class {
                best = Some(r);
                break;
            }
        }
    }
    best
}

/// Whether some point at distance at most `radius` from `x` (on a polar grid)
/// is misclassified by the halfspace `w`, taking label `y` as correct when
/// `y <w, x'> > 0`.
pub fn polar_grid_nonrobust(w: [f64; 2], x: [f64; 2], y: f64, radius: f64, step: f64, angles: usize) -> bool {
    let margin = |p: [f64; 2]| y * (w[0] * p[0] + w[1] * p[1]);
    if margin(x) <= 0.0 {
        return true;
    }
    let steps = (radius / step).round() as usize;
    (0..angles).any(|a| {
        let theta = 2.0 * std::f64::consts::PI * a as f64 / angles as f64;
        let (s, c) = theta.sin_cos();
        (1..=steps).any(|k| {
            let r = (step * k as f64).min(radius);
            margin([x[0] + r * c, x[1] + r * s]) <= 0.0
        })
    })
}
