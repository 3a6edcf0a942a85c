//! Synthetic datasets realizable with a given margin.
//!
//! `x` is uniform on the unit ball conditioned on `|<w*, x>| > gamma`. The
//! conditional is sampled directly: the projection `t = <w*, x>` of a
//! uniform point has density proportional to `(1 - t^2)^((d-1)/2)`, and
//! given `t` the orthogonal part is uniform in a `(d-1)`-ball of radius
//! `sqrt(1 - t^2)`. Plain rejection from the ball would need millions of
//! draws per point at `d = 100, gamma = 0.5`.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::halfspace::{Dataset, FeatureVector, Halfspace, Label, LabeledExample};
use crate::linalg::{axpy, dot, norm};
use crate::privacy::{sample_gaussian_vector, sample_unit_vector, SeededRng};

/// Attempts allowed per requested example.
pub const ATTEMPTS_PER_EXAMPLE: u64 = 1_000_000;

/// `|t|` on `[gamma, 1]` with density proportional to `(1 - t^2)^m`.
/// With `u = 1 - t^2`, draw `u` proportional to `u^m` on `[0, 1 - gamma^2]`
/// and accept with probability `gamma / t` to correct the Jacobian.
fn sample_projection(m: f64, gamma: f64, rng: &mut SeededRng, attempts: &mut u64) -> Option<f64> {
    loop {
        if *attempts == 0 {
            return None;
        }
        *attempts -= 1;
        let v: f64 = rng.random();
        let u = (1.0 - gamma * gamma) * v.powf(1.0 / (m + 1.0));
        let s = (1.0 - u).sqrt();
        let accept: f64 = rng.random();
        if accept * s < gamma {
            return Some(s);
        }
    }
}

pub fn synth_margin_dataset(d: usize, n: usize, gamma: f64, seed: u64) -> Result<(Dataset, Halfspace)> {
    if d == 0 || n == 0 {
        return Err(invalid("d and n must be positive"));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    let mut rng = SeededRng::new(seed);
    let w = sample_unit_vector(d, &mut rng);
    let m = (d as f64 - 1.0) / 2.0;
    let mut attempts = ATTEMPTS_PER_EXAMPLE.saturating_mul(n as u64);
    let exhausted = || Error::InvalidArgument(format!("generator exceeded {ATTEMPTS_PER_EXAMPLE} attempts per example"));

    let mut examples = Vec::with_capacity(n);
    while examples.len() < n {
        let s = sample_projection(m, gamma, &mut rng, &mut attempts).ok_or_else(exhausted)?;
        let positive: bool = rng.random();
        let sign = if positive { 1.0 } else { -1.0 };
        let mut x = vec![0.0; d];
        axpy(&mut x, sign * s, &w);
        if d > 1 {
            let mut g = sample_gaussian_vector(d, 1.0, &mut rng);
            let along = dot(&g, &w);
            axpy(&mut g, -along, &w);
            let gn = norm(&g);
            let u: f64 = rng.random();
            let r = (1.0 - s * s).sqrt() * u.powf(1.0 / (d as f64 - 1.0));
            if gn > 0.0 {
                axpy(&mut x, r / gn, &g);
            }
        }
        let label = Label::from_bool(positive);
        if !(label.sign() * dot(&w, &x) > gamma) || norm(&x) > 1.0 {
            continue;
        }
        examples.push(LabeledExample::new(FeatureVector::new(x)?, label));
    }
    Ok((Dataset::new_unit_ball(d, examples)?, Halfspace::new(w)?))
}
