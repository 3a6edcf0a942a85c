//! Random Fourier features for the Gaussian kernel
//! `k(x, x') = exp(-||x - x'||^2 / (2 sigma_hat^2))`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{dot, norm};
use crate::privacy::{sample_gaussian_vector, SeededRng};

pub const POWER_ITERATION_TOL: f64 = 1e-6;
pub const POWER_ITERATION_MAX: usize = 10_000;
pub const DEFAULT_KERNEL_DIM: usize = 2048;
pub const DEFAULT_WIDTH_GRID: [f64; 5] = [2.0, 3.5, 5.0, 7.5, 10.0];

/// The parameters that identify a feature map; frequencies are regenerated
/// from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub d_hat: usize,
    pub sigma_hat: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierFeatureMap {
    /// `d_hat` rows of length `input_dim`, row-major.
    rho: Vec<f64>,
    input_dim: usize,
    d_hat: usize,
    sigma_hat: f64,
    seed: u64,
}

/// Frequencies `rho_i ~ N(0, I / sigma_hat^2)`, drawn row by row from
/// `SeededRng::new(seed)`.
pub fn sample_feature_map(d: usize, d_hat: usize, sigma_hat: f64, seed: u64) -> Result<FourierFeatureMap> {
    FourierFeatureMap::sample(d, KernelSpec { d_hat, sigma_hat, seed })
}

impl FourierFeatureMap {
    pub fn sample(d: usize, spec: KernelSpec) -> Result<Self> {
        if d == 0 || spec.d_hat == 0 {
            return Err(invalid("feature map dimensions must be positive"));
        }
        if !(spec.sigma_hat > 0.0 && spec.sigma_hat.is_finite()) {
            return Err(invalid(format!("kernel width must be > 0, got {}", spec.sigma_hat)));
        }
        let mut rng = SeededRng::new(spec.seed);
        let std = 1.0 / spec.sigma_hat;
        let mut rho = Vec::with_capacity(d * spec.d_hat);
        for _ in 0..spec.d_hat {
            rho.extend(sample_gaussian_vector(d, std, &mut rng));
        }
        Ok(Self {
            rho,
            input_dim: d,
            d_hat: spec.d_hat,
            sigma_hat: spec.sigma_hat,
            seed: spec.seed,
        })
    }

    /// Builds a map from explicit frequency vectors (one per feature).
    pub fn from_frequencies(rho: Vec<Vec<f64>>, sigma_hat: f64, seed: u64) -> Result<Self> {
        let d_hat = rho.len();
        let d = rho.first().map_or(0, Vec::len);
        if d == 0 || d_hat == 0 {
            return Err(invalid("feature map dimensions must be positive"));
        }
        if rho.iter().any(|r| r.len() != d) {
            return Err(invalid("frequency vectors differ in length"));
        }
        if rho.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite frequency"));
        }
        Ok(Self {
            rho: rho.concat(),
            input_dim: d,
            d_hat,
            sigma_hat,
            seed,
        })
    }

    pub fn spec(&self) -> KernelSpec {
        KernelSpec {
            d_hat: self.d_hat,
            sigma_hat: self.sigma_hat,
            seed: self.seed,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn d_hat(&self) -> usize {
        self.d_hat
    }

    pub fn output_dim(&self) -> usize {
        2 * self.d_hat
    }

    pub fn sigma_hat(&self) -> f64 {
        self.sigma_hat
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn frequency(&self, i: usize) -> &[f64] {
        &self.rho[i * self.input_dim..(i + 1) * self.input_dim]
    }

    /// `(cos<rho_1, x>, ..., cos<rho_D, x>, sin<rho_1, x>, ..., sin<rho_D, x>) / sqrt(D)`
    pub fn embed(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                found: x.len(),
            });
        }
        let scale = 1.0 / (self.d_hat as f64).sqrt();
        let mut out = vec![0.0; 2 * self.d_hat];
        let (cos, sin) = out.split_at_mut(self.d_hat);
        for i in 0..self.d_hat {
            let (s, c) = dot(self.frequency(i), x).sin_cos();
            cos[i] = c * scale;
            sin[i] = s * scale;
        }
        Ok(out)
    }

    pub fn embed_all<X: AsRef<[f64]> + Sync>(&self, xs: &[X]) -> Result<Vec<Vec<f64>>> {
        xs.par_iter().map(|x| self.embed(x.as_ref())).collect()
    }

    /// `Pi v` for `v` of length `d_hat` (columns of `Pi` are the `rho_i`).
    fn pi_mul(&self, v: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                for (o, r) in out.iter_mut().zip(self.frequency(i)) {
                    *o += vi * r;
                }
            }
        }
    }

    /// `Pi^T u` for `u` of length `d`.
    fn pi_t_mul(&self, u: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.frequency(i), u);
        }
    }

    /// Largest singular value of the `d x d_hat` matrix `Pi`, by power
    /// iteration on the smaller of `Pi Pi^T` and `Pi^T Pi`.
    pub fn operator_norm(&self) -> Result<f64> {
        let (d, dh) = (self.input_dim, self.d_hat);
        let small = d.min(dh);
        let mut tmp = vec![0.0; d.max(dh)];
        let gram = |v: &[f64], out: &mut [f64], tmp: &mut [f64]| {
            if d <= dh {
                let t = &mut tmp[..dh];
                self.pi_t_mul(v, t);
                self.pi_mul(t, out);
            } else {
                let t = &mut tmp[..d];
                self.pi_mul(v, t);
                self.pi_t_mul(t, out);
            }
        };

        let starts = std::iter::once(vec![1.0 / (small as f64).sqrt(); small]).chain((0..small).map(|k| {
            let mut e = vec![0.0; small];
            e[k] = 1.0;
            e
        }));
        let mut next = vec![0.0; small];
        for mut v in starts {
            gram(&v, &mut next, &mut tmp);
            if norm(&next) == 0.0 {
                continue;
            }
            let mut lambda = dot(&v, &next);
            for _ in 0..POWER_ITERATION_MAX {
                let n = norm(&next);
                for (vi, ni) in v.iter_mut().zip(&next) {
                    *vi = ni / n;
                }
                gram(&v, &mut next, &mut tmp);
                let updated = dot(&v, &next);
                if (updated - lambda).abs() <= POWER_ITERATION_TOL * updated.abs() {
                    return Ok(updated.max(0.0).sqrt());
                }
                lambda = updated;
            }
            return Err(Error::NonConvergence(POWER_ITERATION_MAX));
        }
        // Every basis vector lies in the kernel: Pi = 0.
        Ok(0.0)
    }

    /// `sqrt(d_hat) / sigma_max(Pi)`, the factor converting feature-space
    /// margins into input-space radii.
    pub fn radius_multiplier(&self) -> Result<f64> {
        let s = self.operator_norm()?;
        if s == 0.0 {
            return Err(invalid("feature map has zero operator norm"));
        }
        Ok((self.d_hat as f64).sqrt() / s)
    }
}

pub fn gaussian_kernel(x: &[f64], x_prime: &[f64], sigma_hat: f64) -> Result<f64> {
    if x.len() != x_prime.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: x_prime.len(),
        });
    }
    if !(sigma_hat > 0.0) {
        return Err(invalid(format!("kernel width must be > 0, got {sigma_hat}")));
    }
    let sq: f64 = x.iter().zip(x_prime).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((-sq / (2.0 * sigma_hat * sigma_hat)).exp())
}
