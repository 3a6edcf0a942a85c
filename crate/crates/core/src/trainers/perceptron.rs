//! DP Batch Perceptron.
//!
//! Each iteration Poisson-samples a batch, collects the batch examples that
//! the current normalized weights fail to classify with margin `gamma'`,
//! adds their sum `sum y * x` plus Gaussian noise to the weights. In
//! early-stop mode a Laplace-noised mistake count below `0.3 * alpha * p * n`
//! ends the run with the previous iterate; in fixed-T mode the count check
//! and its noise are skipped and `w_T / ||w_T||` is returned.
//!
//! The random draws happen in a fixed order per iteration (batch, Laplace
//! count noise, Gaussian update noise), so a run is a pure function of the
//! data, the configuration and the generator's seed.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::halfspace::{signed_score, Dataset, Halfspace, NORM_TOLERANCE};
use crate::linalg::{axpy, norm};
use crate::privacy::{poisson_subsample, sample_gaussian_vector, sample_laplace, SeededRng};

/// Fraction of `alpha * p * n` below which the noisy mistake count stops
/// the run.
pub const EARLY_STOP_FACTOR: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopMode {
    EarlyStop,
    FixedT,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerceptronConfig {
    /// Training margin `gamma'`.
    pub gamma_prime: f64,
    /// Poisson inclusion probability `p`.
    pub sampling_rate: f64,
    /// Iteration budget `T`.
    pub iterations: u64,
    /// Laplace scale `b`; `f64::INFINITY` disables count noise (tests only).
    pub laplace_scale: f64,
    /// Gaussian noise standard deviation per coordinate.
    pub sigma: f64,
    /// Target accuracy; sets the early-stop threshold.
    pub alpha: f64,
    pub mode: StopMode,
}

impl PerceptronConfig {
    /// Noiseless fixed-T configuration.
    pub fn fixed(gamma_prime: f64, sampling_rate: f64, iterations: u64) -> Self {
        Self {
            gamma_prime,
            sampling_rate,
            iterations,
            laplace_scale: f64::INFINITY,
            sigma: 0.0,
            alpha: 0.5,
            mode: StopMode::FixedT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_prime >= 0.0 && self.gamma_prime.is_finite()) {
            return Err(invalid(format!("gamma' must be >= 0, got {}", self.gamma_prime)));
        }
        if !(self.sampling_rate > 0.0 && self.sampling_rate <= 1.0) {
            return Err(invalid(format!(
                "sampling rate must lie in (0, 1], got {}",
                self.sampling_rate
            )));
        }
        if self.iterations == 0 {
            return Err(invalid("iteration count must be positive"));
        }
        if !(self.laplace_scale > 0.0) {
            return Err(invalid(format!(
                "laplace scale must be > 0 or +inf, got {}",
                self.laplace_scale
            )));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(invalid(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainResult {
    Weights(Halfspace),
    Failed,
}

/// Output of one run plus per-iteration diagnostics. The diagnostics are
/// not privatized and must not leave the process.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub result: TrainResult,
    /// Iteration `i` at which the early-stop test fired.
    pub stop_iteration: Option<u64>,
    /// `|M_i|` for every executed iteration.
    pub mistake_counts: Vec<usize>,
    /// `|M_i| + nu_i`; empty in fixed-T mode.
    pub noisy_counts: Vec<f64>,
    /// `|S_i|` for every executed iteration.
    pub batch_sizes: Vec<usize>,
    /// The returned iterate was the zero vector and `e_1` was substituted.
    pub degenerate_stop: bool,
}

impl TrainOutcome {
    pub fn weights(&self) -> Option<&Halfspace> {
        match &self.result {
            TrainResult::Weights(w) => Some(w),
            TrainResult::Failed => None,
        }
    }

    pub fn total_mistakes(&self) -> usize {
        self.mistake_counts.iter().sum()
    }
}

fn unit_or_first_basis(w: &[f64]) -> Result<(Halfspace, bool)> {
    let n = norm(w);
    if n == 0.0 {
        return Ok((Halfspace::basis(w.len(), 0), true));
    }
    let h = Halfspace::new(w.iter().map(|v| v / n).collect())?;
    debug_assert!((h.norm() - 1.0).abs() <= NORM_TOLERANCE);
    Ok((h, false))
}

pub fn dp_batch_perceptron(
    data: &Dataset,
    cfg: &PerceptronConfig,
    rng: &mut SeededRng,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = data.len();
    let d = data.dimension();
    let threshold = EARLY_STOP_FACTOR * cfg.alpha * cfg.sampling_rate * n as f64;
    let early_stop = cfg.mode == StopMode::EarlyStop;

    let mut w = vec![0.0; d];
    let mut w_unit = vec![0.0; d];
    let mut mistake_counts = Vec::new();
    let mut noisy_counts = Vec::new();
    let mut batch_sizes = Vec::new();

    for i in 1..=cfg.iterations {
        let batch = poisson_subsample(n, cfg.sampling_rate, rng);
        batch_sizes.push(batch.len());

        // <w/||w||, x> with <0/||0||, x> := 0
        let w_norm = norm(&w);
        if w_norm > 0.0 {
            for (u, v) in w_unit.iter_mut().zip(&w) {
                *u = v / w_norm;
            }
        } else {
            w_unit.fill(0.0);
        }
        let mistakes: Vec<usize> = batch
            .into_iter()
            .filter(|&j| {
                let (x, y) = data.get(j);
                !(signed_score(&w_unit, x, y) > cfg.gamma_prime)
            })
            .collect();
        mistake_counts.push(mistakes.len());

        if early_stop {
            let nu = if cfg.laplace_scale.is_infinite() {
                0.0
            } else {
                sample_laplace(cfg.laplace_scale, rng)
            };
            let noisy = mistakes.len() as f64 + nu;
            noisy_counts.push(noisy);
            if noisy < threshold {
                let (h, degenerate) = unit_or_first_basis(&w)?;
                return Ok(TrainOutcome {
                    result: TrainResult::Weights(h),
                    stop_iteration: Some(i),
                    mistake_counts,
                    noisy_counts,
                    batch_sizes,
                    degenerate_stop: degenerate,
                });
            }
        }

        for &j in &mistakes {
            let (x, y) = data.get(j);
            axpy(&mut w, y.sign(), x.as_slice());
        }
        if cfg.sigma > 0.0 {
            let g = sample_gaussian_vector(d, cfg.sigma, rng);
            axpy(&mut w, 1.0, &g);
        }
    }

    if early_stop {
        return Ok(TrainOutcome {
            result: TrainResult::Failed,
            stop_iteration: None,
            mistake_counts,
            noisy_counts,
            batch_sizes,
            degenerate_stop: false,
        });
    }
    let (h, degenerate) = unit_or_first_basis(&w)?;
    Ok(TrainOutcome {
        result: TrainResult::Weights(h),
        stop_iteration: None,
        mistake_counts,
        noisy_counts,
        batch_sizes,
        degenerate_stop: degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfspace::{margin_error, FeatureVector, Label, LabeledExample};

    fn single() -> Dataset {
        Dataset::new(
            2,
            vec![LabeledExample::new(
                FeatureVector::new(vec![0.8, 0.0]).unwrap(),
                Label::Positive,
            )],
        )
        .unwrap()
    }

    fn noiseless(mode: StopMode, t: u64) -> PerceptronConfig {
        PerceptronConfig {
            gamma_prime: 0.4,
            sampling_rate: 1.0,
            iterations: t,
            laplace_scale: f64::INFINITY,
            sigma: 0.0,
            alpha: 1.0,
            mode,
        }
    }

    #[test]
    fn hand_trace_early_stop() {
        let out = dp_batch_perceptron(&single(), &noiseless(StopMode::EarlyStop, 10), &mut SeededRng::new(0))
            .unwrap();
        assert_eq!(out.stop_iteration, Some(2));
        assert_eq!(out.mistake_counts, vec![1, 0]);
        assert_eq!(out.noisy_counts, vec![1.0, 0.0]);
        assert_eq!(out.weights().unwrap(), &Halfspace::basis(2, 0));
        assert!(!out.degenerate_stop);
    }

    #[test]
    fn hand_trace_fixed_t() {
        let out = dp_batch_perceptron(&single(), &noiseless(StopMode::FixedT, 3), &mut SeededRng::new(0))
            .unwrap();
        assert_eq!(out.stop_iteration, None);
        assert_eq!(out.mistake_counts, vec![1, 0, 0]);
        assert!(out.noisy_counts.is_empty());
        assert_eq!(out.weights().unwrap(), &Halfspace::basis(2, 0));
    }

    #[test]
    fn degenerate_first_iteration_stop() {
        let data = Dataset::new(
            1,
            (0..10)
                .map(|_| LabeledExample::new(FeatureVector::new(vec![0.5]).unwrap(), Label::Positive))
                .collect(),
        )
        .unwrap();
        // Full batch at w_0 = 0: |M_1| = 10 >= 0.3 * 10, so no stop at i = 1.
        let cfg = noiseless(StopMode::EarlyStop, 5);
        let out = dp_batch_perceptron(&data, &cfg, &mut SeededRng::new(0)).unwrap();
        assert_ne!(out.stop_iteration, Some(1));
        // A (near) empty first batch stops immediately while w_0 = 0.
        let sparse = PerceptronConfig { sampling_rate: 1e-12, ..cfg };
        let out = dp_batch_perceptron(&data, &sparse, &mut SeededRng::new(1)).unwrap();
        assert_eq!(out.stop_iteration, Some(1));
        assert!(out.degenerate_stop);
        assert_eq!(out.weights().unwrap(), &Halfspace::basis(1, 0));
    }

    #[test]
    fn fails_without_stop() {
        // Two contradictory points never reach margin; early-stop must fail.
        let data = Dataset::new(
            1,
            vec![
                LabeledExample::new(FeatureVector::new(vec![0.5]).unwrap(), Label::Positive),
                LabeledExample::new(FeatureVector::new(vec![0.5]).unwrap(), Label::Negative),
            ],
        )
        .unwrap();
        let mut cfg = noiseless(StopMode::EarlyStop, 20);
        cfg.alpha = 0.1;
        let out = dp_batch_perceptron(&data, &cfg, &mut SeededRng::new(2)).unwrap();
        assert_eq!(out.result, TrainResult::Failed);
        assert_eq!(out.mistake_counts.len(), 20);
    }

    #[test]
    fn noisy_run_is_unit_norm_and_deterministic() {
        let data = Dataset::new(
            3,
            (0..50)
                .map(|i| {
                    let t = i as f64 / 50.0;
                    LabeledExample::new(
                        FeatureVector::new(vec![0.5 * t.cos(), 0.5 * t.sin(), 0.3]).unwrap(),
                        Label::from_bool(i % 3 != 0),
                    )
                })
                .collect(),
        )
        .unwrap();
        let cfg = PerceptronConfig {
            gamma_prime: 0.01,
            sampling_rate: 0.2,
            iterations: 30,
            laplace_scale: 2.0,
            sigma: 1.5,
            alpha: 0.1,
            mode: StopMode::FixedT,
        };
        let a = dp_batch_perceptron(&data, &cfg, &mut SeededRng::new(9)).unwrap();
        let b = dp_batch_perceptron(&data, &cfg, &mut SeededRng::new(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.weights().unwrap().is_normalized());
        assert_eq!(a.mistake_counts.len(), 30);
        let _ = margin_error(a.weights().unwrap(), &data, 0.0).unwrap();
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = noiseless(StopMode::FixedT, 0);
        assert!(dp_batch_perceptron(&single(), &cfg, &mut SeededRng::new(0)).is_err());
        cfg.iterations = 3;
        cfg.sampling_rate = 0.0;
        assert!(dp_batch_perceptron(&single(), &cfg, &mut SeededRng::new(0)).is_err());
        let empty = Dataset::new(2, vec![]).unwrap();
        assert!(matches!(
            dp_batch_perceptron(&empty, &noiseless(StopMode::FixedT, 3), &mut SeededRng::new(0)),
            Err(Error::EmptyDataset)
        ));
    }
}
