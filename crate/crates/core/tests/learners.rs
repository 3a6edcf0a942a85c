mod support;

use privhalf::data::synth_margin_dataset;
use privhalf::privacy::sample_gaussian_vector;
use privhalf::trainers::perceptron::EARLY_STOP_FACTOR;
use privhalf::trainers::{
    clip_to_unit, dp_batch_perceptron, dp_sgd_hinge_with_sigma, exponential_mechanism_select, hinge_gradient,
    hinge_loss, select_exponential, DpSgdParams, PerceptronConfig, StopMode,
};
use privhalf::{margin_error, Dataset, FeatureVector, Halfspace, Label, LabeledExample, SeededRng};
use rand::Rng;

fn noiseless_early_stop(gamma_prime: f64, alpha: f64, iterations: u64) -> PerceptronConfig {
    PerceptronConfig {
        gamma_prime,
        sampling_rate: 1.0,
        iterations,
        laplace_scale: f64::INFINITY,
        sigma: 0.0,
        alpha,
        mode: StopMode::EarlyStop,
    }
}

#[test]
fn noiseless_perceptron_converges_on_margin_data() {
    let n = 1000;
    let cfg = noiseless_early_stop(0.25, 0.5, 48_000);
    for seed in 0..10 {
        let (data, _) = synth_margin_dataset(100, n, 0.5, seed).unwrap();
        let out = dp_batch_perceptron(&data, &cfg, &mut SeededRng::new(seed)).unwrap();
        assert!(out.stop_iteration.is_some(), "seed {seed} ran out of iterations");
        let w = out.weights().unwrap();
        assert!((w.norm() - 1.0).abs() <= 1e-9);
        assert!(margin_error(w, &data, 0.25).unwrap() <= 0.25);
        assert!(out.total_mistakes() as f64 <= 250.0 * n as f64 / (0.25f64 * 0.25));
        let last = *out.mistake_counts.last().unwrap() as f64;
        assert!(last < EARLY_STOP_FACTOR * 0.5 * n as f64);
    }
}

#[test]
fn fixed_mode_runs_every_iteration() {
    let (data, _) = synth_margin_dataset(10, 200, 0.3, 4).unwrap();
    let cfg = PerceptronConfig {
        sigma: 0.5,
        ..PerceptronConfig::fixed(0.1, 0.2, 37)
    };
    let out = dp_batch_perceptron(&data, &cfg, &mut SeededRng::new(1)).unwrap();
    assert_eq!(out.mistake_counts.len(), 37);
    assert_eq!(out.batch_sizes.len(), 37);
    assert!(out.stop_iteration.is_none());
    assert!((out.weights().unwrap().norm() - 1.0).abs() <= 1e-9);
}

#[test]
fn noisy_perceptron_is_deterministic() {
    let (data, _) = synth_margin_dataset(8, 300, 0.2, 6).unwrap();
    let cfg = PerceptronConfig {
        gamma_prime: 0.1,
        sampling_rate: 0.3,
        iterations: 50,
        laplace_scale: 4.0,
        sigma: 2.0,
        alpha: 0.2,
        mode: StopMode::EarlyStop,
    };
    let a = dp_batch_perceptron(&data, &cfg, &mut SeededRng::new(77)).unwrap();
    let b = dp_batch_perceptron(&data, &cfg, &mut SeededRng::new(77)).unwrap();
    assert_eq!(a, b);
}

fn frequencies(counts: &[usize]) -> Vec<f64> {
    let total: usize = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

fn chi_square(counts: &[usize], probs: &[f64]) -> f64 {
    let total: usize = counts.iter().sum();
    counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = p * total as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum()
}

#[test]
fn exponential_mechanism_matches_softmax() {
    let scores = [-3.0, -1.0, -2.0, 0.0];
    let eps = 1.0;
    let mut rng = SeededRng::new(314);
    let mut counts = [0usize; 4];
    for _ in 0..10_000 {
        counts[select_exponential(&scores, eps, &mut rng).unwrap()] += 1;
    }
    let expected = support::softmax_oracle(&scores, eps);
    for (f, p) in frequencies(&counts).iter().zip(&expected) {
        assert!((f - p).abs() <= 0.02, "{counts:?} vs {expected:?}");
    }
    assert!(chi_square(&counts, &expected) < support::CHI2_3DOF_999);
}

#[test]
fn exponential_mechanism_uniform_at_zero_epsilon() {
    let scores = [-50.0, 0.0, -3.0, -1e6];
    let mut rng = SeededRng::new(2718);
    let mut counts = [0usize; 4];
    for _ in 0..10_000 {
        counts[select_exponential(&scores, 0.0, &mut rng).unwrap()] += 1;
    }
    assert!(chi_square(&counts, &[0.25; 4]) < support::CHI2_3DOF_999, "{counts:?}");
}

#[test]
fn exponential_mechanism_over_halfspaces() {
    let mut rng = SeededRng::new(3);
    let examples = (0..20)
        .map(|i| {
            let x = vec![rng.random_range(-1.0..1.0) * 0.7, rng.random_range(-1.0..1.0) * 0.7];
            LabeledExample::new(FeatureVector::new(x).unwrap(), Label::from_bool(i % 3 != 0))
        })
        .collect();
    let data = Dataset::new(2, examples).unwrap();
    let candidates = vec![Halfspace::new(vec![1.0, 0.0]).unwrap(), Halfspace::new(vec![0.0, 1.0]).unwrap()];
    let gamma = 0.1;
    let scores: Vec<f64> = candidates
        .iter()
        .map(|w| -(margin_error(w, &data, 0.95 * gamma).unwrap() * 20.0).round())
        .collect();
    let eps = 0.8;
    let expected = support::softmax_oracle(&scores, eps);
    let mut first = 0;
    for _ in 0..10_000 {
        let w = exponential_mechanism_select(&candidates, &data, gamma, eps, &mut rng).unwrap();
        if std::ptr::eq(w, &candidates[0]) {
            first += 1;
        }
    }
    assert!((first as f64 / 1e4 - expected[0]).abs() <= 0.02, "{first} vs {expected:?}");
}

#[test]
fn hinge_gradient_matches_finite_differences() {
    let mut rng = SeededRng::new(55);
    let gamma = 0.3;
    let h = 1e-6;
    let mut checked = 0;
    while checked < 20 {
        let d = 6;
        let z = sample_gaussian_vector(d, 0.5, &mut rng);
        let x = sample_gaussian_vector(d, 0.4, &mut rng);
        let y = Label::from_bool(rng.random());
        let m = y.sign() * z.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
        if (m - gamma).abs() < 1e-3 {
            continue;
        }
        let g = hinge_gradient(&z, &x, y, gamma);
        for j in 0..d {
            let mut plus = z.clone();
            let mut minus = z.clone();
            plus[j] += h;
            minus[j] -= h;
            let fd = (hinge_loss(&plus, &x, y, gamma) - hinge_loss(&minus, &x, y, gamma)) / (2.0 * h);
            assert!((fd - g[j]).abs() <= 1e-5 * g[j].abs().max(1.0), "coordinate {j}: {fd} vs {}", g[j]);
        }
        checked += 1;
    }
}

#[test]
fn clipped_gradients_stay_in_unit_ball() {
    let mut rng = SeededRng::new(56);
    for _ in 0..10_000 {
        let scale = 10f64.powf(rng.random_range(-3.0..3.0));
        let mut g = sample_gaussian_vector(rng.random_range(1..20), scale, &mut rng);
        clip_to_unit(&mut g);
        assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1.0 + 1e-12);
    }
}

#[test]
fn noiseless_dpsgd_separates_margin_data() {
    let (data, _) = synth_margin_dataset(5, 400, 0.3, 8).unwrap();
    let params = DpSgdParams {
        gamma: 0.3,
        epsilon: None,
        delta: 0.5,
        batch_rate: 0.1,
        learning_rate: 0.5,
        lambda_reg: 0.0,
        epochs: 5,
    };
    let out = dp_sgd_hinge_with_sigma(&data, &params, 0.0, &mut SeededRng::new(2)).unwrap();
    assert_eq!(out.iterations, 50);
    let w = Halfspace::new(out.weights).unwrap();
    assert!(margin_error(&w, &data, 0.0).unwrap() <= 0.05);
}
