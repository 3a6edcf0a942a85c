use rand::Rng;
use rand_distr::StandardNormal;

use super::SeededRng;

/// `d` i.i.d. draws from `N(0, sigma^2)`.
pub fn sample_gaussian_vector(d: usize, sigma: f64, rng: &mut SeededRng) -> Vec<f64> {
    if sigma == 0.0 {
        return vec![0.0; d];
    }
    (0..d)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// One draw from `Lap(b)`, density `exp(-|x| / b) / (2b)`.
pub fn sample_laplace(b: f64, rng: &mut SeededRng) -> f64 {
    // u uniform on (-1/2, 1/2); inverse CDF.
    let u = loop {
        let r: f64 = rng.random();
        if r > 0.0 {
            break r - 0.5;
        }
    };
    -b * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// Standard normal vector scaled to unit length.
pub fn sample_unit_vector(d: usize, rng: &mut SeededRng) -> Vec<f64> {
    loop {
        let g = sample_gaussian_vector(d, 1.0, rng);
        let n = crate::linalg::norm(&g);
        if n > 0.0 {
            return g.into_iter().map(|v| v / n).collect();
        }
    }
}

/// Indices of a Poisson subsample of `0..n`: each index is kept
/// independently with probability `p`. Uses geometric gaps, so the cost is
/// proportional to the sample size rather than `n`.
pub fn poisson_subsample(n: usize, p: f64, rng: &mut SeededRng) -> Vec<usize> {
    if p >= 1.0 {
        return (0..n).collect();
    }
    if p <= 0.0 {
        return Vec::new();
    }
    let log_q = (-p).ln_1p();
    let mut out = Vec::with_capacity((n as f64 * p * 1.2) as usize + 4);
    let mut next: f64 = -1.0;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>();
        next += (u.ln() / log_q).floor() + 1.0;
        if next >= n as f64 {
            break;
        }
        out.push(next as usize);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn gaussian_degenerate_and_deterministic() {
        let mut r = SeededRng::new(1);
        assert_eq!(sample_gaussian_vector(5, 0.0, &mut r), vec![0.0; 5]);
        let a = sample_gaussian_vector(8, 1.5, &mut SeededRng::new(9));
        let b = sample_gaussian_vector(8, 1.5, &mut SeededRng::new(9));
        assert_eq!(a, b);
    }

    #[test]
    fn gaussian_moments() {
        // Standard errors: mean 2/sqrt(1e5) ~ 0.0063, variance 4*sqrt(2/1e5) ~ 0.018.
        let g = sample_gaussian_vector(100_000, 2.0, &mut SeededRng::new(2024));
        let (m, v) = mean_var(&g);
        assert!(m.abs() <= 0.05, "mean {m}");
        assert!((3.8..=4.2).contains(&v), "variance {v}");
    }

    #[test]
    fn laplace_moments_and_median() {
        let mut r = SeededRng::new(77);
        let mut xs: Vec<f64> = (0..1_000_000).map(|_| sample_laplace(1.0, &mut r)).collect();
        let (m, v) = mean_var(&xs);
        assert!(m.abs() <= 0.01, "mean {m}");
        assert!((1.95..=2.05).contains(&v), "variance {v}");
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let med = 0.5 * (xs[499_999] + xs[500_000]);
        assert!(med.abs() <= 0.005, "median {med}");
        assert_eq!(
            sample_laplace(3.0, &mut SeededRng::new(5)),
            sample_laplace(3.0, &mut SeededRng::new(5))
        );
    }

    #[test]
    fn subsample_rate() {
        let mut r = SeededRng::new(3);
        let n = 10_000;
        let mut total = 0usize;
        for _ in 0..100 {
            let s = poisson_subsample(n, 0.05, &mut r);
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            assert!(s.iter().all(|&i| i < n));
            total += s.len();
        }
        // Expected 50_000, sd ~ 218.
        assert!((total as f64 - 50_000.0).abs() < 1_500.0, "{total}");
        assert_eq!(poisson_subsample(7, 1.0, &mut r), (0..7).collect::<Vec<_>>());
        assert!(poisson_subsample(7, 0.0, &mut r).is_empty());
    }

    #[test]
    fn subsample_inclusion_uniform_over_indices() {
        let mut r = SeededRng::new(11);
        let n = 20;
        let mut counts = vec![0usize; n];
        for _ in 0..20_000 {
            for i in poisson_subsample(n, 0.3, &mut r) {
                counts[i] += 1;
            }
        }
        // Each count ~ Bin(20000, 0.3): mean 6000, sd ~ 65.
        for c in counts {
            assert!((c as f64 - 6000.0).abs() < 400.0, "{c}");
        }
    }
}
