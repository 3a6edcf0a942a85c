//! Finite-candidate exponential mechanism over unit halfspaces.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::halfspace::{margin_mistakes, Dataset, Halfspace};
use crate::privacy::{sample_unit_vector, SeededRng};

/// Margin used for scoring, as a fraction of the target margin.
pub const SCORE_MARGIN_FACTOR: f64 = 0.95;

fn gumbel(rng: &mut SeededRng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return -(-u.ln()).ln();
        }
    }
}

/// Samples index `j` with probability proportional to
/// `exp(epsilon / 2 * scores[j])` using the Gumbel-max trick. `epsilon =
/// +inf` returns the first maximizer and consumes no randomness.
pub fn select_exponential(scores: &[f64], epsilon: f64, rng: &mut SeededRng) -> Result<usize> {
    if scores.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if !(epsilon >= 0.0) {
        return Err(invalid(format!("epsilon must be >= 0, got {epsilon}")));
    }
    if let Some(s) = scores.iter().find(|s| s.is_nan()) {
        return Err(invalid(format!("score {s} is not a number")));
    }
    let mut best = 0;
    let mut best_key = f64::NEG_INFINITY;
    if epsilon.is_infinite() {
        for (j, &s) in scores.iter().enumerate() {
            if s > best_key {
                best_key = s;
                best = j;
            }
        }
        return Ok(best);
    }
    for (j, &s) in scores.iter().enumerate() {
        // 0 * -inf would be NaN; an unreachable candidate just never wins.
        let logit = if epsilon == 0.0 { 0.0 } else { 0.5 * epsilon * s };
        let key = logit + gumbel(rng);
        if key > best_key {
            best_key = key;
            best = j;
        }
    }
    Ok(best)
}

/// Scores `-n * err_{0.95 gamma}(w)` for each candidate, in candidate order.
pub fn candidate_scores(candidates: &[Halfspace], data: &Dataset, gamma: f64) -> Result<Vec<f64>> {
    let margin = SCORE_MARGIN_FACTOR * gamma;
    candidates
        .par_iter()
        .map(|w| margin_mistakes(w, data, margin).map(|m| -(m as f64)))
        .collect()
}

/// Exponential mechanism over a fixed, data-independent candidate list.
pub fn exponential_mechanism_select<'a>(
    candidates: &'a [Halfspace],
    data: &Dataset,
    gamma: f64,
    epsilon: f64,
    rng: &mut SeededRng,
) -> Result<&'a Halfspace> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let scores = candidate_scores(candidates, data, gamma)?;
    Ok(&candidates[select_exponential(&scores, epsilon, rng)?])
}

/// Draws `num_candidates` uniform unit vectors, then selects one with the
/// exponential mechanism. Candidates come first from `rng`, then the
/// selection noise.
pub fn exponential_mechanism_learner(
    data: &Dataset,
    gamma: f64,
    epsilon: f64,
    num_candidates: usize,
    rng: &mut SeededRng,
) -> Result<Halfspace> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if num_candidates == 0 {
        return Err(Error::EmptyCandidates);
    }
    if !(gamma >= 0.0) {
        return Err(invalid(format!("gamma must be >= 0, got {gamma}")));
    }
    let d = data.dimension();
    let candidates: Vec<Halfspace> = (0..num_candidates)
        .map(|_| Halfspace::new(sample_unit_vector(d, rng)))
        .collect::<Result<_>>()?;
    let chosen = exponential_mechanism_select(&candidates, data, gamma, epsilon, rng)?;
    Ok(chosen.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halfspace::{FeatureVector, Label, LabeledExample};

    fn line(n: usize) -> Dataset {
        Dataset::new(
            2,
            (0..n)
                .map(|i| {
                    let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                    LabeledExample::new(
                        FeatureVector::new(vec![0.9 * s, 0.1]).unwrap(),
                        Label::from_bool(s > 0.0),
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_candidate() {
        let mut rng = SeededRng::new(3);
        for eps in [0.0, 1.0, 1e6, f64::INFINITY] {
            assert_eq!(select_exponential(&[-5.0], eps, &mut rng).unwrap(), 0);
        }
        let w = exponential_mechanism_learner(&line(6), 0.5, 1.0, 1, &mut SeededRng::new(1)).unwrap();
        assert!(w.is_normalized());
    }

    #[test]
    fn infinite_epsilon_is_argmax_with_first_tie() {
        let mut rng = SeededRng::new(0);
        assert_eq!(select_exponential(&[-3.0, -1.0, -1.0, -2.0], f64::INFINITY, &mut rng).unwrap(), 1);
    }

    #[test]
    fn scores_count_mistakes() {
        let data = line(10);
        let cands = vec![Halfspace::basis(2, 0), Halfspace::new(vec![-1.0, 0.0]).unwrap()];
        assert_eq!(candidate_scores(&cands, &data, 0.5).unwrap(), vec![0.0, -10.0]);
        let mut rng = SeededRng::new(5);
        let w = exponential_mechanism_select(&cands, &data, 0.5, f64::INFINITY, &mut rng).unwrap();
        assert_eq!(w, &cands[0]);
    }

    #[test]
    fn errors() {
        let mut rng = SeededRng::new(0);
        assert!(matches!(select_exponential(&[], 1.0, &mut rng), Err(Error::EmptyCandidates)));
        assert!(select_exponential(&[0.0], -1.0, &mut rng).is_err());
        let empty = Dataset::new(2, vec![]).unwrap();
        assert!(matches!(
            exponential_mechanism_learner(&empty, 0.5, 1.0, 4, &mut rng),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn deterministic() {
        let a = exponential_mechanism_learner(&line(20), 0.5, 2.0, 64, &mut SeededRng::new(8)).unwrap();
        let b = exponential_mechanism_learner(&line(20), 0.5, 2.0, 64, &mut SeededRng::new(8)).unwrap();
        assert_eq!(a, b);
    }
}
