//! Dense loading of libsvm-format text (`<label> <index>:<value> ...`,
//! 1-based indices).

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::error::{invalid, Error, Result};
use crate::halfspace::FeatureVector;
use crate::trainers::multiclass::MulticlassDataset;

/// A dataset together with the original label of each class index.
#[derive(Debug, Clone, PartialEq)]
pub struct LibsvmData {
    pub dataset: MulticlassDataset,
    /// `class_labels[c]` is the file label mapped to class `c`.
    pub class_labels: Vec<i64>,
}

fn parse_label(token: &str) -> Option<i64> {
    if let Ok(v) = token.parse::<i64>() {
        return Some(v);
    }
    let f: f64 = token.parse().ok()?;
    (f.fract() == 0.0 && f.abs() < 9.0e15).then_some(f as i64)
}

fn parse_line(line: &str, lineno: usize, dimension: usize) -> Result<(i64, Vec<f64>)> {
    let malformed = |message: String| Error::Malformed {
        line: lineno,
        message,
    };
    let mut tokens = line.split_whitespace();
    let label_tok = tokens.next().ok_or_else(|| malformed("missing label".into()))?;
    let label = parse_label(label_tok).ok_or_else(|| malformed(format!("bad label {label_tok:?}")))?;
    let mut x = vec![0.0; dimension];
    let mut last = 0usize;
    for tok in tokens {
        let (idx, val) = tok
            .split_once(':')
            .ok_or_else(|| malformed(format!("expected index:value, got {tok:?}")))?;
        let idx: usize = idx
            .parse()
            .map_err(|_| malformed(format!("bad index {idx:?}")))?;
        if idx == 0 {
            return Err(malformed("indices are 1-based".into()));
        }
        if idx <= last {
            return Err(malformed(format!("index {idx} not strictly increasing")));
        }
        if idx > dimension {
            return Err(malformed(format!("index {idx} exceeds dimension {dimension}")));
        }
        let v: f64 = val
            .parse()
            .map_err(|_| malformed(format!("bad value {val:?}")))?;
        if !v.is_finite() {
            return Err(malformed(format!("non-finite value {val:?}")));
        }
        x[idx - 1] = v;
        last = idx;
    }
    Ok((label, x))
}

fn parse_all(text: &str, dimension: usize) -> Result<Vec<(i64, Vec<f64>)>> {
    if dimension == 0 {
        return Err(invalid("dimension must be positive"));
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line(l, i + 1, dimension))
        .collect()
}

fn assemble(rows: Vec<(i64, Vec<f64>)>, dimension: usize, class_labels: Vec<i64>) -> Result<LibsvmData> {
    let mut features = Vec::with_capacity(rows.len());
    let mut classes = Vec::with_capacity(rows.len());
    for (label, x) in rows {
        let c = class_labels
            .binary_search(&label)
            .map_err(|_| invalid(format!("label {label} not among known classes {class_labels:?}")))?;
        features.push(FeatureVector::new(x)?);
        classes.push(c);
    }
    let dataset = MulticlassDataset::new(dimension, features, classes, class_labels.len())?;
    Ok(LibsvmData {
        dataset,
        class_labels,
    })
}

/// Parses `text`; classes are the observed labels in sorted order.
pub fn load_libsvm(text: &str, dimension: usize) -> Result<LibsvmData> {
    let rows = parse_all(text, dimension)?;
    let labels: BTreeSet<i64> = rows.iter().map(|(l, _)| *l).collect();
    assemble(rows, dimension, labels.into_iter().collect())
}

/// Parses `text` using a fixed label-to-class mapping (for test splits).
/// `class_labels` must be sorted and distinct.
pub fn load_libsvm_with_labels(text: &str, dimension: usize, class_labels: &[i64]) -> Result<LibsvmData> {
    if class_labels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("class labels must be sorted and distinct"));
    }
    assemble(parse_all(text, dimension)?, dimension, class_labels.to_vec())
}

/// One line per example; zero coordinates are omitted.
pub fn write_libsvm(data: &MulticlassDataset, class_labels: &[i64]) -> Result<String> {
    if class_labels.len() != data.num_classes() {
        return Err(invalid("one label per class required"));
    }
    let mut out = String::new();
    for (x, &c) in data.features().iter().zip(data.classes()) {
        write!(out, "{}", class_labels[c]).expect("write to String");
        for (i, v) in x.as_slice().iter().enumerate() {
            if *v != 0.0 {
                write!(out, " {}:{}", i + 1, v).expect("write to String");
            }
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_line() {
        let d = load_libsvm("3 1:0.5 4:-1.0\n", 4).unwrap();
        assert_eq!(d.dataset.features()[0].as_slice(), &[0.5, 0.0, 0.0, -1.0]);
        assert_eq!(d.class_labels, vec![3]);
        assert_eq!(d.dataset.classes(), &[0]);
    }

    #[test]
    fn label_mapping() {
        let d = load_libsvm("10 1:1\n1 2:1\n\n7 1:2\n1\n", 2).unwrap();
        assert_eq!(d.class_labels, vec![1, 7, 10]);
        assert_eq!(d.dataset.classes(), &[2, 0, 1, 0]);
        let t = load_libsvm_with_labels("7 1:1\n", 2, &d.class_labels).unwrap();
        assert_eq!(t.dataset.classes(), &[1]);
        assert_eq!(t.dataset.num_classes(), 3);
        assert!(load_libsvm_with_labels("8 1:1\n", 2, &d.class_labels).is_err());
    }

    #[test]
    fn malformed_lines() {
        for (text, line) in [
            ("1 1:0.5\n1 2:1 2:3\n", 2),
            ("1 3:1\n", 1),
            ("1 0:1\n", 1),
            ("1 2:1 1:1\n", 1),
            ("1 1:x\n", 1),
            ("x 1:1\n", 1),
            ("1\n\n1 1\n", 3),
        ] {
            match load_libsvm(text, 2) {
                Err(Error::Malformed { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn round_trip() {
        let text = "-1 1:0.25 3:-0.125\n1 2:1e-7\n";
        let d = load_libsvm(text, 3).unwrap();
        let back = write_libsvm(&d.dataset, &d.class_labels).unwrap();
        assert_eq!(load_libsvm(&back, 3).unwrap(), d);
    }
}
