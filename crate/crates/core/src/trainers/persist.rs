//! Versioned JSON model files with bit-exact hex-float weights.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfspace::Halfspace;
use crate::kernel::KernelSpec;

use super::multiclass::MulticlassModel;

pub const FORMAT_VERSION: u32 = 1;

const MANTISSA_BITS: u32 = 52;
const MANTISSA_MASK: u64 = (1 << MANTISSA_BITS) - 1;
const EXP_BIAS: i64 = 1023;

/// Hexadecimal floating-point text (`0x1.8p+1`, `-0x0.0000000000001p-1022`)
/// that round-trips every finite `f64` exactly.
pub fn to_hex_float(v: f64) -> Result<String> {
    if !v.is_finite() {
        return Err(Error::Format(format!("cannot encode non-finite value {v}")));
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_bits = ((bits >> MANTISSA_BITS) & 0x7ff) as i64;
    let frac = bits & MANTISSA_MASK;
    let (lead, exp) = match (exp_bits, frac) {
        (0, 0) => return Ok(format!("{sign}0x0p+0")),
        (0, _) => (0, 1 - EXP_BIAS),
        _ => (1, exp_bits - EXP_BIAS),
    };
    let digits = format!("{frac:013x}");
    let digits = digits.trim_end_matches('0');
    let exp_sign = if exp < 0 { '-' } else { '+' };
    if digits.is_empty() {
        Ok(format!("{sign}0x{lead}p{exp_sign}{}", exp.abs()))
    } else {
        Ok(format!("{sign}0x{lead}.{digits}p{exp_sign}{}", exp.abs()))
    }
}

/// Inverse of [`to_hex_float`]. Only canonical encodings are accepted.
pub fn from_hex_float(s: &str) -> Result<f64> {
    let bad = || Error::Format(format!("malformed hex float {s:?}"));
    let (negative, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let rest = rest.strip_prefix("0x").ok_or_else(bad)?;
    let (mantissa, exponent) = rest.split_once('p').ok_or_else(bad)?;
    let exp: i64 = exponent.parse().map_err(|_| bad())?;
    if !(exponent.starts_with('+') || exponent.starts_with('-')) {
        return Err(bad());
    }
    let (lead, digits) = match mantissa.split_once('.') {
        Some((l, d)) if !d.is_empty() => (l, d),
        Some(_) => return Err(bad()),
        None => (mantissa, ""),
    };
    if digits.len() > 13 || !digits.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase()) {
        return Err(bad());
    }
    let frac = if digits.is_empty() {
        0
    } else {
        u64::from_str_radix(digits, 16).map_err(|_| bad())? << (4 * (13 - digits.len()))
    };
    let magnitude = match lead {
        "1" if (1 - EXP_BIAS..=EXP_BIAS).contains(&exp) => (((exp + EXP_BIAS) as u64) << MANTISSA_BITS) | frac,
        "0" if frac == 0 && exp == 0 => 0,
        "0" if frac != 0 && exp == 1 - EXP_BIAS => frac,
        _ => return Err(bad()),
    };
    let sign = if negative { 1u64 << 63 } else { 0 };
    Ok(f64::from_bits(sign | magnitude))
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    dimension: usize,
    input_dimension: usize,
    num_classes: usize,
    weights: Vec<Vec<String>>,
    kernel: Option<KernelSpec>,
    training: serde_json::Value,
}

/// Pretty-printed JSON document for `model`.
pub fn model_to_json(model: &MulticlassModel) -> Result<String> {
    let weights = model
        .weights
        .iter()
        .map(|w| w.weights().iter().map(|&v| to_hex_float(v)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        dimension: model.dimension(),
        input_dimension: model.input_dimension,
        num_classes: model.num_classes(),
        weights,
        kernel: model.kernel,
        training: model.training.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file)?;
    s.push('\n');
    Ok(s)
}

pub fn model_from_json(text: &str) -> Result<MulticlassModel> {
    let file: ModelFile = serde_json::from_str(text)?;
    if file.format_version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported format version {}",
            file.format_version
        )));
    }
    if file.weights.len() != file.num_classes {
        return Err(Error::Format(format!(
            "num_classes is {} but {} weight rows present",
            file.num_classes,
            file.weights.len()
        )));
    }
    let weights = file
        .weights
        .iter()
        .map(|row| {
            if row.len() != file.dimension {
                return Err(Error::Format(format!(
                    "weight row has {} entries, expected {}",
                    row.len(),
                    file.dimension
                )));
            }
            Halfspace::new(row.iter().map(|s| from_hex_float(s)).collect::<Result<Vec<_>>>()?)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut model = MulticlassModel::new(weights)?;
    match file.kernel {
        Some(spec) => {
            if 2 * spec.d_hat != file.dimension {
                return Err(Error::Format(format!(
                    "kernel with d_hat {} needs weight dimension {}, found {}",
                    spec.d_hat,
                    2 * spec.d_hat,
                    file.dimension
                )));
            }
            model.kernel = Some(spec);
            model.input_dimension = file.input_dimension;
        }
        None if file.input_dimension != file.dimension => {
            return Err(Error::Format("input_dimension differs from dimension without a kernel".into()));
        }
        None => {}
    }
    model.training = file.training;
    Ok(model)
}

fn io_error(path: &std::path::Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn save_model(model: &MulticlassModel, path: &std::path::Path) -> Result<()> {
    std::fs::write(path, model_to_json(model)?).map_err(|e| io_error(path, e))
}

pub fn load_model(path: &std::path::Path) -> Result<MulticlassModel> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    model_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_examples() {
        assert_eq!(to_hex_float(1.0).unwrap(), "0x1p+0");
        assert_eq!(to_hex_float(3.0).unwrap(), "0x1.8p+1");
        assert_eq!(to_hex_float(-0.5).unwrap(), "-0x1p-1");
        assert_eq!(to_hex_float(0.0).unwrap(), "0x0p+0");
        assert_eq!(to_hex_float(-0.0).unwrap(), "-0x0p+0");
        assert_eq!(to_hex_float(f64::from_bits(1)).unwrap(), "0x0.0000000000001p-1022");
        assert_eq!(to_hex_float(0.1).unwrap(), "0x1.999999999999ap-4");
        assert!(to_hex_float(f64::NAN).is_err());
    }

    #[test]
    fn hex_round_trip_edges() {
        for v in [
            0.0,
            -0.0,
            1.0,
            0.1,
            -1e-300,
            f64::MAX,
            f64::MIN_POSITIVE,
            f64::from_bits(1),
            f64::from_bits(0x000f_ffff_ffff_ffff),
            std::f64::consts::PI,
        ] {
            let back = from_hex_float(&to_hex_float(v).unwrap()).unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v}");
        }
    }

    #[test]
    fn hex_rejects_garbage() {
        for s in ["", "1.0", "0x1.p+0", "0x2p+0", "0x1p0", "0x1.ABp+0", "0x1p+1024", "0x0.1p+0", "0x1.00000000000001p+0"] {
            assert!(from_hex_float(s).is_err(), "{s}");
        }
    }

    #[test]
    fn model_round_trip() {
        let m = MulticlassModel::new(vec![
            Halfspace::new(vec![0.1, -2.5e-310]).unwrap(),
            Halfspace::new(vec![1.0 / 3.0, 7.0]).unwrap(),
        ])
        .unwrap()
        .with_training(serde_json::json!({"algo": "test"}));
        let text = model_to_json(&m).unwrap();
        assert_eq!(model_from_json(&text).unwrap(), m);
        assert!(model_from_json(&text.replace("\"format_version\": 1", "\"format_version\": 9")).is_err());
    }
}
