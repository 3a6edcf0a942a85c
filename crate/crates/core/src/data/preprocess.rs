//! Scaling raw inputs to pixel space (`[0, 1]` per coordinate) or into the
//! unit ball.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::halfspace::FeatureVector;
use crate::linalg::norm;
use crate::trainers::multiclass::MulticlassDataset;

use super::idx::{IdxImages, MAX_LABEL};

pub const PIXEL_MAX: f64 = 255.0;
pub const DIGIT_CLASSES: usize = MAX_LABEL as usize + 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawImageSet {
    pub images: IdxImages,
    pub labels: Vec<u8>,
}

impl RawImageSet {
    pub fn new(images: IdxImages, labels: Vec<u8>) -> Result<Self> {
        if images.count != labels.len() {
            return Err(invalid(format!(
                "{} images but {} labels",
                images.count,
                labels.len()
            )));
        }
        if let Some(&l) = labels.iter().find(|&&l| l > MAX_LABEL) {
            return Err(Error::LabelOutOfRange(l));
        }
        Ok(Self { images, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.images.rows * self.images.cols
    }

    fn pixels_f64(&self, i: usize) -> Vec<f64> {
        self.images.image(i).iter().map(|&p| p as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreprocessMode {
    Pixel,
    UnitBall,
}

impl fmt::Display for PreprocessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PreprocessMode::Pixel => "pixel",
            PreprocessMode::UnitBall => "unit_ball",
        })
    }
}

impl FromStr for PreprocessMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pixel" => Ok(PreprocessMode::Pixel),
            "unit_ball" => Ok(PreprocessMode::UnitBall),
            other => Err(invalid(format!("unknown preprocessing mode {other:?}"))),
        }
    }
}

/// Output is `raw / divisor`, with unit-ball outputs clamped to norm 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mode: PreprocessMode,
    pub divisor: f64,
}

impl Scaler {
    /// `base` is the pixel-mode divisor (255 for images, 1 for real-valued
    /// inputs); unit-ball mode multiplies it by the largest pixel-mode norm
    /// in `training`.
    pub fn fit<X: AsRef<[f64]>>(mode: PreprocessMode, base: f64, training: &[X]) -> Result<Self> {
        if training.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let divisor = match mode {
            PreprocessMode::Pixel => base,
            PreprocessMode::UnitBall => {
                let max = training.iter().map(|x| norm(x.as_ref())).fold(0.0, f64::max);
                if max == 0.0 {
                    return Err(invalid("all training inputs are zero; cannot scale to the unit ball"));
                }
                max
            }
        };
        Ok(Self { mode, divisor })
    }

    /// Scaled copy of `raw` and whether it had to be clamped into the ball.
    pub fn apply(&self, raw: &[f64]) -> (Vec<f64>, bool) {
        let mut x: Vec<f64> = raw.iter().map(|v| v / self.divisor).collect();
        if self.mode == PreprocessMode::UnitBall {
            let n = norm(&x);
            if n > 1.0 {
                x.iter_mut().for_each(|v| *v /= n);
                return (x, true);
            }
        }
        (x, false)
    }

    /// Scales every point; returns the dataset and the number clamped.
    pub fn apply_dataset(&self, data: &MulticlassDataset) -> Result<(MulticlassDataset, usize)> {
        let mut clamped = 0;
        let features = data
            .features()
            .iter()
            .map(|x| {
                let (v, c) = self.apply(x.as_slice());
                clamped += c as usize;
                FeatureVector::new(v)
            })
            .collect::<Result<Vec<_>>>()?;
        let out = MulticlassDataset::new(data.dimension(), features, data.classes().to_vec(), data.num_classes())?;
        Ok((out, clamped))
    }
}

/// Raw pixel values (0..255) as a ten-class dataset.
pub fn raw_dataset(raw: &RawImageSet) -> Result<MulticlassDataset> {
    if raw.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let features = (0..raw.len())
        .map(|i| FeatureVector::new(raw.pixels_f64(i)))
        .collect::<Result<Vec<_>>>()?;
    let classes = raw.labels.iter().map(|&l| l as usize).collect();
    MulticlassDataset::new(raw.dimension(), features, classes, DIGIT_CLASSES)
}

/// Fits a scaler on `raw` (a training split) and applies it.
pub fn preprocess(raw: &RawImageSet, mode: PreprocessMode) -> Result<(MulticlassDataset, Scaler)> {
    let data = raw_dataset(raw)?;
    let scaler = Scaler::fit(mode, PIXEL_MAX, data.features())?;
    let (out, _) = scaler.apply_dataset(&data)?;
    Ok((out, scaler))
}

/// Applies a scaler fitted elsewhere; returns the number of clamped points.
pub fn preprocess_with(raw: &RawImageSet, scaler: &Scaler) -> Result<(MulticlassDataset, usize)> {
    scaler.apply_dataset(&raw_dataset(raw)?)
}
