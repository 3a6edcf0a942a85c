use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;
use privhalf::data::{
    load_idx_images, load_idx_labels, load_libsvm, load_libsvm_with_labels, preprocess::PIXEL_MAX, raw_dataset,
    PreprocessMode, RawImageSet, Scaler,
};
use privhalf::MulticlassDataset;

use crate::error::CliError;

/// File contents, gunzipped when the name ends in `.gz`.
pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    let raw = std::fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "gz") {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice())
            .read_to_end(&mut out)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    String::from_utf8(read_bytes(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// A dataset in raw units plus what is needed to scale it.
pub struct Loaded {
    pub raw: MulticlassDataset,
    /// Divisor taking raw values to pixel mode.
    pub base: f64,
    pub class_labels: Vec<i64>,
}

pub fn load_idx_pair(images: &Path, labels: &Path) -> Result<Loaded, CliError> {
    let set = RawImageSet::new(load_idx_images(&read_bytes(images)?)?, load_idx_labels(&read_bytes(labels)?)?)?;
    Ok(Loaded {
        raw: raw_dataset(&set)?,
        base: PIXEL_MAX,
        class_labels: (0..10).collect(),
    })
}

pub fn load_libsvm_file(path: &Path, dim: usize, class_labels: Option<&[i64]>) -> Result<Loaded, CliError> {
    let text = read_text(path)?;
    let data = match class_labels {
        Some(labels) => load_libsvm_with_labels(&text, dim, labels)?,
        None => load_libsvm(&text, dim)?,
    };
    Ok(Loaded {
        raw: data.dataset,
        base: 1.0,
        class_labels: data.class_labels,
    })
}

pub fn fit_scaler(loaded: &Loaded, mode: PreprocessMode) -> Result<Scaler, CliError> {
    let scaler = Scaler::fit(mode, loaded.base, loaded.raw.features())?;
    Ok(scaler)
}

/// Scales `loaded`, warning on stderr about points clamped into the ball.
pub fn scale(loaded: &Loaded, scaler: &Scaler) -> Result<MulticlassDataset, CliError> {
    let (data, clamped) = scaler.apply_dataset(&loaded.raw)?;
    if clamped > 0 {
        eprintln!("warning: {clamped} points exceeded the unit ball after scaling and were clamped");
    }
    Ok(data)
}
