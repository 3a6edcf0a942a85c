//! IDX containers (big-endian headers) for images and labels.

use crate::error::{Error, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;
pub const MAX_LABEL: u8 = 9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    /// `count * rows * cols` bytes, image-major then row-major.
    pub pixels: Vec<u8>,
}

impl IdxImages {
    pub fn image(&self, i: usize) -> &[u8] {
        let size = self.rows * self.cols;
        &self.pixels[i * size..(i + 1) * size]
    }
}

fn read_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    let chunk = bytes.get(offset..offset + 4).ok_or(Error::Truncated {
        needed: offset + 4,
        available: bytes.len(),
    })?;
    Ok(u32::from_be_bytes(chunk.try_into().expect("4-byte slice")))
}

fn check_magic(bytes: &[u8], expected: u32) -> Result<()> {
    let found = read_u32(bytes, 0)?;
    if found != expected {
        return Err(Error::WrongMagic { expected, found });
    }
    Ok(())
}

fn payload(bytes: &[u8], header: usize, len: usize) -> Result<&[u8]> {
    let needed = header.checked_add(len).ok_or(Error::Truncated {
        needed: usize::MAX,
        available: bytes.len(),
    })?;
    if bytes.len() < needed {
        return Err(Error::Truncated {
            needed,
            available: bytes.len(),
        });
    }
    if bytes.len() > needed {
        return Err(Error::TrailingData(bytes.len() - needed));
    }
    Ok(&bytes[header..])
}

pub fn load_idx_images(bytes: &[u8]) -> Result<IdxImages> {
    check_magic(bytes, IMAGE_MAGIC)?;
    let count = read_u32(bytes, 4)? as usize;
    let rows = read_u32(bytes, 8)? as usize;
    let cols = read_u32(bytes, 12)? as usize;
    let len = count
        .checked_mul(rows)
        .and_then(|v| v.checked_mul(cols))
        .ok_or(Error::Truncated {
            needed: usize::MAX,
            available: bytes.len(),
        })?;
    let pixels = payload(bytes, 16, len)?.to_vec();
    Ok(IdxImages {
        count,
        rows,
        cols,
        pixels,
    })
}

pub fn load_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    check_magic(bytes, LABEL_MAGIC)?;
    let count = read_u32(bytes, 4)? as usize;
    let labels = payload(bytes, 8, count)?;
    if let Some(&bad) = labels.iter().find(|&&l| l > MAX_LABEL) {
        return Err(Error::LabelOutOfRange(bad));
    }
    Ok(labels.to_vec())
}

pub fn write_idx_images(images: &IdxImages) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.pixels.len());
    for v in [IMAGE_MAGIC, images.count as u32, images.rows as u32, images.cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend_from_slice(&images.pixels);
    out
}

pub fn write_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image_bytes() -> Vec<u8> {
        vec![0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2, 0, 255, 128, 7]
    }

    #[test]
    fn parses_crafted_image() {
        let im = load_idx_images(&image_bytes()).unwrap();
        assert_eq!((im.count, im.rows, im.cols), (1, 2, 2));
        assert_eq!(im.image(0), &[0, 255, 128, 7]);
        assert_eq!(write_idx_images(&im), image_bytes());
    }

    #[test]
    fn image_errors() {
        let mut wrong = image_bytes();
        wrong[3] = 1;
        assert!(matches!(
            load_idx_images(&wrong),
            Err(Error::WrongMagic { expected: IMAGE_MAGIC, found: LABEL_MAGIC })
        ));
        let short = &image_bytes()[..19];
        assert!(matches!(load_idx_images(short), Err(Error::Truncated { .. })));
        let mut long = image_bytes();
        long.push(0);
        assert!(matches!(load_idx_images(&long), Err(Error::TrailingData(1))));
        assert!(matches!(load_idx_images(&[0, 0, 8]), Err(Error::Truncated { .. })));
    }

    #[test]
    fn labels() {
        let bytes = [0, 0, 8, 1, 0, 0, 0, 3, 0, 9, 5];
        assert_eq!(load_idx_labels(&bytes).unwrap(), vec![0, 9, 5]);
        assert_eq!(write_idx_labels(&[0, 9, 5]), bytes.to_vec());
        assert!(matches!(
            load_idx_labels(&[0, 0, 8, 1, 0, 0, 0, 1, 10]),
            Err(Error::LabelOutOfRange(10))
        ));
        assert_eq!(load_idx_labels(&[0, 0, 8, 1, 0, 0, 0, 0]).unwrap(), Vec::<u8>::new());
        assert!(matches!(load_idx_labels(&[0, 0, 8, 1, 0, 0, 0, 2, 1]), Err(Error::Truncated { .. })));
    }
}
