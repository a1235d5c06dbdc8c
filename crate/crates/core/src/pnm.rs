//! Binary PPM (P6) and PGM (P5) readers and writers, 8-bit maxval 255.

use thiserror::Error;

use crate::jpeg::PixelImage;

#[derive(Debug, Error)]
pub enum PnmError {
    #[error("byte {offset}: {reason}")]
    Malformed { offset: usize, reason: String },
    #[error("unsupported PNM: {0}")]
    Unsupported(String),
}

fn malformed(offset: usize, reason: impl Into<String>) -> PnmError {
    PnmError::Malformed { offset, reason: reason.into() }
}

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    /// Skips whitespace and `#` comments (which run to end of line).
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                _ => return,
            }
        }
    }

    fn read_number(&mut self) -> Result<usize, PnmError> {
        self.skip_separators();
        let start = self.pos;
        let mut value = 0usize;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(usize::from(self.bytes[self.pos] - b'0')))
                .ok_or_else(|| malformed(start, "numeric overflow in header"))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(malformed(self.pos, "expected a decimal number"));
        }
        Ok(value)
    }
}

/// Parses a binary PGM (P5) or PPM (P6) image.
pub fn read_pnm(bytes: &[u8]) -> Result<PixelImage, PnmError> {
    if bytes.len() < 2 {
        return Err(malformed(0, "truncated magic"));
    }
    let channels = match &bytes[..2] {
        b"P5" => 1,
        b"P6" => 3,
        other => {
            return Err(PnmError::Unsupported(format!(
                "magic {:?}; only binary P5/P6 are handled",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let mut scanner = Scanner { bytes, pos: 2 };
    let width = scanner.read_number()?;
    let height = scanner.read_number()?;
    let maxval = scanner.read_number()?;
    if maxval != 255 {
        return Err(PnmError::Unsupported(format!("maxval {maxval}; only 255 is handled")));
    }
    if width == 0 || height == 0 {
        return Err(malformed(2, "zero dimension"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if scanner.pos >= bytes.len() || !bytes[scanner.pos].is_ascii_whitespace() {
        return Err(malformed(scanner.pos, "missing raster separator"));
    }
    let start = scanner.pos + 1;
    let need = width * height * channels;
    let raster = bytes
        .get(start..start + need)
        .ok_or_else(|| malformed(bytes.len(), format!("raster truncated: need {need} bytes")))?;
    Ok(PixelImage::new(width, height, channels, raster.to_vec()))
}

/// Serializes an image as P6 (3 channels) or P5 (1 channel).
pub fn write_pnm(img: &PixelImage) -> Vec<u8> {
    let magic = if img.channels == 3 { "P6" } else { "P5" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.samples);
    out
}
