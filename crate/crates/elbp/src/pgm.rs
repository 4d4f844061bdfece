//! Binary PGM (`P5`) with 8-bit samples.
//!
//! The header is four whitespace-separated ASCII tokens (magic, width,
//! height, maxval); `#` starts a comment that runs to the end of the line.
//! A single whitespace byte separates the header from `width · height`
//! sample bytes. Bytes after the raster are ignored.

use elbp_core::GrayImage;

use crate::error::ImageError;

pub const MAGIC: &[u8; 2] = b"P5";

struct Header<'a> {
    rest: &'a [u8],
}

impl<'a> Header<'a> {
    fn skip_space_and_comments(&mut self) {
        loop {
            match self.rest.first() {
                Some(b) if b.is_ascii_whitespace() => self.rest = &self.rest[1..],
                Some(b'#') => {
                    let end = self
                        .rest
                        .iter()
                        .position(|&b| b == b'\n' || b == b'\r')
                        .unwrap_or(self.rest.len());
                    self.rest = &self.rest[end..];
                }
                _ => return,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, ImageError> {
        self.skip_space_and_comments();
        let digits = self.rest.iter().take_while(|b| b.is_ascii_digit()).count();
        if digits == 0 {
            return Err(ImageError::Corrupt(format!("missing or malformed PGM {what}")));
        }
        let text = std::str::from_utf8(&self.rest[..digits]).expect("ascii digits");
        self.rest = &self.rest[digits..];
        text.parse()
            .map_err(|_| ImageError::Corrupt(format!("PGM {what} out of range")))
    }
}

pub fn decode(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    if !bytes.starts_with(MAGIC) {
        return Err(ImageError::UnknownFormat);
    }
    let mut header = Header { rest: &bytes[2..] };
    if !header.rest.first().is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(ImageError::UnknownFormat);
    }
    let width = header.number("width")?;
    let height = header.number("height")?;
    let maxval = header.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(ImageError::Corrupt(format!("invalid dimensions {width}x{height}")));
    }
    match maxval {
        0 => return Err(ImageError::Corrupt("maxval must be positive".into())),
        1..=255 => {}
        256..=65535 => return Err(ImageError::UnsupportedDepth(format!("maxval {maxval}"))),
        _ => return Err(ImageError::Corrupt(format!("maxval {maxval} out of range"))),
    }
    match header.rest.first() {
        Some(b) if b.is_ascii_whitespace() => {}
        _ => return Err(ImageError::Corrupt("missing whitespace after PGM header".into())),
    }
    let raster = &header.rest[1..];
    let len = width as usize * height as usize;
    if raster.len() < len {
        return Err(ImageError::Corrupt(format!(
            "truncated raster: {} of {len} bytes",
            raster.len()
        )));
    }
    let data = raster[..len].to_vec();
    if let Some(&v) = data.iter().find(|&&v| u32::from(v) > maxval) {
        return Err(ImageError::Corrupt(format!("sample {v} exceeds maxval {maxval}")));
    }
    GrayImage::from_raw(width, height, data).map_err(|e| ImageError::Corrupt(e.to_string()))
}

/// Encodes with maxval 255 and a minimal `P5\n<w> <h>\n255\n` header.
pub fn encode(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.as_raw());
    out
}
