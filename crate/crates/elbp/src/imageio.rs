//! Image files: binary PGM and 8-bit PNG, detected by content.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use elbp_core::{rgb_to_luma, GrayImage};

use crate::error::{Error, ImageError, Result};
use crate::pgm;

const PNG_SIGNATURE: &[u8; 8] = b"\x89PNG\r\n\x1a\n";

pub fn decode_image(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    if bytes.starts_with(pgm::MAGIC) {
        pgm::decode(bytes)
    } else if bytes.starts_with(PNG_SIGNATURE) {
        decode_png(bytes)
    } else {
        Err(ImageError::UnknownFormat)
    }
}

fn decode_png(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    let corrupt = |e: png::DecodingError| ImageError::Corrupt(e.to_string());
    let decoder = png::Decoder::new(Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(corrupt)?;
    let info = reader.info();
    let (width, height) = (info.width, info.height);
    if info.bit_depth != png::BitDepth::Eight {
        return Err(ImageError::UnsupportedDepth(format!("{:?}-bit PNG", info.bit_depth as u8)));
    }
    let color = info.color_type;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| ImageError::Corrupt("PNG too large".into()))?;
    let mut buf = vec![0; size];
    let frame = reader.next_frame(&mut buf).map_err(corrupt)?;
    let buf = &buf[..frame.buffer_size()];
    let line = frame.line_size;
    let data: Vec<u8> = match color {
        png::ColorType::Grayscale => buf
            .chunks_exact(line)
            .flat_map(|row| &row[..width as usize])
            .copied()
            .collect(),
        png::ColorType::Rgb => buf
            .chunks_exact(line)
            .flat_map(|row| row[..3 * width as usize].chunks_exact(3))
            .map(|px| rgb_to_luma(px[0], px[1], px[2]))
            .collect(),
        other => return Err(ImageError::UnsupportedColor(format!("{other:?}"))),
    };
    GrayImage::from_raw(width, height, data).map_err(|e| ImageError::Corrupt(e.to_string()))
}

pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

pub fn save_pgm(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, pgm::encode(img)).map_err(|e| Error::io(path, e))
}
