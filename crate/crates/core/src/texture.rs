//! Deterministic synthetic images for tests, fixtures and demos.
//!
//! Every generator is a pure function of its arguments. Randomness comes
//! from a ChaCha8 stream seeded with the caller's seed.

use core::fmt;
use core::str::FromStr;

use alloc::vec::Vec;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Side length of a checkerboard square.
pub const CHECKER_SQUARE: u32 = 8;

/// Number of Gaussians summed by [`TextureKind::Blobs`].
pub const BLOB_COUNT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TextureKind {
    /// `I(x, y) = floor(255 · x / (w − 1))`, or 0 for a single column.
    Ramp,
    /// Alternating 0/255 squares of [`CHECKER_SQUARE`] pixels, black at the origin.
    Checker,
    /// Independent uniform bytes.
    Noise,
    /// Sum of seeded isotropic Gaussians with signed amplitudes, min-max
    /// stretched to [0, 255] and rounded half up.
    Blobs,
}

impl TextureKind {
    pub const ALL: [TextureKind; 4] = [Self::Ramp, Self::Checker, Self::Noise, Self::Blobs];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ramp => "ramp",
            Self::Checker => "checker",
            Self::Noise => "noise",
            Self::Blobs => "blobs",
        }
    }
}

impl fmt::Display for TextureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TextureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or(Error::InvalidArgument("texture kind must be ramp, checker, noise or blobs"))
    }
}

pub fn gen_texture(seed: u64, kind: TextureKind, width: u32, height: u32) -> Result<GrayImage> {
    match kind {
        TextureKind::Ramp => GrayImage::from_fn(width, height, |x, _| {
            if width == 1 {
                0
            } else {
                (255 * u64::from(x) / u64::from(width - 1)) as u8
            }
        }),
        TextureKind::Checker => GrayImage::from_fn(width, height, |x, y| {
            if (x / CHECKER_SQUARE + y / CHECKER_SQUARE).is_multiple_of(2) {
                0
            } else {
                255
            }
        }),
        TextureKind::Noise => {
            let mut data = GrayImage::filled(width, height, 0)?.into_raw();
            ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut data);
            GrayImage::from_raw(width, height, data)
        }
        TextureKind::Blobs => blobs(seed, width, height),
    }
}

struct Blob {
    cx: f64,
    cy: f64,
    inv_two_sigma_sq: f64,
    amplitude: f64,
}

fn blobs(seed: u64, width: u32, height: u32) -> Result<GrayImage> {
    // validates dimensions before any work
    GrayImage::filled(width, height, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (f64::from(width), f64::from(height));
    let scale = w.min(h);
    let blobs: Vec<Blob> = (0..BLOB_COUNT)
        .map(|_| {
            let sigma = scale * rng.gen_range(0.05..0.25) + 1.0;
            Blob {
                cx: rng.gen_range(0.0..w),
                cy: rng.gen_range(0.0..h),
                inv_two_sigma_sq: 1.0 / (2.0 * sigma * sigma),
                amplitude: rng.gen_range(-1.0..1.0),
            }
        })
        .collect();

    let mut field = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height {
        for x in 0..width {
            let (px, py) = (f64::from(x), f64::from(y));
            let v: f64 = blobs
                .iter()
                .map(|b| {
                    let d2 = (px - b.cx) * (px - b.cx) + (py - b.cy) * (py - b.cy);
                    b.amplitude * libm::exp(-d2 * b.inv_two_sigma_sq)
                })
                .sum();
            field.push(v);
        }
    }
    let lo = field.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = field.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let data = field
        .into_iter()
        .map(|v| {
            if span > 0.0 {
                libm::floor(255.0 * (v - lo) / span + 0.5) as u8
            } else {
                128
            }
        })
        .collect();
    GrayImage::from_raw(width, height, data)
}

/// Adds independent integer noise drawn uniformly from `[−amplitude, amplitude]`
/// to every pixel, clamping to [0, 255].
pub fn add_uniform_noise(img: &GrayImage, seed: u64, amplitude: u8) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = i16::from(amplitude);
    let data = img
        .as_raw()
        .iter()
        .map(|&v| (i16::from(v) + rng.gen_range(-a..=a)).clamp(0, 255) as u8)
        .collect();
    GrayImage::from_raw(img.width(), img.height(), data).expect("same dimensions")
}
