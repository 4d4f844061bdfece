//! 8-bit grayscale rasters and the geometric normalization used before
//! descriptor extraction.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Single-channel 8-bit raster stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

fn pixel_count(width: u32, height: u32) -> Result<usize> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions { width, height });
    }
    (width as usize)
        .checked_mul(height as usize)
        .ok_or(Error::InvalidDimensions { width, height })
}

impl GrayImage {
    /// Image of the given size with every pixel set to `value`.
    pub fn filled(width: u32, height: u32, value: u8) -> Result<Self> {
        let len = pixel_count(width, height)?;
        Ok(Self {
            width,
            height,
            data: vec![value; len],
        })
    }

    pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        let expected = pixel_count(width, height)?;
        if data.len() != expected {
            return Err(Error::BufferSize {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Result<Self> {
        let len = pixel_count(width, height)?;
        let mut data = Vec::with_capacity(len);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    #[inline]
    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    /// Intensity at `(x, y)`. Panics when out of bounds.
    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        assert!(x < self.width && y < self.height, "pixel ({x}, {y}) out of bounds");
        self.data[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn get_checked(&self, x: i64, y: i64) -> Option<u8> {
        if x < 0 || y < 0 || x >= i64::from(self.width) || y >= i64::from(self.height) {
            return None;
        }
        Some(self.data[y as usize * self.width as usize + x as usize])
    }

    #[inline]
    pub fn put(&mut self, x: u32, y: u32, value: u8) {
        assert!(x < self.width && y < self.height, "pixel ({x}, {y}) out of bounds");
        self.data[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn row(&self, y: u32) -> &[u8] {
        let w = self.width as usize;
        let start = y as usize * w;
        &self.data[start..start + w]
    }

    /// Smallest and largest intensity.
    pub fn min_max(&self) -> (u8, u8) {
        self.data
            .iter()
            .fold((u8::MAX, u8::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Copies the `width`×`height` window whose top-left corner is `(x, y)`.
    pub fn sub_image(&self, x: u32, y: u32, width: u32, height: u32) -> Result<Self> {
        let x_end = x.checked_add(width).filter(|&e| e <= self.width);
        let y_end = y.checked_add(height).filter(|&e| e <= self.height);
        if x_end.is_none() || y_end.is_none() {
            return Err(Error::OutOfBounds {
                x: i64::from(x) + i64::from(width),
                y: i64::from(y) + i64::from(height),
            });
        }
        Self::from_fn(width, height, |dx, dy| self.get(x + dx, y + dy))
    }
}

/// ITU-R BT.601 luma with round-half-up, in exact integer arithmetic.
#[inline]
pub fn rgb_to_luma(r: u8, g: u8, b: u8) -> u8 {
    let weighted = 299 * u32::from(r) + 587 * u32::from(g) + 114 * u32::from(b);
    ((weighted + 500) / 1000) as u8
}

/// Source sample position for output index `dst` as an exact fraction
/// `num / den` (align-corners; a single output sample maps to the centre).
#[inline]
fn sample_position(dst: u32, src_dim: u32, dst_dim: u32) -> (u64, u64) {
    if dst_dim == 1 {
        (u64::from(src_dim - 1), 2)
    } else {
        (u64::from(dst) * u64::from(src_dim - 1), u64::from(dst_dim - 1))
    }
}

/// Bilinear resize with edge clamping.
///
/// Sample positions follow the align-corners convention
/// `src = dst · (src_dim − 1) / (dst_dim − 1)`; the interpolation is carried
/// out in exact rational arithmetic and rounded half up, so the result does
/// not depend on floating-point behaviour.
pub fn resize_bilinear(img: &GrayImage, out_w: u32, out_h: u32) -> Result<GrayImage> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidArgument("resize target dimensions must be at least 1"));
    }
    let (w, h) = img.dimensions();
    // (x0, x1, fraction numerator, denominator) per output column.
    let columns: Vec<(u32, u32, u64, u64)> = (0..out_w)
        .map(|dx| {
            let (num, den) = sample_position(dx, w, out_w);
            let x0 = (num / den) as u32;
            (x0, (x0 + 1).min(w - 1), num % den, den)
        })
        .collect();

    let mut data = Vec::with_capacity(out_w as usize * out_h as usize);
    for dy in 0..out_h {
        let (num, den_y) = sample_position(dy, h, out_h);
        let y0 = (num / den_y) as u32;
        let y1 = (y0 + 1).min(h - 1);
        let fy = num % den_y;
        let (top, bottom) = (img.row(y0), img.row(y1));
        for &(x0, x1, fx, den_x) in &columns {
            let p00 = u64::from(top[x0 as usize]);
            let p10 = u64::from(top[x1 as usize]);
            let p01 = u64::from(bottom[x0 as usize]);
            let p11 = u64::from(bottom[x1 as usize]);
            let weighted = (den_x - fx) * (den_y - fy) * p00
                + fx * (den_y - fy) * p10
                + (den_x - fx) * fy * p01
                + fx * fy * p11;
            let denom = den_x * den_y;
            data.push(((2 * weighted + denom) / (2 * denom)) as u8);
        }
    }
    GrayImage::from_raw(out_w, out_h, data)
}

/// Output geometry for [`crop_by_eyes`].
///
/// The eyes land on a horizontal line at row `eye_row_frac · out_h`,
/// symmetric about the middle column and `eye_dist_frac · out_w` apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EyeCrop {
    pub out_w: u32,
    pub out_h: u32,
    pub eye_row_frac: f64,
    pub eye_dist_frac: f64,
}

impl Default for EyeCrop {
    fn default() -> Self {
        Self {
            out_w: 130,
            out_h: 150,
            eye_row_frac: 0.35,
            eye_dist_frac: 0.5,
        }
    }
}

impl EyeCrop {
    /// Target positions of the left and right eye in the output image.
    pub fn targets(&self) -> ((f64, f64), (f64, f64)) {
        let row = self.eye_row_frac * f64::from(self.out_h);
        let dist = self.eye_dist_frac * f64::from(self.out_w);
        let left_x = f64::from(self.out_w - 1) / 2.0 - dist / 2.0;
        ((left_x, row), (left_x + dist, row))
    }
}

fn bilinear_or_zero(img: &GrayImage, sx: f64, sy: f64) -> u8 {
    let (w, h) = img.dimensions();
    if !(sx >= 0.0 && sy >= 0.0 && sx <= f64::from(w - 1) && sy <= f64::from(h - 1)) {
        return 0;
    }
    let x0 = libm::floor(sx) as u32;
    let y0 = libm::floor(sy) as u32;
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = sx - f64::from(x0);
    let fy = sy - f64::from(y0);
    let p = |x, y| f64::from(img.get(x, y));
    let top = p(x0, y0) * (1.0 - fx) + p(x1, y0) * fx;
    let bottom = p(x0, y1) * (1.0 - fx) + p(x1, y1) * fx;
    let v = top * (1.0 - fy) + bottom * fy;
    libm::floor(v + 0.5).clamp(0.0, 255.0) as u8
}

/// Crops and rotates a face so the two eye points land on the positions
/// described by `crop`, using a similarity transform (rotation, uniform
/// scale, translation). Output pixels whose source falls outside the image
/// are 0.
pub fn crop_by_eyes(
    img: &GrayImage,
    left_eye: (f64, f64),
    right_eye: (f64, f64),
    crop: &EyeCrop,
) -> Result<GrayImage> {
    if crop.out_w == 0 || crop.out_h == 0 {
        return Err(Error::InvalidArgument("crop dimensions must be at least 1"));
    }
    if !(crop.eye_dist_frac.is_finite() && crop.eye_dist_frac > 0.0)
        || !crop.eye_row_frac.is_finite()
    {
        return Err(Error::InvalidArgument("eye fractions must be finite, distance positive"));
    }
    let (w, h) = img.dimensions();
    for &(x, y) in &[left_eye, right_eye] {
        if !(x >= 0.0 && y >= 0.0 && x <= f64::from(w - 1) && y <= f64::from(h - 1)) {
            return Err(Error::OutOfBounds {
                x: x as i64,
                y: y as i64,
            });
        }
    }
    let (vx, vy) = (right_eye.0 - left_eye.0, right_eye.1 - left_eye.1);
    if vx == 0.0 && vy == 0.0 {
        return Err(Error::DegenerateGeometry("eye positions coincide"));
    }

    let (target_left, _) = crop.targets();
    let dist = crop.eye_dist_frac * f64::from(crop.out_w);
    // Output-to-source map: src = left_eye + M · (p − target_left), where M
    // is the scaled rotation taking (dist, 0) onto the eye vector.
    let (a, b) = (vx / dist, vy / dist);
    GrayImage::from_fn(crop.out_w, crop.out_h, |x, y| {
        let ux = f64::from(x) - target_left.0;
        let uy = f64::from(y) - target_left.1;
        let sx = left_eye.0 + a * ux - b * uy;
        let sy = left_eye.1 + b * ux + a * uy;
        bilinear_or_zero(img, sx, sy)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn from_raw_checks_length() {
        assert!(GrayImage::from_raw(2, 2, vec![0, 1, 2, 3]).is_ok());
        assert_eq!(
            GrayImage::from_raw(2, 2, vec![0; 3]),
            Err(Error::BufferSize {
                expected: 4,
                actual: 3
            })
        );
        assert!(matches!(
            GrayImage::from_raw(0, 2, vec![]),
            Err(Error::InvalidDimensions { .. })
        ));
    }

    #[test]
    fn luma_examples() {
        assert_eq!(rgb_to_luma(255, 255, 255), 255);
        assert_eq!(rgb_to_luma(0, 0, 0), 0);
        // 0.299·100 + 0.587·200 + 0.114·50 = 29.9 + 117.4 + 5.7 = 153.0
        assert_eq!(rgb_to_luma(100, 200, 50), 153);
        // 0.299·1 = 0.299, 0.587·1 = 0.587 → 0.886 rounds to 1
        assert_eq!(rgb_to_luma(1, 1, 0), 1);
        // 0.299 + 0.114 = 0.413 → 0
        assert_eq!(rgb_to_luma(1, 0, 1), 0);
    }

    #[test]
    fn resize_two_to_three() {
        let img = GrayImage::from_raw(2, 1, vec![0, 255]).unwrap();
        let out = resize_bilinear(&img, 3, 1).unwrap();
        assert_eq!(out.as_raw(), &[0, 128, 255]);
    }

    #[test]
    fn resize_identity_and_constant() {
        let img = GrayImage::from_fn(7, 5, |x, y| (x * 31 + y * 17) as u8).unwrap();
        assert_eq!(resize_bilinear(&img, 7, 5).unwrap(), img);
        let flat = GrayImage::filled(9, 4, 77).unwrap();
        let out = resize_bilinear(&flat, 13, 2).unwrap();
        assert!(out.as_raw().iter().all(|&v| v == 77));
        let single = resize_bilinear(&flat, 1, 1).unwrap();
        assert_eq!(single.as_raw(), &[77]);
    }

    #[test]
    fn resize_single_output_samples_centre() {
        let img = GrayImage::from_raw(3, 1, vec![10, 20, 30]).unwrap();
        assert_eq!(resize_bilinear(&img, 1, 1).unwrap().as_raw(), &[20]);
        let img = GrayImage::from_raw(2, 1, vec![10, 21]).unwrap();
        // centre 15.5 rounds half up
        assert_eq!(resize_bilinear(&img, 1, 1).unwrap().as_raw(), &[16]);
    }

    #[test]
    fn resize_rejects_zero() {
        let img = GrayImage::filled(2, 2, 0).unwrap();
        assert!(matches!(resize_bilinear(&img, 0, 3), Err(Error::InvalidArgument(_))));
    }

    fn textured(w: u32, h: u32) -> GrayImage {
        GrayImage::from_fn(w, h, |x, y| ((x * 7 + y * 13 + x * y) % 251) as u8).unwrap()
    }

    #[test]
    fn crop_identity_is_source_window() {
        let src = textured(40, 40);
        let crop = EyeCrop {
            out_w: 21,
            out_h: 20,
            eye_row_frac: 0.35,
            eye_dist_frac: 0.5,
        };
        let ((lx, ly), (rx, ry)) = crop.targets();
        // targets: left (4.75, 7), right (15.25, 7); shift by an integer offset
        let (ox, oy) = (6.0, 9.0);
        let out = crop_by_eyes(&src, (lx + ox, ly + oy), (rx + ox, ry + oy), &crop).unwrap();
        assert_eq!(out, src.sub_image(6, 9, 21, 20).unwrap());
    }

    #[test]
    fn crop_swapped_eyes_rotates_half_turn() {
        let src = GrayImage::from_fn(60, 60, |x, y| ((x * 3 + y * 2) % 256) as u8).unwrap();
        let crop = EyeCrop {
            out_w: 21,
            out_h: 20,
            eye_row_frac: 0.35,
            eye_dist_frac: 0.5,
        };
        let left = (22.3, 25.1);
        let right = (36.8, 28.4);
        let straight = crop_by_eyes(&src, left, right, &crop).unwrap();
        let swapped = crop_by_eyes(&src, right, left, &crop).unwrap();
        // half-turn about the eye midpoint (10, 7)
        for y in 0..=14u32 {
            for x in 0..21u32 {
                let a = i32::from(swapped.get(x, y));
                let b = i32::from(straight.get(20 - x, 14 - y));
                assert!((a - b).abs() <= 1, "({x},{y}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn crop_places_eye_marks_on_targets() {
        let mut src = GrayImage::filled(100, 90, 20).unwrap();
        let left = (31.0, 40.0);
        let right = (62.0, 52.0);
        for &(ex, ey) in &[left, right] {
            for dy in -1i32..=1 {
                for dx in -1i32..=1 {
                    src.put((ex as i32 + dx) as u32, (ey as i32 + dy) as u32, 255);
                }
            }
        }
        let crop = EyeCrop::default();
        let out = crop_by_eyes(&src, left, right, &crop).unwrap();
        let (tl, tr) = crop.targets();
        let mid = f64::from(crop.out_w - 1) / 2.0;
        for (target, on_left) in [(tl, true), (tr, false)] {
            let (mut sx, mut sy, mut n) = (0.0, 0.0, 0.0);
            for y in 0..out.height() {
                for x in 0..out.width() {
                    let v = out.get(x, y);
                    if v > 100 && ((f64::from(x) < mid) == on_left) {
                        let wgt = f64::from(v - 20);
                        sx += wgt * f64::from(x);
                        sy += wgt * f64::from(y);
                        n += wgt;
                    }
                }
            }
            assert!(n > 0.0);
            let (cx, cy) = (sx / n, sy / n);
            assert!((cx - target.0).abs() <= 1.0, "x {cx} vs {}", target.0);
            assert!((cy - target.1).abs() <= 1.0, "y {cy} vs {}", target.1);
        }
    }

    #[test]
    fn crop_errors() {
        let src = textured(10, 10);
        let crop = EyeCrop::default();
        assert!(matches!(
            crop_by_eyes(&src, (3.0, 3.0), (3.0, 3.0), &crop),
            Err(Error::DegenerateGeometry(_))
        ));
        assert!(matches!(
            crop_by_eyes(&src, (3.0, 3.0), (12.0, 3.0), &crop),
            Err(Error::OutOfBounds { .. })
        ));
    }

    #[test]
    fn crop_fills_outside_with_zero() {
        let src = GrayImage::filled(10, 10, 200).unwrap();
        let crop = EyeCrop {
            out_w: 40,
            out_h: 40,
            eye_row_frac: 0.5,
            eye_dist_frac: 0.1,
        };
        let out = crop_by_eyes(&src, (2.0, 5.0), (6.0, 5.0), &crop).unwrap();
        assert_eq!(out.get(0, 0), 0);
        assert_eq!(out.get(19, 20), 200);
    }
}
