//! Per-pixel LBP and E-LBP codes.
//!
//! An E-LBP operator is described by the shape of its eight neighbour
//! point-sets, the shape of its central point-set and the range `r`: the
//! neighbour sets are anchored at `r · d` for the eight compass directions
//! `d` around the central anchor. Bit `i` of a code is set when the mean of
//! neighbour set `i` is at least the mean of the central set. Means are
//! compared by cross-multiplying sums with set sizes, so codes are exact
//! integers with no rounding anywhere.
//!
//! Neighbours are visited clockwise from the top-left (NW, N, NE, E, SE, S,
//! SW, W); the first one lands in the most significant bit.

use core::fmt;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Compass directions in bit order, most significant bit first.
pub const DIRECTIONS: [(i32, i32); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
];

/// Shape of a point-set, relative to its anchor pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointSetTopology {
    /// The anchor pixel alone. With both sets single and `r = 1` the
    /// operator is the classic 3×3 LBP.
    Single,
    /// 2×2 square; the anchor is the top-left member.
    Square2,
    /// 3×3 square centred on the anchor.
    Square3,
}

const SINGLE_OFFSETS: [(i32, i32); 1] = [(0, 0)];
const SQUARE2_OFFSETS: [(i32, i32); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];
const SQUARE3_OFFSETS: [(i32, i32); 9] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (0, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

impl PointSetTopology {
    pub const ALL: [PointSetTopology; 3] = [Self::Single, Self::Square2, Self::Square3];

    /// Topology from its point count (1, 4 or 9).
    pub fn from_size(size: u32) -> Result<Self> {
        match size {
            1 => Ok(Self::Single),
            4 => Ok(Self::Square2),
            9 => Ok(Self::Square3),
            other => Err(Error::InvalidTopology(other)),
        }
    }

    #[inline]
    pub fn size(self) -> u32 {
        match self {
            Self::Single => 1,
            Self::Square2 => 4,
            Self::Square3 => 9,
        }
    }

    pub fn offsets(self) -> &'static [(i32, i32)] {
        match self {
            Self::Single => &SINGLE_OFFSETS,
            Self::Square2 => &SQUARE2_OFFSETS,
            Self::Square3 => &SQUARE3_OFFSETS,
        }
    }

    /// Smallest and largest horizontal offset.
    fn dx_extent(self) -> (i32, i32) {
        extent(self.offsets().iter().map(|o| o.0))
    }

    fn dy_extent(self) -> (i32, i32) {
        extent(self.offsets().iter().map(|o| o.1))
    }
}

fn extent(values: impl Iterator<Item = i32>) -> (i32, i32) {
    values.fold((i32::MAX, i32::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Pixels trimmed from each side of the source image to obtain the region
/// where every sample of the operator is in bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Margins {
    pub left: u32,
    pub right: u32,
    pub top: u32,
    pub bottom: u32,
}

/// Neighbour topology, central topology and range of an E-LBP operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OperatorParams {
    neighbor: PointSetTopology,
    central: PointSetTopology,
    range: u32,
}

impl OperatorParams {
    /// Largest supported range; the model file stores it in 16 bits.
    pub const MAX_RANGE: u32 = u16::MAX as u32;

    /// The operator used by the final face-recognition configuration.
    pub const RECOMMENDED: OperatorParams = OperatorParams {
        neighbor: PointSetTopology::Square2,
        central: PointSetTopology::Square3,
        range: 5,
    };

    /// Classic 3×3 LBP expressed as an E-LBP operator.
    pub const CLASSIC_LBP: OperatorParams = OperatorParams {
        neighbor: PointSetTopology::Single,
        central: PointSetTopology::Single,
        range: 1,
    };

    pub fn new(neighbor: PointSetTopology, central: PointSetTopology, range: u32) -> Result<Self> {
        if range == 0 || range > Self::MAX_RANGE {
            return Err(Error::InvalidArgument("range must be between 1 and 65535"));
        }
        Ok(Self {
            neighbor,
            central,
            range,
        })
    }

    /// Operator from point counts, e.g. `(4, 9, 5)`.
    pub fn from_sizes(neighbor: u32, central: u32, range: u32) -> Result<Self> {
        Self::new(
            PointSetTopology::from_size(neighbor)?,
            PointSetTopology::from_size(central)?,
            range,
        )
    }

    #[inline]
    pub fn neighbor(&self) -> PointSetTopology {
        self.neighbor
    }

    #[inline]
    pub fn central(&self) -> PointSetTopology {
        self.central
    }

    #[inline]
    pub fn range(&self) -> u32 {
        self.range
    }

    pub fn is_classic(&self) -> bool {
        *self == Self::CLASSIC_LBP
    }

    /// Margins are `r` plus the extent of the wider of the two topologies on
    /// each side.
    pub fn margins(&self) -> Margins {
        let (nx, ny) = (self.neighbor.dx_extent(), self.neighbor.dy_extent());
        let (cx, cy) = (self.central.dx_extent(), self.central.dy_extent());
        let before = |a: (i32, i32), b: (i32, i32)| self.range + (-a.0.min(b.0)).max(0) as u32;
        let after = |a: (i32, i32), b: (i32, i32)| self.range + a.1.max(b.1).max(0) as u32;
        Margins {
            left: before(nx, cx),
            right: after(nx, cx),
            top: before(ny, cy),
            bottom: after(ny, cy),
        }
    }

    /// Size of the code region for a `width`×`height` source image.
    pub fn code_dimensions(&self, width: u32, height: u32) -> Result<(u32, u32)> {
        let m = self.margins();
        let horizontal = u64::from(m.left) + u64::from(m.right);
        let vertical = u64::from(m.top) + u64::from(m.bottom);
        if u64::from(width) <= horizontal || u64::from(height) <= vertical {
            return Err(Error::ImageTooSmall {
                width,
                height,
                margins: m,
            });
        }
        Ok((width - horizontal as u32, height - vertical as u32))
    }
}

impl Default for OperatorParams {
    fn default() -> Self {
        Self::RECOMMENDED
    }
}

impl fmt::Display for OperatorParams {
    /// `E-LBP(x,y,r)`, or `LBP` for the classic operator.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_classic() {
            f.write_str("LBP")
        } else {
            write!(
                f,
                "E-LBP({},{},{})",
                self.neighbor.size(),
                self.central.size(),
                self.range
            )
        }
    }
}

/// Classic LBP code of the pixel at `(x, y)`.
pub fn lbp_code(img: &GrayImage, x: u32, y: u32) -> Result<u8> {
    let (w, h) = img.dimensions();
    if x == 0 || y == 0 || x + 1 >= w || y + 1 >= h {
        return Err(Error::OutOfBounds {
            x: i64::from(x),
            y: i64::from(y),
        });
    }
    let center = img.get(x, y);
    Ok(DIRECTIONS.iter().fold(0u8, |code, &(dx, dy)| {
        let neighbor = img.get((x as i32 + dx) as u32, (y as i32 + dy) as u32);
        (code << 1) | u8::from(neighbor >= center)
    }))
}

fn set_sum(img: &GrayImage, x: i64, y: i64, topology: PointSetTopology) -> Result<u32> {
    topology.offsets().iter().try_fold(0u32, |acc, &(dx, dy)| {
        let (sx, sy) = (x + i64::from(dx), y + i64::from(dy));
        img.get_checked(sx, sy)
            .map(|v| acc + u32::from(v))
            .ok_or(Error::OutOfBounds { x: sx, y: sy })
    })
}

/// E-LBP code of the pixel at `(x, y)`, evaluated directly from the
/// definition. [`code_image`] computes the same values for a whole image
/// much faster.
pub fn elbp_code(img: &GrayImage, x: u32, y: u32, params: &OperatorParams) -> Result<u8> {
    let (x, y) = (i64::from(x), i64::from(y));
    let r = i64::from(params.range);
    let central = set_sum(img, x, y, params.central)? * params.neighbor.size();
    DIRECTIONS.iter().try_fold(0u8, |code, &(dx, dy)| {
        let neighbor = set_sum(img, x + r * i64::from(dx), y + r * i64::from(dy), params.neighbor)?
            * params.central.size();
        Ok((code << 1) | u8::from(neighbor >= central))
    })
}

/// Codes over the valid interior of a source image.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodeImage {
    width: u32,
    height: u32,
    origin: (u32, u32),
    codes: Vec<u8>,
}

impl CodeImage {
    /// Wraps precomputed codes. `origin` is the position of the first code
    /// in source-image coordinates.
    pub fn from_raw(width: u32, height: u32, origin: (u32, u32), codes: Vec<u8>) -> Result<Self> {
        let expected = (width as usize)
            .checked_mul(height as usize)
            .ok_or(Error::InvalidDimensions { width, height })?;
        if codes.len() != expected {
            return Err(Error::BufferSize {
                expected,
                actual: codes.len(),
            });
        }
        Ok(Self {
            width,
            height,
            origin,
            codes,
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
    pub fn origin(&self) -> (u32, u32) {
        self.origin
    }

    #[inline]
    pub fn codes(&self) -> &[u8] {
        &self.codes
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Code at `(x, y)` in code-image coordinates.
    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        assert!(x < self.width && y < self.height);
        self.codes[y as usize * self.width as usize + x as usize]
    }

    pub fn row(&self, y: u32) -> &[u8] {
        let w = self.width as usize;
        &self.codes[y as usize * w..(y as usize + 1) * w]
    }

    /// The code map as a grayscale image, for inspection.
    pub fn to_gray_image(&self) -> Result<GrayImage> {
        GrayImage::from_raw(self.width, self.height, self.codes.clone())
    }
}

/// Sum of each point-set anchored at every pixel where the set fits.
/// Entries whose set would leave the image are left at zero.
fn set_sums(img: &GrayImage, topology: PointSetTopology) -> Vec<u16> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let src = img.as_raw();
    match topology {
        PointSetTopology::Single => src.iter().map(|&v| u16::from(v)).collect(),
        PointSetTopology::Square2 => {
            let mut out = vec![0u16; w * h];
            for y in 0..h.saturating_sub(1) {
                let (top, bottom) = (&src[y * w..(y + 1) * w], &src[(y + 1) * w..(y + 2) * w]);
                let row = &mut out[y * w..(y + 1) * w];
                for x in 0..w - 1 {
                    row[x] = u16::from(top[x])
                        + u16::from(top[x + 1])
                        + u16::from(bottom[x])
                        + u16::from(bottom[x + 1]);
                }
            }
            out
        }
        PointSetTopology::Square3 => {
            let mut horizontal = vec![0u16; w * h];
            for y in 0..h {
                let line = &src[y * w..(y + 1) * w];
                let row = &mut horizontal[y * w..(y + 1) * w];
                for x in 1..w.saturating_sub(1) {
                    row[x] = u16::from(line[x - 1]) + u16::from(line[x]) + u16::from(line[x + 1]);
                }
            }
            let mut out = vec![0u16; w * h];
            for y in 1..h.saturating_sub(1) {
                for x in 1..w - 1 {
                    out[y * w + x] = horizontal[(y - 1) * w + x]
                        + horizontal[y * w + x]
                        + horizontal[(y + 1) * w + x];
                }
            }
            out
        }
    }
}

/// E-LBP codes at every pixel where all samples are in bounds.
///
/// Point-set sums are computed once per image, so each code costs nine
/// lookups and eight integer comparisons regardless of the topologies.
pub fn code_image(img: &GrayImage, params: &OperatorParams) -> Result<CodeImage> {
    let (code_w, code_h) = params.code_dimensions(img.width(), img.height())?;
    let margins = params.margins();
    let central = set_sums(img, params.central);
    let neighbor = if params.neighbor == params.central {
        None
    } else {
        Some(set_sums(img, params.neighbor))
    };
    let neighbor = neighbor.as_deref().unwrap_or(&central);

    let stride = img.width() as isize;
    let r = params.range as isize;
    let offsets = DIRECTIONS.map(|(dx, dy)| r * (dy as isize * stride + dx as isize));
    let central_weight = params.neighbor.size();
    let neighbor_weight = params.central.size();

    let mut codes = Vec::with_capacity(code_w as usize * code_h as usize);
    for y in margins.top..margins.top + code_h {
        let row_start = y as usize * stride as usize;
        for x in margins.left..margins.left + code_w {
            let idx = row_start + x as usize;
            let c = u32::from(central[idx]) * central_weight;
            let mut code = 0u8;
            for &off in &offsets {
                let n = u32::from(neighbor[(idx as isize + off) as usize]) * neighbor_weight;
                code = (code << 1) | u8::from(n >= c);
            }
            codes.push(code);
        }
    }
    CodeImage::from_raw(code_w, code_h, (margins.left, margins.top), codes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::texture::{gen_texture, TextureKind};
    use alloc::vec;
    use proptest::prelude::*;

    fn params(x: u32, y: u32, r: u32) -> OperatorParams {
        OperatorParams::from_sizes(x, y, r).unwrap()
    }

    /// Straight-line oracle: explicit per-pixel loops over the set
    /// definitions, comparing means as exact fractions.
    fn oracle_code(img: &GrayImage, x: i64, y: i64, p: &OperatorParams) -> u8 {
        let sum = |ax: i64, ay: i64, t: PointSetTopology| -> i64 {
            let mut s = 0;
            for &(dx, dy) in t.offsets() {
                s += i64::from(img.get((ax + i64::from(dx)) as u32, (ay + i64::from(dy)) as u32));
            }
            s
        };
        let r = i64::from(p.range());
        let (c_sum, c_n) = (sum(x, y, p.central()), i64::from(p.central().size()));
        let mut code = 0u8;
        for (bit, &(dx, dy)) in DIRECTIONS.iter().enumerate() {
            let n_sum = sum(x + r * i64::from(dx), y + r * i64::from(dy), p.neighbor());
            let n_n = i64::from(p.neighbor().size());
            if n_sum * c_n >= c_sum * n_n {
                code |= 1 << (7 - bit);
            }
        }
        code
    }

    #[test]
    fn topology_offsets() {
        assert_eq!(PointSetTopology::Single.offsets(), &[(0, 0)]);
        assert_eq!(PointSetTopology::Square2.offsets(), &[(0, 0), (1, 0), (0, 1), (1, 1)]);
        let nine = PointSetTopology::Square3.offsets();
        assert_eq!(nine.len(), 9);
        for dy in -1..=1 {
            for dx in -1..=1 {
                assert!(nine.contains(&(dx, dy)));
            }
        }
        for t in PointSetTopology::ALL {
            assert_eq!(t.offsets().len() as u32, t.size());
            assert_eq!(PointSetTopology::from_size(t.size()).unwrap(), t);
        }
        assert_eq!(PointSetTopology::from_size(16), Err(Error::InvalidTopology(16)));
    }

    #[test]
    fn params_validation() {
        assert!(matches!(
            OperatorParams::from_sizes(4, 9, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert_eq!(OperatorParams::default(), params(4, 9, 5));
        assert_eq!(OperatorParams::CLASSIC_LBP, params(1, 1, 1));
        assert_eq!(alloc::format!("{}", params(4, 9, 5)), "E-LBP(4,9,5)");
        assert_eq!(alloc::format!("{}", params(1, 1, 1)), "LBP");
    }

    #[test]
    fn lbp_examples() {
        let flat = GrayImage::filled(3, 3, 42).unwrap();
        assert_eq!(lbp_code(&flat, 1, 1).unwrap(), 255);

        let mut dark = GrayImage::filled(3, 3, 10).unwrap();
        dark.put(1, 1, 200);
        assert_eq!(lbp_code(&dark, 1, 1).unwrap(), 0);

        let grad = GrayImage::from_raw(3, 3, vec![10, 20, 30, 40, 50, 60, 70, 80, 90]).unwrap();
        // NW..W: 10,20,30,60,90,80,70,40 against 50 → 0001_1110
        assert_eq!(lbp_code(&grad, 1, 1).unwrap(), 0b0001_1110);
        assert_eq!(lbp_code(&grad, 1, 1).unwrap(), 30);
    }

    #[test]
    fn lbp_bounds() {
        let img = GrayImage::filled(4, 4, 0).unwrap();
        assert!(lbp_code(&img, 0, 1).is_err());
        assert!(lbp_code(&img, 1, 3).is_err());
        assert!(lbp_code(&img, 2, 2).is_ok());
    }

    #[test]
    fn elbp_ramp_example() {
        let ramp = GrayImage::from_fn(9, 9, |x, _| (16 * x) as u8).unwrap();
        let p = params(4, 9, 2);
        // central 3×3 mean 64; neighbour 2×2 means 40,72,104,104,104,72,40,40
        assert_eq!(oracle_code(&ramp, 4, 4, &p), 0b0111_1100);
        assert_eq!(elbp_code(&ramp, 4, 4, &p).unwrap(), 124);
    }

    #[test]
    fn elbp_constant_is_all_ones() {
        let flat = GrayImage::filled(20, 20, 99).unwrap();
        for &(x, y, r) in &[(1, 1, 1), (4, 9, 5), (9, 4, 3), (9, 9, 2), (4, 4, 1)] {
            assert_eq!(elbp_code(&flat, 10, 10, &params(x, y, r)).unwrap(), 255);
            let codes = code_image(&flat, &params(x, y, r)).unwrap();
            assert!(codes.codes().iter().all(|&c| c == 255));
        }
    }

    #[test]
    fn elbp_bounds() {
        let img = GrayImage::filled(9, 9, 0).unwrap();
        let p = params(4, 9, 2);
        // NE set at (6+2, 2) reaches column 9
        assert!(matches!(elbp_code(&img, 6, 4, &p), Err(Error::OutOfBounds { .. })));
        assert!(elbp_code(&img, 2, 2, &p).is_ok());
        assert!(elbp_code(&img, 1, 4, &p).is_err());
    }

    #[test]
    fn margin_examples() {
        let m = params(9, 9, 1).margins();
        assert_eq!((m.left, m.right, m.top, m.bottom), (2, 2, 2, 2));
        let m = params(4, 9, 5).margins();
        assert_eq!((m.left, m.right, m.top, m.bottom), (6, 6, 6, 6));
        let m = params(4, 4, 3).margins();
        assert_eq!((m.left, m.right, m.top, m.bottom), (3, 4, 3, 4));
        let m = params(1, 1, 1).margins();
        assert_eq!((m.left, m.right, m.top, m.bottom), (1, 1, 1, 1));

        let img = GrayImage::filled(9, 9, 0).unwrap();
        let codes = code_image(&img, &params(9, 9, 1)).unwrap();
        assert_eq!((codes.width(), codes.height(), codes.origin()), (5, 5, (2, 2)));

        let img = GrayImage::filled(128, 128, 0).unwrap();
        let codes = code_image(&img, &params(4, 9, 5)).unwrap();
        assert_eq!((codes.width(), codes.height(), codes.origin()), (116, 116, (6, 6)));
    }

    #[test]
    fn image_too_small() {
        let img = GrayImage::filled(12, 40, 0).unwrap();
        assert!(matches!(
            code_image(&img, &params(4, 9, 5)),
            Err(Error::ImageTooSmall { width: 12, .. })
        ));
        let img = GrayImage::filled(13, 13, 0).unwrap();
        let codes = code_image(&img, &params(4, 9, 5)).unwrap();
        assert_eq!((codes.width(), codes.height()), (1, 1));
    }

    #[test]
    fn code_image_matches_oracle_on_textures() {
        for kind in TextureKind::ALL {
            let img = gen_texture(3, kind, 23, 19).unwrap();
            for n in [1, 4, 9] {
                for c in [1, 4, 9] {
                    for r in 1..=4 {
                        let p = params(n, c, r);
                        let codes = code_image(&img, &p).unwrap();
                        let (ox, oy) = codes.origin();
                        for y in 0..codes.height() {
                            for x in 0..codes.width() {
                                let expected =
                                    oracle_code(&img, i64::from(x + ox), i64::from(y + oy), &p);
                                assert_eq!(codes.get(x, y), expected, "{p} {kind} ({x},{y})");
                            }
                        }
                    }
                }
            }
        }
    }

    fn arb_image(max: u32) -> impl Strategy<Value = GrayImage> {
        (4..=max, 4..=max).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<u8>(), (w * h) as usize)
                .prop_map(move |data| GrayImage::from_raw(w, h, data).unwrap())
        })
    }

    fn arb_params() -> impl Strategy<Value = OperatorParams> {
        (
            prop::sample::select(vec![1u32, 4, 9]),
            prop::sample::select(vec![1u32, 4, 9]),
            1u32..=4,
        )
            .prop_map(|(n, c, r)| params(n, c, r))
    }

    proptest! {
        #[test]
        fn code_image_agrees_with_elbp_code(img in arb_image(24), p in arb_params()) {
            if let Ok(codes) = code_image(&img, &p) {
                let (ox, oy) = codes.origin();
                for y in 0..codes.height() {
                    for x in 0..codes.width() {
                        prop_assert_eq!(codes.get(x, y), elbp_code(&img, x + ox, y + oy, &p).unwrap());
                    }
                }
            } else {
                let m = p.margins();
                prop_assert!(img.width() <= m.left + m.right || img.height() <= m.top + m.bottom);
            }
        }

        #[test]
        fn classic_params_reduce_to_lbp(img in arb_image(20)) {
            let codes = code_image(&img, &OperatorParams::CLASSIC_LBP).unwrap();
            for y in 0..codes.height() {
                for x in 0..codes.width() {
                    prop_assert_eq!(codes.get(x, y), lbp_code(&img, x + 1, y + 1).unwrap());
                }
            }
        }

        #[test]
        fn affine_intensity_invariance(
            (w, h, data) in (4u32..=24, 4u32..=24).prop_flat_map(|(w, h)| {
                (Just(w), Just(h), proptest::collection::vec(10u8..=100, (w * h) as usize))
            }),
            p in arb_params(),
            a in 1u8..=2,
            b in -10i16..=50,
        ) {
            let img = GrayImage::from_raw(w, h, data).unwrap();
            let scaled = GrayImage::from_fn(w, h, |x, y| {
                (i16::from(a) * i16::from(img.get(x, y)) + b) as u8
            }).unwrap();
            prop_assert_eq!(code_image(&img, &p).ok(), code_image(&scaled, &p).ok());
        }

        #[test]
        fn translation_equivariance(
            big in arb_image(32),
            p in arb_params(),
            sx in 0u32..4,
            sy in 0u32..4,
        ) {
            let (w, h) = (big.width().saturating_sub(sx), big.height().saturating_sub(sy));
            prop_assume!(w > 0 && h > 0);
            let base = big.sub_image(0, 0, w, h).unwrap();
            let shifted = big.sub_image(sx, sy, w, h).unwrap();
            if let (Ok(a), Ok(b)) = (code_image(&base, &p), code_image(&shifted, &p)) {
                // shifted(x, y) = base(x + sx, y + sy)
                for y in 0..b.height() {
                    for x in 0..b.width() {
                        if x + sx < a.width() && y + sy < a.height() {
                            prop_assert_eq!(b.get(x, y), a.get(x + sx, y + sy));
                        }
                    }
                }
            }
        }
    }
}
