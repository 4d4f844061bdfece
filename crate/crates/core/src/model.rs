//! Face models: a regular grid of square cells over the code image, one
//! 256-bin code histogram per cell, concatenated row-major.
//!
//! Binary layout (all integers little-endian):
//!
//! | bytes | field                                    |
//! |-------|------------------------------------------|
//! | 8     | magic `ELBPMODL`                         |
//! | 2     | version (u16), currently 1               |
//! | 1 + 1 | neighbour and central set sizes (u8)     |
//! | 2     | range (u16)                              |
//! | 2     | cell size (u16)                          |
//! | 2 + 2 | source width, height (u16)               |
//! | 2 + 2 | grid columns, rows (u16)                 |
//! | 1024n | n = columns·rows cells of 256 u32 counts |

use core::fmt;

use alloc::vec;
use alloc::vec::Vec;

use crate::descriptor::{code_image, CodeImage, OperatorParams};
use crate::error::{Error, Result};
use crate::image::GrayImage;

pub const BINS: usize = 256;

/// Cells are at most 255×255 so that every count fits in 16 bits.
pub const MAX_CELL_SIZE: u32 = 255;

pub const MODEL_MAGIC: [u8; 8] = *b"ELBPMODL";
pub const MODEL_VERSION: u16 = 1;
const HEADER_LEN: usize = 24;
const CELL_BYTES: usize = BINS * 4;

/// Code histogram of one cell.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CellHistogram {
    counts: [u16; BINS],
    total: u32,
}

impl CellHistogram {
    pub fn from_counts(counts: [u16; BINS]) -> Result<Self> {
        let total = counts.iter().map(|&c| u32::from(c)).sum();
        if total == 0 {
            return Err(Error::InvalidArgument("cell histogram must not be empty"));
        }
        Ok(Self { counts, total })
    }

    #[inline]
    pub fn counts(&self) -> &[u16; BINS] {
        &self.counts
    }

    /// Number of code pixels in the cell.
    #[inline]
    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn normalized(&self) -> [f64; BINS] {
        let total = f64::from(self.total);
        self.counts.map(|c| f64::from(c) / total)
    }
}

impl fmt::Debug for CellHistogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(
                self.counts
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0),
            )
            .finish()
    }
}

/// Number of cell columns and rows covering a code image.
pub fn grid_dimensions(code_width: u32, code_height: u32, cell_size: u32) -> (u32, u32) {
    (code_width.div_ceil(cell_size), code_height.div_ceil(cell_size))
}

fn check_cell_size(cell_size: u32) -> Result<()> {
    if cell_size == 0 || cell_size > MAX_CELL_SIZE {
        return Err(Error::InvalidArgument("cell size must be between 1 and 255"));
    }
    Ok(())
}

/// Histograms of the square cells tiling `codes`, row-major. Cells on the
/// right and bottom edge may be partial.
pub fn build_histograms(codes: &CodeImage, cell_size: u32) -> Result<Vec<CellHistogram>> {
    check_cell_size(cell_size)?;
    if codes.is_empty() {
        return Err(Error::InvalidArgument("code image is empty"));
    }
    let (cols, rows) = grid_dimensions(codes.width(), codes.height(), cell_size);
    let mut counts = vec![[0u16; BINS]; cols as usize * rows as usize];
    for y in 0..codes.height() {
        let cell_row = &mut counts[(y / cell_size * cols) as usize..][..cols as usize];
        for (chunk, cell) in codes.row(y).chunks(cell_size as usize).zip(cell_row) {
            for &code in chunk {
                cell[code as usize] += 1;
            }
        }
    }
    counts.into_iter().map(CellHistogram::from_counts).collect()
}

/// Concatenated cell histograms of one face image, together with every
/// parameter needed to rebuild it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FaceModel {
    params: OperatorParams,
    cell_size: u32,
    grid: (u32, u32),
    source_dims: (u32, u32),
    cells: Vec<CellHistogram>,
}

pub fn build_face_model(
    img: &GrayImage,
    params: &OperatorParams,
    cell_size: u32,
) -> Result<FaceModel> {
    check_cell_size(cell_size)?;
    let codes = code_image(img, params)?;
    let cells = build_histograms(&codes, cell_size)?;
    Ok(FaceModel {
        params: *params,
        cell_size,
        grid: grid_dimensions(codes.width(), codes.height(), cell_size),
        source_dims: img.dimensions(),
        cells,
    })
}

impl FaceModel {
    /// Assembles a model from parts, checking that the cells are exactly
    /// the grid a source image of `source_dims` would produce.
    pub fn from_parts(
        params: OperatorParams,
        cell_size: u32,
        source_dims: (u32, u32),
        cells: Vec<CellHistogram>,
    ) -> Result<Self> {
        check_cell_size(cell_size)?;
        let (code_w, code_h) = params.code_dimensions(source_dims.0, source_dims.1)?;
        let grid = grid_dimensions(code_w, code_h, cell_size);
        if cells.len() != grid.0 as usize * grid.1 as usize {
            return Err(Error::InvalidArgument("cell count does not match the grid"));
        }
        let model = Self {
            params,
            cell_size,
            grid,
            source_dims,
            cells,
        };
        let areas_match = model
            .cells
            .iter()
            .enumerate()
            .all(|(i, cell)| cell.total() == model.cell_area(i, code_w, code_h));
        if !areas_match {
            return Err(Error::InvalidArgument("cell totals do not match cell areas"));
        }
        Ok(model)
    }

    fn cell_area(&self, index: usize, code_w: u32, code_h: u32) -> u32 {
        let (col, row) = (index as u32 % self.grid.0, index as u32 / self.grid.0);
        let w = (code_w - col * self.cell_size).min(self.cell_size);
        let h = (code_h - row * self.cell_size).min(self.cell_size);
        w * h
    }

    #[inline]
    pub fn params(&self) -> &OperatorParams {
        &self.params
    }

    #[inline]
    pub fn cell_size(&self) -> u32 {
        self.cell_size
    }

    /// `(columns, rows)` of the cell grid.
    #[inline]
    pub fn grid(&self) -> (u32, u32) {
        self.grid
    }

    #[inline]
    pub fn source_dims(&self) -> (u32, u32) {
        self.source_dims
    }

    #[inline]
    pub fn cells(&self) -> &[CellHistogram] {
        &self.cells
    }

    /// Length of the concatenated feature vector.
    pub fn feature_len(&self) -> usize {
        self.cells.len() * BINS
    }

    /// Concatenated normalized histograms.
    pub fn feature_vector(&self) -> Vec<f64> {
        self.cells.iter().flat_map(|c| c.normalized()).collect()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let narrow = |v: u32| {
            u16::try_from(v).map_err(|_| Error::InvalidArgument("value does not fit the model format"))
        };
        let mut out = Vec::with_capacity(HEADER_LEN + self.cells.len() * CELL_BYTES);
        out.extend_from_slice(&MODEL_MAGIC);
        out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
        out.push(self.params.neighbor().size() as u8);
        out.push(self.params.central().size() as u8);
        for v in [
            self.params.range(),
            self.cell_size,
            self.source_dims.0,
            self.source_dims.1,
            self.grid.0,
            self.grid.1,
        ] {
            out.extend_from_slice(&narrow(v)?.to_le_bytes());
        }
        for cell in &self.cells {
            for &c in cell.counts() {
                out.extend_from_slice(&u32::from(c).to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let need = |n: usize| {
            if bytes.len() < n {
                Err(Error::Truncated {
                    expected: n,
                    actual: bytes.len(),
                })
            } else {
                Ok(())
            }
        };
        need(MODEL_MAGIC.len())?;
        if bytes[..8] != MODEL_MAGIC {
            return Err(Error::BadMagic);
        }
        need(10)?;
        let u16_at = |at: usize| u16::from_le_bytes([bytes[at], bytes[at + 1]]);
        let version = u16_at(8);
        if version != MODEL_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        need(HEADER_LEN)?;
        let params = OperatorParams::from_sizes(
            u32::from(bytes[10]),
            u32::from(bytes[11]),
            u32::from(u16_at(12)),
        )
        .map_err(|_| Error::CorruptModel("invalid operator parameters"))?;
        let cell_size = u32::from(u16_at(14));
        let source_dims = (u32::from(u16_at(16)), u32::from(u16_at(18)));
        let grid = (u32::from(u16_at(20)), u32::from(u16_at(22)));
        check_cell_size(cell_size).map_err(|_| Error::CorruptModel("invalid cell size"))?;
        let (code_w, code_h) = params
            .code_dimensions(source_dims.0, source_dims.1)
            .map_err(|_| Error::CorruptModel("source dimensions too small for operator"))?;
        if grid != grid_dimensions(code_w, code_h, cell_size) {
            return Err(Error::CorruptModel("grid does not match source dimensions"));
        }

        let n_cells = grid.0 as usize * grid.1 as usize;
        let expected = HEADER_LEN + n_cells * CELL_BYTES;
        need(expected)?;
        if bytes.len() > expected {
            return Err(Error::CorruptModel("trailing bytes after cell data"));
        }
        let cells = bytes[HEADER_LEN..]
            .chunks_exact(CELL_BYTES)
            .map(|chunk| {
                let mut counts = [0u16; BINS];
                for (slot, raw) in counts.iter_mut().zip(chunk.chunks_exact(4)) {
                    let c = u32::from_le_bytes([raw[0], raw[1], raw[2], raw[3]]);
                    *slot = u16::try_from(c).map_err(|_| Error::CorruptModel("count exceeds cell area"))?;
                }
                CellHistogram::from_counts(counts).map_err(|_| Error::CorruptModel("empty cell"))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(params, cell_size, source_dims, cells)
            .map_err(|_| Error::CorruptModel("cell totals do not match cell areas"))
    }
}
