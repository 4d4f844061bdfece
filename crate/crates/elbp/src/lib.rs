//! Std companion to [`elbp_core`]: PGM/PNG decoding, face-model files,
//! dataset manifests, gallery/probe evaluation, parameter sweeps with CSV
//! output and the `elbp` command-line tool.

pub mod cli;
pub mod error;
pub mod eval;
pub mod imageio;
pub mod manifest;
pub mod modelio;
pub mod pgm;

pub use elbp_core;
pub use error::{Error, ImageError, ManifestError, Result};
pub use eval::{evaluate, sweep_cell_size, sweep_range, Dataset, SweepRow};
pub use imageio::{decode_image, load_image, save_pgm};
pub use manifest::{Manifest, ManifestEntry, Split};
pub use modelio::{load_model, save_model};
