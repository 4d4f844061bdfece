//! Enhanced local binary patterns (E-LBP).
//!
//! E-LBP generalizes the classic 3×3 LBP operator: instead of comparing a
//! pixel with its eight neighbours, it compares the mean intensity of a
//! central point-set against the means of eight neighbouring point-sets
//! placed at a configurable range. Codes are histogrammed over a regular
//! grid of square cells and faces are matched with histogram intersection.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, datasets and
//! the command-line front end live in the `elbp` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod descriptor;
pub mod error;
pub mod image;
pub mod matcher;
pub mod model;
pub mod report;
pub mod texture;

pub use descriptor::{
    code_image, elbp_code, lbp_code, CodeImage, Margins, OperatorParams, PointSetTopology,
};
pub use error::{Error, Result};
pub use image::{crop_by_eyes, resize_bilinear, rgb_to_luma, EyeCrop, GrayImage};
pub use matcher::{identify, intersection_similarity, Fingerprint, Gallery, Match};
pub use model::{build_face_model, build_histograms, CellHistogram, FaceModel, BINS};
pub use report::{AccuracyReport, ProbeRecord};
pub use texture::{add_uniform_noise, gen_texture, TextureKind};
