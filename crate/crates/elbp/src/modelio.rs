use std::fs;
use std::path::Path;

use elbp_core::FaceModel;

use crate::error::{Error, Result};

pub fn save_model(path: impl AsRef<Path>, model: &FaceModel) -> Result<()> {
    let path = path.as_ref();
    let bytes = model.to_bytes().map_err(|source| Error::Model {
        path: path.to_path_buf(),
        source,
    })?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<FaceModel> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    FaceModel::from_bytes(&bytes).map_err(|source| Error::Model {
        path: path.to_path_buf(),
        source,
    })
}
