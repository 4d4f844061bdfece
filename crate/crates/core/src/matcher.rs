//! Histogram-intersection similarity and nearest-neighbour identification.

use alloc::string::String;
use alloc::vec::Vec;

use crate::descriptor::OperatorParams;
use crate::error::{Error, Result};
use crate::model::{CellHistogram, FaceModel};

/// Everything two models must share to be comparable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    pub params: OperatorParams,
    pub cell_size: u32,
    pub source_dims: (u32, u32),
}

impl FaceModel {
    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint {
            params: *self.params(),
            cell_size: self.cell_size(),
            source_dims: self.source_dims(),
        }
    }
}

/// `Σ_bins min(a_i / |a|, b_i / |b|)` evaluated on integer counts.
fn cell_intersection(a: &CellHistogram, b: &CellHistogram) -> f64 {
    let (na, nb) = (a.total(), b.total());
    if na == nb {
        let overlap: u32 = a
            .counts()
            .iter()
            .zip(b.counts())
            .map(|(&x, &y)| u32::from(x.min(y)))
            .sum();
        f64::from(overlap) / f64::from(na)
    } else {
        let (na, nb) = (u64::from(na), u64::from(nb));
        let overlap: u64 = a
            .counts()
            .iter()
            .zip(b.counts())
            .map(|(&x, &y)| (u64::from(x) * nb).min(u64::from(y) * na))
            .sum();
        overlap as f64 / (na * nb) as f64
    }
}

/// Mean over cells of the intersection of normalized cell histograms.
/// Lies in [0, 1]; 1 for identical models.
pub fn intersection_similarity(a: &FaceModel, b: &FaceModel) -> Result<f64> {
    if a.fingerprint() != b.fingerprint() {
        return Err(Error::IncompatibleModels);
    }
    let sum: f64 = a
        .cells()
        .iter()
        .zip(b.cells())
        .map(|(x, y)| cell_intersection(x, y))
        .sum();
    Ok(sum / a.cells().len() as f64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GalleryEntry {
    pub subject: String,
    pub model: FaceModel,
}

/// Enrolled face models in insertion order. A subject may appear several
/// times.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Gallery {
    entries: Vec<GalleryEntry>,
}

impl Gallery {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn enroll(&mut self, subject: impl Into<String>, model: FaceModel) -> Result<()> {
        let subject = subject.into();
        if subject.is_empty() {
            return Err(Error::EmptySubject);
        }
        if let Some(fp) = self.fingerprint() {
            if fp != model.fingerprint() {
                return Err(Error::IncompatibleModels);
            }
        }
        self.entries.push(GalleryEntry { subject, model });
        Ok(())
    }

    pub fn entries(&self) -> &[GalleryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Shared fingerprint of all entries, `None` while empty.
    pub fn fingerprint(&self) -> Option<Fingerprint> {
        self.entries.first().map(|e| e.model.fingerprint())
    }

    fn check_probe(&self, probe: &FaceModel) -> Result<()> {
        match self.fingerprint() {
            None => Err(Error::EmptyGallery),
            Some(fp) if fp != probe.fingerprint() => Err(Error::IncompatibleModels),
            Some(_) => Ok(()),
        }
    }

    /// Rank-1 entry for `probe`; on equal scores the earliest enrolled wins.
    pub fn nearest(&self, probe: &FaceModel) -> Result<Match<'_>> {
        self.check_probe(probe)?;
        let mut best: Option<Match<'_>> = None;
        for (index, entry) in self.entries.iter().enumerate() {
            let score = intersection_similarity(probe, &entry.model)?;
            if best.as_ref().is_none_or(|b| score > b.score) {
                best = Some(Match {
                    index,
                    subject: &entry.subject,
                    score,
                });
            }
        }
        Ok(best.expect("gallery is not empty"))
    }
}

/// One scored gallery image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Match<'a> {
    /// Position of the entry in the gallery.
    pub index: usize,
    pub subject: &'a str,
    pub score: f64,
}

/// Scores every gallery image against `probe`, best first. Equal scores keep
/// gallery insertion order.
pub fn identify<'g>(probe: &FaceModel, gallery: &'g Gallery) -> Result<Vec<Match<'g>>> {
    gallery.check_probe(probe)?;
    let mut ranked = gallery
        .entries
        .iter()
        .enumerate()
        .map(|(index, entry)| {
            Ok(Match {
                index,
                subject: &entry.subject,
                score: intersection_similarity(probe, &entry.model)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ok(ranked)
}
