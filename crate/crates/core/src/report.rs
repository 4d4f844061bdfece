//! Rank-1 identification results.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;
use crate::matcher::Gallery;
use crate::model::FaceModel;

/// Outcome of identifying one probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRecord {
    pub probe: String,
    pub true_subject: String,
    pub predicted_subject: String,
    pub score: f64,
}

impl ProbeRecord {
    /// Identifies `model` against `gallery` and records the rank-1 answer.
    pub fn classify(
        probe: impl Into<String>,
        true_subject: impl Into<String>,
        model: &FaceModel,
        gallery: &Gallery,
    ) -> Result<Self> {
        let best = gallery.nearest(model)?;
        Ok(Self {
            probe: probe.into(),
            true_subject: true_subject.into(),
            predicted_subject: best.subject.into(),
            score: best.score,
        })
    }

    pub fn is_correct(&self) -> bool {
        self.true_subject == self.predicted_subject
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    pub total_probes: usize,
    pub correct_rank1: usize,
    /// `100 · correct / total`; 0 when there are no probes.
    pub accuracy_percent: f64,
    pub records: Vec<ProbeRecord>,
}

impl AccuracyReport {
    pub fn from_records(records: Vec<ProbeRecord>) -> Self {
        let total_probes = records.len();
        let correct_rank1 = records.iter().filter(|r| r.is_correct()).count();
        let accuracy_percent = if total_probes == 0 {
            0.0
        } else {
            100.0 * correct_rank1 as f64 / total_probes as f64
        };
        Self {
            total_probes,
            correct_rank1,
            accuracy_percent,
            records,
        }
    }
}
