//! Closed-set gallery/probe experiments and parameter sweeps.
//!
//! Images are decoded once into a [`Dataset`] and reused across every
//! configuration of a sweep. Model building and probe identification run on
//! the current rayon pool; results are always assembled in manifest order,
//! so reports do not depend on the number of threads.

use std::io::Write;
use std::path::PathBuf;

use elbp_core::{
    build_face_model, AccuracyReport, FaceModel, Gallery, GrayImage, OperatorParams,
    PointSetTopology, ProbeRecord,
};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::imageio::load_image;
use crate::manifest::{Manifest, Split};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledImage {
    pub path: PathBuf,
    pub subject: String,
    pub image: GrayImage,
}

/// Decoded gallery and probe images sharing one size.
#[derive(Debug, Clone)]
pub struct Dataset {
    gallery: Vec<LabeledImage>,
    probes: Vec<LabeledImage>,
}

impl Dataset {
    pub fn load(manifest: &Manifest) -> Result<Self> {
        let load = |split| -> Result<Vec<LabeledImage>> {
            let entries: Vec<_> = manifest.split(split).collect();
            entries
                .par_iter()
                .map(|e| {
                    Ok(LabeledImage {
                        path: e.path.clone(),
                        subject: e.subject.clone(),
                        image: load_image(&e.path)?,
                    })
                })
                .collect()
        };
        Self::from_images(load(Split::Gallery)?, load(Split::Probe)?)
    }

    pub fn from_images(gallery: Vec<LabeledImage>, probes: Vec<LabeledImage>) -> Result<Self> {
        let first = gallery.first().ok_or(Error::EmptySplit("gallery"))?;
        if probes.is_empty() {
            return Err(Error::EmptySplit("probe"));
        }
        let expected = first.image.dimensions();
        if let Some(odd) = gallery
            .iter()
            .chain(&probes)
            .find(|l| l.image.dimensions() != expected)
        {
            return Err(Error::DimensionMismatch {
                path: odd.path.clone(),
                expected,
                found: odd.image.dimensions(),
            });
        }
        Ok(Self { gallery, probes })
    }

    pub fn gallery(&self) -> &[LabeledImage] {
        &self.gallery
    }

    pub fn probes(&self) -> &[LabeledImage] {
        &self.probes
    }

    /// Common image size.
    pub fn dimensions(&self) -> (u32, u32) {
        self.gallery[0].image.dimensions()
    }
}

fn build(item: &LabeledImage, params: &OperatorParams, cell_size: u32) -> Result<FaceModel> {
    build_face_model(&item.image, params, cell_size).map_err(|source| Error::Build {
        path: item.path.clone(),
        source,
    })
}

/// Enrolls every gallery image individually, in dataset order.
pub fn build_gallery(
    images: &[LabeledImage],
    params: &OperatorParams,
    cell_size: u32,
) -> Result<Gallery> {
    let models = images
        .par_iter()
        .map(|item| build(item, params, cell_size))
        .collect::<Result<Vec<_>>>()?;
    let mut gallery = Gallery::new();
    for (item, model) in images.iter().zip(models) {
        gallery.enroll(item.subject.clone(), model)?;
    }
    Ok(gallery)
}

/// Rank-1 identification accuracy of the probes against the gallery.
pub fn evaluate_dataset(
    dataset: &Dataset,
    params: &OperatorParams,
    cell_size: u32,
) -> Result<AccuracyReport> {
    let gallery = build_gallery(&dataset.gallery, params, cell_size)?;
    let records = dataset
        .probes
        .par_iter()
        .map(|probe| {
            let model = build(probe, params, cell_size)?;
            Ok(ProbeRecord::classify(
                probe.path.display().to_string(),
                probe.subject.clone(),
                &model,
                &gallery,
            )?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AccuracyReport::from_records(records))
}

pub fn evaluate(
    manifest: &Manifest,
    params: &OperatorParams,
    cell_size: u32,
) -> Result<AccuracyReport> {
    evaluate_dataset(&Dataset::load(manifest)?, params, cell_size)
}

/// One configuration of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub params: OperatorParams,
    pub cell_size: u32,
    pub accuracy_percent: f64,
    pub total: usize,
    pub correct: usize,
}

impl SweepRow {
    fn new(params: OperatorParams, cell_size: u32, report: &AccuracyReport) -> Self {
        Self {
            params,
            cell_size,
            accuracy_percent: report.accuracy_percent,
            total: report.total_probes,
            correct: report.correct_rank1,
        }
    }
}

pub fn evaluate_row(dataset: &Dataset, params: &OperatorParams, cell_size: u32) -> Result<SweepRow> {
    let report = evaluate_dataset(dataset, params, cell_size)?;
    Ok(SweepRow::new(*params, cell_size, &report))
}

/// Accuracy for each cell size, in the given order.
pub fn sweep_cell_size(
    dataset: &Dataset,
    params: &OperatorParams,
    sizes: &[u32],
) -> Result<Vec<SweepRow>> {
    if sizes.is_empty() {
        return Err(elbp_core::Error::InvalidArgument("cell-size sweep needs at least one size").into());
    }
    sizes
        .iter()
        .map(|&size| evaluate_row(dataset, params, size))
        .collect()
}

/// Accuracy for every (topology pair, range) combination; topologies vary
/// slowest.
pub fn sweep_range(
    dataset: &Dataset,
    topologies: &[(PointSetTopology, PointSetTopology)],
    cell_size: u32,
    ranges: &[u32],
) -> Result<Vec<SweepRow>> {
    if topologies.is_empty() || ranges.is_empty() {
        return Err(elbp_core::Error::InvalidArgument(
            "range sweep needs at least one topology and one range",
        )
        .into());
    }
    let mut rows = Vec::with_capacity(topologies.len() * ranges.len());
    for &(neighbor, central) in topologies {
        for &r in ranges {
            let params = OperatorParams::new(neighbor, central, r)?;
            rows.push(evaluate_row(dataset, &params, cell_size)?);
        }
    }
    Ok(rows)
}

/// Short CSV-safe name of an operator: `lbp` or `elbp-x-y-r`.
pub fn config_label(params: &OperatorParams) -> String {
    if params.is_classic() {
        "lbp".to_string()
    } else {
        format!(
            "elbp-{}-{}-{}",
            params.neighbor().size(),
            params.central().size(),
            params.range()
        )
    }
}

pub const RESULTS_HEADER: [&str; 8] = [
    "config",
    "cell_size",
    "x",
    "y",
    "r",
    "accuracy_percent",
    "total",
    "correct",
];

pub fn write_results_csv(out: impl Write, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for row in rows {
        let p = &row.params;
        w.write_record([
            config_label(p),
            row.cell_size.to_string(),
            p.neighbor().size().to_string(),
            p.central().size().to_string(),
            p.range().to_string(),
            format!("{:.2}", row.accuracy_percent),
            row.total.to_string(),
            row.correct.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Per-probe outcomes in manifest order.
pub fn write_details_csv(out: impl Write, report: &AccuracyReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["path", "true_subject", "predicted_subject", "score", "correct"])?;
    for r in &report.records {
        w.write_record([
            r.probe.as_str(),
            &r.true_subject,
            &r.predicted_subject,
            &format!("{:.6}", r.score),
            if r.is_correct() { "1" } else { "0" },
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use elbp_core::{add_uniform_noise, gen_texture, TextureKind};

    fn labeled(seed: u64, subject: &str, noise: Option<u64>) -> LabeledImage {
        let img = gen_texture(seed, TextureKind::Blobs, 48, 48).unwrap();
        LabeledImage {
            path: PathBuf::from(format!("{subject}-{seed}-{noise:?}.pgm")),
            subject: subject.to_string(),
            image: noise.map_or(img.clone(), |n| add_uniform_noise(&img, n, 4)),
        }
    }

    fn dataset(n: u64) -> Dataset {
        let gallery = (0..n).map(|s| labeled(s, &format!("s{s}"), None)).collect();
        let probes = (0..n).map(|s| labeled(s, &format!("s{s}"), Some(100 + s))).collect();
        Dataset::from_images(gallery, probes).unwrap()
    }

    #[test]
    fn self_match_is_perfect() {
        let gallery: Vec<_> = (0..5).map(|s| labeled(s, &format!("s{s}"), None)).collect();
        let ds = Dataset::from_images(gallery.clone(), gallery).unwrap();
        let report = evaluate_dataset(&ds, &OperatorParams::RECOMMENDED, 10).unwrap();
        assert_eq!(report.accuracy_percent, 100.0);
        assert!(report.records.iter().all(|r| r.score == 1.0));
    }

    #[test]
    fn records_follow_probe_order() {
        let ds = dataset(6);
        let report = evaluate_dataset(&ds, &OperatorParams::RECOMMENDED, 10).unwrap();
        let subjects: Vec<_> = report.records.iter().map(|r| r.true_subject.as_str()).collect();
        assert_eq!(subjects, ["s0", "s1", "s2", "s3", "s4", "s5"]);
    }

    #[test]
    fn dimension_mismatch() {
        let mut odd = labeled(1, "s1", None);
        odd.image = gen_texture(1, TextureKind::Blobs, 40, 48).unwrap();
        let err = Dataset::from_images(vec![labeled(0, "s0", None)], vec![odd]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { found: (40, 48), .. }));
    }

    #[test]
    fn sweep_shapes() {
        let ds = dataset(4);
        let rows = sweep_cell_size(&ds, &OperatorParams::RECOMMENDED, &[10, 8, 10]).unwrap();
        assert_eq!(rows.iter().map(|r| r.cell_size).collect::<Vec<_>>(), [10, 8, 10]);
        assert_eq!(rows[0], rows[2]);
        let single = evaluate_row(&ds, &OperatorParams::RECOMMENDED, 10).unwrap();
        assert_eq!(rows[0], single);

        use PointSetTopology::*;
        let rows = sweep_range(&ds, &[(Square2, Square3), (Square2, Square2)], 10, &[1, 2, 3]).unwrap();
        let keys: Vec<_> = rows
            .iter()
            .map(|r| (r.params.central().size(), r.params.range()))
            .collect();
        assert_eq!(keys, [(9, 1), (9, 2), (9, 3), (4, 1), (4, 2), (4, 3)]);
        assert!(sweep_range(&ds, &[], 10, &[1]).is_err());
        assert!(sweep_cell_size(&ds, &OperatorParams::RECOMMENDED, &[]).is_err());
    }

    #[test]
    fn results_csv_format() {
        let rows = vec![SweepRow {
            params: OperatorParams::RECOMMENDED,
            cell_size: 10,
            accuracy_percent: 200.0 / 3.0,
            total: 3,
            correct: 2,
        }];
        let mut out = Vec::new();
        write_results_csv(&mut out, &rows).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "config,cell_size,x,y,r,accuracy_percent,total,correct\nelbp-4-9-5,10,4,9,5,66.67,3,2\n"
        );
        assert_eq!(config_label(&OperatorParams::CLASSIC_LBP), "lbp");
    }
}
