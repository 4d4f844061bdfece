//! The `elbp` command-line tool.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad or inconsistent
//! flags), 2 for data errors (unreadable or invalid inputs). Diagnostics go
//! to stderr; results go to files or stdout.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use elbp_core::{
    add_uniform_noise, build_face_model, code_image, gen_texture, identify, OperatorParams,
    PointSetTopology, TextureKind,
};

use crate::error::Error;
use crate::eval::{self, Dataset};
use crate::imageio::{load_image, save_pgm};
use crate::manifest::{Manifest, ManifestEntry, Split};
use crate::modelio::save_model;

#[derive(Debug, Parser)]
#[command(name = "elbp", version, about = "Enhanced local binary patterns for face identification")]
pub struct Cli {
    /// Maximum number of worker threads (0 = one per CPU)
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct OperatorArgs {
    /// Neighbour point-set size (1, 4 or 9)
    #[arg(long, default_value_t = 4, value_parser = topology_size)]
    pub x: u32,
    /// Central point-set size (1, 4 or 9)
    #[arg(long, default_value_t = 9, value_parser = topology_size)]
    pub y: u32,
    /// Range: distance from the central set to the neighbour sets
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..=65535))]
    pub r: u32,
}

impl OperatorArgs {
    pub fn params(&self) -> OperatorParams {
        OperatorParams::from_sizes(self.x, self.y, self.r).expect("validated by clap")
    }
}

fn topology_size(s: &str) -> Result<u32, String> {
    match s.parse::<u32>() {
        Ok(v @ (1 | 4 | 9)) => Ok(v),
        _ => Err(format!("`{s}` is not a point-set size (expected 1, 4 or 9)")),
    }
}

fn cell_size(s: &str) -> Result<u32, String> {
    match s.parse::<u32>() {
        Ok(v) if (1..=elbp_core::model::MAX_CELL_SIZE).contains(&v) => Ok(v),
        _ => Err(format!("`{s}` is not a cell size (expected 1..=255)")),
    }
}

fn range_value(s: &str) -> Result<u32, String> {
    match s.parse::<u32>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err(format!("`{s}` is not a range (expected an integer ≥ 1)")),
    }
}

fn topology_pair(s: &str) -> Result<(PointSetTopology, PointSetTopology), String> {
    let (x, y) = s
        .split_once(['x', ':'])
        .ok_or_else(|| format!("`{s}` is not a topology pair like 4x9"))?;
    let parse = |v: &str| {
        topology_size(v.trim()).map(|n| PointSetTopology::from_size(n).expect("valid size"))
    };
    Ok((parse(x)?, parse(y)?))
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the E-LBP code map of an image as PGM
    Codes {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        op: OperatorArgs,
    },
    /// Build a face model file from an image
    BuildModel {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value_t = 10, value_parser = cell_size)]
        cell: u32,
    },
    /// Rank the gallery images of a manifest against one probe image
    Identify {
        /// Manifest whose gallery entries are enrolled
        #[arg(long)]
        gallery: PathBuf,
        #[arg(long)]
        probe: PathBuf,
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value_t = 10, value_parser = cell_size)]
        cell: u32,
        /// Number of ranked matches to print
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
        top: u32,
    },
    /// Rank-1 accuracy of a gallery/probe manifest
    Evaluate {
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value_t = 10, value_parser = cell_size)]
        cell: u32,
        /// Results CSV (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-probe detail CSV
        #[arg(long)]
        details: Option<PathBuf>,
    },
    /// Accuracy as a function of the cell size
    SweepCell {
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        op: OperatorArgs,
        /// Comma-separated cell sizes
        #[arg(long, value_delimiter = ',', value_parser = cell_size,
              default_value = "4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20")]
        sizes: Vec<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Accuracy as a function of the range, for several topology pairs
    SweepRange {
        #[arg(long)]
        manifest: PathBuf,
        /// Comma-separated neighbour×central pairs
        #[arg(long, value_delimiter = ',', value_parser = topology_pair,
              default_value = "4x4,4x9,9x4,9x9")]
        topologies: Vec<(PointSetTopology, PointSetTopology)>,
        /// Comma-separated ranges
        #[arg(long, value_delimiter = ',', value_parser = range_value,
              default_value = "1,2,3,4,5,6,7,8")]
        ranges: Vec<u32>,
        #[arg(long, default_value_t = 10, value_parser = cell_size)]
        cell: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic gallery/probe dataset with a manifest
    GenFixtures {
        /// Output directory (created if missing)
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
        subjects: u32,
        /// Gallery images per subject; extra ones are noisy variants
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        per_subject: u32,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
        width: u32,
        #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
        height: u32,
        /// Uniform noise amplitude added to probes
        #[arg(long, default_value_t = 4)]
        noise: u8,
        #[arg(long, default_value = "blobs")]
        kind: TextureKind,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Data(e)
    }
}

impl From<elbp_core::Error> for Failure {
    fn from(e: elbp_core::Error) -> Self {
        Self::Data(e.into())
    }
}

/// Parses `argv` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            eprint!("{e}");
            return 1;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: --threads: {e}");
            return 1;
        }
    };
    match pool.install(|| execute(cli.command)) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e).into())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn check_fits(params: &OperatorParams, dims: (u32, u32), flag_hint: &str) -> Result<(), Failure> {
    params.code_dimensions(dims.0, dims.1).map(|_| ()).map_err(|_| {
        Failure::Usage(format!(
            "{params} needs larger images than {}x{}; reduce {flag_hint}",
            dims.0, dims.1
        ))
    })
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Codes { input, out, op } => {
            let img = load_image(&input)?;
            let codes = code_image(&img, &op.params()).map_err(|source| Error::Build {
                path: input.clone(),
                source,
            })?;
            save_pgm(&out, &codes.to_gray_image()?)?;
        }
        Command::BuildModel {
            input,
            out,
            op,
            cell,
        } => {
            let img = load_image(&input)?;
            let model = build_face_model(&img, &op.params(), cell).map_err(|source| Error::Build {
                path: input.clone(),
                source,
            })?;
            save_model(&out, &model)?;
        }
        Command::Identify {
            gallery,
            probe,
            op,
            cell,
            top,
        } => {
            let params = op.params();
            let manifest = Manifest::load(&gallery)?;
            let entries: Vec<&ManifestEntry> = manifest.split(Split::Gallery).collect();
            let images = entries
                .iter()
                .map(|e| {
                    Ok(eval::LabeledImage {
                        path: e.path.clone(),
                        subject: e.subject.clone(),
                        image: load_image(&e.path)?,
                    })
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let probe_img = load_image(&probe)?;
            check_fits(&params, probe_img.dimensions(), "--r")?;
            let enrolled = eval::build_gallery(&images, &params, cell)?;
            let model = build_face_model(&probe_img, &params, cell)?;
            let ranked = identify(&model, &enrolled)?;
            let mut out = io::stdout().lock();
            let write = |out: &mut dyn Write| -> io::Result<()> {
                writeln!(out, "rank\tsubject\tscore\timage")?;
                for (rank, m) in ranked.iter().take(top as usize).enumerate() {
                    writeln!(
                        out,
                        "{}\t{}\t{:.6}\t{}",
                        rank + 1,
                        m.subject,
                        m.score,
                        images[m.index].path.display()
                    )?;
                }
                out.flush()
            };
            write(&mut out).map_err(|e| Error::io("<stdout>", e))?;
        }
        Command::Evaluate {
            manifest,
            op,
            cell,
            out,
            details,
        } => {
            let params = op.params();
            let dataset = Dataset::load(&Manifest::load(&manifest)?)?;
            check_fits(&params, dataset.dimensions(), "--r")?;
            let report = eval::evaluate_dataset(&dataset, &params, cell)?;
            let row = eval::SweepRow {
                params,
                cell_size: cell,
                accuracy_percent: report.accuracy_percent,
                total: report.total_probes,
                correct: report.correct_rank1,
            };
            eval::write_results_csv(output(out.as_deref())?, &[row])?;
            if let Some(path) = details {
                eval::write_details_csv(create(&path)?, &report)?;
            }
        }
        Command::SweepCell {
            manifest,
            op,
            sizes,
            out,
        } => {
            let params = op.params();
            let dataset = Dataset::load(&Manifest::load(&manifest)?)?;
            check_fits(&params, dataset.dimensions(), "--r")?;
            let rows = eval::sweep_cell_size(&dataset, &params, &sizes)?;
            eval::write_results_csv(output(out.as_deref())?, &rows)?;
        }
        Command::SweepRange {
            manifest,
            topologies,
            ranges,
            cell,
            out,
        } => {
            let dataset = Dataset::load(&Manifest::load(&manifest)?)?;
            for &(n, c) in &topologies {
                for &r in &ranges {
                    check_fits(&OperatorParams::new(n, c, r)?, dataset.dimensions(), "--ranges")?;
                }
            }
            let rows = eval::sweep_range(&dataset, &topologies, cell, &ranges)?;
            eval::write_results_csv(output(out.as_deref())?, &rows)?;
        }
        Command::GenFixtures {
            out,
            seed,
            subjects,
            per_subject,
            width,
            height,
            noise,
            kind,
        } => gen_fixtures(&out, seed, subjects, per_subject, (width, height), noise, kind)?,
    }
    Ok(())
}

/// Subject `s` is `gen_texture(seed + s)`; its first gallery image is the
/// clean texture, further gallery images and the probe carry seeded noise.
fn gen_fixtures(
    dir: &Path,
    seed: u64,
    subjects: u32,
    per_subject: u32,
    (width, height): (u32, u32),
    noise: u8,
    kind: TextureKind,
) -> Result<(), Failure> {
    for sub in ["gallery", "probe"] {
        let d = dir.join(sub);
        fs::create_dir_all(&d).map_err(|e| Error::io(&d, e))?;
    }
    let mut entries = Vec::new();
    let mut noise_seed = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut next_seed = || {
        noise_seed = noise_seed.wrapping_add(1);
        noise_seed
    };
    for s in 0..subjects {
        let subject = format!("s{s:03}");
        let clean = gen_texture(seed.wrapping_add(u64::from(s)), kind, width, height)?;
        for k in 0..per_subject {
            let img = if k == 0 {
                clean.clone()
            } else {
                add_uniform_noise(&clean, next_seed(), noise)
            };
            let path = dir.join("gallery").join(format!("{subject}_{k}.pgm"));
            save_pgm(&path, &img)?;
            entries.push(ManifestEntry {
                path,
                subject: subject.clone(),
                split: Split::Gallery,
            });
        }
        let path = dir.join("probe").join(format!("{subject}.pgm"));
        save_pgm(&path, &add_uniform_noise(&clean, next_seed(), noise))?;
        entries.push(ManifestEntry {
            path,
            subject,
            split: Split::Probe,
        });
    }
    let manifest = Manifest::from_entries(entries).expect("generated manifest is valid");
    let path = dir.join("manifest.tsv");
    let mut file = create(&path)?;
    manifest
        .write_tsv(&mut file, dir)
        .and_then(|()| file.flush())
        .map_err(|e| Error::io(&path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_recommended_configuration() {
        let cli = Cli::try_parse_from(["elbp", "evaluate", "--manifest", "m.tsv"]).unwrap();
        match cli.command {
            Command::Evaluate { op, cell, .. } => {
                assert_eq!(op.params(), OperatorParams::RECOMMENDED);
                assert_eq!(cell, 10);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn topology_pairs() {
        use PointSetTopology::*;
        assert_eq!(topology_pair("4x9").unwrap(), (Square2, Square3));
        assert_eq!(topology_pair("1:1").unwrap(), (Single, Single));
        assert!(topology_pair("4x5").is_err());
        assert!(topology_pair("49").is_err());
    }

    #[test]
    fn bad_flags_are_usage_errors() {
        assert_eq!(run(["elbp", "codes", "--in", "a", "--out", "b", "--x", "3"]), 1);
        assert_eq!(run(["elbp", "evaluate", "--manifest", "m", "--cell", "0"]), 1);
        assert_eq!(run(["elbp", "evaluate", "--manifest", "m", "--r", "0"]), 1);
        assert_eq!(run(["elbp", "frobnicate"]), 1);
        assert_eq!(run(["elbp", "--help"]), 0);
    }
}
