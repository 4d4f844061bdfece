//! Dataset manifests: tab-separated `path  subject  split` lines.
//!
//! Relative paths are resolved against the manifest's directory. Lines
//! starting with `#` and blank lines are skipped. Every probe subject must
//! also have at least one gallery image.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, ManifestError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Gallery,
    Probe,
}

impl FromStr for Split {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "gallery" => Ok(Self::Gallery),
            "probe" => Ok(Self::Probe),
            _ => Err(()),
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gallery => "gallery",
            Self::Probe => "probe",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub subject: String,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    entries: Vec<ManifestEntry>,
}

impl Manifest {
    /// Validates a list of entries. Errors report 1-based entry positions
    /// as line numbers.
    pub fn from_entries(entries: Vec<ManifestEntry>) -> Result<Self, ManifestError> {
        let lines: Vec<u64> = (1..=entries.len() as u64).collect();
        Self::validate(entries, &lines)
    }

    fn validate(entries: Vec<ManifestEntry>, lines: &[u64]) -> Result<Self, ManifestError> {
        let mut paths = HashSet::new();
        for (entry, &line) in entries.iter().zip(lines) {
            if !paths.insert(entry.path.as_path()) {
                return Err(ManifestError::DuplicatePath {
                    line,
                    path: entry.path.clone(),
                });
            }
        }
        let gallery: HashSet<&str> = entries
            .iter()
            .filter(|e| e.split == Split::Gallery)
            .map(|e| e.subject.as_str())
            .collect();
        if gallery.is_empty() {
            return Err(ManifestError::NoGallery);
        }
        for (entry, &line) in entries.iter().zip(lines) {
            if entry.split == Split::Probe && !gallery.contains(entry.subject.as_str()) {
                return Err(ManifestError::UnseenSubject {
                    line,
                    subject: entry.subject.clone(),
                });
            }
        }
        Ok(Self { entries })
    }

    /// Parses manifest text; relative paths are joined onto `base_dir`.
    pub fn parse(reader: impl Read, base_dir: &Path) -> Result<Self, ManifestError> {
        let mut csv = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .has_headers(false)
            .flexible(true)
            .quoting(false)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut entries = Vec::new();
        let mut lines = Vec::new();
        for record in csv.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != 3 {
                return Err(ManifestError::Columns {
                    line,
                    found: record.len(),
                });
            }
            let field = |i: usize, name: &'static str| {
                let v = record[i].trim();
                if v.is_empty() {
                    Err(ManifestError::EmptyField { line, field: name })
                } else {
                    Ok(v)
                }
            };
            let path = Path::new(field(0, "path")?);
            let subject = field(1, "subject")?.to_string();
            let token = field(2, "split")?;
            let split = token.parse().map_err(|()| ManifestError::UnknownSplit {
                line,
                token: token.to_string(),
            })?;
            entries.push(ManifestEntry {
                path: base_dir.join(path),
                subject,
                split,
            });
            lines.push(line);
        }
        Self::validate(entries, &lines)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        Self::parse(file, base).map_err(|source| Error::Manifest {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    /// Writes the manifest as TSV, with paths relative to `base_dir` where
    /// possible.
    pub fn write_tsv(&self, mut out: impl std::io::Write, base_dir: &Path) -> std::io::Result<()> {
        for e in &self.entries {
            let path = e.path.strip_prefix(base_dir).unwrap_or(&e.path);
            writeln!(out, "{}\t{}\t{}", path.display(), e.subject, e.split)?;
        }
        Ok(())
    }
}
