use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 3] = ["shot_id", "n1", "n2"];

/// Counts registered in one shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CountRecord {
    pub shot_id: u64,
    pub n1: u64,
    pub n2: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    /// Declared detection efficiency.
    pub eta: f64,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for Metadata {
    fn default() -> Self {
        Self {
            eta: 1.0,
            source: String::new(),
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountDataset {
    records: Vec<CountRecord>,
    pub metadata: Metadata,
}

impl CountDataset {
    pub fn new(records: Vec<CountRecord>, metadata: Metadata) -> Result<Self> {
        let mut seen = HashSet::with_capacity(records.len());
        for r in &records {
            if !seen.insert(r.shot_id) {
                return Err(Error::Config(format!("duplicate shot_id {}", r.shot_id)));
            }
        }
        Ok(Self { records, metadata })
    }

    /// Records with consecutive shot ids starting at zero.
    pub fn from_counts(counts: &[(u64, u64)], metadata: Metadata) -> Self {
        let records = counts
            .iter()
            .enumerate()
            .map(|(k, &(n1, n2))| CountRecord {
                shot_id: k as u64,
                n1,
                n2,
            })
            .collect();
        Self { records, metadata }
    }

    pub fn records(&self) -> &[CountRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn histogram(&self) -> Histogram {
        Histogram::from_records(&self.records)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        out.write_record(CSV_HEADER).map_err(csv_io)?;
        for r in &self.records {
            out.serialize(r).map_err(csv_io)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Parse the CSV body; metadata is supplied separately.
    pub fn read_csv<R: Read>(r: R, metadata: Metadata) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::None)
            .from_reader(r);
        let header = reader.headers().map_err(|e| format_error(&e, 1))?.clone();
        if header.iter().collect::<Vec<_>>() != CSV_HEADER {
            return Err(Error::Format {
                line: 1,
                message: format!("expected header `{}`", CSV_HEADER.join(",")),
            });
        }
        let mut records = Vec::new();
        let mut seen = HashSet::new();
        for (k, row) in reader.deserialize::<CountRecord>().enumerate() {
            let fallback = k as u64 + 2;
            let rec = row.map_err(|e| format_error(&e, fallback))?;
            if !seen.insert(rec.shot_id) {
                return Err(Error::Format {
                    line: fallback,
                    message: format!("duplicate shot_id {}", rec.shot_id),
                });
            }
            records.push(rec);
        }
        Ok(Self { records, metadata })
    }

    /// Write `<path>` and its metadata sidecar.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))?;
        let meta = serde_json::to_string_pretty(&self.metadata)?;
        std::fs::write(sidecar_path(path), meta + "\n")?;
        Ok(())
    }

    /// Read `<path>`; the sidecar is used when present, otherwise `eta = 1`.
    pub fn load(path: &Path) -> Result<Self> {
        let meta_path = sidecar_path(path);
        let metadata = if meta_path.exists() {
            serde_json::from_str(&std::fs::read_to_string(&meta_path)?)?
        } else {
            Metadata {
                source: path.display().to_string(),
                ..Metadata::default()
            }
        };
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file), metadata)
    }
}

/// `data.csv` -> `data.meta.json`
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

fn csv_io(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Format {
            line: 0,
            message: format!("{other:?}"),
        },
    }
}

fn format_error(e: &csv::Error, fallback: u64) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(fallback);
    let message = match e.kind() {
        csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            format!("expected {expected_len} fields, found {len}")
        }
        _ => e.to_string(),
    };
    Error::Format { line, message }
}

/// Distinct `(n1, n2)` outcomes with their multiplicities, in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bins: Vec<((u64, u64), u64)>,
}

impl Histogram {
    pub fn from_records(records: &[CountRecord]) -> Self {
        let mut map = BTreeMap::new();
        for r in records {
            *map.entry((r.n1, r.n2)).or_insert(0u64) += 1;
        }
        Self {
            bins: map.into_iter().collect(),
        }
    }

    pub fn shots(&self) -> u64 {
        self.bins.iter().map(|b| b.1).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let d = CountDataset::from_counts(&[(0, 1), (3, 2), (0, 0)], Metadata::default());
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "shot_id,n1,n2\n0,0,1\n1,3,2\n2,0,0\n");
        let back = CountDataset::read_csv(&buf[..], Metadata::default()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn malformed_rows_report_line() {
        let text = "shot_id,n1,n2\n0,1,1\n1,-2,0\n";
        match CountDataset::read_csv(text.as_bytes(), Metadata::default()) {
            Err(Error::Format { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "shot_id,n1,n2\n0,1,1\n1,2\n";
        assert!(matches!(
            CountDataset::read_csv(text.as_bytes(), Metadata::default()),
            Err(Error::Format { line: 3, .. })
        ));
        let text = "shot,n1,n2\n0,1,1\n";
        assert!(matches!(
            CountDataset::read_csv(text.as_bytes(), Metadata::default()),
            Err(Error::Format { line: 1, .. })
        ));
        let text = "shot_id,n1,n2\n0,1,1\n0,2,2\n";
        assert!(matches!(
            CountDataset::read_csv(text.as_bytes(), Metadata::default()),
            Err(Error::Format { line: 3, .. })
        ));
    }

    #[test]
    fn histogram_counts() {
        let d = CountDataset::from_counts(&[(1, 1), (0, 2), (1, 1)], Metadata::default());
        let h = d.histogram();
        assert_eq!(h.bins, vec![((0, 2), 1), ((1, 1), 2)]);
        assert_eq!(h.shots(), 3);
    }
}
