use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use nalgebra::MatrixXx2;
use serde::{Deserialize, Serialize};

use super::{RawRecord, SequenceRecord};
use crate::error::{Error, Result};

/// On-disk layout of a sequence file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceFormat {
    /// One JSON record per line: `{"id", "label"?, "frames": [[[x, y], ...], ...]}`.
    Jsonl,
    /// Long table with header `id,label,frame,landmark,x,y`.
    Csv,
}

impl SequenceFormat {
    /// `.csv` means CSV, anything else line-delimited JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => SequenceFormat::Csv,
            _ => SequenceFormat::Jsonl,
        }
    }
}

/// A record that could not be loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedRecord {
    /// 1-based line of the record (its first row for CSV).
    pub line: usize,
    pub id: Option<String>,
    pub error: Error,
}

/// Loaded records in file order plus everything that was skipped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LoadOutcome {
    pub records: Vec<SequenceRecord>,
    pub skipped: Vec<SkippedRecord>,
}

pub fn load_sequences(path: &Path, format: Option<SequenceFormat>) -> Result<LoadOutcome> {
    let text = std::fs::read_to_string(path)?;
    let outcome = match format.unwrap_or_else(|| SequenceFormat::from_path(path)) {
        SequenceFormat::Jsonl => parse_jsonl(&text),
        SequenceFormat::Csv => parse_csv(&text),
    };
    if outcome.records.is_empty() && outcome.skipped.is_empty() {
        log::warn!("{} contains no records", path.display());
    }
    for s in &outcome.skipped {
        log::warn!(
            "{}:{}: skipped {}: {}",
            path.display(),
            s.line,
            s.id.as_deref().unwrap_or("record"),
            s.error
        );
    }
    Ok(outcome)
}

pub fn parse_jsonl(text: &str) -> LoadOutcome {
    let mut out = LoadOutcome::default();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = match serde_json::from_str(line) {
            Ok(raw) => raw,
            Err(e) => {
                out.skipped.push(SkippedRecord {
                    line: line_no,
                    id: None,
                    error: Error::Parse {
                        line: line_no,
                        message: e.to_string(),
                    },
                });
                continue;
            }
        };
        let id = raw.id.clone();
        match SequenceRecord::try_from(raw) {
            Ok(r) => out.records.push(r),
            Err(error) => out.skipped.push(SkippedRecord {
                line: line_no,
                id: Some(id),
                error,
            }),
        }
    }
    out
}

// Coordinates go through std's float formatting and parsing, which round
// trip exactly.
#[derive(Deserialize)]
struct CsvRow {
    id: String,
    label: Option<String>,
    frame: usize,
    landmark: usize,
    x: String,
    y: String,
}

fn coordinate(v: &str, line: usize) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            line,
            message: format!("invalid coordinate `{v}`"),
        })
}

struct CsvGroup {
    line: usize,
    label: Option<String>,
    rows: Vec<(usize, usize, f64, f64)>,
    error: Option<Error>,
}

fn assemble(id: &str, group: &CsvGroup) -> Result<SequenceRecord> {
    if let Some(e) = &group.error {
        return Err(e.clone());
    }
    let frames = group.rows.iter().map(|r| r.0).max().map_or(0, |m| m + 1);
    let mut counts = vec![0usize; frames];
    for r in &group.rows {
        counts[r.0] = counts[r.0].max(r.1 + 1);
    }
    let n = counts.first().copied().unwrap_or(0);
    if counts.iter().any(|&c| c != n) {
        return Err(Error::InconsistentFrameShape { id: id.to_string() });
    }
    let mut seen = vec![false; frames * n];
    let mut mats = vec![MatrixXx2::zeros(n); frames];
    for &(f, l, x, y) in &group.rows {
        if std::mem::replace(&mut seen[f * n + l], true) {
            return Err(Error::InvalidInput(format!(
                "record `{id}` repeats frame {f} landmark {l}"
            )));
        }
        mats[f][(l, 0)] = x;
        mats[f][(l, 1)] = y;
    }
    if let Some(pos) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidInput(format!(
            "record `{id}` is missing frame {} landmark {}",
            pos / n,
            pos % n
        )));
    }
    SequenceRecord::new(id.to_string(), group.label.clone(), mats)
}

/// Rows are grouped by `id` in order of first appearance; frame and
/// landmark indices must cover a full grid.
pub fn parse_csv(text: &str) -> LoadOutcome {
    let mut out = LoadOutcome::default();
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, CsvGroup> = HashMap::new();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = match reader.headers() {
        Ok(h) => h.clone(),
        Err(e) => {
            out.skipped.push(SkippedRecord {
                line: 1,
                id: None,
                error: Error::Parse {
                    line: 1,
                    message: e.to_string(),
                },
            });
            return out;
        }
    };
    let id_col = headers.iter().position(|h| h == "id");
    for result in reader.records() {
        let (line, parsed) = match result {
            Ok(rec) => {
                let line = rec.position().map_or(0, |p| p.line() as usize);
                let id = id_col.and_then(|c| rec.get(c)).map(str::to_string);
                let row = rec
                    .deserialize::<CsvRow>(Some(&headers))
                    .map_err(|e| e.to_string())
                    .and_then(|r| {
                        let x = coordinate(&r.x, line).map_err(|e| e.to_string())?;
                        let y = coordinate(&r.y, line).map_err(|e| e.to_string())?;
                        Ok((r, x, y))
                    });
                (line, row.map_err(|e| (id, e)))
            }
            Err(e) => (
                e.position().map_or(0, |p| p.line() as usize),
                Err((None, e.to_string())),
            ),
        };
        let (row, x, y) = match parsed {
            Ok(row) => row,
            Err((id, message)) => {
                let error = Error::Parse { line, message };
                match id.filter(|id| !id.is_empty()) {
                    Some(id) => {
                        let group = groups.entry(id.clone()).or_insert_with(|| {
                            order.push(id);
                            CsvGroup {
                                line,
                                label: None,
                                rows: Vec::new(),
                                error: None,
                            }
                        });
                        group.error.get_or_insert(error);
                    }
                    None => out.skipped.push(SkippedRecord {
                        line,
                        id: None,
                        error,
                    }),
                }
                continue;
            }
        };
        let label = row.label.filter(|l| !l.is_empty());
        let group = groups.entry(row.id.clone()).or_insert_with(|| {
            order.push(row.id.clone());
            CsvGroup {
                line,
                label: label.clone(),
                rows: Vec::new(),
                error: None,
            }
        });
        if group.rows.is_empty() && group.error.is_none() {
            group.label = label.clone();
        }
        if group.label != label && group.error.is_none() {
            group.error = Some(Error::InvalidInput(format!(
                "record `{}` has conflicting labels",
                row.id
            )));
        }
        group.rows.push((row.frame, row.landmark, x, y));
    }
    for id in order {
        let group = &groups[&id];
        match assemble(&id, group) {
            Ok(r) => out.records.push(r),
            Err(error) => out.skipped.push(SkippedRecord {
                line: group.line,
                id: Some(id),
                error,
            }),
        }
    }
    out.skipped.sort_by_key(|s| s.line);
    out
}

pub fn write_jsonl<W: Write>(records: &[SequenceRecord], mut w: W) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_csv<W: Write>(records: &[SequenceRecord], w: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    writer
        .write_record(["id", "label", "frame", "landmark", "x", "y"])
        .map_err(io)?;
    for r in records {
        let label = r.label().unwrap_or("");
        for (f, frame) in r.frames().iter().enumerate() {
            for (l, row) in frame.row_iter().enumerate() {
                let fields = [
                    r.id().to_string(),
                    label.to_string(),
                    f.to_string(),
                    l.to_string(),
                    row[0].to_string(),
                    row[1].to_string(),
                ];
                writer.write_record(&fields).map_err(io)?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}

/// Writes `records` to `path` in the given format.
pub fn save_sequences(
    path: &Path,
    records: &[SequenceRecord],
    format: SequenceFormat,
) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        SequenceFormat::Jsonl => write_jsonl(records, &mut buf)?,
        SequenceFormat::Csv => write_csv(records, &mut buf)?,
    }
    std::fs::write(path, buf)?;
    Ok(())
}
