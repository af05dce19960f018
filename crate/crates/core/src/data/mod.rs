//! Landmark sequence files, a synthetic sequence generator and evaluation
//! reports.

mod io;
mod report;
mod synth;

pub use io::{
    load_sequences, parse_csv, parse_jsonl, save_sequences, write_csv, write_jsonl, LoadOutcome,
    SequenceFormat, SkippedRecord,
};
pub use report::{confusion_and_metrics, FoldStats, MetricsReport};
pub use synth::{synth_generate, SynthSpec};

use nalgebra::MatrixXx2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{build_trajectory, Trajectory};

/// A raw landmark sequence: uncentered n×2 frames sharing the same n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRecord", into = "RawRecord")]
pub struct SequenceRecord {
    id: String,
    label: Option<String>,
    frames: Vec<MatrixXx2<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawRecord {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    frames: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<RawRecord> for SequenceRecord {
    type Error = Error;
    fn try_from(raw: RawRecord) -> Result<Self> {
        let frames = raw
            .frames
            .iter()
            .map(|f| MatrixXx2::from_fn(f.len(), |i, j| f[i][j]))
            .collect();
        SequenceRecord::new(raw.id, raw.label, frames)
    }
}

impl From<SequenceRecord> for RawRecord {
    fn from(r: SequenceRecord) -> Self {
        let frames = r
            .frames
            .iter()
            .map(|f| f.row_iter().map(|row| [row[0], row[1]]).collect())
            .collect();
        RawRecord {
            id: r.id,
            label: r.label,
            frames,
        }
    }
}

impl SequenceRecord {
    pub fn new(id: String, label: Option<String>, frames: Vec<MatrixXx2<f64>>) -> Result<Self> {
        if frames.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "record `{id}` has {} frame(s), need at least 2",
                frames.len()
            )));
        }
        let n = frames[0].nrows();
        if frames.iter().any(|f| f.nrows() != n) {
            return Err(Error::InconsistentFrameShape { id });
        }
        if frames.iter().any(|f| f.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidInput(format!(
                "record `{id}` has non-finite coordinates"
            )));
        }
        Ok(SequenceRecord { id, label, frames })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn frames(&self) -> &[MatrixXx2<f64>] {
        &self.frames
    }

    /// Landmarks per frame.
    pub fn n(&self) -> usize {
        self.frames[0].nrows()
    }

    pub fn to_trajectory(&self) -> Result<Trajectory> {
        build_trajectory(&self.frames, Some(self.id.clone()), self.label.clone())
    }
}
