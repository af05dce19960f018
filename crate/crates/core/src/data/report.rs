use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accuracy per fold with mean and sample standard deviation, in percent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldStats {
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

/// Confusion matrix and accuracies. Rows of `counts` and `percentages`
/// are predicted classes, columns are true classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub classes: Vec<String>,
    pub counts: Vec<Vec<usize>>,
    /// Each column normalized to sum to 100; columns of absent classes are 0.
    pub percentages: Vec<Vec<f64>>,
    pub total: usize,
    pub correct: usize,
    /// Overall accuracy in percent.
    pub accuracy: f64,
    /// Recall of each true class in percent, `None` when it never occurs.
    pub per_class_accuracy: Vec<Option<f64>>,
    pub folds: Option<FoldStats>,
}

fn index_of(classes: &[String], label: &str) -> Result<usize> {
    classes
        .iter()
        .position(|c| c == label)
        .ok_or_else(|| Error::InvalidInput(format!("label `{label}` is not in the class list")))
}

fn percent(num: usize, den: usize) -> f64 {
    100.0 * num as f64 / den as f64
}

/// Builds the report. With `fold_ids`, accuracy is also computed per fold
/// (folds numbered `0..=max`).
pub fn confusion_and_metrics(
    predictions: &[String],
    truths: &[String],
    classes: &[String],
    fold_ids: Option<&[usize]>,
) -> Result<MetricsReport> {
    if predictions.len() != truths.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: truths.len(),
        });
    }
    if let Some(f) = fold_ids {
        if f.len() != truths.len() {
            return Err(Error::LengthMismatch {
                left: f.len(),
                right: truths.len(),
            });
        }
    }
    let c = classes.len();
    let mut counts = vec![vec![0usize; c]; c];
    for (p, t) in predictions.iter().zip(truths) {
        counts[index_of(classes, p)?][index_of(classes, t)?] += 1;
    }
    let column_totals: Vec<usize> = (0..c).map(|j| (0..c).map(|i| counts[i][j]).sum()).collect();
    let percentages = (0..c)
        .map(|i| {
            (0..c)
                .map(|j| match column_totals[j] {
                    0 => 0.0,
                    tot => percent(counts[i][j], tot),
                })
                .collect()
        })
        .collect();
    let per_class_accuracy = (0..c)
        .map(|j| (column_totals[j] > 0).then(|| percent(counts[j][j], column_totals[j])))
        .collect();
    let total = truths.len();
    let correct = (0..c).map(|i| counts[i][i]).sum();
    let accuracy = if total == 0 {
        0.0
    } else {
        percent(correct, total)
    };

    let folds = fold_ids.map(|ids| {
        let nfolds = ids.iter().max().map_or(0, |m| m + 1);
        let mut hit = vec![0usize; nfolds];
        let mut seen = vec![0usize; nfolds];
        for ((p, t), &f) in predictions.iter().zip(truths).zip(ids) {
            seen[f] += 1;
            hit[f] += usize::from(p == t);
        }
        let accuracies: Vec<f64> = (0..nfolds)
            .filter(|&f| seen[f] > 0)
            .map(|f| percent(hit[f], seen[f]))
            .collect();
        let k = accuracies.len() as f64;
        let mean = accuracies.iter().sum::<f64>() / k;
        let std = if accuracies.len() > 1 {
            (accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
        } else {
            0.0
        };
        FoldStats {
            accuracies,
            mean,
            std,
        }
    });

    Ok(MetricsReport {
        classes: classes.to_vec(),
        counts,
        percentages,
        total,
        correct,
        accuracy,
        per_class_accuracy,
        folds,
    })
}

impl MetricsReport {
    /// Plain-text rendering with percentages to 2 decimals.
    pub fn to_text(&self) -> String {
        let width = self
            .classes
            .iter()
            .map(|c| c.chars().count())
            .max()
            .unwrap_or(0)
            .max(9);
        let mut s = String::new();
        let _ = writeln!(
            s,
            "confusion (rows = predicted, columns = true, % of column)"
        );
        let _ = write!(s, "{:>width$}", "");
        for c in &self.classes {
            let _ = write!(s, " {c:>width$}");
        }
        s.push('\n');
        for (i, row) in self.percentages.iter().enumerate() {
            let _ = write!(s, "{:>width$}", self.classes[i]);
            for v in row {
                let _ = write!(s, " {v:>width$.2}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "counts");
        for (i, row) in self.counts.iter().enumerate() {
            let _ = write!(s, "{:>width$}", self.classes[i]);
            for v in row {
                let _ = write!(s, " {v:>width$}");
            }
            s.push('\n');
        }
        let _ = writeln!(
            s,
            "accuracy {:.2}% ({}/{})",
            self.accuracy, self.correct, self.total
        );
        for (c, a) in self.classes.iter().zip(&self.per_class_accuracy) {
            match a {
                Some(a) => {
                    let _ = writeln!(s, "  {c}: {a:.2}%");
                }
                None => {
                    let _ = writeln!(s, "  {c}: n/a");
                }
            }
        }
        if let Some(f) = &self.folds {
            let per: Vec<String> = f.accuracies.iter().map(|a| format!("{a:.2}")).collect();
            let _ = writeln!(s, "folds {}: {}", f.accuracies.len(), per.join(" "));
            let _ = writeln!(s, "mean {:.2}% ± {:.2}", f.mean, f.std);
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
