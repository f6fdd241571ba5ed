//! Scoring found links against ground truth.

use std::fmt;

use serde::Serialize;

use crate::record::LinkSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn new(tp: usize, fp: usize, fn_: usize) -> Self {
        ConfusionCounts { tp, fp, fn_ }
    }
}

/// Membership-only comparison; link probabilities are ignored.
pub fn confusion_counts(found: &LinkSet, truth: &LinkSet) -> ConfusionCounts {
    let tp = found.keys().filter(|k| truth.contains_key(k)).count();
    ConfusionCounts {
        tp,
        fp: found.len() - tp,
        fn_: truth.len() - tp,
    }
}

/// `tp / (tp + fp)`, or 1.0 when nothing was asserted.
pub fn precision(c: ConfusionCounts) -> f64 {
    ratio(c.tp, c.tp + c.fp)
}

/// `tp / (tp + fn)`, or 1.0 when there is nothing to find.
pub fn recall(c: ConfusionCounts) -> f64 {
    ratio(c.tp, c.tp + c.fn_)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean of precision and recall; 0.0 when both are zero.
pub fn f_measure(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvaluationReport {
    #[serde(flatten)]
    pub counts: ConfusionCounts,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

impl EvaluationReport {
    pub fn from_counts(counts: ConfusionCounts) -> Self {
        let p = precision(counts);
        let r = recall(counts);
        EvaluationReport {
            counts,
            precision: p,
            recall: r,
            f_measure: f_measure(p, r),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

pub fn evaluate(found: &LinkSet, truth: &LinkSet) -> EvaluationReport {
    EvaluationReport::from_counts(confusion_counts(found, truth))
}

/// Percentage truncated (not rounded) to one decimal place.
pub fn percent_1dp(x: f64) -> String {
    // nudge before flooring so 0.3 -> 30.0 rather than 29.9
    let tenths = (x * 1000.0 + 1e-6).floor();
    format!("{:.1}", tenths / 10.0)
}

impl fmt::Display for EvaluationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.counts;
        writeln!(f, "true positives:  {}", c.tp)?;
        writeln!(f, "false positives: {}", c.fp)?;
        writeln!(f, "false negatives: {}", c.fn_)?;
        writeln!(
            f,
            "precision: {:.5} ({}%)",
            self.precision,
            percent_1dp(self.precision)
        )?;
        writeln!(
            f,
            "recall:    {:.5} ({}%)",
            self.recall,
            percent_1dp(self.recall)
        )?;
        write!(
            f,
            "f-measure: {:.5} ({}%)",
            self.f_measure,
            percent_1dp(self.f_measure)
        )
    }
}
