//! Confusion matrix at a rank cut and the scalar metrics derived from it.
//!
//! Everything is computed from integer counts; conversion to `f64` happens
//! only in the final division.

use serde::Serialize;
use thiserror::Error;

use crate::ranking::Ranking;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("cut {cut} outside 0..={n}")]
    CutOutOfRange { cut: usize, n: usize },
    #[error("empty population")]
    EmptyPopulation,
    #[error("no positive ground-truth records")]
    EmptyPositiveClass,
    #[error("no negative ground-truth records")]
    EmptyNegativeClass,
    #[error("no records predicted positive")]
    NoPredictedPositives,
    #[error("F1 undefined: precision and recall are both zero or undefined")]
    UndefinedF1,
    #[error("E-measure undefined: {0}")]
    UndefinedEMeasure(String),
}

/// True/false positive/negative counts at one cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

/// Labels ranks `1..=cut` as class 1 and the rest as class 2.
pub fn confusion_at_cut(r: &Ranking, cut: usize) -> Result<ConfusionCounts, MetricError> {
    let n = r.len();
    if cut > n {
        return Err(MetricError::CutOutOfRange { cut, n });
    }
    let tp = r.labels().take(cut).filter(|l| l.is_positive()).count() as u64;
    let fp = cut as u64 - tp;
    Ok(ConfusionCounts {
        tp,
        fp,
        fn_: r.k1() as u64 - tp,
        tn: r.k2() as u64 - fp,
    })
}

fn ratio(num: u64, den: u64) -> f64 {
    num as f64 / den as f64
}

impl ConfusionCounts {
    pub fn n(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Ground-truth positives, `tp + fn`.
    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    /// Ground-truth negatives, `fp + tn`.
    pub fn negatives(&self) -> u64 {
        self.fp + self.tn
    }

    pub fn predicted_positives(&self) -> u64 {
        self.tp + self.fp
    }

    pub fn accuracy(&self) -> Result<f64, MetricError> {
        match self.n() {
            0 => Err(MetricError::EmptyPopulation),
            n => Ok(ratio(self.tp + self.tn, n)),
        }
    }

    pub fn error_rate(&self) -> Result<f64, MetricError> {
        match self.n() {
            0 => Err(MetricError::EmptyPopulation),
            n => Ok(ratio(self.fp + self.fn_, n)),
        }
    }

    /// Share of the population labeled class 1, `(tp + fp) / n`.
    pub fn prevalence(&self) -> Result<f64, MetricError> {
        match self.n() {
            0 => Err(MetricError::EmptyPopulation),
            n => Ok(ratio(self.predicted_positives(), n)),
        }
    }

    /// True positive rate, `tp / (tp + fn)`.
    pub fn sensitivity(&self) -> Result<f64, MetricError> {
        match self.positives() {
            0 => Err(MetricError::EmptyPositiveClass),
            k1 => Ok(ratio(self.tp, k1)),
        }
    }

    pub fn false_positive_rate(&self) -> Result<f64, MetricError> {
        match self.negatives() {
            0 => Err(MetricError::EmptyNegativeClass),
            k2 => Ok(ratio(self.fp, k2)),
        }
    }

    /// `tn / (tn + fp)`, the complement of the false positive rate.
    pub fn specificity(&self) -> Result<f64, MetricError> {
        match self.negatives() {
            0 => Err(MetricError::EmptyNegativeClass),
            k2 => Ok(ratio(self.tn, k2)),
        }
    }

    pub fn precision(&self) -> Result<f64, MetricError> {
        match self.predicted_positives() {
            0 => Err(MetricError::NoPredictedPositives),
            p => Ok(ratio(self.tp, p)),
        }
    }

    pub fn recall(&self) -> Result<f64, MetricError> {
        self.sensitivity()
    }

    /// Harmonic mean of precision and recall.
    pub fn f1_score(&self) -> Result<f64, MetricError> {
        let (p, r) = match (self.precision(), self.recall()) {
            (Ok(p), Ok(r)) => (p, r),
            _ => return Err(MetricError::UndefinedF1),
        };
        if p + r == 0.0 {
            return Err(MetricError::UndefinedF1);
        }
        // 2tp / (2tp + fp + fn) is the same value without the float detour
        Ok(ratio(2 * self.tp, 2 * self.tp + self.fp + self.fn_))
    }

    /// Van Rijsbergen's effectiveness measure `E = 1 - F` with
    /// `F = 1 / (alpha / P + (1 - alpha) / R)`.
    ///
    /// `alpha = 1` weighs precision only, `alpha = 0` recall only and
    /// `alpha = 0.5` gives `1 - F1`.
    pub fn e_measure(&self, alpha: f64) -> Result<f64, MetricError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(MetricError::UndefinedEMeasure(format!(
                "alpha {alpha} outside [0, 1]"
            )));
        }
        let p = self
            .precision()
            .map_err(|e| MetricError::UndefinedEMeasure(e.to_string()))?;
        let r = self
            .recall()
            .map_err(|e| MetricError::UndefinedEMeasure(e.to_string()))?;
        if p == 0.0 || r == 0.0 {
            return Err(MetricError::UndefinedEMeasure(
                "precision and recall must both be positive".into(),
            ));
        }
        let f = 1.0 / (alpha / p + (1.0 - alpha) / r);
        Ok(1.0 - f)
    }
}
