//! Scored records and the deterministic descending order a scoring
//! classifier induces on them.

use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RankingError {
    #[error("cannot rank an empty record set")]
    EmptyInput,
    #[error("duplicate record id `{0}`")]
    DuplicateId(String),
    #[error("record `{id}` has non-finite score {score}")]
    NonFiniteScore { id: String, score: f64 },
    #[error("record id must be non-empty")]
    EmptyId,
}

/// Ground-truth class. `Positive` is class 1 (e.g. re-offended).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn is_positive(self) -> bool {
        matches!(self, Label::Positive)
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

/// One subject: identifier, real-valued score and ground-truth label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredRecord {
    id: String,
    score: f64,
    label: Label,
}

impl ScoredRecord {
    pub fn new(id: impl Into<String>, score: f64, label: Label) -> Result<Self, RankingError> {
        let id = id.into();
        if id.is_empty() {
            return Err(RankingError::EmptyId);
        }
        if !score.is_finite() {
            return Err(RankingError::NonFiniteScore { id, score });
        }
        Ok(Self { id, score, label })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    pub fn label(&self) -> Label {
        self.label
    }
}

/// Order applied among records with equal scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TiePolicy {
    /// Lexicographic id order.
    #[default]
    ByIdAscending,
    /// Reverse lexicographic id order; what a reversed `ByIdAscending` ranking carries.
    ByIdDescending,
    /// Keep the caller's input order.
    Given,
}

impl TiePolicy {
    fn reversed(self) -> TiePolicy {
        match self {
            TiePolicy::ByIdAscending => TiePolicy::ByIdDescending,
            TiePolicy::ByIdDescending => TiePolicy::ByIdAscending,
            TiePolicy::Given => TiePolicy::Given,
        }
    }
}

/// Records sorted by descending score (rank 1 first) with a total tie order.
///
/// Immutable once built; `k1` counts positives and `k2` negatives.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ranking {
    items: Vec<ScoredRecord>,
    k1: usize,
    k2: usize,
    tie_policy: TiePolicy,
}

/// Builds the ranking for `records` under `tie_policy`.
///
/// The sort is stable, so `TiePolicy::Given` keeps the input order of tied
/// records.
pub fn build_ranking(
    records: Vec<ScoredRecord>,
    tie_policy: TiePolicy,
) -> Result<Ranking, RankingError> {
    if records.is_empty() {
        return Err(RankingError::EmptyInput);
    }
    let mut seen = HashSet::with_capacity(records.len());
    for rec in &records {
        // records built through the constructor are already valid, but the
        // fields are also reachable through deserialization
        if rec.id.is_empty() {
            return Err(RankingError::EmptyId);
        }
        if !rec.score.is_finite() {
            return Err(RankingError::NonFiniteScore {
                id: rec.id.clone(),
                score: rec.score,
            });
        }
        if !seen.insert(rec.id.as_str()) {
            return Err(RankingError::DuplicateId(rec.id.clone()));
        }
    }

    let mut items = records;
    items.sort_by(|a, b| {
        let by_score = b.score.partial_cmp(&a.score).unwrap_or(Ordering::Equal);
        by_score.then_with(|| match tie_policy {
            TiePolicy::ByIdAscending => a.id.cmp(&b.id),
            TiePolicy::ByIdDescending => b.id.cmp(&a.id),
            TiePolicy::Given => Ordering::Equal,
        })
    });
    let k1 = items.iter().filter(|r| r.label.is_positive()).count();
    let k2 = items.len() - k1;
    Ok(Ranking {
        items,
        k1,
        k2,
        tie_policy,
    })
}

/// The class-2 classifier obtained from `r`: reversed rank order with the
/// roles of the two classes swapped.
///
/// Scores are negated rather than mapped through `1 - f` so the order is
/// reproduced exactly for arbitrary real scores.
pub fn reverse_classifier(r: &Ranking) -> Ranking {
    let items = r
        .items
        .iter()
        .rev()
        .map(|rec| ScoredRecord {
            id: rec.id.clone(),
            score: -rec.score,
            label: rec.label.flipped(),
        })
        .collect();
    Ranking {
        items,
        k1: r.k2,
        k2: r.k1,
        tie_policy: r.tie_policy.reversed(),
    }
}

impl Ranking {
    /// Builds a ranking from labels already in rank order, using strictly
    /// decreasing synthetic scores and ids `r0001`, `r0002`, ...
    pub fn from_labels(labels: &[Label]) -> Result<Ranking, RankingError> {
        let width = labels.len().to_string().len().max(4);
        let n = labels.len();
        let records = labels
            .iter()
            .enumerate()
            .map(|(i, &label)| {
                ScoredRecord::new(
                    format!("r{:0width$}", i + 1, width = width),
                    (n - i) as f64,
                    label,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        build_ranking(records, TiePolicy::ByIdAscending)
    }

    pub fn items(&self) -> &[ScoredRecord] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn k1(&self) -> usize {
        self.k1
    }

    pub fn k2(&self) -> usize {
        self.k2
    }

    pub fn tie_policy(&self) -> TiePolicy {
        self.tie_policy
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.items.iter().map(|r| r.label)
    }

    /// Ranges of rank positions sharing one score, top group first.
    pub fn tie_groups(&self) -> Vec<std::ops::Range<usize>> {
        let mut groups = Vec::new();
        let mut start = 0;
        for i in 1..=self.items.len() {
            if i == self.items.len() || self.items[i].score != self.items[start].score {
                groups.push(start..i);
                start = i;
            }
        }
        groups
    }
}
