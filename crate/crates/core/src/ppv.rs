//! Positive predictive value at a rank cut, and its conversion when the
//! two classes swap roles.

use serde::Serialize;
use thiserror::Error;

use crate::ranking::Ranking;

/// Absolute slack for recognising `ppv * k1` as an integer hit count.
pub const INTEGRAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PpvError {
    #[error("cut k = {k} outside 1..={n}")]
    CutOutOfRange { k: usize, n: usize },
    #[error("inconsistent PPV input: {0}")]
    InconsistentInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PpvResult {
    pub k: usize,
    /// Positives among ranks `1..=k`.
    pub hits: usize,
    pub value: f64,
}

impl PpvResult {
    fn new(k: usize, hits: usize) -> Self {
        Self {
            k,
            hits,
            value: hits as f64 / k as f64,
        }
    }
}

/// Share of positives among the top `k` under the ranking's tie order.
pub fn ppv_at_k(r: &Ranking, k: usize) -> Result<PpvResult, PpvError> {
    if k == 0 || k > r.len() {
        return Err(PpvError::CutOutOfRange { k, n: r.len() });
    }
    let hits = r.labels().take(k).filter(|l| l.is_positive()).count();
    Ok(PpvResult::new(k, hits))
}

/// `ppv_at_k` at the base-rate cut `k = k1`.
pub fn ppv_base_rate(r: &Ranking) -> Result<PpvResult, PpvError> {
    ppv_at_k(r, r.k1())
}

/// Expected hits at cut `k` when the tie group straddling the cut is
/// ordered uniformly at random (hypergeometric mean over that group).
///
/// Equals `ppv_at_k(r, k).hits` whenever no tie group crosses the cut.
pub fn expected_hits_at_k(r: &Ranking, k: usize) -> Result<f64, PpvError> {
    if k == 0 || k > r.len() {
        return Err(PpvError::CutOutOfRange { k, n: r.len() });
    }
    let items = r.items();
    let mut hits = 0.0;
    for group in r.tie_groups() {
        if group.end <= k {
            hits += items[group]
                .iter()
                .filter(|x| x.label().is_positive())
                .count() as f64;
        } else {
            if group.start < k {
                let taken = (k - group.start) as f64;
                let pos = items[group.clone()]
                    .iter()
                    .filter(|x| x.label().is_positive())
                    .count() as f64;
                hits += taken * pos / group.len() as f64;
            }
            break;
        }
    }
    Ok(hits)
}

/// Recovers the hit count behind `ppv` at cut `k`.
pub fn hits_from_ppv(ppv: f64, k: usize) -> Result<usize, PpvError> {
    if !ppv.is_finite() || !(0.0..=1.0).contains(&ppv) {
        return Err(PpvError::InconsistentInput(format!(
            "PPV {ppv} outside [0, 1]"
        )));
    }
    let scaled = ppv * k as f64;
    let hits = scaled.round();
    if (scaled - hits).abs() > INTEGRAL_TOLERANCE {
        return Err(PpvError::InconsistentInput(format!(
            "PPV {ppv} times k = {k} is not an integer hit count"
        )));
    }
    Ok(hits as usize)
}

/// Hit count of the swapped (class-2) classifier at cut `k2`, given the
/// class-1 classifier's hits at cut `k1`: `k2 - (k1 - hits)`.
pub fn swapped_hits(hits_k1: usize, k1: usize, k2: usize) -> Result<usize, PpvError> {
    if hits_k1 > k1 {
        return Err(PpvError::InconsistentInput(format!(
            "{hits_k1} hits exceed k1 = {k1}"
        )));
    }
    // the k1 - hits negatives in the top k1 must fit into the k2 negatives
    (k2 + hits_k1).checked_sub(k1).ok_or_else(|| {
        PpvError::InconsistentInput(format!(
            "{} negatives in the top {k1} but only k2 = {k2} negatives exist",
            k1 - hits_k1
        ))
    })
}

/// `PPV_k2 = 1 - (k1 / k2) * (1 - PPV_k1)`.
///
/// Evaluated through the integer hit count so the result is bit-identical
/// to `ppv_base_rate(reverse_classifier(r))`.
pub fn ppv_swap(ppv_k1: f64, k1: usize, k2: usize) -> Result<f64, PpvError> {
    if k1 == 0 || k2 == 0 {
        return Err(PpvError::InconsistentInput(format!(
            "class sizes must be positive (k1 = {k1}, k2 = {k2})"
        )));
    }
    let hits = hits_from_ppv(ppv_k1, k1)?;
    let swapped = swapped_hits(hits, k1, k2)?;
    Ok(swapped as f64 / k2 as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::{build_ranking, reverse_classifier, Label, ScoredRecord, TiePolicy};
    use Label::{Negative as N, Positive as P};

    fn worked_example() -> Ranking {
        Ranking::from_labels(&[P, P, N, P, N, N, N]).unwrap()
    }

    #[test]
    fn worked_example_ppv() {
        let res = ppv_base_rate(&worked_example()).unwrap();
        assert_eq!((res.k, res.hits), (3, 2));
        assert_eq!(res.value, 2.0 / 3.0);
        assert_eq!(ppv_at_k(&worked_example(), 3).unwrap(), res);
    }

    #[test]
    fn sorted_and_anti_sorted() {
        let sorted = Ranking::from_labels(&[P, P, N, N, N]).unwrap();
        assert_eq!(ppv_base_rate(&sorted).unwrap().value, 1.0);
        let anti = Ranking::from_labels(&[N, N, N, P, P]).unwrap();
        assert_eq!(ppv_base_rate(&anti).unwrap().value, 0.0);
        let all_pos = Ranking::from_labels(&[P, P, P]).unwrap();
        assert_eq!(ppv_base_rate(&all_pos).unwrap().value, 1.0);
    }

    #[test]
    fn cut_bounds() {
        let r = worked_example();
        assert_eq!(ppv_at_k(&r, 0), Err(PpvError::CutOutOfRange { k: 0, n: 7 }));
        assert_eq!(ppv_at_k(&r, 8), Err(PpvError::CutOutOfRange { k: 8, n: 7 }));
        assert_eq!(ppv_at_k(&r, 7).unwrap().value, 3.0 / 7.0);
        let no_pos = Ranking::from_labels(&[N, N]).unwrap();
        assert!(ppv_base_rate(&no_pos).is_err());
    }

    #[test]
    fn swap_worked_example() {
        assert_eq!(ppv_swap(2.0 / 3.0, 3, 4).unwrap(), 0.75);
        let rev = reverse_classifier(&worked_example());
        assert_eq!(ppv_base_rate(&rev).unwrap().value, 0.75);
    }

    #[test]
    fn swap_identities() {
        assert_eq!(ppv_swap(1.0, 3, 8).unwrap(), 1.0);
        assert_eq!(ppv_swap(1.0, 5, 2).unwrap(), 1.0);
        for hits in 0..=6 {
            let a = hits as f64 / 6.0;
            assert_eq!(ppv_swap(a, 6, 6).unwrap(), a);
        }
    }

    #[test]
    fn swap_rejects_inconsistent_input() {
        // 0.5 * 3 is not a hit count
        assert!(matches!(
            ppv_swap(0.5, 3, 4),
            Err(PpvError::InconsistentInput(_))
        ));
        // k1 = 5, k2 = 2: at least 3 positives must be in the top 5
        assert!(matches!(
            ppv_swap(0.4, 5, 2),
            Err(PpvError::InconsistentInput(_))
        ));
        assert!(matches!(
            ppv_swap(1.2, 5, 2),
            Err(PpvError::InconsistentInput(_))
        ));
        assert!(matches!(
            ppv_swap(0.5, 0, 2),
            Err(PpvError::InconsistentInput(_))
        ));
    }

    #[test]
    fn expected_hits_over_boundary_tie_group() {
        // group {b, c, d} straddles the cut at k = 2 and holds one positive
        let recs = [
            ("a", 3.0, P),
            ("b", 2.0, N),
            ("c", 2.0, P),
            ("d", 2.0, N),
            ("e", 1.0, P),
        ]
        .iter()
        .map(|&(id, s, l)| ScoredRecord::new(id, s, l).unwrap())
        .collect();
        let r = build_ranking(recs, TiePolicy::ByIdAscending).unwrap();
        assert_eq!(ppv_at_k(&r, 2).unwrap().hits, 1);
        let expected = expected_hits_at_k(&r, 2).unwrap();
        assert!((expected - (1.0 + 1.0 / 3.0)).abs() < 1e-15);
        // no straddle at k = 1 or k = 4
        assert_eq!(expected_hits_at_k(&r, 1).unwrap(), 1.0);
        assert_eq!(expected_hits_at_k(&r, 4).unwrap(), 2.0);
    }
}
