//! ROC curve construction and AUC by two independent routes: trapezoidal
//! area under the swept curve, and the pairwise (Mann-Whitney) count.

use serde::Serialize;
use thiserror::Error;

use crate::ranking::Ranking;
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RocError {
    #[error("AUC needs both classes present (k1 = {k1}, k2 = {k2})")]
    DegenerateClasses { k1: usize, k2: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

/// ROC points from `(0, 0)` to `(1, 1)` with non-decreasing coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RocCurve {
    points: Vec<RocPoint>,
}

impl RocCurve {
    /// Validates the endpoint and monotonicity invariants.
    pub fn new(points: Vec<RocPoint>) -> Option<RocCurve> {
        let first = points.first()?;
        let last = points.last()?;
        if *first != (RocPoint { fpr: 0.0, tpr: 0.0 }) || *last != (RocPoint { fpr: 1.0, tpr: 1.0 })
        {
            return None;
        }
        let monotone = points
            .windows(2)
            .all(|w| w[0].fpr <= w[1].fpr && w[0].tpr <= w[1].tpr);
        monotone.then_some(RocCurve { points })
    }

    pub fn points(&self) -> &[RocPoint] {
        &self.points
    }
}

/// Pairwise AUC with its exact pair count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AucResult {
    pub value: f64,
    /// Correctly ordered (positive, negative) pairs, ties counted as one half.
    pub correct_pairs: f64,
    pub total_pairs: u64,
    #[serde(skip)]
    twice_correct: u64,
}

impl AucResult {
    fn from_twice_correct(twice_correct: u64, total_pairs: u64) -> AucResult {
        AucResult {
            value: twice_correct as f64 / (2 * total_pairs) as f64,
            correct_pairs: twice_correct as f64 / 2.0,
            total_pairs,
            twice_correct,
        }
    }

    /// The AUC as an exact fraction of `k1 * k2`.
    pub fn exact(&self) -> Rational {
        Rational::new(self.twice_correct as i128, 2 * self.total_pairs as i128)
    }
}

fn check_classes(r: &Ranking) -> Result<(), RocError> {
    if r.k1() == 0 || r.k2() == 0 {
        return Err(RocError::DegenerateClasses {
            k1: r.k1(),
            k2: r.k2(),
        });
    }
    Ok(())
}

/// Sweeps the threshold from above the top score downwards, emitting one
/// point after each group of tied scores.
pub fn roc_curve(r: &Ranking) -> Result<RocCurve, RocError> {
    check_classes(r)?;
    let (k1, k2) = (r.k1() as f64, r.k2() as f64);
    let mut points = Vec::with_capacity(r.len() + 1);
    points.push(RocPoint { fpr: 0.0, tpr: 0.0 });
    let (mut tp, mut fp) = (0usize, 0usize);
    for group in r.tie_groups() {
        for rec in &r.items()[group] {
            if rec.label().is_positive() {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        points.push(RocPoint {
            fpr: fp as f64 / k2,
            tpr: tp as f64 / k1,
        });
    }
    Ok(RocCurve { points })
}

/// Trapezoidal area under the curve.
pub fn auc_trapezoid(curve: &RocCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum()
}

/// Probability that a random positive outranks a random negative, ties
/// credited one half.
///
/// One pass over the tie groups from the bottom of the ranking, so it runs
/// in the time it took to sort.
pub fn auc_pairwise(r: &Ranking) -> Result<AucResult, RocError> {
    check_classes(r)?;
    let items = r.items();
    let mut negatives_below: u64 = 0;
    let mut twice_correct: u64 = 0;
    for group in r.tie_groups().into_iter().rev() {
        let pos = items[group.clone()]
            .iter()
            .filter(|x| x.label().is_positive())
            .count() as u64;
        let neg = group.len() as u64 - pos;
        twice_correct += 2 * pos * negatives_below + pos * neg;
        negatives_below += neg;
    }
    Ok(AucResult::from_twice_correct(
        twice_correct,
        (r.k1() * r.k2()) as u64,
    ))
}

/// Quadratic reference: compares the score of every positive with every
/// negative directly. Kept as an internal oracle for [`auc_pairwise`].
pub fn auc_pairwise_reference(r: &Ranking) -> Result<AucResult, RocError> {
    check_classes(r)?;
    let (pos, neg): (Vec<_>, Vec<_>) = r.items().iter().partition(|x| x.label().is_positive());
    let mut twice_correct = 0u64;
    for p in &pos {
        for n in &neg {
            if p.score() > n.score() {
                twice_correct += 2;
            } else if p.score() == n.score() {
                twice_correct += 1;
            }
        }
    }
    Ok(AucResult::from_twice_correct(
        twice_correct,
        (pos.len() * neg.len()) as u64,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::{build_ranking, reverse_classifier, Label, ScoredRecord, TiePolicy};
    use Label::{Negative as N, Positive as P};

    fn worked_example() -> Ranking {
        Ranking::from_labels(&[P, P, N, P, N, N, N]).unwrap()
    }

    fn pt(fpr: f64, tpr: f64) -> RocPoint {
        RocPoint { fpr, tpr }
    }

    #[test]
    fn worked_example_curve() {
        let curve = roc_curve(&worked_example()).unwrap();
        let expected = vec![
            pt(0.0, 0.0),
            pt(0.0, 1.0 / 3.0),
            pt(0.0, 2.0 / 3.0),
            pt(0.25, 2.0 / 3.0),
            pt(0.25, 1.0),
            pt(0.5, 1.0),
            pt(0.75, 1.0),
            pt(1.0, 1.0),
        ];
        assert_eq!(curve.points(), expected.as_slice());
        // 11 of the 12 pairs are ordered correctly; only the N at rank 3
        // sits above the P at rank 4
        assert!((auc_trapezoid(&curve) - 11.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn worked_example_pairwise() {
        let auc = auc_pairwise(&worked_example()).unwrap();
        assert_eq!(auc.correct_pairs, 11.0);
        assert_eq!(auc.total_pairs, 12);
        assert_eq!(auc.exact(), Rational::new(11, 12));
    }

    #[test]
    fn seven_of_twelve_arrangement() {
        // two hits in the top three and exactly seven correct pairs
        let r = Ranking::from_labels(&[P, N, P, N, N, N, P]).unwrap();
        let auc = auc_pairwise(&r).unwrap();
        assert_eq!(auc.exact(), Rational::new(7, 12));
        assert_eq!(auc.value, 7.0 / 12.0);
        assert!((auc_trapezoid(&roc_curve(&r).unwrap()) - 7.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_and_inverted() {
        let perfect = Ranking::from_labels(&[P, P, N, N, N]).unwrap();
        let curve = roc_curve(&perfect).unwrap();
        assert!(curve.points().contains(&pt(0.0, 1.0)));
        assert_eq!(auc_trapezoid(&curve), 1.0);
        assert_eq!(auc_pairwise(&perfect).unwrap().value, 1.0);

        let inverted = Ranking::from_labels(&[N, N, N, P, P]).unwrap();
        let curve = roc_curve(&inverted).unwrap();
        assert!(curve.points().contains(&pt(1.0, 0.0)));
        assert_eq!(auc_trapezoid(&curve), 0.0);
        assert_eq!(auc_pairwise(&inverted).unwrap().value, 0.0);
    }

    #[test]
    fn trapezoid_of_reference_curves() {
        let diagonal = RocCurve::new(vec![pt(0.0, 0.0), pt(1.0, 1.0)]).unwrap();
        assert_eq!(auc_trapezoid(&diagonal), 0.5);
        let perfect = RocCurve::new(vec![pt(0.0, 0.0), pt(0.0, 1.0), pt(1.0, 1.0)]).unwrap();
        assert_eq!(auc_trapezoid(&perfect), 1.0);
        assert!(
            RocCurve::new(vec![pt(0.0, 0.0), pt(0.5, 0.4), pt(0.4, 1.0), pt(1.0, 1.0)]).is_none()
        );
        assert!(RocCurve::new(vec![pt(0.1, 0.0), pt(1.0, 1.0)]).is_none());
    }

    #[test]
    fn all_tied_scores_give_one_half() {
        let recs = ["a", "b", "c", "d"]
            .iter()
            .zip([P, N, P, N])
            .map(|(id, l)| ScoredRecord::new(*id, 0.3, l).unwrap())
            .collect();
        let r = build_ranking(recs, TiePolicy::ByIdAscending).unwrap();
        assert_eq!(auc_pairwise(&r).unwrap().value, 0.5);
        let curve = roc_curve(&r).unwrap();
        assert_eq!(curve.points().len(), 2);
        assert_eq!(auc_trapezoid(&curve), 0.5);
    }

    #[test]
    fn ties_agree_with_reference_and_trapezoid() {
        let data = [
            ("a", 0.9, P),
            ("b", 0.9, N),
            ("c", 0.7, P),
            ("d", 0.5, N),
            ("e", 0.5, P),
            ("f", 0.5, N),
            ("g", 0.1, N),
        ];
        let recs = data
            .iter()
            .map(|&(id, s, l)| ScoredRecord::new(id, s, l).unwrap())
            .collect();
        let r = build_ranking(recs, TiePolicy::ByIdAscending).unwrap();
        let fast = auc_pairwise(&r).unwrap();
        let slow = auc_pairwise_reference(&r).unwrap();
        assert_eq!(fast, slow);
        assert!((fast.value - auc_trapezoid(&roc_curve(&r).unwrap())).abs() < 1e-12);
        assert_eq!(
            fast.exact(),
            auc_pairwise(&reverse_classifier(&r)).unwrap().exact()
        );
    }

    #[test]
    fn degenerate_classes() {
        let r = Ranking::from_labels(&[P, P]).unwrap();
        assert_eq!(
            auc_pairwise(&r),
            Err(RocError::DegenerateClasses { k1: 2, k2: 0 })
        );
        assert!(roc_curve(&r).is_err());
        assert!(auc_pairwise_reference(&r).is_err());
    }
}
