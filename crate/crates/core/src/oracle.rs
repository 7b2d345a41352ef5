//! Exhaustive ground truth for small class ratios.
//!
//! Every placement of `k1` positives among `n = k1 + k2` rank positions is
//! visited once, in lexicographic order of the positive positions. For each
//! arrangement the pair count and the hits at cut `k1` are tallied exactly,
//! with no reference to the closed-form envelopes, so the results can
//! certify them.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::envelopes::{self, ClassRatio};
use crate::Rational;

/// Largest `n` the enumeration accepts; C(16, 8) = 12870 arrangements.
pub const MAX_INSTANCE: u64 = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("instance n = {n} exceeds the enumeration limit {limit}")]
    InstanceTooLarge { n: u64, limit: u64 },
    #[error(
        "certification failed for k1 = {k1}, k2 = {k2} at {hits} hits: \
         {which} expected {expected}, enumerated {actual}"
    )]
    CertificationFailure {
        k1: u64,
        k2: u64,
        hits: u64,
        which: &'static str,
        expected: Rational,
        actual: Rational,
    },
}

/// AUC extremes among arrangements with one hit count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HitsLevel {
    #[serde(serialize_with = "ser_rational")]
    pub min_auc: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub max_auc: Rational,
    pub count: u64,
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArrangementStats {
    pub ratio: ClassRatio,
    pub per_hits: BTreeMap<u64, HitsLevel>,
    #[serde(serialize_with = "ser_rational")]
    pub global_min_auc: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub global_max_auc: Rational,
}

impl ArrangementStats {
    pub fn arrangements(&self) -> u64 {
        self.per_hits.values().map(|l| l.count).sum()
    }
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Correct (positive above negative) pairs and hits at cut `k1` for a
/// strict arrangement given as a bit mask over rank positions (bit 0 is
/// rank 1).
pub fn arrangement_counts(mask: u32, n: u32, k1: u32) -> (u64, u64) {
    let mut negatives_below = 0u64;
    let mut pairs = 0u64;
    for pos in (0..n).rev() {
        if mask >> pos & 1 == 1 {
            pairs += negatives_below;
        } else {
            negatives_below += 1;
        }
    }
    let top = if k1 == 0 {
        0
    } else {
        mask & (u32::MAX >> (32 - k1))
    };
    (pairs, top.count_ones() as u64)
}

/// Calls `visit` with every `k`-subset of `0..n` as a bit mask, in
/// lexicographic order of the sorted positions.
fn for_each_combination(n: u32, k: u32, mut visit: impl FnMut(u32)) {
    let mut idx: Vec<u32> = (0..k).collect();
    loop {
        visit(idx.iter().fold(0u32, |m, &i| m | 1 << i));
        // rightmost index that can still advance
        let Some(j) = (0..k as usize).rev().find(|&j| idx[j] < n - k + j as u32) else {
            return;
        };
        idx[j] += 1;
        for t in j + 1..k as usize {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

pub fn enumerate_arrangements(ratio: ClassRatio) -> Result<ArrangementStats, OracleError> {
    enumerate_arrangements_with_limit(ratio, MAX_INSTANCE)
}

pub fn enumerate_arrangements_with_limit(
    ratio: ClassRatio,
    limit: u64,
) -> Result<ArrangementStats, OracleError> {
    let n = ratio.n();
    let limit = limit.min(MAX_INSTANCE);
    if n > limit {
        return Err(OracleError::InstanceTooLarge { n, limit });
    }
    let total = ratio.total_pairs() as i128;
    let mut per_pairs: BTreeMap<u64, (u64, u64, u64)> = BTreeMap::new();
    for_each_combination(n as u32, ratio.k1() as u32, |mask| {
        let (pairs, hits) = arrangement_counts(mask, n as u32, ratio.k1() as u32);
        per_pairs
            .entry(hits)
            .and_modify(|(lo, hi, count)| {
                *lo = (*lo).min(pairs);
                *hi = (*hi).max(pairs);
                *count += 1;
            })
            .or_insert((pairs, pairs, 1));
    });
    let per_hits: BTreeMap<u64, HitsLevel> = per_pairs
        .into_iter()
        .map(|(h, (lo, hi, count))| {
            (
                h,
                HitsLevel {
                    min_auc: Rational::new(lo as i128, total),
                    max_auc: Rational::new(hi as i128, total),
                    count,
                },
            )
        })
        .collect();
    let global_min_auc = per_hits
        .values()
        .map(|l| l.min_auc)
        .min()
        .expect("non-empty");
    let global_max_auc = per_hits
        .values()
        .map(|l| l.max_auc)
        .max()
        .expect("non-empty");
    Ok(ArrangementStats {
        ratio,
        per_hits,
        global_min_auc,
        global_max_auc,
    })
}

/// One hit level compared against the closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelCheck {
    pub hits: u64,
    #[serde(serialize_with = "ser_rational")]
    pub expected_min: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub actual_min: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub expected_max: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub actual_max: Rational,
}

impl LevelCheck {
    pub fn passed(&self) -> bool {
        self.expected_min == self.actual_min && self.expected_max == self.actual_max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certification {
    pub ratio: ClassRatio,
    pub arrangements: u64,
    pub levels: Vec<LevelCheck>,
}

/// Checks every hit level of `ratio` against the closed-form envelopes with
/// exact equality.
pub fn compare_envelopes(ratio: ClassRatio, limit: u64) -> Result<Certification, OracleError> {
    let stats = enumerate_arrangements_with_limit(ratio, limit)?;
    let levels = stats
        .per_hits
        .iter()
        .map(|(&hits, level)| LevelCheck {
            hits,
            // enumerated hit counts are feasible by construction
            expected_min: envelopes::auc_min_exact(hits, ratio).expect("feasible hits"),
            actual_min: level.min_auc,
            expected_max: envelopes::auc_max_exact(hits, ratio).expect("feasible hits"),
            actual_max: level.max_auc,
        })
        .collect();
    Ok(Certification {
        ratio,
        arrangements: stats.arrangements(),
        levels,
    })
}

/// Like [`compare_envelopes`] but fails on the first mismatching level.
pub fn certify_envelopes(ratio: ClassRatio) -> Result<Certification, OracleError> {
    certify_envelopes_with_limit(ratio, MAX_INSTANCE)
}

pub fn certify_envelopes_with_limit(
    ratio: ClassRatio,
    limit: u64,
) -> Result<Certification, OracleError> {
    let cert = compare_envelopes(ratio, limit)?;
    if let Some(bad) = cert.levels.iter().find(|l| !l.passed()) {
        let (which, expected, actual) = if bad.expected_min != bad.actual_min {
            ("AUC_min", bad.expected_min, bad.actual_min)
        } else {
            ("AUC_max", bad.expected_max, bad.actual_max)
        };
        return Err(OracleError::CertificationFailure {
            k1: ratio.k1(),
            k2: ratio.k2(),
            hits: bad.hits,
            which,
            expected,
            actual,
        });
    }
    Ok(cert)
}

/// All ratios `k1, k2 >= 1` with `k1 + k2 <= limit`, ordered by `n` then `k1`.
pub fn ratios_up_to(limit: u64) -> Vec<ClassRatio> {
    (2..=limit)
        .flat_map(|n| (1..n).map(move |k1| ClassRatio::new(k1, n - k1).expect("both positive")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(k1: u64, k2: u64) -> ClassRatio {
        ClassRatio::new(k1, k2).unwrap()
    }

    #[test]
    fn combinations_are_lexicographic_and_complete() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |m| seen.push(m));
        assert_eq!(seen, [0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]);
        let mut count = 0;
        for_each_combination(10, 4, |_| count += 1);
        assert_eq!(count, binomial(10, 4));
    }

    #[test]
    fn worked_example_arrangement() {
        // P P N P N N N: positives at ranks 1, 2, 4
        assert_eq!(arrangement_counts(0b1011, 7, 3), (11, 2));
        // P N P N N N P: positives at ranks 1, 3, 7
        assert_eq!(arrangement_counts(0b100_0101, 7, 3), (7, 2));
        let stats = enumerate_arrangements(ratio(3, 4)).unwrap();
        let level = stats.per_hits[&2];
        assert!(level.min_auc <= Rational::new(7, 12) && Rational::new(7, 12) <= level.max_auc);
        assert_eq!(stats.arrangements(), binomial(7, 3));
    }

    #[test]
    fn smallest_instance() {
        let stats = enumerate_arrangements(ratio(1, 1)).unwrap();
        assert_eq!(stats.per_hits.len(), 2);
        assert_eq!(stats.per_hits[&1].min_auc, Rational::from_integer(1));
        assert_eq!(stats.per_hits[&0].max_auc, Rational::from_integer(0));
        assert_eq!(stats.global_min_auc, Rational::from_integer(0));
        assert_eq!(stats.global_max_auc, Rational::from_integer(1));
    }

    #[test]
    fn two_by_two() {
        let stats = enumerate_arrangements(ratio(2, 2)).unwrap();
        assert_eq!(stats.arrangements(), 6);
        assert_eq!(stats.per_hits[&1].max_auc, Rational::new(3, 4));
        assert_eq!(stats.per_hits[&1].min_auc, Rational::new(1, 4));
    }

    #[test]
    fn certification() {
        let cert = certify_envelopes(ratio(3, 4)).unwrap();
        assert_eq!(cert.levels.len(), 4);
        assert!(cert.levels.iter().all(LevelCheck::passed));
        let gap = certify_envelopes(ratio(1, 4)).unwrap();
        assert_eq!(gap.levels[0].actual_max, Rational::new(3, 4));
        assert!(certify_envelopes(ratio(1, 1)).is_ok());
        // k1 > k2 levels start at k1 - k2
        let wide = certify_envelopes(ratio(6, 2)).unwrap();
        assert_eq!(wide.levels.first().unwrap().hits, 4);
    }

    #[test]
    fn limit_guard() {
        assert_eq!(
            enumerate_arrangements(ratio(9, 8)),
            Err(OracleError::InstanceTooLarge { n: 17, limit: 16 })
        );
        assert!(matches!(
            enumerate_arrangements_with_limit(ratio(3, 4), 6),
            Err(OracleError::InstanceTooLarge { n: 7, limit: 6 })
        ));
    }

    #[test]
    fn ratio_listing() {
        assert_eq!(ratios_up_to(2), vec![ratio(1, 1)]);
        assert_eq!(ratios_up_to(4).len(), 1 + 2 + 3);
    }
}
