//! Extremal envelopes between AUC and PPV at the base-rate cut.
//!
//! For a ranking with `k1` positives and `k2` negatives, fix the number of
//! hits `h` among the top `k1`. Reordering inside the top segment or inside
//! the bottom segment leaves `h` unchanged, and the AUC pair count splits into
//! within-top, within-bottom and cross-segment parts. Sorting both segments
//! best-first gives the largest pair count, worst-first the smallest:
//!
//! ```text
//! max pairs = k1*k2 - (k1 - h)^2          AUC_max(a) = 1 - (1 - a)^2 * k1 / k2
//! min pairs = h * (k2 - k1 + h)           AUC_min(a) = a * (1 - (1 - a) * k1 / k2)
//! ```
//!
//! with `a = h / k1`. Both are stated for `k1 <= k2`; larger positive classes
//! are first mapped to the swapped classifier, whose AUC is identical and
//! whose PPV follows from [`crate::ppv::ppv_swap`].
//!
//! The dual question, which PPV values are compatible with a given AUC,
//! scans the hit levels against those thresholds.

use serde::Serialize;
use thiserror::Error;

use crate::ppv::{self, PpvError};
use crate::Rational;

/// Slack used when a floating-point AUC is compared against an exact
/// threshold.
pub const BOUND_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvelopeError {
    #[error("class sizes must be positive (k1 = {k1}, k2 = {k2})")]
    InvalidRatio { k1: u64, k2: u64 },
    #[error("{what} = {value} outside [0, 1]")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("PPV {a} is not i/{k1} for an integer hit count i")]
    NonIntegralHits { a: f64, k1: u64 },
    #[error("{hits} hits at cut {k1} impossible with only {k2} negatives")]
    InfeasibleHits { hits: u64, k1: u64, k2: u64 },
}

/// Class sizes `k1` (positives) and `k2` (negatives), both at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ClassRatio {
    k1: u64,
    k2: u64,
}

impl ClassRatio {
    pub fn new(k1: u64, k2: u64) -> Result<Self, EnvelopeError> {
        if k1 == 0 || k2 == 0 {
            return Err(EnvelopeError::InvalidRatio { k1, k2 });
        }
        Ok(Self { k1, k2 })
    }

    pub fn k1(&self) -> u64 {
        self.k1
    }

    pub fn k2(&self) -> u64 {
        self.k2
    }

    pub fn n(&self) -> u64 {
        self.k1 + self.k2
    }

    pub fn total_pairs(&self) -> u64 {
        self.k1 * self.k2
    }

    pub fn swapped(&self) -> ClassRatio {
        ClassRatio {
            k1: self.k2,
            k2: self.k1,
        }
    }

    /// Hit counts at cut `k1` that some ranking can realise.
    pub fn feasible_hits(&self) -> std::ops::RangeInclusive<u64> {
        self.k1.saturating_sub(self.k2)..=self.k1
    }

    fn check_hits(&self, hits: u64) -> Result<(), EnvelopeError> {
        if self.feasible_hits().contains(&hits) {
            Ok(())
        } else {
            Err(EnvelopeError::InfeasibleHits {
                hits,
                k1: self.k1,
                k2: self.k2,
            })
        }
    }
}

/// A ratio with `k1 <= k2` together with the PPV expressed for it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalized {
    pub ratio: ClassRatio,
    pub hits: u64,
    pub a: f64,
    pub swapped: bool,
}

fn hits_of(a: f64, ratio: ClassRatio) -> Result<u64, EnvelopeError> {
    if !a.is_finite() || !(0.0..=1.0).contains(&a) {
        return Err(EnvelopeError::OutOfRange {
            what: "PPV",
            value: a,
        });
    }
    ppv::hits_from_ppv(a, ratio.k1 as usize)
        .map(|h| h as u64)
        .map_err(|_| EnvelopeError::NonIntegralHits { a, k1: ratio.k1 })
}

fn normalize_hits(ratio: ClassRatio, hits: u64) -> Result<(ClassRatio, u64, bool), EnvelopeError> {
    ratio.check_hits(hits)?;
    if ratio.k1 <= ratio.k2 {
        return Ok((ratio, hits, false));
    }
    let swapped = ppv::swapped_hits(hits as usize, ratio.k1 as usize, ratio.k2 as usize).map_err(
        |_: PpvError| EnvelopeError::InfeasibleHits {
            hits,
            k1: ratio.k1,
            k2: ratio.k2,
        },
    )? as u64;
    Ok((ratio.swapped(), swapped, true))
}

/// Maps `(ratio, a)` with `k1 > k2` onto the swapped classifier so that
/// `k1 <= k2` holds; leaves already normalised input untouched.
pub fn normalize_ratio(ratio: ClassRatio, a: f64) -> Result<Normalized, EnvelopeError> {
    let hits = hits_of(a, ratio)?;
    let (norm, norm_hits, swapped) = normalize_hits(ratio, hits)?;
    Ok(Normalized {
        ratio: norm,
        hits: norm_hits,
        a: if swapped {
            norm_hits as f64 / norm.k1 as f64
        } else {
            a
        },
        swapped,
    })
}

/// Largest number of correctly ordered pairs with `hits` positives in the
/// top `k1`.
pub fn max_correct_pairs(hits: u64, ratio: ClassRatio) -> Result<u64, EnvelopeError> {
    let (r, h, _) = normalize_hits(ratio, hits)?;
    let misses = r.k1 - h;
    Ok(r.k1 * r.k2 - misses * misses)
}

/// Smallest number of correctly ordered pairs with `hits` positives in the
/// top `k1`.
pub fn min_correct_pairs(hits: u64, ratio: ClassRatio) -> Result<u64, EnvelopeError> {
    let (r, h, _) = normalize_hits(ratio, hits)?;
    Ok(h * (r.k2 - r.k1 + h))
}

fn as_f64(q: Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Exact `AUC_max` for the given hit count.
pub fn auc_max_exact(hits: u64, ratio: ClassRatio) -> Result<Rational, EnvelopeError> {
    Ok(Rational::new(
        max_correct_pairs(hits, ratio)? as i128,
        ratio.total_pairs() as i128,
    ))
}

/// Exact `AUC_min` for the given hit count.
pub fn auc_min_exact(hits: u64, ratio: ClassRatio) -> Result<Rational, EnvelopeError> {
    Ok(Rational::new(
        min_correct_pairs(hits, ratio)? as i128,
        ratio.total_pairs() as i128,
    ))
}

/// `1 - (1 - a)^2 * k1 / k2` on the normalised ratio: the largest AUC any
/// ranking with `PPV_k = a` can reach.
pub fn auc_max_given_ppvk(a: f64, ratio: ClassRatio) -> Result<f64, EnvelopeError> {
    auc_max_exact(hits_of(a, ratio)?, ratio).map(as_f64)
}

/// `a * (1 - (1 - a) * k1 / k2)` on the normalised ratio: the smallest AUC
/// any ranking with `PPV_k = a` can reach.
pub fn auc_min_given_ppvk(a: f64, ratio: ClassRatio) -> Result<f64, EnvelopeError> {
    auc_min_exact(hits_of(a, ratio)?, ratio).map(as_f64)
}

/// A PPV bound at fixed AUC.
///
/// `hits`/`value` is the tight answer over hit counts. `continuous` solves
/// the closed-form envelope for real-valued `a` instead, and
/// `continuous_on_grid` rounds that outward to the nearest hit count, which
/// yields a slightly wider interval than the tight one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PpvBound {
    pub hits: u64,
    pub k: u64,
    pub value: f64,
    /// AUC threshold of the selected hit level (`AUC_min` for the upper
    /// bound, `AUC_max` for the lower bound).
    pub threshold: f64,
    pub continuous: f64,
    pub continuous_on_grid: f64,
}

fn check_auc(b: f64) -> Result<(), EnvelopeError> {
    if !b.is_finite() || !(0.0..=1.0).contains(&b) {
        return Err(EnvelopeError::OutOfRange {
            what: "AUC",
            value: b,
        });
    }
    Ok(())
}

/// Translates a normalised-perspective PPV back to the caller's ratio.
fn denormalize_ppv(a_norm: f64, ratio: ClassRatio, swapped: bool) -> f64 {
    if !swapped {
        return a_norm;
    }
    // inverse of ppv_swap: 1 - a = (k2 / k1) * (1 - a')
    let (k1, k2) = (ratio.k1 as f64, ratio.k2 as f64);
    (1.0 - (k2 / k1) * (1.0 - a_norm)).clamp(0.0, 1.0)
}

fn denormalize_hits(h_norm: u64, ratio: ClassRatio, swapped: bool) -> u64 {
    if swapped {
        h_norm + ratio.k1 - ratio.k2
    } else {
        h_norm
    }
}

/// Continuous solution of `AUC_min(a) = b` for `k1 <= k2`.
fn continuous_max_ppv(b: f64, norm: ClassRatio) -> f64 {
    let r = norm.k1 as f64 / norm.k2 as f64;
    // r a^2 + (1 - r) a - b = 0, larger root
    let lin = 1.0 - r;
    ((-lin + (lin * lin + 4.0 * r * b).sqrt()) / (2.0 * r)).clamp(0.0, 1.0)
}

/// Continuous solution of `AUC_max(a) = b` for `k1 <= k2`.
fn continuous_min_ppv(b: f64, norm: ClassRatio) -> f64 {
    let r = norm.k1 as f64 / norm.k2 as f64;
    let rem = (1.0 - b) / r;
    if rem >= 1.0 {
        0.0
    } else {
        (1.0 - rem.sqrt()).clamp(0.0, 1.0)
    }
}

enum Auc {
    Float(f64),
    Exact(Rational),
}

impl Auc {
    fn reaches(&self, threshold: Rational) -> bool {
        match self {
            Auc::Float(b) => as_f64(threshold) <= b + BOUND_TOLERANCE,
            Auc::Exact(b) => threshold <= *b,
        }
    }

    fn within(&self, threshold: Rational) -> bool {
        match self {
            Auc::Float(b) => as_f64(threshold) >= b - BOUND_TOLERANCE,
            Auc::Exact(b) => threshold >= *b,
        }
    }

    fn as_f64(&self) -> f64 {
        match self {
            Auc::Float(b) => *b,
            Auc::Exact(b) => as_f64(*b),
        }
    }
}

fn max_bound(b: Auc, ratio: ClassRatio) -> Result<PpvBound, EnvelopeError> {
    let (norm, _, swapped) = normalize_hits(ratio, ratio.k1)?;
    // AUC_min(i / k1) are the thresholds at which the next hit level
    // becomes reachable; scan them in order
    let mut best = 0;
    let mut threshold = Rational::from_integer(0);
    for i in 0..=norm.k1 {
        let t = auc_min_exact(i, norm)?;
        if b.reaches(t) {
            best = i;
            threshold = t;
        } else {
            break;
        }
    }
    let hits = denormalize_hits(best, ratio, swapped);
    let continuous = denormalize_ppv(continuous_max_ppv(b.as_f64(), norm), ratio, swapped);
    let k1 = ratio.k1 as f64;
    let grid = ((continuous * k1 - ppv::INTEGRAL_TOLERANCE).ceil() / k1).clamp(0.0, 1.0);
    Ok(PpvBound {
        hits,
        k: ratio.k1,
        value: hits as f64 / k1,
        threshold: as_f64(threshold),
        continuous,
        continuous_on_grid: grid,
    })
}

fn min_bound(b: Auc, ratio: ClassRatio) -> Result<PpvBound, EnvelopeError> {
    let (norm, _, swapped) = normalize_hits(ratio, ratio.k1)?;
    let mut found = norm.k1;
    let mut threshold = Rational::from_integer(1);
    for i in 0..=norm.k1 {
        let t = auc_max_exact(i, norm)?;
        if b.within(t) {
            found = i;
            threshold = t;
            break;
        }
    }
    let hits = denormalize_hits(found, ratio, swapped);
    let continuous = denormalize_ppv(continuous_min_ppv(b.as_f64(), norm), ratio, swapped);
    let k1 = ratio.k1 as f64;
    let floor_hits = (continuous * k1 + ppv::INTEGRAL_TOLERANCE)
        .floor()
        .max(*ratio.feasible_hits().start() as f64);
    Ok(PpvBound {
        hits,
        k: ratio.k1,
        value: hits as f64 / k1,
        threshold: as_f64(threshold),
        continuous,
        continuous_on_grid: (floor_hits / k1).clamp(0.0, 1.0),
    })
}

/// Greatest `PPV_k` of any ranking whose AUC is `b` (within
/// [`BOUND_TOLERANCE`]).
pub fn ppvk_max_given_auc(b: f64, ratio: ClassRatio) -> Result<PpvBound, EnvelopeError> {
    check_auc(b)?;
    max_bound(Auc::Float(b), ratio)
}

/// Least `PPV_k` of any ranking whose AUC is `b` (within
/// [`BOUND_TOLERANCE`]).
pub fn ppvk_min_given_auc(b: f64, ratio: ClassRatio) -> Result<PpvBound, EnvelopeError> {
    check_auc(b)?;
    min_bound(Auc::Float(b), ratio)
}

/// [`ppvk_max_given_auc`] with an exact AUC and exact comparisons.
pub fn ppvk_max_given_auc_exact(b: Rational, ratio: ClassRatio) -> Result<PpvBound, EnvelopeError> {
    check_auc(as_f64(b))?;
    max_bound(Auc::Exact(b), ratio)
}

/// [`ppvk_min_given_auc`] with an exact AUC and exact comparisons.
pub fn ppvk_min_given_auc_exact(b: Rational, ratio: ClassRatio) -> Result<PpvBound, EnvelopeError> {
    check_auc(as_f64(b))?;
    min_bound(Auc::Exact(b), ratio)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeSample {
    pub hits: u64,
    pub a: f64,
    pub auc_min: f64,
    pub auc_max: f64,
}

/// AUC envelope sampled at every feasible `a = i / k1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeCurve {
    pub ratio: ClassRatio,
    pub samples: Vec<EnvelopeSample>,
}

/// Tabulates both closed forms at every feasible hit level, lowest first.
///
/// For `k1 <= k2` this is `k1 + 1` samples; otherwise hit counts below
/// `k1 - k2` cannot occur and are skipped.
pub fn envelope_curve(ratio: ClassRatio) -> EnvelopeCurve {
    let samples = ratio
        .feasible_hits()
        .map(|hits| EnvelopeSample {
            hits,
            a: hits as f64 / ratio.k1 as f64,
            // hits come from the feasible range, so these cannot fail
            auc_min: as_f64(auc_min_exact(hits, ratio).expect("feasible")),
            auc_max: as_f64(auc_max_exact(hits, ratio).expect("feasible")),
        })
        .collect();
    EnvelopeCurve { ratio, samples }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PpvEnvelopeRow {
    pub b: f64,
    pub ppv_min: f64,
    pub ppv_max: f64,
}

/// PPV interval over an AUC grid `0, step, 2 step, ..., 1`.
pub fn ppv_envelope_grid(
    ratio: ClassRatio,
    step: f64,
) -> Result<Vec<PpvEnvelopeRow>, EnvelopeError> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(EnvelopeError::OutOfRange {
            what: "grid step",
            value: step,
        });
    }
    let count = (1.0 / step + 1e-9).floor() as u64;
    let mut bs: Vec<f64> = (0..=count).map(|i| (i as f64 * step).min(1.0)).collect();
    if *bs.last().expect("non-empty") < 1.0 {
        bs.push(1.0);
    }
    bs.into_iter()
        .map(|b| {
            Ok(PpvEnvelopeRow {
                b,
                ppv_min: ppvk_min_given_auc(b, ratio)?.value,
                ppv_max: ppvk_max_given_auc(b, ratio)?.value,
            })
        })
        .collect()
}
