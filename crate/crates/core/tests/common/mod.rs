#![allow(dead_code)]

use aucgap::ranking::{build_ranking, Label, Ranking, ScoredRecord, TiePolicy};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// Random ranking with `n` in `2..=max_n` and both classes present.
///
/// With `ties`, scores come from a coarse grid so equal scores across
/// classes are common; otherwise every score is distinct.
pub fn random_ranking<R: Rng>(rng: &mut R, max_n: usize, ties: bool) -> Ranking {
    let n = rng.random_range(2..=max_n);
    let k1 = rng.random_range(1..n);
    let mut labels: Vec<Label> = (0..n)
        .map(|i| {
            if i < k1 {
                Label::Positive
            } else {
                Label::Negative
            }
        })
        .collect();
    labels.shuffle(rng);
    // shift positives up by a random amount so AUC spans the whole range
    let shift: f64 = rng.random_range(-2.0..2.0);
    let raw: Vec<f64> = labels
        .iter()
        .map(|l| rng.random_range(0.0..4.0) + if l.is_positive() { shift } else { 0.0 })
        .collect();
    let scores: Vec<f64> = if ties {
        let cells = rng.random_range(2..=20) as f64;
        raw.iter().map(|x| (x * cells / 4.0).round()).collect()
    } else {
        // replace values by their rank so no two scores coincide
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));
        let mut rank = vec![0.0; n];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r as f64;
        }
        rank
    };
    let records = labels
        .iter()
        .zip(&scores)
        .enumerate()
        .map(|(i, (&label, &score))| ScoredRecord::new(format!("id{i:05}"), score, label).unwrap())
        .collect();
    build_ranking(records, TiePolicy::ByIdAscending).unwrap()
}

/// Strict ranking for every `n`-bit label pattern with both classes present.
pub fn all_label_patterns(n: usize) -> impl Iterator<Item = Ranking> {
    (0u32..1 << n).filter_map(move |mask| {
        let labels: Vec<Label> = (0..n)
            .map(|i| {
                if mask >> i & 1 == 1 {
                    Label::Positive
                } else {
                    Label::Negative
                }
            })
            .collect();
        let k1 = mask.count_ones() as usize;
        (k1 > 0 && k1 < n).then(|| Ranking::from_labels(&labels).unwrap())
    })
}
