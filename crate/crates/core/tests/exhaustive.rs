mod common;

use aucgap::envelopes::{self, ClassRatio};
use aucgap::oracle::{binomial, enumerate_arrangements};
use aucgap::ppv::ppv_base_rate;
use aucgap::ranking::{reverse_classifier, Ranking};
use aucgap::roc::auc_pairwise;

fn ratio_of(r: &Ranking) -> ClassRatio {
    ClassRatio::new(r.k1() as u64, r.k2() as u64).unwrap()
}

/// Correct pairs counted position by position.
fn brute_pairs(labels: &[bool]) -> u64 {
    let mut pairs = 0;
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            pairs += (labels[i] && !labels[j]) as u64;
        }
    }
    pairs
}

#[test]
fn class_swap_symmetry_up_to_ten() {
    for n in 2..=10 {
        for r in common::all_label_patterns(n) {
            let rev = reverse_classifier(&r);
            assert_eq!(
                auc_pairwise(&r).unwrap().exact(),
                auc_pairwise(&rev).unwrap().exact()
            );
            assert_eq!(rev.k1(), r.k2());
        }
    }
}

#[test]
fn pair_count_decomposes_at_every_split() {
    for n in 2..=10 {
        for r in common::all_label_patterns(n) {
            let labels: Vec<bool> = r.labels().map(|l| l.is_positive()).collect();
            let total = auc_pairwise(&r).unwrap().correct_pairs as u64;
            assert_eq!(total, brute_pairs(&labels));
            for s in 0..=n {
                let (head, tail) = labels.split_at(s);
                let cross = head.iter().filter(|&&p| p).count() as u64
                    * tail.iter().filter(|&&p| !p).count() as u64;
                assert_eq!(total, brute_pairs(head) + brute_pairs(tail) + cross);
            }
        }
    }
}

#[test]
fn sandwich_up_to_twelve() {
    for n in 2..=12 {
        for r in common::all_label_patterns(n) {
            let ratio = ratio_of(&r);
            let ppv = ppv_base_rate(&r).unwrap();
            let auc = auc_pairwise(&r).unwrap().exact();
            let hits = ppv.hits as u64;
            assert!(envelopes::auc_min_exact(hits, ratio).unwrap() <= auc);
            assert!(auc <= envelopes::auc_max_exact(hits, ratio).unwrap());
            let lo = envelopes::ppvk_min_given_auc_exact(auc, ratio).unwrap();
            let hi = envelopes::ppvk_max_given_auc_exact(auc, ratio).unwrap();
            assert!(lo.hits <= hits && hits <= hi.hits, "{lo:?} {hits} {hi:?}");
        }
    }
}

#[test]
fn arrangement_counts_per_hit_level() {
    for n in 2..=12u64 {
        for k1 in 1..n {
            let k2 = n - k1;
            let stats = enumerate_arrangements(ClassRatio::new(k1, k2).unwrap()).unwrap();
            assert_eq!(stats.arrangements(), binomial(n, k1));
            for (&h, level) in &stats.per_hits {
                assert_eq!(level.count, binomial(k1, h) * binomial(k2, k1 - h));
            }
        }
    }
}

#[test]
fn tight_ppv_bounds_are_attained() {
    // every tight bound at an attainable AUC is realised by some arrangement
    for n in 2..=10 {
        let patterns: Vec<Ranking> = common::all_label_patterns(n).collect();
        for r in &patterns {
            let ratio = ratio_of(r);
            let auc = auc_pairwise(r).unwrap().exact();
            let hi = envelopes::ppvk_max_given_auc_exact(auc, ratio).unwrap();
            let lo = envelopes::ppvk_min_given_auc_exact(auc, ratio).unwrap();
            let same_ratio_auc = |h: u64| {
                patterns.iter().any(|q| {
                    q.k1() == r.k1()
                        && ppv_base_rate(q).unwrap().hits as u64 == h
                        && auc_pairwise(q).unwrap().exact() == auc
                })
            };
            assert!(same_ratio_auc(hi.hits) && same_ratio_auc(lo.hits));
        }
    }
}
