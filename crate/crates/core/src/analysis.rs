//! Exhaustive check that `floor(N/(K+1))` WSS units always suffice.
//!
//! A degree needs filtering only when its demand exceeds K, and each such
//! degree consumes at least K+1 of the N transponders, so at most
//! `floor(N/(K+1))` degrees can need a WSS at once. This module confirms the
//! bound by enumerating every demand vector.

use crate::exec::{map_ordered, Execution};
use crate::fabric::required_wss_count;

/// A demand vector that needs more WSS units than the sizing rule provides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub n: u32,
    pub k: u32,
    pub demands: Vec<u32>,
    pub filtered_degrees: u32,
    pub wss_available: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SufficiencyReport {
    /// Number of (N, M, K) cases examined.
    pub cases: usize,
    /// Total demand vectors enumerated across all cases.
    pub compositions: u64,
    pub counterexamples: Vec<Counterexample>,
}

/// Visits every way of distributing `n` signals over `m` degrees
/// (weak compositions, in lexicographic order).
pub fn for_each_composition(n: u32, m: u32, mut visit: impl FnMut(&[u32])) {
    fn rec(remaining: u32, slots: &mut [u32], idx: usize, visit: &mut dyn FnMut(&[u32])) {
        if idx + 1 == slots.len() {
            slots[idx] = remaining;
            visit(slots);
            return;
        }
        for take in 0..=remaining {
            slots[idx] = take;
            rec(remaining - take, slots, idx + 1, visit);
        }
    }
    if m == 0 {
        return;
    }
    let mut slots = vec![0; m as usize];
    rec(n, &mut slots, 0, &mut visit);
}

fn check_case(n: u32, m: u32, k: u32) -> (u64, Vec<Counterexample>) {
    let wss = required_wss_count(n, k).expect("n, k >= 1");
    let mut seen = 0;
    let mut bad = Vec::new();
    for_each_composition(n, m, |d| {
        seen += 1;
        let filtered = d.iter().filter(|&&x| x > k).count() as u32;
        if filtered > wss {
            bad.push(Counterexample {
                n,
                k,
                demands: d.to_vec(),
                filtered_degrees: filtered,
                wss_available: wss,
            });
        }
    });
    (seen, bad)
}

/// Enumerates all demand vectors for `1..=n_max` transponders over
/// `1..=m_max` degrees and `1..=k_max` thresholds.
pub fn verify_wss_sufficiency(n_max: u32, m_max: u32, k_max: u32, exec: Execution) -> SufficiencyReport {
    let cases: Vec<(u32, u32, u32)> = (1..=n_max)
        .flat_map(|n| (1..=m_max).flat_map(move |m| (1..=k_max).map(move |k| (n, m, k))))
        .collect();
    let results = map_ordered(&cases, exec, |&(n, m, k)| check_case(n, m, k));
    let mut report = SufficiencyReport {
        cases: cases.len(),
        ..Default::default()
    };
    for (seen, bad) in results {
        report.compositions += seen;
        report.counterexamples.extend(bad);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> u64 {
        (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
    }

    #[test]
    fn composition_counts_match_stars_and_bars() {
        for n in 0..=7u32 {
            for m in 1..=5u32 {
                let mut count = 0u64;
                for_each_composition(n, m, |d| {
                    assert_eq!(d.iter().sum::<u32>(), n);
                    count += 1;
                });
                assert_eq!(count, binomial(u64::from(n + m - 1), u64::from(m - 1)));
            }
        }
    }

    #[test]
    fn sizing_rule_is_sufficient_and_tight() {
        let report = verify_wss_sufficiency(10, 5, 3, Execution::Sequential);
        assert!(report.counterexamples.is_empty());
        // One WSS fewer fails whenever enough degrees exist.
        let (n, k) = (9u32, 2u32);
        let mut worst = 0;
        for_each_composition(n, 3, |d| worst = worst.max(d.iter().filter(|&&x| x > k).count() as u32));
        assert_eq!(worst, required_wss_count(n, k).unwrap());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let a = verify_wss_sufficiency(8, 4, 3, Execution::Sequential);
        let b = verify_wss_sufficiency(8, 4, 3, Execution::Parallel);
        assert_eq!(a, b);
    }
}
