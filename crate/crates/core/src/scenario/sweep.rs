//! WSS-count sweep over transponder counts and thresholds.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::fabric::{required_wss_count, wss_function_count_mxn};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepRow {
    pub n: u32,
    pub k: u32,
    pub l_proposed: u32,
    pub wss_count_mxn: u32,
}

/// Rows ordered by `k` (as listed) then ascending `n`, whatever `exec` is.
pub fn sweep_wss_count(n_range: RangeInclusive<u32>, k_list: &[u32], m: u32, exec: Execution) -> Result<Vec<SweepRow>> {
    if n_range.is_empty() || k_list.is_empty() {
        return Err(Error::Domain("sweep needs a non-empty n range and k list".into()));
    }
    if m == 0 {
        return Err(Error::Domain("sweep needs m >= 1".into()));
    }
    let grid: Vec<(u32, u32)> = k_list
        .iter()
        .flat_map(|&k| n_range.clone().map(move |n| (n, k)))
        .collect();
    map_ordered(&grid, exec, |&(n, k)| {
        Ok(SweepRow {
            n,
            k,
            l_proposed: required_wss_count(n, k)?,
            wss_count_mxn: wss_function_count_mxn(m),
        })
    })
    .into_iter()
    .collect()
}

/// Parses an inclusive range written `a..b` (or a single value).
pub fn parse_n_range(text: &str) -> Result<RangeInclusive<u32>> {
    let bad = || Error::Parse(format!("invalid range '{text}', expected e.g. 1..24"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
        None => (text.trim(), text.trim()),
    };
    let lo: u32 = lo.parse().map_err(|_| bad())?;
    let hi: u32 = hi.parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(lo..=hi)
}
