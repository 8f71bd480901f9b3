//! Serial-MZI variable coupler used as the unfiltered N×1 combiner.
//!
//! Stage 1 sits at the blocked end of the bus and stage `len` next to the
//! common output. Input `i` is coupled onto the bus by stage `i` and then
//! passes the bar port of every later stage, so its through power is
//! `r_i · Π_{j>i} (1 − r_j)`. With the schedule `r_i = 1/i` every active
//! input reaches the output with exactly `1/k` of its power.

use crate::error::{Error, Result};
use crate::linkmath::{splitter_loss, Db};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MziStage {
    coupling_ratio: f64,
}

impl MziStage {
    pub fn new(coupling_ratio: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&coupling_ratio) {
            return Err(Error::Domain(format!(
                "coupling ratio must lie in [0, 1], got {coupling_ratio}"
            )));
        }
        Ok(Self { coupling_ratio })
    }

    /// Stage driven by a heater phase shift.
    pub fn from_phase(phase_rad: f64) -> Self {
        Self {
            coupling_ratio: mzi_ratio_from_phase(phase_rad),
        }
    }

    pub fn coupling_ratio(&self) -> f64 {
        self.coupling_ratio
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplerCascade {
    stages: Vec<MziStage>,
}

impl CouplerCascade {
    pub fn new(stages: Vec<MziStage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::Domain("a coupler cascade needs at least one stage".into()));
        }
        Ok(Self { stages })
    }

    pub fn from_ratios(ratios: &[f64]) -> Result<Self> {
        let stages = ratios
            .iter()
            .map(|&r| MziStage::new(r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(stages)
    }

    /// Cascade configured to merge `k` inputs with equal share.
    pub fn confluence(k: u32) -> Result<Self> {
        Self::from_ratios(&stage_ratios(k)?)
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn stages(&self) -> &[MziStage] {
        &self.stages
    }

    pub fn through_power(&self, input_index: usize) -> Result<f64> {
        through_power(self, input_index)
    }
}

/// Coupling ratios `[1, 1/2, …, 1/k]` for a `k`-way confluence.
pub fn stage_ratios(k: u32) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::Domain("confluence needs k >= 1".into()));
    }
    Ok((1..=k).map(|i| 1.0 / f64::from(i)).collect())
}

/// Fraction of input `input_index` (1-based) power reaching the common port.
pub fn through_power(cascade: &CouplerCascade, input_index: usize) -> Result<f64> {
    let n = cascade.stages.len();
    if input_index == 0 || input_index > n {
        return Err(Error::IndexOutOfRange {
            what: "coupler input",
            value: u32::try_from(input_index).unwrap_or(u32::MAX),
            max: u32::try_from(n).unwrap_or(u32::MAX),
        });
    }
    let coupled = cascade.stages[input_index - 1].coupling_ratio;
    Ok(cascade.stages[input_index..]
        .iter()
        .fold(coupled, |p, s| p * (1.0 - s.coupling_ratio)))
}

/// Loss seen by each input of a `k`-way equal confluence.
pub fn confluence_loss(k: u32) -> Result<Db> {
    if k == 0 {
        return Err(Error::Domain("confluence needs k >= 1".into()));
    }
    splitter_loss(k)
}

/// Cross-port power ratio of a balanced MZI with ideal 50:50 couplers.
pub fn mzi_ratio_from_phase(phase_rad: f64) -> f64 {
    (phase_rad / 2.0).sin().powi(2).clamp(0.0, 1.0)
}
