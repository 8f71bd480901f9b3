//! Switch fabric of the hybrid transponder aggregator.
//!
//! Each transponder port feeds a 1×(M+L) switch. The first M outputs go to
//! per-degree N×1 variable couplers (unfiltered path α); the remaining L go
//! to shared N×1 WSS units (filtered path β) whose common ports are steered
//! to a degree by an L×M matrix switch. A 2×1 switch per degree selects α,
//! β, or combines both when operated as a coupler.

mod budget;
mod reconfig;
mod state;

use std::fmt;

use serde::Serialize;

pub use budget::{mcs_evaluate, mxn_wss_evaluate, wss_function_count_mxn, Evaluation, LossBudgetParams};
pub use reconfig::{ReconfigPlan, SwitchStep};
pub use state::FabricState;

use crate::error::{Error, Result};
use crate::grid::Channel;
use crate::linkmath::Db;

/// Default transmitter OSNR of an OpenROADM transponder.
pub const DEFAULT_TOSNR_DB: Db = Db(36.0);
/// Default out-of-band noise from each co-propagating transponder.
pub const DEFAULT_OOB_OSNR_DB: Db = Db(43.0);

/// Number of shared WSS units needed so that every degree carrying more than
/// `k` signals can be filtered: `floor(n / (k + 1))`.
pub fn required_wss_count(n: u32, k: u32) -> Result<u32> {
    if n == 0 || k == 0 {
        return Err(Error::Domain(format!(
            "required_wss_count needs n >= 1 and k >= 1, got n={n}, k={k}"
        )));
    }
    Ok(n / (k + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FabricConfig {
    n_transponders: u32,
    m_degrees: u32,
    k_threshold: u32,
    l_wss: u32,
}

impl FabricConfig {
    /// Configuration with the WSS count sized by [`required_wss_count`].
    pub fn new(n: u32, m: u32, k: u32) -> Result<Self> {
        Self::with_wss_count(n, m, k, None)
    }

    pub fn with_wss_count(n: u32, m: u32, k: u32, l: Option<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("n (transponders) must be >= 1".into()));
        }
        if m == 0 {
            return Err(Error::InvalidConfig("m (degrees) must be >= 1".into()));
        }
        if k == 0 || k > n {
            return Err(Error::InvalidConfig(format!(
                "k must satisfy 1 <= k <= n (n={n}), got {k}"
            )));
        }
        let l_wss = match l {
            Some(l) => l,
            None => required_wss_count(n, k)?,
        };
        Ok(Self {
            n_transponders: n,
            m_degrees: m,
            k_threshold: k,
            l_wss,
        })
    }

    pub fn n(&self) -> u32 {
        self.n_transponders
    }

    pub fn m(&self) -> u32 {
        self.m_degrees
    }

    pub fn k(&self) -> u32 {
        self.k_threshold
    }

    pub fn l(&self) -> u32 {
        self.l_wss
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PathKind {
    /// Unfiltered route through the degree's variable coupler.
    Alpha,
    /// Filtered route through the given WSS unit (1-based).
    Beta(u32),
}

impl PathKind {
    pub fn is_alpha(&self) -> bool {
        matches!(self, PathKind::Alpha)
    }

    pub fn wss(&self) -> Option<u32> {
        match *self {
            PathKind::Alpha => None,
            PathKind::Beta(w) => Some(w),
        }
    }
}

impl fmt::Display for PathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathKind::Alpha => f.write_str("alpha"),
            PathKind::Beta(w) => write!(f, "beta:{w}"),
        }
    }
}

/// Setting of a degree's 2×1 output switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub enum OutputMode {
    #[default]
    AlphaOnly,
    BetaOnly,
    CouplerMode,
}

impl fmt::Display for OutputMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputMode::AlphaOnly => "alpha-only",
            OutputMode::BetaOnly => "beta-only",
            OutputMode::CouplerMode => "coupler",
        })
    }
}

/// A transponder asking to be connected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalRequest {
    pub trx: u32,
    pub channel: Channel,
    pub tosnr_db: Db,
    /// Out-of-band noise level of each interfering transponder.
    pub oob_osnr_db: Db,
}

impl SignalRequest {
    pub fn new(trx: u32, channel: Channel) -> Self {
        Self {
            trx,
            channel,
            tosnr_db: DEFAULT_TOSNR_DB,
            oob_osnr_db: DEFAULT_OOB_OSNR_DB,
        }
    }

    pub fn with_osnr(mut self, tosnr_db: Db, oob_osnr_db: Db) -> Self {
        self.tosnr_db = tosnr_db;
        self.oob_osnr_db = oob_osnr_db;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Connection {
    pub trx: u32,
    pub degree: u32,
    pub channel: Channel,
    pub path: PathKind,
    pub tosnr_db: Db,
    pub oob_osnr_db: Db,
}

impl Connection {
    fn from_request(req: &SignalRequest, degree: u32, path: PathKind) -> Self {
        Self {
            trx: req.trx,
            degree,
            channel: req.channel,
            path,
            tosnr_db: req.tosnr_db,
            oob_osnr_db: req.oob_osnr_db,
        }
    }
}

impl fmt::Display for Connection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}->D{} via {} [{}]", self.trx, self.degree, self.path, self.channel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AddOptions {
    /// Permit a filtered branch next to a full α group by running the
    /// degree's 2×1 switch as a coupler.
    pub allow_coupler_mode: bool,
}
