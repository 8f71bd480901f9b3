//! Decibel-domain algebra for splitter loss and OSNR accumulation.
//!
//! All OSNR values share one reference noise bandwidth. Noise terms are
//! summed in the linear domain and converted back to dB at the boundary.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A power ratio in dB (`10·log10` convention).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Db(pub f64);

impl Db {
    pub const ZERO: Db = Db(0.0);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn to_linear(self) -> f64 {
        db_to_linear(self)
    }
}

impl fmt::Display for Db {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "{:.*} dB", p, self.0),
            None => write!(f, "{} dB", self.0),
        }
    }
}

impl Add for Db {
    type Output = Db;
    fn add(self, rhs: Db) -> Db {
        Db(self.0 + rhs.0)
    }
}

impl Sub for Db {
    type Output = Db;
    fn sub(self, rhs: Db) -> Db {
        Db(self.0 - rhs.0)
    }
}

impl Neg for Db {
    type Output = Db;
    fn neg(self) -> Db {
        Db(-self.0)
    }
}

impl std::iter::Sum for Db {
    fn sum<I: Iterator<Item = Db>>(iter: I) -> Db {
        Db(iter.map(|d| d.0).sum())
    }
}

/// One noise source in an OSNR chain, repeated `count` times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OsnrContribution {
    pub osnr_db: Db,
    pub count: u32,
}

impl OsnrContribution {
    pub fn new(osnr_db: Db, count: u32) -> Result<Self> {
        if count == 0 {
            return Err(Error::Domain("OSNR contribution count must be >= 1".into()));
        }
        Ok(Self { osnr_db, count })
    }

    pub fn single(osnr_db: Db) -> Self {
        Self { osnr_db, count: 1 }
    }

    /// Relative noise power contributed by this entry.
    fn noise(&self) -> f64 {
        f64::from(self.count) * (-self.osnr_db).to_linear()
    }
}

pub fn db_to_linear(x: Db) -> f64 {
    10f64.powf(x.0 / 10.0)
}

pub fn linear_to_db(x: f64) -> Result<Db> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::Domain(format!(
            "linear power ratio must be positive, got {x}"
        )));
    }
    Ok(Db(10.0 * x.log10()))
}

/// Principle loss of an ideal `n`-way power splitter/combiner, `10·log10(n)`.
pub fn splitter_loss(n: u32) -> Result<Db> {
    if n == 0 {
        return Err(Error::Domain("splitter port count must be >= 1".into()));
    }
    // -10·log10(1/n), written without the reciprocal so n = 1 gives exactly 0.
    Ok(Db(10.0 * f64::from(n).log10()))
}

/// OSNR of a signal carrying its own in-band noise plus `k - 1` equal
/// out-of-band noise superpositions from other transmitters.
pub fn combine_osnr(osnr_in: Db, osnr_out: Db, k: u32) -> Result<Db> {
    match k {
        0 => Err(Error::Domain("signal count k must be >= 1".into())),
        1 => Ok(osnr_in),
        _ => cascade_osnr(&[
            OsnrContribution::single(osnr_in),
            OsnrContribution {
                osnr_db: osnr_out,
                count: k - 1,
            },
        ]),
    }
}

/// Total OSNR of independent noise contributions that add in power.
pub fn cascade_osnr(contributions: &[OsnrContribution]) -> Result<Db> {
    match contributions {
        [] => Err(Error::Domain("cascade_osnr needs at least one contribution".into())),
        [only] if only.count == 1 => Ok(only.osnr_db),
        _ => {
            if contributions.iter().any(|c| c.count == 0) {
                return Err(Error::Domain("OSNR contribution count must be >= 1".into()));
            }
            let noise: f64 = contributions.iter().map(OsnrContribution::noise).sum();
            linear_to_db(noise).map(|d| -d)
        }
    }
}
