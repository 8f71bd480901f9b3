//! C+L band channel plan and spectral-overlap contention checks.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in THz·nm, so that `f[THz] = C / λ[nm]`.
pub const SPEED_OF_LIGHT_THZ_NM: f64 = 299_792.458;

/// ITU-T G.694.1 grid anchor.
pub const GRID_ANCHOR_THZ: f64 = 193.1;

// Touching edges must not be reported as overlap after THz↔GHz rounding.
const EDGE_TOLERANCE_GHZ: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Band {
    C,
    L,
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Band::C => "C",
            Band::L => "L",
        })
    }
}

/// Closed frequency interval in THz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreqRange {
    pub min_thz: f64,
    pub max_thz: f64,
}

impl FreqRange {
    pub fn new(min_thz: f64, max_thz: f64) -> Self {
        Self { min_thz, max_thz }
    }

    pub fn contains(&self, f_thz: f64) -> bool {
        f_thz >= self.min_thz && f_thz <= self.max_thz
    }

    fn overlaps(&self, other: &FreqRange) -> bool {
        self.min_thz <= other.max_thz && other.min_thz <= self.max_thz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPlan {
    c_range: FreqRange,
    l_range: FreqRange,
    spacing_ghz: f64,
}

impl Default for BandPlan {
    /// C band spans 4.8 THz; the L band edge is widened to 191.0 THz so the
    /// 1571.445 nm test channel (190.775 THz) is enclosed.
    fn default() -> Self {
        Self {
            c_range: FreqRange::new(191.30, 196.10),
            l_range: FreqRange::new(184.50, 191.00),
            spacing_ghz: 87.5,
        }
    }
}

impl BandPlan {
    pub fn new(c_range: FreqRange, l_range: FreqRange, spacing_ghz: f64) -> Result<Self> {
        for (name, r) in [("C", c_range), ("L", l_range)] {
            if !(r.min_thz.is_finite() && r.max_thz.is_finite() && r.min_thz > 0.0 && r.min_thz < r.max_thz) {
                return Err(Error::Domain(format!(
                    "{name} band range [{}, {}] THz is not a valid interval",
                    r.min_thz, r.max_thz
                )));
            }
        }
        if c_range.overlaps(&l_range) {
            return Err(Error::Domain("C and L band ranges overlap".into()));
        }
        if !(spacing_ghz > 0.0 && spacing_ghz.is_finite()) {
            return Err(Error::Domain(format!("grid spacing must be > 0, got {spacing_ghz}")));
        }
        Ok(Self {
            c_range,
            l_range,
            spacing_ghz,
        })
    }

    pub fn c_range(&self) -> FreqRange {
        self.c_range
    }

    pub fn l_range(&self) -> FreqRange {
        self.l_range
    }

    pub fn spacing_ghz(&self) -> f64 {
        self.spacing_ghz
    }

    pub fn band_of(&self, f_thz: f64) -> Option<Band> {
        if self.c_range.contains(f_thz) {
            Some(Band::C)
        } else if self.l_range.contains(f_thz) {
            Some(Band::L)
        } else {
            None
        }
    }

    /// Whether `f_thz` sits on the fixed grid `anchor + i·spacing`.
    pub fn is_on_grid(&self, f_thz: f64) -> bool {
        let steps = (f_thz - GRID_ANCHOR_THZ) * 1000.0 / self.spacing_ghz;
        (steps - steps.round()).abs() * self.spacing_ghz < EDGE_TOLERANCE_GHZ * 1e3
    }
}

/// A spectral slot. Channels are compared by overlap, not grid index, so
/// flexgrid plans need no special handling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    center_thz: f64,
    width_ghz: f64,
    band: Band,
}

impl Channel {
    pub fn from_frequency(center_thz: f64, width_ghz: f64, plan: &BandPlan) -> Result<Self> {
        if !(width_ghz > 0.0 && width_ghz.is_finite()) {
            return Err(Error::Domain(format!("channel width must be > 0 GHz, got {width_ghz}")));
        }
        let band = plan.band_of(center_thz).ok_or_else(|| {
            Error::Range(format!("{center_thz:.4} THz lies outside the C and L bands"))
        })?;
        Ok(Self {
            center_thz,
            width_ghz,
            band,
        })
    }

    pub fn from_wavelength(lambda_nm: f64, width_ghz: f64, plan: &BandPlan) -> Result<Self> {
        if !(lambda_nm > 0.0 && lambda_nm.is_finite()) {
            return Err(Error::Domain(format!("wavelength must be > 0 nm, got {lambda_nm}")));
        }
        Self::from_frequency(SPEED_OF_LIGHT_THZ_NM / lambda_nm, width_ghz, plan)
            .map_err(|e| match e {
                Error::Range(_) => Error::Range(format!(
                    "{lambda_nm} nm lies outside the C and L bands"
                )),
                other => other,
            })
    }

    pub fn center_thz(&self) -> f64 {
        self.center_thz
    }

    pub fn width_ghz(&self) -> f64 {
        self.width_ghz
    }

    pub fn band(&self) -> Band {
        self.band
    }

    pub fn wavelength_nm(&self) -> f64 {
        SPEED_OF_LIGHT_THZ_NM / self.center_thz
    }

    pub fn is_disjoint(&self, other: &Channel) -> bool {
        channels_disjoint(self, other)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.4} THz/{} GHz ({})",
            self.center_thz, self.width_ghz, self.band
        )
    }
}

pub fn channel_from_wavelength(lambda_nm: f64, width_ghz: f64, plan: &BandPlan) -> Result<Channel> {
    Channel::from_wavelength(lambda_nm, width_ghz, plan)
}

/// True iff the two slots do not overlap. Touching edges are disjoint.
pub fn channels_disjoint(a: &Channel, b: &Channel) -> bool {
    let separation_ghz = (a.center_thz - b.center_thz).abs() * 1000.0;
    separation_ghz + EDGE_TOLERANCE_GHZ >= (a.width_ghz + b.width_ghz) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TEST_WAVELENGTHS_NM: [f64; 6] = [1530.725, 1545.92, 1561.419, 1571.445, 1588.199, 1605.314];

    #[test]
    fn wavelength_conversion() {
        let plan = BandPlan::default();
        let c = channel_from_wavelength(1530.725, 87.5, &plan).unwrap();
        assert!((c.center_thz() - 195.850).abs() < 0.001);
        assert_eq!(c.band(), Band::C);
        let l = channel_from_wavelength(1605.314, 87.5, &plan).unwrap();
        assert!((l.center_thz() - 186.750).abs() < 0.001);
        assert_eq!(l.band(), Band::L);
        assert!(matches!(
            channel_from_wavelength(1450.0, 87.5, &plan),
            Err(Error::Range(_))
        ));
        assert!(channel_from_wavelength(1550.0, 0.0, &plan).is_err());
    }

    #[test]
    fn test_wavelengths_fit_bands_and_are_disjoint() {
        let plan = BandPlan::default();
        let chans: Vec<_> = TEST_WAVELENGTHS_NM
            .iter()
            .map(|&nm| channel_from_wavelength(nm, 87.5, &plan).unwrap())
            .collect();
        let bands: Vec<_> = chans.iter().map(Channel::band).collect();
        assert_eq!(bands, [Band::C, Band::C, Band::C, Band::L, Band::L, Band::L]);
        for (i, a) in chans.iter().enumerate() {
            for b in &chans[i + 1..] {
                assert!(channels_disjoint(a, b));
            }
        }
    }

    #[test]
    fn disjointness_boundaries() {
        let plan = BandPlan::default();
        let a = Channel::from_frequency(193.1, 87.5, &plan).unwrap();
        assert!(!channels_disjoint(&a, &a));
        let touching = Channel::from_frequency(193.1875, 87.5, &plan).unwrap();
        assert!(channels_disjoint(&a, &touching));
        let overlap = Channel::from_frequency(193.15, 87.5, &plan).unwrap();
        assert!(!channels_disjoint(&a, &overlap));
    }

    #[test]
    fn band_plan_validation() {
        let bad = BandPlan::new(FreqRange::new(190.0, 196.0), FreqRange::new(185.0, 191.0), 50.0);
        assert!(bad.is_err());
        assert!(BandPlan::new(FreqRange::new(191.3, 196.1), FreqRange::new(184.5, 191.0), 0.0).is_err());
        let plan = BandPlan::default();
        assert!(plan.is_on_grid(193.1));
        assert!(plan.is_on_grid(193.1875));
        assert!(!plan.is_on_grid(193.15));
    }

    proptest! {
        #[test]
        fn disjoint_symmetric(f1 in 191.5f64..196.0, f2 in 191.5f64..196.0, w1 in 12.5f64..150.0, w2 in 12.5f64..150.0) {
            let plan = BandPlan::default();
            let a = Channel::from_frequency(f1, w1, &plan).unwrap();
            let b = Channel::from_frequency(f2, w2, &plan).unwrap();
            prop_assert_eq!(channels_disjoint(&a, &b), channels_disjoint(&b, &a));
            prop_assert!(!channels_disjoint(&a, &a));
        }

        #[test]
        fn wavelength_round_trip(nm in 1530.0f64..1620.0) {
            let ch = channel_from_wavelength(nm, 50.0, &BandPlan::default());
            if let Ok(ch) = ch {
                prop_assert!(((ch.wavelength_nm() - nm) / nm).abs() < 1e-9);
            }
        }
    }
}
