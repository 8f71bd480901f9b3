//! Scenario files, deterministic replay and report emission.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! [config]
//! n = 8
//! m = 8
//! k = 2            # l = 2 (optional, defaults to floor(n / (k + 1)))
//!
//! [band_plan]      # optional
//! c = [191.30, 196.10]
//! l = [184.50, 191.00]
//! spacing_ghz = 87.5
//!
//! [params]         # optional, any LossBudgetParams field
//! wss_db = 6.0
//!
//! [defaults]       # optional
//! tosnr_db = 36.0
//! oob_osnr_db = 43.0
//! width_ghz = 87.5
//!
//! [drop]           # optional receive-side path
//! extra_loss_db = 6.02
//! contributions = [{ osnr_db = 30.0, count = 1 }]
//!
//! [[events]]
//! kind = "add"
//! trx = 1
//! degree = 1
//! wavelength_nm = 1530.725
//! ```
//!
//! Event kinds: `add` (single `trx` with `wavelength_nm` or `freq_thz`, or a
//! `signals` array added as one group), `remove`, `move` (`trx`,
//! `to_degree`), `fiber_break` (`degree`, `to_degree`), `query` and
//! `set_params` (`params` table).

mod report;
mod run;
mod sweep;

pub use report::{compare_csv, reports_csv, run_text, sweep_csv};
pub use run::{
    compare_aggregators, run_scenario, AggregatorModel, ComparisonRow, LogEntry, PlanKind, PlanRecord,
    RunOptions, RunOutput, SignalReport,
};
pub use sweep::{parse_n_range, sweep_wss_count, SweepRow};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fabric::{FabricConfig, LossBudgetParams, SignalRequest, DEFAULT_OOB_OSNR_DB, DEFAULT_TOSNR_DB};
use crate::grid::{BandPlan, Channel, FreqRange};
use crate::linkmath::{Db, OsnrContribution};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: FabricConfig,
    pub band_plan: BandPlan,
    pub params: LossBudgetParams,
    pub defaults: Defaults,
    pub drop: DropSide,
    pub events: Vec<ScenarioEvent>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Defaults {
    pub tosnr_db: Db,
    pub oob_osnr_db: Db,
    pub width_ghz: f64,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            tosnr_db: DEFAULT_TOSNR_DB,
            oob_osnr_db: DEFAULT_OOB_OSNR_DB,
            width_ghz: 87.5,
        }
    }
}

/// Receive-side path appended to every signal report.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DropSide {
    pub extra_loss_db: Db,
    pub contributions: Vec<OsnrContribution>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioEvent {
    Add {
        degree: u32,
        signals: Vec<SignalRequest>,
        allow_coupler_mode: bool,
    },
    Remove {
        trx: u32,
    },
    Move {
        trx: u32,
        to_degree: u32,
    },
    FiberBreak {
        degree: u32,
        to_degree: u32,
    },
    Query,
    SetParams(ParamsPatch),
}

impl ScenarioEvent {
    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioEvent::Add { .. } => "add",
            ScenarioEvent::Remove { .. } => "remove",
            ScenarioEvent::Move { .. } => "move",
            ScenarioEvent::FiberBreak { .. } => "fiber_break",
            ScenarioEvent::Query => "query",
            ScenarioEvent::SetParams(_) => "set_params",
        }
    }
}

/// Partial override of [`LossBudgetParams`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParamsPatch(toml::Table);

impl ParamsPatch {
    pub fn apply(&self, base: &LossBudgetParams) -> Result<LossBudgetParams> {
        let mut merged = toml::Table::try_from(base).map_err(|e| Error::Parse(e.to_string()))?;
        for (key, value) in &self.0 {
            merged.insert(key.clone(), value.clone());
        }
        let params: LossBudgetParams = merged
            .try_into()
            .map_err(|e: toml::de::Error| Error::semantic("params", e.message().trim().to_string()))?;
        params.validate()?;
        Ok(params)
    }
}

// Raw document schema. Field names here are the external file contract.

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    config: RawConfig,
    band_plan: Option<RawBandPlan>,
    params: Option<LossBudgetParams>,
    defaults: Option<RawDefaults>,
    drop: Option<RawDrop>,
    #[serde(default)]
    events: Vec<RawEvent>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    n: u32,
    m: u32,
    k: u32,
    l: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBandPlan {
    c: Option<[f64; 2]>,
    l: Option<[f64; 2]>,
    spacing_ghz: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDefaults {
    tosnr_db: Option<f64>,
    oob_osnr_db: Option<f64>,
    width_ghz: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDrop {
    extra_loss_db: Option<f64>,
    #[serde(default)]
    contributions: Vec<RawContribution>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawContribution {
    osnr_db: f64,
    count: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSignal {
    trx: u32,
    wavelength_nm: Option<f64>,
    freq_thz: Option<f64>,
    width_ghz: Option<f64>,
    tosnr_db: Option<f64>,
    oob_osnr_db: Option<f64>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawEvent {
    Add {
        degree: u32,
        trx: Option<u32>,
        wavelength_nm: Option<f64>,
        freq_thz: Option<f64>,
        width_ghz: Option<f64>,
        tosnr_db: Option<f64>,
        oob_osnr_db: Option<f64>,
        signals: Option<Vec<RawSignal>>,
        coupler: Option<bool>,
    },
    Remove {
        trx: u32,
    },
    Move {
        trx: u32,
        to_degree: u32,
    },
    FiberBreak {
        degree: u32,
        to_degree: u32,
    },
    Query {},
    SetParams {
        params: toml::Table,
    },
}

fn positive(field: String, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::semantic(field, format!("must be a finite value > 0, got {v}")))
    }
}

struct Validator<'a> {
    config: &'a FabricConfig,
    plan: &'a BandPlan,
    defaults: &'a Defaults,
}

impl Validator<'_> {
    fn trx(&self, field: &str, trx: u32) -> Result<u32> {
        if trx == 0 || trx > self.config.n() {
            return Err(Error::semantic(field, format!("transponder {trx} outside 1..={}", self.config.n())));
        }
        Ok(trx)
    }

    fn degree(&self, field: &str, degree: u32) -> Result<u32> {
        if degree == 0 || degree > self.config.m() {
            return Err(Error::semantic(field, format!("degree {degree} outside 1..={}", self.config.m())));
        }
        Ok(degree)
    }

    fn signal(&self, path: &str, s: RawSignal) -> Result<SignalRequest> {
        let trx = self.trx(&format!("{path}.trx"), s.trx)?;
        let width = match s.width_ghz {
            Some(w) => positive(format!("{path}.width_ghz"), w)?,
            None => self.defaults.width_ghz,
        };
        let channel = match (s.wavelength_nm, s.freq_thz) {
            (Some(nm), None) => Channel::from_wavelength(nm, width, self.plan),
            (None, Some(thz)) => Channel::from_frequency(thz, width, self.plan),
            _ => {
                return Err(Error::semantic(
                    path,
                    "exactly one of wavelength_nm or freq_thz is required",
                ))
            }
        }
        .map_err(|e| Error::semantic(path, e.to_string()))?;
        let tosnr = s.tosnr_db.map_or(self.defaults.tosnr_db, Db);
        let oob = s.oob_osnr_db.map_or(self.defaults.oob_osnr_db, Db);
        for (name, v) in [("tosnr_db", tosnr), ("oob_osnr_db", oob)] {
            if !v.0.is_finite() {
                return Err(Error::semantic(format!("{path}.{name}"), "must be finite"));
            }
        }
        Ok(SignalRequest::new(trx, channel).with_osnr(tosnr, oob))
    }

    fn event(&self, idx: usize, raw: RawEvent, params: &LossBudgetParams) -> Result<ScenarioEvent> {
        let path = format!("events[{idx}]");
        Ok(match raw {
            RawEvent::Add {
                degree,
                trx,
                wavelength_nm,
                freq_thz,
                width_ghz,
                tosnr_db,
                oob_osnr_db,
                signals,
                coupler,
            } => {
                let degree = self.degree(&format!("{path}.degree"), degree)?;
                let raw_signals = match (trx, signals) {
                    (Some(trx), None) => vec![RawSignal {
                        trx,
                        wavelength_nm,
                        freq_thz,
                        width_ghz,
                        tosnr_db,
                        oob_osnr_db,
                    }],
                    (None, Some(list)) if !list.is_empty() => {
                        if wavelength_nm.is_some() || freq_thz.is_some() || width_ghz.is_some() || tosnr_db.is_some() || oob_osnr_db.is_some() {
                            return Err(Error::semantic(&path, "per-signal fields belong inside `signals` entries"));
                        }
                        list
                    }
                    _ => return Err(Error::semantic(&path, "add needs either `trx` or a non-empty `signals` array")),
                };
                let signals = raw_signals
                    .into_iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let p = if trx.is_some() { path.clone() } else { format!("{path}.signals[{i}]") };
                        self.signal(&p, s)
                    })
                    .collect::<Result<Vec<_>>>()?;
                ScenarioEvent::Add {
                    degree,
                    signals,
                    allow_coupler_mode: coupler.unwrap_or(false),
                }
            }
            RawEvent::Remove { trx } => ScenarioEvent::Remove {
                trx: self.trx(&format!("{path}.trx"), trx)?,
            },
            RawEvent::Move { trx, to_degree } => ScenarioEvent::Move {
                trx: self.trx(&format!("{path}.trx"), trx)?,
                to_degree: self.degree(&format!("{path}.to_degree"), to_degree)?,
            },
            RawEvent::FiberBreak { degree, to_degree } => {
                let degree = self.degree(&format!("{path}.degree"), degree)?;
                let to_degree = self.degree(&format!("{path}.to_degree"), to_degree)?;
                if degree == to_degree {
                    return Err(Error::semantic(format!("{path}.to_degree"), "must differ from the broken degree"));
                }
                ScenarioEvent::FiberBreak { degree, to_degree }
            }
            RawEvent::Query {} => ScenarioEvent::Query,
            RawEvent::SetParams { params: table } => {
                let patch = ParamsPatch(table);
                patch.apply(params).map_err(|e| match e {
                    Error::Semantic { field, message } => Error::Semantic {
                        field: format!("{path}.{field}"),
                        message,
                    },
                    other => other,
                })?;
                ScenarioEvent::SetParams(patch)
            }
        })
    }
}

/// Parses and fully validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Parse(e.to_string().trim_end().to_string()))?;

    let rc = raw.config;
    let config = FabricConfig::with_wss_count(rc.n, rc.m, rc.k, rc.l).map_err(|e| {
        let field = if rc.n == 0 {
            "config.n"
        } else if rc.m == 0 {
            "config.m"
        } else {
            "config.k"
        };
        Error::semantic(field, e.to_string())
    })?;

    let band_plan = match raw.band_plan {
        None => BandPlan::default(),
        Some(b) => {
            let d = BandPlan::default();
            let c = b.c.map_or(d.c_range(), |[lo, hi]| FreqRange::new(lo, hi));
            let l = b.l.map_or(d.l_range(), |[lo, hi]| FreqRange::new(lo, hi));
            BandPlan::new(c, l, b.spacing_ghz.unwrap_or(d.spacing_ghz()))
                .map_err(|e| Error::semantic("band_plan", e.to_string()))?
        }
    };

    let params = raw.params.unwrap_or_default();
    params.validate()?;

    let mut defaults = Defaults::default();
    if let Some(d) = raw.defaults {
        if let Some(v) = d.tosnr_db {
            defaults.tosnr_db = Db(positive("defaults.tosnr_db".into(), v)?);
        }
        if let Some(v) = d.oob_osnr_db {
            defaults.oob_osnr_db = Db(positive("defaults.oob_osnr_db".into(), v)?);
        }
        if let Some(v) = d.width_ghz {
            defaults.width_ghz = positive("defaults.width_ghz".into(), v)?;
        }
    }

    let mut drop = DropSide::default();
    if let Some(d) = raw.drop {
        if let Some(v) = d.extra_loss_db {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::semantic("drop.extra_loss_db", format!("must be >= 0, got {v}")));
            }
            drop.extra_loss_db = Db(v);
        }
        for (i, c) in d.contributions.into_iter().enumerate() {
            let field = format!("drop.contributions[{i}]");
            if !c.osnr_db.is_finite() {
                return Err(Error::semantic(format!("{field}.osnr_db"), "must be finite"));
            }
            drop.contributions.push(
                OsnrContribution::new(Db(c.osnr_db), c.count.unwrap_or(1))
                    .map_err(|e| Error::semantic(format!("{field}.count"), e.to_string()))?,
            );
        }
    }

    let validator = Validator {
        config: &config,
        plan: &band_plan,
        defaults: &defaults,
    };
    let events = raw
        .events
        .into_iter()
        .enumerate()
        .map(|(i, e)| validator.event(i, e, &params))
        .collect::<Result<Vec<_>>>()?;

    Ok(Scenario {
        config,
        band_plan,
        params,
        defaults,
        drop,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[config]
n = 8
m = 8
k = 2

[[events]]
kind = "add"
trx = 1
degree = 1
wavelength_nm = 1530.725
"#;

    #[test]
    fn minimal_document() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.config.l(), 2);
        assert_eq!(s.events.len(), 1);
        let ScenarioEvent::Add { signals, .. } = &s.events[0] else {
            panic!("expected add");
        };
        assert_eq!(signals[0].tosnr_db, Db(36.0));
        assert_eq!(signals[0].oob_osnr_db, Db(43.0));
        assert_eq!(signals[0].channel.width_ghz(), 87.5);
    }

    #[test]
    fn k_zero_is_semantic_error() {
        let err = parse_scenario("[config]\nn = 8\nm = 8\nk = 0\n").unwrap_err();
        assert!(matches!(&err, Error::Semantic { field, .. } if field == "config.k"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        for doc in [
            "[config]\nn = 8\nm = 8\nk = 2\nq = 1\n",
            "[config]\nn = 8\nm = 8\nk = 2\n[params]\nwss_loss = 1.0\n",
            "[config]\nn = 8\nm = 8\nk = 2\n[[events]]\nkind = \"query\"\ntrx = 1\n",
            "[config]\nn = 8\nm = 8\nk = 2\n[[events]]\nkind = \"teleport\"\n",
        ] {
            assert!(matches!(parse_scenario(doc), Err(Error::Parse(_))), "{doc}");
        }
        let err = parse_scenario("[config]\nn = 8\nm = 8\nk = 2\n[[events]]\nkind = \"set_params\"\nparams = { bogus = 1.0 }\n").unwrap_err();
        assert!(err.to_string().contains("events[0].params"), "{err}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_scenario("[config]\nn = 8\nm = \nk = 2\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn field_diagnostics() {
        let doc = "[config]\nn = 8\nm = 8\nk = 2\n[[events]]\nkind = \"add\"\ntrx = 9\ndegree = 1\nfreq_thz = 193.1\n";
        let err = parse_scenario(doc).unwrap_err();
        assert!(err.to_string().starts_with("events[0].trx"), "{err}");

        let doc = "[config]\nn = 8\nm = 8\nk = 2\n[[events]]\nkind = \"add\"\ntrx = 1\ndegree = 1\nwavelength_nm = 1450.0\n";
        assert!(matches!(parse_scenario(doc), Err(Error::Semantic { .. })));

        let doc = "[config]\nn = 8\nm = 8\nk = 2\n[[events]]\nkind = \"add\"\ntrx = 1\ndegree = 1\n";
        assert!(parse_scenario(doc).is_err());

        let doc = "[config]\nn = 8\nm = 8\nk = 2\n[defaults]\ntosnr_db = -3.0\n";
        assert!(parse_scenario(doc).unwrap_err().to_string().starts_with("defaults.tosnr_db"));
    }

    #[test]
    fn group_add_and_patch() {
        let doc = r#"
[config]
n = 8
m = 8
k = 2

[drop]
extra_loss_db = 6.02
contributions = [{ osnr_db = 30.0 }, { osnr_db = 40.0, count = 2 }]

[[events]]
kind = "add"
degree = 2
coupler = true
signals = [
  { trx = 3, freq_thz = 193.1 },
  { trx = 4, freq_thz = 193.2, tosnr_db = 35.0 },
]

[[events]]
kind = "set_params"
params = { wss_db = 5.0 }
"#;
        let s = parse_scenario(doc).unwrap();
        let ScenarioEvent::Add { signals, allow_coupler_mode, .. } = &s.events[0] else {
            panic!();
        };
        assert!(allow_coupler_mode);
        assert_eq!(signals.len(), 2);
        assert_eq!(signals[1].tosnr_db, Db(35.0));
        assert_eq!(s.drop.contributions.len(), 2);
        let ScenarioEvent::SetParams(patch) = &s.events[1] else {
            panic!();
        };
        let p = patch.apply(&s.params).unwrap();
        assert_eq!(p.wss_db, Db(5.0));
        assert_eq!(p.fiber_coupling_db, Db(0.6));
    }
}
