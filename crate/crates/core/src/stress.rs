//! Randomized state-machine exercise of [`FabricState`].
//!
//! Each sequence draws a small fabric and applies a seeded stream of adds,
//! removes, moves and fiber breaks. After every step the full invariant check
//! runs; failed operations must leave the state untouched, and every
//! successful add must be undone exactly by removing what it added.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec::{map_ordered, Execution};
use crate::fabric::{AddOptions, FabricConfig, FabricState, SignalRequest};
use crate::grid::{BandPlan, Channel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StressConfig {
    pub sequences: u64,
    pub steps: usize,
    pub seed: u64,
    pub max_n: u32,
    pub max_m: u32,
    pub max_k: u32,
}

impl Default for StressConfig {
    fn default() -> Self {
        Self {
            sequences: 1_000,
            steps: 24,
            seed: 0x5eed,
            max_n: 12,
            max_m: 6,
            max_k: 4,
        }
    }
}

/// Operation tallies across all sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCounts {
    pub add_ok: u64,
    pub add_err: u64,
    pub remove_ok: u64,
    pub remove_err: u64,
    pub move_ok: u64,
    pub move_err: u64,
    pub break_ok: u64,
    pub break_err: u64,
}

impl OpCounts {
    fn merge(&mut self, o: &OpCounts) {
        self.add_ok += o.add_ok;
        self.add_err += o.add_err;
        self.remove_ok += o.remove_ok;
        self.remove_err += o.remove_err;
        self.move_ok += o.move_ok;
        self.move_err += o.move_err;
        self.break_ok += o.break_ok;
        self.break_err += o.break_err;
    }

    pub fn total(&self) -> u64 {
        self.add_ok
            + self.add_err
            + self.remove_ok
            + self.remove_err
            + self.move_ok
            + self.move_err
            + self.break_ok
            + self.break_err
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StressFailure {
    pub sequence: u64,
    pub step: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StressReport {
    pub sequences: u64,
    pub ops: OpCounts,
    /// Successful adds whose inverse restored the prior state.
    pub round_trips: u64,
    pub failures: Vec<StressFailure>,
}

/// Six 87.5 GHz channels 50 GHz apart: neighbours overlap, every second one
/// is disjoint.
fn channel_pool() -> Vec<Channel> {
    let plan = BandPlan::default();
    (0..6)
        .map(|i| Channel::from_frequency(193.1 + 0.05 * f64::from(i), 87.5, &plan).expect("pool is in band"))
        .collect()
}

struct Sequence<'a> {
    rng: ChaCha8Rng,
    pool: &'a [Channel],
    state: FabricState,
    ops: OpCounts,
    round_trips: u64,
}

impl Sequence<'_> {
    fn step(&mut self) -> Result<(), String> {
        let before = self.state.clone();
        let cfg = *self.state.config();
        let m = cfg.m();
        let outcome = match self.rng.gen_range(0..10) {
            0..=4 => self.add(),
            5..=6 => {
                let trx = self.rng.gen_range(1..=cfg.n());
                let ok = self.state.remove_connection(trx).is_ok();
                bump(ok, &mut self.ops.remove_ok, &mut self.ops.remove_err);
                unchanged_unless(ok, &before, &self.state, "remove")
            }
            7..=8 => {
                let trx = self.rng.gen_range(1..=cfg.n());
                let to = self.rng.gen_range(1..=m);
                let ok = match self.state.plan_reconfiguration(trx, to) {
                    Ok(plan) => {
                        self.state.apply_plan(&plan).map_err(|e| format!("planned move failed to apply: {e}"))?;
                        true
                    }
                    Err(_) => false,
                };
                bump(ok, &mut self.ops.move_ok, &mut self.ops.move_err);
                unchanged_unless(ok, &before, &self.state, "move")
            }
            _ => {
                let broken = self.rng.gen_range(1..=m);
                let to = self.rng.gen_range(1..=m);
                let ok = match self.state.fiber_break_reroute(broken, to) {
                    Ok(plan) => {
                        self.state.apply_plan(&plan).map_err(|e| format!("reroute failed to apply: {e}"))?;
                        if self.state.connections_on(broken).next().is_some() {
                            return Err(format!("D{broken} still carries traffic after reroute"));
                        }
                        true
                    }
                    Err(_) => false,
                };
                bump(ok, &mut self.ops.break_ok, &mut self.ops.break_err);
                unchanged_unless(ok, &before, &self.state, "fiber break")
            }
        };
        outcome?;
        self.state.validate().map_err(|e| e.to_string())
    }

    fn add(&mut self) -> Result<(), String> {
        let cfg = *self.state.config();
        let degree = self.rng.gen_range(1..=cfg.m());
        let group = if self.rng.gen_bool(0.2) { self.rng.gen_range(2..=3) } else { 1 };
        let mut ports: Vec<u32> = (1..=cfg.n()).collect();
        ports.shuffle(&mut self.rng);
        let requests: Vec<SignalRequest> = ports
            .into_iter()
            .take(group)
            .map(|trx| SignalRequest::new(trx, *self.pool.choose(&mut self.rng).expect("non-empty pool")))
            .collect();
        let opts = AddOptions {
            allow_coupler_mode: self.rng.gen_bool(0.3),
        };
        let before = self.state.clone();
        match self.state.add_group(degree, &requests, opts) {
            Ok(_) => {
                self.ops.add_ok += 1;
                let mut undo = self.state.clone();
                for r in &requests {
                    undo.remove_connection(r.trx).map_err(|e| format!("undo of add failed: {e}"))?;
                }
                if undo != before {
                    return Err(format!("remove after add of {:?} did not restore the state", ports_of(&requests)));
                }
                self.round_trips += 1;
            }
            Err(e) => {
                self.ops.add_err += 1;
                if self.state != before {
                    return Err(format!("rejected add ({e}) mutated the state"));
                }
            }
        }
        Ok(())
    }
}

fn ports_of(reqs: &[SignalRequest]) -> Vec<u32> {
    reqs.iter().map(|r| r.trx).collect()
}

fn unchanged_unless(ok: bool, before: &FabricState, after: &FabricState, what: &str) -> Result<(), String> {
    if ok || before == after {
        Ok(())
    } else {
        Err(format!("rejected {what} mutated the state"))
    }
}

fn bump(ok: bool, good: &mut u64, bad: &mut u64) {
    if ok {
        *good += 1;
    } else {
        *bad += 1;
    }
}

fn random_config(rng: &mut ChaCha8Rng, cfg: &StressConfig) -> FabricConfig {
    let n = rng.gen_range(1..=cfg.max_n);
    let m = rng.gen_range(1..=cfg.max_m);
    let k = rng.gen_range(1..=cfg.max_k.min(n));
    // Occasionally undersize the WSS pool to exercise capacity errors.
    let l = if rng.gen_bool(0.2) { Some(rng.gen_range(0..=n / (k + 1))) } else { None };
    FabricConfig::with_wss_count(n, m, k, l).expect("drawn within bounds")
}

fn run_sequence(cfg: &StressConfig, index: u64, pool: &[Channel]) -> (OpCounts, u64, Option<StressFailure>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let config = random_config(&mut rng, cfg);
    let mut seq = Sequence {
        rng,
        pool,
        state: FabricState::new(config),
        ops: OpCounts::default(),
        round_trips: 0,
    };
    for step in 0..cfg.steps {
        if let Err(message) = seq.step() {
            let failure = StressFailure {
                sequence: index,
                step,
                message,
            };
            return (seq.ops, seq.round_trips, Some(failure));
        }
    }
    (seq.ops, seq.round_trips, None)
}

/// Runs `cfg.sequences` independent seeded sequences. Output does not depend
/// on `exec`.
pub fn run_stress(cfg: &StressConfig, exec: Execution) -> StressReport {
    let pool = channel_pool();
    let indices: Vec<u64> = (0..cfg.sequences).collect();
    let results = map_ordered(&indices, exec, |&i| run_sequence(cfg, i, &pool));
    let mut report = StressReport {
        sequences: cfg.sequences,
        ..Default::default()
    };
    for (ops, trips, failure) in results {
        report.ops.merge(&ops);
        report.round_trips += trips;
        report.failures.extend(failure);
    }
    report
}
