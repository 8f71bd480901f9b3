//! Sequential event replay.

use std::collections::BTreeMap;

use super::{DropSide, Scenario, ScenarioEvent};
use crate::error::{Error, Result};
use crate::fabric::{
    mcs_evaluate, mxn_wss_evaluate, AddOptions, FabricState, LossBudgetParams, PathKind, ReconfigPlan,
};
use crate::linkmath::{cascade_osnr, Db, OsnrContribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Abort on the first failing event instead of logging it.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogEntry {
    /// Zero-based position in the scenario's event list.
    pub index: usize,
    pub kind: &'static str,
    pub outcome: std::result::Result<String, String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanKind {
    Move,
    FiberBreak,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanRecord {
    pub event_index: usize,
    pub kind: PlanKind,
    pub plan: ReconfigPlan,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalReport {
    /// Ordinal of the snapshot this row belongs to, starting at 1.
    pub query: usize,
    pub signal_id: u32,
    pub trx: u32,
    pub degree: u32,
    pub path: PathKind,
    pub loss_db: Db,
    pub interferer_count: u32,
    pub osnr_at_oxc_db: Db,
    pub rosnr_db: Db,
    pub tosnr_db: Db,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub log: Vec<LogEntry>,
    pub reports: Vec<SignalReport>,
    pub plans: Vec<PlanRecord>,
    pub final_state: FabricState,
    pub final_params: LossBudgetParams,
    /// Signal id of every connection still established at the end.
    pub signal_ids: BTreeMap<u32, u32>,
}

struct Replay<'a> {
    scenario: &'a Scenario,
    state: FabricState,
    params: LossBudgetParams,
    ids: BTreeMap<u32, u32>,
    next_id: u32,
    plans: Vec<PlanRecord>,
    reports: Vec<SignalReport>,
    queries: usize,
}

impl Replay<'_> {
    fn apply(&mut self, index: usize, event: &ScenarioEvent) -> Result<String> {
        match event {
            ScenarioEvent::Add {
                degree,
                signals,
                allow_coupler_mode,
            } => {
                let opts = AddOptions {
                    allow_coupler_mode: *allow_coupler_mode,
                };
                let paths = self.state.add_group(*degree, signals, opts)?;
                let mut parts = Vec::with_capacity(signals.len());
                for (req, path) in signals.iter().zip(paths) {
                    self.next_id += 1;
                    self.ids.insert(req.trx, self.next_id);
                    parts.push(format!("P{}->D{degree} via {path}", req.trx));
                }
                Ok(parts.join(", "))
            }
            ScenarioEvent::Remove { trx } => {
                let conn = self.state.remove_connection(*trx)?;
                self.ids.remove(trx);
                Ok(format!("released {conn}"))
            }
            ScenarioEvent::Move { trx, to_degree } => {
                let plan = self.state.plan_reconfiguration(*trx, *to_degree)?;
                self.commit(index, PlanKind::Move, plan)
            }
            ScenarioEvent::FiberBreak { degree, to_degree } => {
                let plan = self.state.fiber_break_reroute(*degree, *to_degree)?;
                self.commit(index, PlanKind::FiberBreak, plan)
            }
            ScenarioEvent::Query => {
                self.snapshot()?;
                Ok(format!("snapshot {} ({} signals)", self.queries, self.state.connection_count()))
            }
            ScenarioEvent::SetParams(patch) => {
                self.params = patch.apply(&self.params)?;
                Ok("parameters updated".into())
            }
        }
    }

    fn commit(&mut self, index: usize, kind: PlanKind, plan: ReconfigPlan) -> Result<String> {
        self.state.apply_plan(&plan)?;
        let summary = format!(
            "{} steps, hitless={}, disrupted=[{}]",
            plan.steps.len(),
            plan.hitless,
            plan.disrupted
                .iter()
                .map(|c| format!("P{}", c.trx))
                .collect::<Vec<_>>()
                .join(" ")
        );
        self.plans.push(PlanRecord {
            event_index: index,
            kind,
            plan,
        });
        Ok(summary)
    }

    fn snapshot(&mut self) -> Result<()> {
        self.queries += 1;
        let rows = signal_reports(&self.state, &self.params, &self.scenario.drop, &self.ids, self.queries)?;
        self.reports.extend(rows);
        Ok(())
    }
}

fn signal_reports(
    state: &FabricState,
    params: &LossBudgetParams,
    drop: &DropSide,
    ids: &BTreeMap<u32, u32>,
    query: usize,
) -> Result<Vec<SignalReport>> {
    state
        .connections()
        .map(|c| {
            let osnr = state.signal_osnr_at_oxc(c.trx, params)?;
            let mut chain = vec![OsnrContribution::single(osnr)];
            chain.extend_from_slice(&drop.contributions);
            Ok(SignalReport {
                query,
                signal_id: ids[&c.trx],
                trx: c.trx,
                degree: c.degree,
                path: c.path,
                loss_db: state.signal_loss(c.trx, params)? + drop.extra_loss_db,
                interferer_count: state.interferer_count(c.trx)?,
                osnr_at_oxc_db: osnr,
                rosnr_db: cascade_osnr(&chain)?,
                tosnr_db: c.tosnr_db,
            })
        })
        .collect()
}

/// Replays the scenario's events in order against an empty fabric.
///
/// Without any `query` event a single snapshot of the final state is taken.
pub fn run_scenario(s: &Scenario, opts: RunOptions) -> Result<RunOutput> {
    let mut replay = Replay {
        scenario: s,
        state: FabricState::new(s.config),
        params: s.params,
        ids: BTreeMap::new(),
        next_id: 0,
        plans: Vec::new(),
        reports: Vec::new(),
        queries: 0,
    };
    let mut log = Vec::with_capacity(s.events.len());
    for (index, event) in s.events.iter().enumerate() {
        let outcome = replay.apply(index, event);
        if let Err(e) = &outcome {
            if opts.strict {
                return Err(Error::semantic(format!("events[{index}]"), format!("{} failed: {e}", event.kind())));
            }
        }
        log.push(LogEntry {
            index,
            kind: event.kind(),
            outcome: outcome.map_err(|e| e.to_string()),
        });
    }
    if !s.events.iter().any(|e| matches!(e, ScenarioEvent::Query)) {
        replay.snapshot()?;
    }
    Ok(RunOutput {
        log,
        reports: replay.reports,
        plans: replay.plans,
        final_state: replay.state,
        final_params: replay.params,
        signal_ids: replay.ids,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AggregatorModel {
    Proposed,
    Mcs,
    MxnWss,
}

impl AggregatorModel {
    pub fn name(self) -> &'static str {
        match self {
            AggregatorModel::Proposed => "proposed",
            AggregatorModel::Mcs => "mcs",
            AggregatorModel::MxnWss => "mxn_wss",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub signal_id: u32,
    pub trx: u32,
    pub degree: u32,
    pub model: AggregatorModel,
    /// Fabric path; only meaningful for the proposed model.
    pub path: Option<PathKind>,
    pub loss_db: Db,
    pub osnr_oxc_db: Db,
}

/// Evaluates the final demand of a scenario under the proposed fabric and
/// both baselines. The MCS model sees every signal on the degree as an
/// unfiltered interferer.
pub fn compare_aggregators(s: &Scenario, opts: RunOptions) -> Result<Vec<ComparisonRow>> {
    let out = run_scenario(s, opts)?;
    let state = &out.final_state;
    let params = &out.final_params;
    let n = s.config.n();
    let mut rows = Vec::with_capacity(3 * state.connection_count());
    for c in state.connections() {
        let signal_id = out.signal_ids[&c.trx];
        let on_degree = state.connections_on(c.degree).count() as u32;
        let mcs = mcs_evaluate(n, on_degree, c.tosnr_db, c.oob_osnr_db, params)?;
        let mxn = mxn_wss_evaluate(c.tosnr_db, params);
        let row = |model, path, loss_db, osnr_oxc_db| ComparisonRow {
            signal_id,
            trx: c.trx,
            degree: c.degree,
            model,
            path,
            loss_db,
            osnr_oxc_db,
        };
        rows.push(row(
            AggregatorModel::Proposed,
            Some(c.path),
            state.signal_loss(c.trx, params)?,
            state.signal_osnr_at_oxc(c.trx, params)?,
        ));
        rows.push(row(AggregatorModel::Mcs, None, mcs.loss_db, mcs.osnr_db));
        rows.push(row(AggregatorModel::MxnWss, None, mxn.loss_db, mxn.osnr_db));
    }
    Ok(rows)
}
