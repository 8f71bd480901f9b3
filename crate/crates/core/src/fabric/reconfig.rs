//! Reconfiguration planning: moving a signal to another degree and
//! rerouting the traffic of a failed degree.

use std::fmt;

use super::{Connection, FabricState, PathKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum SwitchStep {
    /// Tear down the connection on this transponder port.
    Release { trx: u32 },
    UnmapWss { wss: u32, degree: u32 },
    MapWss { wss: u32, degree: u32 },
    Establish(Connection),
}

impl fmt::Display for SwitchStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SwitchStep::Release { trx } => write!(f, "release P{trx}"),
            SwitchStep::UnmapWss { wss, degree } => write!(f, "unmap WSS{wss} from D{degree}"),
            SwitchStep::MapWss { wss, degree } => write!(f, "map WSS{wss} to D{degree}"),
            SwitchStep::Establish(c) => write!(f, "establish P{}->D{} via {}", c.trx, c.degree, c.path),
        }
    }
}

/// Ordered switch changes for one reconfiguration.
///
/// `movers` are the signals the request itself relocates; `disrupted` lists
/// every other established signal that must be torn down on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconfigPlan {
    pub steps: Vec<SwitchStep>,
    pub disrupted: Vec<Connection>,
    pub movers: Vec<u32>,
    pub hitless: bool,
}

impl ReconfigPlan {
    pub fn empty() -> Self {
        Self {
            steps: Vec::new(),
            disrupted: Vec::new(),
            movers: Vec::new(),
            hitless: true,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Derives the step list that turns `before` into `after`.
    fn between(before: &FabricState, after: &FabricState, movers: Vec<u32>) -> Self {
        let mut steps = Vec::new();
        let mut disrupted = Vec::new();
        for c in before.connections() {
            if after.connection(c.trx) != Some(c) {
                steps.push(SwitchStep::Release { trx: c.trx });
                if !movers.contains(&c.trx) {
                    disrupted.push(*c);
                }
            }
        }
        for (&wss, &degree) in before.wss_map() {
            if after.wss_map().get(&wss) != Some(&degree) {
                steps.push(SwitchStep::UnmapWss { wss, degree });
            }
        }
        for (&wss, &degree) in after.wss_map() {
            if before.wss_map().get(&wss) != Some(&degree) {
                steps.push(SwitchStep::MapWss { wss, degree });
            }
        }
        for c in after.connections() {
            if before.connection(c.trx) != Some(c) {
                steps.push(SwitchStep::Establish(*c));
            }
        }
        Self {
            steps,
            hitless: disrupted.is_empty(),
            disrupted,
            movers,
        }
    }
}

impl FabricState {
    /// Plans moving the signal on `trx` to `to_degree` with the fewest
    /// disrupted signals, then the fewest signals put behind a coupler-mode
    /// output switch.
    pub fn plan_reconfiguration(&self, trx: u32, to_degree: u32) -> Result<ReconfigPlan> {
        self.check_degree(to_degree)?;
        let conn = *self.connection(trx).ok_or(Error::Inactive(trx))?;
        if conn.degree == to_degree {
            return Ok(ReconfigPlan::empty());
        }
        self.check_contention(to_degree, trx, &conn.channel, &[trx])?;

        let mut base = self.clone();
        base.remove_connection(trx)?;
        let moved = |path| Connection {
            degree: to_degree,
            path,
            ..conn
        };
        let k = self.config().k();

        let direct = match base.wss_for_degree(to_degree) {
            Some(w) => Some(PathKind::Beta(w)),
            None if base.alpha_count(to_degree) < k => Some(PathKind::Alpha),
            None => None,
        };
        if let Some(path) = direct {
            let mut after = base;
            after.raw_establish(moved(path))?;
            return self.finish(after, vec![trx]);
        }

        // The target's α group is full and it has no filtered branch, so a
        // WSS is needed. Candidates free one by folding a small filtered
        // degree back onto its α group, if no WSS is idle.
        let mut sources = vec![(0u32, base.clone())];
        for (&w, &e) in base.wss_map() {
            if e != to_degree && base.alpha_count(e) + base.beta_count(e) <= k {
                let mut st = base.clone();
                let folded: Vec<Connection> = st.connections_on(e).filter(|c| !c.path.is_alpha()).copied().collect();
                for c in &folded {
                    st.raw_release(c.trx)?;
                    st.raw_establish(Connection { path: PathKind::Alpha, ..*c })?;
                }
                st.raw_unmap(w)?;
                sources.push((folded.len() as u32, st));
            }
        }

        let target_alpha = base.alpha_count(to_degree);
        let mut best: Option<((u32, u32), FabricState)> = None;
        for (cost, st) in sources {
            let Some(w) = st.free_wss().next() else {
                continue;
            };
            // Coupler mode: α group stays, mover joins via the WSS.
            let mut coupler = st.clone();
            coupler.raw_map(w, to_degree)?;
            coupler.raw_establish(moved(PathKind::Beta(w)))?;
            // Regroup: the whole degree moves onto the WSS.
            let mut regroup = st;
            let group: Vec<Connection> = regroup.connections_on(to_degree).copied().collect();
            for c in &group {
                regroup.raw_release(c.trx)?;
                regroup.raw_establish(Connection { path: PathKind::Beta(w), ..*c })?;
            }
            regroup.raw_map(w, to_degree)?;
            regroup.raw_establish(moved(PathKind::Beta(w)))?;

            for (key, cand) in [((cost, target_alpha + 1), coupler), ((cost + target_alpha, 0), regroup)] {
                if best.as_ref().is_none_or(|(b, _)| key < *b) {
                    best = Some((key, cand));
                }
            }
        }

        match best {
            Some((_, after)) => self.finish(after, vec![trx]),
            None => Err(Error::Capacity(format!(
                "no WSS can be freed to move P{trx} onto D{to_degree}"
            ))),
        }
    }

    /// Reroutes every signal of a failed degree onto `target`, leaving the
    /// target's established signals in place.
    pub fn fiber_break_reroute(&self, broken: u32, target: u32) -> Result<ReconfigPlan> {
        self.check_degree(broken)?;
        self.check_degree(target)?;
        if broken == target {
            return Err(Error::Domain(format!("cannot reroute D{broken} onto itself")));
        }
        let movers: Vec<Connection> = self.connections_on(broken).copied().collect();
        if movers.is_empty() {
            return Ok(ReconfigPlan::empty());
        }
        for c in &movers {
            self.check_contention(target, c.trx, &c.channel, &[])?;
        }

        let mut base = self.clone();
        for c in &movers {
            base.remove_connection(c.trx)?;
        }
        let k = self.config().k();
        let incoming = movers.len() as u32;
        let path = match base.wss_for_degree(target) {
            Some(w) => PathKind::Beta(w),
            None if base.alpha_count(target) + incoming <= k => PathKind::Alpha,
            None => {
                let w = base.free_wss().next().ok_or_else(|| {
                    Error::Capacity(format!(
                        "no spare WSS to carry {incoming} signals from D{broken} onto D{target}"
                    ))
                })?;
                base.raw_map(w, target)?;
                PathKind::Beta(w)
            }
        };
        for c in &movers {
            base.raw_establish(Connection {
                degree: target,
                path,
                ..*c
            })?;
        }
        self.finish(base, movers.iter().map(|c| c.trx).collect())
    }

    fn finish(&self, mut after: FabricState, movers: Vec<u32>) -> Result<ReconfigPlan> {
        after.refresh_modes();
        after.validate()?;
        Ok(ReconfigPlan::between(self, &after, movers))
    }

    /// Executes a plan produced against this state.
    pub fn apply_plan(&mut self, plan: &ReconfigPlan) -> Result<()> {
        let mut next = self.clone();
        for step in &plan.steps {
            match step {
                SwitchStep::Release { trx } => {
                    next.raw_release(*trx)?;
                }
                SwitchStep::UnmapWss { wss, .. } => {
                    next.raw_unmap(*wss)?;
                }
                SwitchStep::MapWss { wss, degree } => next.raw_map(*wss, *degree)?,
                SwitchStep::Establish(c) => next.raw_establish(*c)?,
            }
        }
        next.refresh_modes();
        next.validate()?;
        *self = next;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::state::testutil::*;
    use super::super::{AddOptions, OutputMode};
    use super::*;

    #[test]
    fn blocking_move_disrupts_established_signals() {
        let s = blocking_layout();
        let plan = s.plan_reconfiguration(3, 1).unwrap();
        assert!(!plan.hitless);
        assert!(!plan.disrupted.is_empty());
        assert_eq!(plan.movers, vec![3]);
        // Cheapest: fold D2's remaining pair onto α, reuse WSS1 in coupler mode.
        let disrupted: Vec<u32> = plan.disrupted.iter().map(|c| c.trx).collect();
        assert_eq!(disrupted, vec![4, 5]);

        let mut after = s.clone();
        after.apply_plan(&plan).unwrap();
        assert_eq!(after.connection(3).unwrap().degree, 1);
        assert_eq!(after.output_mode(1), OutputMode::CouplerMode);
        assert_eq!(after.alpha_count(2), 2);
    }

    #[test]
    fn move_into_degree_with_room_is_hitless() {
        let mut s = fabric(8, 8, 2);
        add(&mut s, 1, &[1]);
        add(&mut s, 2, &[3, 4, 5]);
        let plan = s.plan_reconfiguration(3, 1).unwrap();
        assert!(plan.hitless);
        assert!(plan.disrupted.is_empty());
        s.apply_plan(&plan).unwrap();
        assert_eq!(s.connection(3).unwrap().path, PathKind::Alpha);
    }

    #[test]
    fn alpha_signal_into_filtered_degree_is_hitless() {
        let mut s = blocking_layout();
        let plan = s.plan_reconfiguration(1, 2).unwrap();
        assert!(plan.hitless);
        s.apply_plan(&plan).unwrap();
        assert_eq!(s.connection(1).unwrap().path, PathKind::Beta(1));
    }

    #[test]
    fn move_with_spare_wss_uses_coupler_mode() {
        let mut s = fabric(8, 8, 2);
        add(&mut s, 1, &[1, 2]);
        add(&mut s, 2, &[3]);
        let plan = s.plan_reconfiguration(3, 1).unwrap();
        assert!(plan.hitless);
        s.apply_plan(&plan).unwrap();
        assert_eq!(s.output_mode(1), OutputMode::CouplerMode);
        assert_eq!(s.connection(3).unwrap().path, PathKind::Beta(1));
    }

    #[test]
    fn no_op_and_error_moves() {
        let s = blocking_layout();
        let plan = s.plan_reconfiguration(3, 2).unwrap();
        assert!(plan.is_empty() && plan.hitless);
        assert!(matches!(
            s.plan_reconfiguration(3, 9),
            Err(Error::IndexOutOfRange { what: "degree", .. })
        ));
        assert_eq!(fabric(8, 8, 2).plan_reconfiguration(1, 2), Err(Error::Inactive(1)));
    }

    #[test]
    fn contention_at_target_rejected() {
        let mut s = fabric(8, 8, 2);
        add(&mut s, 1, &[1]);
        s.add_connection(2, req(2, 1), AddOptions::default()).unwrap();
        assert!(matches!(
            s.plan_reconfiguration(2, 1),
            Err(Error::Contention { .. })
        ));
    }

    #[test]
    fn fiber_break_uses_spare_wss_in_coupler_mode() {
        let mut s = fabric(8, 8, 2);
        add(&mut s, 1, &[1, 2]);
        add(&mut s, 2, &[3, 4]);
        add(&mut s, 3, &[5, 6, 7, 8]);
        let plan = s.fiber_break_reroute(1, 2).unwrap();
        assert!(plan.hitless);
        assert_eq!(plan.movers, vec![1, 2]);
        assert!(plan.steps.contains(&SwitchStep::MapWss { wss: 2, degree: 2 }));
        s.apply_plan(&plan).unwrap();
        assert_eq!(s.output_mode(2), OutputMode::CouplerMode);
        assert_eq!(s.connection(3).unwrap().path, PathKind::Alpha);
        assert_eq!(s.connection(1).unwrap().path, PathKind::Beta(2));
    }

    #[test]
    fn fiber_break_edge_cases() {
        let s = blocking_layout();
        assert!(s.fiber_break_reroute(5, 1).unwrap().is_empty());
        assert!(s.fiber_break_reroute(1, 1).is_err());

        let mut tight = FabricState::new(super::super::FabricConfig::with_wss_count(8, 8, 2, Some(1)).unwrap());
        add(&mut tight, 1, &[1, 2]);
        add(&mut tight, 2, &[3, 4]);
        add(&mut tight, 3, &[5, 6, 7]);
        assert!(matches!(tight.fiber_break_reroute(1, 2), Err(Error::Capacity(_))));
    }
}
