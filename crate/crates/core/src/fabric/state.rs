use std::collections::BTreeMap;

use super::{AddOptions, Connection, FabricConfig, OutputMode, PathKind, SignalRequest};
use crate::error::{Error, Result};
use crate::grid::Channel;

/// Full switch state of one aggregator.
///
/// Mutating operations are atomic: on error the state is left unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct FabricState {
    config: FabricConfig,
    connections: BTreeMap<u32, Connection>,
    wss_degree: BTreeMap<u32, u32>,
    output_mode: Vec<OutputMode>,
}

impl FabricState {
    pub fn new(config: FabricConfig) -> Self {
        Self {
            config,
            connections: BTreeMap::new(),
            wss_degree: BTreeMap::new(),
            output_mode: vec![OutputMode::AlphaOnly; config.m() as usize],
        }
    }

    pub fn config(&self) -> &FabricConfig {
        &self.config
    }

    pub fn connection(&self, trx: u32) -> Option<&Connection> {
        self.connections.get(&trx)
    }

    /// All connections in transponder-port order.
    pub fn connections(&self) -> impl Iterator<Item = &Connection> + '_ {
        self.connections.values()
    }

    pub fn connection_count(&self) -> usize {
        self.connections.len()
    }

    pub fn connections_on(&self, degree: u32) -> impl Iterator<Item = &Connection> + '_ {
        self.connections.values().filter(move |c| c.degree == degree)
    }

    pub fn alpha_count(&self, degree: u32) -> u32 {
        self.connections_on(degree).filter(|c| c.path.is_alpha()).count() as u32
    }

    pub fn beta_count(&self, degree: u32) -> u32 {
        self.connections_on(degree).filter(|c| !c.path.is_alpha()).count() as u32
    }

    pub fn wss_for_degree(&self, degree: u32) -> Option<u32> {
        self.wss_degree
            .iter()
            .find_map(|(&w, &d)| (d == degree).then_some(w))
    }

    /// Matrix-switch map from WSS unit to degree.
    pub fn wss_map(&self) -> &BTreeMap<u32, u32> {
        &self.wss_degree
    }

    /// Unmapped WSS units, lowest index first.
    pub fn free_wss(&self) -> impl Iterator<Item = u32> + '_ {
        (1..=self.config.l()).filter(move |w| !self.wss_degree.contains_key(w))
    }

    pub fn output_mode(&self, degree: u32) -> OutputMode {
        self.output_mode
            .get(degree.wrapping_sub(1) as usize)
            .copied()
            .unwrap_or_default()
    }

    pub(crate) fn check_trx(&self, trx: u32) -> Result<()> {
        if trx == 0 || trx > self.config.n() {
            return Err(Error::IndexOutOfRange {
                what: "transponder port",
                value: trx,
                max: self.config.n(),
            });
        }
        Ok(())
    }

    pub(crate) fn check_degree(&self, degree: u32) -> Result<()> {
        if degree == 0 || degree > self.config.m() {
            return Err(Error::IndexOutOfRange {
                what: "degree",
                value: degree,
                max: self.config.m(),
            });
        }
        Ok(())
    }

    /// Fails if `channel` overlaps any signal already on `degree`, other than
    /// those on the ports in `ignore`.
    pub(crate) fn check_contention(
        &self,
        degree: u32,
        trx: u32,
        channel: &Channel,
        ignore: &[u32],
    ) -> Result<()> {
        match self
            .connections_on(degree)
            .find(|c| !ignore.contains(&c.trx) && !c.channel.is_disjoint(channel))
        {
            Some(other) => Err(Error::Contention {
                trx,
                other: other.trx,
                degree,
            }),
            None => Ok(()),
        }
    }

    /// Connects one transponder to `degree`, returning the assigned path.
    ///
    /// A degree is served by its α group while it carries at most K signals
    /// and no filtered branch; once a WSS is mapped to it every new signal
    /// joins that WSS. Established α signals are never moved here.
    pub fn add_connection(
        &mut self,
        degree: u32,
        request: SignalRequest,
        opts: AddOptions,
    ) -> Result<PathKind> {
        self.add_group(degree, &[request], opts).map(|p| p[0])
    }

    /// Connects a group of transponders to one degree as a unit.
    ///
    /// A group that would push a fresh degree beyond K signals goes entirely
    /// through one WSS instead of leaving the first K on the α path.
    pub fn add_group(
        &mut self,
        degree: u32,
        requests: &[SignalRequest],
        opts: AddOptions,
    ) -> Result<Vec<PathKind>> {
        self.check_degree(degree)?;
        for (i, req) in requests.iter().enumerate() {
            self.check_trx(req.trx)?;
            if self.connections.contains_key(&req.trx) || requests[..i].iter().any(|r| r.trx == req.trx) {
                return Err(Error::PortBusy(req.trx));
            }
            self.check_contention(degree, req.trx, &req.channel, &[])?;
            if let Some(prev) = requests[..i].iter().find(|r| !r.channel.is_disjoint(&req.channel)) {
                return Err(Error::Contention {
                    trx: req.trx,
                    other: prev.trx,
                    degree,
                });
            }
        }
        if requests.is_empty() {
            return Ok(Vec::new());
        }

        let k = self.config.k();
        let alpha = self.alpha_count(degree);
        let incoming = requests.len() as u32;
        let (path, new_wss) = match self.wss_for_degree(degree) {
            Some(w) => (PathKind::Beta(w), None),
            None if alpha + incoming <= k => (PathKind::Alpha, None),
            None if alpha == 0 || opts.allow_coupler_mode => {
                let w = self.free_wss().next().ok_or_else(|| {
                    Error::Capacity(format!(
                        "D{degree} needs a filtered path for {} signals but all {} WSS units are in use",
                        alpha + incoming,
                        self.config.l()
                    ))
                })?;
                (PathKind::Beta(w), Some(w))
            }
            None => {
                return Err(Error::Capacity(format!(
                    "D{degree} already carries {alpha} unfiltered signals (K={k}); adding {incoming} \
                     needs a regrouping plan or coupler mode"
                )))
            }
        };

        if let Some(w) = new_wss {
            self.wss_degree.insert(w, degree);
        }
        for req in requests {
            self.connections
                .insert(req.trx, Connection::from_request(req, degree, path));
        }
        self.refresh_modes();
        Ok(vec![path; requests.len()])
    }

    /// Tears down a connection; its WSS is released when it was the last user.
    pub fn remove_connection(&mut self, trx: u32) -> Result<Connection> {
        let conn = self.connections.remove(&trx).ok_or(Error::Inactive(trx))?;
        if let PathKind::Beta(w) = conn.path {
            if !self.connections.values().any(|c| c.path == conn.path) {
                self.wss_degree.remove(&w);
            }
        }
        self.refresh_modes();
        Ok(conn)
    }

    pub(crate) fn refresh_modes(&mut self) {
        for (i, mode) in self.output_mode.iter_mut().enumerate() {
            let degree = i as u32 + 1;
            let mut has_alpha = false;
            let mut has_beta = false;
            for c in self.connections.values().filter(|c| c.degree == degree) {
                if c.path.is_alpha() {
                    has_alpha = true;
                } else {
                    has_beta = true;
                }
            }
            *mode = match (has_alpha, has_beta) {
                (_, false) => OutputMode::AlphaOnly,
                (false, true) => OutputMode::BetaOnly,
                (true, true) => OutputMode::CouplerMode,
            };
        }
    }

    // Low-level mutators used when executing reconfiguration plans; the
    // caller validates the final state.
    pub(crate) fn raw_release(&mut self, trx: u32) -> Result<Connection> {
        self.connections.remove(&trx).ok_or(Error::Inactive(trx))
    }

    pub(crate) fn raw_establish(&mut self, conn: Connection) -> Result<()> {
        if self.connections.contains_key(&conn.trx) {
            return Err(Error::PortBusy(conn.trx));
        }
        self.connections.insert(conn.trx, conn);
        Ok(())
    }

    pub(crate) fn raw_map(&mut self, wss: u32, degree: u32) -> Result<()> {
        if let Some(d) = self.wss_degree.get(&wss) {
            return Err(Error::Invariant(format!("WSS {wss} already mapped to D{d}")));
        }
        self.wss_degree.insert(wss, degree);
        Ok(())
    }

    pub(crate) fn raw_unmap(&mut self, wss: u32) -> Result<u32> {
        self.wss_degree
            .remove(&wss)
            .ok_or_else(|| Error::Invariant(format!("WSS {wss} is not mapped")))
    }

    /// Checks every structural invariant of the fabric.
    pub fn validate(&self) -> Result<()> {
        let cfg = &self.config;
        let fail = |msg: String| Err(Error::Invariant(msg));

        if self.output_mode.len() != cfg.m() as usize {
            return fail(format!("{} output modes for {} degrees", self.output_mode.len(), cfg.m()));
        }
        for (&trx, c) in &self.connections {
            if trx != c.trx {
                return fail(format!("connection keyed by P{trx} claims P{}", c.trx));
            }
            if trx == 0 || trx > cfg.n() {
                return fail(format!("P{trx} outside 1..={}", cfg.n()));
            }
            if c.degree == 0 || c.degree > cfg.m() {
                return fail(format!("P{trx} routed to D{} outside 1..={}", c.degree, cfg.m()));
            }
            if !c.tosnr_db.0.is_finite() {
                return fail(format!("P{trx} has non-finite TOSNR"));
            }
            if let PathKind::Beta(w) = c.path {
                match self.wss_degree.get(&w) {
                    Some(&d) if d == c.degree => {}
                    Some(&d) => return fail(format!("P{trx} on WSS {w} toward D{} but WSS feeds D{d}", c.degree)),
                    None => return fail(format!("P{trx} uses unmapped WSS {w}")),
                }
            }
        }
        if self.wss_degree.len() > cfg.l() as usize {
            return fail(format!("{} WSS units mapped, only {} installed", self.wss_degree.len(), cfg.l()));
        }
        let mut fed = vec![false; cfg.m() as usize];
        for (&w, &d) in &self.wss_degree {
            if w == 0 || w > cfg.l() {
                return fail(format!("WSS {w} outside 1..={}", cfg.l()));
            }
            if d == 0 || d > cfg.m() {
                return fail(format!("WSS {w} mapped to D{d} outside 1..={}", cfg.m()));
            }
            if std::mem::replace(&mut fed[d as usize - 1], true) {
                return fail(format!("D{d} is fed by more than one WSS"));
            }
            if !self.connections.values().any(|c| c.path == PathKind::Beta(w)) {
                return fail(format!("WSS {w} mapped to D{d} but carries no signal"));
            }
        }
        for degree in 1..=cfg.m() {
            let on_degree: Vec<_> = self.connections_on(degree).collect();
            for (i, a) in on_degree.iter().enumerate() {
                if let Some(b) = on_degree[i + 1..].iter().find(|b| !a.channel.is_disjoint(&b.channel)) {
                    return fail(format!("P{} and P{} overlap on D{degree}", a.trx, b.trx));
                }
            }
            let alpha = on_degree.iter().filter(|c| c.path.is_alpha()).count() as u32;
            let beta = on_degree.len() as u32 - alpha;
            if alpha > cfg.k() {
                return fail(format!("D{degree} carries {alpha} unfiltered signals, K={}", cfg.k()));
            }
            let expected = match (alpha > 0, beta > 0) {
                (_, false) => OutputMode::AlphaOnly,
                (false, true) => OutputMode::BetaOnly,
                (true, true) => OutputMode::CouplerMode,
            };
            if self.output_mode(degree) != expected {
                return fail(format!(
                    "D{degree} output switch is {} but traffic requires {expected}",
                    self.output_mode(degree)
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;
    use crate::grid::BandPlan;

    /// Disjoint 87.5 GHz slots on a 100 GHz pitch.
    pub fn channel(i: u32) -> Channel {
        Channel::from_frequency(192.0 + 0.1 * f64::from(i), 87.5, &BandPlan::default()).unwrap()
    }

    pub fn req(trx: u32, ch: u32) -> SignalRequest {
        SignalRequest::new(trx, channel(ch))
    }

    pub fn fabric(n: u32, m: u32, k: u32) -> FabricState {
        FabricState::new(FabricConfig::new(n, m, k).unwrap())
    }

    pub fn add(state: &mut FabricState, degree: u32, ports: &[u32]) -> Vec<PathKind> {
        let reqs: Vec<_> = ports.iter().map(|&p| req(p, p)).collect();
        let paths = state.add_group(degree, &reqs, AddOptions::default()).unwrap();
        state.validate().unwrap();
        paths
    }

    /// N=8, K=2: D1 two α signals, D2 and D3 three β signals each.
    pub fn blocking_layout() -> FabricState {
        let mut s = fabric(8, 8, 2);
        add(&mut s, 1, &[1, 2]);
        add(&mut s, 2, &[3, 4, 5]);
        add(&mut s, 3, &[6, 7, 8]);
        s
    }
}
