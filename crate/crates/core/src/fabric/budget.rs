//! Loss and OSNR budgets for the proposed aggregator and its baselines.

use serde::{Deserialize, Serialize};

use super::{FabricState, OutputMode, PathKind};
use crate::coupler::confluence_loss;
use crate::error::{Error, Result};
use crate::linkmath::{combine_osnr, splitter_loss, Db, OsnrContribution, cascade_osnr};

/// Per-element insertion losses and penalties, all in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossBudgetParams {
    /// Fiber-to-chip coupling, paid once on input and once on output.
    pub fiber_coupling_db: Db,
    pub input_switch_db: Db,
    /// Excess loss of the variable coupler beyond its principle loss.
    pub alpha_excess_db: Db,
    pub beta_chip_excess_db: Db,
    pub wss_db: Db,
    pub matrix_switch_db: Db,
    pub out_switch_db: Db,
    /// Added to both branches when the 2×1 switch runs as a coupler.
    pub coupler_mode_extra_db: Db,
    /// OSNR cost of the loss-compensating amplifier on the β path.
    pub beta_amp_osnr_penalty_db: Db,
}

impl Default for LossBudgetParams {
    fn default() -> Self {
        Self {
            fiber_coupling_db: Db(0.6),
            input_switch_db: Db::ZERO,
            alpha_excess_db: Db::ZERO,
            beta_chip_excess_db: Db::ZERO,
            wss_db: Db(6.0),
            matrix_switch_db: Db::ZERO,
            out_switch_db: Db::ZERO,
            coupler_mode_extra_db: Db(10.0 * std::f64::consts::LOG10_2),
            beta_amp_osnr_penalty_db: Db(0.7),
        }
    }
}

impl LossBudgetParams {
    pub fn zero() -> Self {
        Self {
            fiber_coupling_db: Db::ZERO,
            input_switch_db: Db::ZERO,
            alpha_excess_db: Db::ZERO,
            beta_chip_excess_db: Db::ZERO,
            wss_db: Db::ZERO,
            matrix_switch_db: Db::ZERO,
            out_switch_db: Db::ZERO,
            coupler_mode_extra_db: Db::ZERO,
            beta_amp_osnr_penalty_db: Db::ZERO,
        }
    }

    pub fn fields(&self) -> [(&'static str, Db); 9] {
        [
            ("fiber_coupling_db", self.fiber_coupling_db),
            ("input_switch_db", self.input_switch_db),
            ("alpha_excess_db", self.alpha_excess_db),
            ("beta_chip_excess_db", self.beta_chip_excess_db),
            ("wss_db", self.wss_db),
            ("matrix_switch_db", self.matrix_switch_db),
            ("out_switch_db", self.out_switch_db),
            ("coupler_mode_extra_db", self.coupler_mode_extra_db),
            ("beta_amp_osnr_penalty_db", self.beta_amp_osnr_penalty_db),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.fields() {
            if !(v.0 >= 0.0 && v.0.is_finite()) {
                return Err(Error::semantic(format!("params.{name}"), format!("must be a finite value >= 0, got {}", v.0)));
            }
        }
        Ok(())
    }

    fn chip_io_db(&self) -> Db {
        self.fiber_coupling_db + self.fiber_coupling_db + self.input_switch_db
    }
}

/// Loss and OSNR of one signal under a given aggregator model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub loss_db: Db,
    pub osnr_db: Db,
}

impl FabricState {
    /// Unfiltered signals sharing this signal's degree output, excluding itself.
    pub fn interferer_count(&self, trx: u32) -> Result<u32> {
        let conn = self.connection(trx).ok_or(Error::Inactive(trx))?;
        let alpha = self.alpha_count(conn.degree);
        Ok(if conn.path.is_alpha() { alpha - 1 } else { alpha })
    }

    pub fn signal_loss(&self, trx: u32, params: &LossBudgetParams) -> Result<Db> {
        let conn = self.connection(trx).ok_or(Error::Inactive(trx))?;
        let mut loss = params.chip_io_db() + params.out_switch_db;
        loss = loss
            + match conn.path {
                PathKind::Alpha => confluence_loss(self.alpha_count(conn.degree))? + params.alpha_excess_db,
                PathKind::Beta(_) => params.beta_chip_excess_db + params.wss_db + params.matrix_switch_db,
            };
        if self.output_mode(conn.degree) == OutputMode::CouplerMode {
            loss = loss + params.coupler_mode_extra_db;
        }
        Ok(loss)
    }

    /// OSNR at the degree-side OXC input.
    pub fn signal_osnr_at_oxc(&self, trx: u32, params: &LossBudgetParams) -> Result<Db> {
        let conn = self.connection(trx).ok_or(Error::Inactive(trx))?;
        let interferers = self.interferer_count(trx)?;
        let mut parts = vec![OsnrContribution::single(conn.tosnr_db)];
        if interferers > 0 {
            parts.push(OsnrContribution::new(conn.oob_osnr_db, interferers)?);
        }
        let osnr = cascade_osnr(&parts)?;
        Ok(match conn.path {
            PathKind::Alpha => osnr,
            PathKind::Beta(_) => osnr - params.beta_amp_osnr_penalty_db,
        })
    }
}

/// Multicast-switch baseline: a fixed N×1 splitter per degree, unfiltered.
pub fn mcs_evaluate(
    n: u32,
    k_signals: u32,
    tosnr_db: Db,
    oob_osnr_db: Db,
    params: &LossBudgetParams,
) -> Result<Evaluation> {
    if k_signals == 0 || k_signals > n {
        return Err(Error::Domain(format!(
            "MCS signal count must satisfy 1 <= k <= n (n={n}), got {k_signals}"
        )));
    }
    Ok(Evaluation {
        loss_db: splitter_loss(n)? + params.chip_io_db() + params.alpha_excess_db,
        osnr_db: combine_osnr(tosnr_db, oob_osnr_db, k_signals)?,
    })
}

/// M×N WSS baseline: every signal filtered, no principle loss.
pub fn mxn_wss_evaluate(tosnr_db: Db, params: &LossBudgetParams) -> Evaluation {
    Evaluation {
        loss_db: params.fiber_coupling_db + params.fiber_coupling_db + params.wss_db,
        osnr_db: tosnr_db,
    }
}

/// An M×N WSS needs one 1×N WSS per degree.
pub fn wss_function_count_mxn(m: u32) -> u32 {
    m
}

#[cfg(test)]
mod tests {
    use super::super::state::testutil::*;
    use super::super::AddOptions;
    use super::*;

    fn close(a: Db, b: f64, tol: f64) -> bool {
        (a.0 - b).abs() <= tol
    }

    #[test]
    fn alpha_loss_is_confluence_only_with_zero_params() {
        let mut s = fabric(8, 8, 2);
        add(&mut s, 1, &[1, 2]);
        let loss = s.signal_loss(1, &LossBudgetParams::zero()).unwrap();
        assert!(close(loss, 3.0103, 1e-4));
        let mcs = mcs_evaluate(8, 2, Db(36.0), Db(43.0), &LossBudgetParams::zero()).unwrap();
        assert!(close(mcs.loss_db - loss, 6.0206, 1e-4));
    }

    #[test]
    fn beta_loss_at_defaults() {
        let s = blocking_layout();
        let loss = s.signal_loss(3, &LossBudgetParams::default()).unwrap();
        assert!(close(loss, 7.2, 1e-12));
    }

    #[test]
    fn coupler_mode_adds_extra_on_both_branches() {
        let mut s = fabric(8, 8, 2);
        add(&mut s, 1, &[1, 2]);
        let p = LossBudgetParams::default();
        let alpha_before = s.signal_loss(1, &p).unwrap();
        s.add_connection(1, req(3, 3), AddOptions { allow_coupler_mode: true }).unwrap();
        let alpha_after = s.signal_loss(1, &p).unwrap();
        assert!(close(alpha_after - alpha_before, 3.0103, 1e-4));
        assert!(close(s.signal_loss(3, &p).unwrap(), 7.2 + 3.0103, 1e-4));
    }

    #[test]
    fn osnr_at_oxc() {
        let p = LossBudgetParams::default();
        let mut s = fabric(8, 8, 2);
        add(&mut s, 1, &[1]);
        assert_eq!(s.signal_osnr_at_oxc(1, &p).unwrap(), Db(36.0));
        add(&mut s, 1, &[2]);
        assert!(close(s.signal_osnr_at_oxc(1, &p).unwrap(), 35.21, 0.02));
        assert_eq!(s.interferer_count(1).unwrap(), 1);

        let b = blocking_layout();
        assert!(close(b.signal_osnr_at_oxc(3, &p).unwrap(), 35.3, 1e-12));
        assert_eq!(b.interferer_count(3).unwrap(), 0);
        assert!(b.signal_osnr_at_oxc(3, &p).unwrap() > b.signal_osnr_at_oxc(1, &p).unwrap());
        assert_eq!(s.signal_osnr_at_oxc(7, &p), Err(Error::Inactive(7)));
    }

    #[test]
    fn beta_in_coupler_mode_sees_whole_alpha_group() {
        let p = LossBudgetParams::default();
        let mut s = fabric(8, 8, 2);
        add(&mut s, 1, &[1, 2]);
        s.add_connection(1, req(3, 3), AddOptions { allow_coupler_mode: true }).unwrap();
        assert_eq!(s.interferer_count(3).unwrap(), 2);
        assert_eq!(s.interferer_count(1).unwrap(), 1);
        let want = combine_osnr(Db(36.0), Db(43.0), 3).unwrap() - Db(0.7);
        assert_eq!(s.signal_osnr_at_oxc(3, &p).unwrap(), want);
    }

    #[test]
    fn baselines() {
        let p = LossBudgetParams::default();
        let mcs = mcs_evaluate(8, 2, Db(36.0), Db(43.0), &p).unwrap();
        assert!(close(mcs.loss_db, 9.0309 + 1.2, 1e-4));
        assert!(close(mcs.osnr_db, 35.21, 0.02));
        let one = mcs_evaluate(1, 1, Db(36.0), Db(43.0), &p).unwrap();
        assert!(close(one.loss_db, 1.2, 1e-12));
        assert_eq!(one.osnr_db, Db(36.0));
        // Linear-domain evaluation with seven interferers gives 32.204 dB.
        let eight = mcs_evaluate(8, 8, Db(36.0), Db(43.0), &p).unwrap();
        assert!(close(eight.osnr_db, 32.204, 0.001));
        assert!(mcs_evaluate(8, 9, Db(36.0), Db(43.0), &p).is_err());
        assert!(mcs_evaluate(8, 0, Db(36.0), Db(43.0), &p).is_err());

        let mxn = mxn_wss_evaluate(Db(36.0), &p);
        assert_eq!(mxn.osnr_db, Db(36.0));
        assert!(close(mxn.loss_db, 7.2, 1e-12));
        assert_eq!(wss_function_count_mxn(8), 8);
        assert_eq!(wss_function_count_mxn(24), 24);
    }

    #[test]
    fn params_validation() {
        LossBudgetParams::default().validate().unwrap();
        let mut p = LossBudgetParams::zero();
        p.wss_db = Db(-1.0);
        assert!(p.validate().is_err());
    }
}
