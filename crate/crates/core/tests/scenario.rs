use std::path::PathBuf;

use tpagg::fabric::{OutputMode, PathKind};
use tpagg::linkmath::Db;
use tpagg::scenario::{
    compare_aggregators, compare_csv, parse_scenario, reports_csv, run_scenario, run_text, AggregatorModel,
    RunOptions, Scenario,
};

fn load(name: &str) -> Scenario {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    parse_scenario(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn replay_is_byte_identical() {
    for name in ["blocking.toml", "fiber_break.toml", "contention.toml"] {
        let s = load(name);
        let a = run_scenario(&s, RunOptions::default()).unwrap();
        let b = run_scenario(&s, RunOptions::default()).unwrap();
        assert_eq!(reports_csv(&a.reports), reports_csv(&b.reports));
        assert_eq!(run_text(&s, &a), run_text(&s, &b));
        let c1 = compare_csv(&compare_aggregators(&s, RunOptions::default()).unwrap());
        let c2 = compare_csv(&compare_aggregators(&s, RunOptions::default()).unwrap());
        assert_eq!(c1, c2);
    }
}

#[test]
fn blocking_snapshots_bracket_the_move() {
    let out = run_scenario(&load("blocking.toml"), RunOptions { strict: true }).unwrap();
    let first: Vec<_> = out.reports.iter().filter(|r| r.query == 1).collect();
    let second: Vec<_> = out.reports.iter().filter(|r| r.query == 2).collect();
    assert_eq!(first.len(), 8);
    assert_eq!(second.len(), 8);
    let p3 = second.iter().find(|r| r.trx == 3).unwrap();
    assert_eq!(p3.degree, 1);
    assert_eq!(p3.path, PathKind::Beta(1));
    // P4 and P5 fall back to the α path of D2 once its WSS is taken.
    for trx in [4, 5] {
        let r = second.iter().find(|r| r.trx == trx).unwrap();
        assert_eq!((r.degree, r.path), (2, PathKind::Alpha));
    }
    assert_eq!(out.final_state.output_mode(1), OutputMode::CouplerMode);
    assert_eq!(out.plans[0].plan.disrupted.iter().map(|c| c.trx).collect::<Vec<_>>(), vec![4, 5]);
}

#[test]
fn fiber_break_moves_pair_behind_spare_wss() {
    let out = run_scenario(&load("fiber_break.toml"), RunOptions { strict: true }).unwrap();
    assert_eq!(out.final_state.connections_on(1).count(), 0);
    assert_eq!(out.final_state.wss_for_degree(2), Some(2));
    let plan = &out.plans[0].plan;
    assert!(plan.hitless);
    assert_eq!(plan.movers, vec![1, 2]);
    for r in &out.reports {
        assert!(r.rosnr_db <= r.osnr_at_oxc_db, "{r:?}");
        assert!((r.loss_db.0 - 6.02 - out.final_state.signal_loss(r.trx, &out.final_params).unwrap().0).abs() < 1e-12);
    }
}

#[test]
fn report_invariants() {
    for name in ["blocking.toml", "fiber_break.toml", "contention.toml"] {
        let out = run_scenario(&load(name), RunOptions::default()).unwrap();
        for r in &out.reports {
            assert!(r.rosnr_db <= r.osnr_at_oxc_db);
            if r.interferer_count == 0 {
                let want = match r.path {
                    PathKind::Alpha => r.tosnr_db,
                    PathKind::Beta(_) => r.tosnr_db - out.final_params.beta_amp_osnr_penalty_db,
                };
                assert_eq!(r.osnr_at_oxc_db, want, "{name}: {r:?}");
            }
        }
    }
}

#[test]
fn comparison_rows() {
    let rows = compare_aggregators(&load("blocking.toml"), RunOptions::default()).unwrap();
    assert_eq!(rows.len(), 24);
    for chunk in rows.chunks(3) {
        let [proposed, mcs, mxn] = chunk else { unreachable!() };
        assert_eq!(proposed.model, AggregatorModel::Proposed);
        assert_eq!(mcs.model, AggregatorModel::Mcs);
        assert_eq!(mxn.model, AggregatorModel::MxnWss);
        assert_eq!(mxn.osnr_oxc_db, Db(36.0));
        // Pure α degree (D2 after the move): identical populations, identical OSNR.
        if proposed.degree == 2 {
            assert_eq!(proposed.osnr_oxc_db, mcs.osnr_oxc_db);
            assert!(proposed.loss_db < mcs.loss_db);
        }
        if matches!(proposed.path, Some(PathKind::Beta(_))) && proposed.degree == 3 {
            assert!((proposed.osnr_oxc_db.0 - 35.3).abs() < 1e-12);
        }
    }
}

#[test]
fn set_params_changes_later_snapshots() {
    let doc = r#"
[config]
n = 4
m = 1
k = 1

[[events]]
kind = "add"
degree = 1
signals = [{ trx = 1, freq_thz = 193.1 }, { trx = 2, freq_thz = 193.3 }]

[[events]]
kind = "query"

[[events]]
kind = "set_params"
params = { wss_db = 5.0, beta_amp_osnr_penalty_db = 0.0 }

[[events]]
kind = "query"
"#;
    let out = run_scenario(&parse_scenario(doc).unwrap(), RunOptions::default()).unwrap();
    let csv = reports_csv(&out.reports);
    assert_eq!(
        csv,
        "signal_id,trx,degree,path,loss_db,interferer_count,osnr_oxc_db,rosnr_db\n\
         1,1,1,beta:1,7.20,0,35.30,35.30\n\
         2,2,1,beta:1,7.20,0,35.30,35.30\n\
         1,1,1,beta:1,6.20,0,36.00,36.00\n\
         2,2,1,beta:1,6.20,0,36.00,36.00\n"
    );
}
