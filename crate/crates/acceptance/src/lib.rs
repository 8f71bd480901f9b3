//! Acceptance criteria for the `tpagg` crate, one check function each.
//! `tests/acceptance.rs` runs them and prints a PASS/FAIL line per criterion.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tpagg::analysis::verify_wss_sufficiency;
use tpagg::coupler::{confluence_loss, through_power, CouplerCascade};
use tpagg::fabric::{
    mcs_evaluate, required_wss_count, AddOptions, FabricConfig, FabricState, LossBudgetParams, OutputMode,
    SignalRequest, SwitchStep,
};
use tpagg::grid::{BandPlan, Channel};
use tpagg::linkmath::{combine_osnr, splitter_loss};
use tpagg::scenario::{parse_scenario, run_scenario, PlanKind, RunOptions};
use tpagg::stress::{run_stress, StressConfig};
use tpagg::{cli, Db, Execution};

/// Detail line on success, reason on failure.
pub type Outcome = Result<String, String>;
pub type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

/// Fixtures shared with the core crate's own tests.
fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests").join(name)
}

fn wss_table() -> Outcome {
    let start = Instant::now();
    let got = [
        required_wss_count(8, 2),
        required_wss_count(24, 2),
        required_wss_count(24, 4),
        required_wss_count(24, 8),
    ];
    let elapsed = start.elapsed();
    let got: Vec<u32> = got.into_iter().collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    check(got == [2, 8, 4, 2], format!("got {got:?}, want [2, 8, 4, 2]"))?;
    check(elapsed < Duration::from_millis(1), format!("took {elapsed:?}"))?;
    Ok(format!("(8,2)->2, N=24 K=2/4/8 -> 8/4/2 in {elapsed:?}"))
}

fn coupler_losses() -> Outcome {
    for (k, want) in [(2, 3.01), (3, 4.77), (4, 6.02)] {
        let got = confluence_loss(k).map_err(|e| e.to_string())?.0;
        check((got - want).abs() <= 0.01, format!("confluence_loss({k}) = {got:.4}, want {want} ± 0.01"))?;
    }
    let mut worst = 0.0f64;
    for k in 1..=16u32 {
        let cascade = CouplerCascade::confluence(k).map_err(|e| e.to_string())?;
        for i in 1..=k {
            let p = through_power(&cascade, i as usize).map_err(|e| e.to_string())?;
            worst = worst.max((p - 1.0 / f64::from(k)).abs());
        }
    }
    check(worst <= 1e-12, format!("equal-split error {worst:e} > 1e-12"))?;
    Ok(format!("3.01/4.77/6.02 dB, equal split max error {worst:e} for k <= 16"))
}

fn mcs_splitter() -> Outcome {
    let got = splitter_loss(8).map_err(|e| e.to_string())?.0;
    check((got - 9.0).abs() <= 0.05, format!("splitter_loss(8) = {got:.4}, want 9 ± 0.05"))?;
    Ok(format!("splitter_loss(8) = {got:.2} dB"))
}

/// Adds one noise power at a time in the linear domain.
fn brute_force_osnr(osnr_in: f64, osnr_out: f64, k: u32) -> f64 {
    let mut noise = 10f64.powf(-osnr_in / 10.0);
    for _ in 1..k {
        noise += 10f64.powf(-osnr_out / 10.0);
    }
    -10.0 * noise.log10()
}

fn osnr_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let osnr_in = rng.gen_range(15.0..=45.0);
        let osnr_out = rng.gen_range(25.0..=55.0);
        let k = rng.gen_range(1..=32u32);
        let got = combine_osnr(Db(osnr_in), Db(osnr_out), k).map_err(|e| e.to_string())?.0;
        worst = worst.max((got - brute_force_osnr(osnr_in, osnr_out, k)).abs());
    }
    check(worst < 1e-9, format!("max oracle error {worst:e} dB"))?;
    let spot2 = combine_osnr(Db(36.0), Db(43.0), 2).map_err(|e| e.to_string())?.0;
    let spot4 = combine_osnr(Db(36.0), Db(43.0), 4).map_err(|e| e.to_string())?.0;
    check((spot2 - 35.21).abs() <= 0.02, format!("(36,43,2) = {spot2:.3}, want 35.21 ± 0.02"))?;
    check(
        (spot4 - 33.89).abs() <= 0.02,
        format!(
            "oracle agreement {worst:e} dB and (36,43,2) = {spot2:.3} ok, but (36,43,4) = {spot4:.3} vs stated 33.89 ± 0.02 \
             (independent oracle gives {:.3})",
            brute_force_osnr(36.0, 43.0, 4)
        ),
    )?;
    Ok(format!("max oracle error {worst:e} dB, spots {spot2:.2}/{spot4:.2}"))
}

fn sufficiency() -> Outcome {
    let start = Instant::now();
    let report = verify_wss_sufficiency(12, 6, 4, Execution::Parallel);
    let elapsed = start.elapsed();
    check(
        report.counterexamples.is_empty(),
        format!("{} counterexamples, first {:?}", report.counterexamples.len(), report.counterexamples.first()),
    )?;
    check(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} compositions over {} (N, M, K) cases, no counterexample, {:.2?}",
        report.compositions, report.cases, elapsed
    ))
}

fn scenario_replays() -> Outcome {
    let load = |name: &str| -> Result<_, String> {
        let text = std::fs::read_to_string(data(name)).map_err(|e| e.to_string())?;
        let s = parse_scenario(&text).map_err(|e| e.to_string())?;
        run_scenario(&s, RunOptions { strict: true }).map_err(|e| e.to_string())
    };

    let blocking = load("data/blocking.toml")?;
    let moves: Vec<_> = blocking.plans.iter().filter(|p| p.kind == PlanKind::Move).collect();
    check(moves.len() == 1, format!("expected one move plan, got {}", moves.len()))?;
    let plan = &moves[0].plan;
    check(!plan.hitless, "blocking plan reported hitless")?;
    check(!plan.disrupted.is_empty(), "blocking plan has empty disrupted set")?;
    let disrupted: Vec<u32> = plan.disrupted.iter().map(|c| c.trx).collect();

    let fb = load("data/fiber_break.toml")?;
    let breaks: Vec<_> = fb.plans.iter().filter(|p| p.kind == PlanKind::FiberBreak).collect();
    check(breaks.len() == 1, format!("expected one reroute plan, got {}", breaks.len()))?;
    let plan = &breaks[0].plan;
    check(plan.hitless, "reroute plan not hitless")?;
    check(
        plan.disrupted.iter().all(|c| c.degree != 2),
        "reroute disrupted a pre-existing D2 signal",
    )?;
    check(
        plan.steps.contains(&SwitchStep::MapWss { wss: 2, degree: 2 }),
        "reroute does not map the spare WSS2 to D2",
    )?;
    check(
        fb.final_state.output_mode(2) == OutputMode::CouplerMode,
        format!("D2 output switch is {}", fb.final_state.output_mode(2)),
    )?;
    Ok(format!(
        "blocking: hitless=false disrupted={disrupted:?}; fiber break: hitless, WSS2->D2, D2 coupler"
    ))
}

fn sweep_golden() -> Outcome {
    let golden_path = data("golden/sweep_n1-24_k2-4-8_m8.csv");
    let golden = std::fs::read(&golden_path).map_err(|e| format!("{}: {e}", golden_path.display()))?;
    let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
    let code = cli::run(["tpagg", "sweep", "--n", "1..24", "--k", "2,4,8", "--m", "8"], &mut stdout, &mut stderr);
    check(code == 0, format!("exit {code}: {}", String::from_utf8_lossy(&stderr)))?;
    check(stdout == golden, "CLI output differs from golden CSV")?;
    Ok(format!("{} bytes identical to golden", golden.len()))
}

fn osnr_ordering() -> Outcome {
    let params = LossBudgetParams::default();
    let plan = BandPlan::default();
    let ch = |i: u32| Channel::from_frequency(192.0 + 0.1 * f64::from(i), 87.5, &plan).unwrap();

    // β: a fresh degree given K+1 signals at once is filtered.
    let mut s = FabricState::new(FabricConfig::new(8, 8, 2).map_err(|e| e.to_string())?);
    let group: Vec<_> = (1..=3).map(|t| SignalRequest::new(t, ch(t))).collect();
    s.add_group(1, &group, AddOptions::default()).map_err(|e| e.to_string())?;
    s.add_group(2, &[SignalRequest::new(4, ch(4)), SignalRequest::new(5, ch(5))], AddOptions::default())
        .map_err(|e| e.to_string())?;
    let beta = s.signal_osnr_at_oxc(1, &params).map_err(|e| e.to_string())?;
    let alpha = s.signal_osnr_at_oxc(4, &params).map_err(|e| e.to_string())?;
    check(beta > alpha, format!("β {beta:.3} not above α {alpha:.3}"))?;
    check((beta.0 - 35.3).abs() < 1e-9, format!("β OSNR {beta:.4}, want 35.3"))?;

    let mut checked = 0;
    for k in 1..=4u32 {
        let n = 12;
        let cfg = FabricConfig::new(n, 2, k).map_err(|e| e.to_string())?;
        for k_alpha in 1..=k {
            let mut st = FabricState::new(cfg);
            for t in 1..=k_alpha {
                st.add_connection(1, SignalRequest::new(t, ch(t)), AddOptions::default())
                    .map_err(|e| e.to_string())?;
            }
            let mcs = mcs_evaluate(n, k_alpha, Db(36.0), Db(43.0), &params).map_err(|e| e.to_string())?;
            for t in 1..=k_alpha {
                let got = st.signal_osnr_at_oxc(t, &params).map_err(|e| e.to_string())?;
                check(got == mcs.osnr_db, format!("α k={k_alpha}: {got} != MCS {}", mcs.osnr_db))?;
                checked += 1;
            }
        }
    }
    Ok(format!("β {beta:.2} > α(k=2) {alpha:.2}; α equals MCS exactly on {checked} signals"))
}

fn state_machine() -> Outcome {
    let cfg = StressConfig {
        sequences: 100_000,
        ..Default::default()
    };
    let start = Instant::now();
    let r = run_stress(&cfg, Execution::Parallel);
    check(
        r.failures.is_empty(),
        format!("{} failing sequences, first {:?}", r.failures.len(), r.failures.first()),
    )?;
    check(r.round_trips == r.ops.add_ok && r.round_trips > 0, "add/remove round trips not exercised")?;
    Ok(format!(
        "{} sequences, {} operations, {} add/remove round trips, {:.2?}",
        r.sequences,
        r.ops.total(),
        r.round_trips,
        start.elapsed()
    ))
}

pub const CRITERIA: [Criterion; 9] = [
    ("1 wss sizing table", wss_table),
    ("2 coupler losses and equal split", coupler_losses),
    ("3 mcs splitter loss", mcs_splitter),
    ("4 osnr oracle and spot values", osnr_oracle),
    ("5 wss sufficiency enumeration", sufficiency),
    ("6 blocking and fiber-break replays", scenario_replays),
    ("7 sweep golden csv", sweep_golden),
    ("8 beta/alpha/mcs osnr ordering", osnr_ordering),
    ("9 state-machine invariants", state_machine),
];
