//! CSV and text renderings. Numbers use two decimals and LF line endings.

use std::fmt::Write;

use super::{ComparisonRow, PlanKind, RunOutput, Scenario, SignalReport, SweepRow};

pub const REPORT_HEADER: &str = "signal_id,trx,degree,path,loss_db,interferer_count,osnr_oxc_db,rosnr_db";

fn report_line(out: &mut String, r: &SignalReport) {
    let _ = writeln!(
        out,
        "{},{},{},{},{:.2},{},{:.2},{:.2}",
        r.signal_id, r.trx, r.degree, r.path, r.loss_db.0, r.interferer_count, r.osnr_at_oxc_db.0, r.rosnr_db.0
    );
}

pub fn reports_csv(reports: &[SignalReport]) -> String {
    let mut out = String::with_capacity(64 * (reports.len() + 1));
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for r in reports {
        report_line(&mut out, r);
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("n,k,l_proposed,wss_count_mxn\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.n, r.k, r.l_proposed, r.wss_count_mxn);
    }
    out
}

pub fn compare_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("signal_id,trx,degree,model,path,loss_db,osnr_oxc_db\n");
    for r in rows {
        let path = r.path.map_or_else(|| "-".to_string(), |p| p.to_string());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.2},{:.2}",
            r.signal_id,
            r.trx,
            r.degree,
            r.model.name(),
            path,
            r.loss_db.0,
            r.osnr_oxc_db.0
        );
    }
    out
}

/// Human-readable replay log followed by every snapshot.
pub fn run_text(s: &Scenario, out: &RunOutput) -> String {
    let c = &s.config;
    let mut text = String::new();
    let _ = writeln!(text, "fabric N={} M={} K={} L={}", c.n(), c.m(), c.k(), c.l());
    for e in &out.log {
        match &e.outcome {
            Ok(msg) => {
                let _ = writeln!(text, "[{}] {}: {msg}", e.index, e.kind);
            }
            Err(msg) => {
                let _ = writeln!(text, "[{}] {}: ERROR {msg}", e.index, e.kind);
            }
        }
        for rec in out.plans.iter().filter(|p| p.event_index == e.index) {
            let label = match rec.kind {
                PlanKind::Move => "move plan",
                PlanKind::FiberBreak => "reroute plan",
            };
            let _ = writeln!(text, "    {label}:");
            for step in &rec.plan.steps {
                let _ = writeln!(text, "      {step}");
            }
        }
    }
    let mut query = 0;
    for r in &out.reports {
        if r.query != query {
            query = r.query;
            let _ = writeln!(text, "snapshot {query}");
            let _ = writeln!(text, "  {REPORT_HEADER}");
        }
        text.push_str("  ");
        report_line(&mut text, r);
    }
    let modes: Vec<String> = (1..=c.m())
        .filter(|&d| out.final_state.connections_on(d).next().is_some())
        .map(|d| format!("D{d}={}", out.final_state.output_mode(d)))
        .collect();
    if !modes.is_empty() {
        let _ = writeln!(text, "output switches: {}", modes.join(" "));
    }
    text
}
