//! Command implementations. Each returns the text for standard output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use airtime_core::bargaining::{dissemination_rate, gnbs_allocate, nash_product, wpf_aggregate};
use airtime_core::grouping::TransmissionMode;
use airtime_core::sim::{
    compare_over_durations, run_scenario_with, slot_size_sweep, Policy, RoundReport, Scenario, SimulationReport,
};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

/// Drops the sign of values that print as zero, so output never shows
/// `-0.000000`.
fn z(v: f64) -> f64 {
    if v.abs() < 5e-7 {
        0.0
    } else {
        v
    }
}

fn mode_name(mode: TransmissionMode) -> &'static str {
    match mode {
        TransmissionMode::Idle => "idle",
        TransmissionMode::UnicastPair => "unicast",
        TransmissionMode::GoCoordinated => "go",
    }
}

/// One round of the scenario with loss and estimation error stripped, so
/// the plan is a pure function of the scenario.
pub fn plan(scenario: &Scenario, policy: Policy, round: usize) -> CliResult<RoundReport> {
    let report = run_scenario_with(&scenario.without_randomness(), policy)?;
    let n = report.rounds.len();
    report
        .rounds
        .into_iter()
        .nth(round)
        .ok_or_else(|| CliError::Schema(format!("round {round} does not exist (the scenario has {n} rounds)")))
}

pub fn allocate(scenario: &Scenario, policy: Policy, round: usize, format: Format) -> CliResult<String> {
    let r = plan(scenario, policy, round)?;
    let p = &r.problem;
    let x = r.allocation.broadcast();
    let y = r.allocation.upload();
    let (gnbs, _) = gnbs_allocate(p)?;
    let np = nash_product(p, x);
    let wpf = wpf_aggregate(p, gnbs.broadcast(), x);

    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str("node_id,role,load_mb,upload_s,broadcast_s,rate_mbps,utility\n");
            for (i, pl) in p.players().iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{:.6},{:.6},{:.6},{:.6},{:.6}",
                    pl.id,
                    if pl.is_group_owner() { "go" } else { "client" },
                    pl.data_mb,
                    z(y[i]),
                    z(x[i]),
                    z(dissemination_rate(p, x, i)),
                    z(pl.utility.value(x[i], p.cap(i))),
                );
            }
        }
        Format::Table => {
            let _ = writeln!(
                out,
                "round {} [{:.3}, {:.3}] s, group owner {}, mode {}, policy {}, airtime {:.3} s",
                r.index,
                r.start_s,
                r.end_s,
                r.group_owner,
                mode_name(r.mode),
                policy,
                p.airtime()
            );
            let _ = writeln!(
                out,
                "{:>6} {:>7} {:>9} {:>9} {:>12} {:>10} {:>8}",
                "node", "role", "load_mb", "upload_s", "broadcast_s", "rate_mbps", "utility"
            );
            for (i, pl) in p.players().iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{:>6} {:>7} {:>9.3} {:>9.3} {:>12.3} {:>10.3} {:>8.3}",
                    pl.id.to_string(),
                    if pl.is_group_owner() { "go" } else { "client" },
                    pl.data_mb,
                    z(y[i]),
                    z(x[i]),
                    z(dissemination_rate(p, x, i)),
                    z(pl.utility.value(x[i], p.cap(i))),
                );
            }
            let _ = writeln!(out, "nash product: {:.6}", z(np));
            let _ = writeln!(out, "wpf aggregate vs gsa: {:.6}", z(wpf));
        }
    }
    Ok(out)
}

pub fn schedule(scenario: &Scenario, policy: Policy, round: usize, format: Format) -> CliResult<String> {
    let r = plan(scenario, policy, round)?;
    Ok(match format {
        Format::Csv => r.schedule.to_csv(),
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "round {} [{:.3}, {:.3}] s, group owner {}, mode {}, basic slot {:.3} ms, cycle {:.3} ms",
                r.index,
                r.start_s,
                r.end_s,
                r.group_owner,
                mode_name(r.mode),
                r.t_slot_s * 1e3,
                r.schedule.cycle_length() * 1e3
            );
            let _ = writeln!(out, "{:>6} {:>9} {:>9} {:>9}", "node", "whole_ms", "upload_ms", "bcast_ms");
            for s in &r.slots {
                let _ = writeln!(
                    out,
                    "{:>6} {:>9.3} {:>9.3} {:>9.3}",
                    s.node.to_string(),
                    s.whole_s * 1e3,
                    s.upload_s * 1e3,
                    s.broadcast_s * 1e3
                );
            }
            let _ = writeln!(out, "{} slots over {:.3} s", r.schedule.entries().len(), r.schedule.interval());
            out
        }
    })
}

pub fn rounds_csv(report: &SimulationReport) -> String {
    let mut out = String::from(
        "round,start_s,end_s,mode,node_id,role,load_mb,loss,upload_s,broadcast_s,realized_broadcast_s,realized_rate_mbps\n",
    );
    for r in &report.rounds {
        for (k, id) in r.members.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{:.6},{:.6},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                r.index,
                r.start_s,
                r.end_s,
                mode_name(r.mode),
                id,
                if *id == r.group_owner { "go" } else { "client" },
                r.loads_mb[k],
                r.loss[k],
                z(r.allocation.upload()[k]),
                r.allocation.broadcast()[k],
                r.realized_broadcast_s[k],
                r.realized_rate_mbps[k],
            );
        }
    }
    out
}

pub fn delivery_csv(report: &SimulationReport) -> String {
    let mut out = String::from("from,to,delivered_mb\n");
    for (&(from, to), mb) in &report.delivered_mb {
        let _ = writeln!(out, "{from},{to},{mb:.6}");
    }
    out
}

pub fn metrics_csv(report: &SimulationReport) -> String {
    let mut out = String::from("round,start_s,end_s,nash_product_realized,nash_product_ideal,wpf_vs_ideal\n");
    for r in &report.rounds {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.index,
            r.start_s,
            r.end_s,
            z(r.nash_product_realized),
            z(r.nash_product_ideal),
            z(r.wpf_vs_ideal)
        );
    }
    if let (Some(a), Some(b), Some(c)) = (
        report.nash_product_realized,
        report.nash_product_ideal,
        report.wpf_aggregate_vs_ideal,
    ) {
        let _ = writeln!(out, "all,,,{:.6},{:.6},{:.6}", z(a), z(b), z(c));
    }
    out
}

pub fn simulate(scenario: &Scenario, policy: Policy, out_dir: &Path) -> CliResult<String> {
    let report = run_scenario_with(scenario, policy)?;
    fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    for (name, body) in [
        ("rounds.csv", rounds_csv(&report)),
        ("delivery.csv", delivery_csv(&report)),
        ("metrics.csv", metrics_csv(&report)),
    ] {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|source| CliError::Io { path, source })?;
    }

    let mut out = String::new();
    let _ = writeln!(out, "{} rounds, policy {}", report.rounds.len(), policy);
    for r in &report.rounds {
        let members: Vec<String> = r.members.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(
            out,
            "  [{:.3}, {:.3}] s members {} go {} mode {} nash product {:.6}",
            r.start_s,
            r.end_s,
            members.join(" "),
            r.group_owner,
            mode_name(r.mode),
            r.nash_product_realized
        );
    }
    if let (Some(np), Some(wpf)) = (report.nash_product_realized, report.wpf_aggregate_vs_ideal) {
        let _ = writeln!(out, "mean nash product {np:.6}, mean wpf aggregate vs ideal {:.6}", z(wpf));
    }
    let _ = writeln!(out, "wrote rounds.csv, delivery.csv and metrics.csv to {}", out_dir.display());
    Ok(out)
}

pub fn compare(scenario: &Scenario, durations: &[f64], repetitions: usize, format: Format) -> CliResult<String> {
    check_positive(durations, "durations")?;
    check_reps(repetitions)?;
    let rows = compare_over_durations(scenario, durations, &Policy::ALL, repetitions)?;
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str("duration_s,gsa,eql,wtd\n");
            for r in &rows {
                let v = &r.nash_product;
                let _ = writeln!(out, "{:.6},{:.6},{:.6},{:.6}", r.duration_s, v[0], v[1], v[2]);
            }
        }
        Format::Table => {
            let _ = writeln!(out, "{:>10} {:>10} {:>10} {:>10}", "duration_s", "gsa", "eql", "wtd");
            for r in &rows {
                let v = &r.nash_product;
                let _ = writeln!(out, "{:>10.3} {:>10.6} {:>10.6} {:>10.6}", r.duration_s, v[0], v[1], v[2]);
            }
        }
    }
    Ok(out)
}

pub fn sweep(scenario: &Scenario, slot_sizes_ms: &[f64], repetitions: usize, format: Format) -> CliResult<String> {
    check_positive(slot_sizes_ms, "slot sizes")?;
    check_reps(repetitions)?;
    let seconds: Vec<f64> = slot_sizes_ms.iter().map(|ms| ms / 1000.0).collect();
    let points = slot_size_sweep(scenario, &seconds, repetitions)?;
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str("t_slot_ms,mean_wpf,stddev\n");
            for (ms, p) in slot_sizes_ms.iter().zip(&points) {
                let _ = writeln!(out, "{ms:.6},{:.6},{:.6}", z(p.mean_wpf), p.stddev);
            }
        }
        Format::Table => {
            let _ = writeln!(out, "{:>10} {:>10} {:>10}", "t_slot_ms", "mean_wpf", "stddev");
            for (ms, p) in slot_sizes_ms.iter().zip(&points) {
                let _ = writeln!(out, "{ms:>10.3} {:>10.6} {:>10.6}", z(p.mean_wpf), p.stddev);
            }
        }
    }
    Ok(out)
}

fn check_positive(values: &[f64], what: &str) -> CliResult<()> {
    if values.is_empty() || values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(CliError::Schema(format!("{what} must be a non-empty list of positive numbers")));
    }
    Ok(())
}

fn check_reps(repetitions: usize) -> CliResult<()> {
    if repetitions == 0 {
        return Err(CliError::Schema("--reps must be at least 1".into()));
    }
    Ok(())
}
