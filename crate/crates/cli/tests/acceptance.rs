//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status
//! if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use airtime_cli::{commands, Format};
use airtime_core::bargaining::{
    gnbs_allocate, kkt_residuals, oracle_allocate, proportional_allocate, wpf_aggregate, BargainingProblem, Player,
    Utility,
};
use airtime_core::grouping::{select_roles, total_broadcast_time, ConnectivityGraph, ContactEvent, ContactTable};
use airtime_core::grouping::TransmissionMode;
use airtime_core::sim::{repeated_contacts, run_scenario, spearman, Policy, Scenario};
use airtime_core::NodeId;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BROADCAST: f64 = 11.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn parse_csv(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

/// Published upload/broadcast times (y, x) per node for GSA, EQL and WTD.
const TABLE1: [[(f64, f64); 3]; 6] = [
    [(0.714, 0.714), (0.909, 0.909), (0.217, 0.217)],
    [(0.714, 0.714), (0.909, 0.909), (0.435, 0.435)],
    [(0.714, 0.714), (0.909, 0.909), (0.869, 0.869)],
    [(0.0, 2.857), (0.0, 0.909), (0.0, 0.869)],
    [(0.714, 0.714), (0.909, 0.909), (1.304, 1.304)],
    [(0.714, 0.714), (0.909, 0.909), (1.739, 1.739)],
];

fn table1_problem() -> BargainingProblem {
    let loads = [10.0, 20.0, 40.0, 40.0, 60.0, 80.0];
    let players = (0..6)
        .map(|k| {
            if k == 3 {
                Player::group_owner(4, loads[k], 2.0)
            } else {
                Player::client(k as u32 + 1, loads[k], BROADCAST, 1.0)
            }
        })
        .collect();
    BargainingProblem::new(players, 10.0, BROADCAST).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (col, policy) in Policy::ALL.iter().enumerate() {
        let csv = commands::allocate(&Scenario::table1(), *policy, 0, Format::Csv).unwrap();
        for (row, fields) in parse_csv(&csv).iter().enumerate() {
            let y: f64 = fields[3].parse().unwrap();
            let x: f64 = fields[4].parse().unwrap();
            let (py, px) = TABLE1[row][col];
            worst = worst.max((y - py).abs()).max((x - px).abs());
            count += 2;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        count == 36 && worst <= 0.001 && elapsed < Duration::from_secs(1),
        format!("{count} values, max |error| {worst:.6} s (tol 0.001), {elapsed:.2?}"),
    )
}

/// Random instance with 2 to 4 players, beta in [0, 3], a mix of linear
/// and logarithmic utilities, and a budget below total demand.
fn random_instance(rng: &mut ChaCha8Rng) -> BargainingProblem {
    let n = rng.random_range(2..=4);
    let go = rng.random_range(0..n);
    let players: Vec<Player> = (0..n)
        .map(|i| {
            let id = i as u32 + 1;
            let load = rng.random_range(5.0..60.0);
            let alpha = rng.random_range(0.5..3.0);
            let beta: f64 = rng.random_range(0.0..3.0);
            let p = if i == go {
                Player::group_owner(id, load, alpha)
            } else {
                Player::client(id, load, BROADCAST / beta, alpha)
            };
            if rng.random_bool(0.5) {
                p
            } else {
                p.with_utility(Utility::LogShifted {
                    shift: rng.random_range(0.2..2.0),
                })
            }
        })
        .collect();
    let probe = BargainingProblem::new(players, 1.0, BROADCAST).unwrap();
    let airtime = probe.total_demand() * rng.random_range(0.15..0.9);
    probe.with_airtime(airtime).unwrap()
}

fn criterion_2_and_3() -> (Outcome, Outcome) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut worst_gap: f64 = 0.0;
    let (table1, _) = gnbs_allocate(&table1_problem()).unwrap();
    let mut worst_kkt = kkt_residuals(&table1_problem(), &table1, 0.1).max_residual;
    for _ in 0..50 {
        let p = random_instance(&mut rng);
        let (a, kkt) = gnbs_allocate(&p).unwrap();
        worst_kkt = worst_kkt.max(kkt.max_residual);
        let o = oracle_allocate(&p, 40).unwrap();
        for (x, y) in a.broadcast().iter().zip(o.broadcast()) {
            worst_gap = worst_gap.max((x - y).abs());
        }
    }
    let elapsed = start.elapsed();
    (
        outcome(
            worst_gap <= 1e-4 && elapsed < Duration::from_secs(60),
            format!("50 instances, max |gnbs - oracle| {worst_gap:.2e} (tol 1e-4), {elapsed:.2?}"),
        ),
        outcome(worst_kkt <= 1e-7, format!("max KKT residual {worst_kkt:.2e} (tol 1e-7)")),
    )
}

fn lemma_instance() -> impl Strategy<Value = BargainingProblem> {
    (2usize..=6)
        .prop_flat_map(|n| {
            (
                prop::collection::vec((1.0f64..100.0, 0.0f64..3.0, 0.1f64..5.0, 0.0f64..0.3), n),
                prop::collection::vec(prop::option::of(0.05f64..5.0), n),
                0.05f64..0.95,
                0..n,
            )
        })
        .prop_map(|(params, shifts, budget, go)| {
            let players: Vec<Player> = params
                .iter()
                .zip(&shifts)
                .enumerate()
                .map(|(i, (&(load, beta, alpha, d), shift))| {
                    let id = i as u32 + 1;
                    let p = if i == go {
                        Player::group_owner(id, load, alpha)
                    } else {
                        Player::client(id, load, BROADCAST / beta, alpha)
                    };
                    let p = match shift {
                        Some(shift) => p.with_utility(Utility::LogShifted { shift: *shift }),
                        None => p,
                    };
                    p.with_disagreement(d * load / BROADCAST)
                })
                .collect();
            let probe = BargainingProblem::new(players, 1e9, BROADCAST).unwrap();
            let floor: f64 = (0..probe.len()).map(|i| probe.weight(i) * probe.player(i).disagreement_s).sum();
            let airtime = floor + budget * (probe.total_demand() - floor);
            probe.with_airtime(airtime).unwrap()
        })
}

fn runner() -> TestRunner {
    let config = Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn criterion_4() -> Outcome {
    let mut failures = Vec::new();

    let r = runner().run(&lemma_instance(), |p| {
        let (a, _) = gnbs_allocate(&p).unwrap();
        for i in p.active_indices() {
            prop_assert!(a.broadcast()[i] > p.player(i).disagreement_s);
        }
        Ok(())
    });
    if let Err(e) = r {
        failures.push(format!("gains over disagreement: {e}"));
    }

    let r = runner().run(&(lemma_instance(), 0usize..6, 0.0f64..1.0, 0.0f64..1.0), |(p, i, t1, t2)| {
        let i = i % p.len();
        let (lo, cap) = (p.player(i).disagreement_s, p.cap(i));
        let (a, b) = (t1.min(t2), t1.max(t2));
        prop_assume!(b - a > 1e-6);
        let x1 = lo + (cap - lo) * a.max(1e-9);
        let x2 = lo + (cap - lo) * b;
        prop_assert!(p.level(i, x1).unwrap() < p.level(i, x2).unwrap());
        Ok(())
    });
    if let Err(e) = r {
        failures.push(format!("level monotonicity: {e}"));
    }

    let r = runner().run(&(lemma_instance(), 0.0f64..1.0, 0.0f64..1.0), |(p, t1, t2)| {
        let top = p.active_indices().map(|i| p.saturation_level(i)).fold(0.0, f64::max);
        let (a, b) = (t1.min(t2), t1.max(t2));
        prop_assume!(b - a > 1e-6);
        prop_assert!(p.demand_at_level(top * a.max(1e-9)) < p.demand_at_level(top * b));
        Ok(())
    });
    if let Err(e) = r {
        failures.push(format!("demand monotonicity: {e}"));
    }

    let r = runner().run(&(lemma_instance(), prop::collection::vec(0.01f64..10.0, 6)), |(p, w)| {
        let (a, _) = gnbs_allocate(&p).unwrap();
        let other = proportional_allocate(&p, &w[..p.len()]).unwrap();
        prop_assert!(wpf_aggregate(&p, a.broadcast(), other.broadcast()) <= 1e-9);
        Ok(())
    });
    if let Err(e) = r {
        failures.push(format!("proportional fairness sign: {e}"));
    }

    if failures.is_empty() {
        outcome(true, "4 suites x 1000 cases")
    } else {
        outcome(false, failures.join("; "))
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let durations: Vec<f64> = (1..=20).map(|k| 2.0 * k as f64).collect();
    let csv = commands::compare(&Scenario::table1(), &durations, 100, Format::Csv).unwrap();
    let rows = parse_csv(&csv);
    let mut bad = Vec::new();
    for r in &rows {
        let v: Vec<f64> = r.iter().map(|f| f.parse().unwrap()).collect();
        if !(v[1] >= v[2] && v[1] >= v[3]) {
            bad.push(format!("{}s", r[0]));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        rows.len() == 20 && bad.is_empty() && elapsed < Duration::from_secs(120),
        format!("{} durations x 100 reps, violations: {:?}, {elapsed:.2?}", rows.len(), bad),
    )
}

fn criterion_6() -> Outcome {
    let ids = [NodeId(1), NodeId(2), NodeId(3), NodeId(4)];
    let loads = [(ids[0], 10.0), (ids[1], 20.0), (ids[2], 30.0), (ids[3], 40.0)];
    let graph = ConnectivityGraph::from_edges([
        (ids[0], ids[1]),
        (ids[0], ids[2]),
        (ids[0], ids[3]),
        (ids[2], ids[1]),
        (ids[2], ids[3]),
    ])
    .unwrap();
    let tables: Vec<ContactTable> = loads
        .iter()
        .map(|&(owner, m)| {
            let mut t = ContactTable::new(owner, m);
            for &(id, data_mb) in loads.iter().filter(|(id, _)| *id != owner) {
                t.apply(ContactEvent::Join { id, pcd_s: 10.0, data_mb }).unwrap();
            }
            t
        })
        .collect();
    let via_a = total_broadcast_time(&loads, ids[0], 10.0).unwrap();
    let via_c = total_broadcast_time(&loads, ids[2], 10.0).unwrap();
    let go = select_roles(&tables, &graph).unwrap().group_owner;
    outcome(
        (via_a - 19.0).abs() < 1e-9 && (via_c - 17.0).abs() < 1e-9 && go == ids[2],
        format!("A: {via_a} s, C: {via_c} s, selected GO: node {go} (C = 3)"),
    )
}

fn criterion_7() -> Outcome {
    let report = run_scenario(&Scenario::dynamic4()).unwrap();
    let bounds: Vec<(f64, f64)> = report.rounds.iter().map(|r| (r.start_s, r.end_s)).collect();
    let expected = [(0.0, 4.0), (4.0, 8.0), (8.0, 12.0), (12.0, 16.0), (16.0, 20.0)];
    let structure_ok = bounds == expected
        && report.rounds.iter().all(|r| {
            let three = r.start_s == 4.0 || r.start_s == 12.0;
            if three {
                r.members.len() == 3 && r.mode == TransmissionMode::GoCoordinated
            } else {
                r.members.len() == 2 && r.mode == TransmissionMode::UnicastPair
            }
        });
    let mut worst: f64 = 0.0;
    for r in report.rounds.iter().filter(|r| r.mode == TransmissionMode::GoCoordinated) {
        let go = r.slots.iter().find(|s| s.node == r.group_owner).unwrap();
        for c in r.slots.iter().filter(|s| s.node != r.group_owner) {
            worst = worst.max((go.whole_s / c.whole_s - 2.0).abs());
        }
    }
    outcome(
        structure_ok && worst <= 1e-9,
        format!("{} rounds {:?}, max |GO:client slot ratio - 2| {worst:.2e}", bounds.len(), bounds),
    )
}

fn criterion_8() -> Outcome {
    let mut base = Scenario::table1().with_contact_duration(20.0).unwrap();
    base.loss = None;
    let series = repeated_contacts(&base, 200).unwrap();
    let last = *series.running_average.last().unwrap();
    let rel = (last - series.ideal).abs() / series.ideal;
    outcome(
        series.running_average.len() == 200 && rel <= 0.05,
        format!("final running average {last:.6}, ideal {:.6}, relative gap {:.2}% (tol 5%)", series.ideal, rel * 100.0),
    )
}

fn criterion_9() -> Outcome {
    let sizes = [5.0, 10.0, 20.0, 50.0, 100.0];
    let csv = commands::sweep(&Scenario::table1(), &sizes, 100, Format::Csv).unwrap();
    let means: Vec<f64> = parse_csv(&csv).iter().map(|r| r[1].parse().unwrap()).collect();
    let rho = spearman(&sizes, &means);
    outcome(
        means.len() == 5 && means.iter().all(|&m| m <= 0.0) && rho < 0.0,
        format!("mean wpf {means:?}, spearman {rho:.3}"),
    )
}

fn criterion_10() -> Outcome {
    let outputs = || -> Vec<String> {
        let t1 = Scenario::table1();
        let d4 = Scenario::dynamic4();
        let dir = tempfile::tempdir().unwrap();
        commands::simulate(&d4, Policy::Gsa, dir.path()).unwrap();
        let files: Vec<String> = ["rounds.csv", "delivery.csv", "metrics.csv"]
            .iter()
            .map(|f| std::fs::read_to_string(dir.path().join(f)).unwrap())
            .collect();
        let mut all = vec![
            commands::allocate(&t1, Policy::Gsa, 0, Format::Csv).unwrap(),
            commands::schedule(&t1, Policy::Gsa, 0, Format::Csv).unwrap(),
            commands::compare(&t1, &[5.0, 20.0], 10, Format::Csv).unwrap(),
            commands::sweep(&t1, &[5.0, 20.0, 100.0], 10, Format::Csv).unwrap(),
        ];
        all.extend(files);
        all
    };
    let a = outputs();
    let b = outputs();
    let same = a.iter().zip(&b).filter(|(x, y)| x.as_bytes() == y.as_bytes()).count();
    outcome(same == a.len(), format!("{same}/{} CSV outputs byte-identical across repeated runs", a.len()))
}

fn main() -> ExitCode {
    let (c2, c3) = criterion_2_and_3();
    let results = [
        (1, "Table I reproduction", criterion_1()),
        (2, "oracle equivalence", c2),
        (3, "KKT certification", c3),
        (4, "lemma property suites", criterion_4()),
        (5, "policy dominance over durations", criterion_5()),
        (6, "role selection example", criterion_6()),
        (7, "dynamic experiment structure", criterion_7()),
        (8, "repeated-contact convergence", criterion_8()),
        (9, "slot-size fairness trend", criterion_9()),
        (10, "determinism", criterion_10()),
    ];
    let mut failed = 0;
    for (k, name, o) in &results {
        println!("{} criterion {k:>2} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
