//! Batches of seeded runs: repeated contacts, slot-size sweeps and policy
//! comparisons.

use super::engine::{run_scenario_with, Policy, SimulationReport};
use super::rng::derive_seed;
use super::scenario::Scenario;
use crate::{Error, Result};

fn realized_np(report: &SimulationReport) -> f64 {
    report.nash_product_realized.unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepeatedContacts {
    /// Realized Nash product of each contact.
    pub realized: Vec<f64>,
    /// Running mean of `realized`.
    pub running_average: Vec<f64>,
    /// Realized Nash product of the same contact without loss or
    /// estimation error.
    pub ideal: f64,
}

/// Plays `n_contacts` independent copies of `base`, each with its own seed
/// derived from `base.seed`.
pub fn repeated_contacts(base: &Scenario, n_contacts: usize) -> Result<RepeatedContacts> {
    let ideal = realized_np(&run_scenario_with(&base.without_randomness(), Policy::Gsa)?);
    let mut realized = Vec::with_capacity(n_contacts);
    let mut running_average = Vec::with_capacity(n_contacts);
    let mut sum = 0.0;
    for k in 0..n_contacts {
        let scenario = Scenario {
            seed: derive_seed(base.seed, k as u64),
            ..base.clone()
        };
        let np = realized_np(&run_scenario_with(&scenario, Policy::Gsa)?);
        sum += np;
        realized.push(np);
        running_average.push(sum / (k + 1) as f64);
    }
    Ok(RepeatedContacts {
        realized,
        running_average,
        ideal,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub t_slot_s: f64,
    pub mean_wpf: f64,
    /// Sample standard deviation across repetitions (zero for one).
    pub stddev: f64,
}

/// Mean WPF aggregate of the realized point against the ideal GNBS point
/// for each basic slot size. Repetition `k` uses the same seed for every
/// slot size.
pub fn slot_size_sweep(scenario: &Scenario, t_slots: &[f64], repetitions: usize) -> Result<Vec<SweepPoint>> {
    if repetitions == 0 {
        return Err(Error::InvalidScenario("at least one repetition is needed".into()));
    }
    t_slots
        .iter()
        .map(|&t_slot_s| {
            let values = (0..repetitions)
                .map(|k| {
                    let s = Scenario {
                        t_slot_s,
                        seed: derive_seed(scenario.seed, k as u64),
                        ..scenario.clone()
                    };
                    Ok(run_scenario_with(&s, Policy::Gsa)?.wpf_aggregate_vs_ideal.unwrap_or(0.0))
                })
                .collect::<Result<Vec<f64>>>()?;
            let (mean_wpf, stddev) = mean_and_stddev(&values);
            Ok(SweepPoint {
                t_slot_s,
                mean_wpf,
                stddev,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyOutcome {
    pub policy: Policy,
    pub report: SimulationReport,
}

/// Runs the scenario once per policy with identical seeds.
pub fn compare_policies(scenario: &Scenario, policies: &[Policy]) -> Result<Vec<PolicyOutcome>> {
    policies
        .iter()
        .map(|&policy| {
            Ok(PolicyOutcome {
                policy,
                report: run_scenario_with(scenario, policy)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DurationRow {
    pub duration_s: f64,
    /// Mean realized Nash product per policy, in the order requested.
    pub nash_product: Vec<f64>,
}

/// Mean realized Nash product of each policy for each contact duration,
/// over `repetitions` seeded runs per duration.
pub fn compare_over_durations(
    scenario: &Scenario,
    durations: &[f64],
    policies: &[Policy],
    repetitions: usize,
) -> Result<Vec<DurationRow>> {
    if repetitions == 0 {
        return Err(Error::InvalidScenario("at least one repetition is needed".into()));
    }
    durations
        .iter()
        .map(|&duration_s| {
            let scaled = scenario.with_contact_duration(duration_s)?;
            let mut sums = vec![0.0; policies.len()];
            for k in 0..repetitions {
                let s = Scenario {
                    seed: derive_seed(scenario.seed, k as u64),
                    ..scaled.clone()
                };
                for (sum, outcome) in sums.iter_mut().zip(compare_policies(&s, policies)?) {
                    *sum += realized_np(&outcome.report);
                }
            }
            Ok(DurationRow {
                duration_s,
                nash_product: sums.into_iter().map(|s| s / repetitions as f64).collect(),
            })
        })
        .collect()
}

pub fn mean_and_stddev(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Spearman rank correlation, with tied values given their average rank.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "spearman needs paired samples");
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut out = vec![0.0; v.len()];
    let mut k = 0;
    while k < idx.len() {
        let mut end = k + 1;
        while end < idx.len() && v[idx[end]] == v[idx[k]] {
            end += 1;
        }
        let rank = (k + end + 1) as f64 / 2.0;
        for &i in &idx[k..end] {
            out[i] = rank;
        }
        k = end;
    }
    out
}
