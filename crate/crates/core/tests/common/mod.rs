//! Shared helpers for the integration and acceptance suites.

#![allow(dead_code)]

use statrs::distribution::{ContinuousCDF, Normal};

use qseg::scenarios::{build_scenario, Scenario, ScenarioName};
use qseg::segment::estimate_changepoint;
use qseg::seqgen::generate_quantum_sequence;

pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = sorted.len() / 2;
    if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    }
}

/// 99.9% multinomial band on the L1 distance between empirical frequencies
/// over `n_samples` draws and the exact distribution `p`.
///
/// Bonferroni over components: each |p_hat_j - p_j| gets a two-sided normal
/// band at level alpha/m, so the union bound keeps overall coverage at or
/// above 1 - alpha. Deterministic components contribute zero width.
pub fn l1_band_999(p: &[f64], n_samples: usize) -> f64 {
    let alpha = 1e-3;
    let m = p.len() as f64;
    let normal = Normal::new(0.0, 1.0).unwrap();
    let z = normal.inverse_cdf(1.0 - alpha / (2.0 * m));
    p.iter()
        .map(|&pj| z * (pj * (1.0 - pj) / n_samples as f64).sqrt())
        .sum()
}

pub fn empirical_l1(counts: &[usize], n_samples: usize, p: &[f64]) -> f64 {
    counts
        .iter()
        .zip(p)
        .map(|(&c, &pj)| (c as f64 / n_samples as f64 - pj).abs())
        .sum()
}

/// One scenario run: the changing-index estimate with its peak value.
pub struct ScenarioRun {
    pub estimate: usize,
    pub argmax_value: f64,
    pub no_signal: bool,
}

pub fn scenario(name: &str) -> Scenario<f64> {
    let name: ScenarioName = name.parse().expect("known scenario name");
    build_scenario(name).expect("scenario builds")
}

pub fn run_scenario(scenario: &Scenario<f64>, seed: u64) -> ScenarioRun {
    let seq = generate_quantum_sequence(&scenario.program, &scenario.schedule, seed)
        .expect("generation succeeds");
    let catalog = scenario.program.outcome_catalog();
    let result = estimate_changepoint(&seq, &catalog).expect("estimation succeeds");
    ScenarioRun {
        estimate: result.estimated_changepoint,
        argmax_value: result.profile.argmax_value(),
        no_signal: result.no_signal,
    }
}

pub fn scenario_runs(scenario: &Scenario<f64>, base_seed: u64, count: usize) -> Vec<ScenarioRun> {
    (0..count)
        .map(|t| run_scenario(scenario, base_seed + t as u64))
        .collect()
}

pub fn abs_errors(runs: &[ScenarioRun], true_changepoint: usize) -> Vec<f64> {
    runs.iter()
        .map(|r| (r.estimate as f64 - true_changepoint as f64).abs())
        .collect()
}

/// Fraction of estimates landing in the fullest bin of width `n`/20 over
/// the cursor range [2, n]. Returns `None` when there are no estimates.
pub fn max_bin_fraction(estimates: &[usize], n: usize) -> Option<f64> {
    if estimates.is_empty() {
        return None;
    }
    let width = n / 20;
    let bins = n / width + 1;
    let mut histogram = vec![0usize; bins];
    for &k in estimates {
        histogram[(k - 2) / width] += 1;
    }
    let fullest = histogram.into_iter().max().unwrap();
    Some(fullest as f64 / estimates.len() as f64)
}
