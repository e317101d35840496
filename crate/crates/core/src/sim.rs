//! Seeded Monte Carlo sampling of experiment runs.
//!
//! The stream comes from ChaCha8 seeded with `seed_from_u64`, whose output
//! is specified by the `rand_chacha` crate independently of platform. Each
//! run consumes three 64-bit words: left setting, right setting, outcome pair.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hardy::{
    probability_table, HardyState, MeasurementFamily, OutcomePair, Requirement, Setting, SettingPair,
    HARDY_EVENTS,
};
use crate::qcore::ZERO_TOLERANCE;

/// Buckets with |z| above this fail the empirical comparison.
pub const Z_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("run count must be at least 1")]
    NoRuns,
    #[error("setting probability {0} is outside [0, 1]")]
    InvalidSettingProbability(f64),
    #[error("tally was sampled from {tally:?}, not {state:?}")]
    FamilyMismatch {
        tally: MeasurementFamily,
        state: MeasurementFamily,
    },
}

/// Probability of choosing setting 1 on each side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingChoice {
    pub left_one: f64,
    pub right_one: f64,
}

impl Default for SettingChoice {
    fn default() -> Self {
        SettingChoice {
            left_one: 0.5,
            right_one: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub family: MeasurementFamily,
    pub seed: u64,
    pub total: u64,
    /// Indexed `[settings.index()][outcomes.index()]`.
    pub counts: [[u64; 4]; 4],
}

fn same_family(a: &MeasurementFamily, b: &MeasurementFamily) -> bool {
    let bits = |f: &MeasurementFamily| {
        [f.theta_left, f.theta_right, f.phi_left, f.phi_right].map(f64::to_bits)
    };
    bits(a) == bits(b)
}

impl Tally {
    pub fn new(family: &MeasurementFamily, seed: u64) -> Self {
        Tally {
            family: *family,
            seed,
            total: 0,
            counts: [[0; 4]; 4],
        }
    }

    pub fn record(&mut self, settings: SettingPair, outcomes: OutcomePair) {
        self.counts[settings.index()][outcomes.index()] += 1;
        self.total += 1;
    }

    pub fn count(&self, settings: SettingPair, outcomes: OutcomePair) -> u64 {
        self.counts[settings.index()][outcomes.index()]
    }

    pub fn settings_total(&self, settings: SettingPair) -> u64 {
        self.counts[settings.index()].iter().sum()
    }

    /// Conditional frequency of `outcomes` given `settings`.
    pub fn frequency(&self, settings: SettingPair, outcomes: OutcomePair) -> f64 {
        let n = self.settings_total(settings);
        if n == 0 {
            0.0
        } else {
            self.count(settings, outcomes) as f64 / n as f64
        }
    }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Born probabilities with sub-tolerance entries set to exactly zero.
pub fn clamped_table(state: &HardyState) -> [[f64; 4]; 4] {
    let mut table = probability_table(state);
    for p in table.iter_mut().flatten() {
        if *p <= ZERO_TOLERANCE {
            *p = 0.0;
        }
    }
    table
}

pub fn sample_runs(state: &HardyState, n: u64, seed: u64) -> Result<Tally, SimError> {
    sample_runs_with(state, n, seed, SettingChoice::default())
}

pub fn sample_runs_with(
    state: &HardyState,
    n: u64,
    seed: u64,
    choice: SettingChoice,
) -> Result<Tally, SimError> {
    if n == 0 {
        return Err(SimError::NoRuns);
    }
    for p in [choice.left_one, choice.right_one] {
        if !(0.0..=1.0).contains(&p) {
            return Err(SimError::InvalidSettingProbability(p));
        }
    }
    let table = clamped_table(state);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::new(state.family(), seed);
    let pick = |u: f64, p_one: f64| if u < p_one { Setting::One } else { Setting::Two };
    for _ in 0..n {
        let left = pick(unit(&mut rng), choice.left_one);
        let right = pick(unit(&mut rng), choice.right_one);
        let settings = SettingPair::new(left, right);
        let row = &table[settings.index()];
        let target = unit(&mut rng) * row.iter().sum::<f64>();
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, &p) in row.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            acc += p;
            chosen = Some(i);
            if target < acc {
                break;
            }
        }
        let idx = chosen.expect("every setting row has positive mass");
        tally.record(settings, OutcomePair::ALL[idx]);
    }
    Ok(tally)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketComparison {
    pub settings: SettingPair,
    pub outcomes: OutcomePair,
    pub count: u64,
    pub settings_total: u64,
    pub frequency: f64,
    pub probability: f64,
    pub standard_error: f64,
    pub z_score: f64,
    pub forbidden: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalReport {
    pub total: u64,
    pub seed: u64,
    pub z_threshold: f64,
    pub buckets: Vec<BucketComparison>,
    pub failures: Vec<String>,
    pub passed: bool,
}

impl EmpiricalReport {
    pub fn bucket(&self, settings: SettingPair, outcomes: OutcomePair) -> &BucketComparison {
        &self.buckets[settings.index() * 4 + outcomes.index()]
    }
}

fn is_forbidden(settings: SettingPair, outcomes: OutcomePair) -> bool {
    HARDY_EVENTS
        .iter()
        .any(|&(s, o, r)| r == Requirement::Zero && s == settings && o == outcomes)
}

/// Compares a tally with the Born probabilities of the state it came from.
pub fn empirical_report(tally: &Tally, state: &HardyState) -> Result<EmpiricalReport, SimError> {
    if !same_family(&tally.family, state.family()) {
        return Err(SimError::FamilyMismatch {
            tally: tally.family,
            state: *state.family(),
        });
    }
    let table = clamped_table(state);
    let mut buckets = Vec::with_capacity(16);
    let mut failures = Vec::new();
    for settings in SettingPair::ALL {
        let n = tally.settings_total(settings);
        for outcomes in OutcomePair::ALL {
            let count = tally.count(settings, outcomes);
            let p = table[settings.index()][outcomes.index()];
            let frequency = tally.frequency(settings, outcomes);
            let standard_error = if n == 0 { 0.0 } else { (p * (1.0 - p) / n as f64).sqrt() };
            let z_score = if standard_error > 0.0 {
                (frequency - p) / standard_error
            } else if (frequency - p).abs() == 0.0 || n == 0 {
                0.0
            } else {
                f64::INFINITY
            };
            let forbidden = is_forbidden(settings, outcomes);
            let label = format!("p({settings}{outcomes})");
            let mut passed = true;
            if forbidden && count != 0 {
                failures.push(format!("{label}: forbidden bucket has count {count}"));
                passed = false;
            }
            if z_score.abs() > Z_THRESHOLD {
                failures.push(format!("{label}: |z| = {:.3} exceeds {Z_THRESHOLD}", z_score.abs()));
                passed = false;
            }
            buckets.push(BucketComparison {
                settings,
                outcomes,
                count,
                settings_total: n,
                frequency,
                probability: p,
                standard_error,
                z_score,
                forbidden,
                passed,
            });
        }
    }
    Ok(EmpiricalReport {
        total: tally.total,
        seed: tally.seed,
        z_threshold: Z_THRESHOLD,
        passed: failures.is_empty(),
        buckets,
        failures,
    })
}
