//! Seeded Monte Carlo experiments over random key/value sets.
//!
//! Each trial draws `q` keys (Bernoulli(`key_density`) bits, or the first `q`
//! standard basis vectors with `identity_keys`) and `q` values (Bernoulli(0.5)
//! bits) from a [`SplitMix64`] seeded with [`trial_seed`]`(seed, t)`, keys
//! first, vector by vector, bit 0 first. It then builds both a raw and an
//! orthonormalized memory from the same pairs and recalls every stored key
//! from each.
//!
//! A trial passes when
//!
//! * the orthonormalized keys are pairwise disjoint,
//! * at most `p` of them are nonzero,
//! * the preprocessed memory recalls exactly the associations whose basis
//!   vector is nonzero (`perfect_recall == nonzero_basis`),
//! * every raw recall of a nonzero key covers its stored value,
//! * and, with `oracle`, the element-wise reference agrees bit for bit.
//!
//! Trials are independent and run in parallel; records come back in trial
//! order, so a report depends only on its configuration.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bcmm::{recall, train};
use crate::bitvec::{BinaryVector, PatternSet};
use crate::bop::{orthonormalize, verify_orthonormal};
use crate::error::{Error, Result};
use crate::oracle::{self, NaiveVector};
use crate::rng::{trial_seed, SplitMix64};

pub const VALUE_DENSITY: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "text" => Ok(Self::Text),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    /// Storage capacity after orthonormalization.
    Capacity,
    /// Bit errors of raw versus orthonormalized recall.
    Crosstalk,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub p: usize,
    pub q: usize,
    pub trials: u64,
    pub seed: u64,
    pub key_density: f64,
    /// Use `e_0 … e_{q-1}` as keys instead of random ones. Needs `q <= p`.
    pub identity_keys: bool,
    /// Cross-check every trial against the element-wise reference.
    pub oracle: bool,
    #[serde(skip)]
    pub report_format: ReportFormat,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            p: 7,
            q: 6,
            trials: 100,
            seed: 0,
            key_density: 0.5,
            identity_keys: false,
            oracle: false,
            report_format: ReportFormat::Text,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 {
            return Err(Error::Config("p must be at least 1".into()));
        }
        if self.q == 0 {
            return Err(Error::Config("q must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.key_density) {
            return Err(Error::Config(format!(
                "key density {} is outside [0, 1]",
                self.key_density
            )));
        }
        if self.identity_keys && self.q > self.p {
            return Err(Error::Config(format!(
                "identity keys need q <= p, got q = {} and p = {}",
                self.q, self.p
            )));
        }
        Ok(())
    }
}

/// Keys and values for one trial.
pub fn sample_trial(config: &ExperimentConfig, trial: u64) -> Result<(PatternSet, PatternSet)> {
    let mut rng = SplitMix64::new(trial_seed(config.seed, trial));
    let keys = if config.identity_keys {
        (0..config.q)
            .map(|i| BinaryVector::unit(config.p, i))
            .collect::<Result<Vec<_>>>()?
    } else {
        (0..config.q)
            .map(|_| rng.binary_vector(config.p, config.key_density))
            .collect::<Result<Vec<_>>>()?
    };
    let values = (0..config.q)
        .map(|_| rng.binary_vector(config.p, VALUE_DENSITY))
        .collect::<Result<Vec<_>>>()?;
    Ok((PatternSet::new(keys)?, PatternSet::new(values)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    /// Orthonormalized keys are pairwise disjoint.
    pub orthogonal: bool,
    pub nonzero_basis: usize,
    /// Stored keys whose preprocessed recall returned exactly their value
    /// through their own nonzero basis vector.
    pub perfect_recall: usize,
    /// Stored keys whose raw recall returned exactly their value.
    pub raw_perfect_recall: usize,
    /// Spurious bits, summed over all raw recalls.
    pub crosstalk_bits: usize,
    /// Hamming distance to the stored value, summed over all raw recalls.
    pub raw_bit_errors: usize,
    /// Same, for the preprocessed memory.
    pub preprocessed_bit_errors: usize,
    /// Raw recalls of nonzero keys that lost a bit of the stored value.
    pub superset_violations: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub trials: u64,
    pub passed_trials: u64,
    pub all_passed: bool,
    pub mean_nonzero_basis: f64,
    pub min_nonzero_basis: usize,
    pub max_nonzero_basis: usize,
    pub mean_perfect_recall: f64,
    pub min_perfect_recall: usize,
    pub max_perfect_recall: usize,
    pub mean_raw_perfect_recall: f64,
    pub mean_crosstalk_bits: f64,
    /// Per recall, not per trial.
    pub mean_raw_bit_errors: f64,
    pub mean_preprocessed_bit_errors: f64,
    pub preprocessed_not_worse: bool,
    pub oracle_checked: bool,
    pub oracle_mismatches: u64,
    /// Wall-clock time; not covered by any determinism guarantee.
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub trials: Vec<TrialRecord>,
    pub summary: ExperimentSummary,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.summary.all_passed
    }

    /// Copy with timing zeroed, for byte-level comparison.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.summary.elapsed_ms = 0.0;
        r
    }
}

struct TrialOutcome {
    record: TrialRecord,
    oracle_mismatches: u64,
}

fn run_trial(config: &ExperimentConfig, t: u64) -> Result<TrialOutcome> {
    let seed = trial_seed(config.seed, t);
    let (keys, values) = sample_trial(config, t)?;
    let p = config.p;

    let basis = orthonormalize(&keys);
    let orthogonal = verify_orthonormal(&basis.basis).is_orthogonal;
    let nonzero_basis = basis.nonzero_count();

    let pre = train(&keys, &values, true)?;
    let raw = train(&keys, &values, false)?;

    let mut perfect_recall = 0;
    let mut raw_perfect_recall = 0;
    let mut crosstalk_bits = 0;
    let mut raw_bit_errors = 0;
    let mut preprocessed_bit_errors = 0;
    let mut superset_violations = 0;
    let mut raw_responses = Vec::with_capacity(keys.len());
    for (k, (key, value)) in keys.iter().zip(&values).enumerate() {
        let r = recall(&pre, key)?;
        if r.matched_index == Some(k) && !r.zero_basis && r.response == *value {
            perfect_recall += 1;
        }
        preprocessed_bit_errors += r.response.hamming_distance(value)?;

        let rr = recall(&raw, key)?.response;
        if rr == *value {
            raw_perfect_recall += 1;
        }
        raw_bit_errors += rr.hamming_distance(value)?;
        crosstalk_bits += rr.and_not(value)?.support_count();
        if !key.is_zero() && !value.and_not(&rr)?.is_zero() {
            superset_violations += 1;
        }
        raw_responses.push(rr);
    }

    let mut oracle_mismatches = 0;
    if config.oracle {
        let nk: Vec<NaiveVector> = keys.iter().map(NaiveVector::from).collect();
        let nv: Vec<NaiveVector> = values.iter().map(NaiveVector::from).collect();
        let nb = oracle::naive_bop(&nk)?;
        let packed_b: Vec<NaiveVector> = basis.basis.iter().map(NaiveVector::from).collect();
        oracle_mismatches += u64::from(nb != packed_b);
        let m_raw = oracle::naive_train(&nk, &nv)?;
        let m_pre = oracle::naive_train(&nb, &nv)?;
        oracle_mismatches += u64::from(m_raw != oracle::naive_matrix(raw.matrix()));
        oracle_mismatches += u64::from(m_pre != oracle::naive_matrix(pre.matrix()));
        for (k, rr) in raw_responses.iter().enumerate() {
            let want = oracle::naive_recall(&m_raw, &nk[k])?;
            oracle_mismatches += u64::from(want != NaiveVector::from(rr));
        }
    }

    let passed = orthogonal
        && nonzero_basis <= p
        && perfect_recall == nonzero_basis
        && superset_violations == 0
        && oracle_mismatches == 0;

    Ok(TrialOutcome {
        record: TrialRecord {
            trial: t,
            seed,
            orthogonal,
            nonzero_basis,
            perfect_recall,
            raw_perfect_recall,
            crosstalk_bits,
            raw_bit_errors,
            preprocessed_bit_errors,
            superset_violations,
            passed,
        },
        oracle_mismatches,
    })
}

pub fn run(kind: ExperimentKind, config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let start = Instant::now();
    let outcomes = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect::<Result<Vec<_>>>()?;
    let oracle_mismatches = outcomes.iter().map(|o| o.oracle_mismatches).sum();
    let trials: Vec<TrialRecord> = outcomes.into_iter().map(|o| o.record).collect();
    let mut summary = summarize(&trials, config);
    summary.oracle_mismatches = oracle_mismatches;
    summary.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(ExperimentReport {
        kind,
        config: config.clone(),
        trials,
        summary,
    })
}

fn summarize(trials: &[TrialRecord], config: &ExperimentConfig) -> ExperimentSummary {
    let n = trials.len() as f64;
    let recalls = n * config.q as f64;
    let mean = |f: fn(&TrialRecord) -> usize| trials.iter().map(f).sum::<usize>() as f64 / n;
    let min = |f: fn(&TrialRecord) -> usize| trials.iter().map(f).min().unwrap_or(0);
    let max = |f: fn(&TrialRecord) -> usize| trials.iter().map(f).max().unwrap_or(0);
    let total = |f: fn(&TrialRecord) -> usize| trials.iter().map(f).sum::<usize>() as f64;

    let passed_trials = trials.iter().filter(|t| t.passed).count() as u64;
    let mean_raw_bit_errors = total(|t| t.raw_bit_errors) / recalls;
    let mean_preprocessed_bit_errors = total(|t| t.preprocessed_bit_errors) / recalls;
    ExperimentSummary {
        trials: trials.len() as u64,
        passed_trials,
        all_passed: passed_trials == trials.len() as u64,
        mean_nonzero_basis: mean(|t| t.nonzero_basis),
        min_nonzero_basis: min(|t| t.nonzero_basis),
        max_nonzero_basis: max(|t| t.nonzero_basis),
        mean_perfect_recall: mean(|t| t.perfect_recall),
        min_perfect_recall: min(|t| t.perfect_recall),
        max_perfect_recall: max(|t| t.perfect_recall),
        mean_raw_perfect_recall: mean(|t| t.raw_perfect_recall),
        mean_crosstalk_bits: mean(|t| t.crosstalk_bits),
        mean_raw_bit_errors,
        mean_preprocessed_bit_errors,
        preprocessed_not_worse: mean_preprocessed_bit_errors <= mean_raw_bit_errors,
        oracle_checked: config.oracle,
        oracle_mismatches: 0,
        elapsed_ms: 0.0,
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        let s = &self.summary;
        let kind = match self.kind {
            ExperimentKind::Capacity => "capacity",
            ExperimentKind::Crosstalk => "crosstalk",
        };
        writeln!(
            f,
            "{kind} experiment: p={} q={} trials={} seed={} key_density={}{}",
            c.p,
            c.q,
            c.trials,
            c.seed,
            c.key_density,
            if c.identity_keys {
                " (identity keys)"
            } else {
                ""
            }
        )?;
        writeln!(
            f,
            "  trials passed:          {}/{}",
            s.passed_trials, s.trials
        )?;
        writeln!(
            f,
            "  nonzero basis vectors:  mean {:.3}  min {}  max {}  (bound p = {})",
            s.mean_nonzero_basis, s.min_nonzero_basis, s.max_nonzero_basis, c.p
        )?;
        writeln!(
            f,
            "  perfect recalls:        mean {:.3}  min {}  max {}  (raw memory: mean {:.3})",
            s.mean_perfect_recall,
            s.min_perfect_recall,
            s.max_perfect_recall,
            s.mean_raw_perfect_recall
        )?;
        writeln!(
            f,
            "  bit errors per recall:  raw {:.4}  preprocessed {:.4}  ({})",
            s.mean_raw_bit_errors,
            s.mean_preprocessed_bit_errors,
            if s.preprocessed_not_worse {
                "preprocessed <= raw"
            } else {
                "preprocessed > raw"
            }
        )?;
        writeln!(f, "  crosstalk bits / trial: {:.3}", s.mean_crosstalk_bits)?;
        if s.oracle_checked {
            writeln!(f, "  oracle mismatches:      {}", s.oracle_mismatches)?;
        }
        writeln!(f, "  elapsed:                {:.1} ms", s.elapsed_ms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: usize, q: usize, trials: u64) -> ExperimentConfig {
        ExperimentConfig {
            p,
            q,
            trials,
            seed: 7,
            ..Default::default()
        }
    }

    #[test]
    fn validation() {
        assert!(cfg(0, 1, 1).validate().is_err());
        assert!(cfg(1, 0, 1).validate().is_err());
        assert!(cfg(1, 1, 0).validate().is_err());
        let mut c = cfg(4, 4, 1);
        c.key_density = 1.5;
        assert!(c.validate().is_err());
        let mut c = cfg(4, 5, 1);
        c.identity_keys = true;
        assert!(c.validate().is_err());
        assert!("xml".parse::<ReportFormat>().is_err());
        assert_eq!("csv".parse::<ReportFormat>().unwrap(), ReportFormat::Csv);
    }

    #[test]
    fn identity_keys_recall_everything() {
        let mut c = cfg(8, 8, 20);
        c.identity_keys = true;
        let r = run(ExperimentKind::Capacity, &c).unwrap();
        assert!(r.passed());
        for t in &r.trials {
            assert_eq!((t.perfect_recall, t.nonzero_basis), (8, 8));
            assert_eq!(t.raw_perfect_recall, 8);
            assert_eq!(t.raw_bit_errors + t.preprocessed_bit_errors, 0);
        }
    }

    #[test]
    fn single_pair_has_no_errors() {
        let r = run(ExperimentKind::Crosstalk, &cfg(16, 1, 50)).unwrap();
        // A zero key loses its value in both modes; otherwise nothing.
        for t in &r.trials {
            assert_eq!(t.crosstalk_bits, 0);
            assert_eq!(t.raw_bit_errors, t.preprocessed_bit_errors);
        }
    }

    #[test]
    fn deterministic_and_order_independent() {
        let c = cfg(12, 10, 40);
        let a = run(ExperimentKind::Capacity, &c).unwrap().without_timing();
        let b = run(ExperimentKind::Capacity, &c).unwrap().without_timing();
        assert_eq!(a, b);
        // Trial 17 alone equals trial 17 of the batch.
        let (k1, v1) = sample_trial(&c, 17).unwrap();
        let (k2, v2) = sample_trial(&c, 17).unwrap();
        assert_eq!((k1, v1), (k2, v2));
        assert_eq!(a.trials[17].seed, trial_seed(7, 17));
    }

    #[test]
    fn dense_keys_preprocessing_not_worse() {
        let r = run(ExperimentKind::Crosstalk, &cfg(32, 32, 1000)).unwrap();
        assert!(r.passed());
        assert!(r.summary.preprocessed_not_worse, "{}", r);
        assert!(r.summary.mean_preprocessed_bit_errors <= r.summary.mean_raw_bit_errors);
    }

    #[test]
    fn oracle_does_not_change_outcomes() {
        let c = cfg(9, 7, 30);
        let plain = run(ExperimentKind::Capacity, &c).unwrap();
        let checked = run(
            ExperimentKind::Capacity,
            &ExperimentConfig { oracle: true, ..c },
        )
        .unwrap();
        assert_eq!(plain.trials, checked.trials);
        assert_eq!(checked.summary.oracle_mismatches, 0);
        assert!(checked.summary.oracle_checked);
    }
}
