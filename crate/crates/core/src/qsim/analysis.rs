use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{run, Algorithm, FourierState, TOL};
use crate::bounds::{e_lower_bound, e_upper_bound, UpperForm};
use crate::error::{Error, Result};
use crate::fourier::wht;
use crate::table::TruthTable;

/// All-pairs gap scans are limited to this many oracle bits.
pub const MAX_ALL_PAIRS_VARS: usize = 8;

/// Work cap for [`e_statistic_direct`], in complex multiply-adds.
pub const MAX_DIRECT_E_WORK: u128 = 200_000_000;

fn check_layout(state: &FourierState, t: &TruthTable) -> Result<()> {
    if state.layout().n_index() != t.n() {
        return Err(Error::Layout(format!(
            "algorithm queries {} bits, function has {} variables",
            state.layout().n_index(),
            t.n()
        )));
    }
    Ok(())
}

fn dist_sqr(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorProfile {
    /// `Pr[output != f(x)]` for every oracle `x`.
    pub per_oracle: Vec<f64>,
    pub worst: f64,
    /// Smallest `x` attaining `worst`.
    pub worst_input: usize,
}

/// Error probabilities read off the final Fourier state.
pub fn error_profile_of(alg: &Algorithm, state: &FourierState, t: &TruthTable) -> Result<ErrorProfile> {
    check_layout(state, t)?;
    let per_oracle = (0..t.len())
        .into_par_iter()
        .map(|x| {
            let v = state.reconstruct(x);
            let norm: f64 = v.iter().map(Complex64::norm_sqr).sum();
            if (norm - 1.0).abs() > TOL {
                return Err(Error::Consistency(format!("‖φ({x})‖² = {norm}")));
            }
            let p = alg.accept_probability(&v).clamp(0.0, 1.0);
            Ok(if t.bit(x) { 1.0 - p } else { p })
        })
        .collect::<Result<Vec<f64>>>()?;
    let (worst_input, worst) = per_oracle
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (x, e)| if e > best.1 { (x, e) } else { best });
    Ok(ErrorProfile { per_oracle, worst, worst_input })
}

/// Runs `alg` and measures its error against `t` on every oracle.
pub fn error_profile(alg: &Algorithm, t: &TruthTable) -> Result<ErrorProfile> {
    if alg.layout().n_index() != t.n() {
        return Err(Error::Layout(format!(
            "algorithm queries {} bits, function has {} variables",
            alg.layout().n_index(),
            t.n()
        )));
    }
    error_profile_of(alg, &run(alg)?.state, t)
}

fn check_odd(k: u32) -> Result<()> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::input(format!("k must be a positive odd integer, got {k}")));
    }
    Ok(())
}

/// `E = Σ_a (2 - 2(1 - 2|a|/N)^k) ‖φ̂_a‖²`.
pub fn e_statistic(state: &FourierState, k: u32) -> Result<f64> {
    check_odd(k)?;
    let n = state.layout().n_index() as f64;
    Ok(state
        .coeffs()
        .iter()
        .map(|(&a, v)| {
            let weight = 2.0 - 2.0 * (1.0 - 2.0 * a.count_ones() as f64 / n).powi(k as i32);
            weight * v.iter().map(Complex64::norm_sqr).sum::<f64>()
        })
        .sum())
}

/// `E_{x, i_1..i_k} ‖φ(x) - φ(x ⊕ e_{i_1} ⊕ ... ⊕ e_{i_k})‖²` by enumeration.
pub fn e_statistic_direct(state: &FourierState, k: u32) -> Result<f64> {
    check_odd(k)?;
    let n = state.layout().n_index();
    let tuples = (n as u128).checked_pow(k).unwrap_or(u128::MAX);
    let distinct = tuples.min(1 << n);
    let work = tuples.saturating_add((1u128 << n) * distinct * state.layout().dim() as u128);
    if work > MAX_DIRECT_E_WORK {
        return Err(Error::capacity(format!(
            "direct E enumeration needs {work} operations, cap is {MAX_DIRECT_E_WORK}"
        )));
    }
    // Distribution of the combined flip mask over all index tuples.
    let mut freq: BTreeMap<usize, u64> = BTreeMap::new();
    for code in 0..tuples as u64 {
        let mut z = 0usize;
        let mut rest = code;
        for _ in 0..k {
            z ^= 1 << (rest % n as u64);
            rest /= n as u64;
        }
        *freq.entry(z).or_default() += 1;
    }
    let phis: Vec<Vec<Complex64>> = (0..1usize << n).map(|x| state.reconstruct(x)).collect();
    let total: f64 = (0..phis.len())
        .into_par_iter()
        .map(|x| {
            freq.iter()
                .map(|(&z, &count)| count as f64 * dist_sqr(&phis[x], &phis[x ^ z]))
                .sum::<f64>()
        })
        .sum();
    Ok(total / (tuples as f64 * phis.len() as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMode {
    AllPairs,
    /// Only pairs at Hamming distance one.
    Neighbors,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub mode: GapMode,
    /// Pairs with `f(x) != f(y)` that were compared.
    pub pairs_checked: u64,
    /// `None` when no compared pair has differing values.
    pub min_distance: Option<f64>,
    pub witness: Option<(usize, usize)>,
    /// `2 - 4√ε`.
    pub threshold: f64,
    pub violations: u64,
}

/// Minimum of `‖φ(x) - φ(y)‖²` over pairs with `f(x) != f(y)`, against `2 - 4√ε`.
pub fn gap_check(state: &FourierState, t: &TruthTable, eps: f64, mode: GapMode) -> Result<GapReport> {
    check_layout(state, t)?;
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::input(format!("error probability {eps} outside [0, 1]")));
    }
    let n = t.n();
    if mode == GapMode::AllPairs && n > MAX_ALL_PAIRS_VARS {
        return Err(Error::capacity(format!(
            "all-pairs gap scan limited to N <= {MAX_ALL_PAIRS_VARS}; use neighbor pairs"
        )));
    }
    let threshold = 2.0 - 4.0 * eps.sqrt();
    let phis: Vec<Vec<Complex64>> = (0..t.len()).into_par_iter().map(|x| state.reconstruct(x)).collect();
    let partners = |x: usize| -> Vec<usize> {
        match mode {
            GapMode::AllPairs => (x + 1..t.len()).collect(),
            GapMode::Neighbors => (0..n).map(|i| x ^ (1 << i)).filter(|&y| y > x).collect(),
        }
    };
    let mut report = GapReport {
        mode,
        pairs_checked: 0,
        min_distance: None,
        witness: None,
        threshold,
        violations: 0,
    };
    for x in 0..t.len() {
        for y in partners(x) {
            if t.bit(x) == t.bit(y) {
                continue;
            }
            let d = dist_sqr(&phis[x], &phis[y]);
            report.pairs_checked += 1;
            if d < threshold - TOL {
                report.violations += 1;
            }
            if report.min_distance.is_none_or(|m| d < m) {
                report.min_distance = Some(d);
                report.witness = Some((x, y));
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EStatistic {
    pub k: u32,
    pub value: f64,
    pub lower: f64,
    /// Absent when `T > N`.
    pub upper: Option<f64>,
    pub within_bounds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationReport {
    pub algorithm: String,
    pub n: usize,
    pub dim: usize,
    pub queries: usize,
    pub per_oracle_error: Vec<f64>,
    pub worst_eps: f64,
    pub worst_input: usize,
    /// Support size after each step.
    pub support_history: Vec<usize>,
    pub e_statistics: Vec<EStatistic>,
    pub gap: GapReport,
}

/// Runs `alg` against `t` and collects the error profile, `E` sandwich and gap check.
pub fn simulate(alg: &Algorithm, t: &TruthTable, ks: &[u32], gap_mode: GapMode) -> Result<SimulationReport> {
    if alg.layout().n_index() != t.n() {
        return Err(Error::Layout(format!(
            "algorithm queries {} bits, function has {} variables",
            alg.layout().n_index(),
            t.n()
        )));
    }
    let outcome = run(alg)?;
    let state = &outcome.state;
    let profile = error_profile_of(alg, state, t)?;
    let spec = wht(t);
    let n = t.n();
    let e_statistics = ks
        .iter()
        .map(|&k| {
            let value = e_statistic(state, k)?;
            let lower = e_lower_bound(&spec, profile.worst.min(1.0 - f64::EPSILON), k)?;
            let upper = if alg.queries() <= n {
                Some(e_upper_bound(alg.queries(), n, k, UpperForm::Derived)?)
            } else {
                None
            };
            let within_bounds = value >= lower - TOL && upper.is_none_or(|u| value <= u + TOL);
            Ok(EStatistic { k, value, lower, upper, within_bounds })
        })
        .collect::<Result<Vec<_>>>()?;
    let gap = gap_check(state, t, profile.worst.clamp(0.0, 1.0), gap_mode)?;
    Ok(SimulationReport {
        algorithm: alg.name().to_string(),
        n,
        dim: alg.layout().dim(),
        queries: alg.queries(),
        per_oracle_error: profile.per_oracle,
        worst_eps: profile.worst,
        worst_input: profile.worst_input,
        support_history: outcome.support_history,
        e_statistics,
        gap,
    })
}
