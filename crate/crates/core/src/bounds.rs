//! Closed-form lower bounds on quantum query complexity and approximate
//! degree, together with the flip-probability quantities they rest on.
//!
//! Notation: `ε` is the error probability, `ρ` the average influence,
//! `λ_s = |s|/n`, and `k` a positive odd number of random coordinate flips.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::FourierSpectrum;
use crate::table::TruthTable;
use crate::Rational;

/// Work cap for [`flip_prob_bruteforce`]: `n^k 2^n` evaluations.
pub const BRUTEFORCE_LIMIT: u128 = 100_000_000;

/// Default largest odd `k` scanned by [`lb_query_general_best`].
pub const DEFAULT_K_MAX: u32 = 15;

/// A lower bound value, clamped at zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bound {
    pub value: f64,
    /// The unclamped formula was not positive, so the bound says nothing.
    pub vacuous: bool,
}

impl Bound {
    fn clamped(raw: f64) -> Self {
        if raw > 0.0 {
            Bound { value: raw, vacuous: false }
        } else {
            Bound { value: 0.0, vacuous: true }
        }
    }
}

fn check_odd(k: u32) -> Result<()> {
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::input(format!("k must be a positive odd integer, got {k}")));
    }
    Ok(())
}

fn check_eps(eps: f64, upper: f64) -> Result<()> {
    if !(0.0..upper).contains(&eps) {
        return Err(Error::input(format!("error probability {eps} outside [0, {upper})")));
    }
    Ok(())
}

/// `Pr_{x, i_1..i_k}[f(x) != f(x ⊕ e_{i_1} ⊕ ... ⊕ e_{i_k})] = 1/2 - 1/2 Σ_s f̂_s^2 (1 - 2λ_s)^k`.
pub fn flip_prob_spectral(spec: &FourierSpectrum, k: u32) -> Result<f64> {
    check_odd(k)?;
    Ok(0.5 - 0.5 * spec.noise_sum(k))
}

/// The same probability by enumerating every `x` and every index tuple.
pub fn flip_prob_bruteforce(t: &TruthTable, k: u32) -> Result<Rational> {
    check_odd(k)?;
    let n = t.n();
    let tuples = (n as u128).checked_pow(k).unwrap_or(u128::MAX);
    if tuples.saturating_mul(t.len() as u128) > BRUTEFORCE_LIMIT {
        return Err(Error::capacity(format!(
            "brute force over n^k 2^n = {n}^{k} * 2^{n} exceeds {BRUTEFORCE_LIMIT}"
        )));
    }
    let tuples = tuples as usize;
    let differing: u64 = (0..tuples)
        .into_par_iter()
        .map(|mut code| {
            let mut flip = 0usize;
            for _ in 0..k {
                flip ^= 1 << (code % n);
                code /= n;
            }
            (0..t.len()).filter(|&x| t.bit(x) != t.bit(x ^ flip)).count() as u64
        })
        .sum();
    Ok(Rational::new(differing as i128, (tuples * t.len()) as i128))
}

/// `max(0, (1 - 2√ε)/2 · ρ n)`.
pub fn lb_query_main(rho: f64, n: usize, eps: f64) -> Result<Bound> {
    check_eps(eps, 1.0)?;
    Ok(Bound::clamped((1.0 - 2.0 * eps.sqrt()) / 2.0 * rho * n as f64))
}

fn odd_root(x: f64, k: u32) -> f64 {
    if k == 1 {
        x
    } else {
        x.signum() * x.abs().powf(1.0 / k as f64)
    }
}

/// `(1/2)[1 - ((1 + 2√ε)/2 + (1 - 2√ε)/2 · Σ_s f̂_s^2 (1 - 2λ_s)^k)^{1/k}] n`, clamped at 0.
pub fn lb_query_general(spec: &FourierSpectrum, eps: f64, k: u32) -> Result<Bound> {
    check_odd(k)?;
    check_eps(eps, 1.0)?;
    let root_eps = eps.sqrt();
    let inner = (1.0 + 2.0 * root_eps) / 2.0 + (1.0 - 2.0 * root_eps) / 2.0 * spec.noise_sum(k);
    Ok(Bound::clamped(0.5 * (1.0 - odd_root(inner, k)) * spec.n() as f64))
}

/// Best [`lb_query_general`] over odd `k <= k_max`; ties go to the smallest `k`.
pub fn lb_query_general_best(spec: &FourierSpectrum, eps: f64, k_max: u32) -> Result<(u32, Bound)> {
    if k_max == 0 {
        return Err(Error::input("k_max must be at least 1"));
    }
    let mut best = (1, lb_query_general(spec, eps, 1)?);
    for k in (3..=k_max).step_by(2) {
        let b = lb_query_general(spec, eps, k)?;
        if b.value > best.1.value + 1e-12 {
            best = (k, b);
        }
    }
    Ok(best)
}

/// `√BS / 4`, the bounded-error query bound from block sensitivity.
pub fn lb_query_bs(bs: f64) -> f64 {
    bs.max(0.0).sqrt() / 4.0
}

/// `deg(f̃) / 2`.
pub fn lb_query_deg(degree: f64) -> f64 {
    degree.max(0.0) / 2.0
}

/// `√(BS / 6)`, the approximate-degree bound from block sensitivity.
pub fn lb_deg_bs(bs: f64) -> f64 {
    (bs.max(0.0) / 6.0).sqrt()
}

/// `(1/4)(1 - 3ε/(1 + ε))^2 ρ n`.
pub fn lb_deg_influence(rho: f64, n: usize, eps: f64) -> Result<Bound> {
    check_eps(eps, 0.5)?;
    let shrink = 1.0 - 3.0 * eps / (1.0 + eps);
    Ok(Bound::clamped(0.25 * shrink * shrink * rho * n as f64))
}

/// `E >= (2 - 4√ε) Pr[f(x) != f(x ⊕ i⃗)]`, clamped at 0.
pub fn e_lower_bound(spec: &FourierSpectrum, eps: f64, k: u32) -> Result<f64> {
    check_eps(eps, 1.0)?;
    Ok(((2.0 - 4.0 * eps.sqrt()) * flip_prob_spectral(spec, k)?).max(0.0))
}

/// Which form of the `E` upper bound to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UpperForm {
    /// `2 - 2(1 - 2T/n)^k`, the form the derivation actually produces.
    #[default]
    Derived,
    /// `2 - 2(1 - T/n)^k`, as the lemma is stated.
    Stated,
}

/// Upper bound on `E` after `T` queries on `n` variables.
pub fn e_upper_bound(queries: usize, n: usize, k: u32, form: UpperForm) -> Result<f64> {
    check_odd(k)?;
    if n == 0 || queries > n {
        return Err(Error::input(format!("need T <= n, got T = {queries}, n = {n}")));
    }
    let lambda = queries as f64 / n as f64;
    let base = match form {
        UpperForm::Derived => 1.0 - 2.0 * lambda,
        UpperForm::Stated => 1.0 - lambda,
    };
    Ok(2.0 - 2.0 * base.powi(k as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub eps: f64,
    /// Influence bound on queries.
    pub t_main: Bound,
    /// Generalized bound for every odd `k <= k_max`, as `(k, bound)`.
    pub t_general: Vec<(u32, Bound)>,
    pub k_star: u32,
    pub t_general_best: Bound,
    /// Present when block sensitivity is known.
    pub t_bs: Option<f64>,
    /// Present when the approximate degree at `eps` is known.
    pub t_deg: Option<f64>,
    /// Influence bound on approximate degree; absent when `eps >= 1/2`.
    pub d_influence: Option<Bound>,
    pub d_bs: Option<f64>,
}

impl BoundReport {
    pub fn new(
        spec: &FourierSpectrum,
        eps: f64,
        k_max: u32,
        block_sensitivity: Option<u32>,
        approx_degree: Option<usize>,
    ) -> Result<Self> {
        let rho = spec.rho();
        let n = spec.n();
        let t_general = (1..=k_max.max(1))
            .step_by(2)
            .map(|k| Ok((k, lb_query_general(spec, eps, k)?)))
            .collect::<Result<Vec<_>>>()?;
        let (k_star, t_general_best) = lb_query_general_best(spec, eps, k_max.max(1))?;
        let d_influence = if eps < 0.5 {
            Some(lb_deg_influence(rho, n, eps)?)
        } else {
            None
        };
        Ok(BoundReport {
            eps,
            t_main: lb_query_main(rho, n, eps)?,
            t_general,
            k_star,
            t_general_best,
            t_bs: block_sensitivity.map(|bs| lb_query_bs(bs as f64)),
            t_deg: approx_degree.map(|d| lb_query_deg(d as f64)),
            d_influence,
            d_bs: block_sensitivity.map(|bs| lb_deg_bs(bs as f64)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::wht;
    use crate::measures::avg_influence;
    use crate::table::Builtin;
    use crate::to_f64;
    use proptest::prelude::*;

    fn spec_of(b: Builtin, n: usize) -> FourierSpectrum {
        wht(&TruthTable::builtin(b, n).unwrap())
    }

    #[test]
    fn flip_probability_examples() {
        let parity = TruthTable::builtin(Builtin::Parity, 4).unwrap();
        for k in [1, 3, 5, 7] {
            assert_eq!(flip_prob_spectral(&wht(&parity), k).unwrap(), 1.0);
        }
        assert_eq!(flip_prob_bruteforce(&parity, 3).unwrap(), Rational::from_integer(1));
        let and2 = TruthTable::builtin(Builtin::And, 2).unwrap();
        assert_eq!(flip_prob_bruteforce(&and2, 1).unwrap(), Rational::new(1, 2));
        assert_eq!(flip_prob_spectral(&wht(&and2), 1).unwrap(), 0.5);
        let zero = TruthTable::constant(3, false).unwrap();
        assert_eq!(flip_prob_spectral(&wht(&zero), 5).unwrap(), 0.0);
        assert!(flip_prob_spectral(&wht(&zero), 2).is_err());
        assert!(flip_prob_bruteforce(&zero, 0).is_err());
        let big = TruthTable::random(12, 0).unwrap();
        assert!(matches!(flip_prob_bruteforce(&big, 7), Err(Error::Capacity(_))));
    }

    #[test]
    fn spectral_matches_bruteforce() {
        for seed in 0..40u64 {
            let n = 1 + (seed % 6) as usize;
            let t = TruthTable::random(n, 300 + seed).unwrap();
            let spec = wht(&t);
            for k in [1, 3, 5] {
                let exact = to_f64(&flip_prob_bruteforce(&t, k).unwrap());
                let spectral = flip_prob_spectral(&spec, k).unwrap();
                assert!((exact - spectral).abs() < 1e-12, "seed {seed} k {k}");
            }
            assert!((flip_prob_spectral(&spec, 1).unwrap() - to_f64(&avg_influence(&t))).abs() < 1e-15);
        }
    }

    #[test]
    fn main_bound_examples() {
        assert_eq!(lb_query_main(1.0, 8, 0.0).unwrap().value, 4.0);
        let random = lb_query_main(0.5, 10, 0.04).unwrap();
        assert!((random.value - (1.0 - 0.4) / 4.0 * 10.0).abs() < 1e-12);
        assert!(lb_query_main(0.0, 5, 0.1).unwrap().vacuous);
        let at_quarter = lb_query_main(1.0, 5, 0.25).unwrap();
        assert!(at_quarter.vacuous && at_quarter.value == 0.0);
        assert!(lb_query_main(1.0, 5, 1.0).is_err());
        assert!(lb_query_main(1.0, 5, -0.1).is_err());
    }

    #[test]
    fn general_bound_reduces_to_main() {
        for seed in 0..30u64 {
            let t = TruthTable::random(1 + (seed % 8) as usize, seed).unwrap();
            let spec = wht(&t);
            for eps in [0.0, 0.01, 0.1, 0.2, 1.0 / 3.0] {
                let general = lb_query_general(&spec, eps, 1).unwrap();
                let main = lb_query_main(spec.rho(), spec.n(), eps).unwrap();
                assert!((general.value - main.value).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parity_general_bound_is_half_n() {
        for n in 1..=8 {
            let spec = spec_of(Builtin::Parity, n);
            for k in (1..=15).step_by(2) {
                assert_eq!(lb_query_general(&spec, 0.0, k).unwrap().value, n as f64 / 2.0);
            }
            assert_eq!(lb_query_general_best(&spec, 0.0, 15).unwrap().0, 1);
        }
        let zero = wht(&TruthTable::constant(4, true).unwrap());
        assert_eq!(lb_query_general(&zero, 0.0, 3).unwrap().value, 0.0);
        assert!(lb_query_general(&zero, 0.0, 4).is_err());
    }

    #[test]
    fn comparison_bounds() {
        assert_eq!(lb_query_bs(9.0), 0.75);
        assert!((lb_deg_bs(9.0) - 1.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(lb_query_deg(0.0), 0.0);
        assert!((lb_deg_bs(27.0) - (27.0f64 / 6.0).sqrt()).abs() < 1e-15);
        let d = lb_deg_influence(1.0, 8, 1.0 / 3.0).unwrap();
        assert!((d.value - 8.0 / 64.0).abs() < 1e-15);
        assert_eq!(lb_deg_influence(0.5, 6, 0.0).unwrap().value, 0.75);
        assert!(lb_deg_influence(0.0, 6, 0.1).unwrap().vacuous);
        assert!(lb_deg_influence(1.0, 6, 0.5).is_err());
    }

    #[test]
    fn e_bounds() {
        let spec = spec_of(Builtin::Majority, 5);
        assert_eq!(e_lower_bound(&spec, 0.25, 1).unwrap(), 0.0);
        for k in [1, 3, 5] {
            assert_eq!(e_upper_bound(6, 6, k, UpperForm::Derived).unwrap(), 4.0);
            assert_eq!(e_upper_bound(3, 6, k, UpperForm::Derived).unwrap(), 2.0);
        }
        assert_eq!(e_upper_bound(3, 6, 1, UpperForm::Stated).unwrap(), 1.0);
        assert_eq!(e_upper_bound(0, 6, 3, UpperForm::Derived).unwrap(), 0.0);
        assert!(e_upper_bound(7, 6, 1, UpperForm::Derived).is_err());
        assert!(e_upper_bound(1, 6, 2, UpperForm::Derived).is_err());
    }

    #[test]
    fn report_fields() {
        let spec = spec_of(Builtin::Parity, 8);
        let r = BoundReport::new(&spec, 0.0, 15, Some(8), Some(8)).unwrap();
        assert_eq!(r.t_main.value, 4.0);
        assert_eq!(r.t_general.len(), 8);
        assert_eq!(r.t_general[0].1, r.t_main);
        assert_eq!(r.t_bs, Some(8f64.sqrt() / 4.0));
        assert_eq!(r.t_deg, Some(4.0));
        assert!(BoundReport::new(&spec, 0.6, 15, None, None).unwrap().d_influence.is_none());
    }

    proptest! {
        #[test]
        fn bounds_nonincreasing_in_eps(seed in 0u64..1000, n in 1usize..8, a in 0.0f64..0.49, b in 0.0f64..0.49, k in 0u32..7) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let k = 2 * k + 1;
            let spec = wht(&TruthTable::random(n, seed).unwrap());
            let rho = spec.rho();
            prop_assert!(lb_query_main(rho, n, lo)?.value >= lb_query_main(rho, n, hi)?.value);
            prop_assert!(lb_query_general(&spec, lo, k)?.value >= lb_query_general(&spec, hi, k)?.value - 1e-12);
            prop_assert!(lb_deg_influence(rho, n, lo)?.value >= lb_deg_influence(rho, n, hi)?.value);
            prop_assert!(e_lower_bound(&spec, lo, k)? >= e_lower_bound(&spec, hi, k)?);
        }
    }
}
