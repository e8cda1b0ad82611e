//! Quantum black-box algorithms simulated in the Fourier picture.
//!
//! The state after the oracle-dependent evolution is a function `φ(x)` of the
//! oracle string. It is stored through its expansion
//! `φ(x) = Σ_s (-1)^{s·x} φ̂_s`, one register-space vector per mask `s`.
//! Oracle-independent unitaries act on each `φ̂_s` separately; a query moves
//! the answer-minus component at index `i` from mask `s` to `s ⊕ e_i`.
//!
//! Basis order is index-major, then answer, then work:
//! `|i, a, w⟩ ↦ (2i + a)·W + w`.

mod algorithms;
mod analysis;
mod unitary;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::table::MAX_VARS;

pub use algorithms::{deutsch_parity, grover, serial_read, MAX_SERIAL_READ_VARS};
pub use analysis::{
    e_statistic, e_statistic_direct, error_profile, error_profile_of, gap_check, simulate, ErrorProfile, EStatistic,
    GapMode, GapReport, SimulationReport, MAX_ALL_PAIRS_VARS, MAX_DIRECT_E_WORK,
};
pub use unitary::{Unitary, UNITARY_TOL};

/// Largest register dimension accepted.
pub const MAX_DIM: usize = 1536;

/// Tolerance for norm and agreement checks.
pub const TOL: f64 = 1e-9;

/// Coefficient vectors with squared norm below this are dropped after a query.
const PRUNE: f64 = 1e-30;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    n_index: usize,
    work: usize,
}

impl RegisterLayout {
    pub fn new(n_index: usize, work: usize) -> Result<Self> {
        if n_index == 0 || n_index > MAX_VARS {
            return Err(Error::input(format!("index register size {n_index} outside 1..={MAX_VARS}")));
        }
        if work == 0 {
            return Err(Error::input("work dimension must be at least 1"));
        }
        n_index
            .checked_mul(2 * work)
            .filter(|&d| d <= MAX_DIM)
            .ok_or_else(|| Error::capacity(format!("register dimension exceeds {MAX_DIM}")))?;
        Ok(RegisterLayout { n_index, work })
    }

    /// Number of oracle bits `N`.
    pub fn n_index(&self) -> usize {
        self.n_index
    }

    pub fn work(&self) -> usize {
        self.work
    }

    pub fn dim(&self) -> usize {
        self.n_index * 2 * self.work
    }

    pub fn basis(&self, i: usize, a: usize, w: usize) -> usize {
        (2 * i + a) * self.work + w
    }

    pub fn decode(&self, j: usize) -> (usize, usize, usize) {
        let (ia, w) = (j / self.work, j % self.work);
        (ia / 2, ia % 2, w)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierState {
    layout: RegisterLayout,
    coeffs: BTreeMap<usize, Vec<Complex64>>,
    queries: usize,
}

impl FourierState {
    /// `φ̂_0 = |0⟩`, nothing else.
    pub fn init(layout: RegisterLayout) -> Self {
        let mut zero = vec![Complex64::new(0.0, 0.0); layout.dim()];
        zero[0] = Complex64::new(1.0, 0.0);
        FourierState {
            layout,
            coeffs: BTreeMap::from([(0, zero)]),
            queries: 0,
        }
    }

    /// A state with arbitrary coefficients; used to probe the query map.
    pub fn from_coeffs(layout: RegisterLayout, coeffs: BTreeMap<usize, Vec<Complex64>>, queries: usize) -> Result<Self> {
        for (&s, v) in &coeffs {
            if s >> layout.n_index() != 0 || v.len() != layout.dim() {
                return Err(Error::Layout(format!("coefficient at mask {s:#b} does not fit the layout")));
            }
        }
        Ok(FourierState { layout, coeffs, queries })
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, Vec<Complex64>> {
        &self.coeffs
    }

    pub fn coeff(&self, s: usize) -> Option<&[Complex64]> {
        self.coeffs.get(&s).map(Vec::as_slice)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    /// `Σ_s ‖φ̂_s‖²`.
    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|v| norm_sqr(v)).sum()
    }

    pub fn apply_unitary(&mut self, u: &Unitary) -> Result<()> {
        if u.dim() != self.layout.dim() {
            return Err(Error::Layout(format!(
                "unitary of dimension {} on a register of dimension {}",
                u.dim(),
                self.layout.dim()
            )));
        }
        for v in self.coeffs.values_mut() {
            *v = u.apply(v);
        }
        Ok(())
    }

    pub fn apply_query(&mut self) {
        let l = self.layout;
        let zero = Complex64::new(0.0, 0.0);
        // Accumulate in the answer-Hadamard basis: slot a = 0 holds plus, a = 1 minus.
        let mut next: BTreeMap<usize, Vec<Complex64>> = BTreeMap::new();
        for (&s, v) in &self.coeffs {
            for i in 0..l.n_index() {
                for w in 0..l.work() {
                    let (a0, a1) = (v[l.basis(i, 0, w)], v[l.basis(i, 1, w)]);
                    let plus = (a0 + a1) * FRAC_1_SQRT_2;
                    let minus = (a0 - a1) * FRAC_1_SQRT_2;
                    if plus != zero {
                        next.entry(s).or_insert_with(|| vec![zero; l.dim()])[l.basis(i, 0, w)] += plus;
                    }
                    if minus != zero {
                        next.entry(s ^ (1 << i)).or_insert_with(|| vec![zero; l.dim()])[l.basis(i, 1, w)] +=
                            minus;
                    }
                }
            }
        }
        for v in next.values_mut() {
            for i in 0..l.n_index() {
                for w in 0..l.work() {
                    let (p, m) = (v[l.basis(i, 0, w)], v[l.basis(i, 1, w)]);
                    v[l.basis(i, 0, w)] = (p + m) * FRAC_1_SQRT_2;
                    v[l.basis(i, 1, w)] = (p - m) * FRAC_1_SQRT_2;
                }
            }
        }
        next.retain(|_, v| norm_sqr(v) > PRUNE);
        self.coeffs = next;
        self.queries += 1;
    }

    /// `φ(x) = Σ_s (-1)^{s·x} φ̂_s`.
    pub fn reconstruct(&self, x: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.layout.dim()];
        for (&s, v) in &self.coeffs {
            let sign = if (s & x).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            for (o, &c) in out.iter_mut().zip(v) {
                *o += c * sign;
            }
        }
        out
    }

    /// Unit total norm and `|s| <= queries` for every mask in the support.
    pub fn check_invariants(&self) -> Result<()> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::Consistency(format!("Σ‖φ̂_s‖² = {norm} after {} queries", self.queries)));
        }
        if let Some(s) = self.support().find(|s| s.count_ones() as usize > self.queries) {
            return Err(Error::Consistency(format!(
                "mask {s:#b} in support after only {} queries",
                self.queries
            )));
        }
        Ok(())
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Unitary(Unitary),
    Query,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Algorithm {
    name: String,
    layout: RegisterLayout,
    steps: Vec<Step>,
    accept: Vec<bool>,
    queries: usize,
}

impl Algorithm {
    /// `accept[j]` marks basis states read as output 1.
    pub fn new(name: impl Into<String>, layout: RegisterLayout, steps: Vec<Step>, accept: Vec<bool>) -> Result<Self> {
        if accept.len() != layout.dim() {
            return Err(Error::Layout(format!(
                "acceptance predicate has {} entries for dimension {}",
                accept.len(),
                layout.dim()
            )));
        }
        for step in &steps {
            if let Step::Unitary(u) = step {
                if u.dim() != layout.dim() {
                    return Err(Error::Layout(format!(
                        "unitary of dimension {} in a layout of dimension {}",
                        u.dim(),
                        layout.dim()
                    )));
                }
            }
        }
        let queries = steps.iter().filter(|s| matches!(s, Step::Query)).count();
        Ok(Algorithm {
            name: name.into(),
            layout,
            steps,
            accept,
            queries,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn accept(&self) -> &[bool] {
        &self.accept
    }

    /// Number of query steps, `T`.
    pub fn queries(&self) -> usize {
        self.queries
    }

    /// Probability of output 1 for a final register vector.
    pub fn accept_probability(&self, v: &[Complex64]) -> f64 {
        v.iter()
            .zip(&self.accept)
            .filter(|(_, &a)| a)
            .map(|(c, _)| c.norm_sqr())
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Run {
    pub state: FourierState,
    /// Support size after each step.
    pub support_history: Vec<usize>,
}

/// Runs the algorithm, checking the norm and support invariants after every step.
pub fn run(alg: &Algorithm) -> Result<Run> {
    let mut state = FourierState::init(alg.layout());
    let mut support_history = Vec::with_capacity(alg.steps().len());
    for step in alg.steps() {
        match step {
            Step::Unitary(u) => state.apply_unitary(u)?,
            Step::Query => state.apply_query(),
        }
        state.check_invariants()?;
        support_history.push(state.coeffs().len());
    }
    Ok(Run { state, support_history })
}

/// Per-oracle simulation with `O_x|i, a, w⟩ = |i, a ⊕ x_i, w⟩`.
pub fn run_direct(alg: &Algorithm, x: usize) -> Result<Vec<Complex64>> {
    let l = alg.layout();
    if x >> l.n_index() != 0 {
        return Err(Error::input(format!("oracle {x:#b} has more than {} bits", l.n_index())));
    }
    let mut v = vec![Complex64::new(0.0, 0.0); l.dim()];
    v[0] = Complex64::new(1.0, 0.0);
    for step in alg.steps() {
        match step {
            Step::Unitary(u) => v = u.apply(&v),
            Step::Query => {
                for i in (0..l.n_index()).filter(|i| x >> i & 1 == 1) {
                    for w in 0..l.work() {
                        v.swap(l.basis(i, 0, w), l.basis(i, 1, w));
                    }
                }
            }
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_core::{RngCore, SeedableRng};
    use rand_xoshiro::SplitMix64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_unit(rng: &mut SplitMix64, dim: usize) -> Vec<Complex64> {
        let mut draw = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        let v: Vec<Complex64> = (0..dim).map(|_| Complex64::new(draw(), draw())).collect();
        let norm = norm_sqr(&v).sqrt();
        v.into_iter().map(|z| z / norm).collect()
    }

    /// Householder reflection `I - 2vv†` for a random unit `v`.
    fn random_unitary(rng: &mut SplitMix64, dim: usize) -> Unitary {
        let v = random_unit(rng, dim);
        Unitary::from_fn(dim, |j| {
            (0..dim)
                .map(|r| {
                    let delta = if r == j { 1.0 } else { 0.0 };
                    (r, c(delta) - v[r] * v[j].conj() * 2.0)
                })
                .collect()
        })
        .unwrap()
    }

    #[test]
    fn layout_indexing() {
        let l = RegisterLayout::new(3, 4).unwrap();
        assert_eq!(l.dim(), 24);
        for j in 0..l.dim() {
            let (i, a, w) = l.decode(j);
            assert_eq!(l.basis(i, a, w), j);
        }
        assert!(matches!(RegisterLayout::new(7, 128), Err(Error::Capacity(_))));
        assert!(RegisterLayout::new(6, 128).is_ok());
        assert!(RegisterLayout::new(0, 1).is_err());
    }

    #[test]
    fn init_state() {
        let l = RegisterLayout::new(4, 2).unwrap();
        let st = FourierState::init(l);
        assert_eq!(st.norm_sqr(), 1.0);
        assert_eq!(st.support().collect::<Vec<_>>(), vec![0]);
        assert_eq!(st.queries(), 0);
        for x in 0..16 {
            let v = st.reconstruct(x);
            assert_eq!(v[0], c(1.0));
            assert!(v[1..].iter().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn plus_answer_has_no_kickback() {
        let l = RegisterLayout::new(4, 1).unwrap();
        let mut v = vec![c(0.0); l.dim()];
        v[l.basis(2, 0, 0)] = c(FRAC_1_SQRT_2);
        v[l.basis(2, 1, 0)] = c(FRAC_1_SQRT_2);
        let mut st = FourierState::from_coeffs(l, BTreeMap::from([(0, v.clone())]), 0).unwrap();
        st.apply_query();
        assert_eq!(st.support().collect::<Vec<_>>(), vec![0]);
        let after = st.coeff(0).unwrap();
        assert!(after.iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-15));
        assert_eq!(st.queries(), 1);
    }

    #[test]
    fn minus_answer_kicks_to_neighbor() {
        let l = RegisterLayout::new(4, 1).unwrap();
        let mut v = vec![c(0.0); l.dim()];
        v[l.basis(3, 0, 0)] = c(FRAC_1_SQRT_2);
        v[l.basis(3, 1, 0)] = c(-FRAC_1_SQRT_2);
        let mut st = FourierState::from_coeffs(l, BTreeMap::from([(0, v.clone())]), 0).unwrap();
        st.apply_query();
        assert_eq!(st.support().collect::<Vec<_>>(), vec![0b1000]);
        assert!(st.coeff(0b1000).unwrap().iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-15));
        let flipped = st.reconstruct(0b1000);
        assert!((flipped[l.basis(3, 0, 0)] + c(FRAC_1_SQRT_2)).norm() < 1e-15);
        let kept = st.reconstruct(0b0111);
        assert!((kept[l.basis(3, 0, 0)] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn unitaries_keep_support_and_norm() {
        let mut rng = SplitMix64::seed_from_u64(3);
        let l = RegisterLayout::new(3, 2).unwrap();
        let mut st = FourierState::init(l);
        st.apply_unitary(&random_unitary(&mut rng, l.dim())).unwrap();
        st.apply_query();
        let before: Vec<usize> = st.support().collect();
        st.apply_unitary(&random_unitary(&mut rng, l.dim())).unwrap();
        assert_eq!(st.support().collect::<Vec<_>>(), before);
        assert!((st.norm_sqr() - 1.0).abs() < 1e-12);
        let snapshot = st.clone();
        st.apply_unitary(&Unitary::identity(l.dim())).unwrap();
        assert_eq!(st, snapshot);
        assert!(st.apply_unitary(&Unitary::identity(5)).is_err());
    }

    /// Random algorithms: the Fourier state reconstructs the direct per-oracle state.
    #[test]
    fn fourier_matches_direct_simulation() {
        let mut rng = SplitMix64::seed_from_u64(17);
        for (n, work, queries) in [(1, 1, 2), (2, 2, 3), (3, 1, 3), (4, 2, 4), (4, 1, 2)] {
            let l = RegisterLayout::new(n, work).unwrap();
            let mut steps = vec![Step::Unitary(random_unitary(&mut rng, l.dim()))];
            for _ in 0..queries {
                steps.push(Step::Query);
                steps.push(Step::Unitary(random_unitary(&mut rng, l.dim())));
                steps.push(Step::Unitary(random_unitary(&mut rng, l.dim())));
            }
            let accept = (0..l.dim()).map(|j| j % 3 == 0).collect();
            let alg = Algorithm::new("random", l, steps, accept).unwrap();
            assert_eq!(alg.queries(), queries);
            let result = run(&alg).unwrap();
            assert!(result.state.support().all(|s| s.count_ones() as usize <= queries));
            for x in 0..1usize << n {
                let direct = run_direct(&alg, x).unwrap();
                let fourier = result.state.reconstruct(x);
                let gap = direct.iter().zip(&fourier).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(gap < 1e-9, "n = {n}, x = {x}, gap = {gap}");
                assert!((norm_sqr(&fourier) - 1.0).abs() < 1e-9);
            }
        }
    }

    /// One query on a random state agrees with `O_x` applied to the reconstruction.
    #[test]
    fn query_commutes_with_reconstruction() {
        let mut rng = SplitMix64::seed_from_u64(99);
        let l = RegisterLayout::new(4, 2).unwrap();
        let mut st = FourierState::init(l);
        for _ in 0..3 {
            st.apply_unitary(&random_unitary(&mut rng, l.dim())).unwrap();
            st.apply_query();
        }
        let before = st.clone();
        st.apply_query();
        for x in 0..16usize {
            let mut expected = before.reconstruct(x);
            for i in (0..4).filter(|i| x >> i & 1 == 1) {
                for w in 0..2 {
                    expected.swap(l.basis(i, 0, w), l.basis(i, 1, w));
                }
            }
            let got = st.reconstruct(x);
            assert!(got.iter().zip(&expected).all(|(a, b)| (a - b).norm() < 1e-9));
        }
        st.check_invariants().unwrap();
    }

    #[test]
    fn invariant_violations_are_reported() {
        let l = RegisterLayout::new(2, 1).unwrap();
        let mut v = vec![c(0.0); l.dim()];
        v[0] = c(1.0);
        let early = FourierState::from_coeffs(l, BTreeMap::from([(0b11, v.clone())]), 1).unwrap();
        assert!(matches!(early.check_invariants(), Err(Error::Consistency(_))));
        v[0] = c(0.5);
        let short = FourierState::from_coeffs(l, BTreeMap::from([(0, v)]), 0).unwrap();
        assert!(short.check_invariants().is_err());
    }

    #[test]
    fn algorithm_validation() {
        let l = RegisterLayout::new(2, 1).unwrap();
        assert!(Algorithm::new("bad", l, vec![], vec![false; 3]).is_err());
        let wrong = vec![Step::Unitary(Unitary::identity(2))];
        assert!(matches!(Algorithm::new("bad", l, wrong, vec![false; 4]), Err(Error::Layout(_))));
    }
}
