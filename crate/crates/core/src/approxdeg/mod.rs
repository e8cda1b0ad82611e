//! Approximate degree by minimax linear programming.
//!
//! Functions are read in `{0,1}` form here. For a degree cap `d` the LP
//! finds the smallest `t` such that some multilinear `p` of degree `<= d`
//! satisfies `|p(x) - f(x)| <= t` at every `x`. Polynomials are kept in the
//! character basis, `p(x) = Σ_s c_s (-1)^{s·x}`; degrees agree with the
//! monomial basis because the change of basis is triangular in degree.

mod simplex;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::wht;
use crate::table::TruthTable;

pub use simplex::{solve as solve_lp, Problem as LpProblem, Solution as LpSolution};

/// Largest variable count accepted by the LP.
pub const MAX_LP_VARS: usize = 12;

/// Slack allowed when re-checking LP output against every constraint.
pub const VERIFY_TOL: f64 = 1e-9;

/// A real multilinear polynomial in the character basis.
#[derive(Clone, Debug, PartialEq)]
pub struct MultilinearPoly {
    n: usize,
    degree_bound: usize,
    coeffs: BTreeMap<usize, f64>,
}

impl MultilinearPoly {
    /// Fails if a coefficient sits above `degree_bound`.
    pub fn new(n: usize, degree_bound: usize, coeffs: BTreeMap<usize, f64>) -> Result<Self> {
        if let Some((&s, _)) = coeffs
            .iter()
            .find(|(&s, &c)| s >> n != 0 || (s.count_ones() as usize > degree_bound && c != 0.0))
        {
            return Err(Error::input(format!(
                "coefficient at mask {s:#b} violates n = {n}, degree <= {degree_bound}"
            )));
        }
        Ok(MultilinearPoly { n, degree_bound, coeffs })
    }

    /// The character `(-1)^{s·x}`.
    pub fn character(n: usize, s: usize) -> Result<Self> {
        Self::new(n, s.count_ones() as usize, BTreeMap::from([(s, 1.0)]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, f64> {
        &self.coeffs
    }

    pub fn eval(&self, x: usize) -> f64 {
        self.coeffs
            .iter()
            .map(|(&s, &c)| if (s & x).count_ones().is_multiple_of(2) { c } else { -c })
            .sum()
    }

    /// Values at every input, by one fast transform.
    pub fn eval_all(&self) -> Vec<f64> {
        let mut values = vec![0.0; 1 << self.n];
        for (&s, &c) in &self.coeffs {
            values[s] = c;
        }
        let mut h = 1;
        while h < values.len() {
            for block in values.chunks_exact_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (u, v) = (*a, *b);
                    *a = u + v;
                    *b = u - v;
                }
            }
            h *= 2;
        }
        values
    }

    /// `max_x |p(x) - f(x)|` with `f` in `{0,1}` form.
    pub fn max_error(&self, t: &TruthTable) -> f64 {
        self.eval_all()
            .iter()
            .enumerate()
            .map(|(x, &v)| (v - t.bit(x) as u8 as f64).abs())
            .fold(0.0, f64::max)
    }

    pub fn export(&self) -> Vec<PolyTerm> {
        self.coeffs
            .iter()
            .filter(|(_, &c)| c != 0.0)
            .map(|(&s, &c)| PolyTerm { s, c })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolyTerm {
    pub s: usize,
    pub c: f64,
}

/// Degree of the unique multilinear representation.
pub fn exact_degree(t: &TruthTable) -> usize {
    wht(t).degree()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimaxFit {
    pub degree: usize,
    /// Optimal LP value.
    pub t_star: f64,
    pub poly: MultilinearPoly,
    /// `max_x |p(x) - f(x)|` recomputed from the returned coefficients.
    pub achieved: f64,
    pub pivots: usize,
}

fn masks_up_to(n: usize, d: usize) -> Vec<usize> {
    let mut masks: Vec<usize> = (0..1usize << n)
        .filter(|s| s.count_ones() as usize <= d)
        .collect();
    masks.sort_by_key(|&s| (s.count_ones(), s));
    masks
}

/// Best uniform approximation of `f` by polynomials of degree at most `d`.
pub fn min_error_at_degree(t: &TruthTable, d: usize) -> Result<MinimaxFit> {
    let n = t.n();
    if n > MAX_LP_VARS {
        return Err(Error::capacity(format!(
            "LP approximation is limited to n <= {MAX_LP_VARS}, got {n}"
        )));
    }
    if d > n {
        return Err(Error::input(format!("degree {d} exceeds n = {n}")));
    }
    let masks = masks_up_to(n, d);
    let cols = masks.len() + 1;
    let rows = 2 << n;
    // With t = 1 - u: p(x) + u <= f(x) + 1 and -p(x) + u <= 1 - f(x); maximize u.
    let mut a = vec![0.0; rows * cols];
    let mut b = vec![0.0; rows];
    for x in 0..1usize << n {
        let fx = t.bit(x) as u8 as f64;
        let (plus, minus) = (2 * x, 2 * x + 1);
        for (j, &s) in masks.iter().enumerate() {
            let chi = if (s & x).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            a[plus * cols + j] = chi;
            a[minus * cols + j] = -chi;
        }
        a[plus * cols + cols - 1] = 1.0;
        a[minus * cols + cols - 1] = 1.0;
        b[plus] = fx + 1.0;
        b[minus] = 1.0 - fx;
    }
    let mut c = vec![0.0; cols];
    c[cols - 1] = 1.0;
    let mut free = vec![true; cols];
    free[cols - 1] = false;
    let problem = LpProblem { rows, cols, a, b, c, free };
    let solution = solve_lp(&problem, 50 * (rows + cols))?;

    let t_star = (1.0 - solution.objective).max(0.0);
    let coeffs = masks
        .iter()
        .zip(&solution.y)
        .map(|(&s, &c)| (s, c))
        .collect();
    let poly = MultilinearPoly::new(n, d, coeffs)?;
    let achieved = poly.max_error(t);
    if achieved > t_star + VERIFY_TOL {
        return Err(Error::Solver(format!(
            "returned polynomial has error {achieved:.3e}, LP claims {t_star:.3e}"
        )));
    }
    Ok(MinimaxFit {
        degree: d,
        t_star,
        poly,
        achieved,
        pivots: solution.pivots,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxDegree {
    pub eps: f64,
    pub degree: usize,
    /// Every LP solved, ascending by degree.
    pub scans: Vec<MinimaxFit>,
}

impl ApproxDegree {
    /// The fit at the reported degree.
    pub fn fit(&self) -> &MinimaxFit {
        self.scans
            .iter()
            .find(|f| f.degree == self.degree)
            .expect("fit at the answer is always solved")
    }
}

/// Smallest `d` with `t*_d <= eps`, by bisection on the nonincreasing `t*_d`.
pub fn approx_degree(t: &TruthTable, eps: f64) -> Result<ApproxDegree> {
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::input(format!("eps {eps} outside [0, 1/2)")));
    }
    let mut fits: BTreeMap<usize, MinimaxFit> = BTreeMap::new();
    let fit_at = |d: usize, fits: &mut BTreeMap<usize, MinimaxFit>| -> Result<f64> {
        let fit = min_error_at_degree(t, d)?;
        let value = fit.t_star;
        fits.insert(d, fit);
        Ok(value)
    };
    // t*_d = 0 at the exact degree; search the largest failing d below it.
    let (mut lo, mut hi) = (0usize, exact_degree(t));
    if fit_at(lo, &mut fits)? <= eps + VERIFY_TOL {
        hi = lo;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if fit_at(mid, &mut fits)? <= eps + VERIFY_TOL {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if !fits.contains_key(&hi) {
        fit_at(hi, &mut fits)?;
    }
    Ok(ApproxDegree {
        eps,
        degree: hi,
        scans: fits.into_values().collect(),
    })
}

/// Solves every degree in `0..=max_degree`, stopping at the first that meets `eps`.
pub fn scan_degrees(t: &TruthTable, eps: f64, max_degree: usize) -> Result<(Option<usize>, Vec<MinimaxFit>)> {
    let mut fits = Vec::new();
    for d in 0..=max_degree.min(t.n()) {
        let fit = min_error_at_degree(t, d)?;
        let done = fit.t_star <= eps + VERIFY_TOL;
        fits.push(fit);
        if done {
            return Ok((Some(d), fits));
        }
    }
    Ok((None, fits))
}

/// `E' = E_{x,i}[|p(x) - p(x ⊕ e_i)|^2]`, computed by enumeration and by
/// `4 Σ_s c_s^2 |s|/n`; the two must agree.
pub fn eprime_statistic(p: &MultilinearPoly) -> Result<f64> {
    let n = p.n();
    let values = p.eval_all();
    let total: f64 = (0..values.len())
        .map(|x| {
            (0..n)
                .map(|i| {
                    let diff = values[x] - values[x ^ (1 << i)];
                    diff * diff
                })
                .sum::<f64>()
        })
        .sum();
    let enumerated = total / (n * values.len()) as f64;
    let spectral = 4.0
        * p.coeffs()
            .iter()
            .map(|(&s, &c)| c * c * s.count_ones() as f64 / n as f64)
            .sum::<f64>();
    if (enumerated - spectral).abs() > VERIFY_TOL * spectral.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "E' by enumeration {enumerated} differs from spectral {spectral}"
        )));
    }
    Ok(spectral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::Builtin;

    /// Monomial-basis degree via the real Möbius transform.
    fn monomial_degree(t: &TruthTable) -> usize {
        let mut a: Vec<i64> = (0..t.len()).map(|x| t.bit(x) as i64).collect();
        for i in 0..t.n() {
            for s in 0..t.len() {
                if s >> i & 1 == 1 {
                    a[s] -= a[s ^ (1 << i)];
                }
            }
        }
        (0..t.len())
            .filter(|&s| a[s] != 0)
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn exact_degree_matches_monomial_basis() {
        assert_eq!(exact_degree(&TruthTable::builtin(Builtin::Parity, 5).unwrap()), 5);
        for n in 1..=6 {
            assert_eq!(exact_degree(&TruthTable::builtin(Builtin::And, n).unwrap()), n);
        }
        let f = TruthTable::builtin(Builtin::PaperF, 4).unwrap();
        assert_eq!(exact_degree(&f), monomial_degree(&f));
        assert_eq!(exact_degree(&f), 3);
        for seed in 0..30 {
            let t = TruthTable::random(1 + seed as usize % 8, seed).unwrap();
            assert_eq!(exact_degree(&t), monomial_degree(&t));
        }
    }

    #[test]
    fn or2_degree_one() {
        let or2 = TruthTable::builtin(Builtin::Or, 2).unwrap();
        let fit = min_error_at_degree(&or2, 1).unwrap();
        // Alternation at 0, 1, 1 ones forces p = 1/4 + x0/2 + x1/2 in monomial form.
        assert!((fit.t_star - 0.25).abs() < 1e-9);
        for (x, expected) in [(0, 0.25), (1, 0.75), (2, 0.75), (3, 1.25)] {
            assert!((fit.poly.eval(x) - expected).abs() < 1e-9, "x = {x}");
        }
        assert_eq!(approx_degree(&or2, 1.0 / 3.0).unwrap().degree, 1);
    }

    /// Vertex enumeration for OR2 at degree 1: the optimum of a 4-variable LP
    /// sits where four constraints are tight; try all of them.
    #[test]
    fn or2_vertex_oracle() {
        let f = [0.0, 1.0, 1.0, 1.0];
        let chi = |s: usize, x: usize| if (s & x).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        let masks = [0usize, 1, 2];
        let mut best = f64::INFINITY;
        // Each tight constraint is sign_x * (p(x) - f(x)) = t.
        for signs in 0..16u32 {
            let mut m = [[0.0f64; 5]; 4];
            for x in 0..4 {
                let sg = if signs >> x & 1 == 1 { 1.0 } else { -1.0 };
                for (j, &s) in masks.iter().enumerate() {
                    m[x][j] = sg * chi(s, x);
                }
                m[x][3] = -1.0;
                m[x][4] = sg * f[x];
            }
            // Gaussian elimination on the 4x4 system.
            let mut ok = true;
            for col in 0..4 {
                let piv = (col..4).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
                if m[piv][col].abs() < 1e-12 {
                    ok = false;
                    break;
                }
                m.swap(col, piv);
                for r in 0..4 {
                    if r != col {
                        let factor = m[r][col] / m[col][col];
                        for c in col..5 {
                            m[r][c] -= factor * m[col][c];
                        }
                    }
                }
            }
            if !ok {
                continue;
            }
            let sol: Vec<f64> = (0..4).map(|r| m[r][4] / m[r][r]).collect();
            let t = sol[3];
            let feasible = (0..4).all(|x| {
                let p: f64 = masks.iter().enumerate().map(|(j, &s)| sol[j] * chi(s, x)).sum();
                (p - f[x]).abs() <= t + 1e-12
            });
            if feasible && t >= -1e-12 {
                best = best.min(t);
            }
        }
        assert!((best - 0.25).abs() < 1e-12);
        let lp = min_error_at_degree(&TruthTable::builtin(Builtin::Or, 2).unwrap(), 1).unwrap();
        assert!((lp.t_star - best).abs() < 1e-9);
    }

    #[test]
    fn parity_needs_full_degree() {
        let p4 = TruthTable::builtin(Builtin::Parity, 4).unwrap();
        let below = min_error_at_degree(&p4, 3).unwrap();
        assert!(below.t_star > 1.0 / 3.0);
        assert!((below.t_star - 0.5).abs() < 1e-9);
        assert_eq!(approx_degree(&p4, 1.0 / 3.0).unwrap().degree, 4);
    }

    #[test]
    fn exact_degree_interpolates() {
        for seed in 0..10 {
            let t = TruthTable::random(5, seed).unwrap();
            let d = exact_degree(&t);
            assert!(min_error_at_degree(&t, d).unwrap().t_star < 1e-9);
            assert_eq!(approx_degree(&t, 0.0).unwrap().degree, d);
        }
    }

    #[test]
    fn t_star_nonincreasing() {
        for seed in 0..6 {
            let t = TruthTable::random(5, 50 + seed).unwrap();
            let values: Vec<f64> = (0..=5).map(|d| min_error_at_degree(&t, d).unwrap().t_star).collect();
            for w in values.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "{values:?}");
            }
            assert!(values[5] < 1e-9);
        }
    }

    #[test]
    fn fits_respect_degree_and_verify() {
        let t = TruthTable::random(6, 8).unwrap();
        for d in 0..=6 {
            let fit = min_error_at_degree(&t, d).unwrap();
            assert!(fit.poly.coeffs().keys().all(|s| s.count_ones() as usize <= d));
            assert!((fit.achieved - fit.t_star).abs() < 1e-9);
        }
    }

    #[test]
    fn scan_stops_at_first_success() {
        let or2 = TruthTable::builtin(Builtin::Or, 2).unwrap();
        let (d, fits) = scan_degrees(&or2, 1.0 / 3.0, 2).unwrap();
        assert_eq!(d, Some(1));
        assert_eq!(fits.len(), 2);
        assert!((fits[0].t_star - 0.5).abs() < 1e-9);
        assert!((fits[1].t_star - 0.25).abs() < 1e-9);
        let (none, _) = scan_degrees(&TruthTable::builtin(Builtin::Parity, 3).unwrap(), 0.1, 2).unwrap();
        assert_eq!(none, None);
    }

    #[test]
    fn input_checks() {
        let t = TruthTable::random(13, 1).unwrap();
        assert!(matches!(min_error_at_degree(&t, 2), Err(Error::Capacity(_))));
        let small = TruthTable::random(3, 1).unwrap();
        assert!(min_error_at_degree(&small, 4).is_err());
        assert!(approx_degree(&small, 0.5).is_err());
        let bad = MultilinearPoly::new(3, 1, BTreeMap::from([(0b11, 1.0)]));
        assert!(bad.is_err());
    }

    #[test]
    fn eprime_examples() {
        let constant = MultilinearPoly::new(4, 0, BTreeMap::from([(0, 0.7)])).unwrap();
        assert_eq!(eprime_statistic(&constant).unwrap(), 0.0);
        for s in [0b1usize, 0b101, 0b1111] {
            let chi = MultilinearPoly::character(4, s).unwrap();
            let lambda = s.count_ones() as f64 / 4.0;
            assert!((eprime_statistic(&chi).unwrap() - 4.0 * lambda).abs() < 1e-12);
        }
    }

    #[test]
    fn eprime_sandwich_on_or2() {
        let or2 = TruthTable::builtin(Builtin::Or, 2).unwrap();
        let fit = min_error_at_degree(&or2, 1).unwrap();
        let e = eprime_statistic(&fit.poly).unwrap();
        let eps = fit.achieved;
        let rho = 0.5;
        assert!((1.0 - 2.0 * eps).powi(2) * rho <= e + 1e-9);
        assert!(e <= 4.0 * (1.0 + eps).powi(2) * 1.0 / 2.0 + 1e-9);
    }
}
