//! Dense dictionary simplex for `max c·y  s.t.  A y <= b`, `b >= 0`.
//!
//! Variables are either free or nonnegative. Because `b >= 0` the all-slack
//! basis is feasible, so no phase one is needed: free variables are pivoted
//! into the basis first and never leave, then ordinary primal simplex runs
//! on the rest. Entering columns follow the largest reduced cost; after a
//! run of degenerate pivots the rule switches to Bland's smallest-index rule
//! until progress resumes, which rules out cycling.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const DEGENERATE_RUN: usize = 50;

#[derive(Clone, Debug)]
pub struct Problem {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows × cols`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub free: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub y: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

struct Dictionary {
    rows: usize,
    cols: usize,
    /// `x_B[r] = b[r] - Σ_j a[r][j] x_N[j]`.
    a: Vec<f64>,
    b: Vec<f64>,
    /// `z = z0 + Σ_j d[j] x_N[j]`.
    d: Vec<f64>,
    z0: f64,
    /// Variable ids: `0..cols` structural, `cols..cols + rows` slacks.
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    free: Vec<bool>,
}

impl Dictionary {
    fn pivot(&mut self, r: usize, q: usize) {
        let cols = self.cols;
        let p = self.a[r * cols + q];
        let inv = 1.0 / p;
        {
            let row = &mut self.a[r * cols..(r + 1) * cols];
            for v in row.iter_mut() {
                *v *= inv;
            }
            row[q] = inv;
        }
        self.b[r] *= inv;
        let pivot_row: Vec<f64> = self.a[r * cols..(r + 1) * cols].to_vec();
        let br = self.b[r];
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let row = &mut self.a[i * cols..(i + 1) * cols];
            let factor = row[q];
            if factor == 0.0 {
                continue;
            }
            for (v, &pr) in row.iter_mut().zip(&pivot_row) {
                *v -= factor * pr;
            }
            row[q] = -factor * inv;
            self.b[i] -= factor * br;
            if self.b[i] < 0.0 && self.b[i] > -PIVOT_TOL && !self.free[self.basic[i]] {
                self.b[i] = 0.0;
            }
        }
        let dq = self.d[q];
        if dq != 0.0 {
            for (v, &pr) in self.d.iter_mut().zip(&pivot_row) {
                *v -= dq * pr;
            }
            self.d[q] = -dq * inv;
            self.z0 += dq * br;
        }
        std::mem::swap(&mut self.basic[r], &mut self.nonbasic[q]);
    }

    /// Leaving row when column `q` moves in direction `dir`, by minimum ratio.
    fn ratio_test(&self, q: usize, dir: f64) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for r in 0..self.rows {
            if self.free[self.basic[r]] {
                continue;
            }
            let coef = dir * self.a[r * self.cols + q];
            if coef <= PIVOT_TOL {
                continue;
            }
            let ratio = self.b[r].max(0.0) / coef;
            let better = match best {
                None => true,
                Some((br, bratio, bcoef)) => {
                    if ratio < bratio - 1e-12 {
                        true
                    } else if ratio <= bratio + 1e-12 {
                        // Prefer the larger pivot, then the smaller variable id.
                        coef > bcoef * (1.0 + 1e-9)
                            || (coef >= bcoef * (1.0 - 1e-9) && self.basic[r] < self.basic[br])
                    } else {
                        false
                    }
                }
            };
            if better {
                best = Some((r, ratio, coef));
            }
        }
        best.map(|(r, ratio, _)| (r, ratio))
    }
}

pub fn solve(problem: &Problem, max_pivots: usize) -> Result<Solution> {
    let Problem { rows, cols, .. } = *problem;
    if problem.a.len() != rows * cols || problem.b.len() != rows || problem.c.len() != cols {
        return Err(Error::Solver("inconsistent problem dimensions".into()));
    }
    if problem.b.iter().any(|&v| v < 0.0) {
        return Err(Error::Solver("right-hand side must be nonnegative".into()));
    }
    let mut free = problem.free.clone();
    free.resize(cols + rows, false);
    let mut dict = Dictionary {
        rows,
        cols,
        a: problem.a.clone(),
        b: problem.b.clone(),
        d: problem.c.clone(),
        z0: 0.0,
        basic: (cols..cols + rows).collect(),
        nonbasic: (0..cols).collect(),
        free,
    };
    let mut pivots = 0;

    // Free variables enter first; once basic they are never chosen to leave.
    for q in 0..cols {
        if !dict.free[dict.nonbasic[q]] {
            continue;
        }
        let first = if dict.d[q] >= 0.0 { 1.0 } else { -1.0 };
        let step = dict
            .ratio_test(q, first)
            .or_else(|| if dict.d[q] == 0.0 { dict.ratio_test(q, -first) } else { None });
        let Some((r, _)) = step else {
            return Err(Error::Solver("unbounded free variable".into()));
        };
        dict.pivot(r, q);
        pivots += 1;
    }

    let mut degenerate = 0usize;
    loop {
        if pivots >= max_pivots {
            return Err(Error::Solver(format!("pivot limit {max_pivots} reached")));
        }
        let bland = degenerate >= DEGENERATE_RUN;
        let candidates = (0..cols).filter(|&j| !dict.free[dict.nonbasic[j]] && dict.d[j] > COST_TOL);
        let entering = if bland {
            candidates.min_by_key(|&j| dict.nonbasic[j])
        } else {
            candidates.max_by(|&i, &j| {
                dict.d[i]
                    .partial_cmp(&dict.d[j])
                    .expect("finite costs")
                    .then(dict.nonbasic[j].cmp(&dict.nonbasic[i]))
            })
        };
        let Some(q) = entering else { break };
        let Some((r, ratio)) = dict.ratio_test(q, 1.0) else {
            return Err(Error::Solver("objective is unbounded".into()));
        };
        if ratio <= 1e-12 {
            degenerate += 1;
        } else {
            degenerate = 0;
        }
        dict.pivot(r, q);
        pivots += 1;
    }

    let mut y = vec![0.0; cols];
    for (r, &var) in dict.basic.iter().enumerate() {
        if var < cols {
            y[var] = dict.b[r];
        }
    }
    let objective = problem.c.iter().zip(&y).map(|(c, y)| c * y).sum();
    Ok(Solution { y, objective, pivots })
}
