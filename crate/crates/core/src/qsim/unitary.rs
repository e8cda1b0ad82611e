use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for `‖U†U - I‖_max`.
pub const UNITARY_TOL: f64 = 1e-9;

/// A validated unitary, stored as sparse columns: column `j` is `U|j⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Unitary {
    dim: usize,
    cols: Vec<Vec<(u32, Complex64)>>,
}

impl Unitary {
    fn from_columns(dim: usize, cols: Vec<Vec<(u32, Complex64)>>) -> Result<Self> {
        let u = Unitary { dim, cols };
        let deviation = u.unitarity_deviation();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary(deviation));
        }
        Ok(u)
    }

    /// Builds `U` from the image of every basis vector.
    pub fn from_fn(dim: usize, mut image: impl FnMut(usize) -> Vec<(usize, Complex64)>) -> Result<Self> {
        let cols = (0..dim)
            .map(|j| {
                let mut col: Vec<(u32, Complex64)> = Vec::new();
                for (r, v) in image(j) {
                    if r >= dim {
                        return Err(Error::input(format!("row {r} outside dimension {dim}")));
                    }
                    if v != Complex64::new(0.0, 0.0) {
                        col.push((r as u32, v));
                    }
                }
                col.sort_by_key(|&(r, _)| r);
                Ok(col)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_columns(dim, cols)
    }

    /// Row-major dense matrix.
    pub fn from_dense(dim: usize, matrix: &[Complex64]) -> Result<Self> {
        if matrix.len() != dim * dim {
            return Err(Error::input(format!(
                "dense matrix has {} entries, expected {}",
                matrix.len(),
                dim * dim
            )));
        }
        Self::from_fn(dim, |j| (0..dim).map(|r| (r, matrix[r * dim + j])).collect())
    }

    /// The permutation `|j⟩ ↦ |perm[j]⟩`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        Self::from_fn(perm.len(), |j| vec![(perm[j], Complex64::new(1.0, 0.0))])
    }

    pub fn identity(dim: usize) -> Self {
        Unitary {
            dim,
            cols: (0..dim).map(|j| vec![(j as u32, Complex64::new(1.0, 0.0))]).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.cols[col]
            .iter()
            .find(|&&(r, _)| r as usize == row)
            .map_or(Complex64::new(0.0, 0.0), |&(_, v)| v)
    }

    /// `max_{j,k} |(U†U - I)_{jk}|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let mut rows: Vec<Vec<(u32, Complex64)>> = vec![Vec::new(); self.dim];
        for (j, col) in self.cols.iter().enumerate() {
            for &(r, v) in col {
                rows[r as usize].push((j as u32, v));
            }
        }
        let mut gram: HashMap<(u32, u32), Complex64> = HashMap::new();
        for row in &rows {
            for &(j, a) in row {
                for &(k, b) in row {
                    *gram.entry((j, k)).or_default() += a.conj() * b;
                }
            }
        }
        let mut worst: f64 = 0.0;
        for j in 0..self.dim as u32 {
            let diag = gram.get(&(j, j)).copied().unwrap_or_default();
            worst = worst.max((diag - 1.0).norm());
        }
        for (&(j, k), v) in &gram {
            if j != k {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for (j, col) in self.cols.iter().enumerate() {
            let x = v[j];
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for &(r, u) in col {
                out[r as usize] += u * x;
            }
        }
        out
    }

    /// `next · self`: apply `self` first.
    pub fn then(&self, next: &Unitary) -> Result<Unitary> {
        if self.dim != next.dim {
            return Err(Error::Layout(format!(
                "cannot compose dimensions {} and {}",
                self.dim, next.dim
            )));
        }
        let cols = self
            .cols
            .iter()
            .map(|col| {
                let mut acc: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); self.dim];
                for &(c, v) in col {
                    for &(r, u) in &next.cols[c as usize] {
                        acc[r as usize] += u * v;
                    }
                }
                acc.into_iter()
                    .enumerate()
                    .filter(|(_, v)| v.norm_sqr() > 0.0)
                    .map(|(r, v)| (r as u32, v))
                    .collect()
            })
            .collect();
        Self::from_columns(self.dim, cols)
    }
}
