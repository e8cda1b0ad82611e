//! Exact Walsh–Hadamard spectra.
//!
//! With `f` in sign form, `f̂_s = E_x[f(x) (-1)^{s·x}]`. Each coefficient is
//! kept as the integer correlation sum `Σ_x f(x) (-1)^{s·x}` over the shared
//! denominator `2^n`, so zero tests and Parseval are exact.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::table::TruthTable;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierSpectrum {
    n: usize,
    sums: Vec<i64>,
}

/// In-place unnormalized butterfly over `2^n` entries.
fn butterfly(values: &mut [i64]) {
    let len = values.len();
    let mut h = 1;
    while h < len {
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
}

pub fn wht(t: &TruthTable) -> FourierSpectrum {
    let mut sums: Vec<i64> = (0..t.len()).map(|x| t.sign(x)).collect();
    butterfly(&mut sums);
    FourierSpectrum { n: t.n(), sums }
}

/// Rebuilds the table from its spectrum. Fails unless every reconstructed value is `±1`.
pub fn inverse_wht(spectrum: &FourierSpectrum) -> Result<TruthTable> {
    let mut values = spectrum.sums.clone();
    butterfly(&mut values);
    let den = spectrum.denominator();
    if let Some((x, v)) = values
        .iter()
        .enumerate()
        .find(|(_, &v)| v != den && v != -den)
    {
        return Err(Error::Consistency(format!(
            "reconstructed value {v}/{den} at x = {x} is not a sign"
        )));
    }
    TruthTable::from_fn(spectrum.n, |x| values[x] < 0)
}

impl FourierSpectrum {
    /// Builds a spectrum from raw correlation sums over the denominator `2^n`.
    pub fn from_sums(n: usize, sums: Vec<i64>) -> Result<Self> {
        if n == 0 || n > crate::table::MAX_VARS || sums.len() != 1 << n {
            return Err(Error::input("spectrum length must be 2^n with 1 <= n <= 20"));
        }
        Ok(FourierSpectrum { n, sums })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `2^n`, the denominator shared by every coefficient.
    pub fn denominator(&self) -> i64 {
        1 << self.n
    }

    /// Correlation sum `2^n f̂_s`.
    pub fn sum(&self, s: usize) -> i64 {
        self.sums[s]
    }

    pub fn sums(&self) -> &[i64] {
        &self.sums
    }

    pub fn coeff(&self, s: usize) -> f64 {
        self.sums[s] as f64 / self.denominator() as f64
    }

    pub fn coeff_exact(&self, s: usize) -> Rational {
        Rational::new(self.sums[s] as i128, self.denominator() as i128)
    }

    /// Masks with a nonzero coefficient, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.sums
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(s, _)| s)
    }

    /// `max |s|` over nonzero coefficients; 0 for the zero spectrum.
    pub fn degree(&self) -> usize {
        self.support()
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// `W[w] = Σ_{|s| = w} (2^n f̂_s)^2`, i.e. the spectral weight at level `w` times `4^n`.
    pub fn level_weights(&self) -> Vec<u128> {
        let mut levels = vec![0u128; self.n + 1];
        for (s, &v) in self.sums.iter().enumerate() {
            levels[s.count_ones() as usize] += (v as i128 * v as i128) as u128;
        }
        levels
    }

    /// `Σ_s f̂_s^2`, exact.
    pub fn parseval(&self) -> Rational {
        let total: u128 = self.level_weights().iter().sum();
        Rational::new(total as i128, 1i128 << (2 * self.n))
    }

    /// Average influence `Σ_s f̂_s^2 |s| / n`, exact.
    pub fn rho_exact(&self) -> Rational {
        let weighted: u128 = self
            .level_weights()
            .iter()
            .enumerate()
            .map(|(w, &mass)| mass * w as u128)
            .sum();
        Rational::new(weighted as i128, (self.n as i128) << (2 * self.n))
    }

    pub fn rho(&self) -> f64 {
        crate::to_f64(&self.rho_exact())
    }

    /// `Inf_i = Σ_{s ∋ i} f̂_s^2`, exact.
    pub fn influence_exact(&self, i: usize) -> Result<Rational> {
        if i >= self.n {
            return Err(Error::input(format!("variable {i} out of range")));
        }
        let mass: u128 = self
            .sums
            .iter()
            .enumerate()
            .filter(|(s, _)| s >> i & 1 == 1)
            .map(|(_, &v)| (v as i128 * v as i128) as u128)
            .sum();
        Ok(Rational::new(mass as i128, 1i128 << (2 * self.n)))
    }

    /// `Σ_s f̂_s^2 (1 - 2|s|/n)^k` evaluated by level.
    pub fn noise_sum(&self, k: u32) -> f64 {
        let n = self.n as f64;
        let scale = (1u128 << (2 * self.n)) as f64;
        self.level_weights()
            .iter()
            .enumerate()
            .map(|(w, &mass)| (mass as f64 / scale) * ((n - 2.0 * w as f64) / n).powi(k as i32))
            .sum()
    }

    /// Nonzero entries for export, ascending by mask.
    pub fn export(&self) -> Vec<CoefficientEntry> {
        self.support()
            .map(|s| CoefficientEntry {
                s,
                coeff_num: self.sums[s],
                coeff_den: self.denominator(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoefficientEntry {
    pub s: usize,
    pub coeff_num: i64,
    pub coeff_den: i64,
}
