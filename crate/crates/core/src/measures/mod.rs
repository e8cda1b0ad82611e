//! Influence, sensitivity and block sensitivity.
//!
//! All averaged quantities are exact rationals; `Inf_i` and `S̄` have
//! denominator `2^n`, `ρ` has denominator `n 2^n`.

mod block;

pub use block::{block_sensitivity, block_sensitivity_at, minimal_sensitive_blocks, BlockSensitivity, MAX_EXACT_BS_VARS};

use std::time::Duration;

use crate::error::{Error, Result};
use crate::table::TruthTable;
use crate::Rational;

/// Positions in a 64-bit word whose index has bit `j` clear, `j < 6`.
pub(crate) const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Number of `x` with `f(x) != f(x ⊕ e_i)`.
pub fn flip_count(t: &TruthTable, i: usize) -> u64 {
    let words = t.words();
    if i < 6 {
        let shift = 1 << i;
        let pairs: u64 = words
            .iter()
            .map(|&w| ((w ^ (w >> shift)) & LOW_HALF[i]).count_ones() as u64)
            .sum();
        2 * pairs
    } else {
        let stride = 1 << (i - 6);
        (0..words.len())
            .map(|w| (words[w] ^ words[w ^ stride]).count_ones() as u64)
            .sum()
    }
}

pub fn influence(t: &TruthTable, i: usize) -> Result<Rational> {
    if i >= t.n() {
        return Err(Error::input(format!(
            "variable {i} out of range for n = {}",
            t.n()
        )));
    }
    Ok(Rational::new(flip_count(t, i) as i128, t.len() as i128))
}

fn total_flips(t: &TruthTable) -> u64 {
    (0..t.n()).map(|i| flip_count(t, i)).sum()
}

/// `ρ_f = E_i[Inf_i(f)]`.
pub fn avg_influence(t: &TruthTable) -> Rational {
    Rational::new(total_flips(t) as i128, (t.n() * t.len()) as i128)
}

/// `S̄_f = Σ_i Inf_i(f) = ρ_f n`.
pub fn avg_sensitivity(t: &TruthTable) -> Rational {
    Rational::new(total_flips(t) as i128, t.len() as i128)
}

/// `|{i : f(x) != f(x ⊕ e_i)}|`.
pub fn sensitivity_at(t: &TruthTable, x: usize) -> u32 {
    let fx = t.bit(x);
    (0..t.n()).filter(|&i| t.bit(x ^ (1 << i)) != fx).count() as u32
}

/// Maximum sensitivity and the smallest input attaining it.
pub fn max_sensitivity(t: &TruthTable) -> (u32, usize) {
    (0..t.len())
        .map(|x| (sensitivity_at(t, x), x))
        .fold((0, 0), |best, (s, x)| if s > best.0 { (s, x) } else { best })
}

/// `S̄` as the average of pointwise sensitivities; independent of [`avg_sensitivity`].
pub fn avg_sensitivity_pointwise(t: &TruthTable) -> Rational {
    let total: u64 = (0..t.len()).map(|x| sensitivity_at(t, x) as u64).sum();
    Rational::new(total as i128, t.len() as i128)
}

/// How block sensitivity is handled when building a [`MeasureReport`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockMode {
    Skip,
    Exact { budget: Option<Duration> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureReport {
    pub n: usize,
    pub influences: Vec<Rational>,
    pub rho: Rational,
    pub avg_sensitivity: Rational,
    pub max_sensitivity: u32,
    pub max_sensitivity_input: usize,
    /// `None` when skipped or when `n` exceeds the exact cap.
    pub block: Option<BlockSensitivity>,
}

impl MeasureReport {
    pub fn compute(t: &TruthTable, mode: BlockMode) -> Result<Self> {
        let influences = (0..t.n())
            .map(|i| influence(t, i))
            .collect::<Result<Vec<_>>>()?;
        let (max_sensitivity, max_sensitivity_input) = max_sensitivity(t);
        let block = match mode {
            BlockMode::Exact { budget } if t.n() <= MAX_EXACT_BS_VARS => {
                Some(block_sensitivity(t, budget)?)
            }
            _ => None,
        };
        Ok(MeasureReport {
            n: t.n(),
            influences,
            rho: avg_influence(t),
            avg_sensitivity: avg_sensitivity(t),
            max_sensitivity,
            max_sensitivity_input,
            block,
        })
    }
}
