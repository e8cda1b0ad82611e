//! Exact block sensitivity.
//!
//! At each input `x` the sensitive blocks are the 1-entries of
//! `g_x(B) = f(x ⊕ B) ⊕ f(x)`. Any packing of sensitive blocks can be shrunk
//! to a packing of minimal ones, so only minimal sensitive blocks are packed.
//! They are found with bit-parallel subset closures over the translated
//! table, then packed by branch and bound.

use std::sync::atomic::{AtomicU32, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::LOW_HALF;
use crate::error::{Error, Result};
use crate::table::TruthTable;

/// Largest `n` for which exact block sensitivity is attempted.
pub const MAX_EXACT_BS_VARS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSensitivity {
    pub value: u32,
    /// `false` when the time budget ran out; `value` is then only a lower bound.
    pub exact: bool,
    pub input: usize,
    /// Pairwise disjoint sensitive blocks at `input`, as variable masks.
    pub blocks: Vec<u32>,
}

fn check_exact(t: &TruthTable) -> Result<()> {
    if t.n() > MAX_EXACT_BS_VARS {
        return Err(Error::capacity(format!(
            "exact block sensitivity is limited to n <= {MAX_EXACT_BS_VARS}, got {}",
            t.n()
        )));
    }
    Ok(())
}

/// Per-worker buffers for one table.
struct Scratch {
    n: usize,
    g: Vec<u64>,
    up: Vec<u64>,
    below: Vec<u64>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        let words = (1usize << n).div_ceil(64);
        Scratch {
            n,
            g: vec![0; words],
            up: vec![0; words],
            below: vec![0; words],
        }
    }

    /// Fills `g` with `B ↦ f(x ⊕ B) ⊕ f(x)`.
    fn translate(&mut self, t: &TruthTable, x: usize) {
        let src = t.words();
        let flip = if t.bit(x) { u64::MAX } else { 0 };
        let high = x >> 6;
        let low = x & 63;
        let valid = if self.n >= 6 { u64::MAX } else { (1u64 << (1 << self.n)) - 1 };
        for (w, out) in self.g.iter_mut().enumerate() {
            let mut word = src[w ^ high];
            for (j, &mask) in LOW_HALF.iter().enumerate() {
                if low >> j & 1 == 1 {
                    let s = 1 << j;
                    word = ((word & mask) << s) | ((word >> s) & mask);
                }
            }
            *out = (word ^ flip) & valid;
        }
    }

    /// `up[B] = OR_{A ⊆ B} g[A]`, then `below[B] = OR_{i ∈ B} up[B \ {i}]`.
    fn close(&mut self) {
        self.up.copy_from_slice(&self.g);
        for j in 0..self.n {
            shift_up(&mut self.up, j, |dst, src| *dst |= src);
        }
        self.below.iter_mut().for_each(|w| *w = 0);
        for j in 0..self.n {
            if j < 6 {
                let s = 1 << j;
                for (b, &u) in self.below.iter_mut().zip(&self.up) {
                    *b |= (u & LOW_HALF[j]) << s;
                }
            } else {
                let stride = 1 << (j - 6);
                for w in 0..self.up.len() {
                    if w & stride == 0 {
                        self.below[w | stride] |= self.up[w];
                    }
                }
            }
        }
    }

    fn minimal_blocks(&mut self, t: &TruthTable, x: usize) -> Vec<u32> {
        self.translate(t, x);
        self.close();
        let mut blocks = Vec::new();
        for (w, (&g, &b)) in self.g.iter().zip(&self.below).enumerate() {
            let mut bits = g & !b;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                blocks.push((w * 64 + j) as u32);
                bits &= bits - 1;
            }
        }
        blocks
    }
}

/// Applies `op(word_with_i, word_without_i)` along dimension `j`.
fn shift_up(words: &mut [u64], j: usize, op: impl Fn(&mut u64, u64)) {
    if j < 6 {
        let s = 1 << j;
        for w in words.iter_mut() {
            let lifted = (*w & LOW_HALF[j]) << s;
            op(w, lifted);
        }
    } else {
        let stride = 1 << (j - 6);
        for w in 0..words.len() {
            if w & stride == 0 {
                let src = words[w];
                op(&mut words[w | stride], src);
            }
        }
    }
}

/// All minimal sensitive blocks of `t` at `x`, sorted by size then mask.
pub fn minimal_sensitive_blocks(t: &TruthTable, x: usize) -> Result<Vec<u32>> {
    check_exact(t)?;
    t.eval_index(x)?;
    let mut blocks = Scratch::new(t.n()).minimal_blocks(t, x);
    sort_blocks(&mut blocks);
    Ok(blocks)
}

fn sort_blocks(blocks: &mut [u32]) {
    blocks.sort_by_key(|&b| (b.count_ones(), b));
}

/// Upper bound on how many more disjoint blocks fit among `candidates`.
fn packing_bound(candidates: &[u32]) -> u32 {
    let Some(min_size) = candidates.iter().map(|b| b.count_ones()).min() else {
        return 0;
    };
    let union = candidates.iter().fold(0u32, |acc, &b| acc | b);
    (union.count_ones() / min_size).min(candidates.len() as u32)
}

struct Packer {
    best: u32,
    best_set: Vec<u32>,
    current: Vec<u32>,
}

impl Packer {
    fn search(&mut self, candidates: &[u32]) {
        let depth = self.current.len() as u32;
        if depth > self.best {
            self.best = depth;
            self.best_set.clone_from(&self.current);
        }
        if candidates.is_empty() || depth + packing_bound(candidates) <= self.best {
            return;
        }
        let (&first, rest) = candidates.split_first().expect("nonempty");
        let compatible: Vec<u32> = rest.iter().copied().filter(|&b| b & first == 0).collect();
        self.current.push(first);
        self.search(&compatible);
        self.current.pop();
        self.search(rest);
    }
}

/// Maximum disjoint packing of `blocks` (sorted by size), or `None` if it
/// cannot exceed `floor`.
fn max_packing(blocks: &[u32], floor: u32) -> Option<Vec<u32>> {
    if packing_bound(blocks) <= floor && floor > 0 {
        return None;
    }
    let mut packer = Packer {
        best: floor,
        best_set: Vec::new(),
        current: Vec::new(),
    };
    packer.search(blocks);
    if packer.best_set.is_empty() && floor > 0 {
        None
    } else {
        Some(packer.best_set)
    }
}

/// `BS_f(x)` with a witness family of disjoint sensitive blocks.
pub fn block_sensitivity_at(t: &TruthTable, x: usize) -> Result<(u32, Vec<u32>)> {
    let blocks = minimal_sensitive_blocks(t, x)?;
    let packing = max_packing(&blocks, 0).unwrap_or_default();
    Ok((packing.len() as u32, packing))
}

/// `BS_f = max_x BS_f(x)`. When `budget` runs out the result is flagged inexact.
pub fn block_sensitivity(t: &TruthTable, budget: Option<Duration>) -> Result<BlockSensitivity> {
    check_exact(t)?;
    let deadline = budget.map(|b| Instant::now() + b);
    let global = AtomicU32::new(0);
    let chunk = 256.min(t.len());
    let partial: Vec<(u32, usize, Vec<u32>, bool)> = (0..t.len())
        .into_par_iter()
        .step_by(chunk)
        .map(|start| {
            let mut scratch = Scratch::new(t.n());
            let mut local: (u32, usize, Vec<u32>) = (0, usize::MAX, Vec::new());
            for x in start..(start + chunk).min(t.len()) {
                if deadline.is_some_and(|d| Instant::now() > d) {
                    return (local.0, local.1, local.2, false);
                }
                let mut blocks = scratch.minimal_blocks(t, x);
                sort_blocks(&mut blocks);
                // Ties with the global best are still explored so the smallest witness wins.
                let floor = local.0.max(global.load(Ordering::Relaxed).saturating_sub(1));
                if let Some(packing) = max_packing(&blocks, floor) {
                    let value = packing.len() as u32;
                    if value > local.0 || (value == local.0 && x < local.1) {
                        local = (value, x, packing);
                        global.fetch_max(value, Ordering::Relaxed);
                    }
                }
            }
            (local.0, local.1, local.2, true)
        })
        .collect();

    let exact = partial.iter().all(|p| p.3);
    let (value, input, blocks) = partial
        .into_iter()
        .filter(|p| p.1 != usize::MAX)
        .map(|(v, x, b, _)| (v, x, b))
        .fold((0, 0, Vec::new()), |best, cand| {
            if cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1) {
                cand
            } else {
                best
            }
        });
    Ok(BlockSensitivity {
        value,
        exact,
        input,
        blocks,
    })
}
