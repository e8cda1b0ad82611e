//! Bit-packed truth tables.
//!
//! A table on `n` variables stores `f(x)` for every `x` in `{0,1}^n`. The
//! entry for `x` lives at index `Σ x_i 2^i`, so `x_0` is the least
//! significant bit of the index. The same convention indexes Fourier masks
//! everywhere else in the crate.
//!
//! Bit value `0` is read as sign `+1` and bit value `1` as sign `-1`.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported variable count.
pub const MAX_VARS: usize = 20;

const WORD_BITS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

fn check_vars(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::input("a table needs at least one variable"));
    }
    if n > MAX_VARS {
        return Err(Error::capacity(format!(
            "{n} variables requested, at most {MAX_VARS} supported"
        )));
    }
    Ok(())
}

fn word_count(n: usize) -> usize {
    (1usize << n).div_ceil(WORD_BITS)
}

/// Mask of the valid bits in the (single) word of a table with fewer than 6 variables.
fn tail_mask(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

impl TruthTable {
    /// Builds a table by evaluating `f` at every index.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        check_vars(n)?;
        let mut words = vec![0u64; word_count(n)];
        for x in 0..1usize << n {
            if f(x) {
                words[x / WORD_BITS] |= 1 << (x % WORD_BITS);
            }
        }
        Ok(TruthTable { n, words })
    }

    pub fn from_bits(n: usize, bits: &[bool]) -> Result<Self> {
        check_vars(n)?;
        if bits.len() != 1 << n {
            return Err(Error::input(format!(
                "expected {} table entries for n = {n}, got {}",
                1usize << n,
                bits.len()
            )));
        }
        Self::from_fn(n, |x| bits[x])
    }

    /// Builds a table from packed words (bit `j` of word `w` is entry `64 w + j`).
    pub fn from_words(n: usize, mut words: Vec<u64>) -> Result<Self> {
        check_vars(n)?;
        if words.len() != word_count(n) {
            return Err(Error::input("word count does not match variable count"));
        }
        if words[0] & !tail_mask(n) != 0 {
            return Err(Error::input("bits set beyond the end of the table"));
        }
        words.shrink_to_fit();
        Ok(TruthTable { n, words })
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        check_vars(n)?;
        let fill = if value { tail_mask(n) } else { 0 };
        Ok(TruthTable {
            n,
            words: vec![fill; word_count(n)],
        })
    }

    /// The dictator function `x_i` on `n` variables.
    pub fn variable(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::input(format!("variable x{i} out of range for n = {n}")));
        }
        Self::from_fn(n, |x| x >> i & 1 == 1)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of table entries, `2^n`.
    #[inline]
    pub fn len(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Entry at `index`. Panics if `index >= 2^n`.
    #[inline]
    pub fn bit(&self, index: usize) -> bool {
        debug_assert!(index < self.len());
        self.words[index / WORD_BITS] >> (index % WORD_BITS) & 1 == 1
    }

    /// Entry in sign form: `+1` for bit 0, `-1` for bit 1.
    #[inline]
    pub fn sign(&self, index: usize) -> i64 {
        1 - 2 * self.bit(index) as i64
    }

    pub fn eval_index(&self, index: usize) -> Result<bool> {
        if index >= self.len() {
            return Err(Error::input(format!(
                "index {index} out of range for a table on {} variables",
                self.n
            )));
        }
        Ok(self.bit(index))
    }

    /// Evaluates at the assignment `x`, where `x[i]` is the value of `x_i`.
    pub fn eval(&self, x: &[bool]) -> Result<bool> {
        self.eval_index(assignment_index(self.n, x)?)
    }

    pub fn sign_eval(&self, x: &[bool]) -> Result<i64> {
        Ok(1 - 2 * self.eval(x)? as i64)
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn complement(&self) -> Self {
        let mask = tail_mask(self.n);
        TruthTable {
            n: self.n,
            words: self.words.iter().map(|w| !w & mask).collect(),
        }
    }

    /// Renames variables: the result at `y` equals `self` at `x` where `x_i = y_{perm[i]}`.
    pub fn permute_vars(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n {
            return Err(Error::input("permutation length differs from variable count"));
        }
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::input("not a permutation"));
            }
        }
        Self::from_fn(self.n, |y| {
            let x = perm
                .iter()
                .enumerate()
                .fold(0usize, |acc, (i, &p)| acc | (y >> p & 1) << i);
            self.bit(x)
        })
    }

    /// Block composition `outer(inner(X_0), ..., inner(X_{m-1}))` where block
    /// `X_j` is the contiguous variable range `[j n_i, (j + 1) n_i)`.
    pub fn compose(outer: &TruthTable, inner: &TruthTable) -> Result<Self> {
        let total = outer.n * inner.n;
        if total > MAX_VARS {
            return Err(Error::capacity(format!(
                "composition needs {total} variables, at most {MAX_VARS} supported"
            )));
        }
        let width = inner.n;
        let block = (1usize << width) - 1;
        Self::from_fn(total, |x| {
            let outer_index = (0..outer.n).fold(0usize, |acc, j| {
                acc | (inner.bit(x >> (j * width) & block) as usize) << j
            });
            outer.bit(outer_index)
        })
    }

    /// `f_1 = f`, `f_k = compose(f, f_{k-1})`.
    pub fn iterate(f: &TruthTable, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::input("iteration count must be positive"));
        }
        let vars = (f.n as u128).checked_pow(k).unwrap_or(u128::MAX);
        if vars > MAX_VARS as u128 {
            return Err(Error::capacity(format!(
                "{}-fold iteration of a {}-variable function exceeds {MAX_VARS} variables",
                k, f.n
            )));
        }
        let mut acc = f.clone();
        for _ in 1..k {
            acc = Self::compose(f, &acc)?;
        }
        Ok(acc)
    }

    pub fn builtin(family: Builtin, n: usize) -> Result<Self> {
        match family {
            Builtin::Parity => Self::from_fn(n, |x| x.count_ones() % 2 == 1),
            Builtin::And => Self::from_fn(n, |x| x == (1 << n) - 1),
            Builtin::Or => Self::from_fn(n, |x| x != 0),
            Builtin::Majority => {
                if n.is_multiple_of(2) {
                    return Err(Error::input("majority needs an odd number of variables"));
                }
                Self::from_fn(n, |x| 2 * x.count_ones() as usize > n)
            }
            Builtin::PaperF => {
                if n != 4 {
                    return Err(Error::input("paper_f is defined on exactly 4 variables"));
                }
                Self::from_fn(4, |x| {
                    let v = |i: usize| (x >> i & 1) as i32;
                    let value = v(0) * (v(1) - v(2)).pow(2) + (1 - v(0)) * (v(2) - v(3)).pow(2);
                    value == 1
                })
            }
        }
    }

    /// Uniformly random table drawn from a SplitMix64 stream seeded with `seed`.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        check_vars(n)?;
        let mut rng = SplitMix64::seed_from_u64(seed);
        let mut words: Vec<u64> = (0..word_count(n)).map(|_| rng.next_u64()).collect();
        words[0] &= tail_mask(n);
        Ok(TruthTable { n, words })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TableFile {
            version: FILE_VERSION,
            n: self.n,
            bits: self.to_hex(),
        })
        .expect("table file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TableFile = serde_json::from_str(text)?;
        if file.version != FILE_VERSION {
            return Err(Error::Format(format!("unsupported version {}", file.version)));
        }
        check_vars(file.n).map_err(|e| Error::Format(e.to_string()))?;
        Self::from_hex(file.n, &file.bits)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// Little-endian byte string of the table, entry `j` at bit `j % 8` of byte `j / 8`.
    fn to_bytes(&self) -> Vec<u8> {
        let len = self.len().div_ceil(8);
        self.words
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .take(len)
            .collect()
    }

    fn to_hex(&self) -> String {
        if self.len() < 8 {
            // One nibble holds the whole table.
            format!("{:x}", self.words[0])
        } else {
            hex::encode(self.to_bytes())
        }
    }

    fn from_hex(n: usize, text: &str) -> Result<Self> {
        let len = 1usize << n;
        if len < 8 {
            if text.len() != 1 {
                return Err(Error::Format(format!(
                    "expected 1 hex digit for n = {n}, got {}",
                    text.len()
                )));
            }
            let value = u64::from_str_radix(text, 16)
                .map_err(|_| Error::Format(format!("non-hex character in {text:?}")))?;
            if value & !tail_mask(n) != 0 {
                return Err(Error::Format("unused trailing bits must be zero".into()));
            }
            return Ok(TruthTable { n, words: vec![value] });
        }
        if text.len() != len / 4 {
            return Err(Error::Format(format!(
                "expected {} hex digits for n = {n}, got {}",
                len / 4,
                text.len()
            )));
        }
        let bytes = hex::decode(text).map_err(|e| Error::Format(e.to_string()))?;
        let words = bytes
            .chunks(8)
            .map(|chunk| {
                let mut buf = [0u8; 8];
                buf[..chunk.len()].copy_from_slice(chunk);
                u64::from_le_bytes(buf)
            })
            .collect();
        Ok(TruthTable { n, words })
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(n={}, bits={})", self.n, self.to_hex())
    }
}

/// Index of an assignment under the LSB-first convention.
pub fn assignment_index(n: usize, x: &[bool]) -> Result<usize> {
    if x.len() != n {
        return Err(Error::input(format!(
            "assignment has {} bits, table has {n} variables",
            x.len()
        )));
    }
    Ok(x.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (b as usize) << i))
}

const FILE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    version: u32,
    n: usize,
    bits: String,
}

/// Named function families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Parity,
    And,
    Or,
    Majority,
    /// `x_0 (x_1 - x_2)^2 + (1 - x_0)(x_2 - x_3)^2` on four variables.
    PaperF,
}

impl Builtin {
    pub fn name(self) -> &'static str {
        match self {
            Builtin::Parity => "parity",
            Builtin::And => "and",
            Builtin::Or => "or",
            Builtin::Majority => "majority",
            Builtin::PaperF => "paper_f",
        }
    }

    /// Evaluates the family on an explicit argument list.
    pub fn apply(self, args: &[bool]) -> bool {
        let ones = args.iter().filter(|&&b| b).count();
        match self {
            Builtin::Parity => ones % 2 == 1,
            Builtin::And => ones == args.len(),
            Builtin::Or => ones > 0,
            Builtin::Majority => 2 * ones > args.len(),
            Builtin::PaperF => {
                if args[0] {
                    args[1] != args[2]
                } else {
                    args[2] != args[3]
                }
            }
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parity" => Ok(Builtin::Parity),
            "and" => Ok(Builtin::And),
            "or" => Ok(Builtin::Or),
            "maj" | "majority" => Ok(Builtin::Majority),
            "paper_f" => Ok(Builtin::PaperF),
            _ => Err(Error::input(format!("unknown builtin {s:?}"))),
        }
    }
}
