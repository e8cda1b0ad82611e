use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{Algorithm, RegisterLayout, Step, Unitary};
use crate::error::{Error, Result};
use crate::table::TruthTable;

/// `serial_read` keeps every oracle bit in its own work qubit.
pub const MAX_SERIAL_READ_VARS: usize = 6;

type Basis = (usize, usize, usize);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Builds a unitary from the image of each basis state `|i, a, w⟩`.
fn local(layout: RegisterLayout, image: impl Fn(Basis) -> Vec<(Basis, Complex64)>) -> Result<Unitary> {
    Unitary::from_fn(layout.dim(), |j| {
        image(layout.decode(j))
            .into_iter()
            .map(|((i, a, w), v)| (layout.basis(i, a, w), v))
            .collect()
    })
}

fn permutation(layout: RegisterLayout, map: impl Fn(Basis) -> Basis) -> Result<Unitary> {
    local(layout, |b| vec![(map(b), c(1.0))])
}

/// Hadamard on the two-dimensional index subspace `{2j, 2j + 1}`.
fn pair_hadamard(layout: RegisterLayout, pair: usize) -> Result<Unitary> {
    local(layout, |(i, a, w)| {
        if i / 2 != pair {
            return vec![((i, a, w), c(1.0))];
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        vec![
            ((2 * pair, a, w), c(FRAC_1_SQRT_2)),
            ((2 * pair + 1, a, w), c(sign * FRAC_1_SQRT_2)),
        ]
    })
}

/// Answer map `H·X`, taking `|0⟩` to `|−⟩`.
fn answer_to_minus(layout: RegisterLayout) -> Result<Unitary> {
    local(layout, |(i, a, w)| {
        let sign = if a == 0 { -1.0 } else { 1.0 };
        vec![((i, 0, w), c(FRAC_1_SQRT_2)), ((i, 1, w), c(sign * FRAC_1_SQRT_2))]
    })
}

/// Inverse of [`answer_to_minus`].
fn answer_from_minus(layout: RegisterLayout) -> Result<Unitary> {
    local(layout, |(i, a, w)| {
        let sign = if a == 0 { 1.0 } else { -1.0 };
        vec![((i, 0, w), c(sign * FRAC_1_SQRT_2)), ((i, 1, w), c(FRAC_1_SQRT_2))]
    })
}

fn accept_where(layout: RegisterLayout, pred: impl Fn(Basis) -> bool) -> Vec<bool> {
    (0..layout.dim()).map(|j| pred(layout.decode(j))).collect()
}

/// Reads every oracle bit into a work qubit with `n` queries, then accepts on
/// `f(work)`. Exact for any `f`.
pub fn serial_read(t: &TruthTable) -> Result<Algorithm> {
    let n = t.n();
    if n > MAX_SERIAL_READ_VARS {
        return Err(Error::capacity(format!(
            "serial_read needs 2^n work states; n = {n} exceeds {MAX_SERIAL_READ_VARS}"
        )));
    }
    let layout = RegisterLayout::new(n, 1 << n)?;
    let mut steps = vec![Step::Unitary(Unitary::identity(layout.dim()))];
    for step in 0..n {
        steps.push(Step::Query);
        // Swap the answer into work bit `step`, then advance the index.
        let store = permutation(layout, |(i, a, w)| {
            let bit = w >> step & 1;
            ((i + 1) % n, bit, (w & !(1 << step)) | a << step)
        })?;
        steps.push(Step::Unitary(store));
    }
    let accept = accept_where(layout, |(_, _, w)| t.bit(w));
    Algorithm::new("serial_read", layout, steps, accept)
}

/// Parity of `n` bits (n even) with `n/2` queries: each query reads the
/// phase difference of one index pair, which a Hadamard turns into the
/// index low bit; that bit carries the running parity between pairs.
pub fn deutsch_parity(n: usize) -> Result<Algorithm> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::input(format!("deutsch_parity needs an even positive n, got {n}")));
    }
    let layout = RegisterLayout::new(n, 2)?;
    let pairs = n / 2;
    let shift = permutation(layout, |(i, a, w)| ((i + 2) % n, a, w))?;
    let mut steps = vec![Step::Unitary(pair_hadamard(layout, 0)?.then(&answer_to_minus(layout)?)?)];
    for j in 1..pairs {
        steps.push(Step::Query);
        let between = pair_hadamard(layout, j - 1)?
            .then(&shift)?
            .then(&pair_hadamard(layout, j)?)?;
        steps.push(Step::Unitary(between));
    }
    steps.push(Step::Query);
    let copy_parity = permutation(layout, |(i, a, w)| (i, a, w ^ (i & 1)))?;
    steps.push(Step::Unitary(pair_hadamard(layout, pairs - 1)?.then(&copy_parity)?));
    let accept = accept_where(layout, |(_, _, w)| w == 1);
    Algorithm::new("deutsch_parity", layout, steps, accept)
}

/// Grover search for a marked index, followed by one query that writes the
/// oracle bit at the found index into the answer. Computes OR.
pub fn grover(n: usize, iterations: usize) -> Result<Algorithm> {
    let layout = RegisterLayout::new(n, 1)?;
    let amp = 1.0 / (n as f64).sqrt();
    // Householder reflection sending |0⟩ to the uniform index state.
    let mut v: Vec<f64> = vec![-amp; n];
    v[0] += 1.0;
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let prepare = local(layout, |(i, a, w)| {
        if vv == 0.0 {
            return vec![((i, a, w), c(1.0))];
        }
        (0..n)
            .map(|r| {
                let delta = if r == i { 1.0 } else { 0.0 };
                ((r, a, w), c(delta - 2.0 * v[r] * v[i] / vv))
            })
            .collect()
    })?;
    let diffusion = local(layout, |(i, a, w)| {
        (0..n)
            .map(|r| {
                let delta = if r == i { 1.0 } else { 0.0 };
                ((r, a, w), c(2.0 / n as f64 - delta))
            })
            .collect()
    })?;
    let mut steps = Vec::new();
    if iterations == 0 {
        steps.push(Step::Unitary(prepare));
    } else {
        steps.push(Step::Unitary(prepare.then(&answer_to_minus(layout)?)?));
        for it in 0..iterations {
            steps.push(Step::Query);
            let after = if it + 1 == iterations {
                diffusion.then(&answer_from_minus(layout)?)?
            } else {
                diffusion.clone()
            };
            steps.push(Step::Unitary(after));
        }
    }
    steps.push(Step::Query);
    let accept = accept_where(layout, |(_, a, _)| a == 1);
    Algorithm::new(format!("grover({iterations})"), layout, steps, accept)
}
