//! Boolean-function complexity toolkit.
//!
//! Exact Fourier spectra, influence and (block) sensitivity, closed-form
//! quantum query and approximate-degree lower bounds, a minimax LP for
//! approximate degree, and a simulator that tracks black-box algorithms as
//! Fourier expansions `φ(x) = Σ_s φ̂_s (-1)^{s·x}`.

pub mod approxdeg;
pub mod bounds;
pub mod dsl;
pub mod error;
pub mod fourier;
pub mod measures;
pub mod qsim;
pub mod table;

pub use error::{Error, Result};
pub use fourier::{inverse_wht, wht, FourierSpectrum};
pub use table::{Builtin, TruthTable};

/// Exact rational used for influences and averaged measures.
pub type Rational = num_rational::Ratio<i128>;

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
