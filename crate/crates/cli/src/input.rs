use std::path::Path;

use influence_core::{dsl, Rational, TruthTable};
use serde::Serialize;

use crate::CliError;

/// Where the analyzed function came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputInfo {
    pub kind: &'static str,
    pub source: String,
    pub n: usize,
}

/// Loads a function from exactly one of an expression or a table file.
pub fn load(expr: Option<&str>, table: Option<&Path>) -> Result<(TruthTable, InputInfo), CliError> {
    match (expr, table) {
        (Some(src), None) => {
            let t = dsl::compile(src)?;
            let info = InputInfo { kind: "expr", source: src.to_string(), n: t.n() };
            Ok((t, info))
        }
        (None, Some(path)) => {
            let t = TruthTable::read(path)?;
            let info = InputInfo { kind: "table", source: path.display().to_string(), n: t.n() };
            Ok((t, info))
        }
        _ => Err(CliError::Usage("exactly one of --expr and --table is required".into())),
    }
}

/// Parses `0.25`, `1/3` and similar.
pub fn parse_probability(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
            let den: f64 = den.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
            if den == 0.0 {
                return Err(format!("zero denominator in {s:?}"));
            }
            num / den
        }
        None => s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?,
    };
    if !(0.0..1.0).contains(&value) {
        return Err(format!("{s} is outside [0, 1)"));
    }
    Ok(value)
}

/// An exact fraction with its floating value alongside.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fraction {
    pub num: i128,
    pub den: i128,
    pub value: f64,
}

impl From<&Rational> for Fraction {
    fn from(r: &Rational) -> Self {
        Fraction {
            num: *r.numer(),
            den: *r.denom(),
            value: influence_core::to_f64(r),
        }
    }
}
