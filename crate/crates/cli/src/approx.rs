use influence_core::approxdeg::{approx_degree, eprime_statistic, exact_degree, scan_degrees, MinimaxFit, PolyTerm};
use influence_core::TruthTable;
use serde::Serialize;

use crate::input::InputInfo;
use crate::{CliError, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanEntry {
    pub degree: usize,
    pub t_star: f64,
    /// Error of the returned polynomial, re-measured on every input.
    pub achieved: f64,
    pub pivots: usize,
}

impl From<&MinimaxFit> for ScanEntry {
    fn from(f: &MinimaxFit) -> Self {
        ScanEntry {
            degree: f.degree,
            t_star: f.t_star,
            achieved: f.achieved,
            pivots: f.pivots,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxDegreeReport {
    pub schema: u32,
    pub input: InputInfo,
    pub eps: f64,
    pub exact_degree: usize,
    /// `bisection` over `0..=exact_degree`, or `scan` when a maximum degree is given.
    pub method: &'static str,
    /// `None` when no degree up to the scan limit reaches `eps`.
    pub degree: Option<usize>,
    pub scans: Vec<ScanEntry>,
    /// Character-basis coefficients of the optimal polynomial at `degree`.
    pub polynomial: Option<Vec<PolyTerm>>,
    /// Average squared change of that polynomial under one coordinate flip.
    pub eprime: Option<f64>,
}

pub fn cmd_approx_degree(
    t: &TruthTable,
    input: InputInfo,
    eps: f64,
    max_degree: Option<usize>,
) -> Result<ApproxDegreeReport, CliError> {
    if eps >= 0.5 {
        return Err(CliError::Usage(format!("eps must be below 1/2, got {eps}")));
    }
    let (method, degree, fits) = match max_degree {
        Some(limit) => {
            let (d, fits) = scan_degrees(t, eps, limit)?;
            ("scan", d, fits)
        }
        None => {
            let result = approx_degree(t, eps)?;
            ("bisection", Some(result.degree), result.scans)
        }
    };
    let best = degree.and_then(|d| fits.iter().find(|f| f.degree == d));
    let eprime = best.map(|f| eprime_statistic(&f.poly)).transpose()?;
    Ok(ApproxDegreeReport {
        schema: SCHEMA_VERSION,
        input,
        eps,
        exact_degree: exact_degree(t),
        method,
        degree,
        scans: fits.iter().map(ScanEntry::from).collect(),
        polynomial: best.map(|f| f.poly.export()),
        eprime,
    })
}
