use clap::ValueEnum;
use influence_core::bounds::{lb_query_general_best, lb_query_main, Bound, DEFAULT_K_MAX};
use influence_core::qsim::{
    deutsch_parity, grover, serial_read, simulate, Algorithm, GapMode, SimulationReport, MAX_ALL_PAIRS_VARS,
};
use influence_core::{wht, Builtin, TruthTable};
use serde::Serialize;

use crate::input::InputInfo;
use crate::{CliError, SCHEMA_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmChoice {
    /// Read every bit into the workspace, then evaluate the function.
    Serial,
    /// Pairwise phase kickback computing parity with n/2 queries.
    Parity,
    /// Grover search plus one verification query, computing OR.
    Grover,
}

#[derive(Clone, Debug)]
pub struct SimulateOptions {
    pub algorithm: AlgorithmChoice,
    pub n: Option<usize>,
    pub iterations: usize,
    pub ks: Vec<u32>,
    /// Defaults to all pairs when `n` allows it, neighbors otherwise.
    pub gap: Option<GapMode>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryBoundCheck {
    pub t_main: Bound,
    pub k_star: u32,
    pub t_general_best: Bound,
    /// `T` equals the smallest integer allowed by the influence bound.
    pub tight: bool,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulateReport {
    pub schema: u32,
    pub target: InputInfo,
    #[serde(flatten)]
    pub simulation: SimulationReport,
    pub query_bounds: QueryBoundCheck,
    /// Grover only: smallest success probability over oracles with exactly one marked index.
    pub single_marked_success: Option<f64>,
}

fn builtin_target(family: Builtin, n: usize) -> Result<(TruthTable, InputInfo), CliError> {
    let t = TruthTable::builtin(family, n)?;
    let info = InputInfo { kind: "builtin", source: format!("{}({n})", family.name()), n };
    Ok((t, info))
}

/// `target` is the function for `serial`; other algorithms fix their own.
pub fn cmd_simulate(opts: &SimulateOptions, target: Option<(TruthTable, InputInfo)>) -> Result<SimulateReport, CliError> {
    let (alg, (t, info)): (Algorithm, _) = match opts.algorithm {
        AlgorithmChoice::Serial => {
            let (t, info) = target.ok_or_else(|| CliError::Usage("serial needs --expr or --table".into()))?;
            if let Some(n) = opts.n.filter(|&n| n != t.n()) {
                return Err(CliError::Usage(format!("--n {n} does not match the function's {} variables", t.n())));
            }
            (serial_read(&t)?, (t, info))
        }
        AlgorithmChoice::Parity | AlgorithmChoice::Grover => {
            if target.is_some() {
                return Err(CliError::Usage("--expr/--table only apply to the serial algorithm".into()));
            }
            let n = opts.n.ok_or_else(|| CliError::Usage("--n is required".into()))?;
            if opts.algorithm == AlgorithmChoice::Parity {
                (deutsch_parity(n)?, builtin_target(Builtin::Parity, n)?)
            } else {
                (grover(n, opts.iterations)?, builtin_target(Builtin::Or, n)?)
            }
        }
    };
    let gap = opts.gap.unwrap_or(if t.n() <= MAX_ALL_PAIRS_VARS {
        GapMode::AllPairs
    } else {
        GapMode::Neighbors
    });
    let simulation = simulate(&alg, &t, &opts.ks, gap)?;

    let spec = wht(&t);
    let eps = simulation.worst_eps.min(1.0 - 1e-12);
    let t_main = lb_query_main(spec.rho(), t.n(), eps)?;
    let (k_star, t_general_best) = lb_query_general_best(&spec, eps, DEFAULT_K_MAX)?;
    let queries = simulation.queries as f64;
    let query_bounds = QueryBoundCheck {
        t_main,
        k_star,
        t_general_best,
        tight: !t_main.vacuous && queries <= (t_main.value - 1e-9).ceil(),
        satisfied: queries >= t_main.value - 1e-9 && queries >= t_general_best.value - 1e-9,
    };
    let single_marked_success = (opts.algorithm == AlgorithmChoice::Grover).then(|| {
        (0..t.n())
            .map(|i| 1.0 - simulation.per_oracle_error[1 << i])
            .fold(f64::INFINITY, f64::min)
    });
    Ok(SimulateReport {
        schema: SCHEMA_VERSION,
        target: info,
        simulation,
        query_bounds,
        single_marked_success,
    })
}
