use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use influence_core::approxdeg;
use influence_core::bounds::BoundReport;
use influence_core::fourier::CoefficientEntry;
use influence_core::measures::{BlockMode, MeasureReport, MAX_EXACT_BS_VARS};
use influence_core::{wht, TruthTable};
use serde::Serialize;

use crate::input::{Fraction, InputInfo};
use crate::{CliError, SCHEMA_VERSION};

/// Number of largest coefficients listed in the spectrum summary.
pub const TOP_COEFFICIENTS: usize = 16;

#[derive(Clone, Debug)]
pub struct AnalyzeOptions {
    pub eps: f64,
    pub k_max: u32,
    pub block_sensitivity: bool,
    pub bs_budget: Option<Duration>,
    pub approx_degree: bool,
    /// Fill `timing_ms`; off by default so reports are reproducible byte for byte.
    pub timing: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            eps: 1.0 / 3.0,
            k_max: influence_core::bounds::DEFAULT_K_MAX,
            block_sensitivity: true,
            bs_budget: None,
            approx_degree: false,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockSummary {
    pub value: u32,
    pub exact: bool,
    pub input: usize,
    pub blocks: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasuresSection {
    pub influences: Vec<Fraction>,
    pub rho: Fraction,
    pub avg_sensitivity: Fraction,
    pub max_sensitivity: u32,
    pub max_sensitivity_input: usize,
    pub block_sensitivity: Option<BlockSummary>,
    /// `computed`, `skipped_by_flag` or `skipped_above_16_vars`.
    pub block_sensitivity_status: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumSection {
    pub degree: usize,
    pub support_size: usize,
    /// Squared Fourier weight at each level `|s| = 0..n`.
    pub level_weights: Vec<f64>,
    /// Largest coefficients by magnitude, ties by mask.
    pub top: Vec<CoefficientEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxSection {
    pub eps: f64,
    pub degree: usize,
    pub t_star: f64,
    pub exact_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub input: InputInfo,
    pub measures: MeasuresSection,
    pub spectrum: SpectrumSection,
    pub bounds: BoundReport,
    pub approx_degree: Option<ApproxSection>,
    pub timing_ms: BTreeMap<&'static str, u64>,
}

struct Timer {
    enabled: bool,
    stages: BTreeMap<&'static str, u64>,
    start: Instant,
}

impl Timer {
    fn new(enabled: bool) -> Self {
        Timer { enabled, stages: BTreeMap::new(), start: Instant::now() }
    }

    fn lap(&mut self, stage: &'static str) {
        if self.enabled {
            self.stages.insert(stage, self.start.elapsed().as_millis() as u64);
        }
        self.start = Instant::now();
    }
}

pub fn cmd_analyze(t: &TruthTable, input: InputInfo, opts: &AnalyzeOptions) -> Result<AnalysisReport, CliError> {
    let mut timer = Timer::new(opts.timing);
    let n = t.n();
    let spec = wht(t);
    timer.lap("spectrum");

    let (mode, status) = if !opts.block_sensitivity {
        (BlockMode::Skip, "skipped_by_flag")
    } else if n > MAX_EXACT_BS_VARS {
        (BlockMode::Skip, "skipped_above_16_vars")
    } else {
        (BlockMode::Exact { budget: opts.bs_budget }, "computed")
    };
    let m = MeasureReport::compute(t, mode)?;
    timer.lap("measures");

    let approx = if opts.approx_degree {
        if opts.eps >= 0.5 {
            return Err(CliError::Usage("--approx-degree needs eps < 1/2".into()));
        }
        let eps = opts.eps;
        let result = approxdeg::approx_degree(t, eps)?;
        Some(ApproxSection {
            eps,
            degree: result.degree,
            t_star: result.fit().t_star,
            exact_degree: spec.degree(),
        })
    } else {
        None
    };
    if opts.approx_degree {
        timer.lap("approx_degree");
    }

    let bs = m.block.as_ref().map(|b| b.value);
    let bounds = BoundReport::new(&spec, opts.eps, opts.k_max, bs, approx.as_ref().map(|a| a.degree))?;
    timer.lap("bounds");

    let scale = (1u128 << (2 * n)) as f64;
    let mut top: Vec<usize> = spec.support().collect();
    top.sort_by_key(|&s| (std::cmp::Reverse(spec.sum(s).unsigned_abs()), s));
    top.truncate(TOP_COEFFICIENTS);
    let exported = spec.export();
    let top = top
        .into_iter()
        .map(|s| exported.iter().find(|e| e.s == s).cloned().expect("support entry"))
        .collect();

    Ok(AnalysisReport {
        schema: SCHEMA_VERSION,
        input,
        measures: MeasuresSection {
            influences: m.influences.iter().map(Fraction::from).collect(),
            rho: Fraction::from(&m.rho),
            avg_sensitivity: Fraction::from(&m.avg_sensitivity),
            max_sensitivity: m.max_sensitivity,
            max_sensitivity_input: m.max_sensitivity_input,
            block_sensitivity: m.block.map(|b| BlockSummary {
                value: b.value,
                exact: b.exact,
                input: b.input,
                blocks: b.blocks,
            }),
            block_sensitivity_status: status,
        },
        spectrum: SpectrumSection {
            degree: spec.degree(),
            support_size: spec.support().count(),
            level_weights: spec.level_weights().iter().map(|&w| w as f64 / scale).collect(),
            top,
        },
        bounds,
        approx_degree: approx,
        timing_ms: timer.stages,
    })
}

fn fmt_mask(s: usize, n: usize) -> String {
    if s == 0 {
        return "{}".into();
    }
    let vars: Vec<String> = (0..n).filter(|i| s >> i & 1 == 1).map(|i| format!("x{i}")).collect();
    format!("{{{}}}", vars.join(","))
}

pub fn render_text(r: &AnalysisReport) -> String {
    let n = r.input.n;
    let mut out = String::new();
    let m = &r.measures;
    let _ = writeln!(out, "function      {} ({}), n = {n}", r.input.source, r.input.kind);
    let _ = writeln!(out, "rho           {}/{} = {:.6}", m.rho.num, m.rho.den, m.rho.value);
    let _ = writeln!(
        out,
        "avg sens.     {}/{} = {:.6}",
        m.avg_sensitivity.num, m.avg_sensitivity.den, m.avg_sensitivity.value
    );
    let _ = writeln!(out, "sensitivity   {} at x = {:#b}", m.max_sensitivity, m.max_sensitivity_input);
    match &m.block_sensitivity {
        Some(b) => {
            let blocks: Vec<String> = b.blocks.iter().map(|&s| fmt_mask(s as usize, n)).collect();
            let _ = writeln!(
                out,
                "block sens.   {}{} at x = {:#b}: {}",
                b.value,
                if b.exact { "" } else { " (lower bound, budget exceeded)" },
                b.input,
                blocks.join(" ")
            );
        }
        None => {
            let _ = writeln!(out, "block sens.   {}", m.block_sensitivity_status);
        }
    }
    let _ = writeln!(out, "degree        {}", r.spectrum.degree);
    let _ = writeln!(out, "support       {} coefficients", r.spectrum.support_size);
    for e in &r.spectrum.top {
        let _ = writeln!(out, "  f^{:<20} {}/{}", fmt_mask(e.s, n), e.coeff_num, e.coeff_den);
    }
    let b = &r.bounds;
    let _ = writeln!(out, "bounds at eps = {:.6}", b.eps);
    let flag = |vacuous: bool| if vacuous { " (vacuous)" } else { "" };
    let _ = writeln!(out, "  T_main      {:.6}{}", b.t_main.value, flag(b.t_main.vacuous));
    let _ = writeln!(
        out,
        "  T_general   {:.6}{} at k = {}",
        b.t_general_best.value,
        flag(b.t_general_best.vacuous),
        b.k_star
    );
    if let Some(v) = b.t_bs {
        let _ = writeln!(out, "  T_bs        {v:.6}");
    }
    if let Some(v) = b.t_deg {
        let _ = writeln!(out, "  T_deg       {v:.6}");
    }
    if let Some(d) = &b.d_influence {
        let _ = writeln!(out, "  d_influence {:.6}{}", d.value, flag(d.vacuous));
    }
    if let Some(v) = b.d_bs {
        let _ = writeln!(out, "  d_bs        {v:.6}");
    }
    if let Some(a) = &r.approx_degree {
        let _ = writeln!(out, "approx degree {} at eps = {:.6} (t* = {:.6})", a.degree, a.eps, a.t_star);
    }
    for (stage, ms) in &r.timing_ms {
        let _ = writeln!(out, "time {stage:<14} {ms} ms");
    }
    out
}
