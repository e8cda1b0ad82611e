//! Cross-checks of every fast computation against a brute-force oracle.

use std::fmt::Write as _;

use clap::ValueEnum;
use influence_core::approxdeg::{approx_degree, exact_degree};
use influence_core::bounds::{flip_prob_bruteforce, flip_prob_spectral, BRUTEFORCE_LIMIT};
use influence_core::dsl::{compile, parse, render_minterms};
use influence_core::measures::{
    avg_sensitivity, avg_sensitivity_pointwise, block_sensitivity, influence, max_sensitivity,
};
use influence_core::qsim::{
    deutsch_parity, e_statistic, e_statistic_direct, gap_check, grover, run, run_direct, serial_read, Algorithm,
    GapMode, MAX_SERIAL_READ_VARS,
};
use influence_core::{inverse_wht, to_f64, wht, Builtin, Rational, TruthTable};
use serde::Serialize;

use crate::CliError;

/// Largest `--n-max` accepted.
pub const MAX_VERIFY_VARS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Fourier,
    Measures,
    Bounds,
    Qsim,
    Dsl,
    Approxdeg,
    All,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub n_max: usize,
    pub seed: u64,
    pub samples: usize,
    /// Extra function checked alongside the generated ones.
    pub target: Option<TruthTable>,
    /// Corrupts the fast side of the Fourier and measure checks on the first table.
    pub inject_fault: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub check: &'static str,
    pub cases: usize,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.counterexample.is_none())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.counterexample.is_none() { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status}  {:<10} {:<36} {:>6} cases", c.suite, c.check, c.cases);
            if let Some(ce) = &c.counterexample {
                let _ = writeln!(out, "      counterexample: {ce}");
            }
        }
        let failed = self.checks.iter().filter(|c| c.counterexample.is_some()).count();
        let _ = writeln!(out, "{} checks, {failed} failed", self.checks.len());
        out
    }
}

struct Checker {
    suite: &'static str,
    check: &'static str,
    cases: usize,
    counterexample: Option<String>,
}

impl Checker {
    fn new(suite: &'static str, check: &'static str) -> Self {
        Checker { suite, check, cases: 0, counterexample: None }
    }

    /// Records one case; keeps the first failure.
    fn case(&mut self, outcome: Result<(), String>) {
        self.cases += 1;
        if let Err(msg) = outcome {
            self.counterexample.get_or_insert(msg);
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            suite: self.suite,
            check: self.check,
            cases: self.cases,
            counterexample: self.counterexample,
        }
    }
}

fn describe(t: &TruthTable) -> String {
    t.to_json()
}

fn corpus(opts: &VerifyOptions, max_n: usize) -> Vec<TruthTable> {
    let top = opts.n_max.min(max_n);
    let mut tables: Vec<TruthTable> = opts.target.iter().filter(|t| t.n() <= max_n).cloned().collect();
    for n in 1..=top {
        for family in [Builtin::Parity, Builtin::And, Builtin::Or, Builtin::Majority, Builtin::PaperF] {
            if let Ok(t) = TruthTable::builtin(family, n) {
                tables.push(t);
            }
        }
        for i in 0..opts.samples {
            let seed = opts.seed.wrapping_add((n as u64) << 32).wrapping_add(i as u64);
            tables.push(TruthTable::random(n, seed).expect("n within range"));
        }
    }
    tables
}

fn direct_sums(t: &TruthTable) -> Vec<i64> {
    (0..t.len())
        .map(|s| {
            (0..t.len())
                .map(|x| if (s & x).count_ones() % 2 == 0 { t.sign(x) } else { -t.sign(x) })
                .sum()
        })
        .collect()
}

fn fourier_suite(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut direct = Checker::new("fourier", "wht_matches_direct_sum");
    let mut inverse = Checker::new("fourier", "inverse_wht_round_trip");
    let mut parseval = Checker::new("fourier", "parseval_exact");
    for (idx, t) in corpus(opts, MAX_VERIFY_VARS).iter().enumerate() {
        let mut fast = wht(t).sums().to_vec();
        if opts.inject_fault && idx == 0 {
            let last = fast.len() - 1;
            fast[last] += 2;
        }
        let slow = direct_sums(t);
        direct.case(match (0..slow.len()).find(|&s| fast[s] != slow[s]) {
            Some(s) => Err(format!("{} at s = {s}: fast {} vs direct {}", describe(t), fast[s], slow[s])),
            None => Ok(()),
        });
        let spec = wht(t);
        inverse.case(match inverse_wht(&spec) {
            Ok(back) if &back == t => Ok(()),
            _ => Err(describe(t)),
        });
        parseval.case(if spec.parseval() == Rational::from_integer(1) {
            Ok(())
        } else {
            Err(format!("{}: Σ f̂² = {}", describe(t), spec.parseval()))
        });
    }
    vec![direct.finish(), inverse.finish(), parseval.finish()]
}

/// Maximum number of disjoint sensitive blocks at `x`, by subset DP over all blocks.
fn naive_block_sensitivity_at(t: &TruthTable, x: usize) -> u32 {
    let full = t.len();
    let sensitive: Vec<bool> = (0..full).map(|b| b != 0 && t.bit(x) != t.bit(x ^ b)).collect();
    let mut best = vec![0u32; full];
    for m in 1..full {
        let low = m & m.wrapping_neg();
        let mut value = best[m ^ low];
        let rest = m ^ low;
        let mut sub = rest;
        loop {
            let block = sub | low;
            if sensitive[block] {
                value = value.max(1 + best[m ^ block]);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        best[m] = value;
    }
    best[full - 1]
}

fn measures_suite(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut infl = Checker::new("measures", "influence_matches_spectrum");
    let mut avg = Checker::new("measures", "avg_sensitivity_pointwise");
    let mut max = Checker::new("measures", "max_sensitivity_naive");
    let mut bs = Checker::new("measures", "block_sensitivity_subset_dp");
    for (idx, t) in corpus(opts, MAX_VERIFY_VARS).iter().enumerate() {
        let spec = wht(t);
        infl.case(
            (0..t.n())
                .find(|&i| influence(t, i).ok() != spec.influence_exact(i).ok())
                .map_or(Ok(()), |i| Err(format!("{} at variable {i}", describe(t)))),
        );
        avg.case(if avg_sensitivity(t) == avg_sensitivity_pointwise(t) {
            Ok(())
        } else {
            Err(describe(t))
        });
        let naive_max = (0..t.len())
            .map(|x| (0..t.n()).filter(|i| t.bit(x) != t.bit(x ^ 1 << i)).count() as u32)
            .max()
            .unwrap_or(0);
        max.case(if max_sensitivity(t).0 == naive_max {
            Ok(())
        } else {
            Err(describe(t))
        });
        if t.n() <= 8 {
            let mut fast = block_sensitivity(t, None).map(|b| b.value).unwrap_or(u32::MAX);
            if opts.inject_fault && idx == 0 {
                fast += 1;
            }
            let slow = (0..t.len()).map(|x| naive_block_sensitivity_at(t, x)).max().unwrap_or(0);
            bs.case(if fast == slow {
                Ok(())
            } else {
                Err(format!("{}: fast {fast} vs subset DP {slow}", describe(t)))
            });
        }
    }
    vec![infl.finish(), avg.finish(), max.finish(), bs.finish()]
}

fn bounds_suite(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut flip = Checker::new("bounds", "flip_probability_brute_force");
    for t in corpus(opts, MAX_VERIFY_VARS) {
        let spec = wht(&t);
        for k in [1u32, 3, 5] {
            let work = (t.n() as u128).pow(k) << t.n();
            if work > BRUTEFORCE_LIMIT {
                continue;
            }
            let fast = flip_prob_spectral(&spec, k).expect("odd k");
            let slow = to_f64(&flip_prob_bruteforce(&t, k).expect("within limit"));
            flip.case(if (fast - slow).abs() <= 1e-12 {
                Ok(())
            } else {
                Err(format!("{} k = {k}: spectral {fast} vs enumeration {slow}", describe(&t)))
            });
        }
    }
    vec![flip.finish()]
}

fn qsim_suite(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut agree = Checker::new("qsim", "fourier_matches_direct");
    let mut estat = Checker::new("qsim", "e_statistic_enumeration");
    let mut gap = Checker::new("qsim", "gap_fact_on_exact_runs");
    let mut algs: Vec<(Algorithm, Option<TruthTable>)> = Vec::new();
    for n in 1..=opts.n_max.min(MAX_VERIFY_VARS) {
        if n % 2 == 0 {
            algs.push((deutsch_parity(n).expect("even n"), TruthTable::builtin(Builtin::Parity, n).ok()));
        }
        algs.push((grover(n, 1).expect("small n"), None));
    }
    for t in corpus(opts, MAX_SERIAL_READ_VARS.min(4)) {
        algs.push((serial_read(&t).expect("small n"), Some(t)));
    }
    for (alg, exact_target) in &algs {
        let label = format!("{} on {} bits", alg.name(), alg.layout().n_index());
        let state = match run(alg) {
            Ok(r) => r.state,
            Err(e) => {
                agree.case(Err(format!("{label}: {e}")));
                continue;
            }
        };
        let mismatch = (0..1usize << alg.layout().n_index()).find_map(|x| {
            let direct = run_direct(alg, x).ok()?;
            let fourier = state.reconstruct(x);
            let gap = direct.iter().zip(&fourier).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            (gap > 1e-9).then(|| format!("{label}, oracle {x:#b}: deviation {gap:.3e}"))
        });
        agree.case(mismatch.map_or(Ok(()), Err));
        for k in [1u32, 3] {
            if let Ok(slow) = e_statistic_direct(&state, k) {
                let fast = e_statistic(&state, k).expect("odd k");
                estat.case(if (fast - slow).abs() <= 1e-9 {
                    Ok(())
                } else {
                    Err(format!("{label}, k = {k}: spectral {fast} vs enumeration {slow}"))
                });
            }
        }
        if let Some(t) = exact_target {
            if let Ok(report) = gap_check(&state, t, 0.0, GapMode::Neighbors) {
                gap.case(if report.violations == 0 {
                    Ok(())
                } else {
                    Err(format!("{label}: minimum distance {:?}", report.min_distance))
                });
            }
        }
    }
    vec![agree.finish(), estat.finish(), gap.finish()]
}

fn dsl_suite(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut render = Checker::new("dsl", "minterm_rendering_round_trip");
    let mut print = Checker::new("dsl", "printer_round_trip");
    for t in corpus(opts, 8) {
        let src = render_minterms(&t);
        render.case(match compile(&src) {
            Ok(back) if back == t => Ok(()),
            _ => Err(describe(&t)),
        });
        if t.n() <= 4 {
            let ok = parse(&src)
                .ok()
                .and_then(|ast| parse(&ast.to_string()).ok().map(|again| again.without_spans() == ast.without_spans()));
            print.case(if ok == Some(true) { Ok(()) } else { Err(src) });
        }
    }
    vec![render.finish(), print.finish()]
}

/// Monomial degree through the real Möbius transform.
fn monomial_degree(t: &TruthTable) -> usize {
    let mut a: Vec<i64> = (0..t.len()).map(|x| t.bit(x) as i64).collect();
    for i in 0..t.n() {
        for s in 0..t.len() {
            if s >> i & 1 == 1 {
                a[s] -= a[s ^ (1 << i)];
            }
        }
    }
    (0..t.len()).filter(|&s| a[s] != 0).map(|s| s.count_ones() as usize).max().unwrap_or(0)
}

fn approxdeg_suite(opts: &VerifyOptions) -> Vec<CheckResult> {
    let mut degree = Checker::new("approxdeg", "exact_degree_mobius");
    let mut zero = Checker::new("approxdeg", "zero_error_degree_is_exact");
    for t in corpus(opts, MAX_VERIFY_VARS) {
        let d = exact_degree(&t);
        degree.case(if d == monomial_degree(&t) { Ok(()) } else { Err(describe(&t)) });
        if t.n() <= 7 {
            zero.case(match approx_degree(&t, 0.0) {
                Ok(r) if r.degree == d => Ok(()),
                Ok(r) => Err(format!("{}: LP {} vs exact {d}", describe(&t), r.degree)),
                Err(e) => Err(format!("{}: {e}", describe(&t))),
            });
        }
    }
    vec![degree.finish(), zero.finish()]
}

pub fn cmd_verify(opts: &VerifyOptions) -> Result<VerifyReport, CliError> {
    if opts.n_max == 0 || opts.n_max > MAX_VERIFY_VARS {
        return Err(CliError::Usage(format!("--n-max must be in 1..={MAX_VERIFY_VARS}")));
    }
    let all = opts.suite == Suite::All;
    let mut checks = Vec::new();
    if all || opts.suite == Suite::Fourier {
        checks.extend(fourier_suite(opts));
    }
    if all || opts.suite == Suite::Measures {
        checks.extend(measures_suite(opts));
    }
    if all || opts.suite == Suite::Bounds {
        checks.extend(bounds_suite(opts));
    }
    if all || opts.suite == Suite::Qsim {
        checks.extend(qsim_suite(opts));
    }
    if all || opts.suite == Suite::Dsl {
        checks.extend(dsl_suite(opts));
    }
    if all || opts.suite == Suite::Approxdeg {
        checks.extend(approxdeg_suite(opts));
    }
    Ok(VerifyReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naive_block_sensitivity_examples() {
        let f = TruthTable::builtin(Builtin::PaperF, 4).unwrap();
        assert_eq!((0..16).map(|x| naive_block_sensitivity_at(&f, x)).max(), Some(3));
        let parity = TruthTable::builtin(Builtin::Parity, 5).unwrap();
        assert_eq!(naive_block_sensitivity_at(&parity, 0), 5);
        let and3 = TruthTable::builtin(Builtin::And, 3).unwrap();
        assert_eq!(naive_block_sensitivity_at(&and3, 0), 1);
        assert_eq!(naive_block_sensitivity_at(&and3, 7), 3);
    }

    #[test]
    fn monomial_degree_examples() {
        assert_eq!(monomial_degree(&TruthTable::builtin(Builtin::Or, 3).unwrap()), 3);
        assert_eq!(monomial_degree(&TruthTable::variable(4, 2).unwrap()), 1);
        assert_eq!(monomial_degree(&TruthTable::constant(3, true).unwrap()), 0);
    }
}
