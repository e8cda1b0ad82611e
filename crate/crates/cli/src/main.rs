use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use influence_core::qsim::GapMode;
use influence_lab::input::{load, parse_probability};
use influence_lab::{
    analyze, cmd_analyze, cmd_approx_degree, cmd_simulate, cmd_verify, exit, thread_count, AlgorithmChoice,
    AnalyzeOptions, CliError, SimulateOptions, Suite, VerifyOptions, THREADS_ENV,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "influence-lab", version, about = "Influence, sensitivity and quantum query bounds for Boolean functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FunctionArgs {
    /// Function as an expression, e.g. "maj(x0,x1,x2) ^ x3" or "iterate(paper_f, 2)".
    #[arg(long, conflicts_with = "table")]
    expr: Option<String>,
    /// Truth-table JSON file.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum GapArg {
    All,
    Neighbors,
}

#[derive(Subcommand)]
enum Command {
    /// Measures, spectrum and lower bounds for one function.
    Analyze {
        #[command(flatten)]
        function: FunctionArgs,
        /// Error probability, decimal or fraction.
        #[arg(long, default_value = "1/3", value_parser = parse_probability)]
        eps: f64,
        /// Largest odd k scanned by the generalized bound.
        #[arg(long, default_value_t = influence_core::bounds::DEFAULT_K_MAX)]
        kmax: u32,
        /// Skip block sensitivity.
        #[arg(long)]
        no_bs: bool,
        /// Stop the block-sensitivity search after this many milliseconds.
        #[arg(long)]
        bs_budget_ms: Option<u64>,
        /// Also solve for the approximate degree at eps (n <= 12).
        #[arg(long)]
        approx_degree: bool,
        /// Record per-stage wall time in timing_ms.
        #[arg(long)]
        timing: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Smallest degree of a polynomial within eps of the function everywhere.
    ApproxDegree {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, default_value = "1/3", value_parser = parse_probability)]
        eps: f64,
        /// Scan degrees 0..=D in order instead of bisecting.
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Run a built-in query algorithm in the Fourier simulator.
    Simulate {
        #[arg(long, value_enum)]
        algorithm: AlgorithmChoice,
        /// Number of oracle bits.
        #[arg(long)]
        n: Option<usize>,
        /// Grover iterations before the verification query.
        #[arg(long, default_value_t = 1)]
        iterations: usize,
        /// Odd k values for the E statistic.
        #[arg(long, value_delimiter = ',', default_value = "1,3,5")]
        k: Vec<u32>,
        /// Pairs compared by the gap check.
        #[arg(long, value_enum)]
        gap: Option<GapArg>,
        #[command(flatten)]
        function: FunctionArgs,
    },
    /// Cross-check fast computations against brute-force oracles.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random functions per variable count.
        #[arg(long, default_value_t = 8)]
        samples: usize,
        /// Deliberately corrupt one fast result to exercise failure reporting.
        #[arg(long)]
        inject_fault: bool,
        #[command(flatten)]
        function: FunctionArgs,
    },
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<(), CliError> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(influence_core::Error::Io(e).into()),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(influence_core::Error::from)?;
    text.push('\n');
    emit(&text)
}

fn optional_function(f: &FunctionArgs) -> Result<Option<(influence_core::TruthTable, influence_lab::input::InputInfo)>, CliError> {
    if f.expr.is_none() && f.table.is_none() {
        return Ok(None);
    }
    load(f.expr.as_deref(), f.table.as_deref()).map(Some)
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Analyze { function, eps, kmax, no_bs, bs_budget_ms, approx_degree, timing, format } => {
            let (t, info) = load(function.expr.as_deref(), function.table.as_deref())?;
            let opts = AnalyzeOptions {
                eps,
                k_max: kmax,
                block_sensitivity: !no_bs,
                bs_budget: bs_budget_ms.map(Duration::from_millis),
                approx_degree,
                timing,
            };
            let report = cmd_analyze(&t, info, &opts)?;
            match format {
                Format::Json => print_json(&report),
                Format::Text => emit(&analyze::render_text(&report)),
            }
        }
        Command::ApproxDegree { function, eps, max_degree } => {
            let (t, info) = load(function.expr.as_deref(), function.table.as_deref())?;
            print_json(&cmd_approx_degree(&t, info, eps, max_degree)?)
        }
        Command::Simulate { algorithm, n, iterations, k, gap, function } => {
            let opts = SimulateOptions {
                algorithm,
                n,
                iterations,
                ks: k,
                gap: gap.map(|g| match g {
                    GapArg::All => GapMode::AllPairs,
                    GapArg::Neighbors => GapMode::Neighbors,
                }),
            };
            print_json(&cmd_simulate(&opts, optional_function(&function)?)?)
        }
        Command::Verify { suite, n_max, seed, samples, inject_fault, function } => {
            let target = optional_function(&function)?.map(|(t, _)| t);
            let report = cmd_verify(&VerifyOptions { suite, n_max, seed, samples, target, inject_fault })?;
            emit(&report.render())?;
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::VerificationFailed)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            return ExitCode::from(code as u8);
        }
    };
    let result = thread_count(std::env::var(THREADS_ENV).ok().as_deref()).and_then(|threads| {
        if let Some(n) = threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }
        execute(cli.command)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
