//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{ExperimentConfig, ProblemKind, ProblemSpec, SplitKind};
use super::run::{run_config, write_csv};
use crate::error::{Error, Result};
use crate::methods::{catalog, consistency_residuals, third_order_residuals, CATALOG_NAMES};
use crate::solver::{
    diagonalization_oracle, excited_states, itp_fixed, itp_variable, Driver, VariableSettings,
};

/// Consistency residuals above this fail validation.
const CONSISTENCY_TOL: f64 = 1e-15;
/// Third-order residuals above this fail validation for methods of order at least four.
const THIRD_ORDER_TOL: f64 = 1e-14;

#[derive(Parser, Debug)]
#[command(name = "itp", version, about = "Imaginary time propagation with splitting methods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the method catalog.
    ListMethods,
    /// Check consistency, third-order conditions and positivity of every method.
    ValidateMethods,
    /// Find the ground state (or several low states) of one problem.
    Solve(SolveArgs),
    /// Run an experiment file and write CSV.
    Bench(BenchArgs),
    /// Print reference eigenvalues from dense diagonalization.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
struct ProblemArgs {
    /// poschl-teller or perturbed-ho
    #[arg(long, default_value = "poschl-teller")]
    problem: String,
    /// lambda (lambda + 1); defaults to 10 for poschl-teller and 0.4 for perturbed-ho
    #[arg(long)]
    lambda2: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// full or near-integrable; defaults to the problem's natural split
    #[arg(long)]
    split: Option<String>,
    #[arg(long = "N", default_value_t = 128)]
    n: usize,
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, default_value_t = 10.0)]
    b: f64,
}

impl ProblemArgs {
    fn spec(&self) -> Result<ProblemSpec> {
        let kind: ProblemKind = self.problem.parse()?;
        let mut spec = ProblemSpec::new(kind);
        if let Some(l) = self.lambda2 {
            spec.lambda2 = l;
        }
        if let Some(s) = &self.split {
            spec.split = s.parse::<SplitKind>()?;
        }
        spec.omega = self.omega;
        spec.n = self.n;
        spec.a = self.a;
        spec.b = self.b;
        Ok(spec)
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value = "v864_7")]
    method: String,
    /// Convergence tolerance of the variable-step controller.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 10.0)]
    h0: f64,
    /// Use fixed steps of this size instead of the variable controller.
    #[arg(long)]
    h: Option<f64>,
    /// Final time for fixed steps.
    #[arg(long = "T", default_value_t = 100.0)]
    t_final: f64,
    /// Number of lowest states to compute.
    #[arg(long, default_value_t = 1)]
    states: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the file's `out` key; `-` writes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock seconds (makes the output non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = 5)]
    count: usize,
}

/// Parse `argv` (including the program name) and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock())
}

/// As [`run`], writing normal output to `out`.
pub fn run_with<I, T, W>(argv: I, out: &mut W) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::ListMethods => list_methods(out),
        Command::ValidateMethods => validate_methods(out),
        Command::Solve(args) => solve(&args, out),
        Command::Bench(args) => bench(&args, out),
        Command::Oracle(args) => oracle(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::UnknownMethod(_) => 2,
                _ => 1,
            }
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Config(format!("output: {e}"))
}

fn list_methods(out: &mut impl Write) -> Result<i32> {
    writeln!(out, "{:<18} {:<8} {:<10} {:>6} {:>10} {:>8} {:>9}", "name", "ordering", "order", "stages", "units/step", "complex", "modified")
        .map_err(io_err)?;
    for name in CATALOG_NAMES {
        let m = catalog(name)?;
        writeln!(
            out,
            "{:<18} {:<8} {:<10} {:>6} {:>10} {:>8} {:>9}",
            m.name(),
            m.ordering().to_string(),
            m.claimed_order().to_string(),
            m.stages(),
            m.units_per_step(),
            m.is_complex(),
            m.is_modified()
        )
        .map_err(io_err)?;
    }
    Ok(0)
}

fn validate_methods(out: &mut impl Write) -> Result<i32> {
    let mut failures = 0;
    for name in CATALOG_NAMES {
        let m = catalog(name)?;
        let (ra, rb) = consistency_residuals(&m);
        let consistent = ra.norm() < CONSISTENCY_TOL && rb.norm() < CONSISTENCY_TOL;
        let (r1, r2) = third_order_residuals(&m);
        let third = if m.claimed_order().classical() >= 4 {
            Some(r1.norm() < THIRD_ORDER_TOL && r2.norm() < THIRD_ORDER_TOL)
        } else {
            None
        };
        let min_re = m.expand().stages.iter().map(|s| s.weight.re).fold(f64::INFINITY, f64::min);
        let positive = min_re > 0.0;
        let ok = consistent && third.unwrap_or(true) && positive;
        if !ok {
            failures += 1;
        }
        writeln!(
            out,
            "{:<18} {} consistency {:.1e}/{:.1e}  third-order {:.1e}/{:.1e}{}  min Re {:.4}",
            m.name(),
            if ok { "ok  " } else { "FAIL" },
            ra.norm(),
            rb.norm(),
            r1.norm(),
            r2.norm(),
            if third.is_none() { " (n/a)" } else { "" },
            min_re
        )
        .map_err(io_err)?;
    }
    writeln!(out, "{} of {} methods failed", failures, CATALOG_NAMES.len()).map_err(io_err)?;
    Ok(if failures == 0 { 0 } else { 1 })
}

fn solve(args: &SolveArgs, out: &mut impl Write) -> Result<i32> {
    let problem = args.problem.spec()?.build()?;
    let method = catalog(&args.method)?;
    let reference = diagonalization_oracle(&problem, args.states.max(1))?;
    if args.states > 1 {
        let driver = match args.h {
            Some(h) => Driver::Fixed { h, t_final: args.t_final },
            None => Driver::Variable(VariableSettings::new(args.tol, args.h0)),
        };
        let r = excited_states(&method, &problem, args.states, driver, args.seed)?;
        for (k, (got, want)) in r.pairs.iter().zip(&reference).enumerate() {
            writeln!(out, "E{k} = {:.15}  oracle {:.15}  diff {:.3e}", got.energy, want.energy, got.energy - want.energy)
                .map_err(io_err)?;
        }
        writeln!(out, "steps {}  units {}  terminated by {:?}", r.steps, r.ledger.units(), r.terminated_by)
            .map_err(io_err)?;
        return Ok(0);
    }
    let r = match args.h {
        Some(h) => itp_fixed(&method, &problem, h, args.t_final, args.seed)?,
        None => itp_variable(&method, &problem, args.tol, args.h0, args.seed)?,
    };
    let last = r.last();
    writeln!(out, "E0 = {:.15}", r.e0_estimate).map_err(io_err)?;
    writeln!(out, "oracle E0 = {:.15}  diff {:.3e}", reference[0].energy, r.e0_estimate - reference[0].energy)
        .map_err(io_err)?;
    writeln!(
        out,
        "E2 = {:.15}  dE {:.3e}  final h {}  steps {}  units {}  terminated by {:?}",
        last.estimates.e2,
        last.estimates.de,
        last.h,
        r.history.len(),
        r.ledger.units(),
        r.terminated_by
    )
    .map_err(io_err)?;
    Ok(0)
}

fn bench(args: &BenchArgs, out: &mut impl Write) -> Result<i32> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let summary = run_config(&cfg, args.timing)?;
    let target = args.out.clone().or_else(|| cfg.out.clone());
    match target {
        Some(p) if p.as_os_str() != "-" => {
            let f = std::fs::File::create(&p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            write_csv(&summary, std::io::BufWriter::new(f))?;
            eprintln!("wrote {} rows to {}", summary.records.len(), p.display());
        }
        _ => write_csv(&summary, &mut *out)?,
    }
    eprintln!("{} failed runs", summary.failures);
    Ok(0)
}

fn oracle(args: &OracleArgs, out: &mut impl Write) -> Result<i32> {
    let problem = args.problem.spec()?.build()?;
    for (k, pair) in diagonalization_oracle(&problem, args.count)?.iter().enumerate() {
        writeln!(out, "E{k} = {:.15}", pair.energy).map_err(io_err)?;
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(args: &[&str]) -> i32 {
        output(args).0
    }

    fn output(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = run_with(std::iter::once("itp").chain(args.iter().copied()), &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn exit_codes() {
        let (c, listing) = output(&["list-methods"]);
        assert_eq!(c, 0);
        assert_eq!(listing.lines().count(), 1 + CATALOG_NAMES.len());
        let (c, report) = output(&["validate-methods"]);
        assert_eq!(c, 0, "{report}");
        assert!(report.ends_with("0 of 17 methods failed\n"));
        assert_eq!(code(&["frobnicate"]), 2);
        assert_eq!(code(&["list-methods", "--bogus"]), 2);
        assert_eq!(code(&["solve", "--method", "nope"]), 2);
        let (c, text) = output(&["oracle", "--count", "2", "--N", "64"]);
        assert_eq!(c, 0);
        assert!(text.starts_with("E0 = 1.3507"), "{text}");
    }

    #[test]
    fn bench_writes_csv() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        let csv = dir.path().join("out.csv");
        std::fs::write(&cfg, format!("methods = strang\nh_list = 0.5\nT = 5\nN = 32\nout = {}\n", csv.display())).unwrap();
        assert_eq!(code(&["bench", "--config", cfg.to_str().unwrap()]), 0);
        let text = std::fs::read_to_string(&csv).unwrap();
        assert!(text.starts_with("method,h_or_step,units,error,E1,wall_seconds"));
        assert_eq!(code(&["bench", "--config", dir.path().join("missing.cfg").to_str().unwrap()]), 2);
    }
}
