//! Batch execution of experiment configs.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, Mode};
use crate::error::{Error, Result};
use crate::grid::WaveFunction;
use crate::methods::catalog;
use crate::solver::{
    diagonalization_oracle, itp_fixed_from, itp_variable_from, random_initial, RunOptions, VariableSettings,
};

pub const CSV_HEADER: [&str; 6] = ["method", "h_or_step", "units", "error", "E1", "wall_seconds"];

/// One CSV row: a fixed-step run, or one step of a variable-step trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub method: String,
    /// Step size in fixed mode, step index in variable mode.
    pub h_or_step: f64,
    pub units: u64,
    pub error: f64,
    pub e1: f64,
    pub wall_seconds: f64,
    /// Set when the run could not be completed.
    pub failure: Option<String>,
}

impl RunRecord {
    fn failed(method: &str, h_or_step: f64, why: String) -> Self {
        Self { method: method.into(), h_or_step, units: 0, error: f64::NAN, e1: f64::NAN, wall_seconds: 0.0, failure: Some(why) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub records: Vec<RunRecord>,
    pub failures: usize,
}

impl RunSummary {
    fn new(mut records: Vec<RunRecord>) -> Self {
        records.sort_by(|x, y| x.method.cmp(&y.method).then(x.h_or_step.total_cmp(&y.h_or_step)));
        let failures = records.iter().filter(|r| r.failure.is_some()).count();
        Self { records, failures }
    }
}

struct Prepared {
    problem: crate::potentials::Problem,
    reference: WaveFunction,
    initial: WaveFunction,
}

fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    let problem = cfg.problem.build()?;
    let reference = diagonalization_oracle(&problem, 1)?.remove(0).state;
    let initial = random_initial(problem.grid(), cfg.seed);
    Ok(Prepared { problem, reference, initial })
}

/// Fixed-step runs for every `(method, h)` pair. Wall time is measured only when `timing` is set.
pub fn run_efficiency(cfg: &ExperimentConfig, timing: bool) -> Result<RunSummary> {
    if cfg.mode != Mode::Fixed {
        return Err(Error::Config("run_efficiency needs mode = fixed".into()));
    }
    let p = prepare(cfg)?;
    let methods = cfg.methods.iter().map(|n| catalog(n)).collect::<Result<Vec<_>>>()?;
    let jobs: Vec<_> = methods.iter().flat_map(|m| cfg.h_list.iter().map(move |&h| (m, h))).collect();
    let options = RunOptions { reference: Some(p.reference.clone()), every_step: false };
    let records = jobs
        .par_iter()
        .map(|&(m, h)| {
            let start = Instant::now();
            match itp_fixed_from(m, &p.problem, h, cfg.t_final, p.initial.clone(), &options) {
                Ok(r) => {
                    let last = r.last();
                    RunRecord {
                        method: m.name().into(),
                        h_or_step: h,
                        units: r.ledger.units(),
                        error: last.error.expect("reference supplied"),
                        e1: last.estimates.e1,
                        wall_seconds: if timing { start.elapsed().as_secs_f64() } else { 0.0 },
                        failure: None,
                    }
                }
                Err(e) => {
                    log::warn!("{} at h = {h}: {e}", m.name());
                    RunRecord::failed(m.name(), h, e.to_string())
                }
            }
        })
        .collect();
    Ok(RunSummary::new(records))
}

/// Per-step traces of the variable-step controller, one per method.
pub fn run_variable(cfg: &ExperimentConfig, timing: bool) -> Result<RunSummary> {
    if cfg.mode != Mode::Variable {
        return Err(Error::Config("run_variable needs mode = variable".into()));
    }
    let p = prepare(cfg)?;
    let methods = cfg.methods.iter().map(|n| catalog(n)).collect::<Result<Vec<_>>>()?;
    let settings = VariableSettings::new(cfg.tol, cfg.h0);
    let traces: Vec<Vec<RunRecord>> = methods
        .par_iter()
        .map(|m| {
            let start = Instant::now();
            match itp_variable_from(m, &p.problem, p.initial.clone(), &settings, Some(&p.reference)) {
                Ok(r) => {
                    let wall = if timing { start.elapsed().as_secs_f64() } else { 0.0 };
                    r.history
                        .iter()
                        .map(|e| RunRecord {
                            method: m.name().into(),
                            h_or_step: e.step as f64,
                            units: e.units,
                            error: e.error.expect("reference supplied"),
                            e1: e.estimates.e1,
                            wall_seconds: wall,
                            failure: None,
                        })
                        .collect()
                }
                Err(e) => {
                    log::warn!("{}: {e}", m.name());
                    vec![RunRecord::failed(m.name(), 0.0, e.to_string())]
                }
            }
        })
        .collect();
    Ok(RunSummary::new(traces.into_iter().flatten().collect()))
}

pub fn run_config(cfg: &ExperimentConfig, timing: bool) -> Result<RunSummary> {
    match cfg.mode {
        Mode::Fixed => run_efficiency(cfg, timing),
        Mode::Variable => run_variable(cfg, timing),
    }
}

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn write_csv<W: Write>(summary: &RunSummary, out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in &summary.records {
        let step = if r.h_or_step.fract() == 0.0 && r.h_or_step >= 1.0 && r.failure.is_none() {
            format!("{}", r.h_or_step)
        } else {
            fmt_f64(r.h_or_step)
        };
        w.write_record([
            r.method.clone(),
            step,
            r.units.to_string(),
            fmt_f64(r.error),
            fmt_f64(r.e1),
            format!("{:.6}", r.wall_seconds),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing CSV: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn strang_units() {
        let c = cfg("methods = strang\nh_list = 0.1\nN = 64");
        let s = run_efficiency(&c, false).unwrap();
        assert_eq!(s.records.len(), 1);
        assert_eq!(s.records[0].units, 2 * 1000);
        assert!(s.records[0].error >= 0.0);
        assert_eq!(s.failures, 0);
    }

    #[test]
    fn rows_are_sorted_and_failures_counted() {
        let c = cfg("methods = v82, strang\nh_list = 1, 0.5, 0.3\nT = 3\nN = 32");
        let s = run_efficiency(&c, false).unwrap();
        let keys: Vec<_> = s.records.iter().map(|r| (r.method.as_str(), r.h_or_step)).collect();
        assert_eq!(
            keys,
            vec![("strang", 0.3), ("strang", 0.5), ("strang", 1.0), ("v82", 0.3), ("v82", 0.5), ("v82", 1.0)]
        );
        assert_eq!(s.failures, 0);
        let bad = cfg("methods = strang\nh_list = 0.7, 1\nT = 3\nN = 32");
        let s = run_efficiency(&bad, false).unwrap();
        assert_eq!(s.failures, 1);
        assert!(s.records.iter().any(|r| r.failure.is_none()));
    }

    #[test]
    fn variable_trace_units_increase() {
        let c = cfg("methods = v864_7\nmode = variable\ntol = 1e-6\nN = 64");
        let s = run_variable(&c, false).unwrap();
        assert!(s.records.len() > 1);
        assert!(s.records.windows(2).all(|w| w[1].units > w[0].units));
    }

    #[test]
    fn csv_header_and_bytes() {
        let c = cfg("methods = strang, chin4m\nh_list = 0.5, 0.25\nT = 5\nN = 32");
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&run_efficiency(&c, false).unwrap(), &mut a).unwrap();
        write_csv(&run_efficiency(&c, false).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("method,h_or_step,units,error,E1,wall_seconds\n"));
        assert_eq!(text.lines().count(), 5);
    }
}
