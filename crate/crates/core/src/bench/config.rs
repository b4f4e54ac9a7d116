//! Flat `key = value` experiment files.
//!
//! Blank lines and text after `#` are ignored. Recognized keys:
//! `problem`, `lambda2`, `omega`, `split`, `methods`, `mode`, `h_list`, `tol`,
//! `h0`, `T`, `N`, `a`, `b`, `seed`, `out`. The `ITP_SEED` environment
//! variable overrides `seed`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::make_grid;
use crate::methods::CATALOG_NAMES;
use crate::potentials::{harmonic, perturbed_ho_problem, poschl_teller, poschl_teller_problem, Problem};

pub const SEED_ENV: &str = "ITP_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    PoschlTeller,
    PerturbedHo,
}

impl FromStr for ProblemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poschl-teller" => Ok(Self::PoschlTeller),
            "perturbed-ho" => Ok(Self::PerturbedHo),
            _ => Err(Error::Config(format!("unknown problem '{s}' (poschl-teller, perturbed-ho)"))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PoschlTeller => "poschl-teller",
            Self::PerturbedHo => "perturbed-ho",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitKind {
    Full,
    NearIntegrable,
}

impl FromStr for SplitKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "near-integrable" => Ok(Self::NearIntegrable),
            _ => Err(Error::Config(format!("unknown split '{s}' (full, near-integrable)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Fixed,
    Variable,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(Self::Fixed),
            "variable" => Ok(Self::Variable),
            _ => Err(Error::Config(format!("unknown mode '{s}' (fixed, variable)"))),
        }
    }
}

/// A benchmark Hamiltonian on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    /// `lambda (lambda + 1)`, the strength of the sech-squared well.
    pub lambda2: f64,
    pub omega: f64,
    pub split: SplitKind,
    pub n: usize,
    pub a: f64,
    pub b: f64,
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind) -> Self {
        let (lambda2, split) = match kind {
            ProblemKind::PoschlTeller => (10.0, SplitKind::Full),
            ProblemKind::PerturbedHo => (0.4, SplitKind::NearIntegrable),
        };
        Self { kind, lambda2, omega: 1.0, split, n: 128, a: -10.0, b: 10.0 }
    }

    pub fn build(&self) -> Result<Problem> {
        let grid = make_grid(self.a, self.b, self.n)?;
        match (self.kind, self.split) {
            (ProblemKind::PoschlTeller, SplitKind::Full) => poschl_teller_problem(grid, self.lambda2),
            (ProblemKind::PoschlTeller, SplitKind::NearIntegrable) => {
                Err(Error::Config("poschl-teller has no integrable part; use split = full".into()))
            }
            (ProblemKind::PerturbedHo, SplitKind::NearIntegrable) => {
                perturbed_ho_problem(grid, self.omega, self.lambda2)
            }
            (ProblemKind::PerturbedHo, SplitKind::Full) => {
                let mut v = harmonic(&grid, self.omega)?;
                if self.lambda2 != 0.0 {
                    v = v.sum(&poschl_teller(&grid, self.lambda2)?)?;
                }
                Problem::full(grid, v)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub methods: Vec<String>,
    pub mode: Mode,
    pub h_list: Vec<f64>,
    pub tol: f64,
    pub h0: f64,
    pub t_final: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec::new(ProblemKind::PoschlTeller),
            methods: vec!["strang".into()],
            mode: Mode::Fixed,
            h_list: Vec::new(),
            tol: 1e-10,
            h0: 10.0,
            t_final: 100.0,
            seed: 1,
            out: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("{key}: cannot parse '{value}'")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| parse_num(key, s)).collect()
}

impl ExperimentConfig {
    /// Parse config text; `ITP_SEED` is not consulted here.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if entries.insert(k.clone(), v).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key '{k}'", lineno + 1)));
            }
        }

        let mut cfg = Self::default();
        if let Some(p) = entries.remove("problem") {
            cfg.problem = ProblemSpec::new(p.parse()?);
        }
        for (key, value) in entries {
            let v = value.as_str();
            match key.as_str() {
                "lambda2" => cfg.problem.lambda2 = parse_num(&key, v)?,
                "omega" => cfg.problem.omega = parse_num(&key, v)?,
                "split" => cfg.problem.split = v.parse()?,
                "N" => cfg.problem.n = parse_num(&key, v)?,
                "a" => cfg.problem.a = parse_num(&key, v)?,
                "b" => cfg.problem.b = parse_num(&key, v)?,
                "methods" => {
                    cfg.methods = if v == "all" {
                        CATALOG_NAMES.iter().map(|s| s.to_string()).collect()
                    } else {
                        v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
                    }
                }
                "mode" => cfg.mode = v.parse()?,
                "h_list" => cfg.h_list = parse_list(&key, v)?,
                "tol" => cfg.tol = parse_num(&key, v)?,
                "h0" => cfg.h0 = parse_num(&key, v)?,
                "T" => cfg.t_final = parse_num(&key, v)?,
                "seed" => cfg.seed = parse_num(&key, v)?,
                "out" => cfg.out = Some(PathBuf::from(v)),
                _ => return Err(Error::Config(format!("unknown key '{key}'"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Read a file and apply the `ITP_SEED` override.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        if let Ok(s) = std::env::var(SEED_ENV) {
            cfg.seed = parse_num(SEED_ENV, s.trim())?;
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::Config("methods list is empty".into()));
        }
        for m in &self.methods {
            if !CATALOG_NAMES.contains(&m.as_str()) {
                return Err(Error::UnknownMethod(m.clone()));
            }
        }
        match self.mode {
            Mode::Fixed if self.h_list.is_empty() => Err(Error::Config("fixed mode needs h_list".into())),
            Mode::Fixed if self.h_list.iter().any(|&h| !(h > 0.0)) => {
                Err(Error::Config("h_list entries must be positive".into()))
            }
            Mode::Variable if !(self.tol > 0.0) || !(self.h0 > 0.0) => {
                Err(Error::Config("variable mode needs tol > 0 and h0 > 0".into()))
            }
            _ if !(self.t_final > 0.0) => Err(Error::Config("T must be positive".into())),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = ExperimentConfig::parse("h_list = 0.1").unwrap();
        assert_eq!((c.problem.a, c.problem.b, c.problem.n), (-10.0, 10.0, 128));
        assert_eq!((c.t_final, c.tol, c.h0), (100.0, 1e-10, 10.0));
        assert_eq!(c.problem.kind, ProblemKind::PoschlTeller);
    }

    #[test]
    fn full_file() {
        let text = "# efficiency run\nproblem = perturbed-ho\nlambda2 = 0.4 # small\nmethods = v82, v86_9\n\
                    h_list = 0.5,0.25\nT = 50\nN = 64\nseed = 9\nout = x.csv\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.problem.kind, ProblemKind::PerturbedHo);
        assert_eq!(c.problem.split, SplitKind::NearIntegrable);
        assert_eq!(c.methods, vec!["v82", "v86_9"]);
        assert_eq!(c.h_list, vec![0.5, 0.25]);
        assert_eq!((c.t_final, c.problem.n, c.seed), (50.0, 64, 9));
        assert_eq!(c.out, Some(PathBuf::from("x.csv")));
        c.problem.build().unwrap();
    }

    #[test]
    fn all_methods() {
        let c = ExperimentConfig::parse("methods = all\nmode = variable").unwrap();
        assert_eq!(c.methods.len(), CATALOG_NAMES.len());
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "h_list = 0.1\nbogus = 1",
            "h_list = 0.1\nmethods = nope",
            "mode = fixed",
            "h_list = 0.1\nh_list = 0.2",
            "h_list = 0.1\nN = many",
            "just words",
            "h_list = -1",
        ] {
            assert!(ExperimentConfig::parse(text).is_err(), "{text}");
        }
        let c = ExperimentConfig::parse("h_list = 0.1\nsplit = near-integrable").unwrap();
        assert!(c.problem.build().is_err());
    }
}
