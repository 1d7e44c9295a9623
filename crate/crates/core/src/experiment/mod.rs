//! Configuration, named suites and their CSV/SVG artifacts.

pub mod commands;
mod output;
mod suites;

pub use output::{render_svg, write_csv};
pub use suites::SUITES;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{catalog_density, Atom, Density, RadialMeasure, CATALOG_DENSITIES};
use crate::weights::WeightSpec;

/// Exit status of a suite run.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_CONTRACT: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_UNRESOLVED: i32 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: String,
    pub seed: u64,
    /// Quadrature depth `J`; each suite has its own default.
    pub depth: Option<u32>,
    pub j0: u32,
    pub p: f64,
    /// Sample count override for sampling suites.
    pub samples: Option<usize>,
    pub gamma: f64,
    pub nu: String,
    pub omega: String,
    pub weight: WeightSpec,
    pub out: PathBuf,
    pub timestamp: bool,
    pub svg: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            suite: "kernel-identities".into(),
            seed: 7,
            depth: None,
            j0: 0,
            p: 2.0,
            samples: None,
            gamma: 1.0,
            nu: "atom:1".into(),
            omega: "lebesgue".into(),
            weight: WeightSpec::Power { eta: 0.5 },
            out: PathBuf::from("out"),
            timestamp: true,
            svg: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !SUITES.contains(&self.suite.as_str()) {
            return Err(Error::UnknownSuite(self.suite.clone()));
        }
        if let Some(j) = self.depth {
            if !(1..=crate::disk::MAX_DEPTH).contains(&j) {
                return Err(Error::Config(format!("depth {j} outside 1..=12")));
            }
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::Config(format!("p = {} outside (1, inf)", self.p)));
        }
        if !(self.gamma >= 1.0) {
            return Err(Error::Config(format!("gamma = {} < 1", self.gamma)));
        }
        resolve_measure(&self.nu)?;
        resolve_measure(&self.omega)?;
        Ok(())
    }

    pub fn depth_or(&self, default: u32) -> u32 {
        self.depth.unwrap_or(default)
    }

    pub fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }
}

/// Parses `lebesgue`, `standard:α`, `atom:x`, `atom:x@mass`, catalog density
/// names, sums of these joined by `+` (at most one density), and
/// `from-nu:<measure>`.
pub fn resolve_measure(reference: &str) -> Result<RadialMeasure> {
    let r = reference.trim();
    if let Some(inner) = r.strip_prefix("from-nu:") {
        return Ok(RadialMeasure::from_nu(resolve_measure(inner)?));
    }
    let unresolved = || Error::UnresolvedReference(reference.to_string());
    let mut density = None;
    let mut atoms = Vec::new();
    for part in r.split('+').map(str::trim) {
        if let Some(spec) = part.strip_prefix("atom:") {
            let (loc, mass) = match spec.split_once('@') {
                Some((l, m)) => (l, m),
                None => (spec, "1"),
            };
            let location: f64 = loc.parse().map_err(|_| unresolved())?;
            let mass: f64 = mass.parse().map_err(|_| unresolved())?;
            atoms.push(Atom { location, mass });
            continue;
        }
        let d = if part == "lebesgue" {
            Density::Constant(1.0)
        } else if let Some(a) = part.strip_prefix("standard:") {
            let alpha: f64 = a.parse().map_err(|_| unresolved())?;
            if alpha <= -1.0 {
                return Err(unresolved());
            }
            Density::StandardPower { alpha }
        } else {
            catalog_density(part).ok_or_else(unresolved)?
        };
        if density.replace(d).is_some() {
            return Err(unresolved());
        }
    }
    match (density, atoms.len()) {
        (Some(Density::Constant(_)), 0) => Ok(RadialMeasure::lebesgue()),
        (Some(Density::StandardPower { alpha }), 0) => Ok(RadialMeasure::standard(alpha)),
        (d, _) => RadialMeasure::new(r, d.unwrap_or(Density::Zero), atoms)
            .map_err(|_| unresolved()),
    }
}

/// One measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub case: String,
    pub quantity: String,
    pub depth: Option<u32>,
    pub value: f64,
    /// The contract bound, when the row is checked.
    pub bound: Option<f64>,
    /// `<=`, `>=`, `==` or `info`.
    pub relation: &'static str,
    pub pass: bool,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub rows: Vec<Row>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// Accumulates rows; each row's runtime is the time since the previous one.
pub(crate) struct Recorder {
    rows: Vec<Row>,
    last: Instant,
}

impl Recorder {
    pub(crate) fn new() -> Self {
        Self {
            rows: Vec::new(),
            last: Instant::now(),
        }
    }

    fn push(&mut self, case: &str, quantity: &str, depth: Option<u32>, value: f64, bound: Option<f64>, relation: &'static str, pass: bool) {
        let now = Instant::now();
        self.rows.push(Row {
            case: case.to_string(),
            quantity: quantity.to_string(),
            depth,
            value,
            bound,
            relation,
            pass,
            runtime_ms: now.duration_since(self.last).as_secs_f64() * 1e3,
        });
        self.last = now;
    }

    pub(crate) fn info(&mut self, case: &str, quantity: &str, depth: Option<u32>, value: f64) {
        self.push(case, quantity, depth, value, None, "info", true);
    }

    pub(crate) fn at_most(&mut self, case: &str, quantity: &str, depth: Option<u32>, value: f64, bound: f64) {
        self.push(case, quantity, depth, value, Some(bound), "<=", value <= bound);
    }

    pub(crate) fn at_least(&mut self, case: &str, quantity: &str, depth: Option<u32>, value: f64, bound: f64) {
        self.push(case, quantity, depth, value, Some(bound), ">=", value >= bound);
    }

    pub(crate) fn check(&mut self, case: &str, quantity: &str, depth: Option<u32>, value: f64, pass: bool) {
        self.push(case, quantity, depth, value, None, "==", pass);
    }

    pub(crate) fn finish(self, suite: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            rows: self.rows,
        }
    }
}

/// Runs the suite named in `config` and returns its rows.
pub fn run_suite(config: &ExperimentConfig) -> Result<SuiteReport> {
    config.validate()?;
    suites::run(config)
}

/// Runs the suite and writes its artifacts.
pub fn run_and_write(config: &ExperimentConfig) -> Result<(SuiteReport, PathBuf)> {
    let report = run_suite(config)?;
    let path = write_artifacts(config, &report)?;
    Ok((report, path))
}

/// Writes `<out>/<suite>.csv`, and `.svg` if requested; returns the CSV path.
pub fn write_artifacts(config: &ExperimentConfig, report: &SuiteReport) -> Result<PathBuf> {
    std::fs::create_dir_all(&config.out)?;
    let path = config.out.join(format!("{}.csv", report.suite));
    std::fs::write(&path, write_csv(report, config.timestamp)?)?;
    if config.svg {
        std::fs::write(
            config.out.join(format!("{}.svg", report.suite)),
            render_svg(report),
        )?;
    }
    Ok(path)
}

/// Maps errors to exit codes; unknown suites and other configuration
/// problems share `EXIT_CONFIG`.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::UnresolvedReference(_) => EXIT_UNRESOLVED,
        _ => EXIT_CONFIG,
    }
}

/// Built-in measures, kernels, weights and suites.
pub fn list_catalog() -> String {
    let mut s = String::new();
    s.push_str("measures:\n");
    for m in ["lebesgue", "standard:<alpha>", "atom:<x>[@mass]", "<a>+<b>", "from-nu:<measure>"] {
        s.push_str(&format!("  {m}\n"));
    }
    for m in CATALOG_DENSITIES {
        s.push_str(&format!("  {m}\n"));
    }
    s.push_str("kernels:\n");
    s.push_str("  standard(alpha): gamma = alpha + 2, nu = atom:1, omega = standard:alpha\n");
    s.push_str("  example-1: gamma = 1, nu = lebesgue, omega = from-nu:lebesgue\n");
    s.push_str("  example-3: gamma = 1, kernel coefficients sum_{j <= n} (1 + H_j)\n");
    s.push_str("weights:\n");
    for w in ["power(eta)", "log-power(eta, kappa)", "bump(eta, center, width, height)", "table(values)"] {
        s.push_str(&format!("  {w}\n"));
    }
    s.push_str("suites:\n");
    for name in SUITES {
        s.push_str(&format!("  {name}\n"));
    }
    s
}
