use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bergman_core::experiment::commands::{self, TestFunction};
use bergman_core::experiment::{
    exit_code, list_catalog, run_suite, write_artifacts, ExperimentConfig, SuiteReport,
    EXIT_CONTRACT, EXIT_PASS,
};
use bergman_core::operators::OperatorKind;
use bergman_core::weights::WeightSpec;
use bergman_core::Error;

/// Runs experiment suites and one-off measurements; writes one CSV per run.
#[derive(Parser, Debug)]
#[command(name = "bergman-lab", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    suite: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Quadrature depth J.
    #[arg(long, global = true)]
    depth: Option<u32>,
    #[arg(long, global = true)]
    j0: Option<u32>,
    #[arg(long, global = true)]
    p: Option<f64>,
    /// Sample count for sampling suites.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Weight as TOML, e.g. `{ kind = "power", eta = 0.5 }`.
    #[arg(long, global = true)]
    weight: Option<String>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Omit the timestamp line and runtimes so output is reproducible.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a named suite (the default when no subcommand is given).
    Run,
    /// List built-in measures, kernels, weights and suites.
    Catalog,
    #[command(subcommand)]
    Proj(Proj),
    #[command(subcommand)]
    Weights(Weights),
    #[command(subcommand)]
    Czd(Czd),
    #[command(subcommand)]
    Twoweight(Twoweight),
    #[command(subcommand)]
    Oneweight(Oneweight),
}

#[derive(Subcommand, Debug)]
enum Proj {
    /// Apply the projection to a test function.
    Apply {
        /// `one`, `z^n`, `spike:i` or `random:k`.
        #[arg(long, default_value = "one")]
        f: String,
        /// Apply the absolute-kernel operator instead.
        #[arg(long)]
        positive: bool,
    },
    /// Weighted norms of the positive and dyadic operators.
    Norm,
    /// Comparability of the kernel with the dyadic kernels.
    CompareDyadic,
}

#[derive(Subcommand, Debug)]
enum Weights {
    /// B_p characteristic per depth and B_1 on the disc family.
    Char,
    /// Weak (1,1) ratios of maximal functions and projections.
    Weak11,
}

#[derive(Subcommand, Debug)]
enum Czd {
    Run {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value = "random:0")]
        f: String,
    },
}

#[derive(Subcommand, Debug)]
enum Twoweight {
    Test {
        #[arg(long, default_value = "{ kind = \"power\", eta = 0.5 }")]
        sigma: String,
        #[arg(long, default_value = "{ kind = \"power\", eta = -0.5 }")]
        u: String,
        /// Factor applied to the default sparse coefficients.
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
    },
}

#[derive(Subcommand, Debug)]
enum Oneweight {
    Norm {
        #[arg(long, default_value_t = 0.5)]
        eta: f64,
    },
}

fn parse_weight(text: &str) -> Result<WeightSpec, Error> {
    text.parse()
}

fn config(common: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = &common.suite {
        cfg.suite = s.clone();
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if common.depth.is_some() {
        cfg.depth = common.depth;
    }
    if let Some(j0) = common.j0 {
        cfg.j0 = j0;
    }
    if let Some(p) = common.p {
        cfg.p = p;
    }
    if common.samples.is_some() {
        cfg.samples = common.samples;
    }
    if let Some(w) = &common.weight {
        cfg.weight = parse_weight(w)?;
    }
    if let Some(o) = &common.out {
        cfg.out = o.clone();
    }
    if common.no_timestamp {
        cfg.timestamp = false;
    }
    cfg.svg |= common.svg;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<Option<(ExperimentConfig, SuiteReport)>, Error> {
    let cfg = config(&cli.common)?;
    let report = match cli.command.as_ref().unwrap_or(&Command::Run) {
        Command::Run => run_suite(&cfg)?,
        Command::Catalog => {
            print!("{}", list_catalog());
            return Ok(None);
        }
        Command::Proj(Proj::Apply { f, positive }) => {
            let kind = if *positive { OperatorKind::Positive } else { OperatorKind::Bergman };
            commands::proj_apply(&cfg, kind, f.parse::<TestFunction>()?)?
        }
        Command::Proj(Proj::Norm) => commands::proj_norm(&cfg)?,
        Command::Proj(Proj::CompareDyadic) => commands::proj_compare_dyadic(&cfg)?,
        Command::Weights(Weights::Char) => commands::weights_char(&cfg)?,
        Command::Weights(Weights::Weak11) => commands::weights_weak11(&cfg)?,
        Command::Czd(Czd::Run { lambda, f }) => commands::czd_run(&cfg, *lambda, f.parse()?)?,
        Command::Twoweight(Twoweight::Test { sigma, u, tau }) => {
            commands::twoweight_test(&cfg, &parse_weight(sigma)?, &parse_weight(u)?, *tau)?
        }
        Command::Oneweight(Oneweight::Norm { eta }) => commands::oneweight_norm(&cfg, *eta)?,
    };
    Ok(Some((cfg, report)))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match execute(&cli).and_then(|r| match r {
        Some((cfg, report)) => write_artifacts(&cfg, &report).map(|path| Some((report, path))),
        None => Ok(None),
    }) {
        Ok(None) => EXIT_PASS,
        Ok(Some((report, path))) => {
            let failed = report.failures().count();
            println!("{}: {} rows, {failed} failed -> {}", report.suite, report.rows.len(), path.display());
            for r in report.failures() {
                eprintln!("fail: {} / {} = {:e} (bound {:?})", r.case, r.quantity, r.value, r.bound);
            }
            if failed == 0 { EXIT_PASS } else { EXIT_CONTRACT }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    ExitCode::from(code as u8)
}
