//! Command-line surface of bvkit: JSON inputs, deterministic JSON reports and
//! the golden-suite runner.

mod commands;
mod report;
mod schema;
mod suite;

use std::path::PathBuf;

use bvkit::Window;
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use report::{canonical_bytes, Report};
pub use suite::{verify_suite, CaseOutcome, SuiteReport};

/// Environment variable holding the default ħ window as `LO:HI`.
pub const WINDOW_ENV: &str = "BVKIT_HBAR_WINDOW";

pub const DEFAULT_CUTOFF: u32 = 4;
pub const DEFAULT_MAX_B_DEGREE: usize = 3;
pub const DEFAULT_SAMPLES: usize = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("invalid input at `{path}`: {message}")]
    Invalid { path: String, message: String },
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Schema { .. } => "schema",
            CliError::Invalid { .. } => "invalid",
        }
    }

    fn path(&self) -> Option<&str> {
        match self {
            CliError::Schema { path, .. } | CliError::Invalid { path, .. } => Some(path),
            _ => None,
        }
    }
}

/// Maps a domain error to an input error located at `path`.
pub(crate) fn at<T, E: std::fmt::Display>(path: &str, r: Result<T, E>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Invalid { path: path.to_string(), message: e.to_string() })
}

#[derive(Parser, Debug)]
#[command(name = "bvkit", version, about = "Exact BV/BFV checks on JSON inputs")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct GlobalArgs {
    /// ħ truncation window as LO:HI (default from BVKIT_HBAR_WINDOW, else -4:4).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Polynomial degree cutoff for cohomology and primitive searches.
    #[arg(long, global = true)]
    pub cutoff: Option<u32>,
    /// Highest b-degree solved for in BFV extensions.
    #[arg(long, global = true)]
    pub max_b_degree: Option<usize>,
    /// Number of random gauge fermions when none are given.
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Indented report plus a one-line summary on stderr.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Add the wall-clock time to the report (makes it non-canonical).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    #[arg(long, default_value_t = 2)]
    pub bulk: usize,
    #[arg(long, default_value_t = 0)]
    pub boundary: usize,
    #[arg(long, default_value_t = 2)]
    pub max_edges: usize,
    #[arg(long)]
    pub oriented: bool,
    #[arg(long)]
    pub loops: bool,
    #[arg(long)]
    pub multi: bool,
    /// List the codimension-1 faces of every graph.
    #[arg(long)]
    pub faces: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Berezinian of a supermatrix, optionally with a multiplicativity check.
    Berezinian { input: PathBuf },
    /// Berezin and Gaussian integration of a polynomial.
    BvIntegrate { input: PathBuf },
    /// Classical master equation {S,S} = 0.
    CheckCme { input: PathBuf },
    /// Quantum master equation order by order in ħ.
    CheckQme { input: PathBuf },
    /// Gauge independence and exactness over a family of gauge fermions.
    BvTheorem { input: PathBuf },
    /// Ghost extension of a first-class constraint system.
    BfvExtend { input: PathBuf },
    /// Feynman graphs up to isomorphism.
    EnumerateGraphs(GraphArgs),
    /// Codimension-1 strata of configuration spaces.
    Strata {
        #[arg(long, default_value_t = 2)]
        bulk: usize,
        #[arg(long, default_value_t = 0)]
        boundary: usize,
    },
    /// Discrete BF theory on a cell complex.
    BfModel { input: PathBuf },
    /// Gluing of two discrete BF states along an interface.
    Glue { input: PathBuf },
    /// Runs a golden suite and byte-compares reports.
    VerifyAll {
        suite: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Overwrite expected reports with the current output.
        #[arg(long)]
        bless: bool,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Berezinian { .. } => "berezinian",
            Command::BvIntegrate { .. } => "bv-integrate",
            Command::CheckCme { .. } => "check-cme",
            Command::CheckQme { .. } => "check-qme",
            Command::BvTheorem { .. } => "bv-theorem",
            Command::BfvExtend { .. } => "bfv-extend",
            Command::EnumerateGraphs(_) => "enumerate-graphs",
            Command::Strata { .. } => "strata",
            Command::BfModel { .. } => "bf-model",
            Command::Glue { .. } => "glue",
            Command::VerifyAll { .. } => "verify-all",
        }
    }
}

/// Effective settings, echoed in every report.
#[derive(Clone, Debug)]
pub struct Settings {
    pub window: Window,
    pub seed: u64,
    pub cutoff: Option<u32>,
    pub max_b_degree: Option<usize>,
    pub samples: usize,
}

fn parse_window(s: &str) -> Result<Window, CliError> {
    let bad = || CliError::Usage(format!("bad ħ window `{s}`, expected LO:HI"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: i32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i32 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok(Window::new(lo, hi))
}

impl Settings {
    pub fn resolve(g: &GlobalArgs, env_window: Option<&str>) -> Result<Settings, CliError> {
        let window = match (&g.window, env_window) {
            (Some(w), _) => parse_window(w)?,
            (None, Some(w)) => parse_window(w)?,
            (None, None) => Window::DEFAULT,
        };
        Ok(Settings { window, seed: g.seed, cutoff: g.cutoff, max_b_degree: g.max_b_degree, samples: g.samples })
    }
}

/// Exit code, standard output and standard error of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Commands and the library operations each of them reaches, by module.
pub struct CommandSpec {
    pub name: &'static str,
    /// Source file under `src/commands` implementing the command.
    pub source: &'static str,
    pub reaches: &'static [&'static str],
}

pub const COMMANDS: &[CommandSpec] = &[
    CommandSpec {
        name: "berezinian",
        source: "algebra.rs",
        reaches: &["supermatrix::is_invertible", "supermatrix::berezinian", "supermatrix::check_multiplicative"],
    },
    CommandSpec {
        name: "bv-integrate",
        source: "algebra.rs",
        reaches: &[
            "graded_algebra::mul",
            "graded_algebra::left_derive",
            "graded_algebra::right_derive",
            "graded_algebra::substitute",
            "berezin::berezin_integrate",
            "berezin::gaussian_expect",
            "berezin::bv_measure_integrate",
        ],
    },
    CommandSpec {
        name: "check-cme",
        source: "bv.rs",
        reaches: &[
            "bv_core::bracket",
            "bv_core::hamiltonian_vf",
            "bv_core::check_cme",
            "bv_core::relaxed_check_forms",
            "cartan::de_rham_d",
            "cartan::contract",
            "cartan::lie_derivative",
            "cartan::vf_bracket",
            "cartan::is_cohomological",
        ],
    },
    CommandSpec {
        name: "check-qme",
        source: "bv.rs",
        reaches: &["bv_core::bv_laplacian", "bv_core::antibracket", "bv_core::check_qme"],
    },
    CommandSpec {
        name: "bv-theorem",
        source: "bv.rs",
        reaches: &[
            "gauge_fix::restrict",
            "gauge_fix::bv_integrate",
            "gauge_fix::check_thm_bv1",
            "gauge_fix::check_thm_bv2",
            "gauge_fix::bv_pushforward",
        ],
    },
    CommandSpec {
        name: "bfv-extend",
        source: "bfv.rs",
        reaches: &[
            "bfv::ghost_extend",
            "bfv::correct_order_by_order",
            "bfv::q_cohomology_degree0",
            "bfv::n_mod_i_dimension",
        ],
    },
    CommandSpec {
        name: "enumerate-graphs",
        source: "graphs.rs",
        reaches: &["graphs_config::enumerate_graphs", "graphs_config::loop_number", "graphs_config::stratum_face_classes"],
    },
    CommandSpec {
        name: "strata",
        source: "graphs.rs",
        reaches: &["graphs_config::codim1_strata_closed", "graphs_config::codim1_strata_boundary"],
    },
    CommandSpec {
        name: "bf-model",
        source: "models.rs",
        reaches: &[
            "models::build_bf",
            "models::residual_fields",
            "models::chain_contraction",
            "models::effective_action",
            "models::boundary_bfv",
            "models::check_mqme",
        ],
    },
    CommandSpec { name: "glue", source: "models.rs", reaches: &["models::glue", "models::check_mqme"] },
    CommandSpec { name: "verify-all", source: "../suite.rs", reaches: &["cli::verify_all", "cli::run"] },
];

/// Parses `args` (without the program name) and runs one command.
pub fn run(args: &[String], env_window: Option<&str>) -> Outcome {
    let argv = std::iter::once("bvkit".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome { code, stdout: if code == 0 { e.to_string() } else { String::new() }, stderr: if code == 0 { String::new() } else { e.to_string() } };
        }
    };
    run_cli(&cli, env_window)
}

pub fn run_cli(cli: &Cli, env_window: Option<&str>) -> Outcome {
    let started = std::time::Instant::now();
    let name = cli.command.name();
    let report = match Settings::resolve(&cli.global, env_window) {
        Ok(settings) => match commands::dispatch(&cli.command, &settings) {
            Ok(r) => r,
            Err(e) => Report::error(name, &settings, &e),
        },
        Err(e) => Report::error(name, &Settings::resolve(&GlobalArgs::default(), None).expect("defaults"), &e),
    };
    let mut value = report.to_value();
    if cli.global.timing {
        value["elapsed_ms"] = serde_json::json!(started.elapsed().as_millis() as u64);
    }
    let stdout = if cli.global.pretty {
        String::from_utf8(canonical_bytes(&value)).expect("utf-8")
    } else {
        let mut s = serde_json::to_string(&value).expect("report serializes");
        s.push('\n');
        s
    };
    let stderr = if cli.global.pretty { format!("{}\n", report.summary()) } else { String::new() };
    Outcome { code: report.exit_code(), stdout, stderr }
}
