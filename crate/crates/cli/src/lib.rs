//! Command-line driver: builds solutions, evolves lattices, runs the
//! verification suites and writes CSV/JSON artifacts.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

pub mod commands;
pub mod config;
pub mod report;
pub mod verify;

use report::Check;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "LATTICE_AKNS_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Lattice(#[from] lattice_akns::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// Variant name of the underlying error, for machine-readable reports.
    pub fn kind(&self) -> String {
        match self {
            CliError::Lattice(e) => {
                let dbg = format!("{e:?}");
                dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
            }
            CliError::Usage(_) => "Usage".into(),
            CliError::Io(_) => "Io".into(),
            CliError::Csv(_) => "Csv".into(),
            CliError::Output(_) => "Output".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Dnls,
    Al,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Type1,
    Type2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    ForwardBackward,
    Symmetric,
}

#[derive(Debug, Parser)]
#[command(name = "lattice-akns", version, about = "Integrable matrix lattice solutions and their checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON parameter block for the command; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory receiving the artifacts.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Seed for random instances.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Multiplies every default upper tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub tolerance_scale: f64,
    #[arg(long, global = true, value_enum, default_value_t = Model::Dnls)]
    pub model: Model,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a one-soliton and check it against the flow.
    Soliton(SolitonArgs),
    /// Integrate the lattice flow with RK4 and track tr T.
    Evolve,
    /// Local charges along an RK4 trajectory.
    Charges,
    /// Solve the discrete GLM factorization.
    Glm(GlmArgs),
    /// Cole–Hopf map to the discrete Burgers equation.
    Burgers,
    /// Finite-difference check of the continuum heat-kernel pair.
    Continuum,
    /// Run every verification suite.
    VerifyAll,
}

#[derive(Debug, Clone, Args)]
pub struct SolitonArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// First-family base as `RE` or `RE,IM`.
    #[arg(long, value_parser = config::parse_complex, allow_hyphen_values = true)]
    pub xi: Option<lattice_akns::Complex64>,
    #[arg(long)]
    pub periodic: Option<bool>,
}

#[derive(Debug, Clone, Args)]
pub struct GlmArgs {
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Number of modes: 1 (closed-form comparison) or 2.
    #[arg(long)]
    pub modes: Option<usize>,
}

/// Settings shared by all commands.
#[derive(Debug, Clone)]
pub struct Context {
    pub out: PathBuf,
    pub seed: u64,
    pub tolerance_scale: f64,
    pub model: Model,
    pub config: Option<PathBuf>,
}

impl Context {
    /// A default upper tolerance scaled by `--tolerance-scale`.
    pub fn tol(&self, base: f64) -> f64 {
        base * self.tolerance_scale
    }
}

/// The invocation embedded in every JSON artifact.
#[derive(Debug, Serialize)]
pub struct RunConfig<'a, P: Serialize> {
    pub command: &'a str,
    pub model: Model,
    pub seed: u64,
    pub tolerance_scale: f64,
    pub params: &'a P,
}

#[derive(Debug, Serialize)]
struct FailureReport<'a> {
    command: &'a str,
    status: &'a str,
    failed: Vec<&'a Check>,
    error: Option<ErrorReport>,
}

#[derive(Debug, Serialize)]
struct ErrorReport {
    kind: String,
    message: String,
}

fn configure_threads() -> Result<(), CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?,
        Err(_) => 1,
    };
    // A pool may already exist when `run` is called more than once in a process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Soliton(_) => "soliton",
        Command::Evolve => "evolve",
        Command::Charges => "charges",
        Command::Glm(_) => "glm",
        Command::Burgers => "burgers",
        Command::Continuum => "continuum",
        Command::VerifyAll => "verify-all",
    }
}

fn dispatch(cli: &Cli, ctx: &Context) -> Result<Vec<Check>, CliError> {
    if !(cli.tolerance_scale.is_finite() && cli.tolerance_scale > 0.0) {
        return Err(CliError::Usage("--tolerance-scale must be positive".into()));
    }
    configure_threads()?;
    std::fs::create_dir_all(&ctx.out)?;
    match &cli.command {
        Command::Soliton(args) => commands::soliton(ctx, args),
        Command::Evolve => commands::evolve(ctx),
        Command::Charges => commands::charges(ctx),
        Command::Glm(args) => commands::glm(ctx, args),
        Command::Burgers => commands::burgers(ctx),
        Command::Continuum => commands::continuum(ctx),
        Command::VerifyAll => verify::verify_all(ctx),
    }
}

/// Parses arguments, runs the command and returns the process exit status:
/// 0 when every declared tolerance holds, 1 on a failed check or a domain
/// error, 2 on a usage or configuration error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let ctx = Context {
        out: cli.out.clone(),
        seed: cli.seed,
        tolerance_scale: cli.tolerance_scale,
        model: cli.model,
        config: cli.config.clone(),
    };
    let name = command_name(&cli.command);
    let result = dispatch(&cli, &ctx);
    let (checks, error) = match result {
        Ok(checks) => (checks, None),
        Err(e) => {
            eprintln!("error: {e}");
            if e.exit_code() == 2 {
                return 2;
            }
            (Vec::new(), Some(e))
        }
    };
    for c in &checks {
        println!("{}: {} (value {:e})", c.name, if c.pass { "PASS" } else { "FAIL" }, c.value);
    }
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
    if failed.is_empty() && error.is_none() {
        return 0;
    }
    let report = FailureReport {
        command: name,
        status: "fail",
        failed,
        error: error.as_ref().map(|e| ErrorReport { kind: e.kind(), message: e.to_string() }),
    };
    match serde_json::to_string_pretty(&report) {
        Ok(text) => {
            println!("{text}");
            if std::fs::create_dir_all(&ctx.out).is_ok() {
                let _ = std::fs::write(ctx.out.join("failure.json"), text + "\n");
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    1
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn run_in(dir: &Path, args: &[&str]) -> i32 {
        let out = dir.to_str().unwrap();
        let mut full = vec!["lattice-akns"];
        full.extend_from_slice(args);
        full.extend_from_slice(&["--out", out]);
        run(full)
    }

    fn header(dir: &Path, file: &str) -> String {
        std::fs::read_to_string(dir.join(file)).unwrap().lines().next().unwrap().to_string()
    }

    #[test]
    fn default_soliton_passes_with_headers() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_in(dir.path(), &["soliton"]), 0);
        assert_eq!(header(dir.path(), "soliton.csv"), "t,site,upper_re,upper_im,lower_re,lower_im");
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("soliton.json")).unwrap()).unwrap();
        assert_eq!(json["config"]["command"], "soliton");
        assert_eq!(json["config"]["seed"], 42);
    }

    #[test]
    fn al_soliton_passes() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_in(dir.path(), &["soliton", "--model", "al"]), 0);
    }

    #[test]
    fn non_root_xi_on_periodic_lattice_is_a_domain_error() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_in(dir.path(), &["soliton", "--xi", "0.9,0.3"]), 1);
        let report = std::fs::read_to_string(dir.path().join("failure.json")).unwrap();
        assert!(report.contains("PeriodicityViolation"));
        assert_eq!(run_in(dir.path(), &["soliton", "--xi", "0.9,0.3", "--periodic", "false"]), 0);
    }

    #[test]
    fn unknown_config_key_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("cfg.json");
        std::fs::write(&cfg, r#"{"steps": 10, "bogus": 1}"#).unwrap();
        assert_eq!(run_in(dir.path(), &["evolve", "--config", cfg.to_str().unwrap()]), 2);
        assert_eq!(run_in(dir.path(), &["nonsense"]), 2);
        assert_eq!(run_in(dir.path(), &["evolve", "--tolerance-scale", "-1"]), 2);
    }

    #[test]
    fn evolve_and_charges_are_deterministic() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        for dir in [&a, &b] {
            assert_eq!(run_in(dir.path(), &["evolve"]), 0);
            assert_eq!(run_in(dir.path(), &["charges"]), 0);
        }
        for file in ["evolve.csv", "charges.csv", "evolve.json", "charges.json"] {
            let (x, y) = (std::fs::read(a.path().join(file)).unwrap(), std::fs::read(b.path().join(file)).unwrap());
            assert_eq!(x, y, "{file} differs between runs");
        }
        assert_eq!(header(a.path(), "evolve.csv"), "t,site,block,row,col,re,im");
        assert!(header(a.path(), "charges.csv").starts_with("t,h1_re,h1_im"));
    }

    #[test]
    fn al_charges_track_traces() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_in(dir.path(), &["charges", "--model", "al"]), 0);
        assert!(header(dir.path(), "charges.csv").starts_with("t,trace0_re"));
    }

    #[test]
    fn glm_symmetric_single_mode_passes() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_in(dir.path(), &["glm", "--scheme", "symmetric", "--modes", "1"]), 0);
        assert_eq!(header(dir.path(), "glm_b.csv"), "k,j,row,col,re,im");
        assert_eq!(run_in(dir.path(), &["glm", "--modes", "2"]), 0);
        assert_eq!(run_in(dir.path(), &["glm", "--modes", "3"]), 2);
    }

    #[test]
    fn burgers_reports_truncation_ratio_window() {
        let dir = tempfile::tempdir().unwrap();
        // The measured ratio lies outside the declared window, so the run fails with a report.
        assert_eq!(run_in(dir.path(), &["burgers"]), 1);
        let report = std::fs::read_to_string(dir.path().join("failure.json")).unwrap();
        assert!(report.contains("truncation_ratio_0"));
        assert_eq!(header(dir.path(), "truncation.csv"), "delta,hj_remainder,burgers_remainder");
    }

    #[test]
    fn continuum_passes() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(run_in(dir.path(), &["continuum"]), 0);
        assert_eq!(header(dir.path(), "continuum.csv"), "x,t,upper,lower");
    }

    #[test]
    fn verify_all_subset() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("cfg.json");
        std::fs::write(&cfg, r#"{"suites": ["zero-curvature", "glm", "continuum"]}"#).unwrap();
        assert_eq!(run_in(dir.path(), &["verify-all", "--config", cfg.to_str().unwrap()]), 0);
        assert_eq!(header(dir.path(), "verify.csv"), "suite,check,value,lower,upper,pass");
        std::fs::write(&cfg, r#"{"suites": ["nope"]}"#).unwrap();
        assert_eq!(run_in(dir.path(), &["verify-all", "--config", cfg.to_str().unwrap()]), 2);
    }
}
