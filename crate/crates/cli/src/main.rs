//! `conformal4`: solves, invariant tables, Paneitz spectra and self-tests.
//!
//! Exit codes: 0 success, 1 configuration or input error (also a failing
//! self-test), 2 path failure or a converged path whose pinching verdict fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use conformal4_core::ledger::{builtin, examples_table};
use conformal4_core::paneitz::{product_paneitz_entries, reduced_spectrum, summarize_entries, summarize_spectrum};
use conformal4_core::report::{
    self, FailureReport, SolveReport, SpectrumReport,
};
use conformal4_core::selftest::{self, Mutation};
use conformal4_core::solver::{continue_path, ricci_verdict};
use conformal4_core::{Error, RunConfig, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "conformal4", version, about = "Conformal geometry numerics on four-manifolds")]
struct Cli {
    /// TOML run configuration with [background], [solve] and [spectrum] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Overrides solve.grid_n.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Overrides solve.delta.
    #[arg(long, global = true, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Overrides solve.t_target.
    #[arg(long = "t-target", global = true, allow_hyphen_values = true)]
    t_target: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Continuity path on S1xS3; writes trace.csv and report.json.
    Solve,
    /// Built-in invariant records; writes table.csv.
    Invariants,
    /// Paneitz spectrum of [spectrum] or of the reduced background; writes spectrum.csv and spectrum.json.
    Spectrum {
        /// Circle modes for the reduced spectrum (default: grid/2).
        #[arg(long)]
        modes: Option<usize>,
    },
    /// Connected-sum admissibility table; writes examples.csv.
    Examples,
    /// Every property suite; writes selftest.json.
    Selftest {
        /// Run against a deliberately broken formula to check the suites catch it.
        #[arg(long, value_enum, default_value_t = MutationArg::None, hide = true)]
        mutation: MutationArg,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MutationArg {
    None,
    FlipPaneitzB,
    WrongLShift,
}

impl From<MutationArg> for Mutation {
    fn from(m: MutationArg) -> Self {
        match m {
            MutationArg::None => Mutation::None,
            MutationArg::FlipPaneitzB => Mutation::FlipPaneitzB,
            MutationArg::WrongLShift => Mutation::WrongLShift,
        }
    }
}

const EXIT_CONFIG: u8 = 1;
const EXIT_PATH: u8 = 2;

/// Errors that map to exit code 1.
#[derive(Debug)]
struct ConfigError(String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(e: impl std::fmt::Display) -> anyhow::Error {
    ConfigError(e.to_string()).into()
}

struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    fn finish(self, cli: &Cli, command: &str) -> Result<()> {
        let manifest = RunManifest {
            command: command.into(),
            config_path: cli.config.clone(),
            output_dir: self.dir.clone(),
            seed: cli.seed,
            emitted_files: self.files,
        };
        report::write_json(&self.dir.join("manifest.json"), &manifest)?;
        Ok(())
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(config_err)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.grid {
        cfg.solve.grid_n = n;
    }
    if let Some(d) = cli.delta {
        cfg.solve.delta = d;
    }
    if let Some(t) = cli.t_target {
        cfg.solve.t_target = t;
    }
    Ok(cfg)
}

fn cmd_solve(cli: &Cli) -> Result<u8> {
    let cfg = load_config(cli)?;
    cfg.solve.validate().map_err(config_err)?;
    let bg = cfg.background.s1xs3().map_err(config_err)?;
    let mut out = Outputs::new(&cli.out)?;
    let mut rep = SolveReport {
        config: cfg.clone(),
        converged: false,
        final_diagnostics: None,
        verdict: None,
        failure: None,
        steps: 0,
    };
    let code = match continue_path(bg, &cfg.solve) {
        Ok((state, trace)) => {
            let verdict = ricci_verdict(&state, cfg.solve.t_target)?;
            report::write_trace_csv(&out.path("trace.csv"), &trace)?;
            rep.converged = state.converged;
            rep.final_diagnostics = Some(state.diagnostics);
            rep.verdict = Some(verdict);
            rep.steps = trace.len();
            let ok = verdict.both();
            println!(
                "converged at t = {} in {} steps: residual {:e}, u in [{}, {}], pinching margins {} / {}",
                state.t,
                trace.len(),
                state.diagnostics.residual_sup,
                state.diagnostics.u_min,
                state.diagnostics.u_max,
                verdict.lower_margin,
                verdict.upper_margin
            );
            if ok {
                0
            } else {
                eprintln!("pinching verdict fails at t0 = {}", cfg.solve.t_target);
                EXIT_PATH
            }
        }
        Err(Error::PathFailure {
            t_reached,
            t_target,
            reason,
            trace,
        }) => {
            report::write_trace_csv(&out.path("trace.csv"), &trace)?;
            rep.final_diagnostics = trace.last().copied();
            rep.steps = trace.len();
            eprintln!("path failure at t = {t_reached} (target {t_target}): {reason}");
            rep.failure = Some(FailureReport {
                t_reached,
                t_target,
                reason,
            });
            EXIT_PATH
        }
        Err(e @ (Error::Config(_) | Error::InvalidInput(_))) => return Err(config_err(e)),
        Err(e) => {
            eprintln!("solve failed: {e}");
            rep.failure = Some(FailureReport {
                t_reached: cfg.solve.delta,
                t_target: cfg.solve.t_target,
                reason: e.to_string(),
            });
            EXIT_PATH
        }
    };
    report::write_json(&out.path("report.json"), &rep)?;
    out.finish(cli, "solve")?;
    Ok(code)
}

fn cmd_invariants(cli: &Cli) -> Result<u8> {
    let t0 = cli.t_target.unwrap_or(0.0);
    let records = builtin::all();
    let mut out = Outputs::new(&cli.out)?;
    report::write_table_csv(&out.path("table.csv"), &records, t0)?;
    for r in &records {
        println!("{:<24} chi = {:>3}  F2 = {:>22}  {}", r.name, r.chi, report::fmt_f64(r.f2()), report::assumption_verdict(r, t0));
    }
    out.finish(cli, "invariants")?;
    Ok(0)
}

fn cmd_spectrum(cli: &Cli, modes: Option<usize>) -> Result<u8> {
    let cfg = load_config(cli)?;
    let (entries, rep) = match &cfg.spectrum {
        Some(inp) => {
            let entries = product_paneitz_entries(inp).map_err(config_err)?;
            let summary = summarize_spectrum(inp).map_err(config_err)?;
            let rep = SpectrumReport {
                source: "product".into(),
                coefficients: Some(inp.coefficients()),
                summary,
            };
            (entries, rep)
        }
        None => {
            let bg = cfg.background.s1xs3().map_err(config_err)?;
            let entries = reduced_spectrum(&bg, modes.unwrap_or(cfg.solve.grid_n / 2)).map_err(config_err)?;
            let summary = summarize_entries(&entries).map_err(config_err)?;
            let rep = SpectrumReport {
                source: "reduced".into(),
                coefficients: None,
                summary,
            };
            (entries, rep)
        }
    };
    let mut out = Outputs::new(&cli.out)?;
    report::write_spectrum_csv(&out.path("spectrum.csv"), &entries)?;
    report::write_json(&out.path("spectrum.json"), &rep)?;
    let s = &rep.summary;
    println!(
        "{} values, {} negative, min {} at (lambda, mu) = ({}, {}), kernel dimension {}",
        s.count, s.count_negative, s.min, s.argmin.0, s.argmin.1, s.kernel_dim
    );
    if let Some(b) = s.continuous_lower_bound {
        println!("lower bound over all lambda + mu >= 0: {b}");
    }
    out.finish(cli, "spectrum")?;
    Ok(0)
}

fn cmd_examples(cli: &Cli) -> Result<u8> {
    let rows = examples_table()?;
    let mut out = Outputs::new(&cli.out)?;
    report::write_examples_csv(&out.path("examples.csv"), &rows)?;
    for r in rows.iter().filter(|r| r.admissible) {
        println!("admissible: {} (k = {}, l = {}, chi = {})", r.family, r.k_s1s3, r.l_rp4, r.chi);
    }
    out.finish(cli, "examples")?;
    Ok(0)
}

fn cmd_selftest(cli: &Cli, mutation: MutationArg) -> Result<u8> {
    let rep = selftest::run_all(cli.seed, mutation.into());
    let mut out = Outputs::new(&cli.out)?;
    report::write_json(&out.path("selftest.json"), &rep)?;
    for s in &rep.suites {
        println!(
            "{} {:<32} {:>5} trials, worst {:e} (tolerance {:e})",
            if s.passed { "PASS" } else { "FAIL" },
            s.name,
            s.trials,
            s.worst,
            s.tolerance
        );
    }
    out.finish(cli, "selftest")?;
    if rep.passed {
        Ok(0)
    } else {
        let failed: Vec<_> = rep.suites.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
        eprintln!("failing suites: {}", failed.join(", "));
        Ok(EXIT_CONFIG)
    }
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Solve => cmd_solve(cli),
        Command::Invariants => cmd_invariants(cli),
        Command::Spectrum { modes } => cmd_spectrum(cli, *modes),
        Command::Examples => cmd_examples(cli),
        Command::Selftest { mutation } => cmd_selftest(cli, *mutation),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<ConfigError>() { EXIT_CONFIG } else { EXIT_PATH })
        }
    }
}
