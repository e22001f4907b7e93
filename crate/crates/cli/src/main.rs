//! `onofri`: command-line frontend for the experiments in `onofri-core`.
//!
//! Exit codes: 0 all checks pass, 1 runtime error, 2 a mathematical check
//! failed, 3 usage error.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use clap::{Args, Parser, Subcommand};
use onofri_core::report::{write_atomic, RunConfig, Status};
use onofri_core::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "onofri", version, about = "Moser-Onofri-Aubin inequality experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Constrained minimization of J_alpha from one random start.
    Minimize,
    /// Multi-start minima over a range of alpha.
    AlphaScan,
    /// Euler-Lagrange residual of a computed minimizer.
    ElCheck,
    /// Transfer a minimizer to the plane and check mass and the Pohozaev window.
    Bridge,
    /// One radial shot of the planar equation.
    Shoot,
    /// beta(s) over a range of initial values.
    BetaCurve,
    /// All radial solutions with a given beta.
    Uniqueness,
    /// The axially symmetric inequality.
    Axisym,
    /// Eigenvalue/mass audit of a supersolution on a family of disks.
    BolAudit,
    /// Nodal domains of a test function and the mass ledger.
    Nodal,
    /// Second variation of J_alpha at 0 in degrees 1 and 2.
    SecondVariation,
    /// Run the full acceptance suite.
    Verify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Minimize => "minimize",
            Command::AlphaScan => "alpha-scan",
            Command::ElCheck => "el-check",
            Command::Bridge => "bridge",
            Command::Shoot => "shoot",
            Command::BetaCurve => "beta-curve",
            Command::Uniqueness => "uniqueness",
            Command::Axisym => "axisym",
            Command::BolAudit => "bol-audit",
            Command::Nodal => "nodal",
            Command::SecondVariation => "second-variation",
            Command::Verify => "verify",
        }
    }
}

#[derive(Args, Debug, Default)]
struct Flags {
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    rho: Option<String>,
    #[arg(long = "alpha-min", global = true, allow_negative_numbers = true)]
    alpha_min: Option<String>,
    #[arg(long = "alpha-max", global = true, allow_negative_numbers = true)]
    alpha_max: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    l: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    beta: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    s: Option<String>,
    #[arg(long = "s-min", global = true, allow_negative_numbers = true)]
    s_min: Option<String>,
    #[arg(long = "s-max", global = true, allow_negative_numbers = true)]
    s_max: Option<String>,
    #[arg(long, global = true)]
    n: Option<String>,
    #[arg(long, global = true)]
    trials: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Band limit of the sphere grid.
    #[arg(long = "L", global = true)]
    band_limit: Option<String>,
    #[arg(long = "r-max", global = true)]
    r_max: Option<String>,
    #[arg(long, global = true)]
    tol: Option<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the command's CSV table here.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut push = |k: &'static str, v: &Option<String>| {
            if let Some(v) = v {
                out.push((k, v.clone()));
            }
        };
        push("alpha", &self.alpha);
        push("rho", &self.rho);
        push("alpha-min", &self.alpha_min);
        push("alpha-max", &self.alpha_max);
        push("l", &self.l);
        push("beta", &self.beta);
        push("s", &self.s);
        push("s-min", &self.s_min);
        push("s-max", &self.s_max);
        push("n", &self.n);
        push("trials", &self.trials);
        push("seed", &self.seed);
        push("L", &self.band_limit);
        push("r-max", &self.r_max);
        push("tol", &self.tol);
        for (k, p) in [("out", &self.out), ("csv", &self.csv)] {
            if let Some(p) = p {
                out.push((k, p.display().to_string()));
            }
        }
        out
    }
}

const EXIT_RUNTIME: u8 = 1;
const EXIT_VIOLATED: u8 = 2;
const EXIT_USAGE: u8 = 3;

fn build_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut config = RunConfig::new(cli.command.name());
    if let Some(path) = &cli.flags.config {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        config.apply_text(&text)?;
        config.command = cli.command.name().to_string();
    }
    for (k, v) in cli.flags.pairs() {
        config.set(k, &v)?;
    }
    config.validate()?;
    Ok(config)
}

fn is_usage(e: &Error) -> bool {
    matches!(e, Error::Config(_) | Error::InvalidInput(_))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let (report, csv) = match commands::run(config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if is_usage(&e) { EXIT_USAGE } else { EXIT_RUNTIME });
        }
    };
    let json = report.to_json();
    let written = match &report.config.out {
        Some(p) => write_atomic(p, json.as_bytes()),
        None => {
            println!("{json}");
            Ok(())
        }
    };
    let written = written.and_then(|()| match (&report.config.csv, csv) {
        (Some(p), Some(table)) => write_atomic(p, table.as_bytes()),
        (Some(_), None) => {
            eprintln!("note: {} has no CSV table", report.command);
            Ok(())
        }
        _ => Ok(()),
    });
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_RUNTIME);
    }
    for note in &report.verdict.notes {
        eprintln!("violated: {note}");
    }
    match report.verdict.status {
        Status::Pass => ExitCode::SUCCESS,
        Status::Violated => ExitCode::from(EXIT_VIOLATED),
    }
}
