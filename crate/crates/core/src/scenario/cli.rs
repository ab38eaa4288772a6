//! Command-line front end. Every subcommand builds a [`Scenario`] from its
//! flags; `--config` loads one from a file instead.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use super::config::{
    parse_grid_spec, parse_growth_spec, parse_profile_spec, BoundaryKind, Experiment,
    NormKind, Scenario, SchemeKind, SweepPoint, SCHEMA_VERSION,
};
use super::runner::{run_scenario, TolerancePolicy};
use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "pmegreen", version, about = "Green functions and porous medium smoothing on model manifolds")]
pub struct Cli {
    /// Scenario file (JSON); its experiment kind must match the subcommand, if one is given.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value = "default", value_parser = ["strict", "default"])]
    pub tolerance_profile: String,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario name, used as the artifact file stem.
    #[arg(long)]
    pub name: Option<String>,
    /// e.g. `euclidean:3`, `power:5:3.5`, `power_log:4:3:1`, `warped:3:cone:0.5`.
    #[arg(long)]
    pub profile: Option<String>,
    /// e.g. `power:3`, `power_log:2:2:2.718281828459045`.
    #[arg(long = "f")]
    pub growth: Option<String>,
    #[arg(long)]
    pub m: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the standing geometric assumptions.
    CheckAssumptions {
        #[command(flatten)]
        common: Common,
        /// `start:end:count`, log-spaced.
        #[arg(long, default_value = "1:100:101")]
        grid: String,
    },
    /// Tabulate G, its surrogate, and the pointwise bounds.
    Green {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,10")]
        radii: Vec<f64>,
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
    },
    /// Weighted norm and power-law membership.
    L1g {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        exponent: Option<f64>,
        /// CSV with columns r,f.
        #[arg(long)]
        function: Option<String>,
    },
    /// Evaluate a smoothing bound on a time grid.
    Bound {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1:1e6:61")]
        time_grid: String,
        #[arg(long, default_value_t = 1.0)]
        norm: f64,
        #[arg(long, default_value = "l1", value_parser = ["l1", "l1g"])]
        norm_kind: String,
    },
    /// Run the radial solver.
    Solve {
        #[command(flatten)]
        common: Common,
        /// `barenblatt:A:eps`, `powerlaw:a` or `table:path`.
        #[arg(long)]
        init: Option<String>,
        #[arg(long, default_value_t = 20.0)]
        rmax: f64,
        #[arg(long, default_value_t = 1000)]
        cells: usize,
        #[arg(long, default_value = "explicit", value_parser = ["explicit", "implicit"])]
        scheme: String,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, default_value = "absorbing", value_parser = ["absorbing", "zero_flux"])]
        boundary: String,
        #[arg(long, default_value_t = 1.0)]
        tend: f64,
        #[arg(long, default_value_t = 11)]
        snapshots: usize,
        /// Also write every snapshot profile.
        #[arg(long)]
        profiles: bool,
    },
    /// Barenblatt decay-rate study.
    Optimality {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 2000)]
        cells: usize,
        #[arg(long, default_value_t = 20.0)]
        rmax: f64,
        #[arg(long, default_value = "0.1:10:21")]
        time_grid: String,
        #[arg(long, value_delimiter = ',', default_value = "1,10")]
        fit_window: Vec<f64>,
    },
    /// Decay-rate fits over a grid of (m, k).
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "1.5,2,3")]
        m_values: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "3")]
        k_values: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 500)]
        cells: usize,
        #[arg(long, default_value_t = 20.0)]
        rmax: f64,
        #[arg(long, default_value = "0.1:10:21")]
        time_grid: String,
        #[arg(long, value_delimiter = ',', default_value = "1,10")]
        fit_window: Vec<f64>,
    },
}

impl Command {
    fn kind(&self) -> &'static str {
        match self {
            Command::CheckAssumptions { .. } => "check",
            Command::Green { .. } => "green",
            Command::L1g { .. } => "l1g",
            Command::Bound { .. } => "bound",
            Command::Solve { .. } => "solve",
            Command::Optimality { .. } => "optimality",
            Command::Sweep { .. } => "sweep",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::CheckAssumptions { common, .. }
            | Command::Green { common, .. }
            | Command::L1g { common, .. }
            | Command::Bound { common, .. }
            | Command::Solve { common, .. }
            | Command::Optimality { common, .. }
            | Command::Sweep { common, .. } => common,
        }
    }
}

fn window(values: &[f64]) -> Result<[f64; 2]> {
    match values {
        [a, b] => Ok([*a, *b]),
        _ => Err(Error::Config("fit window needs two values a,b".into())),
    }
}

/// Builds the scenario described by the subcommand flags.
pub fn scenario_from_command(command: &Command) -> Result<Scenario> {
    let common = command.common();
    let profile = common.profile.as_deref().map(parse_profile_spec).transpose()?;
    let growth = common.growth.as_deref().map(parse_growth_spec).transpose()?;
    let experiment = match command {
        Command::CheckAssumptions { grid, .. } => Experiment::Check {
            grid: parse_grid_spec(grid)?,
        },
        Command::Green { radii, c1, c2, .. } => Experiment::Green {
            radii: radii.clone(),
            c1: *c1,
            c2: *c2,
        },
        Command::L1g { exponent, function, .. } => Experiment::L1g {
            exponent: *exponent,
            table: function.clone(),
        },
        Command::Bound {
            time_grid,
            norm,
            norm_kind,
            ..
        } => Experiment::Bound {
            times: parse_grid_spec(time_grid)?,
            norm: *norm,
            norm_kind: if norm_kind == "l1g" { NormKind::L1g } else { NormKind::L1 },
            c_large: 1.0,
            c_small: 1.0,
        },
        Command::Solve {
            init,
            rmax,
            cells,
            scheme,
            dt,
            boundary,
            tend,
            snapshots,
            profiles,
            ..
        } => Experiment::Solve {
            init: init
                .clone()
                .ok_or_else(|| Error::Config("solve needs --init".into()))?,
            r_max: *rmax,
            cells: *cells,
            scheme: if scheme == "implicit" { SchemeKind::Implicit } else { SchemeKind::Explicit },
            dt: *dt,
            boundary: if boundary == "zero_flux" { BoundaryKind::ZeroFlux } else { BoundaryKind::Absorbing },
            t_end: *tend,
            snapshots: *snapshots,
            full_profiles: *profiles,
        },
        Command::Optimality {
            k,
            a,
            eps,
            cells,
            rmax,
            time_grid,
            fit_window,
            ..
        } => Experiment::Optimality {
            k: *k,
            a: *a,
            eps: *eps,
            cells: *cells,
            r_max: *rmax,
            times: parse_grid_spec(time_grid)?,
            fit_window: window(fit_window)?,
        },
        Command::Sweep {
            m_values,
            k_values,
            a,
            eps,
            cells,
            rmax,
            time_grid,
            fit_window,
            ..
        } => Experiment::Sweep {
            points: m_values
                .iter()
                .flat_map(|&m| k_values.iter().map(move |&k| SweepPoint { m, k }))
                .collect(),
            a: *a,
            eps: *eps,
            cells: *cells,
            r_max: *rmax,
            times: parse_grid_spec(time_grid)?,
            fit_window: window(fit_window)?,
        },
    };
    let m = match command {
        Command::Optimality { .. } => Some(common.m.unwrap_or(2.0)),
        _ => common.m,
    };
    Ok(Scenario {
        schema_version: SCHEMA_VERSION,
        name: common.name.clone().unwrap_or_else(|| command.kind().into()),
        profile,
        growth,
        m,
        seed: None,
        experiment,
    })
}

/// Exit code: 0 when every asserted check passes, 1 when one fails or the
/// computation errors, 2 for usage and configuration errors.
pub fn execute(cli: &Cli) -> ExitCode {
    let code = match run(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Json(_) => 2,
                _ => 1,
            }
        }
    };
    ExitCode::from(code)
}

fn run(cli: &Cli) -> Result<bool> {
    let tol = TolerancePolicy::by_name(&cli.tolerance_profile)?;
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::Config(format!("--threads: {e}")))?;
    }
    let scenario = match (&cli.config, &cli.command) {
        (Some(path), command) => {
            let s = Scenario::load(path)?;
            if let Some(c) = command {
                if c.kind() != s.experiment.kind() {
                    return Err(Error::Config(format!(
                        "subcommand '{}' does not match the config's experiment kind '{}'",
                        c.kind(),
                        s.experiment.kind()
                    )));
                }
            }
            s
        }
        (None, Some(command)) => scenario_from_command(command)?,
        (None, None) => return Err(Error::Config("give a subcommand or --config".into())),
    };
    let manifest = run_scenario(&scenario, &cli.out_dir, tol)?;
    for check in &manifest.checks {
        println!("{} {}: {}", if check.pass { "PASS" } else { "FAIL" }, check.name, check.detail);
    }
    for artifact in &manifest.artifacts {
        println!("wrote {artifact}");
    }
    Ok(manifest.passed())
}

/// Parses the process arguments (clap exits with status 2 on usage errors).
pub fn main() -> ExitCode {
    execute(&Cli::parse())
}
