//! `dqlm`: run figure presets or scenario files and write CSV/JSON outputs.

use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use dipolar_qlm::evolve::SCHEMA_VERSION;
use dipolar_qlm::scenario::{self, PresetKind, ScenarioConfig, SweepConfig};
use dipolar_qlm::units::{MIN_SPACING_UM, NARB_DIPOLE_DEBYE};
use dipolar_qlm::{Error, Result};
use serde_json::json;

#[derive(Parser)]
#[command(name = "dqlm", version, about = "Quantum link models on dipolar-molecule chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Built-in preset name (see `list-presets`).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Scenario file in JSON.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one scenario and write its records.
    Run {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Add a lab-time column in seconds.
        #[arg(long)]
        physical: bool,
    },
    /// Mean fidelity versus the long-short ratio.
    SweepGamma {
        #[command(flatten)]
        source: Source,
        /// Comma-separated γ values overriding the preset.
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<f64>>,
        /// Comma-separated masses overriding the preset.
        #[arg(long, value_delimiter = ',')]
        masses: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print the solved parameter set as JSON.
    Params {
        #[command(flatten)]
        source: Source,
    },
    /// Run the invariant and effective-Hamiltonian checks.
    Validate {
        #[command(flatten)]
        source: Source,
    },
    /// List the built-in presets.
    ListPresets,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(File::open(path)?)?)
}

fn scenario_from(source: &Source) -> Result<ScenarioConfig> {
    match (&source.preset, &source.config) {
        (Some(name), _) => match scenario::preset(name)?.kind {
            PresetKind::Run(c) => Ok(c),
            PresetKind::Sweep(s) => Ok(s.base),
        },
        (None, Some(path)) => read_json(path),
        (None, None) => Err(Error::InvalidArgument("pass --preset or --config".into())),
    }
}

fn sweep_from(source: &Source) -> Result<SweepConfig> {
    match (&source.preset, &source.config) {
        (Some(name), _) => match scenario::preset(name)?.kind {
            PresetKind::Sweep(s) => Ok(s),
            PresetKind::Run(c) => Ok(SweepConfig { base: c, gammas: scenario::SWEEP_GAMMAS.to_vec(), masses: vec![] }),
        },
        (None, Some(path)) => read_json(path),
        (None, None) => Err(Error::InvalidArgument("pass --preset or --config".into())),
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { source, out, physical } => {
            let config = scenario_from(&source)?;
            let output = scenario::run_scenario(&config)?;
            fs::create_dir_all(&out)?;
            let seconds_per_unit = if physical && output.summary.unit_v0.is_some() {
                let p = config.parameter_set()?;
                let hz = p.physical_scale(NARB_DIPOLE_DEBYE, MIN_SPACING_UM).unit_hz;
                Some(1.0 / (2.0 * std::f64::consts::PI * hz))
            } else {
                None
            };
            for rec in output.qlm.iter().chain(output.dmh.iter()) {
                let stem = format!("{}_{}", config.name, rec.model);
                rec.write_csv(File::create(out.join(format!("{stem}.csv")))?, seconds_per_unit)?;
                fs::write(out.join(format!("{stem}.json")), rec.to_json()?)?;
            }
            fs::write(out.join(format!("{}_summary.json", config.name)), serde_json::to_string_pretty(&output.summary)?)?;
            print_json(&output.summary)
        }
        Command::SweepGamma { source, gammas, masses, jobs, out } => {
            let mut sweep = sweep_from(&source)?;
            if let Some(g) = gammas {
                sweep.gammas = g;
            }
            if let Some(m) = masses {
                sweep.masses = m;
            }
            if sweep.masses.is_empty() {
                sweep.masses = vec![sweep.base.m];
            }
            let table = scenario::sweep_gamma(&sweep, jobs)?;
            fs::create_dir_all(&out)?;
            let name = &sweep.base.name;
            table.write_csv(File::create(out.join(format!("{name}_sweep.csv")))?)?;
            table.write_flux_csv(File::create(out.join(format!("{name}_flux.csv")))?)?;
            fs::write(out.join(format!("{name}_sweep.json")), serde_json::to_string_pretty(&table)?)?;
            print_json(&json!({ "schema_version": table.schema_version, "rows": table.rows }))
        }
        Command::Params { source } => print_json(&scenario::params_report(&scenario_from(&source)?)?),
        Command::Validate { source } => {
            let report = scenario::validate(&scenario_from(&source)?)?;
            print_json(&report)?;
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                Err(Error::Infeasible(format!("validation failed: {}", failed.join(", "))))
            }
        }
        Command::ListPresets => print_json(&json!({ "schema_version": SCHEMA_VERSION, "presets": scenario::presets() })),
    }
}

fn fail(kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({ "error": { "kind": kind, "message": message } }));
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.render().to_string().trim()),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}
