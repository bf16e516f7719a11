use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use ptchain_cli::config::{from_value, Analysis};
use ptchain_cli::overrides::Overrides;
use ptchain_cli::run;
use serde_json::{Map, Value};

/// PT-symmetry breaking in non-Hermitian transverse-field Ising chains.
#[derive(Parser)]
#[command(name = "ptchain", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON configuration file; flags override its keys
    #[arg(long, short = 'c')]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Full spectrum at one strength
    Spectrum(Common),
    /// Breaking threshold for one perturbation or a batch of sites
    Threshold(Common),
    /// Spectra along a strength grid
    Flow(Common),
    /// Maximum imaginary part over a 2-D grid
    PhaseDiagram(Common),
    /// Threshold against transverse field, with a line fit
    FieldResponse(Common),
    /// Closed-form thresholds against the numerical search
    Validate(Common),
}

fn load(common: &Common, analysis: Analysis) -> Result<ptchain_cli::RunConfig> {
    let mut doc = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            match serde_json::from_str(&text)
                .with_context(|| format!("{} is not valid JSON", path.display()))?
            {
                Value::Object(m) => m,
                _ => bail!("{}: top level must be an object", path.display()),
            }
        }
        None => Map::new(),
    };
    common.overrides.apply(&mut doc)?;
    doc.insert("analysis".into(), serde_json::to_value(analysis)?);
    from_value(Value::Object(doc))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, analysis) = match &cli.command {
        Command::Spectrum(c) => (c, Analysis::Spectrum),
        Command::Threshold(c) => (c, Analysis::Threshold),
        Command::Flow(c) => (c, Analysis::Flow),
        Command::PhaseDiagram(c) => (c, Analysis::PhaseGrid),
        Command::FieldResponse(c) => (c, Analysis::FieldResponse),
        Command::Validate(c) => (c, Analysis::Validate),
    };
    let result = load(common, analysis).and_then(|cfg| run(&cfg));
    match result {
        Ok(report) => {
            // A closed stdout (e.g. piped into `head`) is not an error.
            let mut out = std::io::stdout().lock();
            let _ = report
                .summary
                .iter()
                .try_for_each(|line| writeln!(out, "{line}"))
                .and_then(|_| {
                    report
                        .files
                        .iter()
                        .try_for_each(|f| writeln!(out, "wrote {}", f.display()))
                });
            if report.failures > 0 {
                eprintln!("{} checks failed", report.failures);
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
