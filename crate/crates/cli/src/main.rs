//! `weyllab`: writes plot-ready CSV/JSON for bands, charges, edge states and
//! reflection spectroscopy of the synthetic Weyl chain.
//!
//! Exit codes: 0 success, 2 usage or config error, 3 numerical failure,
//! 4 disagreement between independent methods.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Config;
use error::CliError;
use output::Artifacts;

#[derive(Parser)]
#[command(name = "weyllab", version, about = "Synthetic Weyl semimetal in a resonator chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory [default: $WEYLLAB_OUT or ./weyllab-out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override one setting; repeatable, later wins.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,

    /// Worker threads for sweeps (overrides the `threads` setting).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Bulk bands on a (theta1, theta2) grid at fixed kx.
    BulkBands,
    /// Locations, velocity matrices and chiralities of the four nodes.
    WeylPoints,
    /// Monopole charges from spheres and from the mapped torus.
    Chern,
    /// Numeric and linearized Berry curvature around the nodes.
    BerryField,
    /// Open-chain spectrum with edge labels over the surface zone.
    EdgeSpectrum,
    /// Site densities of every open-chain state at one (theta1, theta2).
    Density,
    /// Reflection coefficient versus detuning.
    Reflection,
    /// Winding of the reflection phase around node projections.
    Winding,
    /// Fermi-arc scan from reflection spectra, with raw spectra.
    FermiArc,
    /// Arc end theta1c (radians) for each chain length.
    Table1,
    /// Print the effective configuration.
    ShowConfig,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::BulkBands => "bulk-bands",
            Command::WeylPoints => "weyl-points",
            Command::Chern => "chern",
            Command::BerryField => "berry-field",
            Command::EdgeSpectrum => "edge-spectrum",
            Command::Density => "density",
            Command::Reflection => "reflection",
            Command::Winding => "winding",
            Command::FermiArc => "fermi-arc",
            Command::Table1 => "table1",
            Command::ShowConfig => "show-config",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = Config::load(cli.config.as_deref(), &cli.set)?;
    if let Command::ShowConfig = cli.command {
        print!("{}", cfg.dump());
        return Ok(());
    }
    let threads = match cli.threads {
        Some(t) => t,
        None => cfg.count("threads")?,
    };
    if threads == 0 {
        return Err(CliError::Usage("threads must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;

    let dir = cli
        .out
        .or_else(|| std::env::var_os("WEYLLAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("weyllab-out"));
    let mut out = Artifacts::new(&dir)?;
    let run = match cli.command {
        Command::BulkBands => commands::bulk_bands_cmd,
        Command::WeylPoints => commands::weyl_points_cmd,
        Command::Chern => commands::chern_cmd,
        Command::BerryField => commands::berry_field_cmd,
        Command::EdgeSpectrum => commands::edge_spectrum_cmd,
        Command::Density => commands::density_cmd,
        Command::Reflection => commands::reflection_cmd,
        Command::Winding => commands::winding_cmd,
        Command::FermiArc => commands::fermi_arc_cmd,
        Command::Table1 => commands::table1_cmd,
        Command::ShowConfig => unreachable!(),
    };
    let result = pool.install(|| run(&cfg, &mut out));
    // Inconsistent runs still leave their data and manifest behind.
    if matches!(result, Ok(()) | Err(CliError::Inconsistent(_))) {
        let manifest = out.finish(cli.command.name(), cfg.recorded())?;
        eprintln!("wrote {}", manifest.display());
    }
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code())
        }
    }
}
