use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use udw_cli::{preset, run, SweepConfig, PRESETS};

#[derive(Parser)]
#[command(name = "udw", version, about = "Unruh-DeWitt detector sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a sweep config and write CSV.
    Run {
        config: PathBuf,
        /// Overrides the config's `output`; `-` for stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a config without computing anything.
    Validate { config: PathBuf },
    /// Run a shipped preset (fig1, fig2, fig3, fig4a, fig4b, fig5).
    Preset {
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Print the preset config instead of running it.
        #[arg(long)]
        print: bool,
    },
}

fn load(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse(text: &str, origin: &str) -> Option<SweepConfig> {
    match SweepConfig::parse(text) {
        Ok(c) => Some(c),
        Err(violations) => {
            for v in violations {
                eprintln!("{origin}: {v}");
            }
            None
        }
    }
}

fn execute(config: &SweepConfig, output: Option<PathBuf>) -> Result<ExitCode> {
    let table = run(config)?;
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    match output.or_else(|| config.output.clone()) {
        Some(p) if p != Path::new("-") => {
            let f = File::create(&p).with_context(|| format!("cannot create {}", p.display()))?;
            table.write_csv(BufWriter::new(f), Some(stamp))?;
        }
        _ => {
            let stdout = io::stdout();
            table.write_csv(stdout.lock(), Some(stamp))?;
        }
    }
    if table.failures > 0 {
        eprintln!("{} of {} rows failed; see the reason column", table.failures, table.rows.len());
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Validate { config } => load(&config).map(|text| {
            match parse(&text, &config.display().to_string()) {
                Some(_) => {
                    println!("{}: ok", config.display());
                    ExitCode::SUCCESS
                }
                None => ExitCode::from(1),
            }
        }),
        Command::Run { config, output } => load(&config).and_then(|text| {
            match parse(&text, &config.display().to_string()) {
                Some(c) => execute(&c, output),
                None => Ok(ExitCode::from(1)),
            }
        }),
        Command::Preset { name, output, print } => match preset(&name) {
            None => {
                let names: Vec<_> = PRESETS.iter().map(|(n, _)| *n).collect();
                eprintln!("unknown preset {name:?}; available: {}", names.join(", "));
                Ok(ExitCode::from(1))
            }
            Some(text) if print => {
                let _ = io::stdout().write_all(text.as_bytes());
                Ok(ExitCode::SUCCESS)
            }
            Some(text) => match parse(text, &name) {
                Some(c) => execute(&c, output),
                None => Ok(ExitCode::from(1)),
            },
        },
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(1)
    })
}
