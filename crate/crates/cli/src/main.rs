use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use isav_core::harness::{
    compare_schemes, convergence_study, load_config, output_path, preset_names, preset_value, run_simulation,
    series_to_string, study_to_csv, Example, ReferenceSpec, Sweep,
};
use isav_core::Error;

/// Pseudo-spectral SAV / iSAV gradient-flow solver.
#[derive(Parser)]
#[command(name = "isav", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and write its energy series.
    Run {
        config: PathBuf,
        /// Print the expanded configuration and exit.
        #[arg(long)]
        dump_config: bool,
    },
    /// Tabulate H¹ errors and observed orders against a reference run.
    Converge(ConvergeArgs),
    /// Run two configurations side by side and merge their series.
    Compare {
        config_a: PathBuf,
        config_b: PathBuf,
        /// Write the merged CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inspect the built-in experiment presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Args)]
struct ConvergeArgs {
    config: PathBuf,
    /// Time steps to sweep at the configured grid.
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "grids", required_unless_present = "grids")]
    taus: Vec<f64>,
    /// Square grid sizes to sweep at the configured time step.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    grids: Vec<usize>,
    /// Time step of the SAV-BDF reference for time-step sweeps.
    #[arg(long, default_value_t = 1e-5)]
    tau_ref: f64,
    /// Grid size of the reference for grid sweeps.
    #[arg(long, default_value_t = 64)]
    n_ref: usize,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PresetAction {
    /// List preset names.
    List,
    /// Print a preset's configuration document.
    Show { name: String },
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(p) => {
            let p = output_path(p);
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
            }
            std::fs::write(&p, text).map_err(|e| io_error(&p, e))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, dump_config } => {
            let cfg = load_config(&config)?;
            if dump_config {
                print!("{}", cfg.to_json_string());
                return Ok(());
            }
            let out = run_simulation(&cfg)?;
            match &cfg.outputs.series_path {
                Some(p) => eprintln!("wrote {} rows to {}", out.records.len(), output_path(p).display()),
                None => print!("{}", series_to_string(&out.records)?),
            }
            for s in &out.snapshots {
                eprintln!("wrote {}", s.display());
            }
            Ok(())
        }
        Command::Converge(args) => {
            let cfg = load_config(&args.config)?;
            let sweep = if args.grids.is_empty() {
                Sweep::Taus(args.taus)
            } else {
                Sweep::Grids(args.grids)
            };
            let spec = ReferenceSpec {
                tau_ref: args.tau_ref,
                n_ref: args.n_ref,
            };
            let rows = convergence_study(&cfg, &sweep, &spec)?;
            emit(&study_to_csv(&sweep, &rows), args.out.as_deref())
        }
        Command::Compare { config_a, config_b, out } => {
            let a = load_config(&config_a)?;
            let b = load_config(&config_b)?;
            emit(&compare_schemes(&a, &b)?.to_csv(), out.as_deref())
        }
        Command::Presets { action } => {
            match action {
                PresetAction::List => {
                    for ex in Example::ALL {
                        println!("{:<6} {}", ex.name(), ex.description());
                    }
                    for name in preset_names().iter().filter(|n| n.contains('-')) {
                        println!("{name}");
                    }
                }
                PresetAction::Show { name } => {
                    let v = preset_value(&name).ok_or_else(|| Error::Config {
                        path: "preset".into(),
                        message: format!("unknown preset `{name}`"),
                    })?;
                    println!("{v:#}");
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            if e.is_validation() {
                ExitCode::from(2)
            } else if e.is_runtime() {
                ExitCode::from(3)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
