use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod presets;
mod run;

use config::{ExperimentConfig, SchemaError};
use run::{execute, Failure, Options};

#[derive(Parser)]
#[command(name = "altham", version, about = "Alternating minimization with altered Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Overrides the config's top-level seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: the config's `out_dir`, else `out/<name>`).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Repetitions run in parallel.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML config.
    Run {
        config: PathBuf,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Print or run a named configuration.
    Preset {
        name: String,
        /// Print the configuration as TOML (the default).
        #[arg(long, conflicts_with = "run")]
        emit_config: bool,
        #[arg(long)]
        run: bool,
        /// Use the long variant where one exists.
        #[arg(long)]
        full: bool,
        #[command(flatten)]
        args: RunArgs,
    },
    /// List preset names.
    Presets,
}

fn go(mut cfg: ExperimentConfig, name: &str, args: RunArgs, base_dir: &Path) -> Result<(), Failure> {
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let out_dir = args
        .out_dir
        .or_else(|| cfg.out_dir.as_ref().map(|d| base_dir.join(d)))
        .unwrap_or_else(|| Path::new("out").join(name));
    let opts = Options { out_dir, workers: args.workers.max(1), base_dir: base_dir.to_path_buf() };
    for r in execute(&cfg, &opts)? {
        println!("{}", r.line(cfg.kind));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Run { config, args } => std::fs::read_to_string(&config)
            .map_err(|e| Failure::Schema(SchemaError { key: config.display().to_string(), msg: e.to_string() }))
            .and_then(|text| config::parse(&text).map_err(Failure::Schema))
            .and_then(|cfg| {
                let name = config.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
                let dir = config.parent().map(Path::to_path_buf).unwrap_or_default();
                go(cfg, &name, args, &dir)
            }),
        Command::Preset { name, emit_config: _, run, full, args } => match presets::preset(&name, full) {
            None => Err(Failure::Schema(SchemaError {
                key: "preset".into(),
                msg: format!("unknown preset `{name}` (known: {})", presets::NAMES.join(", ")),
            })),
            Some(cfg) if run => {
                cfg.validate().map_err(Failure::Schema).and_then(|_| go(cfg, &name, args, Path::new(".")))
            }
            Some(mut cfg) => {
                if let Some(s) = args.seed {
                    cfg.seed = s;
                }
                print!("{}", config::to_toml(&cfg));
                Ok(())
            }
        },
        Command::Presets => {
            for n in presets::NAMES {
                println!("{n}");
            }
            Ok(())
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
