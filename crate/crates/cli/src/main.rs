mod commands;
mod config;

use std::fs;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use fraclest::Error;

use config::{Cli, RunConfig};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BLOWUP: u8 = 3;
const EXIT_DEGENERATE: u8 = 4;
const EXIT_SURROGATE: u8 = 5;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_)
        | Error::InvalidGrid(_)
        | Error::UnsupportedWidth(_)
        | Error::Spectrum(_) => EXIT_USAGE,
        Error::Blowup { .. } => EXIT_BLOWUP,
        Error::Degenerate(_) => EXIT_DEGENERATE,
        Error::Fit(_) | Error::Data(_) => EXIT_SURROGATE,
        _ => EXIT_FAILURE,
    }
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn resolve(cli: Cli) -> Result<RunConfig, String> {
    match (cli.config, cli.command) {
        (Some(_), Some(_)) => Err("--config cannot be combined with a subcommand".into()),
        (Some(path), None) => {
            let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
        }
        (None, Some(command)) => Ok(RunConfig {
            threads: cli.threads,
            log_level: cli.log_level,
            command,
        }),
        (None, None) => Err(format!("a subcommand is required\n\n{}", Cli::command().render_help())),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let dump = cli.dump_config.clone();
    let cfg = match resolve(cli) {
        Ok(c) => c,
        Err(msg) => return usage(&msg),
    };
    if let Some(path) = dump {
        let text = serde_json::to_string_pretty(&cfg).expect("config serializes");
        if let Err(e) = fs::write(&path, text + "\n") {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(EXIT_FAILURE);
        }
        return ExitCode::SUCCESS;
    }

    env_logger::Builder::new()
        .parse_filters(&cfg.log_level)
        .format_timestamp(None)
        .init();
    if let Some(n) = cfg.threads {
        if n == 0 {
            return usage("--threads must be at least 1");
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already initialized: {e}");
        }
    }

    match commands::run(&cfg.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
