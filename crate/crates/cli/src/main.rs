#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;
mod commands;
mod error;
mod input;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use cli::{Cli, Command};
use error::{CliError, EXIT_USAGE};

/// Flags from a `--config` JSON object, placed ahead of the command-line
/// flags so that later (explicit) values win.
fn config_flags(path: &str) -> Result<Vec<OsString>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{path}: {e}")))?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{path}: {e}")))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| CliError::Usage(format!("{path}: config must be a JSON object")))?;
    let mut out = Vec::new();
    for (key, value) in obj {
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            serde_json::Value::Bool(true) => out.push(flag.into()),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            serde_json::Value::String(s) => out.extend([flag.into(), s.into()]),
            serde_json::Value::Number(n) => out.extend([flag.into(), n.to_string().into()]),
            _ => return Err(CliError::Usage(format!("{path}: unsupported value for {key:?}"))),
        }
    }
    Ok(out)
}

fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut path = None;
    let mut iter = args.iter().enumerate();
    while let Some((_, a)) = iter.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = iter.next().map(|(_, p)| p.to_string_lossy().into_owned());
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(p.to_owned());
        }
    }
    let Some(path) = path else { return Ok(args) };
    // Insert right after the subcommand name: the first argument that is
    // neither a flag nor the value of `--config`.
    let mut pos = args.len();
    let mut i = 1;
    while i < args.len() {
        let s = args[i].to_string_lossy();
        if s == "--config" {
            i += 2;
        } else if s.starts_with('-') {
            i += 1;
        } else {
            pos = i + 1;
            break;
        }
    }
    let mut out = args[..pos].to_vec();
    out.extend(config_flags(&path)?);
    out.extend_from_slice(&args[pos..]);
    Ok(out)
}

fn run() -> Result<(), CliError> {
    let args = expand_config(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return Ok(());
        }
        Err(e) => {
            let _ = e.print();
            std::process::exit(EXIT_USAGE as i32);
        }
    };
    match &cli.command {
        Command::Calibrate(a) => commands::calibrate(a),
        Command::Train(a) => commands::train(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Curve(a) => commands::curve(a),
        Command::Synth(a) => commands::synth(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
