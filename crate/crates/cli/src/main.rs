mod args;
mod commands;
mod error;
mod output;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::{CliError, EXIT_USAGE};
use output::RunManifest;

fn parse(argv: impl IntoIterator<Item = impl Into<OsString> + Clone>) -> Result<Cli, ExitCode> {
    Cli::try_parse_from(argv).map_err(|e| {
        let _ = e.print();
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
            _ => ExitCode::from(EXIT_USAGE),
        }
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Predict(a) => commands::predict(&a),
        Command::Sweep(a) => commands::sweep_cmd(&a),
        Command::Simulate(a) => commands::simulate_cmd(&a),
        Command::Measure(a) => commands::measure_cmd(&a),
        Command::CriticalMu(a) => commands::critical_mu_cmd(&a),
        Command::Nyquist(mut a) => commands::nyquist_cmd(&mut a),
        Command::Replay(a) => {
            let manifest = RunManifest::read(&a.manifest)?;
            if manifest.command == "replay" {
                return Err(CliError::Usage("a manifest cannot replay another replay".into()));
            }
            let out = match (&a.out, manifest.output_path.as_str()) {
                (Some(p), _) => Some(p.clone()),
                (None, "-") => None,
                (None, p) => Some(p.into()),
            };
            let argv = manifest.to_args(out.as_deref());
            let cli = Cli::try_parse_from(&argv)
                .map_err(|e| CliError::Usage(format!("manifest does not parse: {}", e.render())))?;
            run(cli)
        }
    }
}

fn main() -> ExitCode {
    let cli = match parse(std::env::args_os()) {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
