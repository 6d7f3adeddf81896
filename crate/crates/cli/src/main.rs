mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, FromArgMatches};

use args::{Cli, Command};

/// 1 for invalid input, 2 when any cause in the chain is an I/O error.
fn exit_code(err: &anyhow::Error) -> u8 {
    if err.chain().any(|e| e.downcast_ref::<std::io::Error>().is_some()) {
        2
    } else {
        1
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match &command {
        Command::Convert(a) => commands::convert(a),
        Command::Label(a) => commands::label(a),
        Command::Corrupt(a) => commands::corrupt(a),
        Command::Confusion(c) => commands::confusion(c),
        Command::Sample(a) => commands::sample(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::PrCurve(a) => commands::pr_curve_cmd(a),
        Command::Analyze(c) => commands::analyze(c),
        Command::DiscriminatorData(a) => commands::discriminator(a),
    }
}

fn main() -> ExitCode {
    let version: &'static str = Box::leak(
        format!("{} (format {})", env!("CARGO_PKG_VERSION"), gedkit_core::FORMAT_VERSION).into_boxed_str(),
    );
    let parsed = Cli::command()
        .version(version)
        .try_get_matches()
        .and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    match gedkit_core::pipeline::with_threads(cli.threads, || run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
