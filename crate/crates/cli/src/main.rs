mod cli;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use crate::cli::{Cli, Command};

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

fn run(cli: Cli) -> translit_core::Result<()> {
    let reg = commands::registry(cli.scripts.as_deref())?;
    match cli.command {
        Command::Ingest { script, input, out } => commands::ingest(&reg, &script, &input, &out),
        Command::TrainLm { lex, order, out } => commands::train_lm(&reg, &lex, order, &out),
        Command::LearnTable(args) => commands::learn_table(&reg, &args),
        Command::Classify { profiles, names } => commands::classify(&profiles.profiles, names),
        Command::Transliterate {
            profiles,
            origin,
            k,
            pron_lex,
            no_lookup,
            names,
        } => commands::transliterate(
            &profiles.profiles,
            &origin,
            k,
            pron_lex.as_deref(),
            !no_lookup,
            names,
        ),
        Command::Eval {
            profiles,
            gold,
            k,
            use_gold_origin,
            no_lookup,
        } => commands::eval(&profiles.profiles, &gold, k, use_gold_origin, !no_lookup),
        Command::InspectTrace { trace, all } => commands::inspect_trace(&trace, all),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version go to stdout and succeed; real usage errors exit 1
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    init_logging(cli.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
