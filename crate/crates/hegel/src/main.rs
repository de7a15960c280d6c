use std::process::ExitCode;

use clap::Parser;
use hegel::cli::{Cli, Command};
use hegel::{stages, Error};

fn run(cli: Cli) -> Result<(), Error> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .map_err(|e| Error::Usage(format!("cannot start {} worker threads: {e}", cli.threads)))?;
    match &cli.command {
        Command::Ingest(a) => stages::ingest(a).map(drop),
        Command::Oracle(a) => stages::oracle(a),
        Command::BuildGraph(a) => stages::build_graph(a).map(drop),
        Command::Train(a) => stages::train(a).map(drop),
        Command::Summarize(a) => stages::summarize(a).map(drop),
        Command::Evaluate(a) => stages::evaluate(a).map(drop),
        Command::Inspect(a) => stages::inspect(a).map(drop),
        Command::Synth(a) => stages::synth(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
