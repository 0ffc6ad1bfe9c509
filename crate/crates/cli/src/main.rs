mod commands;
mod job;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::Command;
use job::{JobSpec, Output, Status};

/// Exit codes: 0 ok, 1 a checked property fails, 2 bad input, 3 budget exhausted.
#[derive(Debug, Parser)]
#[command(
    name = "caentropy",
    version,
    about = "Entropy workbench for subshifts, tilings and cellular automata"
)]
struct Cli {
    /// Job directory for reports, images and the manifest.
    #[arg(long, global = true, default_value = "caentropy-out")]
    out: PathBuf,
    /// Worker threads for parallel counting.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed recorded in the manifest.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    action: Action,
}

#[derive(Debug, Subcommand)]
enum Action {
    #[command(flatten)]
    Command(Command),
    /// Run a job file naming a command, its inputs and parameters.
    Job { file: PathBuf },
}

fn run(cli: Cli) -> Result<Status> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.max(1))
        .build_global()
        .context("starting worker threads")?;
    let (command, out, seed) = match cli.action {
        Action::Command(c) => (c, cli.out, cli.seed),
        Action::Job { file } => {
            let job = JobSpec::load(&file)?;
            let base = file.parent().map(PathBuf::from).unwrap_or_default();
            let command = job.resolve(&base)?;
            let out = job.out.as_ref().map_or(cli.out, |o| base.join(o));
            (command, out, job.seed.or(cli.seed))
        }
    };
    let mut output = Output::new(&out)?;
    let status = command.run(&mut output)?;
    output.finish(&command, seed, status)?;
    Ok(status)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err
        .chain()
        .find_map(|e| e.downcast_ref::<caentropy::Error>())
    {
        Some(caentropy::Error::Budget(_)) => 3,
        Some(caentropy::Error::Nondeterministic(_)) => 1,
        _ => 2,
    }
}

/// The error chain, skipping causes already spelled out by their parent.
fn describe(err: &anyhow::Error) -> String {
    let mut parts: Vec<String> = Vec::new();
    for cause in err.chain() {
        let text = cause.to_string();
        if !parts.last().is_some_and(|last| last.contains(&text)) {
            parts.push(text);
        }
    }
    parts.join(": ")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(err) => {
            eprintln!("error: {}", describe(&err));
            ExitCode::from(exit_code(&err))
        }
    }
}
