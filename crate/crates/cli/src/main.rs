mod commands;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "hypo", version, about = "Continuous Temporal Datalog queries over fact streams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and classify a program, and check its stratification.
    Check { file: PathBuf },
    /// Compile the query's preconditions to a file.
    Preprocess {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        prep: PrepArgs,
    },
    /// Evaluate the query over a stream, one output line per tick.
    Run(run::RunArgs),
    /// Enumerate hypothetical and supported answers by brute force.
    Oracle {
        file: PathBuf,
        /// Stream file; `-` reads standard input.
        #[arg(long)]
        stream: Option<PathBuf>,
        #[arg(long)]
        at: i64,
        #[arg(long)]
        horizon: u64,
        #[arg(long, value_delimiter = ',')]
        universe: Vec<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, Default)]
pub enum ModeArg {
    #[default]
    Auto,
    Strict,
    Guarded,
}

#[derive(Args, Debug, Clone)]
pub struct PrepArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    #[arg(long)]
    pub max_depth: Option<usize>,
    #[arg(long)]
    pub max_nodes: Option<usize>,
    /// Extra object constants, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub universe: Vec<String>,
}

/// A failure together with its exit status.
#[derive(Debug)]
pub enum Failure {
    Input(anyhow::Error),
    Limits(anyhow::Error),
    Runtime { tick: Option<u64>, error: anyhow::Error },
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Limits(_) => 3,
            Failure::Runtime { .. } => 4,
        }
    }

    fn report(&self) -> serde_json::Value {
        let (kind, e, tick) = match self {
            Failure::Input(e) => ("input", e, None),
            Failure::Limits(e) => ("limits", e, None),
            Failure::Runtime { tick, error } => ("runtime", error, *tick),
        };
        let mut v = serde_json::json!({"error": kind, "message": format!("{e:#}")});
        if let Some(t) = tick {
            v["tick"] = serde_json::json!(t);
        }
        v
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Check { file } => commands::check(&file),
        Command::Preprocess { file, output, prep } => commands::preprocess(&file, &output, &prep),
        Command::Run(args) => run::run(&args),
        Command::Oracle {
            file,
            stream,
            at,
            horizon,
            universe,
        } => commands::oracle(&file, stream.as_deref(), at, horizon, &universe),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.report());
            ExitCode::from(f.code())
        }
    }
}
