use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, ValueEnum};
use hypo_core::parser::StreamParser;
use hypo_core::{EvalState, OnlineConfig, QueryFamily, QueryId, Retention, TickBlock};

use crate::commands::{compile, load_family, load_program, universe};
use crate::{output, Failure, ModeArg, PrepArgs};

#[derive(ValueEnum, Clone, Copy, Debug, Default)]
pub enum Format {
    #[default]
    Json,
    Human,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    file: PathBuf,
    /// Precompiled query family written by `preprocess`.
    #[arg(long)]
    preconditions: Option<PathBuf>,
    /// Stream file; standard input when absent or `-`.
    #[arg(long)]
    stream: Option<PathBuf>,
    #[command(flatten)]
    prep: PrepArgs,
    /// Drop pending answers this many ticks past their time.
    #[arg(long)]
    delay: Option<u64>,
    /// Forget facts older than this many ticks.
    #[arg(long)]
    window: Option<u64>,
    /// Definite answers to keep: `all` or a count.
    #[arg(long, default_value = "all", value_parser = parse_retention)]
    retention: Retention,
    /// Include the full answer state in every line.
    #[arg(long)]
    dump_state: bool,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn parse_retention(s: &str) -> Result<Retention, String> {
    if s == "all" {
        return Ok(Retention::KeepAll);
    }
    s.parse()
        .map(Retention::KeepLast)
        .map_err(|_| format!("expected `all` or a count, got `{s}`"))
}

fn family(args: &RunArgs) -> Result<QueryFamily, Failure> {
    let parsed = load_program(&args.file)?;
    if let Some(p) = &args.preconditions {
        return load_family(p);
    }
    if matches!(args.prep.mode, ModeArg::Guarded)
        && parsed.program.constants().is_empty()
        && universe(&args.prep.universe).is_empty()
    {
        return Err(Failure::Input(anyhow!(
            "guarded mode needs object constants in the program or --universe"
        )));
    }
    compile(&parsed, &args.prep)
}

struct Emitter<'a> {
    format: Format,
    dump: bool,
    out: std::io::StdoutLock<'a>,
}

impl Emitter<'_> {
    fn tick(&mut self, st: &mut EvalState, block: &TickBlock) -> Result<(), Failure> {
        let d = st.tick_with(block).map_err(|e| Failure::Runtime {
            tick: Some(block.tick),
            error: e.into(),
        })?;
        let state = self.dump.then(|| st.snapshot(&QueryId::Root));
        let line = match self.format {
            Format::Json => format!("{}\n", output::delta(&d, state.as_deref())),
            Format::Human => output::human(&d, state.as_deref()),
        };
        self.out
            .write_all(line.as_bytes())
            .and_then(|_| self.out.flush())
            .map_err(|e| Failure::Runtime {
                tick: Some(block.tick),
                error: e.into(),
            })
    }
}

pub fn run(args: &RunArgs) -> Result<(), Failure> {
    let family = Arc::new(family(args)?);
    let cfg = OnlineConfig {
        universe: universe(&args.prep.universe),
        retention: args.retention,
        delay: args.delay,
        window: args.window,
    };
    let mut st = EvalState::new(family.clone(), cfg);
    let reader: Box<dyn BufRead> = match &args.stream {
        Some(p) if p.as_os_str() != "-" => Box::new(BufReader::new(
            std::fs::File::open(p)
                .with_context(|| format!("cannot open {}", p.display()))
                .map_err(Failure::Input)?,
        )),
        _ => Box::new(BufReader::new(std::io::stdin())),
    };
    let mut parser = StreamParser::new(Some(family.root.program.clone()));
    let mut emit = Emitter {
        format: args.format,
        dump: args.dump_state,
        out: std::io::stdout().lock(),
    };
    let stream_error = |st: &EvalState, e: hypo_core::ParseError| {
        Failure::Input(anyhow::Error::new(e).context(format!("in the stream at tick {}", st.tick() + 1)))
    };
    for line in reader.lines() {
        let line = line
            .context("cannot read the stream")
            .map_err(|error| Failure::Runtime { tick: None, error })?;
        if let Some(block) = parser.push_line(&line).map_err(|e| stream_error(&st, e))? {
            emit.tick(&mut st, &block)?;
        }
    }
    if let Some(block) = parser.finish().map_err(|e| stream_error(&st, e))? {
        emit.tick(&mut st, &block)?;
    }
    Ok(())
}
