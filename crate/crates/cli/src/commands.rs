use std::io::{Read, Write};
use std::path::Path;

use anyhow::{anyhow, Context};
use hypo_core::kernel::{sym, Sym, Term};
use hypo_core::oracle::{enumerate_hans, enumerate_sans, GroundWorld, OracleError};
use hypo_core::parser::parse_stream;
use hypo_core::preprocess::{check_t_stratification, FamilyDocument};
use hypo_core::resolution::Limits;
use hypo_core::{
    build_query_family, parse_program, validate_program, Mode, ParsedProgram, PreprocessConfig,
    PreprocessError, QueryFamily,
};
use serde_json::json;

use crate::{output, Failure, ModeArg, PrepArgs};

pub fn read_text(path: Option<&Path>) -> Result<String, Failure> {
    let mut text = String::new();
    match path {
        Some(p) if p != Path::new("-") => {
            text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read {}", p.display()))
                .map_err(Failure::Input)?;
        }
        _ => {
            std::io::stdin()
                .read_to_string(&mut text)
                .context("cannot read standard input")
                .map_err(Failure::Input)?;
        }
    }
    Ok(text)
}

pub fn load_program(path: &Path) -> Result<ParsedProgram, Failure> {
    let text = read_text(Some(path))?;
    parse_program(&text)
        .with_context(|| format!("in {}", path.display()))
        .map_err(Failure::Input)
}

fn print_json(v: &serde_json::Value) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json"));
}

pub fn universe(names: &[String]) -> Vec<Sym> {
    names.iter().filter(|n| !n.is_empty()).map(|n| sym(n)).collect()
}

pub fn prep_config(args: &PrepArgs) -> PreprocessConfig {
    let mut limits = Limits::default();
    if let Some(d) = args.max_depth {
        limits.max_depth = d;
    }
    if let Some(n) = args.max_nodes {
        limits.max_nodes = n;
    }
    PreprocessConfig {
        mode: match args.mode {
            ModeArg::Auto => Mode::Auto,
            ModeArg::Strict => Mode::Strict,
            ModeArg::Guarded => Mode::Guarded,
        },
        limits,
        universe: universe(&args.universe),
    }
}

pub fn compile(parsed: &ParsedProgram, args: &PrepArgs) -> Result<QueryFamily, Failure> {
    let q = parsed
        .query()
        .ok_or_else(|| Failure::Input(anyhow!("the program declares no #query")))?;
    build_query_family(q, &prep_config(args)).map_err(|e| match e {
        PreprocessError::LimitExceeded { .. } => Failure::Limits(e.into()),
        other => Failure::Input(other.into()),
    })
}

pub fn check(path: &Path) -> Result<(), Failure> {
    let parsed = load_program(path)?;
    let class = validate_program(&parsed.program, parsed.query())
        .context("validation failed")
        .map_err(Failure::Input)?;
    let reason = match (class.nonrecursive, class.connected) {
        (true, true) => None,
        (false, true) => Some("recursive"),
        (true, false) => Some("not connected"),
        (false, false) => Some("recursive and not connected"),
    };
    let report = check_t_stratification(&parsed.program);
    let counterexample = report
        .counterexample
        .as_ref()
        .map(|c| c.iter().map(|e| e.to_string()).collect::<Vec<_>>());
    let out = json!({
        "queries": parsed.queries.iter().map(|q| q.goal.to_string()).collect::<Vec<_>>(),
        "classification": class,
        "strict": {"eligible": reason.is_none(), "reason": reason},
        "stratification": {
            "stratified": report.stratified,
            "order": report.order,
            "edges": report.edges.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "counterexample": counterexample,
        },
    });
    print_json(&out);
    Ok(())
}

pub fn preprocess(path: &Path, out: &Path, args: &PrepArgs) -> Result<(), Failure> {
    let parsed = load_program(path)?;
    let family = compile(&parsed, args)?;
    std::fs::write(out, FamilyDocument::new(&family).to_json())
        .with_context(|| format!("cannot write {}", out.display()))
        .map_err(|error| Failure::Runtime { tick: None, error })?;
    Ok(())
}

pub fn load_family(path: &Path) -> Result<QueryFamily, Failure> {
    let text = read_text(Some(path))?;
    FamilyDocument::from_json(&text)
        .and_then(|d| d.load())
        .with_context(|| format!("in {}", path.display()))
        .map_err(Failure::Input)
}

pub fn oracle(path: &Path, stream: Option<&Path>, at: i64, horizon: u64, extra: &[String]) -> Result<(), Failure> {
    let parsed = load_program(path)?;
    let q = parsed
        .query()
        .ok_or_else(|| Failure::Input(anyhow!("the program declares no #query")))?;
    let text = match stream {
        Some(_) => read_text(stream)?,
        None => String::new(),
    };
    let blocks = parse_stream(&text, Some(parsed.program.clone()))
        .context("in the stream")
        .map_err(Failure::Input)?;
    let mut constants = parsed.program.constants();
    constants.extend(universe(extra));
    let mut world = GroundWorld::new(Vec::new(), horizon);
    for b in blocks {
        for f in b.facts {
            constants.extend(f.args.iter().filter_map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                _ => None,
            }));
            world.facts.insert(f);
        }
    }
    world.constants = constants.into_iter().collect();
    let fail = |e: OracleError| match e {
        OracleError::BudgetExceeded(_) => Failure::Limits(e.into()),
        OracleError::NotStratified(_) => Failure::Input(e.into()),
    };
    let hans = enumerate_hans(q, &world, at).map_err(fail)?;
    let sans = enumerate_sans(q, &world, at).map_err(fail)?;
    let out = json!({
        "tau": at,
        "horizon": horizon,
        "hans": output::hans(&hans),
        "sans": output::sans(&sans),
    });
    print_json(&out);
    Ok(())
}
