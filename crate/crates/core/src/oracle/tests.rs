use super::*;
use crate::kernel::sym;
use crate::parser::{parse_program, parse_stream};

const PI_E: &str = "
    Temp(X, high, T) -> Flag(X, T).
    Flag(X, T), Flag(X, T+1) -> Cool(X, T+1).
    Cool(X, T), Flag(X, T+1) -> Shdn(X, T+1).
    Shdn(X, T) -> Malf(X, T-2).
    #query Malf(X, T).
";

fn setup(program: &str, stream: &str, horizon: u64) -> (crate::kernel::Query, GroundWorld) {
    let parsed = parse_program(program).unwrap();
    let q = parsed.query().unwrap().clone();
    let mut world = GroundWorld::new(q.program.constants(), horizon);
    for block in parse_stream(stream, Some(q.program.clone())).unwrap() {
        world.facts.extend(block.facts);
    }
    let mut constants: BTreeSet<Sym> = world.constants.iter().cloned().collect();
    for f in &world.facts {
        constants.extend(f.args.iter().filter_map(|t| match t {
            Term::Const(c) => Some(c.clone()),
            _ => None,
        }));
    }
    world.constants = constants.into_iter().collect();
    (q, world)
}

fn shown<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> Vec<String> {
    items.into_iter().map(|x| x.to_string()).collect()
}

#[test]
fn running_example_answers() {
    let (q, world) = setup(PI_E, "@0\nTemp(wt25, high, 0).\n@1\nTemp(wt25, high, 1).\n@2\nTemp(wt25, high, 2).\n", 4);
    let pick = |tau| {
        enumerate_hans(&q, &world, tau)
            .unwrap()
            .into_iter()
            .filter(|h| h.theta.get(&sym("X")) == Some(&Term::constant("wt25")))
            .filter(|h| h.hypotheses.iter().all(|l| l.atom.args[1] == Term::constant("high")))
            .collect::<Vec<_>>()
    };
    assert_eq!(
        shown(pick(0)),
        [
            "<{T:=0, X:=wt25}, H={Temp(wt25, high, 1), Temp(wt25, high, 2)}>",
            "<{T:=1, X:=wt25}, H={Temp(wt25, high, 1), Temp(wt25, high, 2), Temp(wt25, high, 3)}>",
            "<{T:=2, X:=wt25}, H={Temp(wt25, high, 2), Temp(wt25, high, 3), Temp(wt25, high, 4)}>",
        ]
    );
    let sans = enumerate_sans(&q, &world, 2).unwrap();
    assert!(sans.iter().any(|a| a.theta.to_string() == "{T:=1, X:=wt25}" && a.hypotheses.len() == 1));
    assert!(sans.iter().any(|a| a.theta.to_string() == "{T:=0, X:=wt25}" && a.hypotheses.is_empty()));
    let model = ground_consequences(&q.program, &world.history(2), &world).unwrap();
    assert!(model.contains(&Atom::new("Malf", vec![Term::constant("wt25"), Term::Time(0)])));
}

#[test]
fn exhaustive_agrees_on_positive_program() {
    let (q, world) = setup(PI_E, "@0\nTemp(wt25, high, 0).\n@1\nTemp(wt25, high, 1).\n", 3);
    for tau in 0..=1 {
        let a = enumerate_hans(&q, &world, tau).unwrap();
        let b = enumerate_hans_exhaustive(&q, &world, tau, 1 << 16).unwrap();
        assert_eq!(shown(&a), shown(&b));
    }
}

#[test]
fn negation_past_and_future() {
    let program = "
        Temp(X, high, T), not Off(X, T) -> Alarm(X, T).
        #query Alarm(X, T).
    ";
    let (q, world) = setup(program, "@0\nTemp(a, high, 0).\n@1\nTemp(a, high, 1).\nOff(a, 1).\n", 2);
    let sans = shown(enumerate_sans(&q, &world, 1).unwrap());
    assert!(sans.contains(&"<{T:=0, X:=a}, H={}, E={Temp(a, high, 0), not Off(a, 0)}>".to_string()));
    assert!(!sans.iter().any(|s| s.starts_with("<{T:=1, X:=a}")));
    let hans = shown(enumerate_hans(&q, &world, 1).unwrap());
    assert!(hans.contains(&"<{T:=2, X:=a}, H={Temp(a, high, 2), not Off(a, 2)}>".to_string()));
}

#[test]
fn unstratified_ground_program() {
    let (q, world) = setup("Tick(T), not P(T) -> P(T).\n#query P(T).", "", 3);
    assert!(matches!(
        ground_consequences(&q.program, &BTreeSet::new(), &world),
        Err(OracleError::NotStratified(_))
    ));
}
