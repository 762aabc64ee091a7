use std::collections::{BTreeSet, HashSet};

use super::{canonical_renaming, rename_rule, ComputedAnswer, Limits, ResolutionError, TimeFloors};
use crate::kernel::{is_future_atom, mgu, Atom, Literal, Matcher, Program, Query, Substitution, Sym, Term};

/// Loop checks and finite instantiation used by guarded preprocessing.
#[derive(Clone, Debug, Default)]
pub struct Guard {
    /// Object constants over which body-only object variables are expanded.
    pub universe: Vec<Sym>,
}

#[derive(Clone, Debug)]
pub struct SearchConfig<'a> {
    pub limits: Limits,
    /// Time point of the history; `-1` for the empty history.
    pub tau: i64,
    pub facts: &'a [Atom],
    pub guard: Option<Guard>,
}

impl SearchConfig<'_> {
    pub fn preprocessing(limits: Limits) -> SearchConfig<'static> {
        SearchConfig {
            limits,
            tau: -1,
            facts: &[],
            guard: None,
        }
    }
}

#[derive(Clone, Debug)]
struct Node {
    goal: Vec<Literal>,
    theta: Substitution,
    floors: TimeFloors,
    depth: usize,
    /// Literals before this index are kept as premises.
    decided: usize,
    ancestors: Vec<Atom>,
}

struct Search<'a> {
    program: &'a Program,
    query_vars: BTreeSet<Sym>,
    main_var: Option<Sym>,
    cfg: &'a SearchConfig<'a>,
    edb_facts: Vec<Atom>,
    fresh: usize,
    nodes: usize,
    depth_hit: Option<String>,
    loop_witness: Option<String>,
    seen: HashSet<ComputedAnswer>,
    out: Vec<ComputedAnswer>,
}

fn renames(a: &Atom, b: &Atom) -> bool {
    let mut m = Matcher::new();
    if !m.match_atom(a, b) {
        return false;
    }
    let s = m.into_substitution();
    let mut seen = BTreeSet::new();
    let ok = s
        .iter()
        .all(|(_, t)| matches!(t, Term::Var(_) | Term::TimeVar(_, 0)) && seen.insert(t.clone()));
    ok
}

/// Whether `a` and `b` are equal up to a renaming of variables.
fn is_variant(a: &Atom, b: &Atom) -> bool {
    renames(a, b) && renames(b, a)
}

fn unshift(a: &Atom) -> Atom {
    let mut a = a.clone();
    if let Some(Term::TimeVar(_, k)) = a.args.last_mut() {
        *k = 0;
    }
    a
}

impl<'a> Search<'a> {
    fn select_idb(&self, node: &Node) -> Option<usize> {
        let main = self.main_var.as_ref().map(|m| {
            node.theta
                .apply_term(&Term::TimeVar(m.clone(), 0))
                .unwrap_or(Term::TimeVar(m.clone(), 0))
        });
        let candidates: Vec<usize> = (0..node.goal.len())
            .filter(|&i| !node.goal[i].negated && self.program.is_idb(&node.goal[i].atom.pred))
            .collect();
        let prefers = |i: &usize| match (node.goal[*i].atom.time(), &main) {
            (Some(Term::TimeVar(v, _)), Some(Term::TimeVar(m, _))) => v == m,
            (Some(Term::Time(_)), _) => true,
            (None, _) => true,
            _ => false,
        };
        candidates
            .iter()
            .copied()
            .find(prefers)
            .or_else(|| candidates.first().copied())
    }

    fn emit(&mut self, node: Node) {
        let tau = self.cfg.tau;
        let valid = node
            .goal
            .iter()
            .all(|l| l.negated || is_future_atom(&l.atom, tau));
        if !valid {
            return;
        }
        let rn = canonical_renaming(&self.query_vars, &node.theta, &node.goal);
        let theta = match node.theta.compose(&rn) {
            Ok(t) => t.restrict(&self.query_vars),
            Err(_) => return,
        };
        let premises = match rn.apply_all(&node.goal) {
            Ok(p) => p,
            Err(_) => return,
        };
        let Some(mut floors) = node.floors.apply(&rn) else {
            return;
        };
        let mut live = BTreeSet::new();
        for (_, t) in theta.iter() {
            if let Some(v) = t.variable() {
                live.insert(v.clone());
            }
        }
        for l in &premises {
            l.atom.collect_vars(&mut live);
        }
        floors.retain(|v| live.contains(v));
        let ans = ComputedAnswer {
            theta,
            premises,
            floors,
        };
        if self.seen.insert(ans.clone()) {
            self.out.push(ans);
        }
    }

    fn child(&self, node: &Node, s: &Substitution, goal: Vec<Literal>, deeper: bool) -> Option<Node> {
        let mut floors = node.floors.apply(s)?;
        floors.note_literals(&goal);
        let theta = node.theta.compose(s).ok()?.restrict(&self.query_vars);
        let ancestors = if self.cfg.guard.is_some() {
            node.ancestors.iter().filter_map(|a| s.apply(a).ok()).collect()
        } else {
            Vec::new()
        };
        Some(Node {
            goal,
            theta,
            floors,
            depth: node.depth + usize::from(deeper),
            decided: node.decided,
            ancestors,
        })
    }

    fn expand_idb(&mut self, node: &Node, k: usize, stack: &mut Vec<Node>) {
        let selected = node.goal[k].atom.clone();
        if self.cfg.guard.is_some() {
            for a in &node.ancestors {
                if is_variant(a, &selected) {
                    return;
                }
                if self.loop_witness.is_none()
                    && a.time_var().is_some()
                    && selected.time_var().is_some()
                    && is_variant(&unshift(a), &unshift(&selected))
                {
                    self.loop_witness = Some(format!(
                        "{a} recurs as {selected} under a temporal shift"
                    ));
                }
            }
        }
        if node.depth >= self.cfg.limits.max_depth {
            if self.depth_hit.is_none() {
                self.depth_hit = Some(format!(
                    "depth limit {} reached while resolving {selected}",
                    self.cfg.limits.max_depth
                ));
            }
            return;
        }
        let mut children = Vec::new();
        let clauses: Vec<_> = self.program.rules_for(&selected.pred).cloned().collect();
        for clause in clauses {
            self.fresh += 1;
            let c = rename_rule(&clause, self.fresh);
            let Ok(s) = mgu(&selected, &c.head) else {
                continue;
            };
            let body = node.goal[..k]
                .iter()
                .chain(&c.body)
                .chain(&node.goal[k + 1..]);
            let Ok(goal) = s.apply_all(body) else {
                continue;
            };
            let Some(mut child) = self.child(node, &s, goal, true) else {
                continue;
            };
            if let Ok(head) = s.apply(&c.head) {
                child.floors.note_atom(&head);
            }
            for v in c.time_vars() {
                if let Ok(t) = s.apply_term(&Term::TimeVar(v, 0)) {
                    child.floors.note_term(&t);
                }
            }
            if self.cfg.guard.is_some() {
                if let Ok(a) = s.apply(&selected) {
                    child.ancestors.push(a);
                }
            }
            match &self.cfg.guard {
                Some(guard) if !guard.universe.is_empty() => {
                    let head_vars: BTreeSet<Sym> = c.head.vars().cloned().collect();
                    let fresh_objects: BTreeSet<Sym> = c
                        .body
                        .iter()
                        .flat_map(|l| l.atom.args.iter())
                        .filter_map(|t| match t {
                            Term::Var(v) if !head_vars.contains(v) => Some(v.clone()),
                            _ => None,
                        })
                        .collect();
                    children.extend(instantiate(&child, &fresh_objects, &guard.universe));
                }
                _ => children.push(child),
            }
        }
        stack.extend(children.into_iter().rev());
    }

    fn expand_edb(&mut self, node: Node, stack: &mut Vec<Node>) {
        let i = node.decided;
        if i == node.goal.len() {
            self.emit(node);
            return;
        }
        let lit = node.goal[i].clone();
        let mut children = Vec::new();
        if lit.negated || is_future_atom(&lit.atom, self.cfg.tau) {
            let mut keep = node.clone();
            keep.decided += 1;
            children.push(keep);
        }
        if !lit.negated {
            let facts: Vec<Atom> = self
                .edb_facts
                .iter()
                .chain(self.cfg.facts)
                .filter(|f| f.pred == lit.atom.pred)
                .cloned()
                .collect();
            for f in facts {
                let Ok(s) = mgu(&lit.atom, &f) else {
                    continue;
                };
                let rest = node.goal[..i].iter().chain(&node.goal[i + 1..]);
                let Ok(goal) = s.apply_all(rest) else {
                    continue;
                };
                if let Some(child) = self.child(&node, &s, goal, false) {
                    children.push(child);
                }
            }
        }
        stack.extend(children.into_iter().rev());
    }

    fn run(&mut self, root: Node) -> Result<(), ResolutionError> {
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            self.nodes += 1;
            if self.nodes > self.cfg.limits.max_nodes {
                return Err(self.limit(format!(
                    "node limit {} reached",
                    self.cfg.limits.max_nodes
                )));
            }
            match self.select_idb(&node) {
                Some(k) => self.expand_idb(&node, k, &mut stack),
                None => self.expand_edb(node, &mut stack),
            }
        }
        if let Some(d) = self.depth_hit.clone() {
            return Err(self.limit(d));
        }
        Ok(())
    }

    fn limit(&self, base: String) -> ResolutionError {
        let diagnosis = match &self.loop_witness {
            Some(w) => format!("{base}; possible infinite recursion: {w}"),
            None => base,
        };
        ResolutionError::LimitExceeded {
            partial: self.out.clone(),
            diagnosis,
        }
    }
}

fn instantiate(node: &Node, vars: &BTreeSet<Sym>, universe: &[Sym]) -> Vec<Node> {
    let mut out = vec![node.clone()];
    for v in vars {
        let mut next = Vec::new();
        for n in &out {
            for c in universe {
                let s = Substitution::from_pairs([(v.clone(), Term::Const(c.clone()))]);
                let (Ok(goal), Ok(ancestors)) = (
                    s.apply_all(&n.goal),
                    n.ancestors.iter().map(|a| s.apply(a)).collect::<Result<Vec<_>, _>>(),
                ) else {
                    continue;
                };
                next.push(Node {
                    goal,
                    ancestors,
                    theta: n.theta.compose(&s).unwrap_or_else(|_| n.theta.clone()),
                    ..n.clone()
                });
            }
        }
        out = next;
    }
    out
}

/// Explores the SLD tree of `¬P` over the program and `cfg.facts`, collecting
/// every derivation whose last goal holds only future EDB atoms (and, with
/// negation, negated literals) with respect to `cfg.tau`.
pub fn refute_with_future_premises(
    q: &Query,
    cfg: &SearchConfig<'_>,
) -> Result<Vec<ComputedAnswer>, ResolutionError> {
    let program = &*q.program;
    let edb_facts: Vec<Atom> = program
        .static_facts()
        .filter(|a| program.is_edb(&a.pred))
        .cloned()
        .collect();
    let mut search = Search {
        program,
        query_vars: q.vars(),
        main_var: q.main_time_var().cloned(),
        cfg,
        edb_facts,
        fresh: 0,
        nodes: 0,
        depth_hit: None,
        loop_witness: None,
        seen: HashSet::new(),
        out: Vec::new(),
    };
    let mut floors = TimeFloors::new();
    floors.note_atom(&q.goal);
    let root = Node {
        goal: vec![Literal::pos(q.goal.clone())],
        theta: Substitution::new(),
        floors,
        depth: 0,
        decided: 0,
        ancestors: Vec::new(),
    };
    search.run(root)?;
    Ok(search.out)
}
