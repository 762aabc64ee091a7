use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::Serialize;

use super::{check_t_stratification, precompute_preconditions, PreconditionEntry, PreprocessConfig, PreprocessError, StratificationReport};
use crate::kernel::{Atom, Program, Query, Sym, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum QueryId {
    Root,
    /// Auxiliary query for a negated predicate.
    Aux(Sym),
}

impl fmt::Display for QueryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryId::Root => write!(f, "root"),
            QueryId::Aux(p) => write!(f, "aux:{p}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct QueryFamily {
    pub root: Query,
    pub auxiliaries: BTreeMap<Sym, Query>,
    pub preconditions: BTreeMap<QueryId, Vec<PreconditionEntry>>,
    pub stratification: StratificationReport,
}

impl QueryFamily {
    pub fn query(&self, id: &QueryId) -> Option<&Query> {
        match id {
            QueryId::Root => Some(&self.root),
            QueryId::Aux(p) => self.auxiliaries.get(p),
        }
    }

    pub fn ids(&self) -> impl Iterator<Item = QueryId> + '_ {
        std::iter::once(QueryId::Root).chain(self.auxiliaries.keys().cloned().map(QueryId::Aux))
    }

    /// Auxiliaries in dependency order, lower strata first.
    pub fn aux_order(&self) -> Vec<Sym> {
        self.stratification
            .order
            .iter()
            .flatten()
            .filter(|p| self.auxiliaries.contains_key(*p))
            .cloned()
            .collect()
    }

    pub fn program(&self) -> &Program {
        &self.root.program
    }
}

/// The most general query for `pred`: fresh variables in every position.
pub fn auxiliary_query(program: &std::sync::Arc<Program>, pred: &Sym) -> Query {
    let info = program.info(pred).copied();
    let arity = info.map_or(0, |i| i.arity);
    let temporal = info.is_some_and(|i| i.temporal);
    let args = (0..arity)
        .map(|i| {
            if temporal && i + 1 == arity {
                Term::time_var("T", 0)
            } else {
                Term::var(&format!("X{}", i + 1))
            }
        })
        .collect();
    Query::new(Atom { pred: pred.clone(), args }, program.clone())
}

fn negated_idb(program: &Program, entries: &[PreconditionEntry]) -> Vec<Sym> {
    let mut out: Vec<Sym> = entries
        .iter()
        .flat_map(|e| e.premises())
        .filter(|l| l.negated && program.is_idb(&l.atom.pred))
        .map(|l| l.atom.pred.clone())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Computes the preconditions of `q` and of an auxiliary query for every
/// negated intensional predicate met in any residual, until no new one
/// appears.
pub fn build_query_family(q: &Query, cfg: &PreprocessConfig) -> Result<QueryFamily, PreprocessError> {
    let stratification = check_t_stratification(&q.program);
    let root_entries = precompute_preconditions(q, cfg)?;
    let mut preconditions = BTreeMap::new();
    let mut auxiliaries = BTreeMap::new();
    let mut queue: VecDeque<Sym> = negated_idb(&q.program, &root_entries).into();
    preconditions.insert(QueryId::Root, root_entries);
    while let Some(pred) = queue.pop_front() {
        if auxiliaries.contains_key(&pred) {
            continue;
        }
        let aux = auxiliary_query(&q.program, &pred);
        let entries = precompute_preconditions(&aux, cfg)?;
        queue.extend(negated_idb(&q.program, &entries));
        auxiliaries.insert(pred.clone(), aux);
        preconditions.insert(QueryId::Aux(pred), entries);
    }
    Ok(QueryFamily {
        root: q.clone(),
        auxiliaries,
        preconditions,
        stratification,
    })
}
