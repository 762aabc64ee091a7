use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{check_t_stratification, GroupKey, PreconditionEntry, QueryFamily, QueryId, StratificationReport};
use crate::kernel::{sym, Literal, Query, Substitution};
use crate::parser::{parse_literal, parse_program, parse_term, ParseError};
use crate::resolution::TimeFloors;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryDocument {
    pub theta: BTreeMap<String, String>,
    pub m_groups: BTreeMap<String, Vec<String>>,
    pub f_rest: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub floors: BTreeMap<String, u64>,
}

/// Serialized form of a [`QueryFamily`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDocument {
    pub version: u32,
    pub program: String,
    pub root: String,
    pub auxiliaries: BTreeMap<String, String>,
    pub preconditions: BTreeMap<String, Vec<EntryDocument>>,
    #[serde(skip_deserializing)]
    pub stratification: Option<StratificationReport>,
}

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("unsupported document version {0}")]
    Version(u32),
    #[error("invalid document: {0}")]
    Invalid(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn strings(lits: &[Literal]) -> Vec<String> {
    lits.iter().map(|l| l.to_string()).collect()
}

impl EntryDocument {
    fn new(e: &PreconditionEntry) -> EntryDocument {
        EntryDocument {
            theta: e.theta.iter().map(|(v, t)| (v.to_string(), t.to_string())).collect(),
            m_groups: e.m_groups.iter().map(|(k, ls)| (k.to_string(), strings(ls))).collect(),
            f_rest: strings(&e.f_rest),
            floors: e.floors.iter().map(|(v, k)| (v.to_string(), *k)).collect(),
        }
    }

    fn load(&self, q: &Query) -> Result<PreconditionEntry, DocumentError> {
        let p = &*q.program;
        let main = q.main_time_var();
        let mut theta = Vec::new();
        for (v, t) in &self.theta {
            let temporal = main.is_some_and(|m| **m == **v);
            theta.push((sym(v), parse_term(t, temporal)?));
        }
        let lits = |xs: &[String]| -> Result<Vec<Literal>, ParseError> { xs.iter().map(|s| parse_literal(s, p)).collect() };
        let mut m_groups = BTreeMap::new();
        for (k, ls) in &self.m_groups {
            let key = if k == "@" { GroupKey::Ground } else { GroupKey::Var(sym(k)) };
            m_groups.insert(key, lits(ls)?);
        }
        let mut floors = TimeFloors::new();
        for (v, k) in &self.floors {
            floors.raise(&sym(v), *k);
        }
        Ok(PreconditionEntry {
            theta: Substitution::from_pairs(theta),
            m_groups,
            f_rest: lits(&self.f_rest)?,
            floors,
        })
    }
}

impl FamilyDocument {
    pub fn new(f: &QueryFamily) -> FamilyDocument {
        FamilyDocument {
            version: FORMAT_VERSION,
            program: f.program().to_string(),
            root: f.root.goal.to_string(),
            auxiliaries: f
                .auxiliaries
                .iter()
                .map(|(p, q)| (p.to_string(), q.goal.to_string()))
                .collect(),
            preconditions: f
                .preconditions
                .iter()
                .map(|(id, es)| (id.to_string(), es.iter().map(EntryDocument::new).collect()))
                .collect(),
            stratification: Some(f.stratification.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<FamilyDocument, DocumentError> {
        let doc: FamilyDocument = serde_json::from_str(text)?;
        if doc.version != FORMAT_VERSION {
            return Err(DocumentError::Version(doc.version));
        }
        Ok(doc)
    }

    /// Rebuilds the family, re-parsing the embedded program.
    pub fn load(&self) -> Result<QueryFamily, DocumentError> {
        let parsed = parse_program(&self.program)?;
        let program = parsed.program;
        let goal = |s: &str| -> Result<Query, DocumentError> {
            let l = parse_literal(s, &program)?;
            if l.negated {
                return Err(DocumentError::Invalid(format!("negated query {s}")));
            }
            Ok(Query::new(l.atom, program.clone()))
        };
        let root = goal(&self.root)?;
        let mut auxiliaries = BTreeMap::new();
        for (p, g) in &self.auxiliaries {
            auxiliaries.insert(sym(p), goal(g)?);
        }
        let mut preconditions = BTreeMap::new();
        for (id, es) in &self.preconditions {
            let (qid, q) = match id.strip_prefix("aux:") {
                None if id == "root" => (QueryId::Root, &root),
                Some(p) => match auxiliaries.get(p) {
                    Some(q) => (QueryId::Aux(sym(p)), q),
                    None => return Err(DocumentError::Invalid(format!("no auxiliary query for {p}"))),
                },
                None => return Err(DocumentError::Invalid(format!("unknown query id {id}"))),
            };
            let entries = es.iter().map(|e| e.load(q)).collect::<Result<Vec<_>, _>>()?;
            preconditions.insert(qid, entries);
        }
        Ok(QueryFamily {
            stratification: check_t_stratification(&program),
            root,
            auxiliaries,
            preconditions,
        })
    }
}
