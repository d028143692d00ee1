//! Compiled clauses and the knowledge base that carries them.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::decls::Signature;
use crate::layout::LayoutTable;
use crate::syntax::{self, quote_atom, PlainClause, SourceTerm, SyntaxError};
use crate::term::{Term, VarId};

/// A clause over plain terms. Variables are numbered `0..nvars` locally.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreClause {
    pub head: Term,
    pub body: Vec<Term>,
    pub nvars: u32,
}

impl CoreClause {
    /// Emitted program text for this clause.
    pub fn to_text(&self) -> String {
        let mut names = HashMap::new();
        let mut out = term_text(&self.head, &mut names);
        for (i, g) in self.body.iter().enumerate() {
            out.push_str(if i == 0 { " :-\n    " } else { ",\n    " });
            out.push_str(&goal_text(g, &mut names));
        }
        out.push('.');
        out
    }
}

fn goal_text(g: &Term, names: &mut HashMap<VarId, String>) -> String {
    match g {
        Term::Compound(c) if &*c.functor == "=" && c.args.len() == 2 => {
            format!("{} = {}", term_text(&c.args[0], names), term_text(&c.args[1], names))
        }
        _ => term_text(g, names),
    }
}

fn var_name(i: usize) -> String {
    let letter = (b'A' + (i % 26) as u8) as char;
    if i < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", i / 26)
    }
}

fn term_text(t: &Term, names: &mut HashMap<VarId, String>) -> String {
    match t {
        Term::Var(v) => {
            let n = names.len();
            names.entry(*v).or_insert_with(|| var_name(n)).clone()
        }
        Term::Atom(a) => quote_atom(a),
        Term::Int(n) if *n < 0 => format!("'-'({})", n.unsigned_abs()),
        Term::Int(n) => n.to_string(),
        Term::Compound(c) if &*c.functor == "." && c.args.len() == 2 => {
            let mut out = String::from("[");
            out.push_str(&term_text(&c.args[0], names));
            let mut tail = &c.args[1];
            loop {
                match tail {
                    Term::Compound(d) if &*d.functor == "." && d.args.len() == 2 => {
                        out.push_str(", ");
                        out.push_str(&term_text(&d.args[0], names));
                        tail = &d.args[1];
                    }
                    Term::Atom(a) if &**a == "[]" => break,
                    other => {
                        out.push('|');
                        out.push_str(&term_text(other, names));
                        break;
                    }
                }
            }
            out.push(']');
            out
        }
        Term::Compound(c) => {
            let args: Vec<String> = c.args.iter().map(|a| term_text(a, names)).collect();
            format!("{}({})", quote_atom(&c.functor), args.join(", "))
        }
    }
}

/// Clauses in program order with a predicate index.
#[derive(Clone, Debug, Default)]
pub struct ClauseDb {
    clauses: Vec<CoreClause>,
    index: HashMap<(Arc<str>, usize), Arc<[usize]>>,
}

impl PartialEq for ClauseDb {
    fn eq(&self, other: &Self) -> bool {
        self.clauses == other.clauses
    }
}

impl ClauseDb {
    pub fn new(clauses: Vec<CoreClause>) -> Self {
        let mut index: HashMap<(Arc<str>, usize), Vec<usize>> = HashMap::new();
        for (i, c) in clauses.iter().enumerate() {
            if let Some((f, n)) = c.head.key() {
                index.entry((Arc::from(f), n)).or_default().push(i);
            }
        }
        let index = index.into_iter().map(|(k, v)| (k, Arc::from(v))).collect();
        ClauseDb { clauses, index }
    }

    pub fn clauses(&self) -> &[CoreClause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Clause numbers for a predicate, in program order.
    pub fn lookup(&self, functor: &str, arity: usize) -> Option<Arc<[usize]>> {
        self.index.get(&(Arc::from(functor), arity)).cloned()
    }

    /// Reads emitted program text back into clauses.
    pub fn from_text(text: &str) -> Result<Self, SyntaxError> {
        let clauses = syntax::parse_plain_program(text)?.iter().map(plain_clause).collect();
        Ok(ClauseDb::new(clauses))
    }

    /// The whole program as emitted text, one clause per line group.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.clauses {
            out.push_str(&c.to_text());
            out.push('\n');
        }
        out
    }
}

impl Serialize for ClauseDb {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.clauses.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClauseDb {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Vec::<CoreClause>::deserialize(d).map(ClauseDb::new)
    }
}

fn plain_clause(c: &PlainClause) -> CoreClause {
    let mut vars: HashMap<String, VarId> = HashMap::new();
    let mut next = 0;
    let head = plain_term(&c.head, &mut vars, &mut next);
    let body = c.body.iter().map(|g| plain_term(g, &mut vars, &mut next)).collect();
    CoreClause { head, body, nvars: next }
}

/// Converts a plain source term; named variables are shared, `_` is fresh.
pub(crate) fn plain_term(t: &SourceTerm, vars: &mut HashMap<String, VarId>, next: &mut u32) -> Term {
    match t {
        SourceTerm::Var(v) => {
            if v == "_" {
                *next += 1;
                return Term::Var(*next - 1);
            }
            let id = *vars.entry(v.clone()).or_insert_with(|| {
                *next += 1;
                *next - 1
            });
            Term::Var(id)
        }
        SourceTerm::Atom(a) => Term::atom(a),
        SourceTerm::Int(n) => Term::Int(*n),
        SourceTerm::Compound(f, args) => {
            Term::compound(f, args.iter().map(|a| plain_term(a, vars, next)).collect())
        }
        // the plain reader produces nothing else
        other => Term::atom(&other.to_string()),
    }
}

/// Everything needed to run queries against a compiled program and to
/// print its answers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeBase {
    pub signature: Signature,
    pub layouts: LayoutTable,
    pub program: ClauseDb,
}

pub const KB_FORMAT: &str = "fitc-kb";
pub const KB_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct KbFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    kb: KnowledgeBase,
}

#[derive(Debug, thiserror::Error)]
pub enum KbError {
    #[error("not a compiled knowledge base: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported knowledge base format `{0}` version {1}")]
    Version(String, u32),
}

impl KnowledgeBase {
    pub fn to_json(&self) -> String {
        let file = KbFile { format: KB_FORMAT.to_string(), version: KB_VERSION, kb: self.clone() };
        serde_json::to_string(&file).expect("knowledge base serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, KbError> {
        let file: KbFile = serde_json::from_str(text)?;
        if file.format != KB_FORMAT || file.version != KB_VERSION {
            return Err(KbError::Version(file.format, file.version));
        }
        Ok(file.kb)
    }
}
