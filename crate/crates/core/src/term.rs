//! Plain first-order terms: the target of compilation.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub type VarId = u32;

/// A first-order term. Compound nodes are shared; variables are resolved
/// through a [`Store`](crate::engine::Store).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(VarId),
    Atom(Arc<str>),
    Int(i64),
    Compound(Arc<Compound>),
}

#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Compound {
    pub functor: Arc<str>,
    pub args: Box<[Term]>,
}

impl Term {
    pub fn atom(name: &str) -> Term {
        Term::Atom(Arc::from(name))
    }

    pub fn compound(functor: &str, args: Vec<Term>) -> Term {
        Term::compound_arc(Arc::from(functor), args)
    }

    pub fn compound_arc(functor: Arc<str>, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::Atom(functor)
        } else {
            Term::Compound(Arc::new(Compound { functor, args: args.into_boxed_slice() }))
        }
    }

    /// Functor name and arity; atoms have arity 0.
    pub fn key(&self) -> Option<(&str, usize)> {
        match self {
            Term::Atom(a) => Some((a, 0)),
            Term::Compound(c) => Some((&c.functor, c.args.len())),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// Applies `f` to every variable, rebuilding compounds.
    pub fn map_vars(&self, f: &mut impl FnMut(VarId) -> Term) -> Term {
        match self {
            Term::Var(v) => f(*v),
            Term::Atom(_) | Term::Int(_) => self.clone(),
            Term::Compound(c) => Term::Compound(Arc::new(Compound {
                functor: c.functor.clone(),
                args: c.args.iter().map(|a| a.map_vars(f)).collect(),
            })),
        }
    }

    /// Largest variable id occurring in the term.
    pub fn max_var(&self) -> Option<VarId> {
        match self {
            Term::Var(v) => Some(*v),
            Term::Atom(_) | Term::Int(_) => None,
            Term::Compound(c) => c.args.iter().filter_map(Term::max_var).max(),
        }
    }

    /// Variables in first-occurrence order.
    pub fn vars(&self, out: &mut Vec<VarId>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(*v)
                }
            }
            Term::Atom(_) | Term::Int(_) => {}
            Term::Compound(c) => c.args.iter().for_each(|a| a.vars(out)),
        }
    }
}

/// Writes the term without consulting any bindings; variables print as `_N`.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "_{v}"),
            Term::Atom(a) => f.write_str(&crate::syntax::quote_atom(a)),
            Term::Int(n) => write!(f, "{n}"),
            Term::Compound(c) => {
                write!(f, "{}(", crate::syntax::quote_atom(&c.functor))?;
                for (i, a) in c.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Serialised form of a term.
#[derive(Serialize, Deserialize)]
enum TermRepr {
    V(VarId),
    A(String),
    I(i64),
    C(String, Vec<TermRepr>),
}

impl From<&Term> for TermRepr {
    fn from(t: &Term) -> Self {
        match t {
            Term::Var(v) => TermRepr::V(*v),
            Term::Atom(a) => TermRepr::A(a.to_string()),
            Term::Int(n) => TermRepr::I(*n),
            Term::Compound(c) => TermRepr::C(c.functor.to_string(), c.args.iter().map(TermRepr::from).collect()),
        }
    }
}

impl From<TermRepr> for Term {
    fn from(r: TermRepr) -> Self {
        match r {
            TermRepr::V(v) => Term::Var(v),
            TermRepr::A(a) => Term::atom(&a),
            TermRepr::I(n) => Term::Int(n),
            TermRepr::C(f, args) => Term::compound(&f, args.into_iter().map(Term::from).collect()),
        }
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TermRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        TermRepr::deserialize(d).map(Term::from)
    }
}
