//! Surface syntax trees produced by the reader.

use std::fmt;

/// A description in the surface language.
///
/// Plain terms (variables, atoms, numbers, compounds) coexist with sorted
/// feature descriptions; a compound argument may be any description and a
/// feature value may be a plain term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SourceTerm {
    /// `<sort`
    SortRef(String),
    /// `feature!value`
    FeatVal(String, Box<SourceTerm>),
    /// `left & right`
    Conj(Box<SourceTerm>, Box<SourceTerm>),
    /// `left or right`
    Disj(Box<SourceTerm>, Box<SourceTerm>),
    /// `@name(args...)`
    TemplateCall(String, Vec<SourceTerm>),
    /// `` `term``: passed through without translation.
    Quote(Box<SourceTerm>),
    /// ``` ``term```: the principal functor is kept, its arguments are translated.
    DoubleQuote(Box<SourceTerm>),
    /// `sort>>>feature!value` or `>>>feature!value`
    Search {
        start: Option<String>,
        feature: String,
        value: Box<SourceTerm>,
    },
    FinDom(FinDomExpr),
    Var(String),
    Atom(String),
    Int(i64),
    Compound(String, Vec<SourceTerm>),
}

/// Boolean combination of finite-domain atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum FinDomExpr {
    Atom(String),
    /// The whole domain, written `Var@domain`.
    Full,
    Annot(Box<FinDomExpr>, String),
    Neg(Box<FinDomExpr>),
    And(Box<FinDomExpr>, Box<FinDomExpr>),
    Or(Box<FinDomExpr>, Box<FinDomExpr>),
}

impl FinDomExpr {
    /// Every atom mentioned, left to right.
    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            FinDomExpr::Atom(a) => out.push(a),
            FinDomExpr::Full => {}
            FinDomExpr::Annot(e, _) | FinDomExpr::Neg(e) => e.collect_atoms(out),
            FinDomExpr::And(l, r) | FinDomExpr::Or(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Domain names given through `@` annotations.
    pub fn annotations(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_annotations(&mut out);
        out
    }

    fn collect_annotations<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            FinDomExpr::Atom(_) | FinDomExpr::Full => {}
            FinDomExpr::Annot(e, d) => {
                out.push(d);
                e.collect_annotations(out);
            }
            FinDomExpr::Neg(e) => e.collect_annotations(out),
            FinDomExpr::And(l, r) | FinDomExpr::Or(l, r) => {
                l.collect_annotations(out);
                r.collect_annotations(out);
            }
        }
    }
}

impl SourceTerm {
    pub fn var(name: impl Into<String>) -> Self {
        SourceTerm::Var(name.into())
    }

    pub fn atom(name: impl Into<String>) -> Self {
        SourceTerm::Atom(name.into())
    }

    pub fn sort(name: impl Into<String>) -> Self {
        SourceTerm::SortRef(name.into())
    }

    pub fn feat(feature: impl Into<String>, value: SourceTerm) -> Self {
        SourceTerm::FeatVal(feature.into(), Box::new(value))
    }

    pub fn conj(left: SourceTerm, right: SourceTerm) -> Self {
        SourceTerm::Conj(Box::new(left), Box::new(right))
    }

    pub fn disj(left: SourceTerm, right: SourceTerm) -> Self {
        SourceTerm::Disj(Box::new(left), Box::new(right))
    }

    pub fn compound(functor: impl Into<String>, args: Vec<SourceTerm>) -> Self {
        SourceTerm::Compound(functor.into(), args)
    }

    /// Builds a proper list with an optional tail.
    pub fn list(items: Vec<SourceTerm>, tail: Option<SourceTerm>) -> Self {
        let mut acc = tail.unwrap_or_else(|| SourceTerm::atom("[]"));
        for item in items.into_iter().rev() {
            acc = SourceTerm::compound(".", vec![item, acc]);
        }
        acc
    }

    /// Variable names in first-occurrence order, without duplicates.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            SourceTerm::Var(v) => {
                if v != "_" && !out.contains(v) {
                    out.push(v.clone());
                }
            }
            SourceTerm::SortRef(_) | SourceTerm::Atom(_) | SourceTerm::Int(_) | SourceTerm::FinDom(_) => {}
            SourceTerm::FeatVal(_, v) => v.collect_vars(out),
            SourceTerm::Conj(l, r) | SourceTerm::Disj(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            SourceTerm::TemplateCall(_, args) | SourceTerm::Compound(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
            SourceTerm::Quote(t) | SourceTerm::DoubleQuote(t) => t.collect_vars(out),
            SourceTerm::Search { value, .. } => value.collect_vars(out),
        }
    }

    /// True when the term contains no template calls.
    pub fn is_expanded(&self) -> bool {
        match self {
            SourceTerm::TemplateCall(..) => false,
            SourceTerm::SortRef(_)
            | SourceTerm::Atom(_)
            | SourceTerm::Int(_)
            | SourceTerm::Var(_)
            | SourceTerm::FinDom(_) => true,
            SourceTerm::FeatVal(_, v) => v.is_expanded(),
            SourceTerm::Conj(l, r) | SourceTerm::Disj(l, r) => l.is_expanded() && r.is_expanded(),
            SourceTerm::Compound(_, args) => args.iter().all(SourceTerm::is_expanded),
            SourceTerm::Quote(_) => true,
            SourceTerm::DoubleQuote(t) => t.is_expanded(),
            SourceTerm::Search { value, .. } => value.is_expanded(),
        }
    }

    /// Flattens a right- or left-nested conjunction into its conjuncts.
    pub fn conjuncts(&self) -> Vec<&SourceTerm> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                SourceTerm::Conj(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
                other => out.push(other),
            }
        }
        out
    }
}

impl fmt::Display for SourceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::printer::print_term(self))
    }
}

/// Position of an item in its source text (1-based).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
    /// Index of the source file among those compiled together.
    #[serde(default)]
    pub file: usize,
}

impl Pos {
    pub fn new(line: usize, col: usize) -> Self {
        Pos { line, col, file: 0 }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A feature introduced by a sort, with the name of its value restriction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureDecl {
    pub feature: String,
    pub restriction: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclItem {
    /// `super > [a,b] * [c,d].`
    Subsort { sort: String, dimensions: Vec<Vec<String>> },
    /// `sort intro [f:r, g].`
    Intro { sort: String, features: Vec<FeatureDecl> },
    /// `super > [a,b] intro [f].`
    Combined {
        sort: String,
        dimensions: Vec<Vec<String>>,
        features: Vec<FeatureDecl>,
    },
    /// `name fin_dom [1,2,3] * [sg,pl].`
    FinDom { name: String, dimensions: Vec<Vec<String>> },
    /// `head := value.`
    Template { head: SourceTerm, body: SourceTerm },
    /// `extensional [s1, s2].`
    Extensional { sorts: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseItem {
    pub head: SourceTerm,
    pub body: Vec<SourceTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ItemKind {
    Decl(DeclItem),
    Clause(ClauseItem),
}

/// One top-level item with the position of its first token.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub kind: ItemKind,
    pub pos: Pos,
}
