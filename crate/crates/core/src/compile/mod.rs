//! Translation of feature-term programs into plain clauses.
//!
//! Compilation runs in three steps per clause: template calls are expanded
//! (relational templates give several alternatives), feature searches are
//! resolved to paths, and the resulting descriptions are translated into
//! plain terms by unifying sort skeletons in a scratch store. Disjunctions
//! and template alternatives multiply out into one clause per consistent
//! combination.

mod search;
mod templates;
mod translate;

use std::fmt;

use thiserror::Error;

use crate::decls::{build_signature, DomainError, Signature, SignatureError};
use crate::engine::{CoreQuery, Store};
use crate::kb::{ClauseDb, CoreClause, KnowledgeBase};
use crate::layout::{compute_layouts, LayoutError, LayoutTable};
use crate::syntax::{self, ClauseItem, Item, ItemKind, Pos, SourceTerm, SyntaxError};
use crate::term::Term;

pub use search::{resolve_search, SearchError};
pub use templates::{expand_templates, Expansion};

/// Compile-time switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CompileOptions {
    /// Unify feature values with the skeletons of their restrictions.
    pub sort_check: bool,
    /// Allow `>>>` feature searches.
    pub feature_search: bool,
    /// Detect and name cycles when printing answers.
    pub cyclic_print: bool,
    /// Print answers one feature per line.
    pub pretty: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { sort_check: true, feature_search: true, cyclic_print: true, pretty: false }
    }
}

/// The broad kind of a compile error, as reported in diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorClass {
    Syntax,
    Signature,
    Template,
    Search,
    Inconsistency,
    EmptyDomain,
}

impl ErrorClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorClass::Syntax => "syntax",
            ErrorClass::Signature => "signature",
            ErrorClass::Template => "template",
            ErrorClass::Search => "search",
            ErrorClass::Inconsistency => "inconsistency",
            ErrorClass::EmptyDomain => "empty-domain",
        }
    }
}

impl fmt::Display for ErrorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("{}", .0.kind)]
    Syntax(SyntaxError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("functor `{0}` is reserved for compiled terms")]
    ReservedFunctor(String),
    #[error("unknown template `@{0}`")]
    UnknownTemplate(String),
    #[error("template `@{name}` is recursive: {chain}")]
    RecursiveTemplate { name: String, chain: String },
    #[error("no definition of template `@{0}` matches the call")]
    NoTemplateMatch(String),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("feature search `>>>{0}` used while feature search is disabled")]
    SearchDisabled(String),
    #[error("the description has no consistent reading")]
    Inconsistent,
    #[error("`{expr}` denotes no element of finite domain `{domain}`")]
    EmptyDomain { expr: String, domain: String },
}

impl From<SyntaxError> for CompileError {
    fn from(e: SyntaxError) -> Self {
        CompileError::Syntax(e)
    }
}

impl From<LayoutError> for CompileError {
    fn from(e: LayoutError) -> Self {
        match e {
            LayoutError::UnknownSort(s) => CompileError::UnknownSort(s),
            LayoutError::UnknownDomain(d) => CompileError::Domain(DomainError::UnknownDomain(d)),
            LayoutError::EmptySubset(domain) => CompileError::EmptyDomain { expr: String::new(), domain },
        }
    }
}

impl CompileError {
    pub fn class(&self) -> ErrorClass {
        match self {
            CompileError::Syntax(_) | CompileError::ReservedFunctor(_) => ErrorClass::Syntax,
            CompileError::Signature(_)
            | CompileError::Domain(_)
            | CompileError::UnknownSort(_)
            | CompileError::UnknownFeature(_) => ErrorClass::Signature,
            CompileError::UnknownTemplate(_)
            | CompileError::RecursiveTemplate { .. }
            | CompileError::NoTemplateMatch(_) => ErrorClass::Template,
            CompileError::Search(_) | CompileError::SearchDisabled(_) => ErrorClass::Search,
            CompileError::Inconsistent => ErrorClass::Inconsistency,
            CompileError::EmptyDomain { .. } => ErrorClass::EmptyDomain,
        }
    }
}

/// A compile error with the position of the item it arose in.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: error[{}]: {error}", .error.class())]
pub struct Diagnostic {
    pub pos: Pos,
    pub error: CompileError,
}

impl Diagnostic {
    pub fn new(pos: Pos, error: impl Into<CompileError>) -> Self {
        Diagnostic { pos, error: error.into() }
    }

    pub fn class(&self) -> ErrorClass {
        self.error.class()
    }

    /// Process exit status for a failed compilation.
    pub fn exit_code(&self) -> i32 {
        1
    }
}

/// Parses and compiles a single program text.
pub fn compile_source(text: &str, opts: &CompileOptions) -> Result<KnowledgeBase, Diagnostic> {
    let items = syntax::parse_program(text).map_err(|e| Diagnostic::new(e.pos, e))?;
    compile_program(&items, opts)
}

/// Compiles declarations and clauses (from any number of files) into a
/// knowledge base. Clauses keep source order; each yields one compiled
/// clause per consistent alternative.
pub fn compile_program(items: &[Item], opts: &CompileOptions) -> Result<KnowledgeBase, Diagnostic> {
    let sig = build_signature(items).map_err(|(pos, e)| Diagnostic::new(pos, e))?;
    templates::check_recursion(&sig).map_err(|(pos, e)| Diagnostic::new(pos, e))?;
    let layouts = compute_layouts(&sig);
    let mut clauses = Vec::new();
    for item in items {
        if let ItemKind::Clause(c) = &item.kind {
            let compiled = compile_clause(&sig, &layouts, opts, c).map_err(|e| Diagnostic::new(item.pos, e))?;
            clauses.extend(compiled);
        }
    }
    Ok(KnowledgeBase { signature: sig, layouts, program: ClauseDb::new(clauses) })
}

/// Compiles one clause into its alternatives.
pub fn compile_clause(
    sig: &Signature,
    table: &LayoutTable,
    opts: &CompileOptions,
    clause: &ClauseItem,
) -> Result<Vec<CoreClause>, CompileError> {
    let mut terms = vec![clause.head.clone()];
    terms.extend(clause.body.iter().cloned());
    let mut out = Vec::new();
    for exp in expand_templates(sig, &terms)? {
        let mut tr = translate::Translator::new(sig, table, opts, &exp);
        tr.compile_all(&exp, &mut |tr, roots| {
            let (mut finished, equations, nvars) = tr.finalize(roots, &[]);
            let head = finished.remove(0);
            let mut body = equations;
            body.extend(finished);
            out.push(CoreClause { head, body, nvars });
        })?;
    }
    if out.is_empty() {
        return Err(CompileError::Inconsistent);
    }
    Ok(out)
}

/// Compiles a query against a knowledge base. A disjunctive query gives
/// several alternatives, to be run one after the other.
pub fn compile_query(kb: &KnowledgeBase, text: &str, opts: &CompileOptions) -> Result<Vec<CoreQuery>, CompileError> {
    let goals = syntax::parse_query(text)?;
    compile_goals(&kb.signature, &kb.layouts, opts, &goals)
}

pub fn compile_goals(
    sig: &Signature,
    table: &LayoutTable,
    opts: &CompileOptions,
    goals: &[SourceTerm],
) -> Result<Vec<CoreQuery>, CompileError> {
    let mut names: Vec<String> = Vec::new();
    for g in goals {
        g.collect_vars(&mut names);
    }
    let mut out = Vec::new();
    for exp in expand_templates(sig, goals)? {
        let mut tr = translate::Translator::new(sig, table, opts, &exp);
        tr.compile_all(&exp, &mut |tr, roots| {
            let named: Vec<_> = names.iter().map(|n| tr.var(n)).collect();
            let (finished, equations, nvars) = tr.finalize(roots, &named);
            let (goals, named) = finished.split_at(roots.len());
            let mut all = equations;
            all.extend(goals.iter().cloned());
            let names = names.iter().cloned().zip(named.iter().cloned()).collect();
            out.push(CoreQuery { goals: all, nvars, names });
        })?;
    }
    if out.is_empty() {
        return Err(CompileError::Inconsistent);
    }
    Ok(out)
}

/// A compiled description, independent of any store.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledTerm {
    pub term: Term,
    /// `V = t` equations that rebuild cyclic structure.
    pub equations: Vec<Term>,
    pub nvars: u32,
    /// Named variables of the description.
    pub names: Vec<(String, Term)>,
}

impl CompiledTerm {
    /// Copies the term into `store` with fresh variables. Returns `None`
    /// only if the cycle equations fail, which cannot happen for terms
    /// produced by the compiler.
    pub fn load(&self, store: &mut Store) -> Option<Term> {
        let base = store.fresh_block(self.nvars as usize);
        for eq in &self.equations {
            let Term::Compound(c) = eq else { return None };
            let (a, b) = (Store::rename(&c.args[0], base), Store::rename(&c.args[1], base));
            if !store.unify(&a, &b) {
                return None;
            }
        }
        Some(Store::rename(&self.term, base))
    }
}

/// Compiles a single description into its alternatives.
pub fn compile_term(
    sig: &Signature,
    table: &LayoutTable,
    opts: &CompileOptions,
    term: &SourceTerm,
) -> Result<Vec<CompiledTerm>, CompileError> {
    let names = term.variables();
    let mut out = Vec::new();
    for exp in expand_templates(sig, std::slice::from_ref(term))? {
        let mut tr = translate::Translator::new(sig, table, opts, &exp);
        tr.compile_all(&exp, &mut |tr, roots| {
            let named: Vec<_> = names.iter().map(|n| tr.var(n)).collect();
            let (finished, equations, nvars) = tr.finalize(roots, &named);
            let names = names.iter().cloned().zip(finished[1..].iter().cloned()).collect();
            out.push(CompiledTerm { term: finished[0].clone(), equations, nvars, names });
        })?;
    }
    if out.is_empty() {
        return Err(CompileError::Inconsistent);
    }
    Ok(out)
}
