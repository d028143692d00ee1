//! Reader for source programs and queries.

mod ast;
mod convert;
mod lexer;
mod parser;
mod printer;

pub use ast::{ClauseItem, DeclItem, FeatureDecl, FinDomExpr, Item, ItemKind, Pos, SourceTerm};
pub use printer::{print_findom, print_term, quote_atom};
pub(crate) use printer::print_term_pretty;

pub(crate) use parser::Ast;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxErrorKind {
    #[error("unexpected {found}, expected {expected}")]
    Unexpected { found: String, expected: String },
    #[error("unterminated {0}")]
    Unterminated(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("{0}")]
    Invalid(String),
    #[error("empty query")]
    EmptyQuery,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub kind: SyntaxErrorKind,
}

impl SyntaxError {
    pub(crate) fn unexpected(pos: Pos, found: impl Into<String>, expected: &str) -> Self {
        SyntaxError {
            pos,
            kind: SyntaxErrorKind::Unexpected { found: found.into(), expected: expected.to_string() },
        }
    }

    pub(crate) fn unterminated(pos: Pos, what: &str) -> Self {
        SyntaxError { pos, kind: SyntaxErrorKind::Unterminated(what.to_string()) }
    }

    pub(crate) fn unknown_operator(pos: Pos, op: &str) -> Self {
        SyntaxError { pos, kind: SyntaxErrorKind::UnknownOperator(op.to_string()) }
    }

    pub(crate) fn invalid(pos: Pos, msg: impl Into<String>) -> Self {
        SyntaxError { pos, kind: SyntaxErrorKind::Invalid(msg.into()) }
    }
}

fn eof_pos(text: &str) -> Pos {
    let line = text.lines().count().max(1);
    let col = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    Pos::new(line, col)
}

/// Reads the raw terms of every `.`-terminated item in `text`.
pub(crate) fn read_raw(text: &str) -> Result<Vec<(Ast, Pos)>, SyntaxError> {
    let toks = lexer::tokenize(text)?;
    let mut p = parser::Parser::new(toks, eof_pos(text));
    let mut out = Vec::new();
    while !p.at_eof() {
        let pos = p.pos();
        out.push((p.item()?, pos));
    }
    Ok(out)
}

/// Parses a whole program into declarations and clauses, in source order.
pub fn parse_program(text: &str) -> Result<Vec<Item>, SyntaxError> {
    read_raw(text)?
        .into_iter()
        .map(|(ast, pos)| convert::item(&ast, pos).map(|kind| Item { kind, pos }))
        .collect()
}

/// Parses `?- Goal.` or `Goal.` into the flattened goal sequence.
///
/// A missing final `.` is tolerated.
pub fn parse_query(text: &str) -> Result<Vec<SourceTerm>, SyntaxError> {
    let trimmed = text.trim_end();
    if trimmed.is_empty() || trimmed == "?-" || trimmed == "." || trimmed == "?- ." {
        return Err(SyntaxError { pos: Pos::new(1, 1), kind: SyntaxErrorKind::EmptyQuery });
    }
    let owned;
    let src = if trimmed.ends_with('.') && !trimmed.ends_with("..") {
        trimmed
    } else {
        owned = format!("{trimmed}.");
        &owned
    };
    let items = read_raw(src)?;
    match items.as_slice() {
        [(ast, pos)] => convert::query(ast, *pos),
        [] => Err(SyntaxError { pos: Pos::new(1, 1), kind: SyntaxErrorKind::EmptyQuery }),
        [_, (_, pos), ..] => Err(SyntaxError::invalid(*pos, "a query must be a single clause")),
    }
}

/// Parses a single term (no terminating `.` needed).
pub fn parse_term(text: &str) -> Result<SourceTerm, SyntaxError> {
    let goals = parse_query(text)?;
    let mut it = goals.into_iter();
    let first = it.next().expect("parse_query returns at least one goal");
    if it.next().is_some() {
        return Err(SyntaxError::invalid(Pos::new(1, 1), "expected a single term"));
    }
    Ok(first)
}

/// A clause of an emitted program: plain terms only, no feature syntax.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlainClause {
    pub head: SourceTerm,
    pub body: Vec<SourceTerm>,
}

/// Reads a program of plain clauses, giving no operator a feature meaning.
pub fn parse_plain_program(text: &str) -> Result<Vec<PlainClause>, SyntaxError> {
    read_raw(text)?
        .into_iter()
        .map(|(ast, pos)| convert::plain_clause(&ast, pos))
        .collect()
}
