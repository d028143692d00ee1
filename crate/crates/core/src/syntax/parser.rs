//! Operator-precedence reader over a fixed operator table.
//!
//! The reader produces raw [`Ast`] terms; interpreting operators as feature
//! descriptions happens in `convert`.

use super::ast::Pos;
use super::lexer::{Tok, Token};
use super::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Ast {
    Var(String),
    Atom { name: String, quoted: bool },
    Int(i64),
    /// `quoted` is set when the functor was written as a quoted atom, which
    /// suppresses its operator meaning.
    Compound { name: String, args: Vec<Ast>, quoted: bool },
}

impl Ast {
    pub(crate) fn op(name: &str, args: Vec<Ast>) -> Ast {
        Ast::Compound { name: name.to_string(), args, quoted: false }
    }

    /// Matches an unquoted operator application `name/arity`.
    pub(crate) fn as_op(&self, name: &str, arity: usize) -> Option<&[Ast]> {
        match self {
            Ast::Compound { name: n, args, quoted: false } if n == name && args.len() == arity => Some(args),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Assoc {
    Xfx,
    Xfy,
    Yfx,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum PrefixAssoc {
    Fx,
    Fy,
}

fn infix_op(name: &str) -> Option<(u32, Assoc)> {
    Some(match name {
        ":-" | ":=" => (1200, Assoc::Xfx),
        "intro" => (1160, Assoc::Xfx),
        ">" | "fin_dom" => (1150, Assoc::Xfx),
        "=" => (760, Assoc::Xfx),
        "or" => (740, Assoc::Xfy),
        "&" => (730, Assoc::Xfy),
        ">>>" => (700, Assoc::Xfy),
        "!" => (650, Assoc::Xfy),
        "*" => (400, Assoc::Yfx),
        ":" => (200, Assoc::Xfx),
        "@" => (150, Assoc::Xfx),
        _ => return None,
    })
}

fn prefix_op(name: &str) -> Option<(u32, PrefixAssoc)> {
    Some(match name {
        ":-" | "?-" => (1200, PrefixAssoc::Fx),
        "extensional" => (1150, PrefixAssoc::Fx),
        ">>>" => (650, PrefixAssoc::Fy),
        "~" => (600, PrefixAssoc::Fy),
        "<" | "`" | "``" | "@" => (550, PrefixAssoc::Fy),
        _ => return None,
    })
}

/// True for atoms that the reader treats as operators when unquoted.
pub(crate) fn is_operator(name: &str) -> bool {
    infix_op(name).is_some() || prefix_op(name).is_some() || name == ","
}

const COMMA_PREC: u32 = 1000;
const ARG_PREC: u32 = 999;

pub(crate) struct Parser {
    toks: Vec<Token>,
    idx: usize,
    eof: Pos,
}

impl Parser {
    pub(crate) fn new(toks: Vec<Token>, eof: Pos) -> Self {
        Parser { toks, idx: 0, eof }
    }

    pub(crate) fn at_eof(&self) -> bool {
        self.idx >= self.toks.len()
    }

    pub(crate) fn pos(&self) -> Pos {
        self.toks.get(self.idx).map(|t| t.pos).unwrap_or(self.eof)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|t| &t.tok)
    }

    fn peek_at(&self, n: usize) -> Option<&Tok> {
        self.toks.get(self.idx + n).map(|t| &t.tok)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|t| t.tok.clone());
        self.idx += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.bump();
                Ok(())
            }
            Some(t) => Err(SyntaxError::unexpected(self.pos(), describe(t), what)),
            None => Err(SyntaxError::unterminated(self.pos(), what)),
        }
    }

    /// Reads one item terminated by `.`.
    pub(crate) fn item(&mut self) -> Result<Ast, SyntaxError> {
        let t = self.term(1200)?;
        match self.peek() {
            Some(Tok::End) => {
                self.bump();
                Ok(t)
            }
            Some(tok) => Err(SyntaxError::unexpected(self.pos(), describe(tok), "operator or `.`")),
            None => Err(SyntaxError::unterminated(self.pos(), "clause (missing `.`)")),
        }
    }

    /// True if the next token can begin a term.
    fn starts_term(&self) -> bool {
        match self.peek() {
            Some(Tok::Var(_) | Tok::Int(_) | Tok::Open | Tok::OpenCall | Tok::OpenList) => true,
            Some(Tok::Atom { name, quoted }) => {
                // an infix-only operator begins a term only as a call or a bare atom
                *quoted
                    || !(infix_op(name).is_some() && prefix_op(name).is_none())
                    || matches!(self.peek_at(1), Some(Tok::OpenCall))
                    || is_terminator(self.peek_at(1))
            }
            _ => false,
        }
    }

    pub(crate) fn term(&mut self, max: u32) -> Result<Ast, SyntaxError> {
        let (mut left, mut left_prec) = self.primary(max)?;
        loop {
            let (name, prec, assoc) = match self.peek() {
                Some(Tok::Atom { name, quoted: false }) => match infix_op(name) {
                    Some((p, a)) => (name.clone(), p, a),
                    None => break,
                },
                Some(Tok::Comma) => (",".to_string(), COMMA_PREC, Assoc::Xfy),
                _ => break,
            };
            let (left_max, right_max) = match assoc {
                Assoc::Xfx => (prec - 1, prec - 1),
                Assoc::Xfy => (prec - 1, prec),
                Assoc::Yfx => (prec, prec - 1),
            };
            if prec > max || left_prec > left_max {
                break;
            }
            let op_pos = self.pos();
            self.bump();
            if !self.starts_term() {
                return Err(SyntaxError::unexpected(
                    self.pos(),
                    self.peek().map(describe).unwrap_or_else(|| "end of input".into()),
                    &format!("right operand of `{name}` at {op_pos}"),
                ));
            }
            let right = self.term(right_max)?;
            left = Ast::op(&name, vec![left, right]);
            left_prec = prec;
        }
        Ok(left)
    }

    fn primary(&mut self, max: u32) -> Result<(Ast, u32), SyntaxError> {
        let pos = self.pos();
        let Some(tok) = self.bump() else {
            return Err(SyntaxError::unterminated(pos, "term"));
        };
        match tok {
            Tok::Var(v) => Ok((Ast::Var(v), 0)),
            Tok::Int(n) => Ok((Ast::Int(n), 0)),
            Tok::Open | Tok::OpenCall => {
                let t = self.term(1200)?;
                self.expect(Tok::Close, "`)`")?;
                Ok((t, 0))
            }
            Tok::OpenList => {
                let mut items = vec![self.term(ARG_PREC)?];
                while matches!(self.peek(), Some(Tok::Comma)) {
                    self.bump();
                    items.push(self.term(ARG_PREC)?);
                }
                let tail = if matches!(self.peek(), Some(Tok::Bar)) {
                    self.bump();
                    self.term(ARG_PREC)?
                } else {
                    Ast::Atom { name: "[]".into(), quoted: false }
                };
                self.expect(Tok::CloseList, "`]`")?;
                let list = items
                    .into_iter()
                    .rev()
                    .fold(tail, |acc, item| Ast::op(".", vec![item, acc]));
                Ok((list, 0))
            }
            Tok::Atom { name, quoted } => {
                if matches!(self.peek(), Some(Tok::OpenCall)) {
                    self.bump();
                    let mut args = vec![self.term(ARG_PREC)?];
                    while matches!(self.peek(), Some(Tok::Comma)) {
                        self.bump();
                        args.push(self.term(ARG_PREC)?);
                    }
                    self.expect(Tok::Close, "`,` or `)`")?;
                    return Ok((Ast::Compound { name, args, quoted }, 0));
                }
                if !quoted {
                    if let Some((prec, assoc)) = prefix_op(&name) {
                        if self.starts_term() && !self.next_is_infix_operand() {
                            if prec > max {
                                return Err(SyntaxError::invalid(
                                    pos,
                                    format!("prefix operator `{name}` (priority {prec}) needs parentheses here"),
                                ));
                            }
                            let arg_max = match assoc {
                                PrefixAssoc::Fx => prec - 1,
                                PrefixAssoc::Fy => prec,
                            };
                            let arg = self.term(arg_max)?;
                            return Ok((Ast::op(&name, vec![arg]), prec));
                        }
                    }
                    if infix_op(&name).is_some() && prefix_op(&name).is_none() && !is_terminator(self.peek()) {
                        return Err(SyntaxError::unexpected(pos, format!("operator `{name}`"), "term"));
                    }
                }
                Ok((Ast::Atom { name, quoted }, 0))
            }
            other => Err(SyntaxError::unexpected(pos, describe(&other), "term")),
        }
    }

    /// A prefix operator directly followed by an infix operator is read as an
    /// atom operand, as in `f(< , x)`. Only relevant for symbolic infix atoms.
    fn next_is_infix_operand(&self) -> bool {
        match self.peek() {
            Some(Tok::Atom { name, quoted: false }) => {
                infix_op(name).is_some() && prefix_op(name).is_none() && !matches!(self.peek_at(1), Some(Tok::OpenCall))
            }
            _ => false,
        }
    }
}

fn is_terminator(t: Option<&Tok>) -> bool {
    matches!(t, None | Some(Tok::Close | Tok::Comma | Tok::Bar | Tok::CloseList | Tok::End))
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Var(v) => format!("variable `{v}`"),
        Tok::Atom { name, .. } => format!("`{name}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::OpenCall | Tok::Open => "`(`".into(),
        Tok::Close => "`)`".into(),
        Tok::OpenList => "`[`".into(),
        Tok::CloseList => "`]`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of clause".into(),
    }
}
