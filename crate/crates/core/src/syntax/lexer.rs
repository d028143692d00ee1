use super::ast::Pos;
use super::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Var(String),
    /// An atom; `quoted` atoms are never read as operators.
    Atom { name: String, quoted: bool },
    Int(i64),
    /// `(` immediately following an atom, opening an argument list.
    OpenCall,
    Open,
    Close,
    OpenList,
    CloseList,
    Bar,
    Comma,
    End,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

/// Symbolic operators recognised inside runs of symbol characters.
/// Ordered longest first so that splitting is greedy.
const SYMBOL_OPS: &[&str] = &[">>>", ":-", "?-", ":=", ">", "<", "*", "&", "!", "~", "@", "=", ":"];

fn is_symbol_char(c: char) -> bool {
    matches!(c, '+' | '-' | '*' | '/' | '\\' | '^' | '<' | '>' | '=' | '~' | ':' | '.' | '?' | '@' | '#' | '&' | '!')
}

fn is_alnum(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

struct Lexer {
    chars: Vec<char>,
    idx: usize,
    line: usize,
    col: usize,
    /// Char index just past the previous token.
    last_end: usize,
}

impl Lexer {
    fn tokens(&mut self, out: &mut Vec<Token>) -> Result<(), SyntaxError> {
        while self.next_token(out)? {}
        Ok(())
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.idx + n).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.idx).copied()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    fn skip_layout(&mut self) -> Result<(), SyntaxError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    let start = self.pos();
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            Some('*') if self.peek() == Some('/') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                            None => return Err(SyntaxError::unterminated(start, "block comment")),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn end_follows(&self, offset: usize) -> bool {
        match self.peek_at(offset) {
            None => true,
            Some(c) => c.is_whitespace() || c == '%',
        }
    }

    fn quoted(&mut self, quote: char) -> Result<String, SyntaxError> {
        let start = self.pos();
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(SyntaxError::unterminated(start, "quoted atom")),
                Some(c) if c == quote => {
                    if self.peek() == Some(quote) {
                        self.bump();
                        out.push(quote);
                    } else {
                        return Ok(out);
                    }
                }
                Some('\\') => match self.bump() {
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some('\\') => out.push('\\'),
                    Some('\'') => out.push('\''),
                    Some('"') => out.push('"'),
                    Some('`') => out.push('`'),
                    Some(c) => {
                        return Err(SyntaxError::invalid(self.pos(), format!("unknown escape `\\{c}`")));
                    }
                    None => return Err(SyntaxError::unterminated(start, "quoted atom")),
                },
                Some(c) => out.push(c),
            }
        }
    }

    fn next_token(&mut self, out: &mut Vec<Token>) -> Result<bool, SyntaxError> {
        self.skip_layout()?;
        let pos = self.pos();
        let Some(c) = self.peek() else {
            return Ok(false);
        };
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, pos });
        match c {
            '(' => {
                let call = matches!(out.last(), Some(Token { tok: Tok::Atom { .. }, .. })) && self.last_end == self.idx;
                self.bump();
                push(out, if call { Tok::OpenCall } else { Tok::Open });
            }
            ')' => {
                self.bump();
                push(out, Tok::Close);
            }
            '[' => {
                self.bump();
                if self.peek() == Some(']') {
                    self.bump();
                    push(out, Tok::Atom { name: "[]".into(), quoted: false });
                } else {
                    push(out, Tok::OpenList);
                }
            }
            ']' => {
                self.bump();
                push(out, Tok::CloseList);
            }
            '|' => {
                self.bump();
                push(out, Tok::Bar);
            }
            ',' => {
                self.bump();
                push(out, Tok::Comma);
            }
            '\'' => {
                let name = self.quoted('\'')?;
                self.last_end = self.idx;
                push(out, Tok::Atom { name, quoted: true });
                return Ok(true);
            }
            '"' => {
                return Err(SyntaxError::invalid(pos, "double-quoted strings are not supported"));
            }
            '`' => {
                self.bump();
                if self.peek() == Some('`') {
                    self.bump();
                    push(out, Tok::Atom { name: "``".into(), quoted: false });
                } else {
                    push(out, Tok::Atom { name: "`".into(), quoted: false });
                }
            }
            '.' if self.end_follows(1) => {
                self.bump();
                push(out, Tok::End);
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(d) = self.peek().filter(|d| d.is_ascii_digit()) {
                    s.push(d);
                    self.bump();
                }
                let n = s
                    .parse::<i64>()
                    .map_err(|_| SyntaxError::invalid(pos, format!("integer `{s}` out of range")))?;
                push(out, Tok::Int(n));
            }
            c if c.is_uppercase() || c == '_' => {
                let mut s = String::new();
                while let Some(d) = self.peek().filter(|d| is_alnum(*d)) {
                    s.push(d);
                    self.bump();
                }
                push(out, Tok::Var(s));
            }
            c if c.is_alphabetic() || (c == '$' && self.peek_at(1).is_some_and(is_alnum)) => {
                let mut s = String::new();
                s.push(c);
                self.bump();
                while let Some(d) = self.peek().filter(|d| is_alnum(*d)) {
                    s.push(d);
                    self.bump();
                }
                push(out, Tok::Atom { name: s, quoted: false });
            }
            c if is_symbol_char(c) => {
                let mut run = String::new();
                while let Some(d) = self.peek().filter(|d| is_symbol_char(*d)) {
                    if d == '.' && self.end_follows(1) {
                        break;
                    }
                    run.push(d);
                    self.bump();
                }
                if run.is_empty() {
                    // a lone '.' that is not an end token
                    return Err(SyntaxError::unknown_operator(pos, "."));
                }
                for op in split_symbols(&run).ok_or_else(|| SyntaxError::unknown_operator(pos, &run))? {
                    push(out, Tok::Atom { name: op.to_string(), quoted: false });
                }
            }
            c => return Err(SyntaxError::invalid(pos, format!("unexpected character `{c}`"))),
        }
        self.last_end = self.idx;
        Ok(true)
    }
}

/// Splits a run of symbol characters into known operators, longest match first.
fn split_symbols(run: &str) -> Option<Vec<&'static str>> {
    let mut rest = run;
    let mut ops = Vec::new();
    while !rest.is_empty() {
        let op = SYMBOL_OPS.iter().find(|op| rest.starts_with(**op))?;
        ops.push(*op);
        rest = &rest[op.len()..];
    }
    Some(ops)
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut lx = Lexer {
        chars: src.chars().collect(),
        idx: 0,
        line: 1,
        col: 1,
        last_end: usize::MAX,
    };
    let mut out = Vec::new();
    lx.tokens(&mut out)?;
    Ok(out)
}
