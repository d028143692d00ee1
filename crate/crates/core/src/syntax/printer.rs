//! Prints source terms in a form the reader accepts again.

use super::ast::{FinDomExpr, SourceTerm};
use super::parser::is_operator;

/// Quotes an atom when it would not read back as the same atom.
pub fn quote_atom(name: &str) -> String {
    let mut chars = name.chars();
    let plain = match chars.next() {
        Some(c) if c.is_lowercase() => chars.all(|c| c.is_alphanumeric() || c == '_'),
        _ => false,
    };
    if (plain && !is_operator(name)) || name == "[]" {
        return name.to_string();
    }
    let mut out = String::with_capacity(name.len() + 2);
    out.push('\'');
    for c in name.chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('\'');
    out
}

/// Single-line rendering.
pub fn print_term(t: &SourceTerm) -> String {
    let mut p = Printer { out: String::new(), pretty: false };
    p.term(t, 1200, 0);
    p.out
}

/// Multi-line rendering: one conjunct per line, two spaces per feature depth.
pub(crate) fn print_term_pretty(t: &SourceTerm) -> String {
    let mut p = Printer { out: String::new(), pretty: true };
    p.term(t, 1200, 0);
    p.out
}

pub fn print_findom(e: &FinDomExpr) -> String {
    let mut p = Printer { out: String::new(), pretty: false };
    p.findom(e, 1200);
    p.out
}

struct Printer {
    out: String,
    pretty: bool,
}

fn int_text(n: i64) -> String {
    if n < 0 {
        format!("'-'({})", n.unsigned_abs())
    } else {
        n.to_string()
    }
}

impl Printer {
    fn open(&mut self, need: bool) {
        if need {
            self.out.push('(');
        }
    }

    fn close(&mut self, need: bool) {
        if need {
            self.out.push(')');
        }
    }

    fn term(&mut self, t: &SourceTerm, max: u32, depth: usize) {
        match t {
            SourceTerm::Var(v) => self.out.push_str(v),
            SourceTerm::Atom(a) => self.out.push_str(&quote_atom(a)),
            SourceTerm::Int(n) => self.out.push_str(&int_text(*n)),
            SourceTerm::SortRef(s) => {
                self.open(max < 550);
                self.out.push('<');
                self.out.push_str(&quote_atom(s));
                self.close(max < 550);
            }
            SourceTerm::FeatVal(f, v) => {
                self.open(max < 650);
                self.out.push_str(&quote_atom(f));
                self.out.push('!');
                self.term(v, 650, depth + 1);
                self.close(max < 650);
            }
            SourceTerm::Conj(l, r) => {
                // Var@domain is written compactly
                if let (SourceTerm::Var(v), SourceTerm::FinDom(FinDomExpr::Annot(e, d))) = (&**l, &**r) {
                    if **e == FinDomExpr::Full {
                        self.open(max < 150);
                        self.out.push_str(v);
                        self.out.push('@');
                        self.out.push_str(&quote_atom(d));
                        self.close(max < 150);
                        return;
                    }
                }
                let paren = max < 730;
                self.open(paren);
                self.term(l, 729, depth);
                if self.pretty {
                    self.out.push_str(" &\n");
                    self.out.push_str(&" ".repeat(2 * (depth + 1)));
                } else {
                    self.out.push_str(" & ");
                }
                self.term(r, 730, depth);
                self.close(paren);
            }
            SourceTerm::Disj(l, r) => {
                let paren = max < 740;
                self.open(paren);
                self.term(l, 739, depth);
                self.out.push_str(" or ");
                self.term(r, 740, depth);
                self.close(paren);
            }
            SourceTerm::TemplateCall(name, args) => {
                self.open(max < 550);
                self.out.push('@');
                self.out.push_str(&quote_atom(name));
                self.args(args, depth);
                self.close(max < 550);
            }
            SourceTerm::Quote(inner) => {
                self.open(max < 550);
                self.out.push('`');
                self.raw(inner);
                self.close(max < 550);
            }
            SourceTerm::DoubleQuote(inner) => {
                self.open(max < 550);
                self.out.push_str("``");
                match &**inner {
                    SourceTerm::Compound(f, args) => {
                        self.out.push_str(&quote_atom(f));
                        self.args(args, depth);
                    }
                    other => self.raw(other),
                }
                self.close(max < 550);
            }
            SourceTerm::Search { start, feature, value } => {
                let prec = if start.is_some() { 700 } else { 650 };
                self.open(max < prec);
                if let Some(s) = start {
                    self.out.push_str(&quote_atom(s));
                }
                self.out.push_str(">>>");
                self.out.push_str(&quote_atom(feature));
                self.out.push('!');
                self.term(value, 650, depth + 1);
                self.close(max < prec);
            }
            SourceTerm::FinDom(e) => match e {
                FinDomExpr::Annot(inner, d) if **inner == FinDomExpr::Full => {
                    self.open(max < 150);
                    self.out.push_str("_@");
                    self.out.push_str(&quote_atom(d));
                    self.close(max < 150);
                }
                _ => self.findom(e, max),
            },
            SourceTerm::Compound(f, args) => self.compound(f, args, max, depth),
        }
    }

    fn args(&mut self, args: &[SourceTerm], depth: usize) {
        if args.is_empty() {
            return;
        }
        self.out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.out.push_str(", ");
            }
            self.term(a, 999, depth);
        }
        self.out.push(')');
    }

    fn compound(&mut self, f: &str, args: &[SourceTerm], max: u32, depth: usize) {
        if f == "." && args.len() == 2 {
            self.list(args, depth, false);
            return;
        }
        if f == "=" && args.len() == 2 {
            let paren = max < 760;
            self.open(paren);
            self.term(&args[0], 759, depth);
            self.out.push_str(" = ");
            self.term(&args[1], 759, depth);
            self.close(paren);
            return;
        }
        self.out.push_str(&quote_atom(f));
        if args.is_empty() {
            // a zero-argument compound reads back as an atom
            return;
        }
        self.args(args, depth);
    }

    fn list(&mut self, cell: &[SourceTerm], depth: usize, raw: bool) {
        self.out.push('[');
        let mut head = &cell[0];
        let mut tail = &cell[1];
        loop {
            if raw {
                self.raw(head);
            } else {
                self.term(head, 999, depth);
            }
            match tail {
                SourceTerm::Compound(f, next) if f == "." && next.len() == 2 => {
                    self.out.push_str(", ");
                    head = &next[0];
                    tail = &next[1];
                }
                SourceTerm::Atom(a) if a == "[]" => break,
                other => {
                    self.out.push('|');
                    if raw {
                        self.raw(other);
                    } else {
                        self.term(other, 999, depth);
                    }
                    break;
                }
            }
        }
        self.out.push(']');
    }

    /// Canonical notation: every compound in functional form.
    fn raw(&mut self, t: &SourceTerm) {
        match t {
            SourceTerm::Compound(f, args) if f == "." && args.len() == 2 => self.list(args, 0, true),
            SourceTerm::Compound(f, args) => {
                self.out.push_str(&quote_atom(f));
                if !args.is_empty() {
                    self.out.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            self.out.push_str(", ");
                        }
                        self.raw(a);
                    }
                    self.out.push(')');
                }
            }
            other => self.term(other, 0, 0),
        }
    }

    fn findom(&mut self, e: &FinDomExpr, max: u32) {
        match e {
            FinDomExpr::Atom(a) => match a.parse::<i64>() {
                Ok(n) if n >= 0 && n.to_string() == *a => self.out.push_str(a),
                _ => self.out.push_str(&quote_atom(a)),
            },
            FinDomExpr::Full => self.out.push('_'),
            FinDomExpr::Annot(inner, d) => {
                self.open(max < 150);
                self.findom(inner, 149);
                self.out.push('@');
                self.out.push_str(&quote_atom(d));
                self.close(max < 150);
            }
            FinDomExpr::Neg(inner) => {
                self.open(max < 600);
                self.out.push('~');
                let wrap = !matches!(**inner, FinDomExpr::Atom(_));
                self.open(wrap);
                self.findom(inner, if wrap { 1200 } else { 600 });
                self.close(wrap);
                self.close(max < 600);
            }
            FinDomExpr::And(l, r) => {
                self.open(max < 730);
                self.findom(l, 729);
                self.out.push('&');
                self.findom(r, 730);
                self.close(max < 730);
            }
            FinDomExpr::Or(l, r) => {
                self.open(max < 740);
                self.findom(l, 739);
                self.out.push_str(" or ");
                self.findom(r, 740);
                self.close(max < 740);
            }
        }
    }
}
