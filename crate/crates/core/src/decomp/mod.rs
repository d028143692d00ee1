//! Reading compiled terms back as feature descriptions.
//!
//! A decoded term lists the most specific sorts it was found to have, its
//! informative features and finite-domain values. Nodes reached more than
//! once (through structure sharing or a cycle) are named by a tag variable:
//! the first occurrence is written `Tag & description`, later ones `Tag`.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::compile::CompileOptions;
use crate::decls::{ElementSet, Signature, TOP};
use crate::engine::{Solution, Store};
use crate::kb::KnowledgeBase;
use crate::layout::{LayoutTable, Owner};
use crate::syntax::{print_term, print_term_pretty, FinDomExpr, SourceTerm};
use crate::term::{Compound, Term, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("malformed compiled term: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RenderStyle {
    #[default]
    Plain,
    /// One conjunct per line.
    Pretty,
}

pub fn render(t: &SourceTerm, style: RenderStyle) -> String {
    match style {
        RenderStyle::Plain => print_term(t),
        RenderStyle::Pretty => print_term_pretty(t),
    }
}

/// How many times a node may repeat along one path when cycles are not
/// named.
const UNROLL: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Key {
    /// The identity variable of a sorted node or a domain value.
    Ident(VarId),
    Node(usize),
    Var(VarId),
}

enum Kind {
    Var(VarId),
    Const(Term),
    Sorted(Term),
    Domain(String, Arc<Compound>),
    Plain(Arc<Compound>),
}

/// Decodes terms living in one store. Tags are shared between all terms
/// decoded by the same decoder.
pub struct Decoder<'a> {
    sig: &'a Signature,
    table: &'a LayoutTable,
    store: &'a Store,
    name_cycles: bool,
    counts: HashMap<Key, usize>,
    tags: HashMap<Key, String>,
    reserved: HashSet<String>,
    next_tag: usize,
    on_path: HashMap<Key, usize>,
    truncated: bool,
}

impl<'a> Decoder<'a> {
    pub fn new(sig: &'a Signature, table: &'a LayoutTable, store: &'a Store) -> Self {
        Decoder {
            sig,
            table,
            store,
            name_cycles: true,
            counts: HashMap::new(),
            tags: HashMap::new(),
            reserved: HashSet::new(),
            next_tag: 0,
            on_path: HashMap::new(),
            truncated: false,
        }
    }

    /// With `false`, shared and cyclic nodes are written out in full and
    /// cycles are unrolled a few times, ending in `'...'`.
    pub fn name_cycles(mut self, on: bool) -> Self {
        self.name_cycles = on;
        self
    }

    /// Keeps tags clear of these variable names.
    pub fn reserve<I: IntoIterator<Item = S>, S: Into<String>>(mut self, names: I) -> Self {
        self.reserved.extend(names.into_iter().map(Into::into));
        self
    }

    /// Whether some cycle was cut off.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Decodes several terms together, so that nodes shared between them
    /// get the same tag. Terms carrying no information decode to `_`.
    pub fn decode_all(&mut self, terms: &[Term]) -> Result<Vec<SourceTerm>, DecodeError> {
        for t in terms {
            self.count(t)?;
        }
        terms
            .iter()
            .map(|t| Ok(self.decode(t, None)?.unwrap_or_else(|| SourceTerm::var("_"))))
            .collect()
    }

    pub fn decode_term(&mut self, t: &Term) -> Result<SourceTerm, DecodeError> {
        Ok(self.decode_all(std::slice::from_ref(t))?.remove(0))
    }

    fn classify(&self, t: &Term) -> Result<Kind, DecodeError> {
        let t = self.store.deref(t);
        Ok(match &t {
            Term::Var(v) => Kind::Var(*v),
            Term::Int(_) => Kind::Const(t),
            Term::Atom(a) => match self.table.owner(a, 0) {
                Some(Owner::Sort(_)) => Kind::Sorted(t),
                Some(Owner::Domain(_)) => return Err(DecodeError::Malformed(t.to_string())),
                None if a.starts_with('$') => return Err(DecodeError::Malformed(t.to_string())),
                None => Kind::Const(t),
            },
            Term::Compound(c) => match self.table.owner(&c.functor, c.args.len()) {
                Some(Owner::Sort(s)) => {
                    if self.sig.sorts[s.as_str()].parent.as_deref() != Some(TOP) {
                        return Err(DecodeError::Malformed(t.to_string()));
                    }
                    Kind::Sorted(t.clone())
                }
                Some(Owner::Domain(d)) => Kind::Domain(d.clone(), c.clone()),
                None if c.functor.starts_with('$') => return Err(DecodeError::Malformed(t.to_string())),
                None => Kind::Plain(c.clone()),
            },
        })
    }

    fn key(&self, kind: &Kind) -> Option<Key> {
        match kind {
            Kind::Var(v) => Some(Key::Var(*v)),
            Kind::Const(_) => None,
            Kind::Sorted(t) => {
                let Term::Compound(c) = t else { return None };
                let s = self.table.sort_of(t)?;
                match self.table.sorts[s].identity_slot.map(|i| self.store.deref(&c.args[i])) {
                    Some(Term::Var(v)) => Some(Key::Ident(v)),
                    _ => Some(Key::Node(Arc::as_ptr(c) as usize)),
                }
            }
            Kind::Domain(_, c) => c.args.iter().find_map(|a| match self.store.deref(a) {
                Term::Var(v) => Some(Key::Ident(v)),
                _ => None,
            }),
            Kind::Plain(c) => Some(Key::Node(Arc::as_ptr(c) as usize)),
        }
    }

    /// The feature values of every sort in a sorted node, ancestors first.
    fn features(&self, t: &Term) -> Vec<(String, String, Term)> {
        let mut out = Vec::new();
        for (sort, node) in self.table.sort_tree(self.sig, self.store, t) {
            let Term::Compound(c) = &node else { continue };
            for (f, slot) in &self.table.sorts[&sort].feature_slots {
                out.push((sort.clone(), f.clone(), c.args[*slot].clone()));
            }
        }
        out
    }

    fn count(&mut self, t: &Term) -> Result<(), DecodeError> {
        let kind = self.classify(t)?;
        if let Some(key) = self.key(&kind) {
            let n = self.counts.entry(key).or_insert(0);
            *n += 1;
            if *n > 1 {
                return Ok(());
            }
        }
        match kind {
            Kind::Plain(c) => {
                for a in c.args.iter() {
                    self.count(a)?;
                }
            }
            Kind::Sorted(t) => {
                for (_, _, v) in self.features(&t) {
                    self.count(&v)?;
                }
            }
            _ => {}
        }
        Ok(())
    }

    fn fresh_tag(&mut self) -> String {
        loop {
            let n = self.next_tag;
            self.next_tag += 1;
            let letter = (b'A' + (n % 26) as u8) as char;
            let tag = if n < 26 { letter.to_string() } else { format!("{letter}{}", n / 26) };
            if !self.reserved.contains(&tag) {
                return tag;
            }
        }
    }

    /// `None` when the term adds nothing to what `restriction` implies.
    fn decode(&mut self, t: &Term, restriction: Option<&str>) -> Result<Option<SourceTerm>, DecodeError> {
        let kind = self.classify(t)?;
        let key = self.key(&kind);
        let shared = key.is_some_and(|k| self.counts.get(&k).copied().unwrap_or(0) > 1);
        let tagged = shared && (self.name_cycles || matches!(kind, Kind::Var(_)));
        let mut tag = None;
        if let (true, Some(k)) = (tagged, key) {
            if let Some(existing) = self.tags.get(&k) {
                return Ok(Some(SourceTerm::var(existing.clone())));
            }
            let name = self.fresh_tag();
            self.tags.insert(k, name.clone());
            tag = Some(name);
        }
        let unrolled = !self.name_cycles && !matches!(kind, Kind::Var(_));
        if let (true, Some(k)) = (unrolled, key) {
            let depth = self.on_path.entry(k).or_insert(0);
            if *depth >= UNROLL {
                self.truncated = true;
                return Ok(Some(SourceTerm::atom("...")));
            }
            *depth += 1;
        }
        let body = match kind {
            Kind::Var(_) => None,
            Kind::Const(Term::Int(n)) => Some(SourceTerm::Int(n)),
            Kind::Const(Term::Atom(a)) => Some(SourceTerm::atom(a.to_string())),
            Kind::Const(_) => unreachable!("constants are atoms or integers"),
            Kind::Sorted(t) => self.sorted(&t, restriction)?,
            Kind::Domain(d, c) => self.domain(&d, &Term::Compound(c), restriction)?,
            Kind::Plain(c) => {
                let mut args = Vec::with_capacity(c.args.len());
                for a in c.args.iter() {
                    args.push(self.decode(a, None)?.unwrap_or_else(|| SourceTerm::var("_")));
                }
                Some(SourceTerm::compound(c.functor.to_string(), args))
            }
        };
        if let (true, Some(k)) = (unrolled, key) {
            if let Some(depth) = self.on_path.get_mut(&k) {
                *depth -= 1;
            }
        }
        Ok(match tag {
            Some(tag) => Some(match body {
                Some(b) => SourceTerm::conj(SourceTerm::var(tag), b),
                None => SourceTerm::var(tag),
            }),
            None => body,
        })
    }

    fn sorted(&mut self, t: &Term, restriction: Option<&str>) -> Result<Option<SourceTerm>, DecodeError> {
        let sig = self.sig;
        let tree = self.table.sort_tree(sig, self.store, t);
        let leaves: Vec<&str> = tree
            .iter()
            .map(|(s, _)| s.as_str())
            .filter(|s| !tree.iter().any(|(c, _)| sig.sorts[c].parent.as_deref() == Some(*s)))
            .collect();
        let mut feats = Vec::new();
        let mut introducers = HashSet::new();
        for (sort, f, v) in self.features(t) {
            let r = sig.features[&f].restriction.as_str();
            if let Some(d) = self.decode(&v, (r != TOP).then_some(r))? {
                introducers.insert(sort);
                feats.push(SourceTerm::feat(f, d));
            }
        }
        let mut parts: Vec<SourceTerm> = leaves
            .into_iter()
            .filter(|l| !restriction.is_some_and(|r| sig.is_subsort(r, l)) && !introducers.contains(*l))
            .map(SourceTerm::sort)
            .collect();
        parts.extend(feats);
        Ok(parts.into_iter().rev().reduce(|r, l| SourceTerm::conj(l, r)))
    }

    fn domain(&mut self, d: &str, t: &Term, restriction: Option<&str>) -> Result<Option<SourceTerm>, DecodeError> {
        let set = self.table.decode_subset(d, t, self.store).ok_or_else(|| DecodeError::Malformed(t.to_string()))?;
        let in_context = restriction == Some(d);
        if set.is_full() {
            if in_context {
                return Ok(None);
            }
            let full = SourceTerm::FinDom(FinDomExpr::Annot(Box::new(FinDomExpr::Full), d.to_string()));
            return Ok(Some(SourceTerm::conj(SourceTerm::var("_"), full)));
        }
        let e = subset_expr(self.sig, d, &set);
        let recovered = match &e {
            FinDomExpr::Atom(_) => false,
            _ => matches!(self.sig.infer_domain(&e, None), Ok(Some(ref x)) if x == d),
        };
        let e = if in_context || recovered { e } else { FinDomExpr::Annot(Box::new(e), d.to_string()) };
        Ok(Some(match e {
            FinDomExpr::Atom(a) => match a.parse::<i64>() {
                Ok(n) => SourceTerm::Int(n),
                Err(_) => SourceTerm::atom(a),
            },
            e => SourceTerm::FinDom(e),
        }))
    }
}

/// A non-empty, non-full subset as a disjunction of element conjunctions,
/// elements in domain order.
fn subset_expr(sig: &Signature, domain: &str, set: &ElementSet) -> FinDomExpr {
    let info = &sig.domains[domain];
    // right-nested, as the connectives associate
    let conj = |k: usize| {
        info.elements[k]
            .iter()
            .rev()
            .map(|a| FinDomExpr::Atom(a.clone()))
            .reduce(|r, l| FinDomExpr::And(Box::new(l), Box::new(r)))
            .expect("elements are non-empty tuples")
    };
    let elements: Vec<usize> = set.iter().collect();
    elements
        .into_iter()
        .rev()
        .map(conj)
        .reduce(|r, l| FinDomExpr::Or(Box::new(l), Box::new(r)))
        .expect("subset is not empty")
}

/// A decoded answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub bindings: Vec<(String, SourceTerm)>,
    /// Some cycle was cut off because cycle naming is disabled.
    pub truncated: bool,
}

impl Answer {
    /// `Name = value` lines.
    pub fn lines(&self, style: RenderStyle) -> Vec<String> {
        self.bindings.iter().map(|(n, t)| format!("{n} = {}", render(t, style))).collect()
    }
}

/// Decodes the named variables of a solution. Variables whose names start
/// with `_` are left out.
pub fn decode_solution(kb: &KnowledgeBase, sol: &Solution, opts: &CompileOptions) -> Result<Answer, DecodeError> {
    let shown: Vec<&(String, Term)> = sol.bindings.iter().filter(|(n, _)| !n.starts_with('_')).collect();
    let mut dec = Decoder::new(&kb.signature, &kb.layouts, &sol.store)
        .name_cycles(opts.cyclic_print)
        .reserve(sol.bindings.iter().map(|(n, _)| n.clone()));
    let terms: Vec<Term> = shown.iter().map(|(_, t)| t.clone()).collect();
    let values = dec.decode_all(&terms)?;
    Ok(Answer {
        bindings: shown.iter().map(|(n, _)| n.clone()).zip(values).collect(),
        truncated: dec.truncated(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::{compile_source, compile_term};
    use crate::syntax::parse_term;

    fn show(src: &str, desc: &str) -> String {
        let kb = compile_source(src, &CompileOptions::default()).unwrap();
        let opts = CompileOptions::default();
        let ct = compile_term(&kb.signature, &kb.layouts, &opts, &parse_term(desc).unwrap()).unwrap().remove(0);
        let mut store = Store::new();
        let t = ct.load(&mut store).unwrap();
        let mut dec = Decoder::new(&kb.signature, &kb.layouts, &store);
        print_term(&dec.decode_term(&t).unwrap())
    }

    const SIG: &str = "sign > [word, phrase] intro [synsem:synsem, agr:agr].
        phrase intro [dtr:sign].
        synsem intro [head].
        agr fin_dom [1,2,3] * [sg,pl].";

    #[test]
    fn sorts_and_features() {
        assert_eq!(show(SIG, "<word"), "<word");
        assert_eq!(show(SIG, "dtr!(<word)"), "dtr!<word");
        assert_eq!(show(SIG, "synsem!head!a"), "synsem!head!a");
        assert_eq!(show(SIG, "<sign"), "<sign");
    }

    #[test]
    fn finite_domains() {
        assert_eq!(show(SIG, "agr!(3&sg)"), "agr!(3&sg)");
        assert_eq!(show(SIG, "agr!pl"), "agr!(1&pl or 2&pl or 3&pl)");
        assert_eq!(show(SIG, "agr!(1 or 2)"), "agr!(1&sg or 2&sg or 1&pl or 2&pl)");
        assert_eq!(show(SIG, "agr!(~(3&sg))"), "agr!(1&sg or 2&sg or 1&pl or 2&pl or 3&pl)");
        assert_eq!(show(SIG, "2 or pl"), "2&sg or 1&pl or 2&pl or 3&pl");
        assert_eq!(show(SIG, "pl@agr"), "1&pl or 2&pl or 3&pl");
        assert_eq!(show("d fin_dom [a,b,c].", "a@d"), "a@d");
    }

    #[test]
    fn sharing_and_cycles() {
        assert_eq!(show(SIG, "f(X, X)"), "f(A, A)");
        assert_eq!(show(SIG, "f(X & <word, X)"), "f(A & <word, A)");
        assert_eq!(show(SIG, "X & f(X)"), "A & f(A)");
        assert_eq!(show(SIG, "X & dtr!X"), "A & dtr!A");
    }
}
