//! Flat-term encodings of sorts and finite domains.
//!
//! A sort `s` is encoded by the functor `$s`. Its arguments are an identity
//! slot (only on intensional immediate subsorts of top), one slot per
//! dimension of subsorts, and one slot per feature introduced at `s`. A
//! subsort's term sits in its parent's dimension slot, so the encoding of a
//! sort is an instance of the encoding of each of its ancestors.
//!
//! A finite domain of `n` elements is encoded by `n+1` arguments framed by
//! the anchors `1` and `0`. Element `k` owns the argument pair `(k, k+1)`;
//! an element is excluded by unifying its pair, so unification of two
//! encodings computes the intersection of the sets they denote.

use std::collections::HashMap;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decls::{ElementSet, Signature, TOP};
use crate::engine::Store;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("unknown finite domain `{0}`")]
    UnknownDomain(String),
    #[error("empty subset of finite domain `{0}`")]
    EmptySubset(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortLayout {
    pub functor: String,
    pub arity: usize,
    pub identity_slot: Option<usize>,
    pub dimension_slots: Vec<usize>,
    pub feature_slots: IndexMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainLayout {
    pub functor: String,
    pub arity: usize,
    pub first_anchor: i64,
    pub last_anchor: i64,
}

impl DomainLayout {
    /// Argument positions owned by element `k`.
    pub fn pair_of(&self, k: usize) -> (usize, usize) {
        (k, k + 1)
    }
}

/// What a `$`-functor stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Owner {
    Sort(String),
    Domain(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "LayoutData", into = "LayoutData")]
pub struct LayoutTable {
    pub sorts: IndexMap<String, SortLayout>,
    pub domains: IndexMap<String, DomainLayout>,
    by_functor: HashMap<(String, usize), Owner>,
}

#[derive(Serialize, Deserialize)]
struct LayoutData {
    sorts: IndexMap<String, SortLayout>,
    domains: IndexMap<String, DomainLayout>,
}

impl From<LayoutData> for LayoutTable {
    fn from(d: LayoutData) -> Self {
        LayoutTable::assemble(d.sorts, d.domains)
    }
}

impl From<LayoutTable> for LayoutData {
    fn from(t: LayoutTable) -> Self {
        LayoutData { sorts: t.sorts, domains: t.domains }
    }
}

/// Lays out every declared sort (except top) and every finite domain.
pub fn compute_layouts(sig: &Signature) -> LayoutTable {
    let mut sorts = IndexMap::new();
    for (name, info) in &sig.sorts {
        if name == TOP {
            continue;
        }
        let mut next = 0;
        let identity_slot = if info.parent.as_deref() == Some(TOP) && !info.extensional {
            next = 1;
            Some(0)
        } else {
            None
        };
        let dimension_slots: Vec<usize> = (next..next + info.dimensions.len()).collect();
        next += info.dimensions.len();
        let feature_slots: IndexMap<String, usize> =
            info.intro_features.iter().enumerate().map(|(i, (f, _))| (f.clone(), next + i)).collect();
        next += feature_slots.len();
        sorts.insert(
            name.clone(),
            SortLayout { functor: format!("${name}"), arity: next, identity_slot, dimension_slots, feature_slots },
        );
    }
    let domains = sig
        .domains
        .iter()
        .map(|(name, d)| {
            (name.clone(), DomainLayout { functor: format!("${name}"), arity: d.len() + 1, first_anchor: 1, last_anchor: 0 })
        })
        .collect();
    LayoutTable::assemble(sorts, domains)
}

impl LayoutTable {
    fn assemble(sorts: IndexMap<String, SortLayout>, domains: IndexMap<String, DomainLayout>) -> Self {
        let mut by_functor = HashMap::new();
        for (s, l) in &sorts {
            by_functor.insert((l.functor.clone(), l.arity), Owner::Sort(s.clone()));
        }
        for (d, l) in &domains {
            by_functor.insert((l.functor.clone(), l.arity), Owner::Domain(d.clone()));
        }
        LayoutTable { sorts, domains, by_functor }
    }

    pub fn sort(&self, name: &str) -> Option<&SortLayout> {
        self.sorts.get(name)
    }

    pub fn domain(&self, name: &str) -> Option<&DomainLayout> {
        self.domains.get(name)
    }

    /// The sort or domain encoded by a functor, if any.
    pub fn owner(&self, functor: &str, arity: usize) -> Option<&Owner> {
        self.by_functor.get(&(functor.to_string(), arity))
    }

    /// The sort whose encoding has this principal functor.
    pub fn sort_of(&self, t: &Term) -> Option<&str> {
        let (f, n) = t.key()?;
        match self.owner(f, n)? {
            Owner::Sort(s) => Some(s),
            Owner::Domain(_) => None,
        }
    }

    fn node(&self, sort: &str, args: Vec<Term>) -> Term {
        Term::compound(&self.sorts[sort].functor, args)
    }

    /// The most general term of `sort`; a fresh variable for top.
    pub fn skeleton(&self, sig: &Signature, sort: &str, store: &mut Store) -> Result<Term, LayoutError> {
        if sort == TOP {
            return Ok(store.fresh());
        }
        if !self.sorts.contains_key(sort) {
            return Err(LayoutError::UnknownSort(sort.to_string()));
        }
        let chain = sig.chain(sort);
        let mut inner: Option<(Term, usize)> = None;
        for s in chain.iter().rev() {
            let layout = &self.sorts[*s];
            let mut args: Vec<Term> = (0..layout.arity).map(|_| store.fresh()).collect();
            if let Some((child, dim)) = inner.take() {
                args[layout.dimension_slots[dim]] = child;
            }
            let t = self.node(s, args);
            inner = Some((t, sig.sorts[*s].parent_dimension));
        }
        Ok(inner.expect("non-top sorts have a chain").0)
    }

    /// The most general term satisfying a feature restriction: a sort
    /// skeleton, the full encoding of a finite domain, or a variable for top.
    pub fn restriction_skeleton(&self, sig: &Signature, name: &str, store: &mut Store) -> Result<Term, LayoutError> {
        if let Some(d) = sig.domain(name) {
            return self.encode_subset(name, &ElementSet::full(d.len()), store);
        }
        self.skeleton(sig, name, store)
    }

    /// Finds the subterm encoding `sort` inside `term`, following the
    /// dimension slots of its ancestors. The result is a compound, or an
    /// atom for sorts whose encoding has no arguments.
    pub fn sort_node(&self, sig: &Signature, store: &Store, term: &Term, sort: &str) -> Option<Term> {
        let chain = sig.chain(sort);
        let mut cur = store.deref(term);
        for (i, s) in chain.iter().enumerate() {
            let layout = self.sorts.get(*s)?;
            if cur.key() != Some((layout.functor.as_str(), layout.arity)) {
                return None;
            }
            if i + 1 == chain.len() {
                return Some(cur);
            }
            let Term::Compound(c) = &cur else { return None };
            let dim = sig.sorts[chain[i + 1]].parent_dimension;
            cur = store.deref(&c.args[layout.dimension_slots[dim]]);
        }
        None
    }

    /// Every sort instantiated in the encoding rooted at `term`, ancestors
    /// first, each paired with its subterm. Empty if `term` does not encode a
    /// sorted structure.
    pub fn sort_tree(&self, sig: &Signature, store: &Store, term: &Term) -> Vec<(String, Term)> {
        let root = store.deref(term);
        let Some(s) = self.sort_of(&root) else { return Vec::new() };
        if sig.sorts[s].parent.as_deref() != Some(TOP) {
            return Vec::new();
        }
        let mut out = vec![(s.to_string(), root)];
        let mut i = 0;
        while i < out.len() {
            let (sort, t) = out[i].clone();
            i += 1;
            let Term::Compound(c) = &t else { continue };
            let layout = &self.sorts[&sort];
            for (di, slot) in layout.dimension_slots.iter().enumerate() {
                let sub = store.deref(&c.args[*slot]);
                if let Some(name) = self.sort_of(&sub) {
                    let info = &sig.sorts[name];
                    if info.parent.as_deref() == Some(sort.as_str()) && info.parent_dimension == di {
                        out.push((name.to_string(), sub));
                    }
                }
            }
        }
        out
    }

    /// The most specific sorts of `term`: one per instantiated dimension.
    pub fn leaf_sorts(&self, sig: &Signature, store: &Store, term: &Term) -> Vec<String> {
        let tree = self.sort_tree(sig, store, term);
        tree.iter()
            .filter(|(s, _)| !tree.iter().any(|(c, _)| sig.sorts[c].parent.as_deref() == Some(s.as_str())))
            .map(|(s, _)| s.clone())
            .collect()
    }

    /// Encodes a subset of a finite domain.
    pub fn encode_subset(&self, domain: &str, set: &ElementSet, store: &mut Store) -> Result<Term, LayoutError> {
        let layout = self.domains.get(domain).ok_or_else(|| LayoutError::UnknownDomain(domain.to_string()))?;
        if set.is_empty() {
            return Err(LayoutError::EmptySubset(domain.to_string()));
        }
        // Excluded elements merge their two positions, so the classes of
        // positions are intervals numbered left to right.
        let n = layout.arity - 1;
        let mut class = vec![0usize; n + 1];
        for k in 0..n {
            class[k + 1] = if set.contains(k) { class[k] + 1 } else { class[k] };
        }
        let last = class[n];
        let mut vars: Vec<Term> = (0..=last).map(|_| Term::Int(0)).collect();
        vars[0] = Term::Int(layout.first_anchor);
        vars[last] = Term::Int(layout.last_anchor);
        for v in vars.iter_mut().take(last).skip(1) {
            *v = store.fresh();
        }
        let args = class.iter().map(|c| vars[*c].clone()).collect();
        Ok(Term::compound(&layout.functor, args))
    }

    /// Reads back the subset denoted by a domain encoding: element `k` is
    /// present unless its two arguments are identical. `None` if the term is
    /// not an encoding of `domain`.
    pub fn decode_subset(&self, domain: &str, term: &Term, store: &Store) -> Option<ElementSet> {
        let layout = self.domains.get(domain)?;
        let Term::Compound(c) = store.deref(term) else { return None };
        if *c.functor != *layout.functor || c.args.len() != layout.arity {
            return None;
        }
        let n = layout.arity - 1;
        Some(ElementSet::from_fn(n, |k| !store.identical(&c.args[k], &c.args[k + 1])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decls::build_signature;
    use crate::syntax::parse_program;

    fn setup(src: &str) -> (Signature, LayoutTable) {
        let sig = build_signature(&parse_program(src).unwrap()).unwrap();
        let table = compute_layouts(&sig);
        (sig, table)
    }

    const SIGN: &str = "sign > [lexical,phrasal] intro [phon, synsem, qstore, retrieved].
        phrasal > [headed,non_headed] * [decl,int,rel] intro [daughters].
        agr fin_dom [1,2,3] * [sg,pl].
        list > [elist, nelist]. nelist intro [hd, tl:list]. extensional [list].";

    #[test]
    fn sign_and_phrasal() {
        let (_, t) = setup(SIGN);
        let sign = t.sort("sign").unwrap();
        assert_eq!((sign.functor.as_str(), sign.arity, sign.identity_slot), ("$sign", 6, Some(0)));
        assert_eq!(sign.dimension_slots, [1]);
        assert_eq!(sign.feature_slots["retrieved"], 5);
        let ph = t.sort("phrasal").unwrap();
        assert_eq!((ph.arity, ph.identity_slot), (3, None));
        assert_eq!(ph.dimension_slots, [0, 1]);
        assert_eq!(t.domain("agr").unwrap().arity, 7);
        // extensional: no identity slot, leaf sorts become atoms
        assert_eq!(t.sort("list").unwrap().arity, 1);
        assert_eq!(t.sort("elist").unwrap().arity, 0);
    }

    #[test]
    fn skeletons() {
        let (sig, t) = setup(SIGN);
        let mut s = Store::new();
        assert!(t.skeleton(&sig, "top", &mut s).unwrap().is_var());
        let ph = t.skeleton(&sig, "phrasal", &mut s).unwrap();
        let Term::Compound(c) = &ph else { panic!() };
        assert_eq!(&*c.functor, "$sign");
        assert_eq!(c.args[1].key(), Some(("$phrasal", 3)));
        let el = t.skeleton(&sig, "elist", &mut s).unwrap();
        assert_eq!(el.to_string(), "'$list'('$elist')");
        assert!(t.sort_node(&sig, &s, &ph, "phrasal").is_some());
        assert!(t.sort_node(&sig, &s, &ph, "lexical").is_none());
    }

    #[test]
    fn sibling_sorts_clash() {
        let (sig, t) = setup(SIGN);
        let mut s = Store::new();
        let a = t.skeleton(&sig, "lexical", &mut s).unwrap();
        let b = t.skeleton(&sig, "phrasal", &mut s).unwrap();
        assert!(!s.unify(&a, &b));
        let h = t.skeleton(&sig, "headed", &mut s).unwrap();
        let d = t.skeleton(&sig, "decl", &mut s).unwrap();
        assert!(s.unify(&h, &d));
        assert!(t.sort_node(&sig, &s, &h, "decl").is_some());
    }

    #[test]
    fn two_or_pl() {
        let (sig, t) = setup(SIGN);
        let mut s = Store::new();
        let set = ElementSet::from_indices(6, [1, 3, 4, 5]);
        let enc = t.encode_subset("agr", &set, &mut s).unwrap();
        let Term::Compound(c) = &enc else { panic!() };
        assert_eq!(c.args[0], Term::Int(1));
        assert_eq!(c.args[1], Term::Int(1));
        assert_eq!(c.args[2], c.args[3]);
        assert!(c.args[2].is_var());
        assert_eq!(c.args[6], Term::Int(0));
        assert_eq!(t.decode_subset("agr", &enc, &s).unwrap(), set);
        assert!(t.encode_subset("agr", &ElementSet::empty(6), &mut s).is_err());
        let _ = sig;
    }

    #[test]
    fn full_and_tail_exclusion() {
        let (_, t) = setup(SIGN);
        let mut s = Store::new();
        let full = t.encode_subset("agr", &ElementSet::full(6), &mut s).unwrap();
        assert_eq!(t.decode_subset("agr", &full, &s).unwrap(), ElementSet::full(6));
        let first = ElementSet::from_indices(6, [0]);
        let enc = t.encode_subset("agr", &first, &mut s).unwrap();
        let Term::Compound(c) = &enc else { panic!() };
        assert!(c.args[1..].iter().all(|a| *a == Term::Int(0)));
        assert_eq!(t.decode_subset("agr", &enc, &s).unwrap(), first);
    }
}
