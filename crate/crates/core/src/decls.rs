//! Sort hierarchy, feature appropriateness, finite domains and templates.

use std::collections::{BTreeSet, HashMap};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{DeclItem, FinDomExpr, Item, ItemKind, Pos, SourceTerm};

pub const TOP: &str = "top";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("sort `{0}` is defined more than once")]
    DuplicateSort(String),
    #[error("features of sort `{0}` are declared more than once")]
    DuplicateIntro(String),
    #[error("sort hierarchy contains a cycle through `{0}`")]
    Cycle(String),
    #[error("sort `{sort}` appears as a subsort of both `{first}` and `{second}`")]
    MultipleParents { sort: String, first: String, second: String },
    #[error("feature `{feature}` is introduced at both `{first}` and `{second}`")]
    DuplicateFeature { feature: String, first: String, second: String },
    #[error("feature `{feature}` has unknown restriction `{restriction}`")]
    UnknownRestriction { feature: String, restriction: String },
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("`{0}` names both a sort and a finite domain")]
    NameCollision(String),
    #[error("finite domain `{domain}` lists `{element}` more than once")]
    DuplicateDomainElement { domain: String, element: String },
    #[error("finite domain `{0}` is declared more than once")]
    DuplicateDomain(String),
    #[error("`{0}` is not an immediate subsort of top and cannot be declared extensional")]
    ExtensionalNotTopLevel(String),
    #[error("top may have only one dimension of subsorts")]
    TopDimensions,
    #[error("sort `{0}` cannot be redefined: `top` is implicit")]
    TopRedefined(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("unknown finite domain `{0}`")]
    UnknownDomain(String),
    #[error("`{atom}` is not an element of finite domain `{domain}`")]
    AtomNotInDomain { atom: String, domain: String },
    #[error("`{atom}` belongs to several finite domains ({candidates}); annotate it with @Domain")]
    Ambiguous { atom: String, candidates: String },
    #[error("conflicting domain annotations `{0}` and `{1}`")]
    ConflictingAnnotations(String, String),
    #[error("cannot determine the finite domain of `{0}`; annotate it with @Domain")]
    NoDomain(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortInfo {
    /// `None` only for `top`.
    pub parent: Option<String>,
    pub parent_dimension: usize,
    pub dimensions: Vec<Vec<String>>,
    pub intro_features: Vec<(String, String)>,
    pub extensional: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureInfo {
    pub introducer: String,
    pub restriction: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainInfo {
    pub dimensions: Vec<Vec<String>>,
    /// All element tuples, first dimension varying fastest.
    pub elements: Vec<Vec<String>>,
}

impl DomainInfo {
    fn new(dimensions: Vec<Vec<String>>) -> Self {
        let mut elements: Vec<Vec<String>> = vec![Vec::new()];
        for dim in &dimensions {
            let mut next = Vec::with_capacity(elements.len() * dim.len());
            for value in dim {
                for prefix in &elements {
                    let mut e = prefix.clone();
                    e.push(value.clone());
                    next.push(e);
                }
            }
            elements = next;
        }
        DomainInfo { dimensions, elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains_atom(&self, atom: &str) -> bool {
        self.dimensions.iter().any(|d| d.iter().any(|a| a == atom))
    }

    /// The set of elements whose tuple mentions `atom`.
    pub fn atom_set(&self, atom: &str) -> ElementSet {
        ElementSet::from_fn(self.len(), |i| self.elements[i].iter().any(|a| a == atom))
    }
}

/// A subset of a finite domain's elements, indexed in domain order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet {
    bits: Vec<bool>,
}

impl ElementSet {
    pub fn empty(n: usize) -> Self {
        ElementSet { bits: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        ElementSet { bits: vec![true; n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        ElementSet { bits: (0..n).map(f).collect() }
    }

    pub fn from_indices(n: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in idx {
            s.bits[i] = true;
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn insert(&mut self, i: usize) {
        self.bits[i] = true;
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    pub fn is_full(&self) -> bool {
        self.bits.iter().all(|b| *b)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i)
    }

    pub fn complement(&self) -> Self {
        ElementSet { bits: self.bits.iter().map(|b| !b).collect() }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        ElementSet { bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a && *b).collect() }
    }

    pub fn union(&self, other: &Self) -> Self {
        ElementSet { bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a || *b).collect() }
    }
}

/// A template definition `head := body`, with its source position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateDef {
    pub name: String,
    pub params: Vec<SourceTerm>,
    pub body: SourceTerm,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub sorts: IndexMap<String, SortInfo>,
    pub features: IndexMap<String, FeatureInfo>,
    pub domains: IndexMap<String, DomainInfo>,
    /// Keyed by `name/arity`; definitions in source order.
    pub templates: IndexMap<String, Vec<TemplateDef>>,
}

impl Default for Signature {
    fn default() -> Self {
        let mut sorts = IndexMap::new();
        sorts.insert(
            TOP.to_string(),
            SortInfo {
                parent: None,
                parent_dimension: 0,
                dimensions: Vec::new(),
                intro_features: Vec::new(),
                extensional: false,
            },
        );
        Signature { sorts, features: IndexMap::new(), domains: IndexMap::new(), templates: IndexMap::new() }
    }
}

/// Builds and validates a signature from the declarations among `items`.
/// Clauses are ignored.
pub fn build_signature(items: &[Item]) -> Result<Signature, (Pos, SignatureError)> {
    let decls: Vec<(Pos, &DeclItem)> = items
        .iter()
        .filter_map(|it| match &it.kind {
            ItemKind::Decl(d) => Some((it.pos, d)),
            ItemKind::Clause(_) => None,
        })
        .collect();
    build_from_decls(&decls)
}

fn build_from_decls(decls: &[(Pos, &DeclItem)]) -> Result<Signature, (Pos, SignatureError)> {
    let mut sig = Signature::default();
    // sort -> (dimensions, pos)
    let mut defs: IndexMap<String, (Vec<Vec<String>>, Pos)> = IndexMap::new();
    let mut intros: IndexMap<String, (Vec<(String, String)>, Pos)> = IndexMap::new();
    let mut extensional: Vec<(String, Pos)> = Vec::new();
    // Every name seen as a sort, in order of first appearance.
    let mut mentioned: IndexMap<String, Pos> = IndexMap::new();

    for (pos, d) in decls {
        let pos = *pos;
        match d {
            DeclItem::Subsort { sort, dimensions } | DeclItem::Combined { sort, dimensions, .. } => {
                if defs.contains_key(sort) {
                    return Err((pos, SignatureError::DuplicateSort(sort.clone())));
                }
                mentioned.entry(sort.clone()).or_insert(pos);
                for s in dimensions.iter().flatten() {
                    mentioned.entry(s.clone()).or_insert(pos);
                }
                defs.insert(sort.clone(), (dimensions.clone(), pos));
            }
            _ => {}
        }
        match d {
            DeclItem::Intro { sort, features } | DeclItem::Combined { sort, features, .. } => {
                if intros.contains_key(sort) {
                    return Err((pos, SignatureError::DuplicateIntro(sort.clone())));
                }
                mentioned.entry(sort.clone()).or_insert(pos);
                let feats = features.iter().map(|f| (f.feature.clone(), f.restriction.clone())).collect();
                intros.insert(sort.clone(), (feats, pos));
            }
            DeclItem::FinDom { name, dimensions } => {
                if sig.domains.contains_key(name) {
                    return Err((pos, SignatureError::DuplicateDomain(name.clone())));
                }
                let mut seen = BTreeSet::new();
                for a in dimensions.iter().flatten() {
                    if !seen.insert(a.clone()) {
                        return Err((
                            pos,
                            SignatureError::DuplicateDomainElement { domain: name.clone(), element: a.clone() },
                        ));
                    }
                }
                sig.domains.insert(name.clone(), DomainInfo::new(dimensions.clone()));
            }
            DeclItem::Extensional { sorts } => {
                for s in sorts {
                    extensional.push((s.clone(), pos));
                }
            }
            DeclItem::Template { head, body } => {
                let (name, params) = match head {
                    SourceTerm::Atom(a) => (a.clone(), Vec::new()),
                    SourceTerm::Compound(f, args) => (f.clone(), args.clone()),
                    _ => unreachable!("reader only produces atom or compound template heads"),
                };
                sig.templates.entry(template_key(&name, params.len())).or_default().push(TemplateDef {
                    name,
                    params,
                    body: body.clone(),
                    pos,
                });
            }
            DeclItem::Subsort { .. } => {}
        }
    }

    // Parent links.
    let mut parent: HashMap<String, (String, usize, Pos)> = HashMap::new();
    for (sort, (dims, pos)) in &defs {
        if sort == TOP && dims.len() > 1 {
            return Err((*pos, SignatureError::TopDimensions));
        }
        for (di, dim) in dims.iter().enumerate() {
            for sub in dim {
                if sub == TOP {
                    return Err((*pos, SignatureError::TopRedefined(sort.clone())));
                }
                if sub == sort {
                    return Err((*pos, SignatureError::Cycle(sort.clone())));
                }
                if let Some((first, _, _)) = parent.get(sub) {
                    // same parent listed twice: only a cycle check can make sense of it
                    return Err((
                        *pos,
                        SignatureError::MultipleParents { sort: sub.clone(), first: first.clone(), second: sort.clone() },
                    ));
                }
                parent.insert(sub.clone(), (sort.clone(), di, *pos));
            }
        }
    }

    // Cycles: follow parent links from every sort.
    for start in parent.keys() {
        let mut seen = BTreeSet::new();
        let mut cur = start.as_str();
        while let Some((p, _, pos)) = parent.get(cur) {
            if !seen.insert(cur.to_string()) {
                return Err((*pos, SignatureError::Cycle(cur.to_string())));
            }
            cur = p;
        }
    }

    // Sorts without a parent hang under top, in first-mention order.
    let mut roots: Vec<String> = defs
        .get(TOP)
        .map(|(dims, _)| dims.first().cloned().unwrap_or_default())
        .unwrap_or_default();
    for (name, _) in &mentioned {
        if name != TOP && !parent.contains_key(name) && !roots.contains(name) {
            roots.push(name.clone());
        }
    }
    for r in &roots {
        parent.entry(r.clone()).or_insert((TOP.to_string(), 0, Pos::default()));
    }
    sig.sorts[TOP].dimensions = if roots.is_empty() { Vec::new() } else { vec![roots.clone()] };

    // Insert sorts top-down so that parents precede children.
    let mut queue: Vec<String> = roots.clone();
    let mut qi = 0;
    while qi < queue.len() {
        let s = queue[qi].clone();
        qi += 1;
        let (p, di, _) = parent[&s].clone();
        let dims = defs.get(&s).map(|(d, _)| d.clone()).unwrap_or_default();
        for sub in dims.iter().flatten() {
            queue.push(sub.clone());
        }
        sig.sorts.insert(
            s,
            SortInfo { parent: Some(p), parent_dimension: di, dimensions: dims, intro_features: Vec::new(), extensional: false },
        );
    }
    if let Some((s, (_, pos))) = defs.iter().find(|(s, _)| !sig.sorts.contains_key(*s)) {
        // only reachable through a cycle that never touches top
        return Err((*pos, SignatureError::Cycle(s.clone())));
    }

    for name in sig.domains.keys() {
        if sig.sorts.contains_key(name) {
            return Err((Pos::default(), SignatureError::NameCollision(name.clone())));
        }
    }

    // Features.
    for (sort, (feats, pos)) in &intros {
        if !sig.sorts.contains_key(sort) {
            return Err((*pos, SignatureError::UnknownSort(sort.clone())));
        }
        for (f, r) in feats {
            if let Some(prev) = sig.features.get(f) {
                return Err((
                    *pos,
                    SignatureError::DuplicateFeature { feature: f.clone(), first: prev.introducer.clone(), second: sort.clone() },
                ));
            }
            sig.features.insert(f.clone(), FeatureInfo { introducer: sort.clone(), restriction: r.clone() });
        }
        sig.sorts[sort].intro_features = feats.clone();
    }
    for (f, info) in &sig.features {
        if !sig.sorts.contains_key(&info.restriction) && !sig.domains.contains_key(&info.restriction) {
            let pos = intros[&info.introducer].1;
            return Err((pos, SignatureError::UnknownRestriction { feature: f.clone(), restriction: info.restriction.clone() }));
        }
    }

    for (s, pos) in &extensional {
        match sig.sorts.get(s) {
            None => return Err((*pos, SignatureError::UnknownSort(s.clone()))),
            Some(info) if info.parent.as_deref() != Some(TOP) => {
                return Err((*pos, SignatureError::ExtensionalNotTopLevel(s.clone())));
            }
            Some(_) => {}
        }
        let subtree: Vec<String> = sig.descendants(s);
        for d in subtree {
            sig.sorts[&d].extensional = true;
        }
    }
    Ok(sig)
}

pub(crate) fn template_key(name: &str, arity: usize) -> String {
    format!("{name}/{arity}")
}

impl Signature {
    pub fn templates_for(&self, name: &str, arity: usize) -> Option<&[TemplateDef]> {
        self.templates.get(&template_key(name, arity)).map(Vec::as_slice)
    }

    pub fn sort(&self, name: &str) -> Option<&SortInfo> {
        self.sorts.get(name)
    }

    pub fn is_sort(&self, name: &str) -> bool {
        self.sorts.contains_key(name)
    }

    pub fn feature(&self, name: &str) -> Option<&FeatureInfo> {
        self.features.get(name)
    }

    pub fn domain(&self, name: &str) -> Option<&DomainInfo> {
        self.domains.get(name)
    }

    /// `sort` and all sorts below it, parents first.
    pub fn descendants(&self, sort: &str) -> Vec<String> {
        let mut out = vec![sort.to_string()];
        let mut i = 0;
        while i < out.len() {
            if let Some(info) = self.sorts.get(&out[i]) {
                out.extend(info.dimensions.iter().flatten().cloned());
            }
            i += 1;
        }
        out
    }

    /// Ancestors of `sort` from the immediate subsort of top down to `sort`
    /// itself. Empty for top.
    pub fn chain<'a>(&'a self, sort: &'a str) -> Vec<&'a str> {
        let mut out = Vec::new();
        let mut cur = sort;
        while let Some(info) = self.sorts.get(cur) {
            match &info.parent {
                Some(p) => {
                    out.push(cur);
                    cur = p;
                }
                None => break,
            }
        }
        out.reverse();
        out
    }

    /// True if `a` is `b` or a subsort of `b`.
    pub fn is_subsort(&self, a: &str, b: &str) -> bool {
        b == TOP || self.chain(a).contains(&b)
    }

    /// Features available at `sort`: introduced there or at an ancestor,
    /// ancestors first, declaration order within a sort.
    pub fn available_features(&self, sort: &str) -> Result<Vec<(String, String)>, SignatureError> {
        if !self.sorts.contains_key(sort) {
            return Err(SignatureError::UnknownSort(sort.to_string()));
        }
        Ok(self
            .chain(sort)
            .into_iter()
            .flat_map(|s| self.sorts[s].intro_features.iter().cloned())
            .collect())
    }

    /// Domains whose dimensions mention `atom`.
    pub fn domains_with_atom(&self, atom: &str) -> Vec<&str> {
        self.domains.iter().filter(|(_, d)| d.contains_atom(atom)).map(|(n, _)| n.as_str()).collect()
    }

    /// Works out which domain a finite-domain expression ranges over.
    ///
    /// Annotations win; otherwise the first non-integer atom that belongs to
    /// exactly one domain decides, then `context` (the domain expected at this
    /// position) is used. `Ok(None)` means no atom belongs to any domain.
    pub fn infer_domain(&self, expr: &FinDomExpr, context: Option<&str>) -> Result<Option<String>, DomainError> {
        let annots = expr.annotations();
        if let Some(first) = annots.first() {
            if let Some(other) = annots.iter().find(|a| *a != first) {
                return Err(DomainError::ConflictingAnnotations(first.to_string(), other.to_string()));
            }
            if !self.domains.contains_key(*first) {
                return Err(DomainError::UnknownDomain(first.to_string()));
            }
            return Ok(Some(first.to_string()));
        }
        let atoms = expr.atoms();
        let is_int = |a: &str| a.parse::<i64>().is_ok();
        for a in atoms.iter().filter(|a| !is_int(a)) {
            if let [only] = self.domains_with_atom(a).as_slice() {
                return Ok(Some(only.to_string()));
            }
        }
        if let Some(ctx) = context {
            return Ok(Some(ctx.to_string()));
        }
        if let Some(a) = atoms.iter().find(|a| self.domains_with_atom(a).len() > 1) {
            return Err(DomainError::Ambiguous { atom: a.to_string(), candidates: self.domains_with_atom(a).join(", ") });
        }
        if let Some(a) = atoms.iter().find(|a| !self.domains_with_atom(a).is_empty()) {
            // only integers point at a domain
            return Err(DomainError::NoDomain(a.to_string()));
        }
        Ok(None)
    }

    /// The subset of `domain` denoted by `expr`.
    pub fn element_subset(&self, domain: &str, expr: &FinDomExpr) -> Result<ElementSet, DomainError> {
        let info = self.domains.get(domain).ok_or_else(|| DomainError::UnknownDomain(domain.to_string()))?;
        subset(info, domain, expr)
    }
}

fn subset(info: &DomainInfo, domain: &str, expr: &FinDomExpr) -> Result<ElementSet, DomainError> {
    Ok(match expr {
        FinDomExpr::Atom(a) => {
            if !info.contains_atom(a) {
                return Err(DomainError::AtomNotInDomain { atom: a.clone(), domain: domain.to_string() });
            }
            info.atom_set(a)
        }
        FinDomExpr::Full => ElementSet::full(info.len()),
        FinDomExpr::Annot(e, d) => {
            if d != domain {
                return Err(DomainError::ConflictingAnnotations(domain.to_string(), d.clone()));
            }
            subset(info, domain, e)?
        }
        FinDomExpr::Neg(e) => subset(info, domain, e)?.complement(),
        FinDomExpr::And(l, r) => subset(info, domain, l)?.intersect(&subset(info, domain, r)?),
        FinDomExpr::Or(l, r) => subset(info, domain, l)?.union(&subset(info, domain, r)?),
    })
}
