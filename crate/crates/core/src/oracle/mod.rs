//! Brute-force reference implementations.
//!
//! Feature structures are explicit graphs here. A sorted node carries the
//! set of total sort configurations it admits (one subsort chosen in every
//! dimension, all the way down), so unifying two nodes intersects two finite
//! sets. Nothing in this module uses the term encoding, the compiler or the
//! resolution engine; it is slow on purpose and meant for tests.

pub mod random;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::decls::{Signature, TOP};
use crate::syntax::{FinDomExpr, SourceTerm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("not supported by the oracle: {0}")]
    Unsupported(String),
    #[error("unknown name `{0}`")]
    Unknown(String),
    #[error("feature search for `{feature}` found {count} paths")]
    Search { feature: String, count: usize },
    #[error("finite domain: {0}")]
    Domain(String),
}

/// A constant label: at most one per node.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Atom(String),
    Int(i64),
    /// A plain compound; its arguments are the edges `#0`, `#1`, ...
    Functor(String, usize),
    /// A non-empty set of element indices of a finite domain.
    Domain(String, BTreeSet<usize>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Node {
    /// Admitted configurations; `None` admits anything, including labels.
    pub types: Option<BTreeSet<usize>>,
    pub label: Option<Label>,
    pub edges: BTreeMap<String, usize>,
}

/// A rooted graph, nodes numbered breadth-first from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureGraph {
    pub nodes: Vec<Node>,
    pub root: usize,
}

fn arg_edge(i: usize) -> String {
    format!("#{i}")
}

/// Reference semantics for one signature.
pub struct Oracle<'a> {
    sig: &'a Signature,
    /// Every total configuration, as a set of sort names.
    configs: Vec<BTreeSet<String>>,
}

impl<'a> Oracle<'a> {
    pub fn new(sig: &'a Signature) -> Self {
        let configs = configurations(sig, TOP).into_iter().map(|mut c| {
            c.remove(TOP);
            c
        });
        Oracle { sig, configs: configs.collect() }
    }

    pub fn signature(&self) -> &Signature {
        self.sig
    }

    pub fn configs(&self) -> &[BTreeSet<String>] {
        &self.configs
    }

    /// Configurations containing `sort`.
    pub fn denotation(&self, sort: &str) -> BTreeSet<usize> {
        (0..self.configs.len()).filter(|i| self.configs[*i].contains(sort)).collect()
    }

    /// The most specific sorts shared by every admitted configuration.
    pub fn common_sorts(&self, types: &BTreeSet<usize>) -> Vec<String> {
        let mut iter = types.iter();
        let Some(first) = iter.next() else { return Vec::new() };
        let mut common = self.configs[*first].clone();
        for i in iter {
            common.retain(|s| self.configs[*i].contains(s));
        }
        common
            .iter()
            .filter(|s| !common.iter().any(|c| self.parent(c) == Some(s.as_str())))
            .cloned()
            .collect()
    }

    fn parent(&self, sort: &str) -> Option<&str> {
        self.sig.sorts.get(sort)?.parent.as_deref()
    }

    fn ancestors(&self, sort: &str) -> Vec<String> {
        let mut out = vec![sort.to_string()];
        let mut cur = sort;
        while let Some(p) = self.parent(cur) {
            out.push(p.to_string());
            cur = p;
        }
        out
    }

    /// Features appropriate at `sort` with their restrictions.
    fn appropriate(&self, sort: &str) -> Vec<(String, String)> {
        let ancestors = self.ancestors(sort);
        let mut out: Vec<(String, String)> = self
            .sig
            .features
            .iter()
            .filter(|(_, info)| ancestors.contains(&info.introducer))
            .map(|(f, info)| (f.clone(), info.restriction.clone()))
            .collect();
        out.sort();
        out
    }

    /// All paths from `start` ending in `feature` that repeat no feature and
    /// enter no sort related by subsumption to a sort already on the path.
    /// Only sort-restricted features are followed. Sorted lexicographically.
    pub fn enumerate_paths(&self, start: &str, feature: &str) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        let mut stack: Vec<(String, Vec<String>, Vec<String>)> = vec![(start.to_string(), Vec::new(), vec![start.to_string()])];
        while let Some((sort, path, seen)) = stack.pop() {
            for (f, r) in self.appropriate(&sort) {
                if path.contains(&f) {
                    continue;
                }
                let mut p = path.clone();
                p.push(f.clone());
                if f == feature {
                    out.push(p);
                    continue;
                }
                if r == TOP || !self.sig.sorts.contains_key(&r) {
                    continue;
                }
                let related = seen.iter().any(|s| self.ancestors(s).contains(&r) || self.ancestors(&r).contains(s));
                if related {
                    continue;
                }
                let mut seen = seen.clone();
                seen.push(r.clone());
                stack.push((r, p, seen));
            }
        }
        out.sort();
        out
    }

    /// Builds the graph of a disjunction-free description.
    pub fn graph(&self, t: &SourceTerm) -> Result<Option<FeatureGraph>, OracleError> {
        let mut b = Builder::new(self);
        let Some(root) = b.add(t)? else { return Ok(None) };
        Ok(Some(b.work.compact(&[root]).remove(0)))
    }

    /// Unifies two graphs; `None` on failure.
    pub fn fs_unify(&self, a: &FeatureGraph, b: &FeatureGraph) -> Option<FeatureGraph> {
        let mut w = Work::default();
        let ra = w.import(a);
        let rb = w.import(b);
        if !w.unify(ra, rb) {
            return None;
        }
        Some(w.compact(&[ra]).remove(0))
    }

    /// Number of disjunct combinations of a clause (head and body terms,
    /// variables shared) that are consistent.
    pub fn consistent_combinations(&self, terms: &[SourceTerm]) -> Result<usize, OracleError> {
        let mut count = 0;
        for combo in product(terms.iter().map(alternatives).collect()) {
            let mut b = Builder::new(self);
            let mut ok = true;
            for t in &combo {
                if b.add(t)?.is_none() {
                    ok = false;
                    break;
                }
            }
            if ok {
                count += 1;
            }
        }
        Ok(count)
    }

    /// Removes edges to nodes that carry nothing beyond what their feature's
    /// restriction implies, unless the node is shared. Repeats to a fixpoint.
    pub fn normalize(&self, g: &FeatureGraph) -> FeatureGraph {
        let mut g = g.clone();
        loop {
            let mut indegree = vec![0usize; g.nodes.len()];
            indegree[g.root] += 1;
            for n in &g.nodes {
                for c in n.edges.values() {
                    indegree[*c] += 1;
                }
            }
            let mut changed = false;
            for i in 0..g.nodes.len() {
                let edges: Vec<(String, usize)> = g.nodes[i].edges.iter().map(|(f, c)| (f.clone(), *c)).collect();
                for (f, c) in edges {
                    if f.starts_with('#') || indegree[c] != 1 {
                        continue;
                    }
                    let child = &g.nodes[c];
                    if child.edges.is_empty() && self.implied(&f) == (child.types.clone(), child.label.clone()) {
                        g.nodes[i].edges.remove(&f);
                        changed = true;
                    }
                }
            }
            if !changed {
                let mut w = Work::default();
                let r = w.import(&g);
                return w.compact(&[r]).remove(0);
            }
        }
    }

    /// What the restriction of `feature` alone says about its value.
    fn implied(&self, feature: &str) -> (Option<BTreeSet<usize>>, Option<Label>) {
        let Some(info) = self.sig.features.get(feature) else { return (None, None) };
        let r = info.restriction.as_str();
        if r == TOP {
            (None, None)
        } else if let Some(d) = self.sig.domains.get(r) {
            (None, Some(Label::Domain(r.to_string(), (0..d.len()).collect())))
        } else {
            (Some(self.denotation(r)), None)
        }
    }
}

/// Every total configuration below `sort`.
fn configurations(sig: &Signature, sort: &str) -> Vec<BTreeSet<String>> {
    let mut out = vec![BTreeSet::from([sort.to_string()])];
    let Some(info) = sig.sorts.get(sort) else { return out };
    for dim in &info.dimensions {
        let choices: Vec<BTreeSet<String>> = dim.iter().flat_map(|c| configurations(sig, c)).collect();
        out = out
            .iter()
            .flat_map(|base| {
                choices.iter().map(move |c| {
                    let mut next = base.clone();
                    next.extend(c.iter().cloned());
                    next
                })
            })
            .collect();
    }
    out
}

/// Cartesian product, first list varying slowest.
fn product<T: Clone>(lists: Vec<Vec<T>>) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for list in lists {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// The disjunction-free readings of a description, left disjuncts first.
pub fn alternatives(t: &SourceTerm) -> Vec<SourceTerm> {
    match t {
        SourceTerm::Disj(l, r) => {
            let mut out = alternatives(l);
            out.extend(alternatives(r));
            out
        }
        SourceTerm::Conj(l, r) => product(vec![alternatives(l), alternatives(r)])
            .into_iter()
            .map(|mut p| {
                let r = p.pop().expect("pair");
                let l = p.pop().expect("pair");
                SourceTerm::conj(l, r)
            })
            .collect(),
        SourceTerm::FeatVal(f, v) => alternatives(v).into_iter().map(|v| SourceTerm::feat(f.clone(), v)).collect(),
        SourceTerm::Search { start, feature, value } => alternatives(value)
            .into_iter()
            .map(|v| SourceTerm::Search { start: start.clone(), feature: feature.clone(), value: Box::new(v) })
            .collect(),
        SourceTerm::Compound(f, args) => product(args.iter().map(alternatives).collect())
            .into_iter()
            .map(|args| SourceTerm::compound(f.clone(), args))
            .collect(),
        other => vec![other.clone()],
    }
}

/// Union-find arena.
#[derive(Default)]
struct Work {
    nodes: Vec<Node>,
    parent: Vec<usize>,
}

impl Work {
    fn add(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn import(&mut self, g: &FeatureGraph) -> usize {
        let base = self.nodes.len();
        for n in &g.nodes {
            let mut n = n.clone();
            for c in n.edges.values_mut() {
                *c += base;
            }
            self.add(n);
        }
        base + g.root
    }

    /// Narrows the types of a node; false if none remain.
    fn restrict(&mut self, i: usize, types: &BTreeSet<usize>) -> bool {
        let i = self.find(i);
        let n = &mut self.nodes[i];
        if n.label.is_some() {
            return false;
        }
        let next: BTreeSet<usize> = match &n.types {
            None => types.clone(),
            Some(t) => t.intersection(types).copied().collect(),
        };
        let ok = !next.is_empty();
        n.types = Some(next);
        ok
    }

    fn set_label(&mut self, i: usize, label: Label) -> bool {
        let i = self.find(i);
        let n = &mut self.nodes[i];
        if n.types.is_some() {
            return false;
        }
        match meet(n.label.take(), Some(label)) {
            Ok(l) => {
                n.label = l;
                true
            }
            Err(()) => false,
        }
    }

    fn unify(&mut self, a: usize, b: usize) -> bool {
        let mut queue = VecDeque::from([(a, b)]);
        while let Some((a, b)) = queue.pop_front() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            let nb = std::mem::take(&mut self.nodes[b]);
            self.parent[b] = a;
            let na = &mut self.nodes[a];
            na.types = match (na.types.take(), nb.types) {
                (None, t) | (t, None) => t,
                (Some(x), Some(y)) => Some(x.intersection(&y).copied().collect()),
            };
            if na.types.as_ref().is_some_and(BTreeSet::is_empty) {
                return false;
            }
            let Ok(label) = meet(na.label.take(), nb.label) else { return false };
            na.label = label;
            if na.types.is_some() && na.label.is_some() {
                return false;
            }
            for (f, c) in nb.edges {
                match na.edges.get(&f) {
                    Some(d) => queue.push_back((*d, c)),
                    None => {
                        na.edges.insert(f, c);
                    }
                }
            }
        }
        true
    }

    /// Copies out the parts reachable from `roots`, renumbered breadth-first.
    fn compact(&mut self, roots: &[usize]) -> Vec<FeatureGraph> {
        roots
            .iter()
            .map(|r| {
                let r = self.find(*r);
                let mut index = HashMap::from([(r, 0usize)]);
                let mut order = vec![r];
                let mut i = 0;
                while i < order.len() {
                    let cur = order[i];
                    i += 1;
                    let children: Vec<usize> = self.nodes[cur].edges.values().copied().collect();
                    for c in children {
                        let c = self.find(c);
                        if let std::collections::hash_map::Entry::Vacant(e) = index.entry(c) {
                            e.insert(order.len());
                            order.push(c);
                        }
                    }
                }
                let nodes = order
                    .iter()
                    .map(|o| {
                        let n = self.nodes[*o].clone();
                        let edges = n.edges.iter().map(|(f, c)| (f.clone(), index[&self.find(*c)])).collect();
                        Node { types: n.types, label: n.label, edges }
                    })
                    .collect();
                FeatureGraph { nodes, root: 0 }
            })
            .collect()
    }
}

fn meet(a: Option<Label>, b: Option<Label>) -> Result<Option<Label>, ()> {
    match (a, b) {
        (None, l) | (l, None) => Ok(l),
        (Some(Label::Domain(d, x)), Some(Label::Domain(e, y))) => {
            let both: BTreeSet<usize> = x.intersection(&y).copied().collect();
            if d != e || both.is_empty() {
                Err(())
            } else {
                Ok(Some(Label::Domain(d, both)))
            }
        }
        (Some(x), Some(y)) if x == y => Ok(Some(x)),
        _ => Err(()),
    }
}

/// Builds graphs for several descriptions sharing one variable scope.
pub struct Builder<'o, 'a> {
    oracle: &'o Oracle<'a>,
    work: Work,
    vars: HashMap<String, usize>,
}

impl<'o, 'a> Builder<'o, 'a> {
    pub fn new(oracle: &'o Oracle<'a>) -> Self {
        Builder { oracle, work: Work::default(), vars: HashMap::new() }
    }

    /// Adds a description as a new root; `None` if it is inconsistent with
    /// what was added before.
    pub fn add(&mut self, t: &SourceTerm) -> Result<Option<usize>, OracleError> {
        let root = self.work.add(Node::default());
        Ok(self.build(t, root, None)?.then_some(root))
    }

    /// The graphs of the given roots, in the current state.
    pub fn graphs(&mut self, roots: &[usize]) -> Vec<FeatureGraph> {
        self.work.compact(roots)
    }

    fn value_node(&mut self, restriction: &str) -> Result<usize, OracleError> {
        let n = self.work.add(Node::default());
        let sig = self.oracle.sig;
        if restriction == TOP {
        } else if let Some(d) = sig.domains.get(restriction) {
            self.work.set_label(n, Label::Domain(restriction.to_string(), (0..d.len()).collect()));
        } else if sig.sorts.contains_key(restriction) {
            self.work.restrict(n, &self.oracle.denotation(restriction));
        } else {
            return Err(OracleError::Unknown(restriction.to_string()));
        }
        Ok(n)
    }

    fn domain_label(&self, e: &FinDomExpr, ctx: Option<&str>) -> Result<Option<Label>, OracleError> {
        let sig = self.oracle.sig;
        let ctx = ctx.filter(|c| sig.domains.contains_key(*c));
        let Some(d) = sig.infer_domain(e, ctx).map_err(|e| OracleError::Domain(e.to_string()))? else {
            return Ok(None);
        };
        let info = &sig.domains[&d];
        let set = members(info, &d, e)?;
        if set.is_empty() {
            return Err(OracleError::Domain(format!("empty subset of {d}")));
        }
        Ok(Some(Label::Domain(d, set)))
    }

    /// Adds the constraints of `t` to node `n`; false on inconsistency.
    fn build(&mut self, t: &SourceTerm, n: usize, ctx: Option<&str>) -> Result<bool, OracleError> {
        let sig = self.oracle.sig;
        Ok(match t {
            SourceTerm::Var(v) if v == "_" => true,
            SourceTerm::Var(v) => match self.vars.get(v) {
                Some(m) => {
                    let m = *m;
                    self.work.unify(n, m)
                }
                None => {
                    self.vars.insert(v.clone(), n);
                    true
                }
            },
            SourceTerm::Atom(a) => match ctx.and_then(|c| sig.domains.get(c)) {
                Some(d) if d.contains_atom(a) => return self.build(&SourceTerm::FinDom(FinDomExpr::Atom(a.clone())), n, ctx),
                _ => self.work.set_label(n, Label::Atom(a.clone())),
            },
            SourceTerm::Int(i) => match ctx.and_then(|c| sig.domains.get(c)) {
                Some(d) if d.contains_atom(&i.to_string()) => {
                    return self.build(&SourceTerm::FinDom(FinDomExpr::Atom(i.to_string())), n, ctx)
                }
                _ => self.work.set_label(n, Label::Int(*i)),
            },
            SourceTerm::SortRef(s) if s == TOP => true,
            SourceTerm::SortRef(s) => {
                if let Some(d) = sig.domains.get(s) {
                    self.work.set_label(n, Label::Domain(s.clone(), (0..d.len()).collect()))
                } else if sig.sorts.contains_key(s) {
                    self.work.restrict(n, &self.oracle.denotation(s))
                } else {
                    return Err(OracleError::Unknown(s.clone()));
                }
            }
            SourceTerm::FeatVal(f, v) => {
                let info = sig.features.get(f).ok_or_else(|| OracleError::Unknown(f.clone()))?;
                if !self.work.restrict(n, &self.oracle.denotation(&info.introducer)) {
                    return Ok(false);
                }
                let r = self.work.find(n);
                let child = match self.work.nodes[r].edges.get(f) {
                    Some(c) => *c,
                    None => {
                        let c = self.value_node(&info.restriction)?;
                        let r = self.work.find(n);
                        self.work.nodes[r].edges.insert(f.clone(), c);
                        c
                    }
                };
                self.build(v, child, Some(&info.restriction))?
            }
            SourceTerm::Conj(l, r) => self.build(l, n, ctx)? && self.build(r, n, ctx)?,
            SourceTerm::Compound(f, args) => {
                if !self.work.set_label(n, Label::Functor(f.clone(), args.len())) {
                    return Ok(false);
                }
                for (i, a) in args.iter().enumerate() {
                    let r = self.work.find(n);
                    let child = match self.work.nodes[r].edges.get(&arg_edge(i)) {
                        Some(c) => *c,
                        None => {
                            let c = self.work.add(Node::default());
                            let r = self.work.find(n);
                            self.work.nodes[r].edges.insert(arg_edge(i), c);
                            c
                        }
                    };
                    if !self.build(a, child, None)? {
                        return Ok(false);
                    }
                }
                true
            }
            SourceTerm::Search { start, feature, value } => {
                let starts: Vec<String> = match start {
                    Some(s) => vec![s.clone()],
                    None => match ctx.filter(|c| sig.sorts.contains_key(*c) && *c != TOP) {
                        Some(c) => vec![c.to_string()],
                        None => {
                            let r = self.work.find(n);
                            match &self.work.nodes[r].types {
                                Some(types) => self.oracle.common_sorts(types),
                                None => Vec::new(),
                            }
                        }
                    },
                };
                let mut paths: Vec<Vec<String>> = Vec::new();
                for s in &starts {
                    for p in self.oracle.enumerate_paths(s, feature) {
                        if !paths.contains(&p) {
                            paths.push(p);
                        }
                    }
                }
                if paths.len() != 1 {
                    return Err(OracleError::Search { feature: feature.clone(), count: paths.len() });
                }
                let mut desc = (**value).clone();
                for f in paths[0].iter().rev() {
                    desc = SourceTerm::feat(f.clone(), desc);
                }
                if let Some(s) = start {
                    desc = SourceTerm::conj(SourceTerm::sort(s.clone()), desc);
                }
                self.build(&desc, n, ctx)?
            }
            SourceTerm::FinDom(e) => match self.domain_label(e, ctx)? {
                Some(label) => self.work.set_label(n, label),
                None => return self.build(&plain_findom(e)?, n, ctx),
            },
            SourceTerm::Disj(..) | SourceTerm::TemplateCall(..) | SourceTerm::Quote(_) | SourceTerm::DoubleQuote(_) => {
                return Err(OracleError::Unsupported(crate::syntax::print_term(t)))
            }
        })
    }
}

fn plain_findom(e: &FinDomExpr) -> Result<SourceTerm, OracleError> {
    Ok(match e {
        FinDomExpr::Atom(a) => match a.parse::<i64>() {
            Ok(i) => SourceTerm::Int(i),
            Err(_) => SourceTerm::atom(a.clone()),
        },
        FinDomExpr::And(l, r) => SourceTerm::conj(plain_findom(l)?, plain_findom(r)?),
        _ => return Err(OracleError::Unsupported(crate::syntax::print_findom(e))),
    })
}

/// The elements of a finite domain satisfying `e`, by direct evaluation on
/// each element tuple.
fn members(info: &crate::decls::DomainInfo, domain: &str, e: &FinDomExpr) -> Result<BTreeSet<usize>, OracleError> {
    fn holds(tuple: &[String], e: &FinDomExpr, domain: &str) -> Result<bool, OracleError> {
        Ok(match e {
            FinDomExpr::Atom(a) => tuple.contains(a),
            FinDomExpr::Full => true,
            FinDomExpr::Annot(e, d) if d == domain => holds(tuple, e, domain)?,
            FinDomExpr::Annot(_, d) => return Err(OracleError::Domain(format!("{d} used inside {domain}"))),
            FinDomExpr::Neg(e) => !holds(tuple, e, domain)?,
            FinDomExpr::And(l, r) => holds(tuple, l, domain)? && holds(tuple, r, domain)?,
            FinDomExpr::Or(l, r) => holds(tuple, l, domain)? || holds(tuple, r, domain)?,
        })
    }
    for a in e.atoms() {
        if !info.dimensions.iter().flatten().any(|x| x == a) {
            return Err(OracleError::Domain(format!("{a} is not in {domain}")));
        }
    }
    let mut out = BTreeSet::new();
    for (i, tuple) in info.elements.iter().enumerate() {
        if holds(tuple, e, domain)? {
            out.insert(i);
        }
    }
    Ok(out)
}

/// Every subset of a domain's elements (at most 12 of them), in order of
/// their bit masks.
pub fn findom_sets(sig: &Signature, domain: &str) -> Vec<BTreeSet<usize>> {
    let n = sig.domains[domain].len();
    assert!(n <= 12, "domain too large to enumerate");
    (0u32..1 << n).map(|mask| (0..n).filter(|k| mask & (1 << k) != 0).collect()).collect()
}

/// Whether two graphs are the same up to node numbering.
pub fn isomorphic(a: &FeatureGraph, b: &FeatureGraph) -> bool {
    if a.nodes.len() != b.nodes.len() {
        return false;
    }
    let mut fwd: HashMap<usize, usize> = HashMap::new();
    let mut back: HashMap<usize, usize> = HashMap::new();
    let mut queue = VecDeque::from([(a.root, b.root)]);
    while let Some((x, y)) = queue.pop_front() {
        match (fwd.get(&x), back.get(&y)) {
            (Some(y2), Some(x2)) if *y2 == y && *x2 == x => continue,
            (None, None) => {}
            _ => return false,
        }
        fwd.insert(x, y);
        back.insert(y, x);
        let (nx, ny) = (&a.nodes[x], &b.nodes[y]);
        if nx.types != ny.types || nx.label != ny.label || !nx.edges.keys().eq(ny.edges.keys()) {
            return false;
        }
        for (f, cx) in &nx.edges {
            queue.push_back((*cx, ny.edges[f]));
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decls::build_signature;
    use crate::syntax::{parse_program, parse_term};

    fn sig(src: &str) -> Signature {
        build_signature(&parse_program(src).unwrap()).unwrap()
    }

    const TREE: &str = "tree > [leaf, internal_node] intro [label]. internal_node intro [left:tree, right:tree].
        sign > [headed, unheaded] * [decl, inter].";

    fn graph(o: &Oracle, s: &str) -> FeatureGraph {
        o.graph(&parse_term(s).unwrap()).unwrap().unwrap()
    }

    #[test]
    fn sibling_sorts_fail() {
        let s = sig(TREE);
        let o = Oracle::new(&s);
        assert!(o.fs_unify(&graph(&o, "<leaf"), &graph(&o, "<internal_node")).is_none());
    }

    #[test]
    fn dimensions_combine() {
        let s = sig(TREE);
        let o = Oracle::new(&s);
        let g = o.fs_unify(&graph(&o, "<headed"), &graph(&o, "<decl")).unwrap();
        let types = g.nodes[0].types.as_ref().unwrap();
        assert_eq!(types.len(), 1);
        let config = &o.configs()[*types.iter().next().unwrap()];
        assert_eq!(config.iter().map(String::as_str).collect::<Vec<_>>(), ["decl", "headed", "sign"]);
    }

    #[test]
    fn coreference_and_cycles() {
        let s = sig(TREE);
        let o = Oracle::new(&s);
        let g = graph(&o, "left!X & right!X");
        assert_eq!(g.nodes.len(), 2);
        let g = graph(&o, "X & left!X");
        assert_eq!(g.nodes.len(), 1);
        assert!(o.graph(&parse_term("left!a").unwrap()).unwrap().is_none());
    }

    #[test]
    fn paths_are_sorted() {
        let s = sig("a intro [q:b, p:b]. b intro [f].");
        let o = Oracle::new(&s);
        assert_eq!(o.enumerate_paths("a", "f"), [["p", "f"], ["q", "f"]]);
        assert_eq!(o.enumerate_paths("b", "f"), [["f"]]);
    }

    #[test]
    fn findom_subsets() {
        let s = sig("agr fin_dom [1,2,3] * [sg,pl].");
        assert_eq!(findom_sets(&s, "agr").len(), 64);
        let o = Oracle::new(&s);
        let g = graph(&o, "2 or pl");
        assert_eq!(g.nodes[0].label, Some(Label::Domain("agr".into(), BTreeSet::from([1, 3, 4, 5]))));
    }

    #[test]
    fn combinations() {
        let s = sig(TREE);
        let o = Oracle::new(&s);
        let t = parse_term("(<leaf or <internal_node) & (label!a or left!(<leaf))").unwrap();
        // leaf & left is inconsistent
        assert_eq!(o.consistent_combinations(&[t]).unwrap(), 3);
    }
}
