//! Translation of expanded descriptions into plain terms.
//!
//! Descriptions are compiled into a scratch store in continuation-passing
//! style: each construct unifies its encoding into a target term and then
//! calls the continuation, once per alternative. A failed unification simply
//! does not call it, so inconsistent disjuncts drop out. Every step undoes
//! its bindings before returning, which lets disjuncts share the store.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::search::{resolve_search, SearchError};
use super::templates::Expansion;
use super::{CompileError, CompileOptions};
use crate::decls::{DomainError, Signature, TOP};
use crate::engine::{cycle_targets, Store};
use crate::layout::LayoutTable;
use crate::syntax::{print_findom, FinDomExpr, SourceTerm};
use crate::term::{Term, VarId};

type Cont<'c, 'a> = dyn FnMut(&mut Translator<'a>) -> Result<(), CompileError> + 'c;

pub(crate) struct Translator<'a> {
    sig: &'a Signature,
    table: &'a LayoutTable,
    opts: &'a CompileOptions,
    store: Store,
    vars: HashMap<String, Term>,
}

impl<'a> Translator<'a> {
    pub fn new(sig: &'a Signature, table: &'a LayoutTable, opts: &'a CompileOptions, exp: &Expansion) -> Self {
        let mut names = Vec::new();
        for t in &exp.terms {
            t.collect_vars(&mut names);
        }
        for (a, b) in &exp.equations {
            a.collect_vars(&mut names);
            b.collect_vars(&mut names);
        }
        let mut store = Store::new();
        let vars = names.into_iter().map(|n| (n, store.fresh())).collect();
        Translator { sig, table, opts, store, vars }
    }

    /// The term standing for a named variable of the clause.
    pub fn var(&self, name: &str) -> Term {
        self.vars.get(name).cloned().unwrap_or(Term::atom("[]"))
    }

    /// Compiles all terms of an expansion, calling `emit` with their roots
    /// once per consistent alternative.
    pub fn compile_all(&mut self, exp: &Expansion, emit: &mut dyn FnMut(&mut Self, &[Term])) -> Result<(), CompileError> {
        let roots: Vec<Term> = exp.terms.iter().map(|_| self.store.fresh()).collect();
        let mut jobs: Vec<(&SourceTerm, Term)> = exp.terms.iter().zip(roots.iter().cloned()).collect();
        for (a, b) in &exp.equations {
            let t = self.store.fresh();
            jobs.push((a, t.clone()));
            jobs.push((b, t));
        }
        self.compile_seq(&jobs, &mut |tr| {
            emit(tr, &roots);
            Ok(())
        })
    }

    fn compile_seq(&mut self, jobs: &[(&SourceTerm, Term)], k: &mut Cont<'_, 'a>) -> Result<(), CompileError> {
        match jobs.split_first() {
            None => k(self),
            Some(((t, target), rest)) => self.compile_into(t, target, None, &mut |tr| tr.compile_seq(rest, k)),
        }
    }

    fn unify_then(&mut self, a: &Term, b: &Term, k: &mut Cont<'_, 'a>) -> Result<(), CompileError> {
        if self.store.unify(a, b) {
            k(self)
        } else {
            Ok(())
        }
    }

    /// Compiles `t` into `target`. `ctx` names the sort or domain expected
    /// at this position, if known.
    fn compile_into(&mut self, t: &SourceTerm, target: &Term, ctx: Option<&'a str>, k: &mut Cont<'_, 'a>) -> Result<(), CompileError> {
        let mark = self.store.mark();
        let r = self.compile_case(t, target, ctx, k);
        self.store.undo(mark);
        r
    }

    fn domain_ctx(&self, ctx: Option<&'a str>) -> Option<&'a str> {
        ctx.filter(|c| self.sig.domain(c).is_some())
    }

    fn compile_case(&mut self, t: &SourceTerm, target: &Term, ctx: Option<&'a str>, k: &mut Cont<'_, 'a>) -> Result<(), CompileError> {
        let sig = self.sig;
        match t {
            SourceTerm::Var(v) if v == "_" => k(self),
            SourceTerm::Var(v) => {
                let var = self.var(v);
                self.unify_then(target, &var, k)
            }
            SourceTerm::Atom(a) => {
                if a.starts_with('$') {
                    return Err(CompileError::ReservedFunctor(a.clone()));
                }
                match self.domain_ctx(ctx) {
                    Some(d) if sig.domains[d].contains_atom(a) => self.findom(&FinDomExpr::Atom(a.clone()), target, ctx, k),
                    _ => self.unify_then(target, &Term::atom(a), k),
                }
            }
            SourceTerm::Int(n) => match self.domain_ctx(ctx) {
                Some(d) if sig.domains[d].contains_atom(&n.to_string()) => {
                    self.findom(&FinDomExpr::Atom(n.to_string()), target, ctx, k)
                }
                _ => self.unify_then(target, &Term::Int(*n), k),
            },
            SourceTerm::SortRef(s) => {
                if s == TOP {
                    return k(self);
                }
                if !sig.is_sort(s) && sig.domain(s).is_none() {
                    return Err(CompileError::UnknownSort(s.clone()));
                }
                let skel = self.table.restriction_skeleton(sig, s, &mut self.store)?;
                self.unify_then(target, &skel, k)
            }
            SourceTerm::FeatVal(f, v) => self.feature(f, v, target, k),
            SourceTerm::Conj(l, r) => {
                let target2 = target.clone();
                self.compile_into(l, target, ctx, &mut |tr| tr.compile_into(r, &target2, ctx, k))
            }
            SourceTerm::Disj(l, r) => {
                self.compile_into(l, target, ctx, k)?;
                self.compile_into(r, target, ctx, k)
            }
            SourceTerm::TemplateCall(name, args) => {
                Err(CompileError::UnknownTemplate(crate::decls::template_key(name, args.len())))
            }
            SourceTerm::Quote(inner) => {
                let plain = self.plain(inner);
                self.unify_then(target, &plain, k)
            }
            SourceTerm::DoubleQuote(inner) => match &**inner {
                SourceTerm::Compound(f, args) => self.compound(f, args, target, k),
                other => {
                    let plain = self.plain(other);
                    self.unify_then(target, &plain, k)
                }
            },
            SourceTerm::Search { start, feature, value } => self.search(start.as_deref(), feature, value, target, ctx, k),
            SourceTerm::FinDom(e) => self.findom(e, target, ctx, k),
            SourceTerm::Compound(f, args) => {
                if f.starts_with('$') {
                    return Err(CompileError::ReservedFunctor(f.clone()));
                }
                self.compound(f, args, target, k)
            }
        }
    }

    fn compound(&mut self, f: &str, args: &[SourceTerm], target: &Term, k: &mut Cont<'_, 'a>) -> Result<(), CompileError> {
        let slots: Vec<Term> = args.iter().map(|_| self.store.fresh()).collect();
        if !self.store.unify(target, &Term::compound(f, slots.clone())) {
            return Ok(());
        }
        let jobs: Vec<(&SourceTerm, Term)> = args.iter().zip(slots).collect();
        self.compile_seq(&jobs, k)
    }

    fn feature(&mut self, f: &str, value: &SourceTerm, target: &Term, k: &mut Cont<'_, 'a>) -> Result<(), CompileError> {
        let sig = self.sig;
        let info = sig.feature(f).ok_or_else(|| CompileError::UnknownFeature(f.to_string()))?;
        let intro = info.introducer.as_str();
        let skel = self.table.skeleton(sig, intro, &mut self.store)?;
        if !self.store.unify(target, &skel) {
            return Ok(());
        }
        let node = self.table.sort_node(sig, &self.store, target, intro);
        let Some(Term::Compound(c)) = node else {
            unreachable!("a sort introducing a feature is encoded by a compound")
        };
        let slot = c.args[self.table.sorts[intro].feature_slots[f]].clone();
        let restriction = info.restriction.as_str();
        if self.opts.sort_check && restriction != TOP {
            let rs = self.table.restriction_skeleton(sig, restriction, &mut self.store)?;
            if !self.store.unify(&slot, &rs) {
                return Ok(());
            }
        }
        let ctx = (restriction != TOP).then_some(restriction);
        self.compile_into(value, &slot, ctx, k)
    }

    fn search(
        &mut self,
        start: Option<&str>,
        feature: &str,
        value: &SourceTerm,
        target: &Term,
        ctx: Option<&'a str>,
        k: &mut Cont<'_, 'a>,
    ) -> Result<(), CompileError> {
        let sig = self.sig;
        if !self.opts.feature_search {
            return Err(CompileError::SearchDisabled(feature.to_string()));
        }
        if sig.feature(feature).is_none() {
            return Err(CompileError::UnknownFeature(feature.to_string()));
        }
        let starts: Vec<String> = match start {
            Some(s) => {
                if !sig.is_sort(s) {
                    return Err(CompileError::UnknownSort(s.to_string()));
                }
                vec![s.to_string()]
            }
            None => match ctx.filter(|c| sig.is_sort(c)) {
                Some(c) => vec![c.to_string()],
                None => self.table.leaf_sorts(sig, &self.store, target),
            },
        };
        if starts.is_empty() {
            return Err(SearchError::NoContext(feature.to_string()).into());
        }
        let mut paths: Vec<Vec<String>> = Vec::new();
        for s in &starts {
            match resolve_search(sig, s, feature) {
                Ok(p) => {
                    if !paths.contains(&p) {
                        paths.push(p);
                    }
                }
                Err(SearchError::NoPath { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
        let path = match paths.len() {
            0 => return Err(SearchError::NoPath { start: starts.join(" & "), feature: feature.to_string() }.into()),
            1 => paths.remove(0),
            _ => {
                return Err(SearchError::Ambiguous {
                    start: starts.join(" & "),
                    feature: feature.to_string(),
                    paths: paths.iter().map(|p| p.join("!")).collect(),
                }
                .into())
            }
        };
        let mut desc = value.clone();
        for f in path.iter().rev() {
            desc = SourceTerm::feat(f.clone(), desc);
        }
        if let Some(s) = start {
            desc = SourceTerm::conj(SourceTerm::sort(s), desc);
        }
        self.compile_into(&desc, target, ctx, k)
    }

    fn findom(&mut self, e: &FinDomExpr, target: &Term, ctx: Option<&'a str>, k: &mut Cont<'_, 'a>) -> Result<(), CompileError> {
        let sig = self.sig;
        match sig.infer_domain(e, self.domain_ctx(ctx))? {
            Some(d) => {
                let set = sig.element_subset(&d, e)?;
                if set.is_empty() {
                    return Err(CompileError::EmptyDomain { expr: print_findom(e), domain: d });
                }
                let enc = self.table.encode_subset(&d, &set, &mut self.store)?;
                self.unify_then(target, &enc, k)
            }
            None => {
                let plain = findom_as_plain(e)?;
                self.compile_into(&plain, target, ctx, k)
            }
        }
    }

    fn plain(&mut self, t: &SourceTerm) -> Term {
        match t {
            SourceTerm::Var(v) if v == "_" => self.store.fresh(),
            SourceTerm::Var(v) => self.var(v),
            SourceTerm::Atom(a) => Term::atom(a),
            SourceTerm::Int(n) => Term::Int(*n),
            SourceTerm::Compound(f, args) => {
                let args = args.iter().map(|a| self.plain(a)).collect();
                Term::compound(f, args)
            }
            other => Term::atom(&other.to_string()),
        }
    }

    /// Copies the current values of `roots` (then `extra`) out of the store
    /// with variables renumbered from 0. Cyclic structure is cut at a fresh
    /// variable `V` and returned as equations `V = t`.
    pub fn finalize(&self, roots: &[Term], extra: &[Term]) -> (Vec<Term>, Vec<Term>, u32) {
        let all: Vec<Term> = roots.iter().chain(extra).cloned().collect();
        let mut fin = Finalizer {
            store: &self.store,
            cyclic: cycle_targets(&all, &self.store),
            memo: HashMap::new(),
            vars: HashMap::new(),
            equations: Vec::new(),
        };
        let out = all.iter().map(|t| fin.resolve(t)).collect();
        let nvars = fin.vars.len() as u32;
        (out, fin.equations, nvars)
    }
}

fn findom_as_plain(e: &FinDomExpr) -> Result<SourceTerm, CompileError> {
    Ok(match e {
        FinDomExpr::Atom(a) => match a.parse::<i64>() {
            Ok(n) => SourceTerm::Int(n),
            Err(_) => SourceTerm::atom(a.clone()),
        },
        FinDomExpr::Full => SourceTerm::var("_"),
        FinDomExpr::And(l, r) => SourceTerm::conj(findom_as_plain(l)?, findom_as_plain(r)?),
        FinDomExpr::Or(l, r) => SourceTerm::disj(findom_as_plain(l)?, findom_as_plain(r)?),
        FinDomExpr::Neg(_) | FinDomExpr::Annot(..) => {
            return Err(DomainError::NoDomain(print_findom(e)).into());
        }
    })
}

struct Finalizer<'s> {
    store: &'s Store,
    cyclic: HashSet<usize>,
    memo: HashMap<usize, Term>,
    vars: HashMap<VarId, VarId>,
    equations: Vec<Term>,
}

impl Finalizer<'_> {
    fn fresh(&mut self) -> Term {
        // numbered after every variable seen so far; never a store id
        let id = self.vars.len() as VarId;
        self.vars.insert(VarId::MAX - id, id);
        Term::Var(id)
    }

    fn resolve(&mut self, t: &Term) -> Term {
        match self.store.deref(t) {
            Term::Var(v) => {
                let n = self.vars.len() as VarId;
                Term::Var(*self.vars.entry(v).or_insert(n))
            }
            t @ (Term::Atom(_) | Term::Int(_)) => t,
            Term::Compound(c) => {
                let p = Arc::as_ptr(&c) as usize;
                if let Some(r) = self.memo.get(&p) {
                    return r.clone();
                }
                if self.cyclic.contains(&p) {
                    let v = self.fresh();
                    self.memo.insert(p, v.clone());
                    let body = self.rebuild(&c.functor, &c.args);
                    self.equations.push(Term::compound("=", vec![v.clone(), body]));
                    v
                } else {
                    let r = self.rebuild(&c.functor, &c.args);
                    self.memo.insert(p, r.clone());
                    r
                }
            }
        }
    }

    fn rebuild(&mut self, functor: &Arc<str>, args: &[Term]) -> Term {
        let args = args.iter().map(|a| self.resolve(a)).collect();
        Term::compound_arc(functor.clone(), args)
    }
}
