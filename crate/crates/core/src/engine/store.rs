use std::collections::HashSet;
use std::sync::Arc;

use crate::term::{Term, VarId};

/// Variable bindings with a trail for backtracking.
///
/// Unification performs no occur check; bindings may form rational trees.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Store {
    bindings: Vec<Option<Term>>,
    trail: Vec<VarId>,
}

/// A point the store can be rolled back to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mark {
    vars: usize,
    trail: usize,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn fresh(&mut self) -> Term {
        self.bindings.push(None);
        Term::Var((self.bindings.len() - 1) as VarId)
    }

    /// Allocates `n` consecutive unbound variables and returns the first id.
    pub fn fresh_block(&mut self, n: usize) -> VarId {
        let base = self.bindings.len();
        self.bindings.resize(base + n, None);
        base as VarId
    }

    pub fn mark(&self) -> Mark {
        Mark { vars: self.bindings.len(), trail: self.trail.len() }
    }

    /// Restores the store exactly to its state at `mark`.
    pub fn undo(&mut self, mark: Mark) {
        for v in self.trail.drain(mark.trail..) {
            if let Some(slot) = self.bindings.get_mut(v as usize) {
                *slot = None;
            }
        }
        self.bindings.truncate(mark.vars);
    }

    pub fn binding(&self, v: VarId) -> Option<&Term> {
        self.bindings.get(v as usize).and_then(Option::as_ref)
    }

    pub fn is_bound(&self, v: VarId) -> bool {
        self.binding(v).is_some()
    }

    /// Follows variable bindings until reaching an unbound variable or a
    /// non-variable term.
    pub fn deref(&self, t: &Term) -> Term {
        let mut cur = t;
        while let Term::Var(v) = cur {
            match self.binding(*v) {
                Some(next) => cur = next,
                None => break,
            }
        }
        cur.clone()
    }

    /// Applies all bindings. A variable whose value contains itself is left
    /// unresolved at its inner occurrences.
    pub fn resolve(&self, t: &Term) -> Term {
        let mut open = Vec::new();
        self.resolve_in(t, &mut open)
    }

    fn resolve_in(&self, t: &Term, open: &mut Vec<VarId>) -> Term {
        match t {
            Term::Var(v) => match self.binding(*v) {
                Some(next) if !open.contains(v) => {
                    open.push(*v);
                    let r = self.resolve_in(next, open);
                    open.pop();
                    r
                }
                _ => t.clone(),
            },
            Term::Atom(_) | Term::Int(_) => t.clone(),
            Term::Compound(c) => {
                let args = c.args.iter().map(|a| self.resolve_in(a, open)).collect();
                Term::compound_arc(c.functor.clone(), args)
            }
        }
    }

    fn bind(&mut self, v: VarId, t: Term) {
        self.bindings[v as usize] = Some(t);
        self.trail.push(v);
    }

    /// Unifies two terms over rational trees. On failure every binding made
    /// during the attempt is undone.
    pub fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let mark = self.mark();
        if self.unify_inner(a, b) {
            true
        } else {
            self.undo(mark);
            false
        }
    }

    fn unify_inner(&mut self, a: &Term, b: &Term) -> bool {
        let mut stack = vec![(a.clone(), b.clone())];
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        while let Some((x, y)) = stack.pop() {
            let x = self.deref(&x);
            let y = self.deref(&y);
            match (&x, &y) {
                (Term::Var(i), Term::Var(j)) => {
                    // younger variables point at older ones
                    if i > j {
                        self.bind(*i, y.clone());
                    } else if j > i {
                        self.bind(*j, x.clone());
                    }
                }
                (Term::Var(i), _) => self.bind(*i, y.clone()),
                (_, Term::Var(j)) => self.bind(*j, x.clone()),
                (Term::Atom(p), Term::Atom(q)) => {
                    if p != q {
                        return false;
                    }
                }
                (Term::Int(p), Term::Int(q)) => {
                    if p != q {
                        return false;
                    }
                }
                (Term::Compound(c), Term::Compound(d)) => {
                    if Arc::ptr_eq(c, d) {
                        continue;
                    }
                    if c.functor != d.functor || c.args.len() != d.args.len() {
                        return false;
                    }
                    let (p, q) = (Arc::as_ptr(c) as usize, Arc::as_ptr(d) as usize);
                    if !seen.insert((p.min(q), p.max(q))) {
                        continue;
                    }
                    for (s, t) in c.args.iter().zip(d.args.iter()).rev() {
                        stack.push((s.clone(), t.clone()));
                    }
                }
                _ => return false,
            }
        }
        true
    }

    /// Copies a clause-local term into this store, shifting its variables by
    /// `base`.
    pub fn rename(t: &Term, base: VarId) -> Term {
        match t {
            Term::Var(v) => Term::Var(v + base),
            Term::Atom(_) | Term::Int(_) => t.clone(),
            Term::Compound(_) => t.map_vars(&mut |v| Term::Var(v + base)),
        }
    }

    /// True if the two terms are identical under the current bindings:
    /// the same unbound variable, equal constants, or compounds whose
    /// arguments are pairwise identical.
    pub fn identical(&self, a: &Term, b: &Term) -> bool {
        let mut stack = vec![(a.clone(), b.clone())];
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        while let Some((x, y)) = stack.pop() {
            match (self.deref(&x), self.deref(&y)) {
                (Term::Var(i), Term::Var(j)) if i == j => {}
                (Term::Atom(p), Term::Atom(q)) if p == q => {}
                (Term::Int(p), Term::Int(q)) if p == q => {}
                (Term::Compound(c), Term::Compound(d)) => {
                    if Arc::ptr_eq(&c, &d) {
                        continue;
                    }
                    if c.functor != d.functor || c.args.len() != d.args.len() {
                        return false;
                    }
                    let key = (Arc::as_ptr(&c) as usize, Arc::as_ptr(&d) as usize);
                    if seen.insert(key) {
                        stack.extend(c.args.iter().cloned().zip(d.args.iter().cloned()));
                    }
                }
                _ => return false,
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(args: Vec<Term>) -> Term {
        Term::compound("f", args)
    }

    #[test]
    fn atoms() {
        let mut s = Store::new();
        assert!(s.unify(&Term::atom("a"), &Term::atom("a")));
        assert!(!s.unify(&Term::atom("a"), &Term::atom("b")));
        assert!(s.is_empty());
    }

    #[test]
    fn binds_and_undoes() {
        let mut s = Store::new();
        let x = s.fresh();
        let y = s.fresh();
        let before = s.clone();
        let m = s.mark();
        assert!(s.unify(&f(vec![x.clone(), Term::atom("b")]), &f(vec![Term::atom("a"), y.clone()])));
        assert_eq!(s.deref(&x), Term::atom("a"));
        assert_eq!(s.deref(&y), Term::atom("b"));
        s.undo(m);
        assert_eq!(s, before);
    }

    #[test]
    fn failure_restores() {
        let mut s = Store::new();
        let x = s.fresh();
        let before = s.clone();
        assert!(!s.unify(&f(vec![x.clone(), Term::atom("b")]), &f(vec![Term::atom("a"), Term::atom("c")])));
        assert_eq!(s, before);
    }

    #[test]
    fn cyclic_self_unification() {
        let mut s = Store::new();
        let x = s.fresh();
        assert!(s.unify(&x, &f(vec![x.clone()])));
        let t = s.deref(&x);
        assert!(s.unify(&t, &t.clone()));
        // two separately built cyclic terms of the same shape unify
        let y = s.fresh();
        assert!(s.unify(&y, &f(vec![y.clone()])));
        assert!(s.unify(&x, &y));
        let z = s.fresh();
        assert!(s.unify(&z, &f(vec![f(vec![z.clone()])])));
        assert!(s.unify(&x, &z));
        assert!(s.identical(&x, &z));
    }

    #[test]
    fn var_var_binds_younger() {
        let mut s = Store::new();
        let x = s.fresh();
        let y = s.fresh();
        assert!(s.unify(&x, &y));
        assert_eq!(s.deref(&y), x);
        assert_eq!(s.deref(&x), x);
    }
}
