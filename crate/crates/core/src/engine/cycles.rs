use std::collections::HashSet;
use std::sync::Arc;

use super::store::Store;
use crate::term::Term;

/// Argument paths at which a term re-enters one of its own ancestors.
///
/// Each path lists argument indices from the root to the re-entering
/// argument. Every compound is explored once, so a cycle reachable along
/// several paths is reported at the first one found depth-first.
pub fn find_cycles(term: &Term, store: &Store) -> Vec<Vec<usize>> {
    enum Step {
        Enter(Term, Vec<usize>),
        Leave(usize),
    }
    let mut out = Vec::new();
    let mut on_path: HashSet<usize> = HashSet::new();
    let mut done: HashSet<usize> = HashSet::new();
    let mut stack = vec![Step::Enter(term.clone(), Vec::new())];
    while let Some(step) = stack.pop() {
        match step {
            Step::Leave(p) => {
                on_path.remove(&p);
                done.insert(p);
            }
            Step::Enter(t, path) => {
                let Term::Compound(c) = store.deref(&t) else { continue };
                let p = Arc::as_ptr(&c) as usize;
                if on_path.contains(&p) {
                    out.push(path);
                    continue;
                }
                if done.contains(&p) {
                    continue;
                }
                on_path.insert(p);
                stack.push(Step::Leave(p));
                for (i, a) in c.args.iter().enumerate().rev() {
                    let mut sub = path.clone();
                    sub.push(i);
                    stack.push(Step::Enter(a.clone(), sub));
                }
            }
        }
    }
    out
}

/// Compounds, shared by all `roots`, that some path re-enters from below.
/// Keys are the compounds' addresses.
pub(crate) fn cycle_targets(roots: &[Term], store: &Store) -> HashSet<usize> {
    enum Step {
        Enter(Term),
        Leave(usize),
    }
    let mut out = HashSet::new();
    let mut on_path: HashSet<usize> = HashSet::new();
    let mut done: HashSet<usize> = HashSet::new();
    let mut stack: Vec<Step> = roots.iter().rev().cloned().map(Step::Enter).collect();
    while let Some(step) = stack.pop() {
        match step {
            Step::Leave(p) => {
                on_path.remove(&p);
                done.insert(p);
            }
            Step::Enter(t) => {
                let Term::Compound(c) = store.deref(&t) else { continue };
                let p = Arc::as_ptr(&c) as usize;
                if on_path.contains(&p) {
                    out.insert(p);
                    continue;
                }
                if done.contains(&p) {
                    continue;
                }
                on_path.insert(p);
                stack.push(Step::Leave(p));
                stack.extend(c.args.iter().rev().cloned().map(Step::Enter));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_loop() {
        let mut s = Store::new();
        let x = s.fresh();
        assert!(s.unify(&x, &Term::compound("f", vec![x.clone()])));
        assert_eq!(find_cycles(&x, &s), vec![vec![0]]);
    }

    #[test]
    fn finite_terms() {
        let s = Store::new();
        assert!(find_cycles(&Term::compound("f", vec![Term::atom("a")]), &s).is_empty());
        let mut s = Store::new();
        let x = s.fresh();
        let y = s.fresh();
        let shared = Term::compound("g", vec![Term::atom("a")]);
        assert!(s.unify(&x, &shared));
        assert!(s.unify(&y, &shared));
        assert!(find_cycles(&Term::compound("p", vec![x, y]), &s).is_empty());
    }

    #[test]
    fn nested_cycle() {
        let mut s = Store::new();
        let x = s.fresh();
        let y = s.fresh();
        assert!(s.unify(&x, &Term::compound("f", vec![Term::atom("a"), y.clone()])));
        assert!(s.unify(&y, &Term::compound("g", vec![x.clone()])));
        let root = Term::compound("h", vec![x]);
        assert_eq!(find_cycles(&root, &s), vec![vec![0, 1, 0]]);
    }
}
