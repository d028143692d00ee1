//! Compile-time expansion of template calls.
//!
//! A call `@name(Args)` is replaced by the value of every definition of
//! `name/arity` whose head arguments match the call arguments. Matching is
//! unification on source terms: variables bind, plain terms must agree
//! structurally, and any pair involving a feature description is recorded as
//! an equation that the translator enforces. Bindings apply to the whole
//! clause, which is how `member(@first(L), L)` becomes `member(F, [F|R])`.

use std::collections::{HashMap, HashSet};

use super::CompileError;
use crate::decls::{template_key, Signature};
use crate::syntax::{Pos, SourceTerm};

/// One way of expanding the templates in a clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub terms: Vec<SourceTerm>,
    /// Pairs of descriptions that must denote the same structure.
    pub equations: Vec<(SourceTerm, SourceTerm)>,
}

#[derive(Clone, Default)]
struct State {
    subst: HashMap<String, SourceTerm>,
    equations: Vec<(SourceTerm, SourceTerm)>,
}

struct Expander<'a> {
    sig: &'a Signature,
    calls: usize,
}

/// Expands every template call in `terms`, which share one variable scope.
/// Alternatives come out in definition order, leftmost call first.
pub fn expand_templates(sig: &Signature, terms: &[SourceTerm]) -> Result<Vec<Expansion>, CompileError> {
    if terms.iter().all(SourceTerm::is_expanded) {
        return Ok(vec![Expansion { terms: terms.to_vec(), equations: Vec::new() }]);
    }
    let mut ex = Expander { sig, calls: 0 };
    let alts = ex.seq(terms, State::default(), &mut Vec::new())?;
    Ok(alts
        .into_iter()
        .map(|(ts, st)| {
            let terms = ts.iter().map(|t| apply(t, &st.subst)).collect();
            let equations = st.equations.iter().map(|(a, b)| (apply(a, &st.subst), apply(b, &st.subst))).collect();
            Expansion { terms, equations }
        })
        .collect())
}

type Alts<T> = Vec<(T, State)>;

impl Expander<'_> {
    fn seq(&mut self, terms: &[SourceTerm], st: State, stack: &mut Vec<String>) -> Result<Alts<Vec<SourceTerm>>, CompileError> {
        let mut alts: Alts<Vec<SourceTerm>> = vec![(Vec::new(), st)];
        for t in terms {
            let mut next = Vec::new();
            for (prefix, st) in alts {
                for (t2, st2) in self.term(t, st, stack)? {
                    let mut v = prefix.clone();
                    v.push(t2);
                    next.push((v, st2));
                }
            }
            alts = next;
        }
        Ok(alts)
    }

    fn term(&mut self, t: &SourceTerm, st: State, stack: &mut Vec<String>) -> Result<Alts<SourceTerm>, CompileError> {
        if t.is_expanded() {
            return Ok(vec![(t.clone(), st)]);
        }
        Ok(match t {
            SourceTerm::TemplateCall(name, args) => return self.call(name, args, st, stack),
            SourceTerm::FeatVal(f, v) => {
                self.term(v, st, stack)?.into_iter().map(|(v, st)| (SourceTerm::feat(f.clone(), v), st)).collect()
            }
            SourceTerm::Conj(l, r) | SourceTerm::Disj(l, r) => {
                let conj = matches!(t, SourceTerm::Conj(..));
                self.seq(&[(**l).clone(), (**r).clone()], st, stack)?
                    .into_iter()
                    .map(|(mut v, st)| {
                        let r = v.pop().expect("two terms");
                        let l = v.pop().expect("two terms");
                        (if conj { SourceTerm::conj(l, r) } else { SourceTerm::disj(l, r) }, st)
                    })
                    .collect()
            }
            SourceTerm::Compound(f, args) => {
                self.seq(args, st, stack)?.into_iter().map(|(a, st)| (SourceTerm::Compound(f.clone(), a), st)).collect()
            }
            SourceTerm::DoubleQuote(inner) => {
                self.term(inner, st, stack)?.into_iter().map(|(i, st)| (SourceTerm::DoubleQuote(Box::new(i)), st)).collect()
            }
            SourceTerm::Search { start, feature, value } => self
                .term(value, st, stack)?
                .into_iter()
                .map(|(v, st)| (SourceTerm::Search { start: start.clone(), feature: feature.clone(), value: Box::new(v) }, st))
                .collect(),
            _ => vec![(t.clone(), st)],
        })
    }

    fn call(&mut self, name: &str, args: &[SourceTerm], st: State, stack: &mut Vec<String>) -> Result<Alts<SourceTerm>, CompileError> {
        let key = template_key(name, args.len());
        let defs = self.sig.templates_for(name, args.len()).ok_or_else(|| CompileError::UnknownTemplate(key.clone()))?;
        if stack.contains(&key) {
            let mut chain: Vec<String> = stack.iter().map(|k| format!("@{k}")).collect();
            chain.push(format!("@{key}"));
            return Err(CompileError::RecursiveTemplate { name: key, chain: chain.join(" -> ") });
        }
        let mut out = Vec::new();
        for (args, st) in self.seq(args, st, stack)? {
            for def in defs {
                self.calls += 1;
                let suffix = self.calls;
                let rename = |t: &SourceTerm| rename_vars(t, suffix);
                let mut st2 = st.clone();
                let matched = def.params.iter().zip(&args).all(|(p, a)| unify(&rename(p), a, &mut st2));
                if !matched {
                    continue;
                }
                stack.push(key.clone());
                let expanded = self.term(&rename(&def.body), st2, stack);
                stack.pop();
                out.extend(expanded?);
            }
        }
        if out.is_empty() {
            return Err(CompileError::NoTemplateMatch(key));
        }
        Ok(out)
    }
}

/// Gives the variables of a template definition names no clause can use.
fn rename_vars(t: &SourceTerm, n: usize) -> SourceTerm {
    map_vars(t, &mut |v| if v == "_" { SourceTerm::var("_") } else { SourceTerm::var(format!("_T{n}_{v}")) })
}

fn map_vars(t: &SourceTerm, f: &mut impl FnMut(&str) -> SourceTerm) -> SourceTerm {
    match t {
        SourceTerm::Var(v) => f(v),
        SourceTerm::SortRef(_) | SourceTerm::Atom(_) | SourceTerm::Int(_) | SourceTerm::FinDom(_) => t.clone(),
        SourceTerm::FeatVal(feat, v) => SourceTerm::feat(feat.clone(), map_vars(v, f)),
        SourceTerm::Conj(l, r) => SourceTerm::conj(map_vars(l, f), map_vars(r, f)),
        SourceTerm::Disj(l, r) => SourceTerm::disj(map_vars(l, f), map_vars(r, f)),
        SourceTerm::TemplateCall(n, args) => SourceTerm::TemplateCall(n.clone(), args.iter().map(|a| map_vars(a, f)).collect()),
        SourceTerm::Compound(n, args) => SourceTerm::Compound(n.clone(), args.iter().map(|a| map_vars(a, f)).collect()),
        SourceTerm::Quote(i) => SourceTerm::Quote(Box::new(map_vars(i, f))),
        SourceTerm::DoubleQuote(i) => SourceTerm::DoubleQuote(Box::new(map_vars(i, f))),
        SourceTerm::Search { start, feature, value } => {
            SourceTerm::Search { start: start.clone(), feature: feature.clone(), value: Box::new(map_vars(value, f)) }
        }
    }
}

fn walk<'a>(mut t: &'a SourceTerm, subst: &'a HashMap<String, SourceTerm>) -> &'a SourceTerm {
    while let SourceTerm::Var(v) = t {
        match subst.get(v) {
            Some(next) => t = next,
            None => break,
        }
    }
    t
}

fn is_description(t: &SourceTerm) -> bool {
    !matches!(t, SourceTerm::Var(_) | SourceTerm::Atom(_) | SourceTerm::Int(_) | SourceTerm::Compound(..))
}

/// Unification of source terms. Descriptions are not decomposed here; a pair
/// involving one becomes an equation.
fn unify(a: &SourceTerm, b: &SourceTerm, st: &mut State) -> bool {
    let a = walk(a, &st.subst).clone();
    let b = walk(b, &st.subst).clone();
    match (&a, &b) {
        (SourceTerm::Var(x), SourceTerm::Var(y)) if x == y => true,
        (SourceTerm::Var(x), _) if x == "_" => true,
        (_, SourceTerm::Var(y)) if y == "_" => true,
        (SourceTerm::Var(x), _) => {
            st.subst.insert(x.clone(), b);
            true
        }
        (_, SourceTerm::Var(y)) => {
            st.subst.insert(y.clone(), a);
            true
        }
        (SourceTerm::Atom(x), SourceTerm::Atom(y)) => x == y,
        (SourceTerm::Int(x), SourceTerm::Int(y)) => x == y,
        (SourceTerm::Compound(f, xs), SourceTerm::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify(x, y, st))
        }
        _ if is_description(&a) || is_description(&b) => {
            st.equations.push((a, b));
            true
        }
        _ => false,
    }
}

/// Applies a substitution. A variable whose binding mentions itself is kept
/// and conjoined with its value, which is how cyclic terms are written.
fn apply(t: &SourceTerm, subst: &HashMap<String, SourceTerm>) -> SourceTerm {
    fn go(t: &SourceTerm, subst: &HashMap<String, SourceTerm>, active: &mut Vec<String>, cyclic: &mut HashSet<String>) -> SourceTerm {
        match t {
            SourceTerm::Var(v) => match subst.get(v) {
                None => t.clone(),
                Some(_) if active.contains(v) => {
                    cyclic.insert(v.clone());
                    t.clone()
                }
                Some(value) => {
                    active.push(v.clone());
                    let r = go(value, subst, active, cyclic);
                    active.pop();
                    if cyclic.contains(v) {
                        SourceTerm::conj(t.clone(), r)
                    } else {
                        r
                    }
                }
            },
            _ => map_children(t, &mut |c| go(c, subst, active, cyclic)),
        }
    }
    go(t, subst, &mut Vec::new(), &mut HashSet::new())
}

fn map_children(t: &SourceTerm, f: &mut dyn FnMut(&SourceTerm) -> SourceTerm) -> SourceTerm {
    match t {
        SourceTerm::Var(_) | SourceTerm::SortRef(_) | SourceTerm::Atom(_) | SourceTerm::Int(_) | SourceTerm::FinDom(_) => {
            t.clone()
        }
        SourceTerm::FeatVal(feat, v) => SourceTerm::feat(feat.clone(), f(v)),
        SourceTerm::Conj(l, r) => SourceTerm::conj(f(l), f(r)),
        SourceTerm::Disj(l, r) => SourceTerm::disj(f(l), f(r)),
        SourceTerm::TemplateCall(n, args) => SourceTerm::TemplateCall(n.clone(), args.iter().map(&mut *f).collect()),
        SourceTerm::Compound(n, args) => SourceTerm::Compound(n.clone(), args.iter().map(&mut *f).collect()),
        SourceTerm::Quote(i) => SourceTerm::Quote(Box::new(f(i))),
        SourceTerm::DoubleQuote(i) => SourceTerm::DoubleQuote(Box::new(f(i))),
        SourceTerm::Search { start, feature, value } => {
            SourceTerm::Search { start: start.clone(), feature: feature.clone(), value: Box::new(f(value)) }
        }
    }
}

fn calls(t: &SourceTerm, out: &mut Vec<String>) {
    if let SourceTerm::TemplateCall(n, args) = t {
        out.push(template_key(n, args.len()));
    }
    match t {
        SourceTerm::Quote(_) => {}
        _ => {
            map_children(t, &mut |c| {
                calls(c, out);
                c.clone()
            });
        }
    }
}

/// Rejects template definitions that can reach themselves through calls in
/// their heads or values.
pub(crate) fn check_recursion(sig: &Signature) -> Result<(), (Pos, CompileError)> {
    let mut graph: HashMap<&str, Vec<String>> = HashMap::new();
    for (key, defs) in &sig.templates {
        let mut out = Vec::new();
        for d in defs {
            for p in &d.params {
                calls(p, &mut out);
            }
            calls(&d.body, &mut out);
        }
        graph.insert(key, out);
    }
    // depth-first search for a back edge
    fn visit<'a>(
        key: &'a str,
        graph: &'a HashMap<&'a str, Vec<String>>,
        path: &mut Vec<&'a str>,
        done: &mut HashSet<&'a str>,
    ) -> Option<Vec<String>> {
        if let Some(i) = path.iter().position(|k| *k == key) {
            let mut chain: Vec<String> = path[i..].iter().map(|k| format!("@{k}")).collect();
            chain.push(format!("@{key}"));
            return Some(chain);
        }
        if !done.insert(key) {
            return None;
        }
        path.push(key);
        for next in graph.get(key).into_iter().flatten() {
            if let Some((k, _)) = graph.get_key_value(next.as_str()) {
                if let Some(c) = visit(k, graph, path, done) {
                    return Some(c);
                }
            }
        }
        path.pop();
        None
    }
    let mut done = HashSet::new();
    for key in sig.templates.keys() {
        let mut path = Vec::new();
        if let Some(chain) = visit(key, &graph, &mut path, &mut done) {
            let name = chain.last().map(|c| c.trim_start_matches('@').to_string()).unwrap_or_default();
            let pos = sig.templates.get(&name).and_then(|d| d.first()).map(|d| d.pos).unwrap_or_default();
            return Err((pos, CompileError::RecursiveTemplate { name, chain: chain.join(" -> ") }));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decls::build_signature;
    use crate::syntax::{parse_program, parse_query, print_term};

    fn sig(src: &str) -> Signature {
        build_signature(&parse_program(src).unwrap()).unwrap()
    }

    fn expand(sig: &Signature, q: &str) -> Vec<String> {
        let goals = parse_query(q).unwrap();
        expand_templates(sig, &goals)
            .unwrap()
            .into_iter()
            .map(|e| e.terms.iter().map(print_term).collect::<Vec<_>>().join(", "))
            .collect()
    }

    const LISTS: &str = "first([First|Rest]) := First.\nrest([First|Rest]) := Rest.\n";

    #[test]
    fn functional_notation() {
        let s = sig(LISTS);
        assert_eq!(expand(&s, "member(@first(List), List)."), ["member(_T1_First, [_T1_First|_T1_Rest])"]);
        assert_eq!(
            expand(&s, "member(Element, List), member(Element, @rest(List))."),
            ["member(Element, [_T1_First|_T1_Rest]), member(Element, _T1_Rest)"]
        );
    }

    #[test]
    fn relational_templates() {
        let s = sig("colour(red) := warm.\ncolour(blue) := cold.\ncolour(X) := any.\n");
        assert_eq!(expand(&s, "p(@colour(C), C)."), ["p(warm, red)", "p(cold, blue)", "p(any, C)"]);
        assert_eq!(expand(&s, "p(@colour(red))."), ["p(warm)", "p(any)"]);
    }

    #[test]
    fn description_arguments_become_equations() {
        let s = sig("sign intro [cont]. semantics(cont!Sem) := Sem.\n");
        let goals = parse_query("p(@semantics(<sign)).").unwrap();
        let exps = expand_templates(&s, &goals).unwrap();
        assert_eq!(exps.len(), 1);
        assert_eq!(exps[0].equations.len(), 1);
        let goals = parse_query("p(@semantics(S), S).").unwrap();
        let exps = expand_templates(&s, &goals).unwrap();
        assert_eq!(print_term(&exps[0].terms[0]), "p(_T1_Sem, cont!_T1_Sem)");
    }

    #[test]
    fn errors() {
        let s = sig(LISTS);
        let goals = parse_query("p(@nope(X)).").unwrap();
        assert_eq!(expand_templates(&s, &goals).unwrap_err(), CompileError::UnknownTemplate("nope/1".into()));
        let goals = parse_query("p(@first(a)).").unwrap();
        assert_eq!(expand_templates(&s, &goals).unwrap_err(), CompileError::NoTemplateMatch("first/1".into()));
        let rec = sig("t := @t.\n");
        assert!(matches!(check_recursion(&rec), Err((_, CompileError::RecursiveTemplate { .. }))));
        let goals = parse_query("p(@t).").unwrap();
        assert!(matches!(expand_templates(&rec, &goals), Err(CompileError::RecursiveTemplate { .. })));
        let mutual = sig("a(X) := @b(X).\nb(X) := f(@a(X)).\n");
        assert!(check_recursion(&mutual).is_err());
    }

    #[test]
    fn cyclic_binding() {
        let s = sig("same(X, X) := X.\n");
        // binds X = f(X) through the template head
        let goals = parse_query("p(@same(X, f(X))).").unwrap();
        let e = &expand_templates(&s, &goals).unwrap()[0];
        assert_eq!(print_term(&e.terms[0]), "p(X & f(X))");
    }
}
