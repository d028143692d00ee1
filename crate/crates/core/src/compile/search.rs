//! Resolution of `>>>` feature searches to feature paths.

use thiserror::Error;

use crate::decls::{Signature, TOP};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("no path from `{start}` reaches feature `{feature}`")]
    NoPath { start: String, feature: String },
    #[error("feature `{feature}` is reachable from `{start}` by several paths: {}", .paths.join(", "))]
    Ambiguous { start: String, feature: String, paths: Vec<String> },
    #[error("cannot tell where to start the search for `{0}`; write Sort>>>{0}!Value")]
    NoContext(String),
}

/// Every path from `start` to `feature` that repeats no feature and passes
/// through no sort comparable with one already visited. Only sort-valued
/// restrictions are followed; features restricted to top or to a finite
/// domain end a path.
pub(crate) fn candidate_paths(sig: &Signature, start: &str, feature: &str) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut sorts = vec![start.to_string()];
    let mut path = Vec::new();
    walk(sig, start, feature, &mut sorts, &mut path, &mut out);
    out
}

fn comparable(sig: &Signature, a: &str, b: &str) -> bool {
    sig.is_subsort(a, b) || sig.is_subsort(b, a)
}

fn walk(sig: &Signature, sort: &str, feature: &str, sorts: &mut Vec<String>, path: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
    let Ok(features) = sig.available_features(sort) else { return };
    for (f, r) in features {
        if path.contains(&f) {
            continue;
        }
        if f == feature {
            let mut p = path.clone();
            p.push(f);
            out.push(p);
            continue;
        }
        if r == TOP || !sig.is_sort(&r) || sorts.iter().any(|s| comparable(sig, s, &r)) {
            continue;
        }
        path.push(f);
        sorts.push(r.clone());
        walk(sig, &r, feature, sorts, path, out);
        sorts.pop();
        path.pop();
    }
}

/// The unique search path from `start` to `feature`.
pub fn resolve_search(sig: &Signature, start: &str, feature: &str) -> Result<Vec<String>, SearchError> {
    let mut paths = candidate_paths(sig, start, feature);
    match paths.len() {
        0 => Err(SearchError::NoPath { start: start.to_string(), feature: feature.to_string() }),
        1 => Ok(paths.remove(0)),
        _ => Err(SearchError::Ambiguous {
            start: start.to_string(),
            feature: feature.to_string(),
            paths: paths.iter().map(|p| p.join("!")).collect(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decls::build_signature;
    use crate::syntax::parse_program;

    fn sig(src: &str) -> Signature {
        build_signature(&parse_program(src).unwrap()).unwrap()
    }

    const HPSG: &str = "sign > [word, phrase] intro [synsem:synsem].
        phrase intro [head_dtr:sign].
        synsem intro [local:local].
        local intro [cat:cat, cont].
        cat intro [head, subcat].";

    #[test]
    fn unique_path() {
        let s = sig(HPSG);
        assert_eq!(resolve_search(&s, "sign", "head").unwrap(), ["synsem", "local", "cat", "head"]);
        assert_eq!(resolve_search(&s, "phrase", "cont").unwrap(), ["synsem", "local", "cont"]);
        assert_eq!(resolve_search(&s, "cat", "head").unwrap(), ["head"]);
        assert!(matches!(resolve_search(&s, "cat", "cont"), Err(SearchError::NoPath { .. })));
    }

    #[test]
    fn ambiguity_lists_candidates() {
        let s = sig("a intro [p:b, q:b]. b intro [f].");
        match resolve_search(&s, "a", "f") {
            Err(SearchError::Ambiguous { paths, .. }) => assert_eq!(paths, ["p!f", "q!f"]),
            other => panic!("{other:?}"),
        }
    }
}
