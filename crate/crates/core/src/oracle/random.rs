//! Random signatures and descriptions for property and comparison tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::decls::{Signature, TOP};
use crate::syntax::SourceTerm;

/// Size bounds for generated signatures.
#[derive(Debug, Clone, Copy)]
pub struct SigBounds {
    pub max_sorts: usize,
    pub max_dimensions: usize,
    pub max_features: usize,
}

impl Default for SigBounds {
    fn default() -> Self {
        SigBounds { max_sorts: 10, max_dimensions: 2, max_features: 8 }
    }
}

/// Declaration text for a random sort hierarchy with features. Sorts are
/// `s0, s1, ...`, features `f0, f1, ...`.
pub fn signature_text(rng: &mut impl Rng, bounds: SigBounds) -> String {
    let n = rng.gen_range(2..=bounds.max_sorts.max(2));
    let parent: Vec<Option<usize>> =
        (0..n).map(|i| if i == 0 || rng.gen_bool(0.3) { None } else { Some(rng.gen_range(0..i)) }).collect();
    let mut dims: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n];
    for (p, slot) in dims.iter_mut().enumerate() {
        let children: Vec<usize> = (0..n).filter(|c| parent[*c] == Some(p)).collect();
        if children.is_empty() {
            continue;
        }
        let k = rng.gen_range(1..=bounds.max_dimensions.min(children.len()));
        *slot = vec![Vec::new(); k];
        for (j, c) in children.into_iter().enumerate() {
            let d = if j < k { j } else { rng.gen_range(0..k) };
            slot[d].push(c);
        }
    }
    let m = rng.gen_range(1..=bounds.max_features.max(1));
    let mut feats: Vec<Vec<(usize, Option<usize>)>> = vec![Vec::new(); n];
    for f in 0..m {
        let intro = rng.gen_range(0..n);
        let restriction = if rng.gen_bool(0.4) { None } else { Some(rng.gen_range(0..n)) };
        feats[intro].push((f, restriction));
    }
    let mut out = String::new();
    for s in 0..n {
        let features: Vec<String> = feats[s]
            .iter()
            .map(|(f, r)| match r {
                Some(r) => format!("f{f}:s{r}"),
                None => format!("f{f}"),
            })
            .collect();
        let intro = format!("intro [{}]", features.join(", "));
        if dims[s].is_empty() {
            if !features.is_empty() || parent[s].is_none() {
                out.push_str(&format!("s{s} {intro}.\n"));
            }
        } else {
            let d: Vec<String> = dims[s]
                .iter()
                .map(|d| format!("[{}]", d.iter().map(|c| format!("s{c}")).collect::<Vec<_>>().join(", ")))
                .collect();
            out.push_str(&format!("s{s} > {} {intro}.\n", d.join(" * ")));
        }
    }
    out
}

const VARS: [&str; 3] = ["X", "Y", "Z"];
const ATOMS: [&str; 2] = ["a", "b"];

/// A random description of at most `depth` feature levels, mixing sorts,
/// features, coreference variables and atoms. Choices mostly follow the
/// signature (subsorts of the expected sort, appropriate features), with
/// enough arbitrary ones to make a fair share of unifications fail.
pub fn description(rng: &mut impl Rng, sig: &Signature, depth: usize) -> SourceTerm {
    node(rng, sig, None, depth)
}

fn pick<'v, T>(rng: &mut impl Rng, items: &'v [T]) -> Option<&'v T> {
    items.choose(rng)
}

fn node(rng: &mut impl Rng, sig: &Signature, expected: Option<&str>, depth: usize) -> SourceTerm {
    let all_sorts: Vec<String> = sig.sorts.keys().filter(|s| *s != TOP).cloned().collect();
    let all_features: Vec<String> = sig.features.keys().cloned().collect();
    let mut current: Option<String> = expected.map(str::to_string);
    let k = rng.gen_range(1..=if depth > 2 { 3 } else { 2 });
    let mut parts = Vec::with_capacity(k);
    for _ in 0..k {
        let r: f64 = rng.gen();
        let part = if r < 0.3 {
            let below = match &current {
                Some(c) if rng.gen_bool(0.95) => sig.descendants(c),
                _ => all_sorts.clone(),
            };
            let Some(s) = pick(rng, &below).cloned() else { continue };
            current = Some(s.clone());
            SourceTerm::sort(s)
        } else if r < 0.37 {
            SourceTerm::var(*VARS.choose(rng).expect("vars"))
        } else if r < 0.40 && expected.is_none() {
            SourceTerm::atom(*ATOMS.choose(rng).expect("atoms"))
        } else if depth > 0 && !all_features.is_empty() {
            let appropriate: Vec<String> = match &current {
                Some(c) if rng.gen_bool(0.95) => {
                    sig.available_features(c).unwrap_or_default().into_iter().map(|(f, _)| f).collect()
                }
                _ => Vec::new(),
            };
            let f = pick(rng, &appropriate).or_else(|| pick(rng, &all_features)).expect("features").clone();
            let restriction = sig.features[&f].restriction.clone();
            if current.is_none() {
                current = Some(sig.features[&f].introducer.clone());
            }
            let inner = (restriction != TOP).then_some(restriction.as_str());
            SourceTerm::feat(f.clone(), node(rng, sig, inner, depth - 1))
        } else {
            let Some(s) = pick(rng, &all_sorts).cloned() else { continue };
            SourceTerm::sort(s)
        };
        parts.push(part);
    }
    if parts.is_empty() {
        return SourceTerm::var("_");
    }
    parts.into_iter().rev().reduce(|r, l| SourceTerm::conj(l, r)).expect("at least one part")
}
