//! Property tests over the encodings, the store and the printer.

use fitc_core::compile::{compile_source, compile_term};
use fitc_core::decls::ElementSet;
use fitc_core::oracle::random::{description, signature_text, SigBounds};
use fitc_core::oracle::{isomorphic, Oracle};
use fitc_core::syntax::{parse_term, print_term};
use fitc_core::{CompileError, CompileOptions, Decoder, Store, Term};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn domain_source(dims: &[usize]) -> String {
    let factors: Vec<String> = dims
        .iter()
        .enumerate()
        .map(|(d, n)| format!("[{}]", (0..*n).map(|k| format!("e{d}_{k}")).collect::<Vec<_>>().join(",")))
        .collect();
    format!("d fin_dom {}.", factors.join(" * "))
}

/// Dimension sizes and two non-empty subsets of their product.
fn domain_and_subsets() -> impl Strategy<Value = (Vec<usize>, Vec<bool>, Vec<bool>)> {
    prop::collection::vec(1usize..4, 1..4).prop_flat_map(|dims| {
        let n: usize = dims.iter().product();
        let set = prop::collection::vec(any::<bool>(), n).prop_filter("non-empty", |s| s.contains(&true));
        (Just(dims), set.clone(), set)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn subset_encoding_round_trips((dims, a, b) in domain_and_subsets()) {
        let kb = compile_source(&domain_source(&dims), &CompileOptions::default()).unwrap();
        let n = a.len();
        let sa = ElementSet::from_fn(n, |k| a[k]);
        let sb = ElementSet::from_fn(n, |k| b[k]);
        let mut store = Store::new();
        let ta = kb.layouts.encode_subset("d", &sa, &mut store).unwrap();
        let tb = kb.layouts.encode_subset("d", &sb, &mut store).unwrap();
        prop_assert_eq!(kb.layouts.decode_subset("d", &ta, &store), Some(sa.clone()));

        // Unifying two encodings intersects the subsets.
        let both = ElementSet::from_fn(n, |k| a[k] && b[k]);
        let ok = store.unify(&ta, &tb);
        prop_assert_eq!(ok, !both.is_empty());
        if ok {
            prop_assert_eq!(kb.layouts.decode_subset("d", &ta, &store), Some(both));
        }
    }

    #[test]
    fn undo_restores_the_store(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut store = Store::new();
        let vars: Vec<Term> = (0..6).map(|_| store.fresh()).collect();
        let a = random_term(&mut rng, &vars, 3);
        let b = random_term(&mut rng, &vars, 3);
        let before = (store.resolve(&a), store.resolve(&b));
        let mark = store.mark();
        store.unify(&a, &b);
        store.undo(mark);
        prop_assert_eq!((store.resolve(&a), store.resolve(&b)), before);
        prop_assert!(vars.iter().all(|v| store.deref(v) == *v));
    }

    #[test]
    fn descriptions_print_and_parse_back(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = signature_text(&mut rng, SigBounds::default());
        let kb = compile_source(&text, &CompileOptions::default()).unwrap();
        let d = description(&mut rng, &kb.signature, 4);
        // Atom-only connectives read back as domain expressions, so the
        // text is stable from the second round on.
        let once = print_term(&parse_term(&print_term(&d)).unwrap());
        let twice = print_term(&parse_term(&once).unwrap());
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn decoding_preserves_the_denotation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let text = signature_text(&mut rng, SigBounds::default());
        let kb = compile_source(&text, &CompileOptions::default()).unwrap();
        let oracle = Oracle::new(&kb.signature);
        let d = description(&mut rng, &kb.signature, 3);
        let expected = oracle.graph(&d).unwrap();
        match compile_term(&kb.signature, &kb.layouts, &CompileOptions::default(), &d) {
            Err(CompileError::Inconsistent) => prop_assert!(expected.is_none()),
            Err(e) => prop_assert!(false, "{}: {e}", print_term(&d)),
            Ok(mut alts) => {
                let expected = expected.expect("oracle finds the description consistent");
                let mut store = Store::new();
                let t = alts.remove(0).load(&mut store).unwrap();
                let decoded = Decoder::new(&kb.signature, &kb.layouts, &store).decode_term(&t).unwrap();
                let rebuilt = oracle.graph(&decoded).unwrap().expect("decoded term is consistent");
                prop_assert!(
                    isomorphic(&oracle.normalize(&expected), &oracle.normalize(&rebuilt)),
                    "{} decoded as {}", print_term(&d), print_term(&decoded)
                );
            }
        }
    }
}

fn random_term(rng: &mut ChaCha8Rng, vars: &[Term], depth: usize) -> Term {
    use rand::Rng;
    match rng.gen_range(0..if depth == 0 { 2 } else { 4 }) {
        0 => vars[rng.gen_range(0..vars.len())].clone(),
        1 => Term::atom(["a", "b"][rng.gen_range(0..2)]),
        _ => {
            let arity = rng.gen_range(1..3);
            let args = (0..arity).map(|_| random_term(rng, vars, depth - 1)).collect();
            Term::compound(["f", "g"][rng.gen_range(0..2)], args)
        }
    }
}
