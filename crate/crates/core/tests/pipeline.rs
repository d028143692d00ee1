//! End-to-end runs over the fixture programs: compile, solve, decode.

use fitc_core::compile::compile_source;
use fitc_core::decomp::decode_solution;
use fitc_core::{compile_query, CompileOptions, KnowledgeBase, RenderStyle, Solver};

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

fn kb(name: &str) -> KnowledgeBase {
    compile_source(&fixture(name), &CompileOptions::default()).unwrap_or_else(|d| panic!("{d}"))
}

/// Every answer to `query`, one string of `Name = value` lines per answer.
fn answers(kb: &KnowledgeBase, query: &str) -> Vec<String> {
    let opts = CompileOptions::default();
    let mut out = Vec::new();
    for q in compile_query(kb, query, &opts).unwrap() {
        for sol in Solver::new(&kb.program, &q) {
            let answer = decode_solution(kb, &sol.unwrap(), &opts).unwrap();
            out.push(answer.lines(RenderStyle::Plain).join(", "));
        }
    }
    out
}

#[test]
fn member_expands_to_standard_definition() {
    let kb = kb("member.fit");
    assert_eq!(
        kb.program.to_text(),
        "member(A, [A|B]).\nmember(A, [B|C]) :-\n    member(A, C).\n"
    );
    assert_eq!(answers(&kb, "member(X, [a,b,c])."), ["X = a", "X = b", "X = c"]);
}

#[test]
fn lexicon() {
    let kb = kb("lexicon.fit");
    assert_eq!(kb.program.len(), 7);
    assert_eq!(answers(&kb, "verb(W, 1&sg)."), ["W = sleep", "W = am"]);
    assert!(answers(&kb, "verb(sleeps, 2@agr).").is_empty());
    assert_eq!(answers(&kb, "np(you, A), verb(are, A)."), ["A = 2&sg or 2&pl"]);
    assert_eq!(answers(&kb, "verb(is, A)."), ["A = 3&sg"]);
}

#[test]
fn sem_p_alternatives() {
    let kb = kb("hpsg.fit");
    let sem_p = kb.program.lookup("sem_p", 1).unwrap();
    assert_eq!(sem_p.len(), 4);
    let a = answers(&kb, "sem_p(<head_comp & head_dtr!synsem!local!cont!reln!r).");
    assert_eq!(a.len(), 1);
    assert!(a[0].is_empty(), "{a:?}");
}

#[test]
fn tree_leaves() {
    let kb = kb("tree.fit");
    let q = "leaves(<internal_node & left!(<leaf & label!a) & right!(<internal_node & left!(label!b & <leaf) & right!(<leaf & label!c)), L).";
    assert_eq!(answers(&kb, q), ["L = [a, b, c]"]);
}

#[test]
fn answers_show_sorts_and_sharing() {
    let kb = kb("hpsg.fit");
    let a = answers(&kb, "hfp(S), S = <head_comp.");
    assert_eq!(a, ["S = <head_comp & synsem!local!cat!head!A & head_dtr!synsem!local!cat!head!A"]);
}
