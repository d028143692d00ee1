//! Runs the `fitc` binary on small programs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fitc_core::{compile_query, ClauseDb, CompileOptions, KnowledgeBase, Solver};

const LEXICON: &str = "agr fin_dom [1,2,3] * [sg,pl].
verb(sleeps, 3&sg).
verb(sleep, ~(3&sg)).
verb(am, 1&sg).
";

fn fitc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fitc")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn member_program_text() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "member.fit",
        "first(X) := [X|_]. rest(R) := [_|R].
member(X, @first(X)).
member(X, @rest(R)) :- member(X, R).",
    );
    let o = fitc(&["compile", "member.fit"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("member.pl")).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('%')).collect();
    assert_eq!(body, ["member(A, [A|B]).", "member(A, [B|C]) :-", "    member(A, C)."]);
    assert!(text.starts_with("% source: member.fit\n% options: "));
    assert!(dir.path().join("member.fkb").exists());
}

#[test]
fn lexicon_query() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "lex.fit", LEXICON);
    assert!(fitc(&["compile", "lex.fit", "-o", "out.pl"], dir.path()).status.success());
    let o = fitc(&["query", "out.fkb", "-e", "verb(W, 1&sg)."], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "W = sleep ;\nW = am ;\nno\n");
}

#[test]
fn interactive_session_survives_errors() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "lex.fit", LEXICON);
    assert!(fitc(&["compile", "lex.fit"], dir.path()).status.success());
    let mut child = Command::new(env!("CARGO_BIN_EXE_fitc"))
        .args(["query", "lex.pl"])
        .current_dir(dir.path())
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(b"verb(W, (.\n?- verb(am, A).\n;\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert!(o.status.success());
    assert!(stderr(&o).contains("error[syntax]"), "{}", stderr(&o));
    assert!(stdout(&o).contains("A = 1&sg"), "{}", stdout(&o));
    assert!(stdout(&o).contains("no"), "{}", stdout(&o));
}

#[test]
fn cyclic_answers() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "cyc.fit", "p(X) :- X = f(X).");
    assert!(fitc(&["compile", "cyc.fit"], dir.path()).status.success());
    let o = fitc(&["query", "cyc.fkb", "-e", "p(X)."], dir.path());
    assert_eq!(stdout(&o), "X = A & f(A) ;\nno\n");
    let o = fitc(&["query", "cyc.fkb", "--no-cyclic", "-e", "p(X)."], dir.path());
    assert_eq!(stdout(&o), "X = f(f(f('...'))) ;\nno\n");
    assert!(stderr(&o).contains("warning"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.fit", "a > [b].\nb > [a].\n");
    let o = fitc(&["compile", "bad.fit"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("bad.fit:"), "{}", stderr(&o));
    assert!(stderr(&o).contains("error[signature]"));
    assert_eq!(fitc(&["compile"], dir.path()).status.code(), Some(2));
    assert_eq!(fitc(&["compile", "missing.fit"], dir.path()).status.code(), Some(2));
    assert_eq!(fitc(&["frobnicate"], dir.path()).status.code(), Some(2));
}

#[test]
fn errors_name_the_right_file() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "sig.fit", "agr fin_dom [sg,pl].\n");
    write(dir.path(), "clauses.fit", "p(sg).\n\np(sg & pl).\n");
    let o = fitc(&["compile", "sig.fit", "clauses.fit"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("clauses.fit:3:"), "{}", stderr(&o));
    assert!(stderr(&o).contains("error[empty-domain]"));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "lex.fit", LEXICON);
    fitc(&["compile", "lex.fit", "-o", "a.pl"], dir.path());
    fitc(&["compile", "lex.fit", "-o", "b.pl"], dir.path());
    let read = |n: &str| fs::read(dir.path().join(n)).unwrap();
    assert_eq!(read("a.pl"), read("b.pl"));
    assert_eq!(read("a.fkb"), read("b.fkb"));
    fitc(&["compile", "lex.fit", "--no-sort-check", "-o", "c.pl"], dir.path());
    assert_ne!(read("a.pl").split(|b| *b == b'\n').nth(1), read("c.pl").split(|b| *b == b'\n').nth(1));
}

#[test]
fn text_and_kb_give_the_same_solutions() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "lex.fit", LEXICON);
    fitc(&["compile", "lex.fit"], dir.path());
    let kb = KnowledgeBase::from_json(&fs::read_to_string(dir.path().join("lex.fkb")).unwrap()).unwrap();
    let text = ClauseDb::from_text(&fs::read_to_string(dir.path().join("lex.pl")).unwrap()).unwrap();
    let opts = CompileOptions::default();
    for goal in ["verb(W, A).", "verb(W, 1&sg).", "verb(W, ~(1&sg))."] {
        for q in compile_query(&kb, goal, &opts).unwrap() {
            let run = |db: &ClauseDb| -> Vec<String> {
                Solver::new(db, &q)
                    .map(|s| {
                        let s = s.unwrap();
                        s.bindings.iter().map(|(_, t)| s.store.resolve(t).to_string()).collect::<Vec<_>>().join(",")
                    })
                    .collect()
            };
            assert_eq!(run(&kb.program), run(&text), "{goal}");
        }
    }
}
