//! `fitc`: compile sorted feature term programs and query the result.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fitc_core::compile::compile_query;
use fitc_core::syntax::{parse_program, Item};
use fitc_core::{compile_program, decode_solution, CompileOptions, Diagnostic, KnowledgeBase, RenderStyle, Solver};
use sha2::{Digest, Sha256};

const EXIT_COMPILE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "fitc", version, about = "Compiler and query shell for sorted feature term programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile source files into a program text and a knowledge base.
    Compile {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Output path for the program text (default: first input with `.pl`).
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run queries against a compiled knowledge base.
    Query {
        /// A `.fkb` file, or the program text next to one.
        kb: PathBuf,
        /// Run one goal and print every answer.
        #[arg(short = 'e', long = "eval")]
        goal: Option<String>,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Args, Clone, Copy)]
struct Flags {
    /// Do not unify feature values with their value restrictions.
    #[arg(long)]
    no_sort_check: bool,
    /// Reject `>>>` feature searches.
    #[arg(long)]
    no_feature_search: bool,
    /// Print cyclic answers unrolled to a fixed depth instead of naming cycles.
    #[arg(long)]
    no_cyclic: bool,
    /// Print answers one feature per line.
    #[arg(long)]
    pretty: bool,
}

impl Flags {
    fn options(self) -> CompileOptions {
        CompileOptions {
            sort_check: !self.no_sort_check,
            feature_search: !self.no_feature_search,
            cyclic_print: !self.no_cyclic,
            pretty: self.pretty,
        }
    }
}

/// A failure that ends the process with the given status.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn compile(message: impl Into<String>) -> Self {
        Failure { code: EXIT_COMPILE, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compile { files, output, flags } => compile(&files, output, flags.options()),
        Command::Query { kb, goal, flags } => query(&kb, goal.as_deref(), flags.options()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("{}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn options_hash(opts: &CompileOptions) -> String {
    let canonical = format!(
        "sort_check={};feature_search={};cyclic_print={};pretty={}",
        opts.sort_check, opts.feature_search, opts.cyclic_print, opts.pretty
    );
    Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn diagnostic(files: &[PathBuf], d: &Diagnostic) -> String {
    let file = files.get(d.pos.file).map(|p| p.display().to_string()).unwrap_or_default();
    format!("{file}:{}:{}: error[{}]: {}", d.pos.line, d.pos.col, d.class(), d.error)
}

fn compile(files: &[PathBuf], output: Option<PathBuf>, opts: CompileOptions) -> Result<(), Failure> {
    let mut items: Vec<Item> = Vec::new();
    for (i, path) in files.iter().enumerate() {
        let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("error: {}: {e}", path.display())))?;
        let parsed = parse_program(&text).map_err(|mut e| {
            e.pos.file = i;
            Failure::compile(diagnostic(files, &Diagnostic::new(e.pos, e)))
        })?;
        items.extend(parsed.into_iter().map(|mut item| {
            item.pos.file = i;
            item
        }));
    }
    let kb = compile_program(&items, &opts).map_err(|d| Failure::compile(diagnostic(files, &d)))?;

    let out = output.unwrap_or_else(|| files[0].with_extension("pl"));
    let sources: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    let text = format!("% source: {}\n% options: {}\n{}", sources.join(", "), options_hash(&opts), kb.program.to_text());
    let write = |path: &Path, contents: &str| {
        fs::write(path, contents).map_err(|e| Failure::usage(format!("error: {}: {e}", path.display())))
    };
    write(&out, &text)?;
    write(&out.with_extension("fkb"), &kb.to_json())
}

fn load_kb(path: &Path) -> Result<KnowledgeBase, Failure> {
    let path = if path.extension().is_some_and(|e| e == "fkb") { path.to_path_buf() } else { path.with_extension("fkb") };
    let text = fs::read_to_string(&path).map_err(|e| Failure::usage(format!("error: {}: {e}", path.display())))?;
    KnowledgeBase::from_json(&text).map_err(|e| Failure::usage(format!("error: {}: {e}", path.display())))
}

/// Answers to a single query, produced lazily across its alternatives.
struct Answers<'a> {
    kb: &'a KnowledgeBase,
    opts: CompileOptions,
    queries: std::vec::IntoIter<fitc_core::engine::CoreQuery>,
    solver: Option<Solver<'a>>,
}

impl<'a> Answers<'a> {
    fn new(kb: &'a KnowledgeBase, goal: &str, opts: CompileOptions) -> Result<Self, String> {
        let queries = compile_query(kb, goal, &opts).map_err(|e| format!("error[{}]: {e}", e.class()))?;
        Ok(Answers { kb, opts, queries: queries.into_iter(), solver: None })
    }

    /// The next answer as printable text, or `None` when there are no more.
    fn next_answer(&mut self) -> Result<Option<String>, String> {
        loop {
            if self.solver.is_none() {
                match self.queries.next() {
                    Some(q) => self.solver = Some(Solver::new(&self.kb.program, &q)),
                    None => return Ok(None),
                }
            }
            let solver = self.solver.as_mut().expect("solver present");
            match solver.next_solution().map_err(|e| format!("error: {e}"))? {
                Some(sol) => {
                    let answer = decode_solution(self.kb, &sol, &self.opts).map_err(|e| format!("error: {e}"))?;
                    if answer.truncated {
                        eprintln!("warning: cyclic answer shown to a fixed depth");
                    }
                    let style = if self.opts.pretty { RenderStyle::Pretty } else { RenderStyle::Plain };
                    let lines = answer.lines(style);
                    return Ok(Some(if lines.is_empty() { "yes".to_string() } else { lines.join(",\n") }));
                }
                None => self.solver = None,
            }
        }
    }
}

fn query(kb_path: &Path, goal: Option<&str>, opts: CompileOptions) -> Result<(), Failure> {
    let kb = load_kb(kb_path)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let io_err = |e: io::Error| Failure::usage(format!("error: {e}"));
    if let Some(goal) = goal {
        let mut answers = Answers::new(&kb, goal, opts).map_err(Failure::compile)?;
        loop {
            match answers.next_answer() {
                Ok(Some(a)) => writeln!(out, "{a} ;").map_err(io_err)?,
                Ok(None) => break,
                Err(e) => return Err(Failure::compile(e)),
            }
        }
        writeln!(out, "no").map_err(io_err)?;
        return Ok(());
    }

    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    let mut pending: Option<String> = None;
    loop {
        let line = match pending.take() {
            Some(l) => l,
            None => {
                write!(out, "?- ").map_err(io_err)?;
                out.flush().map_err(io_err)?;
                match lines.next() {
                    Some(l) => l.map_err(io_err)?,
                    None => break,
                }
            }
        };
        if line.trim().is_empty() {
            continue;
        }
        let mut answers = match Answers::new(&kb, &line, opts) {
            Ok(a) => a,
            Err(e) => {
                eprintln!("{e}");
                continue;
            }
        };
        loop {
            match answers.next_answer() {
                Ok(Some(a)) => {
                    write!(out, "{a} ").map_err(io_err)?;
                    out.flush().map_err(io_err)?;
                    let reply = match lines.next() {
                        Some(l) => l.map_err(io_err)?,
                        None => {
                            writeln!(out).map_err(io_err)?;
                            return Ok(());
                        }
                    };
                    match reply.trim() {
                        ";" => continue,
                        "" => {}
                        _ => pending = Some(reply),
                    }
                    break;
                }
                Ok(None) => {
                    writeln!(out, "no").map_err(io_err)?;
                    break;
                }
                Err(e) => {
                    eprintln!("{e}");
                    break;
                }
            }
        }
    }
    writeln!(out).map_err(io_err)?;
    Ok(())
}
