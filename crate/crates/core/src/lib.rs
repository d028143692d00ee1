//! Compiler and runtime for logic programs over sorted feature terms.
//!
//! Declarations of sorts, features, finite domains and templates are turned
//! into a [`LayoutTable`](layout::LayoutTable); definite clauses written with
//! feature terms are compiled into plain first-order clauses whose ordinary
//! unification implements sorted-feature unification. The [`engine`] runs the
//! compiled program and [`decomp`] turns answers back into feature notation.

pub mod compile;
pub mod decls;
pub mod decomp;
pub mod engine;
pub mod kb;
pub mod layout;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod syntax;
pub mod term;

pub use compile::{compile_program, compile_query, CompileError, CompileOptions, Diagnostic, ErrorClass};
pub use decls::{build_signature, Signature};
pub use decomp::{decode_solution, render, Answer, DecodeError, Decoder, RenderStyle};
pub use engine::{Solver, Store};
pub use kb::{ClauseDb, CoreClause, KnowledgeBase};
pub use layout::LayoutTable;
pub use term::Term;
