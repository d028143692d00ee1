//! Rational-tree unification and depth-first resolution.

mod cycles;
mod solve;
mod store;

pub use cycles::find_cycles;
pub(crate) use cycles::cycle_targets;
pub use solve::{CoreQuery, EngineError, Solution, Solver, UnknownPredicate};
pub use store::{Mark, Store};
