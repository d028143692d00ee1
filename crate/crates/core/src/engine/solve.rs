use std::rc::Rc;
use std::sync::Arc;

use thiserror::Error;

use super::store::{Mark, Store};
use crate::kb::ClauseDb;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("unknown predicate {0}/{1}")]
    UnknownPredicate(String, usize),
    #[error("goal is not callable: {0}")]
    NotCallable(String),
    #[error("step limit of {0} exceeded")]
    StepLimit(u64),
}

/// What to do with a call to a predicate that has no clauses.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum UnknownPredicate {
    #[default]
    Fail,
    Error,
}

/// A query over plain terms; variables are numbered `0..nvars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreQuery {
    pub goals: Vec<Term>,
    pub nvars: u32,
    /// Named query variables in order of first occurrence, with the terms
    /// they stand for.
    pub names: Vec<(String, Term)>,
}

/// One answer: the query's named variables and the bindings they live in.
#[derive(Clone, Debug)]
pub struct Solution {
    pub bindings: Vec<(String, Term)>,
    pub store: Store,
}

struct GoalNode {
    goal: Term,
    next: Goals,
}

type Goals = Option<Rc<GoalNode>>;

struct Choice {
    goal: Term,
    rest: Goals,
    clauses: Arc<[usize]>,
    next: usize,
    mark: Mark,
}

/// Depth-first, left-to-right resolution over a clause database.
pub struct Solver<'a> {
    db: &'a ClauseDb,
    store: Store,
    goals: Goals,
    choices: Vec<Choice>,
    names: Vec<(String, Term)>,
    started: bool,
    done: bool,
    unknown: UnknownPredicate,
    step_limit: Option<u64>,
    steps: u64,
}

impl<'a> Solver<'a> {
    pub fn new(db: &'a ClauseDb, query: &CoreQuery) -> Self {
        let mut store = Store::new();
        let base = store.fresh_block(query.nvars as usize);
        let mut goals = None;
        for g in query.goals.iter().rev() {
            goals = Some(Rc::new(GoalNode { goal: Store::rename(g, base), next: goals }));
        }
        let names = query.names.iter().map(|(n, t)| (n.clone(), Store::rename(t, base))).collect();
        Solver {
            db,
            store,
            goals,
            choices: Vec::new(),
            names,
            started: false,
            done: false,
            unknown: UnknownPredicate::Fail,
            step_limit: None,
            steps: 0,
        }
    }

    pub fn on_unknown(mut self, policy: UnknownPredicate) -> Self {
        self.unknown = policy;
        self
    }

    /// Bounds the number of resolution steps over the whole run.
    pub fn step_limit(mut self, limit: u64) -> Self {
        self.step_limit = Some(limit);
        self
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Computes the next answer, or `None` once the search space is
    /// exhausted.
    pub fn next_solution(&mut self) -> Result<Option<Solution>, EngineError> {
        if self.done {
            return Ok(None);
        }
        if self.started && !self.backtrack() {
            self.done = true;
            return Ok(None);
        }
        self.started = true;
        match self.run() {
            Ok(true) => Ok(Some(Solution { bindings: self.names.clone(), store: self.store.clone() })),
            Ok(false) => {
                self.done = true;
                Ok(None)
            }
            Err(e) => {
                self.done = true;
                Err(e)
            }
        }
    }

    /// Runs until the goal list is empty (true) or no alternatives remain.
    fn run(&mut self) -> Result<bool, EngineError> {
        loop {
            let Some(node) = self.goals.take() else {
                return Ok(true);
            };
            self.goals = node.next.clone();
            self.steps += 1;
            if let Some(limit) = self.step_limit {
                if self.steps > limit {
                    return Err(EngineError::StepLimit(limit));
                }
            }
            let goal = self.store.deref(&node.goal);
            let ok = match goal.key() {
                None => return Err(EngineError::NotCallable(goal.to_string())),
                Some(("true", 0)) => true,
                Some(("=", 2)) => {
                    let Term::Compound(c) = &goal else { unreachable!() };
                    self.store.unify(&c.args[0], &c.args[1])
                }
                Some((f, n)) => match self.db.lookup(f, n) {
                    Some(clauses) => {
                        let mark = self.store.mark();
                        self.choices.push(Choice { goal: goal.clone(), rest: self.goals.take(), clauses, next: 0, mark });
                        self.backtrack()
                    }
                    None => match self.unknown {
                        UnknownPredicate::Fail => false,
                        UnknownPredicate::Error => return Err(EngineError::UnknownPredicate(f.to_string(), n)),
                    },
                },
            };
            if !ok && !self.backtrack() {
                return Ok(false);
            }
        }
    }

    /// Resumes the most recent choice point with a matching clause; false
    /// when none is left.
    fn backtrack(&mut self) -> bool {
        while let Some(ch) = self.choices.last_mut() {
            self.store.undo(ch.mark);
            if ch.next >= ch.clauses.len() {
                self.choices.pop();
                continue;
            }
            let ci = ch.clauses[ch.next];
            ch.next += 1;
            let goal = ch.goal.clone();
            let rest = ch.rest.clone();
            if ch.next == ch.clauses.len() {
                self.choices.pop();
            }
            let clause = &self.db.clauses()[ci];
            let base = self.store.fresh_block(clause.nvars as usize);
            let head = Store::rename(&clause.head, base);
            if self.store.unify(&goal, &head) {
                let mut goals = rest;
                for g in clause.body.iter().rev() {
                    goals = Some(Rc::new(GoalNode { goal: Store::rename(g, base), next: goals }));
                }
                self.goals = goals;
                return true;
            }
        }
        false
    }
}

impl Iterator for Solver<'_> {
    type Item = Result<Solution, EngineError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_solution().transpose()
    }
}
