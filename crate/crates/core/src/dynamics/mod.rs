//! Interpreters for instances on the one-arrow loop schema: dynamical
//! systems, Markov chains, automata, recursion, Turing machines.

mod graph;
mod tape;

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

pub use graph::{export_dot, instance_to_schema};
pub use tape::{check_tape_eval_not_monad_morphism, run_turing, tape_eval, Tape, TapeEvalReport};

use crate::instance::{Instance, InstanceError};
use crate::monad::{Entry, Id, MonadError, MonadTag, TValue};
use crate::rational::Rational;
use crate::schema::{Path, Schema, SchemaError};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("schema `{0}` is not a single object with a single endo-arrow")]
    NotLoop(String),
    #[error("expected monad `{expected}`, found `{found}`")]
    WrongMonad { expected: String, found: String },
    #[error("`{0}` is not a row")]
    UnknownRow(Id),
    #[error("row `{0}` has no cell")]
    MissingCell(Id),
    #[error("`{0}` is not an input letter")]
    BadLetter(String),
    #[error("`{0}` is not a tape instruction (L, R, W0, W1)")]
    BadInstruction(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Instance(#[from] InstanceError),
    #[error("{0}")]
    Monad(#[from] MonadError),
    #[error("{0}")]
    Schema(#[from] SchemaError),
}

pub type Result<T, E = DynamicsError> = std::result::Result<T, E>;

/// How a run ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Halted { tape: Tape, steps: usize },
    Returned { label: String, steps: usize },
    Timeout { steps: usize },
}

/// The loop's `(object, arrow)`.
pub fn loop_of(inst: &Instance) -> Result<(String, String)> {
    inst.schema()
        .as_loop()
        .map(|(o, a)| (o.to_string(), a.to_string()))
        .ok_or_else(|| DynamicsError::NotLoop(inst.schema().name.clone()))
}

fn expect_kind(inst: &Instance, kind: &str) -> Result<()> {
    if inst.tag().kind() != kind {
        return Err(DynamicsError::WrongMonad { expected: kind.into(), found: inst.tag().to_string() });
    }
    Ok(())
}

fn step<'a>(inst: &'a Instance, arrow: &str, id: &str) -> Result<&'a TValue> {
    inst.cell(arrow, id).ok_or_else(|| DynamicsError::MissingCell(id.to_string()))
}

/// `f^n` evaluated at `start`; `n = 0` gives the unit.
pub fn iterate(inst: &Instance, start: &str, n: usize) -> Result<TValue> {
    let (obj, arrow) = loop_of(inst)?;
    if !inst.has_row(&obj, start) {
        return Err(DynamicsError::UnknownRow(start.into()));
    }
    let path = Path { src: obj, arrows: vec![arrow; n] };
    Ok(inst.eval_path(&path, start)?)
}

/// [`iterate`] restricted to linear maps.
pub fn vect_iterate(inst: &Instance, start: &str, n: usize) -> Result<TValue> {
    expect_kind(inst, "vect")?;
    iterate(inst, start, n)
}

/// Transition matrix in row order: entry `(i, j)` is the weight of state
/// `j` in the distribution of state `i`.
pub fn markov_matrix(inst: &Instance) -> Result<(Vec<Id>, Vec<Vec<Rational>>)> {
    expect_kind(inst, "dist")?;
    let (obj, arrow) = loop_of(inst)?;
    let states: Vec<Id> = inst.rows(&obj).cloned().collect();
    let mut matrix = Vec::with_capacity(states.len());
    for s in &states {
        let TValue::Dist(d) = step(inst, &arrow, s)? else { unreachable!() };
        matrix.push(states.iter().map(|t| d.get(t).cloned().unwrap_or_default()).collect());
    }
    Ok((states, matrix))
}

/// Feeds `word` one letter at a time and returns the final state.
pub fn run_fsa<S: AsRef<str>>(inst: &Instance, start: &str, word: &[S]) -> Result<Id> {
    expect_kind(inst, "inp")?;
    let (obj, arrow) = loop_of(inst)?;
    if !inst.has_row(&obj, start) {
        return Err(DynamicsError::UnknownRow(start.into()));
    }
    let MonadTag::Inp(inputs) = inst.tag() else { unreachable!() };
    let mut state = start.to_string();
    for letter in word {
        let letter = letter.as_ref();
        if !inputs.contains(letter) {
            return Err(DynamicsError::BadLetter(letter.into()));
        }
        let TValue::Inp(t) = step(inst, &arrow, &state)? else { unreachable!() };
        state = t[letter].clone();
    }
    Ok(state)
}

/// Follows `f` from `start` until a cell is an exception label.
pub fn run_recursive(inst: &Instance, start: &str, max_steps: usize) -> Result<RunOutcome> {
    expect_kind(inst, "exc")?;
    let (obj, arrow) = loop_of(inst)?;
    if !inst.has_row(&obj, start) {
        return Err(DynamicsError::UnknownRow(start.into()));
    }
    let mut state = start.to_string();
    for steps in 1..=max_steps {
        match step(inst, &arrow, &state)? {
            TValue::Exc(Entry::Label(label)) => return Ok(RunOutcome::Returned { label: label.clone(), steps }),
            TValue::Exc(Entry::Id(next)) => state = next.clone(),
            _ => unreachable!(),
        }
    }
    Ok(RunOutcome::Timeout { steps: max_steps })
}

pub const MAX_FACTORIAL: u32 = 30;

fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

/// The factorial recursion `(m, n) -> (m n, n - 1)`, `(m, 0) -> !m`, on the
/// states reachable from `(1, n)` for `n <= max_n`. Row `(m, n)` is named
/// `m_n`.
pub fn factorial_instance(max_n: u32) -> Result<Instance> {
    if max_n > MAX_FACTORIAL {
        return Err(DynamicsError::Unsupported(format!("factorial tables stop at {MAX_FACTORIAL}")));
    }
    let schema = Arc::new(Schema::parse("schema Loop\nobject s\narrow f : s -> s\n")?);
    let labels: BTreeSet<String> = (0..=max_n).map(|n| factorial(n).to_string()).collect();
    let mut inst = Instance::empty("factorial", schema, MonadTag::Exc(labels));
    for start in 0..=max_n {
        let (mut m, mut n) = (1u128, start);
        loop {
            let id = format!("{m}_{n}");
            if !inst.insert_row("s", &id)? {
                break;
            }
            let value = if n == 0 {
                Entry::Label(m.to_string())
            } else {
                (m, n) = (m * n as u128, n - 1);
                Entry::Id(format!("{m}_{n}"))
            };
            inst.set_cell("f", &id, TValue::Exc(value))?;
        }
    }
    Ok(inst)
}
