use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use super::{expect_kind, loop_of, step, DynamicsError, Result, RunOutcome};
use crate::instance::Instance;
use crate::laws::{Sampler, MAX_SIZE, MAX_UNIVERSE};
use crate::monad::{MonadTag, Monoid, MonoidElem, Step, TValue};

pub const INSTRUCTIONS: [&str; 4] = ["L", "R", "W0", "W1"];

/// A binary tape with finitely many ones and a head position.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Tape {
    ones: BTreeSet<i64>,
    head: i64,
}

impl Tape {
    pub fn blank() -> Tape {
        Tape::default()
    }

    pub fn new(ones: impl IntoIterator<Item = i64>, head: i64) -> Tape {
        Tape { ones: ones.into_iter().collect(), head }
    }

    /// Cell `i` holds the `i`-th character of `bits` (`0` or `1`).
    pub fn from_bits(bits: &str, head: i64) -> Result<Tape> {
        let mut ones = BTreeSet::new();
        for (i, c) in bits.chars().enumerate() {
            match c {
                '0' => {}
                '1' => {
                    ones.insert(i as i64);
                }
                _ => return Err(DynamicsError::BadLetter(c.to_string())),
            }
        }
        Ok(Tape { ones, head })
    }

    pub fn ones(&self) -> &BTreeSet<i64> {
        &self.ones
    }

    pub fn head(&self) -> i64 {
        self.head
    }

    /// The symbol under the head.
    pub fn read(&self) -> &'static str {
        if self.ones.contains(&self.head) {
            "1"
        } else {
            "0"
        }
    }

    pub fn apply(&mut self, instruction: &str) -> Result<()> {
        match instruction {
            "L" => self.head -= 1,
            "R" => self.head += 1,
            "W0" => {
                self.ones.remove(&self.head);
            }
            "W1" => {
                self.ones.insert(self.head);
            }
            other => return Err(DynamicsError::BadInstruction(other.into())),
        }
        Ok(())
    }

    /// Applies a word, first instruction first.
    pub fn act(&mut self, word: &[String]) -> Result<()> {
        word.iter().try_for_each(|i| self.apply(i))
    }
}

impl fmt::Display for Tape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ones: Vec<String> = self.ones.iter().map(i64::to_string).collect();
        write!(f, "ones {{{}}} head {}", ones.join(", "), self.head)
    }
}

fn check_machine(inst: &Instance) -> Result<()> {
    expect_kind(inst, "tur")?;
    let MonadTag::Tur { inputs, monoid } = inst.tag() else { unreachable!() };
    if inputs.iter().map(String::as_str).ne(["0", "1"]) {
        return Err(DynamicsError::Unsupported("Turing machines read the inputs {0,1}".into()));
    }
    let Monoid::Free(gens) = monoid else {
        return Err(DynamicsError::Unsupported(format!("instructions must form a free monoid, not {monoid}")));
    };
    match gens.iter().find(|g| !INSTRUCTIONS.contains(&g.as_str())) {
        Some(g) => Err(DynamicsError::BadInstruction(g.clone())),
        None => Ok(()),
    }
}

/// Read, act, move to the next state; each transition is one step.
pub fn run_turing(inst: &Instance, start: &str, tape: Tape, max_steps: usize) -> Result<RunOutcome> {
    check_machine(inst)?;
    let (obj, arrow) = loop_of(inst)?;
    if !inst.has_row(&obj, start) {
        return Err(DynamicsError::UnknownRow(start.into()));
    }
    let mut tape = tape;
    let mut state = start.to_string();
    for steps in 1..=max_steps {
        let TValue::Tur(table) = step(inst, &arrow, &state)? else { unreachable!() };
        let (MonoidElem::Word(word), next) = &table[tape.read()] else { unreachable!() };
        tape.act(word)?;
        match next {
            Step::Halt => return Ok(RunOutcome::Halted { tape, steps }),
            Step::Next(x) => state = x.clone(),
        }
    }
    Ok(RunOutcome::Timeout { steps: max_steps })
}

/// The evaluation of a machine value on a tape: read the head, act with
/// the word found there, and report the tape with the next step.
pub fn tape_eval(tv: &TValue, tape: &Tape) -> Result<(Tape, Step)> {
    let TValue::Tur(table) = tv else {
        return Err(DynamicsError::WrongMonad { expected: "tur".into(), found: tv.variant_name().into() });
    };
    let symbol = tape.read();
    let (m, next) = table.get(symbol).ok_or_else(|| DynamicsError::BadLetter(symbol.into()))?;
    let MonoidElem::Word(word) = m else {
        return Err(DynamicsError::Unsupported("tape evaluation needs instruction words".into()));
    };
    let mut out = tape.clone();
    out.act(word)?;
    Ok((out, next.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TapeEvalReport {
    pub unit_cases: usize,
    pub unit_counterexample: Option<String>,
    pub mult_cases: usize,
    pub mult_witness: Option<String>,
    pub degenerate_cases: usize,
    pub degenerate_counterexample: Option<String>,
}

impl TapeEvalReport {
    /// Unit preserved, multiplication broken, identity-action machines fine.
    pub fn confirmed(&self) -> bool {
        self.unit_counterexample.is_none() && self.mult_witness.is_some() && self.degenerate_counterexample.is_none()
    }
}

impl fmt::Display for TapeEvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.unit_counterexample {
            None => writeln!(f, "unit preserved on {} cases", self.unit_cases)?,
            Some(c) => writeln!(f, "unit NOT preserved: {c}")?,
        }
        match &self.mult_witness {
            Some(w) => writeln!(f, "multiplication broken after {} cases: {w}", self.mult_cases)?,
            None => writeln!(f, "no multiplication counterexample in {} cases", self.mult_cases)?,
        }
        match &self.degenerate_counterexample {
            None => writeln!(f, "identity-action machines commute on {} cases", self.degenerate_cases),
            Some(c) => writeln!(f, "identity-action machine fails: {c}"),
        }
    }
}

fn sample_tape(rng: &mut impl Rng) -> Tape {
    let head = rng.gen_range(-2..=2);
    Tape::new((-2..=2).filter(|_| rng.gen_bool(0.5)), head)
}

fn show_step(s: &Step) -> String {
    match s {
        Step::Next(x) => x.clone(),
        Step::Halt => "!Halt".into(),
    }
}

/// The multiplication square for a nested machine value at one tape:
/// evaluating the flattened value versus evaluating the outer layer and
/// then the chosen inner value on the updated tape.
fn mult_square(tag: &MonadTag, s: &mut Sampler, ids: &[String]) -> Result<Option<String>> {
    let nested = s.nested(tag, ids);
    let tape = sample_tape(s.rng());
    let flat = tag.flatten(&nested)?;
    let left = tape_eval(&flat, &tape)?;
    let right = match tape_eval(&nested.outer, &tape)? {
        (t, Step::Halt) => (t, Step::Halt),
        (t, Step::Next(k)) => tape_eval(&nested.inner[&k], &t)?,
    };
    Ok((left != right).then(|| {
        let inner: Vec<String> = nested.inner.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        format!(
            "outer {} with {} on tape {tape}: flattened gives ({}, {}) but stepwise gives ({}, {})",
            nested.outer,
            inner.join(", "),
            left.0,
            show_step(&left.1),
            right.0,
            show_step(&right.1)
        )
    }))
}

/// Seeded search showing that tape evaluation preserves the unit but not
/// the multiplication.
pub fn check_tape_eval_not_monad_morphism(cases: usize, seed: u64) -> Result<TapeEvalReport> {
    let gens = |g: &[&str]| g.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    let inputs = gens(&["0", "1"]);
    let tag = MonadTag::Tur { inputs: inputs.clone(), monoid: Monoid::Free(gens(&INSTRUCTIONS)) };
    let still = MonadTag::Tur { inputs, monoid: Monoid::Free(BTreeSet::new()) };
    let mut s = Sampler::new(seed, MAX_UNIVERSE, MAX_SIZE);
    let ids = s.ids();

    let mut unit_counterexample = None;
    let mut unit_cases = 0;
    while unit_cases < cases && unit_counterexample.is_none() {
        unit_cases += 1;
        let x = ids[s.rng().gen_range(0..ids.len())].clone();
        let tape = sample_tape(s.rng());
        let got = tape_eval(&tag.unit(&x), &tape)?;
        if got != (tape.clone(), Step::Next(x.clone())) {
            unit_counterexample = Some(format!("unit({x}) on tape {tape} gives ({}, {})", got.0, show_step(&got.1)));
        }
    }

    let mut mult_witness = None;
    let mut mult_cases = 0;
    while mult_cases < cases && mult_witness.is_none() {
        mult_cases += 1;
        mult_witness = mult_square(&tag, &mut s, &ids)?;
    }

    let mut degenerate_counterexample = None;
    let mut degenerate_cases = 0;
    while degenerate_cases < cases && degenerate_counterexample.is_none() {
        degenerate_cases += 1;
        degenerate_counterexample = mult_square(&still, &mut s, &ids)?;
    }

    Ok(TapeEvalReport { unit_cases, unit_counterexample, mult_cases, mult_witness, degenerate_cases, degenerate_counterexample })
}

/// A Turing machine on the loop schema from `(id, cell)` rows.
#[cfg(test)]
pub(crate) fn machine(rows: &[(&str, &str)]) -> Instance {
    let tag = "tur inputs{0,1} gens{L,R,W0,W1}";
    let body: String = rows.iter().map(|(id, v)| format!("{id} | {v}\n")).collect();
    crate::fixtures::instance(
        "schema Loop\nobject s\narrow f : s -> s\n",
        &format!("instance m over Loop\nmonad {tag}\n\ntable s\nid | f\n{body}"),
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use std::collections::BTreeMap;

    #[test]
    fn tape_actions() {
        let mut t = Tape::blank();
        t.act(&["W1".into(), "R".into(), "W1".into(), "L".into(), "W0".into()]).unwrap();
        assert_eq!(t, Tape::new([1], 0));
        assert!(t.apply("X").is_err());
        assert_eq!(Tape::from_bits("0110", 2).unwrap(), Tape::new([1, 2], 2));
        assert_eq!(Tape::new([-1, 0], -1).to_string(), "ones {-1, 0} head -1");
    }

    #[test]
    fn sample_machine_on_blank_tape() {
        let inst = fixtures::load("turing");
        let out = run_turing(&inst, "Start", Tape::blank(), 100).unwrap();
        assert_eq!(out, RunOutcome::Halted { tape: Tape::new([-1, 0], -1), steps: 5 });
    }

    #[test]
    fn trivial_machines() {
        let halt = machine(&[("Start", "0: () !Halt; 1: () !Halt")]);
        let tape = Tape::new([3], 1);
        assert_eq!(run_turing(&halt, "Start", tape.clone(), 10).unwrap(), RunOutcome::Halted { tape, steps: 1 });
        let cycle = machine(&[("a", "0: () b; 1: () b"), ("b", "0: () a; 1: () a")]);
        assert_eq!(run_turing(&cycle, "a", Tape::blank(), 7).unwrap(), RunOutcome::Timeout { steps: 7 });
    }

    #[test]
    fn tape_eval_witness() {
        let report = check_tape_eval_not_monad_morphism(500, 5).unwrap();
        assert!(report.confirmed(), "{report}");
    }

    #[test]
    fn explicit_multiplication_counterexample() {
        // outer writes a 1 and defers to k; k reads the 1 only when threaded
        let tag: MonadTag = "tur inputs{0,1} gens{L,R,W0,W1}".parse().unwrap();
        let outer = tag.parse_value("0: (W1) k; 1: () k").unwrap();
        let k = tag.parse_value("0: (L) x; 1: (R) y").unwrap();
        let nested = crate::monad::NestedTValue::new(outer.clone(), BTreeMap::from([("k".to_string(), k.clone())]));
        let flat = tag.flatten(&nested).unwrap();
        let (t_flat, s_flat) = tape_eval(&flat, &Tape::blank()).unwrap();
        assert_eq!((t_flat, s_flat), (Tape::new([0], -1), Step::Next("x".into())));
        let (t1, _) = tape_eval(&outer, &Tape::blank()).unwrap();
        assert_eq!(tape_eval(&k, &t1).unwrap(), (Tape::new([0], 1), Step::Next("y".into())));
    }
}
