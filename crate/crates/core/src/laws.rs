//! Seeded random checking of the monad laws.
//!
//! Values are drawn over a small universe of ids (`x0`, `x1`, ...), with
//! bounded container sizes, so every law can be evaluated exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::monad::{
    Entry, FiniteMonoid, Id, KleisliMap, MonadError, MonadTag, Monoid, MonoidElem, NestedTValue, Step, TValue,
};
use crate::rational::ratio;

pub const MAX_UNIVERSE: usize = 6;
pub const MAX_SIZE: usize = 5;

/// Random generator of values, nestings and maps for a given monad.
pub struct Sampler {
    rng: ChaCha8Rng,
    universe: usize,
    size: usize,
}

fn names(prefix: &str, n: usize) -> Vec<Id> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

impl Sampler {
    /// `universe` ids and containers of at most `size` entries, both capped
    /// at [`MAX_UNIVERSE`] and [`MAX_SIZE`].
    pub fn new(seed: u64, universe: usize, size: usize) -> Sampler {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            universe: universe.clamp(1, MAX_UNIVERSE),
            size: size.min(MAX_SIZE),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn ids(&self) -> Vec<Id> {
        names("x", self.universe)
    }

    pub fn keys(&self, prefix: &str) -> Vec<Id> {
        names(prefix, self.universe)
    }

    fn pick(&mut self, over: &[Id]) -> Id {
        over.choose(&mut self.rng).expect("nonempty universe").clone()
    }

    fn len(&mut self, min: usize, cap: usize) -> usize {
        self.rng.gen_range(min..=cap.max(min))
    }

    pub fn elem(&mut self, monoid: &Monoid) -> MonoidElem {
        match monoid {
            Monoid::Free(gens) => {
                let gens: Vec<&String> = gens.iter().collect();
                let n = if gens.is_empty() { 0 } else { self.len(0, 2) };
                MonoidElem::Word((0..n).map(|_| (*gens.choose(&mut self.rng).unwrap()).clone()).collect())
            }
            Monoid::Table(t) => MonoidElem::Named(t.elements().choose(&mut self.rng).unwrap().clone()),
            Monoid::RationalMul => {
                let q = self.rng.gen_range(1..=4);
                MonoidElem::Number(ratio(self.rng.gen_range(0..=q), q))
            }
            Monoid::RationalAdd => MonoidElem::Number(ratio(self.rng.gen_range(0..=6), self.rng.gen_range(1..=3))),
        }
    }

    fn entry(&mut self, labels: &BTreeSet<String>, over: &[Id]) -> Entry {
        if !labels.is_empty() && self.rng.gen_bool(0.25) {
            Entry::Label(labels.iter().collect::<Vec<_>>().choose(&mut self.rng).unwrap().to_string())
        } else {
            Entry::Id(self.pick(over))
        }
    }

    /// A canonical value of `tag` whose ids are drawn from `over`.
    pub fn value(&mut self, tag: &MonadTag, over: &[Id]) -> TValue {
        let size = self.size;
        match tag {
            MonadTag::Atomic => TValue::Atomic(self.pick(over)),
            MonadTag::Unlinked => TValue::Unlinked,
            MonadTag::PowerSet | MonadTag::PowerSetNonempty => {
                let min = usize::from(matches!(tag, MonadTag::PowerSetNonempty));
                let n = self.len(min, size);
                TValue::Set((0..n.max(min)).map(|_| self.pick(over)).collect())
            }
            MonadTag::List | MonadTag::ListNonempty => {
                let min = usize::from(matches!(tag, MonadTag::ListNonempty));
                let n = self.len(min, size);
                TValue::List((0..n).map(|_| self.pick(over)).collect())
            }
            MonadTag::Multiset => {
                let n = self.len(0, size);
                let mut bag = BTreeMap::new();
                for _ in 0..n {
                    *bag.entry(self.pick(over)).or_insert(0) += 1;
                }
                TValue::Bag(bag)
            }
            MonadTag::Dist => {
                let n = self.len(1, size.min(over.len()));
                let support: Vec<Id> = over.choose_multiple(&mut self.rng, n).cloned().collect();
                let weights: Vec<i64> = support.iter().map(|_| self.rng.gen_range(1..=4)).collect();
                let total: i64 = weights.iter().sum();
                TValue::Dist(support.into_iter().zip(weights).map(|(x, w)| (x, ratio(w, total))).collect())
            }
            MonadTag::Exc(labels) => TValue::Exc(self.entry(labels, over)),
            MonadTag::ListExc(labels) => {
                let n = self.len(0, size);
                TValue::ListExc((0..n).map(|_| self.entry(labels, over)).collect())
            }
            MonadTag::Inp(inputs) => TValue::Inp(inputs.iter().map(|u| (u.clone(), self.pick(over))).collect()),
            MonadTag::Annot(monoid) => {
                let m = self.elem(monoid);
                TValue::Annot(m, self.pick(over))
            }
            MonadTag::Tur { inputs, monoid } => TValue::Tur(
                inputs
                    .iter()
                    .map(|u| {
                        let m = self.elem(monoid);
                        let step = if self.rng.gen_bool(0.25) { Step::Halt } else { Step::Next(self.pick(over)) };
                        (u.clone(), (m, step))
                    })
                    .collect(),
            ),
            MonadTag::Vect => {
                let n = self.len(0, size.min(over.len()));
                let support: Vec<Id> = over.choose_multiple(&mut self.rng, n).cloned().collect();
                TValue::Vect(
                    support
                        .into_iter()
                        .map(|x| {
                            let mut p = self.rng.gen_range(1..=3);
                            if self.rng.gen_bool(0.5) {
                                p = -p;
                            }
                            (x, ratio(p, self.rng.gen_range(1..=2)))
                        })
                        .collect(),
                )
            }
            MonadTag::PolyCommutative | MonadTag::PolyNoncommutative => {
                // kept small: substitution multiplies term counts
                let terms = self.len(0, size.min(2));
                let mut p = BTreeMap::new();
                for _ in 0..terms {
                    let len = self.len(0, 2);
                    let mono: Vec<Id> = (0..len).map(|_| self.pick(over)).collect();
                    *p.entry(mono).or_insert(0) += self.rng.gen_range(1..=3u64);
                }
                tag.canonicalize(TValue::Poly(p))
            }
        }
    }

    /// An element of `T(T(X))`: an outer value over fresh keys, each key
    /// resolving to a value over `over`.
    pub fn nested(&mut self, tag: &MonadTag, over: &[Id]) -> NestedTValue {
        let keys = self.keys("k");
        let outer = self.value(tag, &keys);
        let inner = keys.iter().map(|k| (k.clone(), self.value(tag, over))).collect();
        NestedTValue::new(outer, inner)
    }

    pub fn function(&mut self, dom: &[Id], cod: &[Id]) -> BTreeMap<Id, Id> {
        dom.iter().map(|x| (x.clone(), self.pick(cod))).collect()
    }

    pub fn kleisli(&mut self, tag: &MonadTag, dom: &[Id], cod: &[Id]) -> KleisliMap {
        dom.iter().map(|x| (x.clone(), self.value(tag, cod))).collect()
    }
}

/// The outcome of one law over all sampled cases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawResult {
    pub law: &'static str,
    pub checked: usize,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawReport {
    pub subject: String,
    pub results: Vec<LawResult>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.counterexample.is_none())
    }

    pub fn result(&self, law: &str) -> Option<&LawResult> {
        self.results.iter().find(|r| r.law == law)
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.subject)?;
        for r in &self.results {
            match &r.counterexample {
                None => writeln!(f, "  ok    {} ({} cases)", r.law, r.checked)?,
                Some(c) => writeln!(f, "  FAIL  {} after {} cases: {c}", r.law, r.checked)?,
            }
        }
        Ok(())
    }
}

/// Runs `case` up to `cases` times and keeps the first counterexample.
pub(crate) fn run_law<F>(law: &'static str, cases: usize, mut case: F) -> LawResult
where
    F: FnMut() -> Result<Option<String>, MonadError>,
{
    for i in 0..cases {
        let outcome = match case() {
            Ok(None) => continue,
            Ok(Some(c)) => c,
            Err(e) => format!("error: {e}"),
        };
        return LawResult { law, checked: i + 1, counterexample: Some(outcome) };
    }
    LawResult { law, checked: cases, counterexample: None }
}

pub(crate) fn differ(a: &TValue, b: &TValue, context: impl FnOnce() -> String) -> Option<String> {
    (a != b).then(|| format!("{} gives {a} but {b}", context()))
}

pub(crate) fn show_nested(n: &NestedTValue) -> String {
    let inner: Vec<String> = n.inner.iter().map(|(k, v)| format!("{k} = {v}")).collect();
    format!("outer {} with {}", n.outer, inner.join(", "))
}

fn show_map<V: fmt::Display>(m: &BTreeMap<Id, V>) -> String {
    m.iter().map(|(k, v)| format!("{k} -> {v}")).collect::<Vec<_>>().join(", ")
}

/// One parameterization of every monad the crate supports.
pub fn representative_tags() -> Vec<MonadTag> {
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let z3 = FiniteMonoid::new(s(&["e", "a", "b"]), "e", vec![s(&["e", "a", "b"]), s(&["a", "b", "e"]), s(&["b", "e", "a"])])
        .expect("cyclic group of order 3");
    vec![
        MonadTag::Atomic,
        MonadTag::Unlinked,
        MonadTag::PowerSet,
        MonadTag::PowerSetNonempty,
        MonadTag::List,
        MonadTag::ListNonempty,
        MonadTag::Multiset,
        MonadTag::Dist,
        MonadTag::Exc(set(&["err", "null"])),
        MonadTag::Exc(BTreeSet::new()),
        MonadTag::ListExc(set(&["Int", "String"])),
        MonadTag::Inp(set(&["0", "1"])),
        MonadTag::Inp(BTreeSet::new()),
        MonadTag::Annot(Monoid::Free(set(&["a", "b"]))),
        MonadTag::Annot(Monoid::Table(z3)),
        MonadTag::Annot(Monoid::RationalMul),
        MonadTag::Annot(Monoid::RationalAdd),
        MonadTag::Tur { inputs: set(&["0", "1"]), monoid: Monoid::Free(set(&["L", "R", "W0", "W1"])) },
        MonadTag::Vect,
        MonadTag::PolyCommutative,
        MonadTag::PolyNoncommutative,
    ]
}

/// Unit, associativity and functor laws, Kleisli associativity, naturality
/// of unit and flatten, agreement of the fused extension with
/// flatten-after-map, and text round-tripping.
pub fn check_monad_laws(tag: &MonadTag, cases: usize, seed: u64) -> LawReport {
    let mut s = Sampler::new(seed, MAX_UNIVERSE, MAX_SIZE);
    let ids = s.ids();
    let mut results = Vec::new();

    results.push(run_law("left unit", cases, || {
        let tv = s.value(tag, &ids);
        let nested = NestedTValue::new(tag.unit("k"), BTreeMap::from([("k".to_string(), tv.clone())]));
        Ok(differ(&tag.flatten(&nested)?, &tv, || format!("flatten(unit({tv}))")))
    }));

    results.push(run_law("right unit", cases, || {
        let tv = s.value(tag, &ids);
        let nested = NestedTValue::lift(&tv, |x| Some(tag.unit(x)))?;
        Ok(differ(&tag.flatten(&nested)?, &tv, || format!("flatten(map unit ({tv}))")))
    }));

    results.push(run_law("associativity", cases, || {
        let ls = s.keys("l");
        let ks = s.keys("k");
        let outer = s.value(tag, &ls);
        let mid: BTreeMap<Id, TValue> = ls.iter().map(|l| (l.clone(), s.value(tag, &ks))).collect();
        let inner: BTreeMap<Id, TValue> = ks.iter().map(|k| (k.clone(), s.value(tag, &ids))).collect();
        // flatten . map flatten
        let flat_mid = mid
            .iter()
            .map(|(l, m)| Ok((l.clone(), tag.flatten(&NestedTValue::new(m.clone(), inner.clone()))?)))
            .collect::<Result<BTreeMap<_, _>, MonadError>>()?;
        let a = tag.flatten(&NestedTValue::new(outer.clone(), flat_mid))?;
        // flatten . flatten
        let outer_flat = tag.flatten(&NestedTValue::new(outer.clone(), mid.clone()))?;
        let b = tag.flatten(&NestedTValue::new(outer_flat, inner.clone()))?;
        Ok(differ(&a, &b, || {
            format!("outer {outer}, mid [{}], inner [{}]", show_map(&mid), show_map(&inner))
        }))
    }));

    results.push(run_law("functor identity", cases, || {
        let tv = s.value(tag, &ids);
        Ok(differ(&tag.map(&tv, |x| Some(x.to_string()))?, &tv, || format!("map id ({tv})")))
    }));

    results.push(run_law("functor composition", cases, || {
        let tv = s.value(tag, &ids);
        let f = s.function(&ids, &ids);
        let g = s.function(&ids, &ids);
        let stepwise = tag.map(&tag.map(&tv, |x| f.get(x).cloned())?, |y| g.get(y).cloned())?;
        let fused = tag.map(&tv, |x| f.get(x).and_then(|y| g.get(y)).cloned())?;
        Ok(differ(&stepwise, &fused, || format!("f = [{}], g = [{}] on {tv}", show_map(&f), show_map(&g))))
    }));

    results.push(run_law("unit naturality", cases, || {
        let f = s.function(&ids, &ids);
        let x = s.pick(&ids);
        let a = tag.map(&tag.unit(&x), |y| f.get(y).cloned())?;
        Ok(differ(&a, &tag.unit(&f[&x]), || format!("map f (unit {x}) with f = [{}]", show_map(&f))))
    }));

    results.push(run_law("flatten naturality", cases, || {
        let nested = s.nested(tag, &ids);
        let f = s.function(&ids, &ids);
        let a = tag.map(&tag.flatten(&nested)?, |y| f.get(y).cloned())?;
        let mapped_inner = nested
            .inner
            .iter()
            .map(|(k, v)| Ok((k.clone(), tag.map(v, |y| f.get(y).cloned())?)))
            .collect::<Result<BTreeMap<_, _>, MonadError>>()?;
        let b = tag.flatten(&NestedTValue::new(nested.outer.clone(), mapped_inner))?;
        Ok(differ(&a, &b, || format!("{} with f = [{}]", show_nested(&nested), show_map(&f))))
    }));

    results.push(run_law("extend is flatten after map", cases, || {
        let tv = s.value(tag, &ids);
        let g = s.kleisli(tag, &ids, &ids);
        let fused = tag.extend(&tv, |x| g.get(x).cloned())?;
        let two_step = tag.flatten(&NestedTValue::lift(&tv, |x| g.get(x).cloned())?)?;
        Ok(differ(&fused, &two_step, || format!("extend over {tv} with g = [{}]", show_map(&g))))
    }));

    results.push(run_law("kleisli associativity", cases, || {
        let f = s.kleisli(tag, &ids, &ids);
        let g = s.kleisli(tag, &ids, &ids);
        let h = s.kleisli(tag, &ids, &ids);
        let left = tag.compose(&tag.compose(&f, &g)?, &h)?;
        let right = tag.compose(&f, &tag.compose(&g, &h)?)?;
        Ok(ids.iter().find_map(|x| {
            differ(&left[x], &right[x], || {
                format!("at {x} with f = [{}], g = [{}], h = [{}]", show_map(&f), show_map(&g), show_map(&h))
            })
        }))
    }));

    results.push(run_law("kleisli unit", cases, || {
        let f = s.kleisli(tag, &ids, &ids);
        let eta = tag.identity_map(&ids);
        let a = tag.compose(&eta, &f)?;
        let b = tag.compose(&f, &eta)?;
        Ok(ids
            .iter()
            .find_map(|x| differ(&a[x], &f[x], || format!("f . unit at {x}")).or_else(|| differ(&b[x], &f[x], || format!("unit . f at {x}")))))
    }));

    results.push(run_law("render round trip", cases, || {
        let tv = s.value(tag, &ids);
        let text = tag.render(&tv)?;
        let back = tag.parse_value(&text)?;
        Ok(differ(&back, &tv, || format!("parse(\"{text}\")")))
    }));

    LawReport { subject: format!("monad {tag}"), results }
}
