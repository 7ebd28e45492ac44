//! Generalized cell values.
//!
//! A [`MonadTag`] names one of the supported monads on sets; a [`TValue`] is
//! an element of `T(X)` where `X` is a set of row ids. Every operation that
//! interprets a value (unit, functorial map, flatten, Kleisli extension,
//! equality, parsing) is a method on the tag, since the same payload shape
//! (say a set of ids) can belong to more than one monad.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::rational::Rational;

mod monoid;
mod ops;
mod syntax;

pub use monoid::{FiniteMonoid, Monoid, MonoidElem};
pub use ops::KleisliMap;

pub type Id = String;

/// A bag or monomial word; monomials of commutative polynomials are kept sorted.
pub type Monomial = Vec<Id>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MonadTag {
    Atomic,
    Unlinked,
    PowerSet,
    PowerSetNonempty,
    List,
    ListNonempty,
    Multiset,
    Dist,
    /// `X + E` for a finite label set `E`.
    Exc(BTreeSet<String>),
    /// `List(X + E)`: lists whose entries are ids or datatype labels.
    ListExc(BTreeSet<String>),
    /// `X^U`, with the diagonal as multiplication.
    Inp(BTreeSet<String>),
    /// `M x X` for a monoid `M`.
    Annot(Monoid),
    /// `(M x (X + {Halt}))^U`.
    Tur { inputs: BTreeSet<String>, monoid: Monoid },
    /// Free rational vector space.
    Vect,
    /// Free commutative rig, `N[X]`.
    PolyCommutative,
    /// Free rig, `N<X>`.
    PolyNoncommutative,
}

/// An entry of an exception value: an id, or an exception label.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entry {
    Id(Id),
    Label(String),
}

/// Next state of a Turing transition.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Next(Id),
    Halt,
}

/// Payload of a generalized value, always kept in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TValue {
    Atomic(Id),
    Unlinked,
    Set(BTreeSet<Id>),
    List(Vec<Id>),
    /// id -> multiplicity (always >= 1)
    Bag(BTreeMap<Id, u64>),
    /// id -> positive weight, summing to 1
    Dist(BTreeMap<Id, Rational>),
    Exc(Entry),
    ListExc(Vec<Entry>),
    /// input -> id, total on the tag's input set
    Inp(BTreeMap<String, Id>),
    Annot(MonoidElem, Id),
    /// input -> (instruction, next state), total on the tag's input set
    Tur(BTreeMap<String, (MonoidElem, Step)>),
    /// id -> nonzero coefficient
    Vect(BTreeMap<Id, Rational>),
    /// monomial -> positive coefficient
    Poly(BTreeMap<Monomial, u64>),
}

/// An element of `T(T(X))`.
///
/// The outer value ranges over opaque keys; `inner` resolves every key to a
/// value of the same monad over the ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedTValue {
    pub outer: TValue,
    pub inner: BTreeMap<Id, TValue>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MonadError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("malformed value: {0}")]
    Malformed(String),
    #[error("tag mismatch: expected `{expected}`, found `{found}`")]
    TagMismatch { expected: String, found: String },
    #[error("no image given for `{0}`")]
    Undefined(Id),
    #[error("distribution weights sum to {0}, not 1")]
    NotNormalized(String),
    #[error("map is not total: no entry for input `{0}`")]
    NotTotal(String),
    #[error("empty value is not allowed in `{0}`")]
    Empty(String),
    #[error("invalid monoid: {0}")]
    InvalidMonoid(String),
}

impl NestedTValue {
    pub fn new(outer: TValue, inner: BTreeMap<Id, TValue>) -> Self {
        NestedTValue { outer, inner }
    }

    /// Materializes `T(g)(tv)`: the outer layer is `tv` itself, with each
    /// occurring id standing for `g(id)`.
    pub fn lift<F>(tv: &TValue, mut g: F) -> Result<Self, MonadError>
    where
        F: FnMut(&str) -> Option<TValue>,
    {
        let mut inner = BTreeMap::new();
        for id in tv.ids() {
            if !inner.contains_key(id) {
                let image = g(id).ok_or_else(|| MonadError::Undefined(id.clone()))?;
                inner.insert(id.clone(), image);
            }
        }
        Ok(NestedTValue { outer: tv.clone(), inner })
    }
}

impl TValue {
    /// Every id occurring in the value, with repetition, in payload order.
    pub fn ids(&self) -> Box<dyn Iterator<Item = &Id> + '_> {
        match self {
            TValue::Atomic(x) | TValue::Annot(_, x) => Box::new(std::iter::once(x)),
            TValue::Unlinked => Box::new(std::iter::empty()),
            TValue::Set(s) => Box::new(s.iter()),
            TValue::List(l) => Box::new(l.iter()),
            TValue::Bag(b) => Box::new(b.keys()),
            TValue::Dist(d) | TValue::Vect(d) => Box::new(d.keys()),
            TValue::Exc(e) => Box::new(entry_id(e).into_iter()),
            TValue::ListExc(l) => Box::new(l.iter().filter_map(entry_id)),
            TValue::Inp(m) => Box::new(m.values()),
            TValue::Tur(m) => Box::new(m.values().filter_map(|(_, s)| match s {
                Step::Next(x) => Some(x),
                Step::Halt => None,
            })),
            TValue::Poly(p) => Box::new(p.keys().flatten()),
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            TValue::Atomic(_) => "atomic",
            TValue::Unlinked => "unlinked",
            TValue::Set(_) => "set",
            TValue::List(_) => "list",
            TValue::Bag(_) => "multiset",
            TValue::Dist(_) => "dist",
            TValue::Exc(_) => "exc",
            TValue::ListExc(_) => "listexc",
            TValue::Inp(_) => "inp",
            TValue::Annot(..) => "annot",
            TValue::Tur(_) => "tur",
            TValue::Vect(_) => "vect",
            TValue::Poly(_) => "poly",
        }
    }
}

fn entry_id(e: &Entry) -> Option<&Id> {
    match e {
        Entry::Id(x) => Some(x),
        Entry::Label(_) => None,
    }
}

impl MonadTag {
    /// Short lowercase name without parameters.
    pub fn kind(&self) -> &'static str {
        match self {
            MonadTag::Atomic => "atomic",
            MonadTag::Unlinked => "unlinked",
            MonadTag::PowerSet => "powerset",
            MonadTag::PowerSetNonempty => "powerset+",
            MonadTag::List => "list",
            MonadTag::ListNonempty => "list+",
            MonadTag::Multiset => "multiset",
            MonadTag::Dist => "dist",
            MonadTag::Exc(_) => "exc",
            MonadTag::ListExc(_) => "listexc",
            MonadTag::Inp(_) => "inp",
            MonadTag::Annot(_) => "annot",
            MonadTag::Tur { .. } => "tur",
            MonadTag::Vect => "vect",
            MonadTag::PolyCommutative => "poly",
            MonadTag::PolyNoncommutative => "poly-nc",
        }
    }

    /// The Maybe monad, `Exc({null})`.
    pub fn maybe() -> MonadTag {
        MonadTag::Exc(BTreeSet::from(["null".to_string()]))
    }

    /// Whether `T(X)` has at least two elements for some `X`, i.e. whether
    /// the embedding of atomic instances is faithful.
    pub fn separates_points(&self) -> bool {
        match self {
            MonadTag::Unlinked => false,
            MonadTag::Inp(inputs) => !inputs.is_empty(),
            MonadTag::Tur { inputs, .. } => !inputs.is_empty(),
            _ => true,
        }
    }
}

impl fmt::Display for TValue {
    /// Debug-ish rendering that does not need the tag; prefer
    /// [`MonadTag::render`] for canonical text.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", syntax::render_untagged(self))
    }
}
