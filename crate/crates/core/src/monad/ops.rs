use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed, Zero};

use super::{Entry, Id, MonadError, MonadTag, Monoid, MonoidElem, Monomial, NestedTValue, Step, TValue};
use crate::ident::is_ident;
use crate::rational::Rational;

/// A finite Kleisli arrow `X -> T(Y)`, listed pointwise.
pub type KleisliMap = BTreeMap<Id, TValue>;

type Result<T> = std::result::Result<T, MonadError>;

impl MonadTag {
    /// `eta_X(id)`.
    pub fn unit(&self, id: &str) -> TValue {
        let id = id.to_string();
        match self {
            MonadTag::Atomic => TValue::Atomic(id),
            MonadTag::Unlinked => TValue::Unlinked,
            MonadTag::PowerSet | MonadTag::PowerSetNonempty => TValue::Set(BTreeSet::from([id])),
            MonadTag::List | MonadTag::ListNonempty => TValue::List(vec![id]),
            MonadTag::Multiset => TValue::Bag(BTreeMap::from([(id, 1)])),
            MonadTag::Dist => TValue::Dist(BTreeMap::from([(id, Rational::one())])),
            MonadTag::Exc(_) => TValue::Exc(Entry::Id(id)),
            MonadTag::ListExc(_) => TValue::ListExc(vec![Entry::Id(id)]),
            MonadTag::Inp(inputs) => {
                TValue::Inp(inputs.iter().map(|u| (u.clone(), id.clone())).collect())
            }
            MonadTag::Annot(m) => TValue::Annot(m.identity(), id),
            MonadTag::Tur { inputs, monoid } => TValue::Tur(
                inputs
                    .iter()
                    .map(|u| (u.clone(), (monoid.identity(), Step::Next(id.clone()))))
                    .collect(),
            ),
            MonadTag::Vect => TValue::Vect(BTreeMap::from([(id, Rational::one())])),
            MonadTag::PolyCommutative | MonadTag::PolyNoncommutative => {
                TValue::Poly(BTreeMap::from([(vec![id], 1)]))
            }
        }
    }

    /// Functorial image `T(f)(tv)`, in canonical form.
    pub fn map<F>(&self, tv: &TValue, mut f: F) -> Result<TValue>
    where
        F: FnMut(&str) -> Option<Id>,
    {
        self.expect_shape(tv)?;
        let mut f = |x: &Id| f(x).ok_or_else(|| MonadError::Undefined(x.clone()));
        let mapped = match tv {
            TValue::Atomic(x) => TValue::Atomic(f(x)?),
            TValue::Unlinked => TValue::Unlinked,
            TValue::Set(s) => TValue::Set(s.iter().map(&mut f).collect::<Result<_>>()?),
            TValue::List(l) => TValue::List(l.iter().map(&mut f).collect::<Result<_>>()?),
            TValue::Bag(b) => {
                let mut out = BTreeMap::new();
                for (x, n) in b {
                    *out.entry(f(x)?).or_insert(0) += n;
                }
                TValue::Bag(out)
            }
            TValue::Dist(d) | TValue::Vect(d) => {
                let mut out: BTreeMap<Id, Rational> = BTreeMap::new();
                for (x, w) in d {
                    *out.entry(f(x)?).or_insert_with(Rational::zero) += w;
                }
                out.retain(|_, w| !w.is_zero());
                if matches!(tv, TValue::Dist(_)) {
                    TValue::Dist(out)
                } else {
                    TValue::Vect(out)
                }
            }
            TValue::Exc(e) => TValue::Exc(map_entry(e, &mut f)?),
            TValue::ListExc(l) => {
                TValue::ListExc(l.iter().map(|e| map_entry(e, &mut f)).collect::<Result<_>>()?)
            }
            TValue::Inp(m) => {
                TValue::Inp(m.iter().map(|(u, x)| Ok((u.clone(), f(x)?))).collect::<Result<_>>()?)
            }
            TValue::Annot(m, x) => TValue::Annot(m.clone(), f(x)?),
            TValue::Tur(m) => TValue::Tur(
                m.iter()
                    .map(|(u, (w, s))| {
                        let s = match s {
                            Step::Next(x) => Step::Next(f(x)?),
                            Step::Halt => Step::Halt,
                        };
                        Ok((u.clone(), (w.clone(), s)))
                    })
                    .collect::<Result<_>>()?,
            ),
            TValue::Poly(p) => {
                let commutative = matches!(self, MonadTag::PolyCommutative);
                let mut out = BTreeMap::new();
                for (mono, c) in p {
                    let mut image: Monomial = mono.iter().map(&mut f).collect::<Result<_>>()?;
                    if commutative {
                        image.sort();
                    }
                    *out.entry(image).or_insert(0) += c;
                }
                TValue::Poly(out)
            }
        };
        Ok(mapped)
    }

    /// Multiplication `mu_X : T(T(X)) -> T(X)`.
    pub fn flatten(&self, nested: &NestedTValue) -> Result<TValue> {
        self.expect_shape(&nested.outer)?;
        let inner = |k: &Id| -> Result<&TValue> {
            let v = nested
                .inner
                .get(k)
                .ok_or_else(|| MonadError::Malformed(format!("nested key `{k}` has no inner value")))?;
            self.expect_shape(v)?;
            Ok(v)
        };
        let flat = match (self, &nested.outer) {
            (MonadTag::Atomic, TValue::Atomic(k)) => inner(k)?.clone(),
            (MonadTag::Unlinked, TValue::Unlinked) => TValue::Unlinked,
            (_, TValue::Set(keys)) => {
                let mut union = BTreeSet::new();
                for k in keys {
                    if let TValue::Set(s) = inner(k)? {
                        union.extend(s.iter().cloned());
                    }
                }
                TValue::Set(union)
            }
            (_, TValue::List(keys)) => {
                let mut out = Vec::new();
                for k in keys {
                    if let TValue::List(l) = inner(k)? {
                        out.extend(l.iter().cloned());
                    }
                }
                TValue::List(out)
            }
            (_, TValue::Bag(keys)) => {
                let mut out: BTreeMap<Id, u64> = BTreeMap::new();
                for (k, n) in keys {
                    if let TValue::Bag(b) = inner(k)? {
                        for (x, m) in b {
                            *out.entry(x.clone()).or_insert(0) += n * m;
                        }
                    }
                }
                TValue::Bag(out)
            }
            (_, TValue::Dist(weights)) | (_, TValue::Vect(weights)) => {
                // mu(w)(x) = sum over keys p of w(p) * p(x)
                let mut out: BTreeMap<Id, Rational> = BTreeMap::new();
                for (k, w) in weights {
                    if let TValue::Dist(p) | TValue::Vect(p) = inner(k)? {
                        for (x, px) in p {
                            *out.entry(x.clone()).or_insert_with(Rational::zero) += w * px;
                        }
                    }
                }
                out.retain(|_, w| !w.is_zero());
                if matches!(self, MonadTag::Dist) {
                    TValue::Dist(out)
                } else {
                    TValue::Vect(out)
                }
            }
            (_, TValue::Exc(Entry::Label(l))) => TValue::Exc(Entry::Label(l.clone())),
            (_, TValue::Exc(Entry::Id(k))) => inner(k)?.clone(),
            (_, TValue::ListExc(entries)) => {
                let mut out = Vec::new();
                for e in entries {
                    match e {
                        Entry::Label(l) => out.push(Entry::Label(l.clone())),
                        Entry::Id(k) => {
                            if let TValue::ListExc(l) = inner(k)? {
                                out.extend(l.iter().cloned());
                            }
                        }
                    }
                }
                TValue::ListExc(out)
            }
            (_, TValue::Inp(outer)) => {
                // diagonal: read the same input at both layers
                let mut out = BTreeMap::new();
                for (u, k) in outer {
                    let TValue::Inp(m) = inner(k)? else { unreachable!() };
                    let x = m.get(u).ok_or_else(|| MonadError::NotTotal(u.clone()))?;
                    out.insert(u.clone(), x.clone());
                }
                TValue::Inp(out)
            }
            (MonadTag::Annot(monoid), TValue::Annot(m1, k)) => {
                let TValue::Annot(m2, x) = inner(k)? else { unreachable!() };
                TValue::Annot(monoid.multiply(m1, m2)?, x.clone())
            }
            (MonadTag::Tur { monoid, .. }, TValue::Tur(outer)) => {
                let mut out = BTreeMap::new();
                for (u, (m1, step)) in outer {
                    let cell = match step {
                        Step::Halt => (m1.clone(), Step::Halt),
                        Step::Next(k) => {
                            let TValue::Tur(m) = inner(k)? else { unreachable!() };
                            let (m2, next) = m.get(u).ok_or_else(|| MonadError::NotTotal(u.clone()))?;
                            (monoid.multiply(m1, m2)?, next.clone())
                        }
                    };
                    out.insert(u.clone(), cell);
                }
                TValue::Tur(out)
            }
            (_, TValue::Poly(outer)) => {
                let commutative = matches!(self, MonadTag::PolyCommutative);
                let mut out = BTreeMap::new();
                for (mono, c) in outer {
                    let mut product = BTreeMap::from([(Vec::new(), 1u64)]);
                    for k in mono {
                        let TValue::Poly(factor) = inner(k)? else { unreachable!() };
                        product = poly_mul(&product, factor, commutative);
                    }
                    poly_add_scaled(&mut out, &product, *c);
                }
                TValue::Poly(out)
            }
            (tag, v) => return Err(mismatch(tag, v)),
        };
        Ok(flat)
    }

    /// Kleisli extension `mu . T(g)`, evaluated directly without building
    /// the nested value.
    pub fn extend<G>(&self, tv: &TValue, g: G) -> Result<TValue>
    where
        G: FnMut(&str) -> Option<TValue>,
    {
        self.expect_shape(tv)?;
        let mut g = Memo::new(self, g);
        let out = match tv {
            TValue::Atomic(x) => g.get(x)?.clone(),
            TValue::Unlinked => TValue::Unlinked,
            TValue::Set(xs) => {
                let mut acc = BTreeSet::new();
                for x in xs {
                    if let TValue::Set(s) = g.get(x)? {
                        acc.extend(s.iter().cloned());
                    }
                }
                TValue::Set(acc)
            }
            TValue::List(xs) => {
                let mut acc = Vec::new();
                for x in xs {
                    if let TValue::List(l) = g.get(x)? {
                        acc.extend(l.iter().cloned());
                    }
                }
                TValue::List(acc)
            }
            TValue::Bag(b) => {
                let mut acc: BTreeMap<Id, u64> = BTreeMap::new();
                for (x, n) in b {
                    if let TValue::Bag(image) = g.get(x)? {
                        for (y, m) in image {
                            *acc.entry(y.clone()).or_insert(0) += n * m;
                        }
                    }
                }
                TValue::Bag(acc)
            }
            TValue::Dist(d) | TValue::Vect(d) => {
                let mut acc: BTreeMap<Id, Rational> = BTreeMap::new();
                for (x, w) in d {
                    if let TValue::Dist(image) | TValue::Vect(image) = g.get(x)? {
                        for (y, c) in image {
                            *acc.entry(y.clone()).or_insert_with(Rational::zero) += w * c;
                        }
                    }
                }
                acc.retain(|_, c| !c.is_zero());
                if matches!(tv, TValue::Dist(_)) {
                    TValue::Dist(acc)
                } else {
                    TValue::Vect(acc)
                }
            }
            TValue::Exc(Entry::Label(l)) => TValue::Exc(Entry::Label(l.clone())),
            TValue::Exc(Entry::Id(x)) => g.get(x)?.clone(),
            TValue::ListExc(entries) => {
                let mut acc = Vec::new();
                for e in entries {
                    match e {
                        Entry::Label(_) => acc.push(e.clone()),
                        Entry::Id(x) => {
                            if let TValue::ListExc(l) = g.get(x)? {
                                acc.extend(l.iter().cloned());
                            }
                        }
                    }
                }
                TValue::ListExc(acc)
            }
            TValue::Inp(m) => {
                let mut acc = BTreeMap::new();
                for (u, x) in m {
                    let TValue::Inp(image) = g.get(x)? else { unreachable!() };
                    let y = image.get(u).ok_or_else(|| MonadError::NotTotal(u.clone()))?;
                    acc.insert(u.clone(), y.clone());
                }
                TValue::Inp(acc)
            }
            TValue::Annot(m1, x) => {
                let MonadTag::Annot(monoid) = self else { unreachable!() };
                let TValue::Annot(m2, y) = g.get(x)?.clone() else { unreachable!() };
                TValue::Annot(monoid.multiply(m1, &m2)?, y)
            }
            TValue::Tur(m) => {
                let MonadTag::Tur { monoid, .. } = self else { unreachable!() };
                let mut acc = BTreeMap::new();
                for (u, (m1, step)) in m {
                    let cell = match step {
                        Step::Halt => (m1.clone(), Step::Halt),
                        Step::Next(x) => {
                            let TValue::Tur(image) = g.get(x)? else { unreachable!() };
                            let (m2, next) =
                                image.get(u).ok_or_else(|| MonadError::NotTotal(u.clone()))?;
                            (monoid.multiply(m1, m2)?, next.clone())
                        }
                    };
                    acc.insert(u.clone(), cell);
                }
                TValue::Tur(acc)
            }
            TValue::Poly(p) => {
                let commutative = matches!(self, MonadTag::PolyCommutative);
                let mut acc = BTreeMap::new();
                for (mono, c) in p {
                    let mut term = BTreeMap::from([(Vec::new(), *c)]);
                    for x in mono {
                        let TValue::Poly(factor) = g.get(x)? else { unreachable!() };
                        term = poly_mul(&term, factor, commutative);
                    }
                    poly_add_scaled(&mut acc, &term, 1);
                }
                TValue::Poly(acc)
            }
        };
        Ok(out)
    }

    /// Kleisli composite `g . f`: `x |-> extend(g, f(x))` on the domain of `f`.
    pub fn compose(&self, f: &KleisliMap, g: &KleisliMap) -> Result<KleisliMap> {
        f.iter()
            .map(|(x, fx)| Ok((x.clone(), self.extend(fx, |y| g.get(y).cloned())?)))
            .collect()
    }

    /// The identity Kleisli arrow on a set of ids.
    pub fn identity_map<'a>(&self, ids: impl IntoIterator<Item = &'a Id>) -> KleisliMap {
        ids.into_iter().map(|x| (x.clone(), self.unit(x))).collect()
    }

    /// Equality of values; both must belong to this monad.
    pub fn values_eq(&self, a: &TValue, b: &TValue) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(a == b)
    }

    /// Re-establishes canonical form (merges duplicates, drops zero weights,
    /// sorts commutative monomials). Does not validate parameters.
    pub fn canonicalize(&self, tv: TValue) -> TValue {
        match tv {
            TValue::Bag(mut b) => {
                b.retain(|_, n| *n > 0);
                TValue::Bag(b)
            }
            TValue::Dist(mut d) => {
                d.retain(|_, w| !w.is_zero());
                TValue::Dist(d)
            }
            TValue::Vect(mut d) => {
                d.retain(|_, w| !w.is_zero());
                TValue::Vect(d)
            }
            TValue::Poly(p) => {
                let commutative = matches!(self, MonadTag::PolyCommutative);
                let mut out = BTreeMap::new();
                for (mut mono, c) in p {
                    if commutative {
                        mono.sort();
                    }
                    *out.entry(mono).or_insert(0) += c;
                }
                out.retain(|_, c| *c > 0);
                TValue::Poly(out)
            }
            other => other,
        }
    }

    /// Verifies that `tv` is a canonical element of this monad: right
    /// payload shape, valid identifiers, parameter membership, totality,
    /// normalization, nonemptiness where required.
    pub fn check(&self, tv: &TValue) -> Result<()> {
        self.expect_shape(tv)?;
        let malformed = |msg: String| Err(MonadError::Malformed(msg));
        for x in tv.ids() {
            if !is_ident(x) {
                return malformed(format!("`{x}` is not a valid id"));
            }
        }
        match (self, tv) {
            (MonadTag::PowerSetNonempty, TValue::Set(s)) if s.is_empty() => {
                Err(MonadError::Empty(self.to_string()))
            }
            (MonadTag::ListNonempty, TValue::List(l)) if l.is_empty() => {
                Err(MonadError::Empty(self.to_string()))
            }
            (_, TValue::Bag(b)) if b.values().any(|n| *n == 0) => {
                malformed("multiset multiplicities must be at least 1".into())
            }
            (_, TValue::Dist(d)) => {
                if d.values().any(|w| !w.is_positive()) {
                    return malformed("distribution weights must be positive".into());
                }
                let total: Rational = d.values().sum();
                if !total.is_one() {
                    return Err(MonadError::NotNormalized(crate::rational::render_rational(&total)));
                }
                Ok(())
            }
            (_, TValue::Vect(v)) if v.values().any(Zero::is_zero) => {
                malformed("vector coefficients must be nonzero".into())
            }
            (MonadTag::Exc(labels), TValue::Exc(e)) => check_entry(labels, e),
            (MonadTag::ListExc(labels), TValue::ListExc(l)) => {
                l.iter().try_for_each(|e| check_entry(labels, e))
            }
            (MonadTag::Inp(inputs), TValue::Inp(m)) => check_total(inputs, m.keys()),
            (MonadTag::Annot(monoid), TValue::Annot(m, _)) => check_elem(monoid, m),
            (MonadTag::Tur { inputs, monoid }, TValue::Tur(m)) => {
                check_total(inputs, m.keys())?;
                m.values().try_for_each(|(w, _)| check_elem(monoid, w))
            }
            (_, TValue::Poly(p)) => {
                if p.values().any(|c| *c == 0) {
                    return malformed("polynomial coefficients must be positive".into());
                }
                if matches!(self, MonadTag::PolyCommutative)
                    && p.keys().any(|m| m.windows(2).any(|w| w[0] > w[1]))
                {
                    return malformed("commutative monomials must be sorted".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Errors unless the payload variant is the one this tag uses.
    pub(crate) fn expect_shape(&self, tv: &TValue) -> Result<()> {
        let ok = matches!(
            (self, tv),
            (MonadTag::Atomic, TValue::Atomic(_))
                | (MonadTag::Unlinked, TValue::Unlinked)
                | (MonadTag::PowerSet | MonadTag::PowerSetNonempty, TValue::Set(_))
                | (MonadTag::List | MonadTag::ListNonempty, TValue::List(_))
                | (MonadTag::Multiset, TValue::Bag(_))
                | (MonadTag::Dist, TValue::Dist(_))
                | (MonadTag::Exc(_), TValue::Exc(_))
                | (MonadTag::ListExc(_), TValue::ListExc(_))
                | (MonadTag::Inp(_), TValue::Inp(_))
                | (MonadTag::Annot(_), TValue::Annot(..))
                | (MonadTag::Tur { .. }, TValue::Tur(_))
                | (MonadTag::Vect, TValue::Vect(_))
                | (MonadTag::PolyCommutative | MonadTag::PolyNoncommutative, TValue::Poly(_))
        );
        if ok {
            Ok(())
        } else {
            Err(mismatch(self, tv))
        }
    }
}

fn mismatch(tag: &MonadTag, tv: &TValue) -> MonadError {
    MonadError::TagMismatch { expected: tag.to_string(), found: tv.variant_name().to_string() }
}

fn map_entry<F: FnMut(&Id) -> Result<Id>>(e: &Entry, f: &mut F) -> Result<Entry> {
    Ok(match e {
        Entry::Id(x) => Entry::Id(f(x)?),
        Entry::Label(l) => Entry::Label(l.clone()),
    })
}

fn check_entry(labels: &BTreeSet<String>, e: &Entry) -> Result<()> {
    match e {
        Entry::Label(l) if !labels.contains(l) => {
            Err(MonadError::Malformed(format!("`!{l}` is not a declared exception label")))
        }
        _ => Ok(()),
    }
}

fn check_total<'a>(inputs: &BTreeSet<String>, keys: impl Iterator<Item = &'a String>) -> Result<()> {
    let keys: BTreeSet<&String> = keys.collect();
    if let Some(missing) = inputs.iter().find(|u| !keys.contains(u)) {
        return Err(MonadError::NotTotal(missing.clone()));
    }
    if let Some(extra) = keys.iter().find(|u| !inputs.contains(**u)) {
        return Err(MonadError::Malformed(format!("`{extra}` is not a declared input")));
    }
    Ok(())
}

fn check_elem(monoid: &Monoid, e: &MonoidElem) -> Result<()> {
    if monoid.contains(e) {
        Ok(())
    } else {
        Err(MonadError::Malformed(format!("{} is not an element of {monoid}", monoid.render_elem(e))))
    }
}

/// Product of two polynomials; words concatenate, commutative monomials merge sorted.
pub(crate) fn poly_mul(
    a: &BTreeMap<Monomial, u64>,
    b: &BTreeMap<Monomial, u64>,
    commutative: bool,
) -> BTreeMap<Monomial, u64> {
    let mut out = BTreeMap::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let mut mono = ma.clone();
            mono.extend(mb.iter().cloned());
            if commutative {
                mono.sort();
            }
            *out.entry(mono).or_insert(0) += ca * cb;
        }
    }
    out
}

pub(crate) fn poly_add_scaled(acc: &mut BTreeMap<Monomial, u64>, p: &BTreeMap<Monomial, u64>, scale: u64) {
    for (m, c) in p {
        *acc.entry(m.clone()).or_insert(0) += c * scale;
    }
}

/// Caches `g` per id and checks each image has this tag's shape.
struct Memo<'t, G> {
    tag: &'t MonadTag,
    g: G,
    seen: BTreeMap<Id, TValue>,
}

impl<'t, G: FnMut(&str) -> Option<TValue>> Memo<'t, G> {
    fn new(tag: &'t MonadTag, g: G) -> Self {
        Memo { tag, g, seen: BTreeMap::new() }
    }

    fn get(&mut self, x: &Id) -> Result<&TValue> {
        if !self.seen.contains_key(x) {
            let v = (self.g)(x).ok_or_else(|| MonadError::Undefined(x.clone()))?;
            self.tag.expect_shape(&v)?;
            self.seen.insert(x.clone(), v);
        }
        Ok(&self.seen[x])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(tag: &MonadTag, text: &str) -> TValue {
        tag.parse_value(text).unwrap()
    }

    fn table(tag: &MonadTag, rows: &[(&str, &str)]) -> BTreeMap<Id, TValue> {
        rows.iter().map(|(k, t)| (k.to_string(), v(tag, t))).collect()
    }

    #[test]
    fn units() {
        assert_eq!(MonadTag::List.unit("p"), TValue::List(vec!["p".into()]));
        assert_eq!(MonadTag::Unlinked.unit("Alice"), TValue::Unlinked);
        assert_eq!(MonadTag::Dist.unit("x"), v(&MonadTag::Dist, "1 x"));
        let inp: MonadTag = "inp {0,1}".parse().unwrap();
        assert_eq!(inp.unit("x"), v(&inp, "0: x; 1: x"));
    }

    #[test]
    fn list_map_term_by_term() {
        let f = BTreeMap::from([("p", "1"), ("q", "4"), ("r", "1")]);
        let tv = v(&MonadTag::List, "[q, p, p, r, q, q, r, q]");
        let out = MonadTag::List.map(&tv, |x| f.get(x).map(|s| s.to_string())).unwrap();
        assert_eq!(out, v(&MonadTag::List, "[4, 1, 1, 1, 4, 4, 1, 4]"));
        assert!(matches!(MonadTag::List.map(&tv, |_| None), Err(MonadError::Undefined(_))));
    }

    #[test]
    fn dist_map_sums_merged_weights() {
        let out = MonadTag::Dist.map(&v(&MonadTag::Dist, "1/2 a + 1/2 b"), |_| Some("c".into())).unwrap();
        assert_eq!(out, v(&MonadTag::Dist, "1 c"));
    }

    #[test]
    fn dist_flatten_is_a_weighted_sum() {
        let d = MonadTag::Dist;
        let nested = NestedTValue::new(v(&d, "1/2 k + 1/2 l"), table(&d, &[("k", "1 p"), ("l", "1/2 p + 1/2 q")]));
        assert_eq!(d.flatten(&nested).unwrap(), v(&d, "3/4 p + 1/4 q"));
    }

    #[test]
    fn exceptions_propagate() {
        let m = MonadTag::maybe();
        let nested = NestedTValue::new(v(&m, "!null"), BTreeMap::new());
        assert_eq!(m.flatten(&nested).unwrap(), v(&m, "!null"));
    }

    #[test]
    fn extend_examples() {
        let l = MonadTag::List;
        let g = table(&l, &[("s", "[u, v, v]")]);
        assert_eq!(l.extend(&v(&l, "[s, s]"), |x| g.get(x).cloned()).unwrap(), v(&l, "[u, v, v, u, v, v]"));
        let m = MonadTag::Multiset;
        let g = table(&m, &[("b", "{c, c}"), ("d", "{}")]);
        assert_eq!(m.extend(&v(&m, "{b, d}"), |x| g.get(x).cloned()).unwrap(), v(&m, "{c, c}"));
    }

    #[test]
    fn equality_is_canonical() {
        let m = MonadTag::Multiset;
        assert!(m.values_eq(&v(&m, "{c, b, c}"), &v(&m, "{b, c, c}")).unwrap());
        let d = MonadTag::Dist;
        assert!(d.values_eq(&v(&d, "1/2 a + 1/2 b"), &v(&d, "2/4 a + 1/2 b")).unwrap());
        let l = MonadTag::List;
        assert!(!l.values_eq(&v(&l, "[a, b]"), &v(&l, "[b, a]")).unwrap());
        assert!(l.values_eq(&v(&l, "[a]"), &TValue::Atomic("a".into())).is_err());
    }

    #[test]
    fn turing_flatten_halts_absorb() {
        let t: MonadTag = "tur inputs{0,1} gens{L,R}".parse().unwrap();
        let nested = NestedTValue::new(v(&t, "0: (L) k; 1: (R) !Halt"), table(&t, &[("k", "0: (R) x; 1: (L) y")]));
        assert_eq!(t.flatten(&nested).unwrap(), v(&t, "0: (L R) x; 1: (R) !Halt"));
    }

    #[test]
    fn poly_substitution() {
        let p = MonadTag::PolyNoncommutative;
        let nested = NestedTValue::new(v(&p, "1 k.l + 2"), table(&p, &[("k", "1 a + 1 b"), ("l", "1 c")]));
        assert_eq!(p.flatten(&nested).unwrap(), v(&p, "1 a.c + 1 b.c + 2"));
    }
}
