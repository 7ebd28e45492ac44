//! Monad morphisms and the change of monad they induce on instances.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::instance::{Instance, InstanceError, ValidationReport};
use crate::laws::{differ, run_law, show_nested, LawReport, Sampler, MAX_SIZE, MAX_UNIVERSE};
use crate::monad::{Entry, MonadError, MonadTag, Monoid, MonoidElem, NestedTValue, TValue};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("unknown monad morphism `{0}`")]
    UnknownMorphism(String),
    #[error("map file line {line}: {message}")]
    MapFile { line: usize, message: String },
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("could not read `{path}`: {message}")]
    Load { path: String, message: String },
    #[error("morphism `{morphism}` starts at `{expected}` but the instance is over `{found}`")]
    TagMismatch { morphism: String, expected: String, found: String },
    #[error("{0}")]
    Monad(#[from] MonadError),
    #[error("{0}")]
    Instance(#[from] InstanceError),
}

/// A family of functions `S(X) -> T(X)`, natural in `X`.
pub trait MonadMap {
    fn name(&self) -> String;
    fn source(&self) -> MonadTag;
    fn target(&self) -> MonadTag;
    fn apply(&self, tv: &TValue) -> Result<TValue, MonadError>;
}

/// A monoid homomorphism, given by its values on generators (free source)
/// or on every element (table source).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidHom {
    source: Monoid,
    target: Monoid,
    images: BTreeMap<String, MonoidElem>,
}

impl MonoidHom {
    pub fn new(source: Monoid, target: Monoid, images: BTreeMap<String, MonoidElem>) -> Result<Self, TransformError> {
        let bad = |m: String| Err(TransformError::InvalidMap(m));
        let domain: Vec<String> = match &source {
            Monoid::Free(gens) => gens.iter().cloned().collect(),
            Monoid::Table(t) => t.elements().to_vec(),
            other => return bad(format!("homomorphisms out of `{other}` are not supported")),
        };
        for x in &domain {
            match images.get(x) {
                None => return bad(format!("no image for `{x}`")),
                Some(y) if !target.contains(y) => {
                    return bad(format!("image of `{x}` is not an element of {target}"))
                }
                _ => {}
            }
        }
        if let Some(extra) = images.keys().find(|k| !domain.contains(k)) {
            return bad(format!("`{extra}` is not in {source}"));
        }
        let hom = MonoidHom { source, target, images };
        if let Monoid::Table(t) = &hom.source {
            let id = MonoidElem::Named(t.identity().to_string());
            if hom.image(&id)? != hom.target.identity() {
                return bad("the identity is not preserved".into());
            }
            for a in t.elements() {
                for b in t.elements() {
                    let ab = MonoidElem::Named(t.multiply(a, b).unwrap().to_string());
                    let (ha, hb) = (hom.image(&MonoidElem::Named(a.clone()))?, hom.image(&MonoidElem::Named(b.clone()))?);
                    if hom.image(&ab)? != hom.target.multiply(&ha, &hb)? {
                        return bad(format!("products are not preserved at {a}*{b}"));
                    }
                }
            }
        }
        Ok(hom)
    }

    pub fn source(&self) -> &Monoid {
        &self.source
    }

    pub fn target(&self) -> &Monoid {
        &self.target
    }

    pub fn image(&self, m: &MonoidElem) -> Result<MonoidElem, MonadError> {
        let missing = || MonadError::Malformed(format!("`{}` is not an element of {}", self.source.render_elem(m), self.source));
        match m {
            MonoidElem::Word(w) => w.iter().try_fold(self.target.identity(), |acc, g| {
                self.target.multiply(&acc, self.images.get(g).ok_or_else(missing)?)
            }),
            MonoidElem::Named(n) => self.images.get(n).cloned().ok_or_else(missing),
            MonoidElem::Number(_) => Err(missing()),
        }
    }
}

/// The catalog of supported monad morphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonadMorphism {
    /// `Atomic -> T`, the unit of `T`.
    UnitEmbed(MonadTag),
    /// `T -> Unlinked`, forgetting every value.
    ToUnlinked(MonadTag),
    /// `Dist -> PowerSet`.
    Support,
    /// `Multiset -> PowerSet`.
    MultisetSupport,
    /// `List -> Multiset`.
    ForgetOrder,
    /// `List -> Exc{null}`: the head, or `null` for the empty list.
    FirstOrNull,
    /// `ListNonempty -> Atomic`.
    FirstOfNonempty,
    /// `Exc(from) -> Exc(to)`, renaming labels.
    ExcRetune { from: BTreeSet<String>, to: BTreeSet<String>, map: BTreeMap<String, String> },
    /// `Inp(from) -> Inp(to)`, reading each new input at its old counterpart.
    InpRetune { from: BTreeSet<String>, to: BTreeSet<String>, map: BTreeMap<String, String> },
    /// `Annot(M) -> Annot(N)` along a monoid homomorphism.
    AnnotRetune(MonoidHom),
}

fn mismatch(expected: &MonadTag, tv: &TValue) -> MonadError {
    MonadError::TagMismatch { expected: expected.to_string(), found: tv.variant_name().to_string() }
}

fn null() -> String {
    "null".to_string()
}

impl MonadMap for MonadMorphism {
    fn name(&self) -> String {
        match self {
            MonadMorphism::UnitEmbed(t) => format!("unit-embed:{t}"),
            MonadMorphism::ToUnlinked(t) => format!("to-unlinked:{t}"),
            MonadMorphism::Support => "support".into(),
            MonadMorphism::MultisetSupport => "mset-support".into(),
            MonadMorphism::ForgetOrder => "forget-order".into(),
            MonadMorphism::FirstOrNull => "first-or-null".into(),
            MonadMorphism::FirstOfNonempty => "first".into(),
            MonadMorphism::ExcRetune { .. } => "exc-retune".into(),
            MonadMorphism::InpRetune { .. } => "inp-retune".into(),
            MonadMorphism::AnnotRetune(_) => "annot-retune".into(),
        }
    }

    fn source(&self) -> MonadTag {
        match self {
            MonadMorphism::UnitEmbed(_) => MonadTag::Atomic,
            MonadMorphism::ToUnlinked(t) => t.clone(),
            MonadMorphism::Support => MonadTag::Dist,
            MonadMorphism::MultisetSupport => MonadTag::Multiset,
            MonadMorphism::ForgetOrder | MonadMorphism::FirstOrNull => MonadTag::List,
            MonadMorphism::FirstOfNonempty => MonadTag::ListNonempty,
            MonadMorphism::ExcRetune { from, .. } => MonadTag::Exc(from.clone()),
            MonadMorphism::InpRetune { from, .. } => MonadTag::Inp(from.clone()),
            MonadMorphism::AnnotRetune(h) => MonadTag::Annot(h.source.clone()),
        }
    }

    fn target(&self) -> MonadTag {
        match self {
            MonadMorphism::UnitEmbed(t) => t.clone(),
            MonadMorphism::ToUnlinked(_) => MonadTag::Unlinked,
            MonadMorphism::Support | MonadMorphism::MultisetSupport => MonadTag::PowerSet,
            MonadMorphism::ForgetOrder => MonadTag::Multiset,
            MonadMorphism::FirstOrNull => MonadTag::maybe(),
            MonadMorphism::FirstOfNonempty => MonadTag::Atomic,
            MonadMorphism::ExcRetune { to, .. } => MonadTag::Exc(to.clone()),
            MonadMorphism::InpRetune { to, .. } => MonadTag::Inp(to.clone()),
            MonadMorphism::AnnotRetune(h) => MonadTag::Annot(h.target.clone()),
        }
    }

    fn apply(&self, tv: &TValue) -> Result<TValue, MonadError> {
        let source = self.source();
        source.check(tv)?;
        let out = match (self, tv) {
            (MonadMorphism::UnitEmbed(t), TValue::Atomic(x)) => t.unit(x),
            (MonadMorphism::ToUnlinked(_), _) => TValue::Unlinked,
            (MonadMorphism::Support, TValue::Dist(d)) => TValue::Set(d.keys().cloned().collect()),
            (MonadMorphism::MultisetSupport, TValue::Bag(b)) => TValue::Set(b.keys().cloned().collect()),
            (MonadMorphism::ForgetOrder, TValue::List(l)) => {
                let mut bag = BTreeMap::new();
                for x in l {
                    *bag.entry(x.clone()).or_insert(0) += 1;
                }
                TValue::Bag(bag)
            }
            (MonadMorphism::FirstOrNull, TValue::List(l)) => {
                TValue::Exc(l.first().map_or(Entry::Label(null()), |x| Entry::Id(x.clone())))
            }
            (MonadMorphism::FirstOfNonempty, TValue::List(l)) => {
                TValue::Atomic(l.first().ok_or_else(|| MonadError::Empty("list".into()))?.clone())
            }
            (MonadMorphism::ExcRetune { map, .. }, TValue::Exc(e)) => TValue::Exc(match e {
                Entry::Label(l) => Entry::Label(map[l].clone()),
                Entry::Id(x) => Entry::Id(x.clone()),
            }),
            (MonadMorphism::InpRetune { map, .. }, TValue::Inp(t)) => {
                TValue::Inp(map.iter().map(|(new, old)| (new.clone(), t[old].clone())).collect())
            }
            (MonadMorphism::AnnotRetune(h), TValue::Annot(m, x)) => TValue::Annot(h.image(m)?, x.clone()),
            _ => return Err(mismatch(&source, tv)),
        };
        Ok(self.target().canonicalize(out))
    }
}

impl fmt::Display for MonadMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.name(), self.source(), self.target())
    }
}

impl MonadMorphism {
    pub fn exc_retune(
        from: BTreeSet<String>,
        to: BTreeSet<String>,
        map: BTreeMap<String, String>,
    ) -> Result<Self, TransformError> {
        check_total(&from, &to, &map)?;
        Ok(MonadMorphism::ExcRetune { from, to, map })
    }

    /// `map` sends each new input in `to` to an old input in `from`.
    pub fn inp_retune(
        from: BTreeSet<String>,
        to: BTreeSet<String>,
        map: BTreeMap<String, String>,
    ) -> Result<Self, TransformError> {
        check_total(&to, &from, &map)?;
        Ok(MonadMorphism::InpRetune { from, to, map })
    }

    /// Resolves a command-line name. File-backed morphisms read their map
    /// file through `load`; `to-unlinked` without a tag starts at `source`.
    pub fn from_cli<L>(name: &str, source: &MonadTag, load: L) -> Result<Self, TransformError>
    where
        L: Fn(&str) -> Result<String, String>,
    {
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (name.trim(), None),
        };
        let read = |path: &str| load(path).map_err(|message| TransformError::Load { path: path.into(), message });
        let need = || arg.ok_or_else(|| TransformError::UnknownMorphism(format!("{name} (missing argument)")));
        Ok(match head {
            "unit-embed" => MonadMorphism::UnitEmbed(need()?.parse()?),
            "to-unlinked" => MonadMorphism::ToUnlinked(match arg {
                Some(t) => t.parse()?,
                None => source.clone(),
            }),
            "support" => MonadMorphism::Support,
            "mset-support" => MonadMorphism::MultisetSupport,
            "forget-order" => MonadMorphism::ForgetOrder,
            "first-or-null" => MonadMorphism::FirstOrNull,
            "first" => MonadMorphism::FirstOfNonempty,
            "exc-retune" => {
                let (from, to, map) = parse_map_file(&read(need()?)?)?;
                MonadMorphism::exc_retune(labels("exc", &from)?, labels("exc", &to)?, map)?
            }
            "inp-retune" => {
                let (from, to, map) = parse_map_file(&read(need()?)?)?;
                MonadMorphism::inp_retune(labels("inp", &from)?, labels("inp", &to)?, map)?
            }
            "annot-retune" => MonadMorphism::AnnotRetune(parse_annot_retune(&read(need()?)?)?),
            _ => return Err(TransformError::UnknownMorphism(name.to_string())),
        })
    }
}

fn check_total(
    dom: &BTreeSet<String>,
    cod: &BTreeSet<String>,
    map: &BTreeMap<String, String>,
) -> Result<(), TransformError> {
    for x in dom {
        match map.get(x) {
            None => return Err(TransformError::InvalidMap(format!("no image for `{x}`"))),
            Some(y) if !cod.contains(y) => {
                return Err(TransformError::InvalidMap(format!("`{x} -> {y}` leaves {{{}}}", join(cod))))
            }
            _ => {}
        }
    }
    match map.keys().find(|k| !dom.contains(*k)) {
        Some(extra) => Err(TransformError::InvalidMap(format!("`{extra}` is not in {{{}}}", join(dom)))),
        None => Ok(()),
    }
}

fn join(s: &BTreeSet<String>) -> String {
    s.iter().cloned().collect::<Vec<_>>().join(",")
}

fn labels(kind: &str, text: &str) -> Result<BTreeSet<String>, TransformError> {
    match format!("{kind} {text}").parse::<MonadTag>()? {
        MonadTag::Exc(s) | MonadTag::Inp(s) => Ok(s),
        _ => unreachable!(),
    }
}

/// Splits a map file into its `from` and `to` headers and `a -> b` lines.
/// Blank lines and `#` comments are ignored.
pub fn parse_map_file(text: &str) -> Result<(String, String, BTreeMap<String, String>), TransformError> {
    let (mut from, mut to) = (None, None);
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        let err = |message: String| TransformError::MapFile { line: i + 1, message };
        if line.is_empty() {
            continue;
        }
        if let Some((a, b)) = line.split_once("->") {
            let (a, b) = (a.trim(), b.trim());
            if a.is_empty() {
                return Err(err("empty left side".into()));
            }
            if map.insert(a.to_string(), b.to_string()).is_some() {
                return Err(err(format!("`{a}` is mapped twice")));
            }
        } else if let Some(rest) = line.strip_prefix("from ") {
            from = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("to ") {
            to = Some(rest.trim().to_string());
        } else {
            return Err(err(format!("expected `from`, `to` or `a -> b`, found `{line}`")));
        }
    }
    let missing = |what: &str| TransformError::MapFile { line: 0, message: format!("missing `{what}` line") };
    Ok((from.ok_or_else(|| missing("from"))?, to.ok_or_else(|| missing("to"))?, map))
}

/// `from` and `to` are monoids in tag syntax (`gens{a,b}`, `add`, ...);
/// each `x -> m` line gives the image of a generator or element.
pub fn parse_annot_retune(text: &str) -> Result<MonoidHom, TransformError> {
    let (from, to, map) = parse_map_file(text)?;
    let monoid = |t: &str| match format!("annot {t}").parse::<MonadTag>()? {
        MonadTag::Annot(m) => Ok::<_, TransformError>(m),
        _ => unreachable!(),
    };
    let (source, target) = (monoid(&from)?, monoid(&to)?);
    let images = map
        .into_iter()
        .map(|(k, v)| Ok((k, target.parse_elem(&v)?)))
        .collect::<Result<BTreeMap<_, _>, TransformError>>()?;
    MonoidHom::new(source, target, images)
}

/// Applies `mm` to every cell of `inst`; rows and schema are kept.
pub fn transform_instance(inst: &Instance, mm: &dyn MonadMap) -> Result<Instance, TransformError> {
    if inst.tag() != &mm.source() {
        return Err(TransformError::TagMismatch {
            morphism: mm.name(),
            expected: mm.source().to_string(),
            found: inst.tag().to_string(),
        });
    }
    Ok(inst.map_cells(&inst.name, mm.target(), |v| mm.apply(v))?)
}

/// Transforms `inst` and validates the result.
pub fn check_transform_preserves_validity(inst: &Instance, mm: &dyn MonadMap) -> Result<ValidationReport, TransformError> {
    Ok(transform_instance(inst, mm)?.validate())
}

/// Checks the unit and multiplication squares and naturality of `mm` on
/// seeded random values.
pub fn check_monad_morphism_laws(mm: &dyn MonadMap, cases: usize, seed: u64) -> LawReport {
    let (s_tag, t_tag) = (mm.source(), mm.target());
    let mut s = Sampler::new(seed, MAX_UNIVERSE, MAX_SIZE);
    let ids = s.ids();
    let mut results = Vec::new();

    results.push(run_law("image is well formed", cases, || {
        let tv = s.value(&s_tag, &ids);
        let image = mm.apply(&tv)?;
        Ok(t_tag.check(&image).err().map(|e| format!("image of {tv} is {image}: {e}")))
    }));

    results.push(run_law("unit square", cases, || {
        let TValue::Atomic(x) = s.value(&MonadTag::Atomic, &ids) else { unreachable!() };
        Ok(differ(&mm.apply(&s_tag.unit(&x))?, &t_tag.unit(&x), || format!("image of unit({x})")))
    }));

    results.push(run_law("multiplication square", cases, || {
        let nested = s.nested(&s_tag, &ids);
        let left = mm.apply(&s_tag.flatten(&nested)?)?;
        let inner = nested
            .inner
            .iter()
            .map(|(k, v)| Ok((k.clone(), mm.apply(v)?)))
            .collect::<Result<BTreeMap<_, _>, MonadError>>()?;
        let right = t_tag.flatten(&NestedTValue::new(mm.apply(&nested.outer)?, inner))?;
        Ok(differ(&left, &right, || format!("image of flatten({})", show_nested(&nested))))
    }));

    results.push(run_law("naturality", cases, || {
        let tv = s.value(&s_tag, &ids);
        let f = s.function(&ids, &ids);
        let left = mm.apply(&s_tag.map(&tv, |x| f.get(x).cloned())?)?;
        let right = t_tag.map(&mm.apply(&tv)?, |x| f.get(x).cloned())?;
        Ok(differ(&left, &right, || format!("map then transform on {tv}")))
    }));

    LawReport { subject: format!("monad morphism {}: {s_tag} -> {t_tag}", mm.name()), results }
}

/// Deliberately wrong maps, kept to show that the law harness rejects them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutant {
    /// `List -> Exc{null}` taking the last element.
    LastOrNull,
    /// `List -> Multiset` that drops repeated elements.
    DedupForgetOrder,
    /// `List -> Exc{null}` sending everything to `null`.
    ConstantNull,
}

impl MonadMap for Mutant {
    fn name(&self) -> String {
        match self {
            Mutant::LastOrNull => "mutant-last-or-null",
            Mutant::DedupForgetOrder => "mutant-dedup-forget-order",
            Mutant::ConstantNull => "mutant-constant-null",
        }
        .into()
    }

    fn source(&self) -> MonadTag {
        MonadTag::List
    }

    fn target(&self) -> MonadTag {
        match self {
            Mutant::DedupForgetOrder => MonadTag::Multiset,
            _ => MonadTag::maybe(),
        }
    }

    fn apply(&self, tv: &TValue) -> Result<TValue, MonadError> {
        let TValue::List(l) = tv else {
            return Err(mismatch(&MonadTag::List, tv));
        };
        Ok(match self {
            Mutant::LastOrNull => TValue::Exc(l.last().map_or(Entry::Label(null()), |x| Entry::Id(x.clone()))),
            Mutant::DedupForgetOrder => TValue::Bag(l.iter().map(|x| (x.clone(), 1)).collect()),
            Mutant::ConstantNull => TValue::Exc(Entry::Label(null())),
        })
    }
}

/// One instance of every catalog entry, with small fixed parameters.
pub fn catalog() -> Vec<MonadMorphism> {
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    let pairs = |xs: &[(&str, &str)]| xs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect::<BTreeMap<_, _>>();
    let mut out = Vec::new();
    for tag in crate::laws::representative_tags() {
        out.push(MonadMorphism::UnitEmbed(tag.clone()));
        out.push(MonadMorphism::ToUnlinked(tag));
    }
    out.extend([
        MonadMorphism::Support,
        MonadMorphism::MultisetSupport,
        MonadMorphism::ForgetOrder,
        MonadMorphism::FirstOrNull,
        MonadMorphism::FirstOfNonempty,
    ]);
    out.push(MonadMorphism::exc_retune(set(&["err", "null"]), set(&["null"]), pairs(&[("err", "null"), ("null", "null")])).unwrap());
    out.push(MonadMorphism::exc_retune(set(&["a"]), set(&["a", "b"]), pairs(&[("a", "b")])).unwrap());
    out.push(MonadMorphism::inp_retune(set(&["0", "1"]), set(&["a", "b", "c"]), pairs(&[("a", "0"), ("b", "1"), ("c", "0")])).unwrap());
    for text in [
        "from gens{a,b}\nto add\na -> 1\nb -> 1/2\n",
        "from gens{a,b}\nto gens{L,R}\na -> L R\nb ->\n",
        "from table{e,a,b} unit{e} products{e,a,b;a,b,e;b,e,a}\nto table{e,a,b} unit{e} products{e,a,b;a,b,e;b,e,a}\ne -> e\na -> b\nb -> a\n",
    ] {
        out.push(MonadMorphism::AnnotRetune(parse_annot_retune(text).unwrap()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn list(xs: &[&str]) -> TValue {
        TValue::List(xs.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn catalog_entries_apply_as_documented() {
        let fon = MonadMorphism::FirstOrNull;
        assert_eq!(fon.apply(&list(&["b", "a"])).unwrap(), TValue::Exc(Entry::Id("b".into())));
        assert_eq!(fon.apply(&list(&[])).unwrap(), TValue::Exc(Entry::Label("null".into())));
        let fo = MonadMorphism::ForgetOrder.apply(&list(&["a", "b", "a"])).unwrap();
        assert_eq!(fo, MonadTag::Multiset.parse_value("{a, a, b}").unwrap());
        let sup = MonadMorphism::Support.apply(&MonadTag::Dist.parse_value("1/3 a + 2/3 b").unwrap()).unwrap();
        assert_eq!(sup, MonadTag::PowerSet.parse_value("{a, b}").unwrap());
        assert!(MonadMorphism::Support.apply(&list(&["a"])).is_err());
    }

    #[test]
    fn lawful_catalog_entries_pass() {
        for mm in catalog() {
            let report = check_monad_morphism_laws(&mm, 80, 3);
            if mm == MonadMorphism::FirstOrNull {
                assert!(report.result("unit square").unwrap().counterexample.is_none());
                assert!(report.result("multiplication square").unwrap().counterexample.is_some(), "{report}");
            } else {
                assert!(report.passed(), "{report}");
            }
        }
    }

    #[test]
    fn first_or_null_fails_on_an_empty_leading_list() {
        let nested = NestedTValue::new(
            list(&["k0", "k1"]),
            BTreeMap::from([("k0".to_string(), list(&[])), ("k1".to_string(), list(&["a"]))]),
        );
        let mm = MonadMorphism::FirstOrNull;
        let left = mm.apply(&MonadTag::List.flatten(&nested).unwrap()).unwrap();
        let inner = nested.inner.iter().map(|(k, v)| (k.clone(), mm.apply(v).unwrap())).collect();
        let right = MonadTag::maybe().flatten(&NestedTValue::new(mm.apply(&nested.outer).unwrap(), inner)).unwrap();
        assert_eq!(left, TValue::Exc(Entry::Id("a".into())));
        assert_eq!(right, TValue::Exc(Entry::Label("null".into())));
    }

    #[test]
    fn mutants_are_rejected() {
        for m in [Mutant::LastOrNull, Mutant::DedupForgetOrder, Mutant::ConstantNull] {
            assert!(!check_monad_morphism_laws(&m, 200, 11).passed(), "{m:?}");
        }
        let r = check_monad_morphism_laws(&Mutant::ConstantNull, 50, 1);
        assert!(r.result("unit square").unwrap().counterexample.is_some());
    }

    #[test]
    fn retune_maps_must_be_total() {
        let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        let r = MonadMorphism::exc_retune(set(&["a", "b"]), set(&["c"]), BTreeMap::from([("a".into(), "c".into())]));
        assert!(matches!(r, Err(TransformError::InvalidMap(_))));
        let hom = "from table{e,a} unit{e} products{e,a;a,e}\nto add\ne -> 0\na -> 1\n";
        assert!(matches!(parse_annot_retune(hom), Err(TransformError::InvalidMap(_))));
        assert!(matches!(parse_map_file("a -> b\n"), Err(TransformError::MapFile { .. })));
    }

    #[test]
    fn from_cli_resolves_names() {
        let none = |_: &str| Err::<String, String>("no files".into());
        let src = MonadTag::Dist;
        assert_eq!(MonadMorphism::from_cli("support", &src, none).unwrap(), MonadMorphism::Support);
        assert_eq!(MonadMorphism::from_cli("to-unlinked", &src, none).unwrap(), MonadMorphism::ToUnlinked(src.clone()));
        assert_eq!(
            MonadMorphism::from_cli("unit-embed:exc {null}", &src, none).unwrap(),
            MonadMorphism::UnitEmbed(MonadTag::maybe())
        );
        assert!(matches!(MonadMorphism::from_cli("nope", &src, none), Err(TransformError::UnknownMorphism(_))));
        assert!(matches!(MonadMorphism::from_cli("exc-retune:x", &src, none), Err(TransformError::Load { .. })));
        let file = |_: &str| Ok("from {0,1}\nto {t}\nt -> 1\n".to_string());
        let mm = MonadMorphism::from_cli("inp-retune:f", &MonadTag::Atomic, file).unwrap();
        assert_eq!(mm.target(), "inp {t}".parse().unwrap());
    }

    #[test]
    fn transforming_instances_keeps_them_valid() {
        let markov = fixtures::load("markov");
        let pw = transform_instance(&markov, &MonadMorphism::Support).unwrap();
        assert_eq!(pw.tag(), &MonadTag::PowerSet);
        assert!(pw.validate().is_valid());
        assert!(matches!(
            transform_instance(&markov, &MonadMorphism::ForgetOrder),
            Err(TransformError::TagMismatch { .. })
        ));
        let atomic = fixtures::load("employee");
        for tag in crate::laws::representative_tags() {
            let report = check_transform_preserves_validity(&atomic, &MonadMorphism::UnitEmbed(tag.clone())).unwrap();
            assert!(report.is_valid(), "{tag}: {report}");
        }
    }
}
