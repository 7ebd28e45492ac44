//! Morphisms between instances on the same schema.
//!
//! ```text
//! morphism collapse : dynamical -> dynamical
//! kind basic
//! component s
//! id | target
//! F | B
//! ```
//!
//! Basic and lax components send rows to rows; general components send rows
//! to values of the monad over the target's rows.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ident::is_ident;
use crate::instance::Instance;
use crate::monad::{Id, MonadError, MonadTag, TValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MorphismKind {
    Basic,
    General,
    Lax,
}

impl fmt::Display for MorphismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MorphismKind::Basic => "basic",
            MorphismKind::General => "general",
            MorphismKind::Lax => "lax",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    Row(Id),
    Value(TValue),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceMorphism {
    pub name: String,
    pub src: String,
    pub dst: String,
    pub kind: MorphismKind,
    /// object -> (source row -> target)
    pub components: BTreeMap<String, BTreeMap<Id, Target>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: target of {id}: {source}")]
    Cell { line: usize, id: Id, source: MonadError },
    #[error("instances are over different schemas (`{0}` and `{1}`)")]
    SchemaMismatch(String, String),
    #[error("instances use different monads (`{0}` and `{1}`)")]
    TagMismatch(String, String),
    #[error("expected a {expected} morphism, found {found}")]
    WrongKind { expected: MorphismKind, found: MorphismKind },
    #[error("lax morphisms are only checked for powerset, powerset+ and multiset, not `{0}`")]
    UnsupportedLax(String),
    #[error("component {obj} has no target for row {id}")]
    NotTotal { obj: String, id: Id },
    #[error("component {obj} sends {id} to {target}, which is not a row of the target instance")]
    Dangling { obj: String, id: Id, target: String },
    #[error("morphism names `{found}` but the instance is `{expected}`")]
    WrongInstance { expected: String, found: String },
    #[error("{0}")]
    Monad(#[from] MonadError),
}

/// A square that fails to commute (or, for lax morphisms, to be ordered).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareFailure {
    pub arrow: String,
    pub id: Id,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismReport {
    pub kind: MorphismKind,
    pub squares_checked: usize,
    pub failures: Vec<SquareFailure>,
}

impl MorphismReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for MorphismReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let relation = if self.kind == MorphismKind::Lax { "<=" } else { "=" };
        for x in &self.failures {
            writeln!(f, "square fails: arrow {} at row {}: {} {relation} {} does not hold", x.arrow, x.id, x.lhs, x.rhs)?;
        }
        if self.passed() {
            writeln!(f, "{} morphism: all {} squares hold", self.kind, self.squares_checked)
        } else {
            writeln!(f, "{} morphism: {} of {} squares fail", self.kind, self.failures.len(), self.squares_checked)
        }
    }
}

fn same_setting(src: &Instance, dst: &Instance) -> Result<(), MorphismError> {
    if src.schema() != dst.schema() {
        return Err(MorphismError::SchemaMismatch(src.schema().name.clone(), dst.schema().name.clone()));
    }
    if src.tag() != dst.tag() {
        return Err(MorphismError::TagMismatch(src.tag().to_string(), dst.tag().to_string()));
    }
    Ok(())
}

impl InstanceMorphism {
    /// Identity components on every row of `inst`.
    pub fn identity(inst: &Instance, kind: MorphismKind) -> InstanceMorphism {
        let components = inst
            .schema()
            .objects()
            .iter()
            .map(|o| {
                let comp = inst
                    .rows(o)
                    .map(|x| {
                        let t = match kind {
                            MorphismKind::General => Target::Value(inst.tag().unit(x)),
                            _ => Target::Row(x.clone()),
                        };
                        (x.clone(), t)
                    })
                    .collect();
                (o.clone(), comp)
            })
            .collect();
        InstanceMorphism { name: "id".into(), src: inst.name.clone(), dst: inst.name.clone(), kind, components }
    }

    fn expect_kind(&self, expected: MorphismKind) -> Result<(), MorphismError> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(MorphismError::WrongKind { expected, found: self.kind })
        }
    }

    fn target(&self, obj: &str, id: &str) -> Result<&Target, MorphismError> {
        self.components
            .get(obj)
            .and_then(|c| c.get(id))
            .ok_or_else(|| MorphismError::NotTotal { obj: obj.to_string(), id: id.to_string() })
    }

    fn row(&self, obj: &str, id: &str) -> Result<&Id, MorphismError> {
        match self.target(obj, id)? {
            Target::Row(y) => Ok(y),
            Target::Value(_) => Err(MorphismError::WrongKind { expected: MorphismKind::Basic, found: self.kind }),
        }
    }

    fn value(&self, obj: &str, id: &str) -> Result<&TValue, MorphismError> {
        match self.target(obj, id)? {
            Target::Value(v) => Ok(v),
            Target::Row(_) => Err(MorphismError::WrongKind { expected: MorphismKind::General, found: self.kind }),
        }
    }

    /// Totality on the source rows and targets inside the target instance.
    fn check_components(&self, src: &Instance, dst: &Instance) -> Result<(), MorphismError> {
        for obj in src.schema().objects() {
            for x in src.rows(obj) {
                let dangling = |target: &str| MorphismError::Dangling {
                    obj: obj.clone(),
                    id: x.clone(),
                    target: target.to_string(),
                };
                match self.target(obj, x)? {
                    Target::Row(y) if !dst.has_row(obj, y) => return Err(dangling(y)),
                    Target::Value(v) => {
                        dst.tag().check(v)?;
                        if let Some(y) = v.ids().find(|y| !dst.has_row(obj, y)) {
                            return Err(dangling(y));
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    fn squares<F>(&self, src: &Instance, mut check: F) -> Result<MorphismReport, MorphismError>
    where
        F: FnMut(&str, &str, &str, &TValue) -> Result<Option<(String, String)>, MorphismError>,
    {
        let mut failures = Vec::new();
        let mut checked = 0;
        for arrow in src.schema().arrows() {
            for x in src.rows(&arrow.src) {
                let cell = src.cell(&arrow.name, x).ok_or_else(|| {
                    MorphismError::Monad(MonadError::Undefined(format!("{}({x})", arrow.name)))
                })?;
                checked += 1;
                if let Some((lhs, rhs)) = check(&arrow.name, &arrow.src, x, cell)? {
                    failures.push(SquareFailure { arrow: arrow.name.clone(), id: x.clone(), lhs, rhs });
                }
            }
        }
        Ok(MorphismReport { kind: self.kind, squares_checked: checked, failures })
    }

    /// `T(b_c') . src(f) = dst(f) . b_c` for every arrow `f : c -> c'`.
    pub fn check_basic(&self, src: &Instance, dst: &Instance) -> Result<MorphismReport, MorphismError> {
        self.expect_kind(MorphismKind::Basic)?;
        same_setting(src, dst)?;
        self.check_components(src, dst)?;
        let tag = src.tag();
        self.squares(src, |arrow, obj, x, cell| {
            let cod = &src.schema().arrow(arrow).expect("arrow of schema").dst;
            let lhs = tag.map(cell, |y| self.row(cod, y).ok().cloned())?;
            let rhs = dst.cell(arrow, self.row(obj, x)?).ok_or_else(|| MonadError::Undefined(x.to_string()))?;
            Ok((lhs != *rhs).then(|| (lhs.to_string(), rhs.to_string())))
        })
    }

    /// `mu . T(a_c') . src(f) = mu . T(dst(f)) . a_c` for every arrow.
    pub fn check_general(&self, src: &Instance, dst: &Instance) -> Result<MorphismReport, MorphismError> {
        self.expect_kind(MorphismKind::General)?;
        same_setting(src, dst)?;
        self.check_components(src, dst)?;
        let tag = src.tag();
        self.squares(src, |arrow, obj, x, cell| {
            let cod = &src.schema().arrow(arrow).expect("arrow of schema").dst;
            let lhs = tag.extend(cell, |y| self.value(cod, y).ok().cloned())?;
            let rhs = tag.extend(self.value(obj, x)?, |y| dst.cell(arrow, y).cloned())?;
            Ok((lhs != rhs).then(|| (lhs.to_string(), rhs.to_string())))
        })
    }

    /// `T(b_c') . src(f) <= dst(f) . b_c`, with `<=` inclusion of sets or
    /// of multisets.
    pub fn check_lax(&self, src: &Instance, dst: &Instance) -> Result<MorphismReport, MorphismError> {
        self.expect_kind(MorphismKind::Lax)?;
        same_setting(src, dst)?;
        let tag = src.tag();
        if !matches!(tag, MonadTag::PowerSet | MonadTag::PowerSetNonempty | MonadTag::Multiset) {
            return Err(MorphismError::UnsupportedLax(tag.to_string()));
        }
        self.check_components(src, dst)?;
        self.squares(src, |arrow, obj, x, cell| {
            let cod = &src.schema().arrow(arrow).expect("arrow of schema").dst;
            let lhs = tag.map(cell, |y| self.row(cod, y).ok().cloned())?;
            let rhs = dst.cell(arrow, self.row(obj, x)?).ok_or_else(|| MonadError::Undefined(x.to_string()))?;
            Ok((!below(&lhs, rhs)).then(|| (lhs.to_string(), rhs.to_string())))
        })
    }

    /// Dispatches on the morphism's kind.
    pub fn check(&self, src: &Instance, dst: &Instance) -> Result<MorphismReport, MorphismError> {
        match self.kind {
            MorphismKind::Basic => self.check_basic(src, dst),
            MorphismKind::General => self.check_general(src, dst),
            MorphismKind::Lax => self.check_lax(src, dst),
        }
    }

    /// The general morphism whose components are `unit . b_c`.
    pub fn embed_basic(&self, tag: &MonadTag) -> Result<InstanceMorphism, MorphismError> {
        self.expect_kind(MorphismKind::Basic)?;
        let components = self
            .components
            .iter()
            .map(|(o, comp)| {
                let comp = comp
                    .iter()
                    .map(|(x, t)| match t {
                        Target::Row(y) => (x.clone(), Target::Value(tag.unit(y))),
                        Target::Value(v) => (x.clone(), Target::Value(v.clone())),
                    })
                    .collect();
                (o.clone(), comp)
            })
            .collect();
        Ok(InstanceMorphism {
            name: self.name.clone(),
            src: self.src.clone(),
            dst: self.dst.clone(),
            kind: MorphismKind::General,
            components,
        })
    }

    /// `other . self` for row-valued morphisms, componentwise.
    pub fn then(&self, other: &InstanceMorphism) -> Result<InstanceMorphism, MorphismError> {
        if self.kind == MorphismKind::General || other.kind == MorphismKind::General {
            return Err(MorphismError::WrongKind { expected: MorphismKind::Basic, found: MorphismKind::General });
        }
        let mut components = BTreeMap::new();
        for (o, comp) in &self.components {
            let mut out = BTreeMap::new();
            for (x, t) in comp {
                let Target::Row(y) = t else { unreachable!() };
                out.insert(x.clone(), Target::Row(other.row(o, y)?.clone()));
            }
            components.insert(o.clone(), out);
        }
        let kind = if self.kind == MorphismKind::Lax || other.kind == MorphismKind::Lax {
            MorphismKind::Lax
        } else {
            MorphismKind::Basic
        };
        Ok(InstanceMorphism {
            name: format!("{}_then_{}", self.name, other.name),
            src: self.src.clone(),
            dst: other.dst.clone(),
            kind,
            components,
        })
    }

    /// Parses a morphism file; general targets are read with the source
    /// instance's monad.
    pub fn parse(text: &str, src: &Instance, dst: &Instance) -> Result<InstanceMorphism, MorphismError> {
        let err = |line: usize, message: String| MorphismError::Parse { line, message };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (n, header) = lines.next().unwrap_or((1, ""));
        let (name, src_name, dst_name) = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["morphism", name, ":", s, "->", d] => (name.to_string(), s.to_string(), d.to_string()),
            _ => return Err(err(n, "expected `morphism <name> : <src> -> <dst>`".into())),
        };
        for (expected, found) in [(&src.name, &src_name), (&dst.name, &dst_name)] {
            if expected != found {
                return Err(MorphismError::WrongInstance { expected: expected.clone(), found: found.clone() });
            }
        }
        let (n, kind_line) = lines.next().ok_or_else(|| err(n, "missing `kind` line".into()))?;
        let kind = match kind_line.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["kind", "basic"] => MorphismKind::Basic,
            ["kind", "general"] => MorphismKind::General,
            ["kind", "lax"] => MorphismKind::Lax,
            _ => return Err(err(n, "expected `kind basic|general|lax`".into())),
        };
        let mut components: BTreeMap<String, BTreeMap<Id, Target>> = BTreeMap::new();
        let mut current: Option<String> = None;
        let mut expect_header = false;
        let mut seen = BTreeSet::new();
        for (n, line) in lines {
            if let Some(obj) = line.strip_prefix("component ") {
                let obj = obj.trim();
                if !src.schema().has_object(obj) {
                    return Err(err(n, format!("unknown object `{obj}`")));
                }
                if !seen.insert(obj.to_string()) {
                    return Err(err(n, format!("component `{obj}` appears twice")));
                }
                components.entry(obj.to_string()).or_default();
                current = Some(obj.to_string());
                expect_header = true;
                continue;
            }
            let Some(obj) = &current else {
                return Err(err(n, "expected `component <Obj>`".into()));
            };
            let cells: Vec<&str> = line.splitn(2, '|').map(str::trim).collect();
            if expect_header {
                expect_header = false;
                if cells != ["id", "target"] {
                    return Err(err(n, "component header must be `id | target`".into()));
                }
                continue;
            }
            let [id, target] = cells.as_slice() else {
                return Err(err(n, "expected `<id> | <target>`".into()));
            };
            if !is_ident(id) {
                return Err(err(n, format!("`{id}` is not a valid row id")));
            }
            let target = match kind {
                MorphismKind::General => Target::Value(
                    src.tag()
                        .parse_value(target)
                        .map_err(|source| MorphismError::Cell { line: n, id: id.to_string(), source })?,
                ),
                _ if is_ident(target) => Target::Row(target.to_string()),
                _ => return Err(err(n, format!("`{target}` is not a valid row id"))),
            };
            let comp = components.get_mut(obj).expect("component opened above");
            if comp.insert(id.to_string(), target).is_some() {
                return Err(err(n, format!("row `{id}` appears twice in component {obj}")));
            }
        }
        Ok(InstanceMorphism { name, src: src_name, dst: dst_name, kind, components })
    }

    pub fn render(&self, tag: &MonadTag) -> String {
        let mut out = format!("morphism {} : {} -> {}\nkind {}\n", self.name, self.src, self.dst, self.kind);
        for (obj, comp) in &self.components {
            out.push_str(&format!("\ncomponent {obj}\nid | target\n"));
            for (x, t) in comp {
                let t = match t {
                    Target::Row(y) => y.clone(),
                    Target::Value(v) => tag.render(v).unwrap_or_else(|_| v.to_string()),
                };
                out.push_str(&format!("{x} | {t}\n"));
            }
        }
        out
    }
}

/// Inclusion of sets or sub-multiset order; equality for other payloads.
pub fn below(a: &TValue, b: &TValue) -> bool {
    match (a, b) {
        (TValue::Set(x), TValue::Set(y)) => x.is_subset(y),
        (TValue::Bag(x), TValue::Bag(y)) => x.iter().all(|(k, n)| y.get(k).is_some_and(|m| n <= m)),
        _ => a == b,
    }
}
