//! Kleisli instances stored as tables.
//!
//! ```text
//! instance markov over Loop
//! monad dist
//! table s
//! id | f
//! 1  | 1/2 1 + 1/2 2
//! 2  | 1 2
//! ```
//!
//! Every object gets a row set (tables left out of the file are empty) and
//! every arrow `f : c -> d` a column on `c` whose cells are values of the
//! instance's monad over the rows of `d`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use indexmap::IndexSet;
use thiserror::Error;

use crate::ident::is_ident;
use crate::monad::{Id, MonadError, MonadTag, TValue};
use crate::schema::{Path, Schema, SchemaError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    schema: Arc<Schema>,
    tag: MonadTag,
    rows: BTreeMap<String, IndexSet<Id>>,
    columns: BTreeMap<String, BTreeMap<Id, TValue>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: cell {table}.{column} row {id}: {source}")]
    Cell { line: usize, table: String, column: String, id: Id, source: MonadError },
    #[error("instance is over `{found}` but the schema is `{expected}`")]
    WrongSchema { expected: String, found: String },
    #[error("{0}")]
    Schema(#[from] SchemaError),
    #[error("{0}")]
    Monad(#[from] MonadError),
    #[error("`{id}` is not a row of {table}")]
    UnknownRow { table: String, id: Id },
    #[error("instance is not valid:\n{0}")]
    Invalid(ValidationReport),
    #[error("expected monad `{expected}`, found `{found}`")]
    WrongMonad { expected: String, found: String },
}

/// One finding of [`Instance::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// No cell in column `arrow` for row `id`.
    Missing { arrow: String, id: Id },
    /// The cell refers to `target`, which is not a row of the arrow's target.
    Dangling { arrow: String, id: Id, table: String, target: Id },
    /// The cell is not a canonical value of the instance's monad.
    BadCell { arrow: String, id: Id, error: MonadError },
    /// The two sides of an equation evaluate differently at `id`.
    Equation { lhs: Path, rhs: Path, id: Id, left: String, right: String },
    /// An equation side could not be evaluated (follows from an earlier finding).
    Unevaluable { path: Path, id: Id, error: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Missing { arrow, id } => write!(f, "totality: column {arrow} has no value for row {id}"),
            Violation::Dangling { arrow, id, table, target } => write!(
                f,
                "referential integrity: {arrow} at row {id} refers to {target}, which is not a row of {table}"
            ),
            Violation::BadCell { arrow, id, error } => write!(f, "bad cell: {arrow} at row {id}: {error}"),
            Violation::Equation { lhs, rhs, id, left, right } => {
                write!(f, "path equivalence {lhs} = {rhs} fails at {} row {id}: {left} vs {right}", lhs.src)
            }
            Violation::Unevaluable { path, id, error } => write!(f, "cannot evaluate {path} at row {id}: {error}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn equation_failures(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| matches!(v, Violation::Equation { .. }))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "valid");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

impl Instance {
    /// An instance with every table empty.
    pub fn empty(name: &str, schema: Arc<Schema>, tag: MonadTag) -> Instance {
        let rows = schema.objects().iter().map(|o| (o.clone(), IndexSet::new())).collect();
        let columns = schema.arrows().iter().map(|a| (a.name.clone(), BTreeMap::new())).collect();
        Instance { name: name.to_string(), schema, tag, rows, columns }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn schema_arc(&self) -> Arc<Schema> {
        Arc::clone(&self.schema)
    }

    pub fn tag(&self) -> &MonadTag {
        &self.tag
    }

    /// Rows of `obj` in insertion order; empty for unknown objects.
    pub fn rows(&self, obj: &str) -> impl Iterator<Item = &Id> {
        self.rows.get(obj).into_iter().flatten()
    }

    pub fn row_count(&self, obj: &str) -> usize {
        self.rows.get(obj).map_or(0, IndexSet::len)
    }

    pub fn has_row(&self, obj: &str, id: &str) -> bool {
        self.rows.get(obj).is_some_and(|r| r.contains(id))
    }

    /// `delta(arrow)(id)`.
    pub fn cell(&self, arrow: &str, id: &str) -> Option<&TValue> {
        self.columns.get(arrow)?.get(id)
    }

    pub fn column(&self, arrow: &str) -> Option<&BTreeMap<Id, TValue>> {
        self.columns.get(arrow)
    }

    /// Adds a row; returns false if it was already present.
    pub fn insert_row(&mut self, obj: &str, id: &str) -> Result<bool, InstanceError> {
        if !is_ident(id) {
            return Err(SchemaError::BadIdent(id.to_string()).into());
        }
        let rows = self.rows.get_mut(obj).ok_or_else(|| SchemaError::UnknownObject(obj.to_string()))?;
        Ok(rows.insert(id.to_string()))
    }

    /// Sets a cell after checking its shape against the monad; referential
    /// integrity is left to [`Instance::validate`].
    pub fn set_cell(&mut self, arrow: &str, id: &str, value: TValue) -> Result<(), InstanceError> {
        self.tag.check(&value)?;
        let column = self.columns.get_mut(arrow).ok_or_else(|| SchemaError::UnknownArrow(arrow.to_string()))?;
        column.insert(id.to_string(), value);
        Ok(())
    }

    /// Same rows, new monad, every cell replaced by `f(cell)`.
    pub fn map_cells<F>(&self, name: &str, tag: MonadTag, mut f: F) -> Result<Instance, InstanceError>
    where
        F: FnMut(&TValue) -> Result<TValue, MonadError>,
    {
        let mut columns = BTreeMap::new();
        for (arrow, column) in &self.columns {
            let mut out = BTreeMap::new();
            for (id, v) in column {
                let image = f(v)?;
                tag.check(&image)?;
                out.insert(id.clone(), image);
            }
            columns.insert(arrow.clone(), out);
        }
        Ok(Instance { name: name.to_string(), schema: self.schema_arc(), tag, rows: self.rows.clone(), columns })
    }

    /// Evaluates a path at a row: the Kleisli extension of each column in
    /// turn, starting from the unit.
    pub fn eval_path(&self, path: &Path, id: &str) -> Result<TValue, InstanceError> {
        self.schema.path_dst(path)?;
        if !self.has_row(&path.src, id) {
            return Err(InstanceError::UnknownRow { table: path.src.clone(), id: id.to_string() });
        }
        let mut value = self.tag.unit(id);
        for arrow in &path.arrows {
            let column = &self.columns[arrow];
            value = self.tag.extend(&value, |y| column.get(y).cloned())?;
        }
        Ok(value)
    }

    /// Totality, referential integrity, monad membership of every cell, and
    /// every generating equation at every row of its source table.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for arrow in self.schema.arrows() {
            let column = &self.columns[&arrow.name];
            for id in self.rows(&arrow.src) {
                let Some(v) = column.get(id) else {
                    violations.push(Violation::Missing { arrow: arrow.name.clone(), id: id.clone() });
                    continue;
                };
                if let Err(error) = self.tag.check(v) {
                    violations.push(Violation::BadCell { arrow: arrow.name.clone(), id: id.clone(), error });
                    continue;
                }
                let mut reported = BTreeSet::new();
                for target in v.ids() {
                    if !self.has_row(&arrow.dst, target) && reported.insert(target) {
                        violations.push(Violation::Dangling {
                            arrow: arrow.name.clone(),
                            id: id.clone(),
                            table: arrow.dst.clone(),
                            target: target.clone(),
                        });
                    }
                }
            }
            // cells for ids that are not rows are reported as dangling rows of the source table
            for id in column.keys() {
                if !self.has_row(&arrow.src, id) {
                    violations.push(Violation::Dangling {
                        arrow: arrow.name.clone(),
                        id: id.clone(),
                        table: arrow.src.clone(),
                        target: id.clone(),
                    });
                }
            }
        }
        let structural = !violations.is_empty();
        for eq in self.schema.equations() {
            for id in self.rows(&eq.lhs.src) {
                let eval = |p: &Path| self.eval_path(p, id).map_err(|e| Violation::Unevaluable {
                    path: p.clone(),
                    id: id.clone(),
                    error: e.to_string(),
                });
                match (eval(&eq.lhs), eval(&eq.rhs)) {
                    (Ok(l), Ok(r)) if l == r => {}
                    (Ok(l), Ok(r)) => violations.push(Violation::Equation {
                        lhs: eq.lhs.clone(),
                        rhs: eq.rhs.clone(),
                        id: id.clone(),
                        left: l.to_string(),
                        right: r.to_string(),
                    }),
                    (Err(e), _) | (_, Err(e)) => {
                        if !structural {
                            violations.push(e);
                        }
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    /// Preimage instance over the opposite schema: for `f : c' -> c` and a
    /// row `x` of `c`, the new `f` column holds `{y | f(y) = x}`.
    pub fn invert(&self) -> Result<Instance, InstanceError> {
        if self.tag != MonadTag::Atomic {
            return Err(InstanceError::WrongMonad {
                expected: MonadTag::Atomic.to_string(),
                found: self.tag.to_string(),
            });
        }
        let report = self.validate();
        if !report.is_valid() {
            return Err(InstanceError::Invalid(report));
        }
        let mut out = Instance::empty(&format!("{}_inverted", self.name), Arc::new(self.schema.opposite()), MonadTag::PowerSet);
        out.rows = self.rows.clone();
        for arrow in self.schema.arrows() {
            let mut pre: BTreeMap<Id, BTreeSet<Id>> =
                self.rows(&arrow.dst).map(|x| (x.clone(), BTreeSet::new())).collect();
            for y in self.rows(&arrow.src) {
                if let Some(TValue::Atomic(x)) = self.cell(&arrow.name, y) {
                    pre.entry(x.clone()).or_default().insert(y.clone());
                }
            }
            out.columns.insert(arrow.name.clone(), pre.into_iter().map(|(x, s)| (x, TValue::Set(s))).collect());
        }
        Ok(out)
    }

    /// Parses without the totality and referential-integrity gate.
    pub fn parse_unchecked(schema: Arc<Schema>, text: &str) -> Result<Instance, InstanceError> {
        InstanceParser::new(schema).run(text)
    }

    /// Parses and rejects instances that are not total or refer to missing
    /// rows. Path equivalences are checked by [`Instance::validate`].
    pub fn parse(schema: Arc<Schema>, text: &str) -> Result<Instance, InstanceError> {
        let inst = Self::parse_unchecked(schema, text)?;
        let structural: Vec<Violation> = inst
            .validate()
            .violations
            .into_iter()
            .filter(|v| !matches!(v, Violation::Equation { .. } | Violation::Unevaluable { .. }))
            .collect();
        if structural.is_empty() {
            Ok(inst)
        } else {
            Err(InstanceError::Invalid(ValidationReport { violations: structural }))
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!("instance {} over {}\nmonad {}\n", self.name, self.schema.name, self.tag);
        for obj in self.schema.objects() {
            if self.row_count(obj) == 0 {
                continue;
            }
            let arrows: Vec<&str> = self.schema.arrows_from(obj).map(|a| a.name.as_str()).collect();
            out.push_str(&format!("\ntable {obj}\n"));
            let mut header = vec!["id"];
            header.extend(&arrows);
            out.push_str(&header.join(" | "));
            out.push('\n');
            for id in self.rows(obj) {
                let mut line = vec![id.clone()];
                for a in &arrows {
                    line.push(self.cell(a, id).map(ToString::to_string).unwrap_or_default());
                }
                out.push_str(&line.join(" | "));
                out.push('\n');
            }
        }
        out
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

struct InstanceParser {
    schema: Arc<Schema>,
}

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T, InstanceError> {
    Err(InstanceError::Parse { line, message: message.into() })
}

impl InstanceParser {
    fn new(schema: Arc<Schema>) -> Self {
        InstanceParser { schema }
    }

    fn run(self, text: &str) -> Result<Instance, InstanceError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (n, header) = lines.next().map_or((1, ""), |x| x);
        let name = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["instance", name, "over", schema_name] => {
                if *schema_name != self.schema.name {
                    return Err(InstanceError::WrongSchema {
                        expected: self.schema.name.clone(),
                        found: schema_name.to_string(),
                    });
                }
                if !is_ident(name) {
                    return parse_err(n, format!("`{name}` is not a valid instance name"));
                }
                name.to_string()
            }
            _ => return parse_err(n, "expected `instance <name> over <Schema>`"),
        };
        let (n, monad_line) = lines.next().ok_or(InstanceError::Parse { line: n, message: "missing `monad` line".into() })?;
        let tag: MonadTag = match monad_line.strip_prefix("monad") {
            Some(rest) if rest.starts_with(char::is_whitespace) => {
                rest.parse().or_else(|e: MonadError| parse_err(n, e.to_string()))?
            }
            _ => return parse_err(n, "expected `monad <tag>`"),
        };

        let mut inst = Instance::empty(&name, Arc::clone(&self.schema), tag);
        let mut seen_tables = BTreeSet::new();
        // current table and its column order (None for the id column)
        let mut current: Option<(String, Vec<String>)> = None;
        let mut expect_header = false;
        for (n, line) in lines {
            if let Some(obj) = line.strip_prefix("table ") {
                let obj = obj.trim();
                if !self.schema.has_object(obj) {
                    return parse_err(n, format!("unknown table `{obj}`"));
                }
                if !seen_tables.insert(obj.to_string()) {
                    return parse_err(n, format!("table `{obj}` appears twice"));
                }
                current = Some((obj.to_string(), Vec::new()));
                expect_header = true;
                continue;
            }
            let Some((obj, columns)) = current.as_mut() else {
                return parse_err(n, "expected `table <Obj>`");
            };
            let cells: Vec<&str> = line.split('|').map(str::trim).collect();
            if expect_header {
                expect_header = false;
                if cells[0] != "id" {
                    return parse_err(n, "table header must start with `id`");
                }
                let expected: BTreeSet<&str> = self.schema.arrows_from(obj).map(|a| a.name.as_str()).collect();
                for c in &cells[1..] {
                    if !expected.contains(c) {
                        return parse_err(n, format!("unknown column `{c}` in table {obj}"));
                    }
                    if columns.iter().any(|x| x == c) {
                        return parse_err(n, format!("column `{c}` appears twice"));
                    }
                    columns.push(c.to_string());
                }
                if let Some(missing) = expected.iter().find(|a| !columns.iter().any(|c| c == *a)) {
                    return parse_err(n, format!("table {obj} is missing column `{missing}`"));
                }
                continue;
            }
            if cells.len() != columns.len() + 1 {
                return parse_err(n, format!("expected {} cells, found {}", columns.len() + 1, cells.len()));
            }
            let id = cells[0];
            if !is_ident(id) {
                return parse_err(n, format!("`{id}` is not a valid row id"));
            }
            if !inst.insert_row(obj, id)? {
                return parse_err(n, format!("row `{id}` appears twice in table {obj}"));
            }
            for (column, text) in columns.iter().zip(&cells[1..]) {
                let value = inst.tag.parse_value(text).map_err(|source| InstanceError::Cell {
                    line: n,
                    table: obj.clone(),
                    column: column.clone(),
                    id: id.to_string(),
                    source,
                })?;
                inst.columns.get_mut(column).expect("column declared in schema").insert(id.to_string(), value);
            }
        }
        if expect_header {
            if let Some((obj, _)) = current {
                return parse_err(text.lines().count(), format!("table {obj} has no header"));
            }
        }
        Ok(inst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn loop_schema() -> Arc<Schema> {
        Arc::new(Schema::parse("schema Loop\nobject s\narrow f : s -> s\n").unwrap())
    }

    const MARKOV: &str = "\
instance markov over Loop
monad dist
table s
id | f
1 | .5 1 + .5 2
2 | 1 2
3 | .7 1 + .3 3
4 | .4 1 + .3 2 + .3 4
";

    #[test]
    fn markov_two_steps() {
        let inst = Instance::parse(loop_schema(), MARKOV).unwrap();
        let p = Path::parse("s.f.f").unwrap();
        let v = inst.eval_path(&p, "1").unwrap();
        assert_eq!(
            v,
            TValue::Dist(BTreeMap::from([("1".into(), ratio(1, 4)), ("2".into(), ratio(3, 4))]))
        );
        assert_eq!(inst.tag().render(&inst.eval_path(&p, "3").unwrap()).unwrap(), "14/25 1 + 7/20 2 + 9/100 3");
    }

    #[test]
    fn identity_path_is_unit() {
        let inst = Instance::parse(loop_schema(), MARKOV).unwrap();
        assert_eq!(inst.eval_path(&Path::identity("s"), "4").unwrap(), MonadTag::Dist.unit("4"));
        assert!(matches!(inst.eval_path(&Path::identity("s"), "9"), Err(InstanceError::UnknownRow { .. })));
    }

    #[test]
    fn render_round_trips_exact_rationals() {
        let inst = Instance::parse(loop_schema(), MARKOV).unwrap();
        let text = inst.render();
        assert!(text.contains("1 | 1/2 1 + 1/2 2"), "{text}");
        assert_eq!(Instance::parse(loop_schema(), &text).unwrap(), inst);
    }

    #[test]
    fn empty_instance_renders_header_only() {
        let inst = Instance::empty("nothing", loop_schema(), MonadTag::List);
        assert_eq!(inst.render(), "instance nothing over Loop\nmonad list\n");
        assert_eq!(Instance::parse(loop_schema(), &inst.render()).unwrap(), inst);
        assert!(inst.validate().is_valid());
    }

    #[test]
    fn dangling_reference_names_the_cell() {
        let text = "instance t over Loop\nmonad list\ntable s\nid | f\na | [b, z]\nb | []\n";
        let err = Instance::parse(loop_schema(), text).unwrap_err();
        let InstanceError::Invalid(report) = err else { panic!("{err}") };
        assert_eq!(
            report.violations,
            vec![Violation::Dangling { arrow: "f".into(), id: "a".into(), table: "s".into(), target: "z".into() }]
        );
    }

    #[test]
    fn parse_errors() {
        let s = loop_schema();
        let bad = |t: &str| Instance::parse(Arc::clone(&s), t).unwrap_err();
        assert!(matches!(bad("instance t over Other\nmonad list\n"), InstanceError::WrongSchema { .. }));
        assert!(matches!(bad("instance t over Loop\nmonad stack\n"), InstanceError::Parse { line: 2, .. }));
        assert!(matches!(bad("instance t over Loop\nmonad list\ntable q\n"), InstanceError::Parse { line: 3, .. }));
        assert!(matches!(bad("instance t over Loop\nmonad list\ntable s\nid\na\n"), InstanceError::Parse { line: 4, .. }));
        assert!(matches!(
            bad("instance t over Loop\nmonad list\ntable s\nid | f | g\n"),
            InstanceError::Parse { line: 4, .. }
        ));
        assert!(matches!(
            bad("instance t over Loop\nmonad list\ntable s\nid | f\na | [a\n"),
            InstanceError::Cell { line: 5, .. }
        ));
        assert!(matches!(
            bad("instance t over Loop\nmonad list\ntable s\nid | f\na | [a]\na | []\n"),
            InstanceError::Parse { line: 6, .. }
        ));
    }

    #[test]
    fn inversion_requires_atomic() {
        let inst = Instance::parse(loop_schema(), MARKOV).unwrap();
        assert!(matches!(inst.invert(), Err(InstanceError::WrongMonad { .. })));
    }

    #[test]
    fn bijection_inverts_to_singletons() {
        let text = "instance t over Loop\nmonad atomic\ntable s\nid | f\na | b\nb | c\nc | a\n";
        let inv = Instance::parse(loop_schema(), text).unwrap().invert().unwrap();
        for x in ["a", "b", "c"] {
            let TValue::Set(s) = inv.cell("f", x).unwrap() else { panic!() };
            assert_eq!(s.len(), 1);
        }
        assert_eq!(inv.cell("f", "a"), Some(&TValue::Set(BTreeSet::from(["c".to_string()]))));
        assert!(inv.validate().is_valid());
    }
}
