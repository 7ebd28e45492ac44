//! Database schemas as finite category presentations.
//!
//! ```text
//! schema Company
//! object Employee
//! object Department
//! arrow worksIn : Employee -> Department
//! arrow secretary : Department -> Employee
//! eq Department.secretary.worksIn = Department
//! ```
//!
//! Path equivalences are kept as generating pairs; no congruence closure is
//! computed. `attr` lines (`attr name : Obj -> Datatype`) name datatype
//! columns; they are carried through parsing and rendering but take no part
//! in path evaluation.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::ident::is_ident;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub name: String,
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Attribute {
    pub name: String,
    pub src: String,
    pub datatype: String,
}

/// A source object followed by a (possibly empty) arrow sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub src: String,
    pub arrows: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: Path,
    pub rhs: Path,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Schema {
    pub name: String,
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    equations: Vec<Equation>,
    attributes: Vec<Attribute>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("path {path} is not composable at `{arrow}`: expected an arrow out of `{expected}`")]
    NotComposable { path: String, arrow: String, expected: String },
    #[error("`{0}` is not a valid identifier")]
    BadIdent(String),
    #[error("`{0}` is declared twice")]
    Duplicate(String),
    #[error("equation {lhs} = {rhs} relates paths that are not parallel")]
    NotParallel { lhs: String, rhs: String },
}

impl Path {
    pub fn identity(obj: &str) -> Path {
        Path { src: obj.to_string(), arrows: Vec::new() }
    }

    /// Parses `Obj.f.g` without checking it against a schema.
    pub fn parse(text: &str) -> Result<Path, SchemaError> {
        let mut parts = text.trim().split('.');
        let src = parts.next().unwrap_or_default();
        if !is_ident(src) {
            return Err(SchemaError::BadIdent(src.to_string()));
        }
        let arrows = parts
            .map(|a| if is_ident(a) { Ok(a.to_string()) } else { Err(SchemaError::BadIdent(a.to_string())) })
            .collect::<Result<_, _>>()?;
        Ok(Path { src: src.to_string(), arrows })
    }

    /// `self` followed by `other`; does not check composability.
    pub fn concat(&self, other: &Path) -> Path {
        let mut arrows = self.arrows.clone();
        arrows.extend(other.arrows.iter().cloned());
        Path { src: self.src.clone(), arrows }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.src)?;
        for a in &self.arrows {
            write!(f, ".{a}")?;
        }
        Ok(())
    }
}

impl Schema {
    /// Builds a schema from parts, checking every invariant.
    pub fn new(
        name: &str,
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        equations: Vec<Equation>,
        attributes: Vec<Attribute>,
    ) -> Result<Schema, SchemaError> {
        let schema = Schema { name: name.to_string(), objects, arrows, equations, attributes };
        schema.check()?;
        Ok(schema)
    }

    fn check(&self) -> Result<(), SchemaError> {
        if !is_ident(&self.name) {
            return Err(SchemaError::BadIdent(self.name.clone()));
        }
        let mut seen = BTreeSet::new();
        for o in &self.objects {
            if !is_ident(o) {
                return Err(SchemaError::BadIdent(o.clone()));
            }
            if !seen.insert(o.as_str()) {
                return Err(SchemaError::Duplicate(o.clone()));
            }
        }
        let mut names = BTreeSet::new();
        for a in &self.arrows {
            if !is_ident(&a.name) {
                return Err(SchemaError::BadIdent(a.name.clone()));
            }
            if !names.insert(a.name.as_str()) {
                return Err(SchemaError::Duplicate(a.name.clone()));
            }
            self.expect_object(&a.src)?;
            self.expect_object(&a.dst)?;
        }
        for at in &self.attributes {
            if !is_ident(&at.name) || !is_ident(&at.datatype) {
                return Err(SchemaError::BadIdent(format!("{} : {}", at.name, at.datatype)));
            }
            if !names.insert(at.name.as_str()) {
                return Err(SchemaError::Duplicate(at.name.clone()));
            }
            self.expect_object(&at.src)?;
        }
        for eq in &self.equations {
            self.check_equation(eq)?;
        }
        Ok(())
    }

    fn check_equation(&self, eq: &Equation) -> Result<(), SchemaError> {
        let l = self.path_dst(&eq.lhs)?;
        let r = self.path_dst(&eq.rhs)?;
        if eq.lhs.src != eq.rhs.src || l != r {
            return Err(SchemaError::NotParallel { lhs: eq.lhs.to_string(), rhs: eq.rhs.to_string() });
        }
        Ok(())
    }

    fn expect_object(&self, o: &str) -> Result<(), SchemaError> {
        if self.has_object(o) {
            Ok(())
        } else {
            Err(SchemaError::UnknownObject(o.to_string()))
        }
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn has_object(&self, o: &str) -> bool {
        self.objects.iter().any(|x| x == o)
    }

    pub fn arrow(&self, name: &str) -> Option<&Arrow> {
        self.arrows.iter().find(|a| a.name == name)
    }

    /// Arrows out of `obj`, in declaration order.
    pub fn arrows_from<'a>(&'a self, obj: &'a str) -> impl Iterator<Item = &'a Arrow> + 'a {
        self.arrows.iter().filter(move |a| a.src == obj)
    }

    /// Codomain of a path; the identity path ends where it starts.
    pub fn path_dst(&self, path: &Path) -> Result<String, SchemaError> {
        self.expect_object(&path.src)?;
        let mut at = path.src.as_str();
        for name in &path.arrows {
            let arrow = self.arrow(name).ok_or_else(|| SchemaError::UnknownArrow(name.clone()))?;
            if arrow.src != at {
                return Err(SchemaError::NotComposable {
                    path: path.to_string(),
                    arrow: name.clone(),
                    expected: at.to_string(),
                });
            }
            at = &arrow.dst;
        }
        Ok(at.to_string())
    }

    /// Parses `Obj.f.g` and checks it is well typed here.
    pub fn parse_path(&self, text: &str) -> Result<Path, SchemaError> {
        let path = Path::parse(text)?;
        self.path_dst(&path)?;
        Ok(path)
    }

    /// The opposite presentation: arrows reversed, equation paths read
    /// backwards from their common target. The name is kept.
    pub fn opposite(&self) -> Schema {
        let arrows = self
            .arrows
            .iter()
            .map(|a| Arrow { name: a.name.clone(), src: a.dst.clone(), dst: a.src.clone() })
            .collect();
        let reverse = |p: &Path| Path {
            src: self.path_dst(p).expect("equations are checked at construction"),
            arrows: p.arrows.iter().rev().cloned().collect(),
        };
        let equations =
            self.equations.iter().map(|eq| Equation { lhs: reverse(&eq.lhs), rhs: reverse(&eq.rhs) }).collect();
        Schema {
            name: self.name.clone(),
            objects: self.objects.clone(),
            arrows,
            equations,
            attributes: self.attributes.clone(),
        }
    }

    /// `(object, arrow)` when the schema is the one-object, one-endo-arrow
    /// loop, whatever the names.
    pub fn as_loop(&self) -> Option<(&str, &str)> {
        match (self.objects.as_slice(), self.arrows.as_slice()) {
            ([o], [a]) if a.src == *o && a.dst == *o => Some((o, &a.name)),
            _ => None,
        }
    }

    pub fn parse(text: &str) -> Result<Schema, SchemaError> {
        Parser::default().run(text)
    }

    pub fn render(&self) -> String {
        let mut out = format!("schema {}\n", self.name);
        for o in &self.objects {
            out.push_str(&format!("object {o}\n"));
        }
        for a in &self.arrows {
            out.push_str(&format!("arrow {} : {} -> {}\n", a.name, a.src, a.dst));
        }
        for at in &self.attributes {
            out.push_str(&format!("attr {} : {} -> {}\n", at.name, at.src, at.datatype));
        }
        for eq in &self.equations {
            out.push_str(&format!("eq {} = {}\n", eq.lhs, eq.rhs));
        }
        out
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

// A token with its 1-based column.
type Tok<'a> = (usize, &'a str);

fn tokens(line: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        let sep = c.is_whitespace() || c == ':' || c == '=';
        match (sep, start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
        if c == ':' || c == '=' {
            out.push((i + 1, &line[i..i + 1]));
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

#[derive(Default)]
struct Parser {
    name: Option<String>,
    objects: Vec<(String, usize, usize)>,
    arrows: Vec<(Arrow, usize, usize)>,
    attributes: Vec<(Attribute, usize, usize)>,
    equations: Vec<(Equation, usize, usize)>,
}

fn err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError::Parse { line, column, message: message.into() })
}

fn ident_at(line: usize, tok: Tok<'_>) -> Result<String, SchemaError> {
    if is_ident(tok.1) {
        Ok(tok.1.to_string())
    } else {
        err(line, tok.0, format!("`{}` is not a valid identifier", tok.1))
    }
}

impl Parser {
    fn run(mut self, text: &str) -> Result<Schema, SchemaError> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let toks = tokens(content);
            let Some(&(col, keyword)) = toks.first() else { continue };
            if self.name.is_none() && keyword != "schema" {
                return err(line, col, "expected `schema <Name>` header");
            }
            match keyword {
                "schema" => self.header(line, &toks)?,
                "object" => self.object(line, &toks)?,
                "arrow" => self.arrow(line, &toks)?,
                "attr" => self.attr(line, &toks)?,
                "eq" => self.equation(line, &toks)?,
                other => return err(line, col, format!("unknown declaration `{other}`")),
            }
        }
        let Some(name) = self.name.take() else {
            return err(1, 1, "expected `schema <Name>` header");
        };
        self.finish(name)
    }

    fn header(&mut self, line: usize, toks: &[Tok<'_>]) -> Result<(), SchemaError> {
        if self.name.is_some() {
            return err(line, toks[0].0, "second `schema` header");
        }
        match toks {
            [_, name] => {
                self.name = Some(ident_at(line, *name)?);
                Ok(())
            }
            _ => err(line, toks[0].0, "expected `schema <Name>`"),
        }
    }

    fn object(&mut self, line: usize, toks: &[Tok<'_>]) -> Result<(), SchemaError> {
        match toks {
            [_, name] => {
                let name_s = ident_at(line, *name)?;
                if self.objects.iter().any(|(o, ..)| *o == name_s) {
                    return err(line, name.0, format!("object `{name_s}` is declared twice"));
                }
                self.objects.push((name_s, line, name.0));
                Ok(())
            }
            _ => err(line, toks[0].0, "expected `object <Name>`"),
        }
    }

    // `<kw> name : A -> B`
    fn typed<'a>(line: usize, toks: &[Tok<'a>], what: &str) -> Result<[Tok<'a>; 3], SchemaError> {
        match toks {
            [_, name, (_, ":"), src, (_, "->"), dst] => Ok([*name, *src, *dst]),
            _ => err(line, toks[0].0, format!("expected `{what} <name> : <Obj> -> <Obj>`")),
        }
    }

    fn arrow(&mut self, line: usize, toks: &[Tok<'_>]) -> Result<(), SchemaError> {
        let [name, src, dst] = Self::typed(line, toks, "arrow")?;
        let arrow = Arrow { name: ident_at(line, name)?, src: ident_at(line, src)?, dst: ident_at(line, dst)? };
        self.arrows.push((arrow, line, name.0));
        Ok(())
    }

    fn attr(&mut self, line: usize, toks: &[Tok<'_>]) -> Result<(), SchemaError> {
        let [name, src, ty] = Self::typed(line, toks, "attr")?;
        let attr = Attribute { name: ident_at(line, name)?, src: ident_at(line, src)?, datatype: ident_at(line, ty)? };
        self.attributes.push((attr, line, name.0));
        Ok(())
    }

    fn equation(&mut self, line: usize, toks: &[Tok<'_>]) -> Result<(), SchemaError> {
        let (lhs, rhs) = match toks {
            [_, lhs, (_, "="), rhs] => (*lhs, *rhs),
            _ => return err(line, toks[0].0, "expected `eq <Path> = <Path>`"),
        };
        let parse = |tok: Tok<'_>| {
            Path::parse(tok.1).or_else(|e| err(line, tok.0, format!("bad path `{}`: {e}", tok.1)))
        };
        let eq = Equation { lhs: parse(lhs)?, rhs: parse(rhs)? };
        self.equations.push((eq, line, lhs.0));
        Ok(())
    }

    // Cross-reference checks happen after all lines are read, so
    // declarations may come in any order.
    fn finish(self, name: String) -> Result<Schema, SchemaError> {
        let mut schema = Schema {
            name,
            objects: self.objects.into_iter().map(|(o, ..)| o).collect(),
            arrows: Vec::new(),
            equations: Vec::new(),
            attributes: Vec::new(),
        };
        let mut names = BTreeSet::new();
        for (a, line, col) in self.arrows {
            if !names.insert(a.name.clone()) {
                return err(line, col, format!("arrow `{}` is declared twice", a.name));
            }
            for o in [&a.src, &a.dst] {
                if !schema.has_object(o) {
                    return err(line, col, format!("arrow `{}` uses unknown object `{o}`", a.name));
                }
            }
            schema.arrows.push(a);
        }
        for (at, line, col) in self.attributes {
            if !names.insert(at.name.clone()) {
                return err(line, col, format!("`{}` is declared twice", at.name));
            }
            if !schema.has_object(&at.src) {
                return err(line, col, format!("attribute `{}` uses unknown object `{}`", at.name, at.src));
            }
            schema.attributes.push(at);
        }
        for (eq, line, col) in self.equations {
            if let Err(e) = schema.check_equation(&eq) {
                return err(line, col, e.to_string());
            }
            schema.equations.push(eq);
        }
        Ok(schema)
    }
}
