//! Text forms of tags and values.
//!
//! Values:
//!
//! ```text
//! atomic     a                 powerset   {a, b}
//! unlinked   *                 list       [a, b]
//! multiset   {a, a, b}         dist       1/2 a + 1/2 b
//! exc        a   or  !label    listexc    [a, !Int]
//! inp        u1: a; u2: b      annot      (w1 w2) a   /  (3/4) a
//! tur        0: (W1) q0; 1: (L) !Halt
//! vect       3/2 a - 1 b       poly       2 a.a.b + 1 c
//! ```
//!
//! Tags: `atomic`, `unlinked`, `powerset`, `powerset+`, `list`, `list+`,
//! `multiset`, `dist`, `exc {l1,l2}`, `listexc {String,Int}`, `inp {0,1}`,
//! `annot <monoid>`, `tur inputs{0,1} <monoid>`, `vect`, `poly`, `poly-nc`,
//! where `<monoid>` is `gens{a,b}`, `mul`, `add`, or
//! `table{e,a} unit{e} products{e,a;a,e}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num::{Signed, Zero};

use super::{Entry, FiniteMonoid, Id, MonadError, MonadTag, Monoid, MonoidElem, Step, TValue};
use crate::ident::is_ident;
use crate::rational::{parse_rational, render_rational, Rational};

type Result<T> = std::result::Result<T, MonadError>;

const HALT: &str = "!Halt";

fn syntax<T>(msg: impl Into<String>) -> Result<T> {
    Err(MonadError::Syntax(msg.into()))
}

fn ident(text: &str) -> Result<Id> {
    let text = text.trim();
    if is_ident(text) {
        Ok(text.to_string())
    } else {
        syntax(format!("`{text}` is not a valid identifier"))
    }
}

fn entry(text: &str) -> Result<Entry> {
    let text = text.trim();
    match text.strip_prefix('!') {
        Some(label) => Ok(Entry::Label(ident(label)?)),
        None => Ok(Entry::Id(ident(text)?)),
    }
}

fn render_entry(e: &Entry) -> String {
    match e {
        Entry::Id(x) => x.clone(),
        Entry::Label(l) => format!("!{l}"),
    }
}

/// Items between `open` and `close`, comma separated; `{}` is empty.
fn bracketed<'a>(text: &'a str, open: char, close: char) -> Result<Vec<&'a str>> {
    let text = text.trim();
    let body = text
        .strip_prefix(open)
        .and_then(|t| t.strip_suffix(close))
        .ok_or_else(|| MonadError::Syntax(format!("expected `{open}...{close}`, found `{text}`")))?;
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    Ok(body.split(',').map(str::trim).collect())
}

/// `u1: a; u2: b`, or `{}` for the empty map.
fn keyed_entries(text: &str) -> Result<Vec<(String, &str)>> {
    let text = text.trim();
    if text == "{}" || text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|part| {
            let (k, v) = part
                .split_once(':')
                .ok_or_else(|| MonadError::Syntax(format!("expected `input: value`, found `{}`", part.trim())))?;
            Ok((ident(k)?, v.trim()))
        })
        .collect()
}

/// `(elem) rest` -> (elem, rest). A missing annotation means the identity.
fn annotated<'a>(monoid: &Monoid, text: &'a str) -> Result<(MonoidElem, &'a str)> {
    let text = text.trim();
    match text.strip_prefix('(') {
        Some(rest) => {
            let (inside, after) = rest
                .split_once(')')
                .ok_or_else(|| MonadError::Syntax(format!("unclosed `(` in `{text}`")))?;
            Ok((monoid.parse_elem(inside)?, after.trim()))
        }
        None => Ok((monoid.identity(), text)),
    }
}

/// Signed terms `c x (+|-) c x ...`; a term with a single token is returned
/// with `None` as its target.
fn linear_terms(text: &str) -> Result<Vec<(Rational, Option<&str>)>> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return syntax("empty linear combination");
    }
    let mut terms = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut negative = false;
        if !terms.is_empty() {
            match tokens[i] {
                "+" => {}
                "-" => negative = true,
                t => return syntax(format!("expected `+` or `-` before `{t}`")),
            }
            i += 1;
        } else if tokens[i] == "-" {
            negative = true;
            i += 1;
        }
        let coeff_text = tokens
            .get(i)
            .ok_or_else(|| MonadError::Syntax("dangling sign at end of expression".into()))?;
        let mut coeff = parse_rational(coeff_text)
            .ok_or_else(|| MonadError::Syntax(format!("`{coeff_text}` is not a coefficient")))?;
        if negative {
            coeff = -coeff;
        }
        i += 1;
        let target = match tokens.get(i) {
            Some(&t) if t != "+" && t != "-" => {
                i += 1;
                Some(t)
            }
            _ => None,
        };
        terms.push((coeff, target));
    }
    Ok(terms)
}

fn render_linear(terms: &BTreeMap<Id, Rational>) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (x, c)) in terms.iter().enumerate() {
        let magnitude = render_rational(&c.abs());
        match (i, c.is_negative()) {
            (0, false) => out.push_str(&format!("{magnitude} {x}")),
            (0, true) => out.push_str(&format!("-{magnitude} {x}")),
            (_, false) => out.push_str(&format!(" + {magnitude} {x}")),
            (_, true) => out.push_str(&format!(" - {magnitude} {x}")),
        }
    }
    out
}

/// Canonical text of a payload. The syntax is unambiguous given the
/// payload, so no tag is needed.
pub(super) fn render_untagged(tv: &TValue) -> String {
    match tv {
        TValue::Atomic(x) => x.clone(),
        TValue::Unlinked => "*".into(),
        TValue::Set(s) => format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(", ")),
        TValue::List(l) => format!("[{}]", l.join(", ")),
        TValue::Bag(b) => {
            let items: Vec<&str> =
                b.iter().flat_map(|(x, n)| std::iter::repeat(x.as_str()).take(*n as usize)).collect();
            format!("{{{}}}", items.join(", "))
        }
        TValue::Dist(d) | TValue::Vect(d) => render_linear(d),
        TValue::Exc(e) => render_entry(e),
        TValue::ListExc(l) => format!("[{}]", l.iter().map(render_entry).collect::<Vec<_>>().join(", ")),
        TValue::Inp(m) => {
            if m.is_empty() {
                return "{}".into();
            }
            m.iter().map(|(u, x)| format!("{u}: {x}")).collect::<Vec<_>>().join("; ")
        }
        TValue::Annot(m, x) => format!("({}) {x}", render_elem(m)),
        TValue::Tur(m) => {
            if m.is_empty() {
                return "{}".into();
            }
            m.iter()
                .map(|(u, (w, s))| {
                    let next = match s {
                        Step::Next(x) => x.as_str(),
                        Step::Halt => HALT,
                    };
                    format!("{u}: ({}) {next}", render_elem(w))
                })
                .collect::<Vec<_>>()
                .join("; ")
        }
        TValue::Poly(p) => {
            if p.is_empty() {
                return "0".into();
            }
            p.iter()
                .map(|(mono, c)| if mono.is_empty() { c.to_string() } else { format!("{c} {}", mono.join(".")) })
                .collect::<Vec<_>>()
                .join(" + ")
        }
    }
}

fn render_elem(e: &MonoidElem) -> String {
    match e {
        MonoidElem::Word(w) => w.join(" "),
        MonoidElem::Named(n) => n.clone(),
        MonoidElem::Number(r) => render_rational(r),
    }
}

impl MonadTag {
    /// Parses a value and validates it against this tag.
    pub fn parse_value(&self, text: &str) -> Result<TValue> {
        let text = text.trim();
        let tv = match self {
            MonadTag::Atomic => TValue::Atomic(ident(text)?),
            MonadTag::Unlinked => {
                if text != "*" {
                    return syntax(format!("unlinked values are written `*`, found `{text}`"));
                }
                TValue::Unlinked
            }
            MonadTag::PowerSet | MonadTag::PowerSetNonempty => TValue::Set(
                bracketed(text, '{', '}')?.into_iter().map(ident).collect::<Result<_>>()?,
            ),
            MonadTag::List | MonadTag::ListNonempty => TValue::List(
                bracketed(text, '[', ']')?.into_iter().map(ident).collect::<Result<_>>()?,
            ),
            MonadTag::Multiset => {
                let mut bag = BTreeMap::new();
                for item in bracketed(text, '{', '}')? {
                    *bag.entry(ident(item)?).or_insert(0) += 1;
                }
                TValue::Bag(bag)
            }
            MonadTag::Dist | MonadTag::Vect => {
                let mut acc: BTreeMap<Id, Rational> = BTreeMap::new();
                let terms = if text == "0" { Vec::new() } else { linear_terms(text)? };
                for (c, target) in terms {
                    let target =
                        target.ok_or_else(|| MonadError::Syntax(format!("coefficient `{}` has no id", render_rational(&c))))?;
                    if matches!(self, MonadTag::Dist) && c.is_negative() {
                        return Err(MonadError::Malformed(format!("negative weight on `{target}`")));
                    }
                    *acc.entry(ident(target)?).or_insert_with(Rational::zero) += c;
                }
                acc.retain(|_, c| !c.is_zero());
                if matches!(self, MonadTag::Dist) {
                    TValue::Dist(acc)
                } else {
                    TValue::Vect(acc)
                }
            }
            MonadTag::Exc(_) => TValue::Exc(entry(text)?),
            MonadTag::ListExc(_) => TValue::ListExc(
                bracketed(text, '[', ']')?.into_iter().map(entry).collect::<Result<_>>()?,
            ),
            MonadTag::Inp(_) => {
                let mut m = BTreeMap::new();
                for (u, x) in keyed_entries(text)? {
                    if m.insert(u.clone(), ident(x)?).is_some() {
                        return syntax(format!("input `{u}` given twice"));
                    }
                }
                TValue::Inp(m)
            }
            MonadTag::Annot(monoid) => {
                let (m, rest) = annotated(monoid, text)?;
                TValue::Annot(m, ident(rest)?)
            }
            MonadTag::Tur { monoid, .. } => {
                let mut m = BTreeMap::new();
                for (u, cell) in keyed_entries(text)? {
                    let (w, rest) = annotated(monoid, cell)?;
                    let step = if rest == HALT { Step::Halt } else { Step::Next(ident(rest)?) };
                    if m.insert(u.clone(), (w, step)).is_some() {
                        return syntax(format!("input `{u}` given twice"));
                    }
                }
                TValue::Tur(m)
            }
            MonadTag::PolyCommutative | MonadTag::PolyNoncommutative => {
                if text == "0" {
                    TValue::Poly(BTreeMap::new())
                } else {
                    let mut acc = BTreeMap::new();
                    for (c, target) in linear_terms(text)? {
                        if !c.is_integer() || c.is_negative() {
                            return Err(MonadError::Malformed(format!(
                                "polynomial coefficients are natural numbers, found `{}`",
                                render_rational(&c)
                            )));
                        }
                        let c: u64 = c
                            .to_integer()
                            .try_into()
                            .map_err(|_| MonadError::Malformed("coefficient too large".into()))?;
                        let mono = match target {
                            None => Vec::new(),
                            Some(t) => t.split('.').map(ident).collect::<Result<Vec<_>>>()?,
                        };
                        *acc.entry(mono).or_insert(0) += c;
                    }
                    self.canonicalize(TValue::Poly(acc))
                }
            }
        };
        self.check(&tv)?;
        Ok(tv)
    }

    /// Canonical text of a value of this monad.
    pub fn render(&self, tv: &TValue) -> Result<String> {
        self.check(tv)?;
        Ok(render_untagged(tv))
    }
}

impl fmt::Display for MonadTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(",");
        match self {
            MonadTag::Exc(labels) => write!(f, "exc {{{}}}", set(labels)),
            MonadTag::ListExc(labels) => write!(f, "listexc {{{}}}", set(labels)),
            MonadTag::Inp(inputs) => write!(f, "inp {{{}}}", set(inputs)),
            MonadTag::Annot(m) => write!(f, "annot {m}"),
            MonadTag::Tur { inputs, monoid } => write!(f, "tur inputs{{{}}} {monoid}", set(inputs)),
            other => f.write_str(other.kind()),
        }
    }
}

/// One parameter of a tag: `name{a,b}`, `{a,b}`, or a bare word.
#[derive(Debug)]
struct Param<'a> {
    key: &'a str,
    group: Option<&'a str>,
}

fn split_params(text: &str) -> Result<Vec<Param<'_>>> {
    let mut params = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'{' {
            i += 1;
        }
        let key = &text[start..i];
        let mut group = None;
        if i < bytes.len() && bytes[i] == b'{' {
            let close = text[i..]
                .find('}')
                .ok_or_else(|| MonadError::Syntax(format!("unclosed `{{` in `{text}`")))?;
            group = Some(&text[i + 1..i + close]);
            i += close + 1;
        }
        params.push(Param { key, group });
    }
    Ok(params)
}

fn name_set(group: &str) -> Result<BTreeSet<String>> {
    let mut out = BTreeSet::new();
    for item in group.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if !out.insert(ident(item)?) {
            return syntax(format!("`{item}` listed twice"));
        }
    }
    Ok(out)
}

fn monoid_from(params: &[Param<'_>]) -> Result<Monoid> {
    let find = |key: &str| params.iter().find(|p| p.key == key);
    if let Some(p) = find("gens") {
        return Ok(Monoid::Free(name_set(p.group.unwrap_or(""))?));
    }
    if find("mul").is_some() {
        return Ok(Monoid::RationalMul);
    }
    if find("add").is_some() {
        return Ok(Monoid::RationalAdd);
    }
    if let Some(p) = find("table") {
        let elements: Vec<String> =
            p.group.unwrap_or("").split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        let unit = find("unit")
            .and_then(|p| p.group)
            .ok_or_else(|| MonadError::Syntax("table monoid needs `unit{..}`".into()))?;
        let products = find("products")
            .and_then(|p| p.group)
            .ok_or_else(|| MonadError::Syntax("table monoid needs `products{..}`".into()))?;
        let rows = products
            .split(';')
            .map(|row| row.split(',').map(|s| s.trim().to_string()).collect())
            .collect();
        return Ok(Monoid::Table(FiniteMonoid::new(elements, unit.trim(), rows)?));
    }
    syntax("expected a monoid: `gens{..}`, `mul`, `add`, or `table{..} unit{..} products{..}`")
}

impl FromStr for MonadTag {
    type Err = MonadError;

    fn from_str(text: &str) -> Result<Self> {
        let params = split_params(text.trim())?;
        let Some((head, rest)) = params.split_first() else {
            return syntax("empty monad tag");
        };
        // `exc{a}` parses as a keyed group; `exc {a}` as a bare group
        let group = head.group.or_else(|| rest.first().filter(|p| p.key.is_empty()).and_then(|p| p.group));
        let labelled = |what: &str| -> Result<BTreeSet<String>> {
            match rest.iter().find(|p| p.key == what).and_then(|p| p.group).or(group) {
                Some(g) => name_set(g),
                None => syntax(format!("`{}` needs a set parameter like `{{a,b}}`", head.key)),
            }
        };
        let tag = match head.key.to_ascii_lowercase().as_str() {
            "atomic" => MonadTag::Atomic,
            "unlinked" => MonadTag::Unlinked,
            "powerset" => MonadTag::PowerSet,
            "powerset+" | "powerset-nonempty" => MonadTag::PowerSetNonempty,
            "list" => MonadTag::List,
            "list+" | "list-nonempty" => MonadTag::ListNonempty,
            "multiset" => MonadTag::Multiset,
            "dist" => MonadTag::Dist,
            "maybe" => MonadTag::maybe(),
            "exc" => MonadTag::Exc(labelled("labels")?),
            "listexc" => MonadTag::ListExc(labelled("labels")?),
            "inp" => MonadTag::Inp(labelled("inputs")?),
            "annot" => MonadTag::Annot(monoid_from(rest)?),
            "tur" => MonadTag::Tur { inputs: labelled("inputs")?, monoid: monoid_from(rest)? },
            "vect" => MonadTag::Vect,
            "poly" => MonadTag::PolyCommutative,
            "poly-nc" => MonadTag::PolyNoncommutative,
            other => return syntax(format!("unknown monad `{other}`")),
        };
        Ok(tag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn tag(s: &str) -> MonadTag {
        s.parse().unwrap()
    }

    #[test]
    fn tag_text_round_trips() {
        for t in [
            "atomic",
            "unlinked",
            "powerset",
            "powerset+",
            "list+",
            "multiset",
            "dist",
            "exc {null}",
            "listexc {Float,Int,String}",
            "inp {0,1}",
            "inp {}",
            "annot gens{a,b}",
            "annot mul",
            "annot add",
            "annot table{e,a} unit{e} products{e,a;a,e}",
            "tur inputs{0,1} gens{L,R,W0,W1}",
            "vect",
            "poly",
            "poly-nc",
        ] {
            assert_eq!(tag(t).to_string(), t);
        }
        assert_eq!(tag("exc{null}"), MonadTag::maybe());
        assert_eq!(tag("maybe"), MonadTag::maybe());
    }

    #[test]
    fn unknown_tag_is_rejected() {
        assert!("stack".parse::<MonadTag>().is_err());
        assert!("exc".parse::<MonadTag>().is_err());
        assert!("annot".parse::<MonadTag>().is_err());
    }

    #[test]
    fn turing_start_row() {
        let t = tag("tur inputs{0,1} gens{L,R,W0,W1}");
        let v = t.parse_value("0: (W1) q0; 1: (W1) q0").unwrap();
        let w1 = MonoidElem::Word(vec!["W1".into()]);
        assert_eq!(
            v,
            TValue::Tur(BTreeMap::from([
                ("0".into(), (w1.clone(), Step::Next("q0".into()))),
                ("1".into(), (w1, Step::Next("q0".into()))),
            ]))
        );
        let halting = t.parse_value("0: (W0) !Halt; 1: (L) q2").unwrap();
        assert_eq!(t.render(&halting).unwrap(), "0: (W0) !Halt; 1: (L) q2");
    }

    #[test]
    fn turing_value_must_be_total() {
        let t = tag("tur inputs{0,1} gens{L,R,W0,W1}");
        assert_eq!(t.parse_value("0: (W1) q0"), Err(MonadError::NotTotal("1".into())));
        assert!(t.parse_value("0: (X) q0; 1: () q0").is_err());
    }

    #[test]
    fn empty_powerset_row() {
        assert_eq!(tag("powerset").parse_value("{}").unwrap(), TValue::Set(BTreeSet::new()));
        assert!(matches!(tag("powerset+").parse_value("{}"), Err(MonadError::Empty(_))));
        assert!(matches!(tag("list+").parse_value("[]"), Err(MonadError::Empty(_))));
    }

    #[test]
    fn markov_row() {
        let v = tag("dist").parse_value("1/2 1 + 1/2 2").unwrap();
        assert_eq!(v, TValue::Dist(BTreeMap::from([("1".into(), ratio(1, 2)), ("2".into(), ratio(1, 2))])));
        assert_eq!(tag("dist").render(&v).unwrap(), "1/2 1 + 1/2 2");
    }

    #[test]
    fn dist_normalization_is_enforced() {
        assert!(matches!(tag("dist").parse_value("1/2 a + 1/3 b"), Err(MonadError::NotNormalized(_))));
        assert!(tag("dist").parse_value("-1/2 a + 3/2 b").is_err());
        // zero weights are dropped, repeated ids merge
        let v = tag("dist").parse_value("0 c + 1/4 a + 1/4 a + 1/2 b").unwrap();
        assert_eq!(tag("dist").render(&v).unwrap(), "1/2 a + 1/2 b");
    }

    #[test]
    fn decimal_and_percent_weights() {
        let v = tag("dist").parse_value(".7 1 + 30% 3").unwrap();
        assert_eq!(tag("dist").render(&v).unwrap(), "7/10 1 + 3/10 3");
    }

    #[test]
    fn vect_signs() {
        let t = tag("vect");
        let v = t.parse_value("3/2 a - 1 b").unwrap();
        assert_eq!(t.render(&v).unwrap(), "3/2 a - 1 b");
        let w = t.parse_value("-1 b + 3/2 a").unwrap();
        assert_eq!(v, w);
        assert_eq!(t.render(&t.parse_value("1 a - 1 a").unwrap()).unwrap(), "0");
    }

    #[test]
    fn poly_monomials() {
        let nc = tag("poly-nc");
        let v = nc.parse_value("2 a.a.b + 1 c").unwrap();
        assert_eq!(nc.render(&v).unwrap(), "2 a.a.b + 1 c");
        assert_ne!(v, nc.parse_value("2 a.b.a + 1 c").unwrap());
        let c = tag("poly");
        assert_eq!(c.parse_value("1 b.a + 1 a.b").unwrap(), c.parse_value("2 a.b").unwrap());
        assert_eq!(c.render(&c.parse_value("3").unwrap()).unwrap(), "3");
        assert!(c.parse_value("1/2 a").is_err());
    }

    #[test]
    fn annotations() {
        let free = tag("annot gens{w1,w2}");
        assert_eq!(free.render(&free.parse_value("(w1 w2) a").unwrap()).unwrap(), "(w1 w2) a");
        assert_eq!(free.render(&free.parse_value("a").unwrap()).unwrap(), "() a");
        let mul = tag("annot mul");
        assert_eq!(mul.render(&mul.parse_value("(80%) Vine").unwrap()).unwrap(), "(4/5) Vine");
    }

    #[test]
    fn exceptions() {
        let t = tag("listexc {Int,String}");
        let v = t.parse_value("[a, !Int]").unwrap();
        assert_eq!(v, TValue::ListExc(vec![Entry::Id("a".into()), Entry::Label("Int".into())]));
        assert!(t.parse_value("[a, !Float]").is_err());
        assert_eq!(tag("exc {null}").parse_value("!null").unwrap(), TValue::Exc(Entry::Label("null".into())));
    }

    #[test]
    fn multiset_renders_sorted_with_repeats() {
        let t = tag("multiset");
        let v = t.parse_value("{b, a, b}").unwrap();
        assert_eq!(t.render(&v).unwrap(), "{a, b, b}");
    }

    #[test]
    fn garbage_is_a_syntax_error() {
        assert!(matches!(tag("list").parse_value("[a, b"), Err(MonadError::Syntax(_))));
        assert!(matches!(tag("atomic").parse_value("a b"), Err(MonadError::Syntax(_))));
        assert!(matches!(tag("dist").parse_value("1/2 a +"), Err(MonadError::Syntax(_))));
        assert!(matches!(tag("inp {0,1}").parse_value("0 a; 1: b"), Err(MonadError::Syntax(_))));
    }
}
