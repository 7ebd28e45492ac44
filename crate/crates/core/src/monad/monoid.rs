use std::collections::BTreeSet;
use std::fmt;

use num::{One, Signed, Zero};

use super::MonadError;
use crate::ident::is_ident;
use crate::rational::{in_unit_interval, parse_rational, render_rational, Rational};

/// The monoid parameter of annotation and Turing monads.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Monoid {
    /// Words over a finite generator set, multiplied by concatenation.
    Free(BTreeSet<String>),
    Table(FiniteMonoid),
    /// Rationals in `[0, 1]` under multiplication (assurance levels).
    RationalMul,
    /// Nonnegative rationals under addition (time delays).
    RationalAdd,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MonoidElem {
    Word(Vec<String>),
    Named(String),
    Number(Rational),
}

/// A monoid given by its full multiplication table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteMonoid {
    elements: Vec<String>,
    identity: usize,
    // products[a][b] = index of a * b
    products: Vec<Vec<usize>>,
}

impl FiniteMonoid {
    /// Builds the monoid, checking the identity laws and associativity on
    /// every pair and triple of elements.
    pub fn new(
        elements: Vec<String>,
        identity: &str,
        products: Vec<Vec<String>>,
    ) -> Result<Self, MonadError> {
        let bad = |msg: String| MonadError::InvalidMonoid(msg);
        let n = elements.len();
        if n == 0 {
            return Err(bad("a monoid needs at least one element".into()));
        }
        for (i, e) in elements.iter().enumerate() {
            if !is_ident(e) {
                return Err(bad(format!("`{e}` is not an identifier")));
            }
            if elements[..i].contains(e) {
                return Err(bad(format!("duplicate element `{e}`")));
            }
        }
        let index = |name: &str| elements.iter().position(|e| e == name);
        let identity = index(identity).ok_or_else(|| bad(format!("unknown identity `{identity}`")))?;
        if products.len() != n || products.iter().any(|row| row.len() != n) {
            return Err(bad(format!("multiplication table must be {n}x{n}")));
        }
        let mut table = vec![vec![0; n]; n];
        for (a, row) in products.iter().enumerate() {
            for (b, name) in row.iter().enumerate() {
                table[a][b] = index(name).ok_or_else(|| bad(format!("unknown element `{name}`")))?;
            }
        }
        for a in 0..n {
            if table[identity][a] != a || table[a][identity] != a {
                return Err(bad(format!(
                    "`{}` is not a two-sided identity for `{}`",
                    elements[identity], elements[a]
                )));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(bad(format!(
                            "not associative: ({0}*{1})*{2} != {0}*({1}*{2})",
                            elements[a], elements[b], elements[c]
                        )));
                    }
                }
            }
        }
        Ok(FiniteMonoid { elements, identity, products: table })
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn identity(&self) -> &str {
        &self.elements[self.identity]
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn multiply(&self, a: &str, b: &str) -> Option<&str> {
        let (a, b) = (self.index(a)?, self.index(b)?);
        Some(&self.elements[self.products[a][b]])
    }

    /// Rows of the table as element names, in element order.
    pub fn product_rows(&self) -> Vec<Vec<&str>> {
        self.products
            .iter()
            .map(|row| row.iter().map(|&i| self.elements[i].as_str()).collect())
            .collect()
    }
}

impl Monoid {
    pub fn identity(&self) -> MonoidElem {
        match self {
            Monoid::Free(_) => MonoidElem::Word(Vec::new()),
            Monoid::Table(t) => MonoidElem::Named(t.identity().to_string()),
            Monoid::RationalMul => MonoidElem::Number(Rational::one()),
            Monoid::RationalAdd => MonoidElem::Number(Rational::zero()),
        }
    }

    /// `a * b`; both operands must already satisfy [`Monoid::contains`].
    pub fn multiply(&self, a: &MonoidElem, b: &MonoidElem) -> Result<MonoidElem, MonadError> {
        match (self, a, b) {
            (Monoid::Free(_), MonoidElem::Word(x), MonoidElem::Word(y)) => {
                let mut w = x.clone();
                w.extend(y.iter().cloned());
                Ok(MonoidElem::Word(w))
            }
            (Monoid::Table(t), MonoidElem::Named(x), MonoidElem::Named(y)) => t
                .multiply(x, y)
                .map(|p| MonoidElem::Named(p.to_string()))
                .ok_or_else(|| MonadError::InvalidMonoid(format!("`{x}` or `{y}` not in the table"))),
            (Monoid::RationalMul, MonoidElem::Number(x), MonoidElem::Number(y)) => {
                Ok(MonoidElem::Number(x * y))
            }
            (Monoid::RationalAdd, MonoidElem::Number(x), MonoidElem::Number(y)) => {
                Ok(MonoidElem::Number(x + y))
            }
            _ => Err(MonadError::InvalidMonoid(format!(
                "cannot multiply {a:?} and {b:?} in {self}"
            ))),
        }
    }

    pub fn contains(&self, e: &MonoidElem) -> bool {
        match (self, e) {
            (Monoid::Free(gens), MonoidElem::Word(w)) => w.iter().all(|g| gens.contains(g)),
            (Monoid::Table(t), MonoidElem::Named(n)) => t.index(n).is_some(),
            (Monoid::RationalMul, MonoidElem::Number(r)) => in_unit_interval(r),
            (Monoid::RationalAdd, MonoidElem::Number(r)) => !r.is_negative(),
            _ => false,
        }
    }

    /// Parses the text between the parentheses of an annotation.
    pub fn parse_elem(&self, text: &str) -> Result<MonoidElem, MonadError> {
        let text = text.trim();
        let elem = match self {
            Monoid::Free(_) => {
                MonoidElem::Word(text.split_whitespace().map(str::to_string).collect())
            }
            Monoid::Table(_) => MonoidElem::Named(text.to_string()),
            Monoid::RationalMul | Monoid::RationalAdd => MonoidElem::Number(
                parse_rational(text)
                    .ok_or_else(|| MonadError::Syntax(format!("`{text}` is not a rational number")))?,
            ),
        };
        if !self.contains(&elem) {
            return Err(MonadError::Malformed(format!("`{text}` is not an element of {self}")));
        }
        Ok(elem)
    }

    pub fn render_elem(&self, e: &MonoidElem) -> String {
        match e {
            MonoidElem::Word(w) => w.join(" "),
            MonoidElem::Named(n) => n.clone(),
            MonoidElem::Number(r) => render_rational(r),
        }
    }
}

impl fmt::Display for Monoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Monoid::Free(gens) => write!(f, "gens{{{}}}", join(gens.iter())),
            Monoid::Table(t) => {
                let rows: Vec<String> = t.product_rows().iter().map(|r| r.join(",")).collect();
                write!(
                    f,
                    "table{{{}}} unit{{{}}} products{{{}}}",
                    t.elements.join(","),
                    t.identity(),
                    rows.join(";")
                )
            }
            Monoid::RationalMul => write!(f, "mul"),
            Monoid::RationalAdd => write!(f, "add"),
        }
    }
}

fn join<'a>(items: impl Iterator<Item = &'a String>) -> String {
    items.map(String::as_str).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z3() -> FiniteMonoid {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        FiniteMonoid::new(
            s(&["e", "a", "b"]),
            "e",
            vec![s(&["e", "a", "b"]), s(&["a", "b", "e"]), s(&["b", "e", "a"])],
        )
        .unwrap()
    }

    #[test]
    fn cyclic_group_table_is_accepted() {
        let m = z3();
        assert_eq!(m.multiply("a", "a"), Some("b"));
        assert_eq!(m.multiply("b", "a"), Some("e"));
    }

    #[test]
    fn non_associative_table_is_rejected() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        // e is an identity, but a*a = b, a*b = a, b*a = b, b*b = a breaks associativity
        let err = FiniteMonoid::new(
            s(&["e", "a", "b"]),
            "e",
            vec![s(&["e", "a", "b"]), s(&["a", "b", "a"]), s(&["b", "b", "a"])],
        )
        .unwrap_err();
        assert!(err.to_string().contains("not associative"), "{err}");
    }

    #[test]
    fn bad_identity_is_rejected() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let err = FiniteMonoid::new(s(&["e", "a"]), "e", vec![s(&["e", "e"]), s(&["a", "a"])]);
        assert!(err.is_err());
    }

    #[test]
    fn numeric_monoids_respect_their_ranges() {
        let mul = Monoid::RationalMul;
        assert!(mul.parse_elem("80%").is_ok());
        assert!(mul.parse_elem("3/2").is_err());
        assert!(Monoid::RationalAdd.parse_elem("-1").is_err());
        assert_eq!(
            Monoid::RationalAdd
                .multiply(&MonoidElem::Number(crate::rational::ratio(1, 2)), &MonoidElem::Number(crate::rational::ratio(1, 3)))
                .unwrap(),
            MonoidElem::Number(crate::rational::ratio(5, 6))
        );
    }

    #[test]
    fn free_words_concatenate_left_to_right() {
        let m = Monoid::Free(["L", "R"].iter().map(|s| s.to_string()).collect());
        let a = m.parse_elem("L L").unwrap();
        let b = m.parse_elem("R").unwrap();
        assert_eq!(m.render_elem(&m.multiply(&a, &b).unwrap()), "L L R");
        assert!(m.parse_elem("W0").is_err());
    }
}
