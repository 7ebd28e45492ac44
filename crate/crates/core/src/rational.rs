//! Exact rational literals.
//!
//! Accepted forms: integers (`3`, `-2`), fractions (`3/4`), decimals
//! (`0.35`, `.5`) and percentages (`80%`). Everything is stored as a
//! `BigRational`, so `80%`, `0.8` and `4/5` are the same value.

use num::{BigInt, BigRational, One, Signed, Zero};

pub type Rational = BigRational;

pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some(pct) = text.strip_suffix('%') {
        return parse_rational(pct).map(|r| r / BigRational::from_integer(BigInt::from(100)));
    }
    let (negative, body) = match text.as_bytes()[0] {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let value = if let Some((num, den)) = body.split_once('/') {
        let num = parse_digits(num)?;
        let den = parse_digits(den)?;
        if den.is_zero() {
            return None;
        }
        BigRational::new(num, den)
    } else if let Some((int, frac)) = body.split_once('.') {
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        let int = if int.is_empty() { BigInt::zero() } else { parse_digits(int)? };
        let frac_value = if frac.is_empty() {
            BigRational::zero()
        } else {
            let scale = num::pow(BigInt::from(10), frac.len());
            BigRational::new(parse_digits(frac)?, scale)
        };
        BigRational::from_integer(int) + frac_value
    } else {
        BigRational::from_integer(parse_digits(body)?)
    };
    Some(if negative { -value } else { value })
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Canonical text: `n` for integers, `p/q` otherwise (lowest terms).
pub fn render_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_forms_agree() {
        assert_eq!(parse_rational("80%"), Some(ratio(4, 5)));
        assert_eq!(parse_rational("0.8"), Some(ratio(4, 5)));
        assert_eq!(parse_rational(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("2/4"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("-3/2"), Some(ratio(-3, 2)));
        assert_eq!(parse_rational("7"), Some(ratio(7, 1)));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "a", "1/0", "1/", "/2", ".", "1..2", "--1", "1e3"] {
            assert_eq!(parse_rational(bad), None, "{bad}");
        }
    }

    #[test]
    fn renders_lowest_terms() {
        assert_eq!(render_rational(&ratio(14, 25)), "14/25");
        assert_eq!(render_rational(&ratio(4, 2)), "2");
        assert_eq!(render_rational(&ratio(-9, 100)), "-9/100");
    }
}
