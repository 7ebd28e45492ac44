/// Identifiers are case-sensitive runs of `[A-Za-z0-9_]`.
pub fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_alnum_and_underscore() {
        assert!(is_ident("Employee"));
        assert!(is_ident("q10"));
        assert!(is_ident("120_1"));
        assert!(!is_ident(""));
        assert!(!is_ident("a.b"));
        assert!(!is_ident("Applied math"));
    }
}
