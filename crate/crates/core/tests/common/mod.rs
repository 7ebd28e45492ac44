//! Oracles shared by the integration tests, written without the library.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use kleisli_core::rational::Rational;

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect()).collect()
}

pub fn mat_pow(m: &[Vec<Rational>], n: usize) -> Vec<Vec<Rational>> {
    let size = m.len();
    let mut out: Vec<Vec<Rational>> = (0..size)
        .map(|i| (0..size).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::default() }).collect())
        .collect();
    for _ in 0..n {
        out = mat_mul(&out, m);
    }
    out
}

/// Step-by-step simulator written directly from the machine table.
pub fn oracle_turing(ones: &[i64], head: i64, max: usize) -> Option<(BTreeSet<i64>, i64, usize)> {
    let table: HashMap<(&str, u8), (&str, &str)> = HashMap::from([
        (("Start", 0), ("W1", "q0")),
        (("Start", 1), ("W1", "q0")),
        (("q0", 0), ("W1", "q1")),
        (("q0", 1), ("L", "q0")),
        (("q1", 0), ("W0", "Halt")),
        (("q1", 1), ("L", "q2")),
        (("q2", 0), ("R", "Halt")),
        (("q2", 1), ("W0", "q2")),
    ]);
    let mut cells: HashMap<i64, u8> = ones.iter().map(|&i| (i, 1)).collect();
    let (mut head, mut state) = (head, "Start");
    for step in 1..=max {
        let bit = *cells.get(&head).unwrap_or(&0);
        let (op, next) = table[&(state, bit)];
        match op {
            "L" => head -= 1,
            "R" => head += 1,
            "W0" => {
                cells.insert(head, 0);
            }
            _ => {
                cells.insert(head, 1);
            }
        }
        if next == "Halt" {
            let ones = cells.into_iter().filter(|&(_, b)| b == 1).map(|(i, _)| i).collect();
            return Some((ones, head, step));
        }
        state = next;
    }
    None
}
