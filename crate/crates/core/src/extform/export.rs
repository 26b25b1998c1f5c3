//! CPLEX LP file output.
//!
//! Rows with fractional coefficients are multiplied by the least common
//! multiple of their denominators, so the file carries only integers and the
//! polyhedron is unchanged. Variables are free unless a constraint says
//! otherwise, which the `Bounds` section states explicitly.

use std::collections::HashSet;
use std::fmt::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::{ExtendedFormulation, LinearRow, Sense};
use crate::rational::Rational;

fn sanitize(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "_.".contains(c) { c } else { '_' })
        .collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        s.insert(0, 'v');
    }
    s
}

fn unique_names(ef: &ExtendedFormulation) -> Vec<String> {
    let mut seen = HashSet::new();
    ef.variables()
        .iter()
        .map(|v| {
            let base = sanitize(&v.name);
            let mut name = base.clone();
            let mut k = 1;
            while !seen.insert(name.clone()) {
                name = format!("{base}_{k}");
                k += 1;
            }
            name
        })
        .collect()
}

fn integer_row(row: &LinearRow) -> (Vec<(usize, BigInt)>, BigInt) {
    let lcm = row
        .coeffs
        .iter()
        .map(|(_, c)| c.denom())
        .chain(std::iter::once(row.rhs.denom()))
        .fold(BigInt::one(), |acc, d| acc.lcm(&d));
    let scale = |r: &Rational| r.numer() * (&lcm / r.denom());
    (row.coeffs.iter().map(|(i, c)| (*i, scale(c))).collect(), scale(&row.rhs))
}

fn write_terms(out: &mut String, terms: &[(usize, BigInt)], names: &[String]) {
    if terms.is_empty() {
        out.push_str("0 ");
        out.push_str(&names[0]);
        return;
    }
    for (k, (i, c)) in terms.iter().enumerate() {
        let sign = if c.is_negative() { "-" } else if k > 0 { "+" } else { "" };
        if k > 0 {
            out.push(' ');
        }
        out.push_str(sign);
        if k > 0 || c.is_negative() {
            out.push(' ');
        }
        let mag = c.abs();
        if !mag.is_one() {
            let _ = write!(out, "{mag} ");
        }
        out.push_str(&names[*i]);
    }
}

impl ExtendedFormulation {
    /// Renders the system as an LP file. The objective, if any, is over
    /// projected labels; without one a zero objective is written.
    pub fn to_lp_string(&self, objective: &[(usize, Rational)], maximize: bool) -> String {
        let names = unique_names(self);
        let mut out = String::new();
        out.push_str(if maximize { "Maximize\n" } else { "Minimize\n" });
        out.push_str(" obj: ");
        if self.variables().is_empty() {
            out.push_str("0\n");
        } else {
            let (terms, _) = integer_row(&LinearRow::new(objective.to_vec(), Rational::zero()));
            write_terms(&mut out, &terms, &names);
            out.push('\n');
        }
        out.push_str("Subject To\n");
        for (k, q) in self.inequalities().iter().enumerate() {
            let (terms, rhs) = integer_row(&q.row);
            let _ = write!(out, " c{k}: ");
            if self.variables().is_empty() {
                out.push('0');
            } else {
                write_terms(&mut out, &terms, &names);
            }
            let op = match q.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
            };
            let _ = writeln!(out, " {op} {rhs}");
        }
        for (k, e) in self.equations().iter().enumerate() {
            let (terms, rhs) = integer_row(e);
            let _ = write!(out, " e{k}: ");
            if self.variables().is_empty() {
                out.push('0');
            } else {
                write_terms(&mut out, &terms, &names);
            }
            let _ = writeln!(out, " = {rhs}");
        }
        if !names.is_empty() {
            out.push_str("Bounds\n");
            for n in &names {
                let _ = writeln!(out, " {n} free");
            }
        }
        out.push_str("End\n");
        out
    }
}
