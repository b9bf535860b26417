//! Human-readable rendering for the stderr channel. The machine channel is
//! the JSON layer; these strings are presentation only.

use crate::diffpoly::{DiffMonomial, DiffPoly, ResiduePoly};
use crate::ordgroup::GroupVector;
use crate::residue::ResidueField;
use crate::series::{Frontier, Series};

/// `3` at rank one, `(0,1)` otherwise.
pub fn exponent(g: &GroupVector) -> String {
    if g.rank() == 1 {
        g.coords()[0].to_string()
    } else {
        format!("{}", g)
    }
}

fn power_of_t(g: &GroupVector) -> String {
    format!("t^{}", exponent(g))
}

/// Render a series as `3/2*t^(0,1) + ... + O(t^(2,0))`.
pub fn series<F: ResidueField>(f: &F, s: &Series<F>) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (exp, coef) in s.terms() {
        let c = f.render_elem(coef);
        let part = if exp.is_zero() {
            c
        } else if c == "1" {
            power_of_t(exp)
        } else {
            format!("{}*{}", c, power_of_t(exp))
        };
        parts.push(part);
    }
    if let Frontier::Finite(fr) = s.frontier() {
        parts.push(format!("O({})", power_of_t(fr)));
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

fn variable(i: usize) -> String {
    match i {
        0 => "Y".to_string(),
        1 => "Y'".to_string(),
        2 => "Y''".to_string(),
        i => format!("Y^({})", i),
    }
}

/// `Y^2`, `Y*(Y')^2`, `1` for the constant monomial.
pub fn monomial(m: &DiffMonomial) -> String {
    if m.is_constant() {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    for (i, &e) in m.exps().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let base = variable(i);
        let part = if e == 1 {
            base
        } else if i == 0 {
            format!("{}^{}", base, e)
        } else {
            format!("({})^{}", base, e)
        };
        parts.push(part);
    }
    parts.join("*")
}

/// Render a residue polynomial, constant term first.
pub fn residue_poly<F: ResidueField>(f: &F, p: &ResiduePoly<F>) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (m, c) in p.monomials() {
        let cs = f.render_elem(c);
        let part = if m.is_constant() {
            cs
        } else if cs == "1" {
            monomial(m)
        } else {
            format!("{}*{}", cs, monomial(m))
        };
        parts.push(part);
    }
    parts.join(" + ")
}

/// Render a differential polynomial with parenthesized series coefficients.
pub fn diff_poly<F: ResidueField>(f: &F, p: &DiffPoly<F>) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (m, c) in p.monomials() {
        let cs = series(f, c);
        let part = if m.is_constant() {
            cs
        } else if cs == "1" {
            monomial(m)
        } else {
            format!("({})*{}", cs, monomial(m))
        };
        parts.push(part);
    }
    parts.join(" + ")
}
