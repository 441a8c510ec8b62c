use std::fmt;

use num_traits::{One, Signed};

use super::poly::{DiffPoly, Rational, Term};
use super::vars::{JetVar, MultiIndex};

/// Name used for base variable `i` when no session names are available.
pub fn default_base_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        3 => "t".into(),
        _ => format!("x{i}"),
    }
}

fn base_name(bases: &[String], i: usize) -> String {
    bases.get(i).cloned().unwrap_or_else(|| default_base_name(i))
}

/// Letters of a jet suffix: `xxy` for sigma = (2, 1).
pub fn suffix(sigma: &MultiIndex, bases: &[String]) -> String {
    let mut s = String::new();
    for (i, c) in sigma.iter() {
        let name = base_name(bases, i);
        for _ in 0..c {
            s.push_str(&name);
        }
    }
    s
}

/// `u`, `u2`, `b_xxx`, `u1_xy`.
pub fn jet_name(v: &JetVar, bases: &[String]) -> String {
    let mut s = v.bundle().symbol().to_string();
    if v.bundle().dim() > 1 {
        s.push_str(&(v.component() + 1).to_string());
    }
    if !v.sigma().is_empty() {
        s.push('_');
        s.push_str(&suffix(v.sigma(), bases));
    }
    s
}

fn monomial_body(t: &Term, bases: &[String]) -> Vec<String> {
    let mut parts = Vec::new();
    for (i, k) in t.base.iter() {
        let n = base_name(bases, i);
        parts.push(if k == 1 { n } else { format!("{n}^{k}") });
    }
    for (v, k) in &t.factors {
        let n = jet_name(v, bases);
        parts.push(if *k == 1 { n } else { format!("{n}^{k}") });
    }
    parts
}

/// Canonical plain-text rendering, e.g. `-1/2*b_xxx + 2*w*b_x + w_x*b`.
pub fn render_poly(p: &DiffPoly, bases: &[String]) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (idx, (t, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        let mag: Rational = c.abs();
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let body = monomial_body(t, bases);
        if body.is_empty() {
            out.push_str(&mag.to_string());
        } else {
            if !mag.is_one() {
                out.push_str(&mag.to_string());
                out.push('*');
            }
            out.push_str(&body.join("*"));
        }
    }
    out
}

/// Render a tuple of polynomials: a bare polynomial for length one,
/// `[p1, p2]` otherwise.
pub fn render_tuple(ps: &[DiffPoly], bases: &[String]) -> String {
    if ps.len() == 1 {
        render_poly(&ps[0], bases)
    } else {
        let inner: Vec<String> = ps.iter().map(|p| render_poly(p, bases)).collect();
        format!("[{}]", inner.join(", "))
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_poly(self, &[]))
    }
}
