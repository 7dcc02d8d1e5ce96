//! Canonical text for rationals, polynomials and forms. Terms follow the
//! weighted monomial order (largest first) so output is byte-stable, and every
//! printed value parses back to itself.

use num_traits::{One, Signed};

use crate::groebner::MonomialOrder;
use crate::polyform::{KForm, Monomial, Polynomial, Rational, Weights};

pub fn format_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn format_monomial(m: &Monomial, vars: &[String]) -> String {
    m.exps()
        .iter()
        .zip(vars)
        .filter(|(&e, _)| e > 0)
        .map(|(&e, v)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

/// Variable names and weights used for output.
#[derive(Debug, Clone)]
pub struct Printer {
    vars: Vec<String>,
    order: MonomialOrder,
}

/// Pushes `± |c|·body` onto `out`, eliding unit coefficients.
fn push_term(out: &mut String, c: &Rational, body: &str) {
    let neg = c.is_negative();
    if out.is_empty() {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    let a = c.abs();
    if body.is_empty() {
        out.push_str(&format_rational(&a));
    } else if a.is_one() {
        out.push_str(body);
    } else {
        out.push_str(&format_rational(&a));
        out.push('*');
        out.push_str(body);
    }
}

impl Printer {
    pub fn new(vars: &[String], weights: &Weights) -> Self {
        assert_eq!(vars.len(), weights.len());
        Printer {
            vars: vars.to_vec(),
            order: MonomialOrder::weighted_revlex(weights),
        }
    }

    /// Target-space variables `t1..tq`, all of weight one.
    pub fn target(q: usize) -> Self {
        let vars: Vec<String> = (1..=q).map(|i| format!("t{i}")).collect();
        Printer::new(&vars, &Weights::standard(q))
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    fn sorted_terms<'a>(&self, p: &'a Polynomial) -> Vec<(&'a Monomial, &'a Rational)> {
        let mut terms: Vec<_> = p.terms().collect();
        terms.sort_by(|a, b| self.order.cmp(b.0, a.0));
        terms
    }

    pub fn polynomial(&self, p: &Polynomial) -> String {
        let mut out = String::new();
        for (m, c) in self.sorted_terms(p) {
            push_term(&mut out, c, &format_monomial(m, &self.vars));
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    pub fn form(&self, f: &KForm) -> String {
        if f.degree() == 0 {
            return self.polynomial(&f.coeff(&[]));
        }
        let mut out = String::new();
        for (idx, p) in f.coeffs() {
            let names: Vec<&str> = idx.iter().map(|&i| self.vars[i].as_str()).collect();
            let d = format!("d[{}]", names.join(","));
            for (m, c) in self.sorted_terms(p) {
                let mono = format_monomial(m, &self.vars);
                let body = if mono.is_empty() {
                    d.clone()
                } else {
                    format!("{mono}*{d}")
                };
                push_term(&mut out, c, &body);
            }
        }
        if out.is_empty() {
            // keep the degree so the text parses back to the same zero form
            let names: Vec<&str> = self.vars[..f.degree()].iter().map(String::as_str).collect();
            out = format!("0*d[{}]", names.join(","));
        }
        out
    }
}

pub fn format_vector(v: &[Rational]) -> String {
    format!("({})", v.iter().map(format_rational).collect::<Vec<_>>().join(", "))
}
