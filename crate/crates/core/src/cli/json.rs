//! JSON encoding of problems, forms and witnesses.
//!
//! A form is an array of `[exponents, indices, "num/den"]` triples; a polynomial
//! is encoded as a 0-form. The reader is told the expected form degree, so the
//! zero form needs no extra tags.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::parse::{parse_rational, ProblemFile};
use super::print::Printer;
use crate::fibre::FibrePoint;
use crate::polyform::{KForm, Monomial, Polynomial, Rational, Weights};

pub type DecodeResult<T> = std::result::Result<T, String>;

pub fn rational_to_json(c: &Rational) -> Value {
    Value::String(format!("{}/{}", c.numer(), c.denom()))
}

pub fn rational_from_json(v: &Value) -> DecodeResult<Rational> {
    v.as_str()
        .and_then(parse_rational)
        .ok_or_else(|| format!("expected a rational string, found {v}"))
}

pub fn rationals_to_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rational_to_json).collect())
}

pub fn rationals_from_json(v: &Value) -> DecodeResult<Vec<Rational>> {
    v.as_array()
        .ok_or("expected an array of rationals")?
        .iter()
        .map(rational_from_json)
        .collect()
}

pub fn form_to_json(f: &KForm) -> Value {
    Value::Array(
        f.terms()
            .map(|(idx, m, c)| json!([m.exps(), idx, rational_to_json(c)]))
            .collect(),
    )
}

pub fn form_from_json(v: &Value, nvars: usize, degree: usize) -> DecodeResult<KForm> {
    let mut out = KForm::zero(nvars, degree);
    for t in v.as_array().ok_or("expected a form (array of terms)")? {
        let parts = t
            .as_array()
            .filter(|p| p.len() == 3)
            .ok_or("form term must be [exponents, indices, coefficient]")?;
        let exps: Vec<u32> = serde_json::from_value(parts[0].clone()).map_err(|e| e.to_string())?;
        let idx: Vec<usize> = serde_json::from_value(parts[1].clone()).map_err(|e| e.to_string())?;
        if exps.len() != nvars || idx.len() != degree || idx.iter().any(|&i| i >= nvars) {
            return Err(format!(
                "form term {t} does not fit {degree}-forms in {nvars} variables"
            ));
        }
        let c = rational_from_json(&parts[2])?;
        out += &KForm::monomial_form(Polynomial::term(Monomial(exps), c), &idx);
    }
    Ok(out)
}

pub fn forms_to_json(forms: &[KForm]) -> Value {
    Value::Array(forms.iter().map(form_to_json).collect())
}

pub fn forms_from_json(v: &Value, nvars: usize, degree: usize) -> DecodeResult<Vec<KForm>> {
    v.as_array()
        .ok_or("expected an array of forms")?
        .iter()
        .map(|f| form_from_json(f, nvars, degree))
        .collect()
}

pub fn poly_to_json(p: &Polynomial) -> Value {
    form_to_json(&KForm::from_poly(p.clone()))
}

pub fn poly_from_json(v: &Value, nvars: usize) -> DecodeResult<Polynomial> {
    Ok(form_from_json(v, nvars, 0)?.as_polynomial().unwrap())
}

pub fn problem_to_json(p: &ProblemFile) -> Value {
    json!({
        "vars": p.vars,
        "weights": p.weights.as_slice(),
        "map": p.map.iter().map(poly_to_json).collect::<Vec<_>>(),
    })
}

pub fn problem_from_json(v: &Value) -> DecodeResult<ProblemFile> {
    let vars: Vec<String> = serde_json::from_value(v["vars"].clone()).map_err(|e| format!("problem.vars: {e}"))?;
    let weights: Vec<u32> =
        serde_json::from_value(v["weights"].clone()).map_err(|e| format!("problem.weights: {e}"))?;
    if weights.len() != vars.len() {
        return Err("problem.weights does not match problem.vars".into());
    }
    let weights = Weights::new(weights).map_err(|e| e.to_string())?;
    let map = v["map"]
        .as_array()
        .ok_or("problem.map must be an array")?
        .iter()
        .map(|p| poly_from_json(p, vars.len()))
        .collect::<DecodeResult<Vec<_>>>()?;
    Ok(ProblemFile {
        vars,
        weights,
        map,
        forms: BTreeMap::new(),
        points: BTreeMap::new(),
    })
}

pub fn point_to_json(y: &FibrePoint) -> Value {
    rationals_to_json(&y.0)
}

pub fn point_from_json(v: &Value) -> DecodeResult<FibrePoint> {
    rationals_from_json(v).map(FibrePoint)
}

/// The problem in canonical problem-file syntax (variables, weights, map only).
pub fn canonical_problem_text(p: &ProblemFile) -> String {
    let printer = Printer::new(&p.vars, &p.weights);
    let weights: Vec<String> = p.weights.as_slice().iter().map(u32::to_string).collect();
    let map: Vec<String> = p.map.iter().map(|f| format!("\"{}\"", printer.polynomial(f))).collect();
    format!(
        "vars = [{}]\nweights = [{}]\nmap = [{}]\n",
        p.vars.join(", "),
        weights.join(", "),
        map.join(", ")
    )
}

/// SHA-256 of the canonical problem text, hex encoded.
pub fn input_hash(p: &ProblemFile) -> String {
    hex::encode(Sha256::digest(canonical_problem_text(p).as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse::{parse_form, parse_problem};

    #[test]
    fn forms_round_trip() {
        let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let f = parse_form("2/3*x*z*d[x,y] - d[y,z]", &vars).unwrap();
        let v = form_to_json(&f);
        assert_eq!(v[1], json!([[0, 0, 0], [1, 2], "-1/1"]));
        assert_eq!(form_from_json(&v, 3, 2).unwrap(), f);
        assert!(form_from_json(&v, 3, 1).is_err());
        assert_eq!(form_from_json(&json!([]), 3, 1).unwrap(), KForm::zero(3, 1));
    }

    #[test]
    fn problems_round_trip_and_hash_stably() {
        let p = parse_problem("vars=[x,y,z]; map=[x*z, x^2+y^2-z^2]").unwrap();
        let back = problem_from_json(&problem_to_json(&p)).unwrap();
        assert_eq!(back, p);
        let q = parse_problem("vars = [x, y, z]\nweights = [1,1,1]\nmap = [\"z*x\", \"-z^2 + y^2 + x^2\"]").unwrap();
        assert_eq!(input_hash(&p), input_hash(&q));
        assert_eq!(
            canonical_problem_text(&p),
            "vars = [x, y, z]\nweights = [1, 1, 1]\nmap = [\"x*z\", \"x^2 + y^2 - z^2\"]\n"
        );
    }
}
