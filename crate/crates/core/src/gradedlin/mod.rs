//! Exact linear algebra over graded and degree-bounded pieces of the form
//! modules `Ω^k(C^n)`.
//!
//! A solve call asks for unknowns `u_j` (each ranging over a finite space of
//! forms) with `target = Σ op_j(u_j)`. Every column of the system is the image
//! of one monomial form under its slot's operator; the rows are indexed by the
//! monomial forms appearing in the images and the target.

mod matrix;

use std::collections::HashMap;

use num_traits::Zero;

use crate::groebner::MonomialOrder;
use crate::polyform::{subsets, KForm, Monomial, Polynomial, Rational, Weights};
use crate::{Error, Result};

/// Which weighted degrees a space admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeRange {
    Exactly(i64),
    AtMost(i64),
}

/// Forms of degree `k` in `C[x_1..x_n]` with weighted degree in `range`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSpaceSpec {
    pub k: usize,
    pub range: DegreeRange,
    pub weights: Weights,
}

impl GradedSpaceSpec {
    pub fn exactly(weights: &Weights, k: usize, r: i64) -> Self {
        GradedSpaceSpec {
            k,
            range: DegreeRange::Exactly(r),
            weights: weights.clone(),
        }
    }

    pub fn at_most(weights: &Weights, k: usize, r: i64) -> Self {
        GradedSpaceSpec {
            k,
            range: DegreeRange::AtMost(r),
            weights: weights.clone(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }
}

/// Monomials of weighted degree exactly `d`, ascending in the weighted revlex order.
pub fn monomials_of_degree(w: &Weights, d: u32) -> Vec<Monomial> {
    fn rec(w: &[u32], i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == w.len() {
            if left == 0 {
                out.push(Monomial(cur.clone()));
            }
            return;
        }
        let mut e = 0;
        while e * w[i] <= left {
            cur[i] = e;
            rec(w, i + 1, left - e * w[i], cur, out);
            e += 1;
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(w.as_slice(), 0, d, &mut vec![0; w.len()], &mut out);
    let order = MonomialOrder::weighted_revlex(w);
    out.sort_by_cached_key(|m| order.key(m));
    out
}

/// All monomial forms `x^α dx_S` of the space, each once: ascending weighted
/// degree, then `S` lexicographically, then `x^α` in the monomial order.
pub fn monomial_basis(spec: &GradedSpaceSpec) -> Vec<KForm> {
    let n = spec.nvars();
    let w = &spec.weights;
    let (lo, hi) = match spec.range {
        DegreeRange::Exactly(r) => (r, r),
        DegreeRange::AtMost(r) => (0, r),
    };
    let mut out = Vec::new();
    if hi < 0 {
        return out;
    }
    let sets = subsets(n, spec.k);
    for d in lo.max(0)..=hi {
        for s in &sets {
            let shift = i64::from(w.differential_degree(s));
            if d < shift {
                continue;
            }
            for m in monomials_of_degree(w, (d - shift) as u32) {
                out.push(KForm::monomial_form(
                    Polynomial::term(m, Rational::from_integer(1.into())),
                    s,
                ));
            }
        }
    }
    out
}

/// Linear operator applied to a slot's unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnOp {
    Identity,
    /// `u ↦ du`
    Exterior,
    /// `u ↦ P·u`
    Multiply(Polynomial),
    /// `u ↦ u ∧ θ`
    WedgeRight(KForm),
}

impl ColumnOp {
    pub fn apply(&self, u: &KForm) -> KForm {
        match self {
            ColumnOp::Identity => u.clone(),
            ColumnOp::Exterior => u.exterior_derivative(),
            ColumnOp::Multiply(p) => u.mul_poly(p),
            ColumnOp::WedgeRight(theta) => u.wedge(theta),
        }
    }

    fn output_degree(&self, k: usize) -> usize {
        match self {
            ColumnOp::Identity | ColumnOp::Multiply(_) => k,
            ColumnOp::Exterior => k + 1,
            ColumnOp::WedgeRight(theta) => k + theta.degree(),
        }
    }
}

/// One unknown of a solve call: a finite spanning list and an operator.
#[derive(Debug, Clone)]
pub struct Slot {
    nvars: usize,
    k: usize,
    basis: Vec<KForm>,
    op: ColumnOp,
}

impl Slot {
    /// Unknown ranging over a graded space.
    pub fn space(spec: &GradedSpaceSpec, op: ColumnOp) -> Self {
        Slot {
            nvars: spec.nvars(),
            k: spec.k,
            basis: monomial_basis(spec),
            op,
        }
    }

    /// Unknown coefficients `c_i` of the fixed forms, contributing `Σ c_i forms_i`.
    pub fn span(nvars: usize, k: usize, forms: Vec<KForm>) -> Self {
        Slot {
            nvars,
            k,
            basis: forms,
            op: ColumnOp::Identity,
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn op(&self) -> &ColumnOp {
        &self.op
    }

    pub fn image_degree(&self) -> usize {
        self.op.output_degree(self.k)
    }

    fn combine(&self, coefficients: &[Rational]) -> KForm {
        let mut value = KForm::zero(self.nvars, self.k);
        for (c, b) in coefficients.iter().zip(&self.basis) {
            if !c.is_zero() {
                value += &b.scale(c);
            }
        }
        value
    }
}

/// Value assigned to one slot: coefficients on the slot's spanning list and
/// the resulting unknown form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotValue {
    pub coefficients: Vec<Rational>,
    pub value: KForm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearWitness {
    pub slots: Vec<SlotValue>,
}

impl LinearWitness {
    /// `Σ op_j(u_j)`; equals the target for every witness returned by a solve.
    pub fn reconstruct(&self, slots: &[Slot], nvars: usize, degree: usize) -> KForm {
        let mut out = KForm::zero(nvars, degree);
        for (s, v) in slots.iter().zip(&self.slots) {
            out += &s.op.apply(&v.value);
        }
        out
    }

    pub fn value(&self, slot: usize) -> &KForm {
        &self.slots[slot].value
    }
}

/// Linear system with all columns built once; several targets may be solved.
struct System {
    rows: HashMap<(Vec<usize>, Monomial), usize>,
    columns: Vec<Vec<(usize, Rational)>>,
    offsets: Vec<usize>,
}

impl System {
    fn build(slots: &[Slot]) -> Self {
        let mut rows = HashMap::new();
        let mut columns = Vec::new();
        let mut offsets = Vec::with_capacity(slots.len());
        for s in slots {
            offsets.push(columns.len());
            for b in &s.basis {
                let image = s.op.apply(b);
                columns.push(Self::entries(&mut rows, &image));
            }
        }
        System { rows, columns, offsets }
    }

    fn entries(rows: &mut HashMap<(Vec<usize>, Monomial), usize>, form: &KForm) -> Vec<(usize, Rational)> {
        form.terms()
            .map(|(s, m, c)| {
                let next = rows.len();
                let r = *rows.entry((s.clone(), m.clone())).or_insert(next);
                (r, c.clone())
            })
            .collect()
    }

    /// Row-reduces `[A | targets]` and returns the echelon form.
    fn reduce(&mut self, targets: &[KForm]) -> matrix::Echelon {
        let ncols = self.columns.len();
        let target_entries: Vec<Vec<(usize, Rational)>> =
            targets.iter().map(|t| Self::entries(&mut self.rows, t)).collect();
        let mut by_row: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.rows.len()];
        for (j, col) in self.columns.iter().enumerate() {
            for (r, c) in col {
                by_row[*r].push((j, c.clone()));
            }
        }
        for (t, col) in target_entries.iter().enumerate() {
            for (r, c) in col {
                by_row[*r].push((ncols + t, c.clone()));
            }
        }
        let rows = by_row.into_iter().map(matrix::integer_row).collect();
        matrix::row_reduce(rows, ncols)
    }

    fn witness(&self, slots: &[Slot], x: &[Rational]) -> LinearWitness {
        LinearWitness {
            slots: slots
                .iter()
                .zip(&self.offsets)
                .map(|(s, &o)| {
                    let coefficients = x[o..o + s.len()].to_vec();
                    let value = s.combine(&coefficients);
                    SlotValue { coefficients, value }
                })
                .collect(),
        }
    }
}

fn check_form_degrees(target_degree: usize, slots: &[Slot]) -> Result<()> {
    for (i, s) in slots.iter().enumerate() {
        if s.image_degree() != target_degree {
            return Err(Error::IncompatibleDegrees(format!(
                "slot {i} produces {}-forms, target is a {target_degree}-form",
                s.image_degree()
            )));
        }
    }
    Ok(())
}

/// Solves `targets[t] = Σ op_j(u_j)` for every target with one elimination.
/// Among several solutions, the one with all free unknowns zero is returned.
pub fn solve_many(targets: &[KForm], slots: &[Slot]) -> Result<Vec<Option<LinearWitness>>> {
    for t in targets {
        check_form_degrees(t.degree(), slots)?;
    }
    let mut sys = System::build(slots);
    let ncols = sys.columns.len();
    let echelon = sys.reduce(targets);
    Ok((0..targets.len())
        .map(|t| echelon.solve_column(ncols + t, ncols).map(|x| sys.witness(slots, &x)))
        .collect())
}

/// Solve over degree-bounded (possibly inhomogeneous) spaces.
pub fn bounded_solve(target: &KForm, slots: &[Slot]) -> Result<Option<LinearWitness>> {
    Ok(solve_many(std::slice::from_ref(target), slots)?.pop().flatten())
}

/// Solve for a weighted-homogeneous target; every column must lie in the
/// target's graded piece.
pub fn graded_solve(target: &KForm, slots: &[Slot], w: &Weights) -> Result<Option<LinearWitness>> {
    check_form_degrees(target.degree(), slots)?;
    let components = target.homogeneous_components(w);
    if components.len() > 1 {
        return Err(Error::NotHomogeneous);
    }
    if let Some((&r, _)) = components.iter().next() {
        for (i, s) in slots.iter().enumerate() {
            for b in &s.basis {
                let image = s.op.apply(b);
                if !image.is_zero() && (!image.is_homogeneous(w) || image.weighted_degree(w).finite() != Some(r)) {
                    return Err(Error::IncompatibleDegrees(format!(
                        "slot {i} leaves the graded piece of degree {r}"
                    )));
                }
            }
        }
    }
    bounded_solve(target, slots)
}

/// Basis of the relations `{c : Σ c_j columns_j = 0}`.
pub fn kernel(columns: &[KForm]) -> Vec<Vec<Rational>> {
    let (sys, echelon) = reduce_columns(columns);
    echelon.nullspace(sys.columns.len())
}

/// Dimension of the span of `columns`.
pub fn rank(columns: &[KForm]) -> usize {
    reduce_columns(columns).1.rank()
}

fn reduce_columns(columns: &[KForm]) -> (System, matrix::Echelon) {
    let nvars = columns.first().map_or(0, KForm::nvars);
    let k = columns.first().map_or(0, KForm::degree);
    let slots = [Slot::span(nvars, k, columns.to_vec())];
    let mut sys = System::build(&slots);
    let echelon = sys.reduce(&[]);
    (sys, echelon)
}
