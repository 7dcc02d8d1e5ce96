//! Cohomology of actual fibres `F^{-1}(y)` and the relative cohomology of `F`.
//!
//! Exactness on a fibre is an unbounded membership question in principle; the
//! leading-term reduction (top components of fibre-exact forms are exact at
//! infinity) bounds the search to `wdeg Ω ≤ wdeg ω`, `wdeg η_i ≤ wdeg ω − wdeg f_i`,
//! which turns it into finite linear algebra. Cofactors always come from the
//! bounded solver, never from Gröbner reduction, so they respect those bounds.

use num_traits::{One, Zero};

use crate::gradedlin::{
    bounded_solve, graded_solve, kernel, monomial_basis, solve_many, ColumnOp, GradedSpaceSpec, LinearWitness, Slot,
};
use crate::groebner::{buchberger, GroebnerBasis, MonomialOrder};
use crate::infinity::{InfinityBasis, PolyMap};
use crate::polyform::{KForm, Polynomial, Rational, WDegree, Weights};
use crate::{Error, Result};

/// A rational point `y` of the target space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FibrePoint(pub Vec<Rational>);

impl FibrePoint {
    pub fn origin(q: usize) -> Self {
        FibrePoint(vec![Rational::zero(); q])
    }

    pub fn from_integers(v: &[i64]) -> Self {
        FibrePoint(v.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `ω = dΩ + Σ (f_i − y_i) η_i`; the potential is absent for 0-forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibreWitness {
    pub potential: Option<KForm>,
    pub multipliers: Vec<KForm>,
}

/// Result of the bounded exactness search. `complete` records whether the
/// dimension hypothesis holds, i.e. whether a missing witness proves non-exactness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibreExactness {
    pub witness: Option<FibreWitness>,
    pub complete: bool,
}

/// `ω = Σ λ_i ω_i + dΩ + Σ (f_i − y_i) η_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibreClass {
    pub lambda: Vec<Rational>,
    pub potential: KForm,
    pub etas: Vec<KForm>,
}

/// `ω = dΩ + Σ η_i ∧ df̄_i` for a homogeneous ω.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeWitness {
    pub potential: Option<KForm>,
    pub etas: Vec<KForm>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeExactness {
    pub witness: Option<RelativeWitness>,
    pub complete: bool,
}

/// `ω = Σ a_i(F) ω_i + dΩ + Σ η_j ∧ df_j`, with `a_i` polynomials in `t_1..t_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeDecomposition {
    pub a: Vec<Polynomial>,
    pub potential: KForm,
    pub etas: Vec<KForm>,
}

#[derive(Debug, Clone, Copy)]
pub enum Decomposition<'a> {
    Fibre {
        class: &'a FibreClass,
        point: &'a FibrePoint,
    },
    Relative(&'a RelativeDecomposition),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VanishingReport {
    pub k: usize,
    pub degree_bound: u32,
    /// Size of the spanning set of closed forms that was checked.
    pub checked: usize,
    pub exact: usize,
    pub failures: Vec<KForm>,
}

impl VanishingReport {
    pub fn all_exact(&self) -> bool {
        self.failures.is_empty()
    }
}

fn shifted(map: &PolyMap, y: &FibrePoint) -> Vec<Polynomial> {
    assert_eq!(y.len(), map.ncomponents(), "fibre point has the wrong length");
    let n = map.nvars();
    map.components()
        .iter()
        .zip(&y.0)
        .map(|(f, c)| f - &Polynomial::constant(n, c.clone()))
        .collect()
}

fn fibre_ideal(map: &PolyMap, y: &FibrePoint) -> GroebnerBasis {
    buchberger(&shifted(map, y), map.order())
}

fn bound(w: WDegree) -> i64 {
    w.finite().map_or(-1, i64::from)
}

fn wdeg_at_most(d: WDegree, base: WDegree, minus: u32) -> bool {
    match base {
        WDegree::NegInfinity => d.is_neg_infinity(),
        WDegree::Finite(b) => d.at_most(i64::from(b) - i64::from(minus)),
    }
}

/// `dω ∧ ω_F ≡ 0` modulo `(f − y)`, coefficient by coefficient.
pub fn closed_on_fibre(omega: &KForm, map: &PolyMap, y: &FibrePoint) -> bool {
    let test = omega.exterior_derivative().wedge(map.omega_f());
    if test.is_zero() {
        return true;
    }
    let gb = fibre_ideal(map, y);
    let ok = test.coeffs().all(|(_, c)| gb.contains(c));
    ok
}

/// Cofactors `a_i` with `P = Σ a_i (f_i − y_i)` and `wdeg a_i ≤ wdeg P − wdeg f_i`.
pub fn bounded_ideal_membership(p: &Polynomial, map: &PolyMap, y: &FibrePoint) -> Option<Vec<Polynomial>> {
    let w = map.weights();
    let top = bound(p.weighted_degree(w));
    let slots: Vec<Slot> = shifted(map, y)
        .into_iter()
        .zip(map.component_degrees())
        .map(|(g, &d)| {
            Slot::space(
                &GradedSpaceSpec::at_most(w, 0, top - i64::from(d)),
                ColumnOp::Multiply(g),
            )
        })
        .collect();
    let wit = bounded_solve(&KForm::from_poly(p.clone()), &slots).expect("multiplication slots are consistent")?;
    Some(wit.slots.iter().map(|s| s.value.as_polynomial().unwrap()).collect())
}

fn fibre_slots(map: &PolyMap, y: &FibrePoint, k: usize, top: i64) -> Vec<Slot> {
    let w = map.weights();
    let mut slots = Vec::new();
    if k > 0 {
        slots.push(Slot::space(
            &GradedSpaceSpec::at_most(w, k - 1, top),
            ColumnOp::Exterior,
        ));
    }
    for (g, &d) in shifted(map, y).into_iter().zip(map.component_degrees()) {
        slots.push(Slot::space(
            &GradedSpaceSpec::at_most(w, k, top - i64::from(d)),
            ColumnOp::Multiply(g),
        ));
    }
    slots
}

fn fibre_witness(wit: LinearWitness, k: usize) -> FibreWitness {
    let mut values = wit.slots.into_iter().map(|s| s.value);
    let potential = if k > 0 { values.next() } else { None };
    FibreWitness {
        potential,
        multipliers: values.collect(),
    }
}

/// Bounded search for `ω = dΩ + Σ (f_i − y_i) η_i`.
pub fn exact_on_fibre(omega: &KForm, map: &PolyMap, y: &FibrePoint) -> FibreExactness {
    let k = omega.degree();
    let complete = map.singular_dimension() <= map.fibre_dimension() as i64 - k as i64;
    let slots = fibre_slots(map, y, k, bound(omega.weighted_degree(map.weights())));
    let witness = bounded_solve(omega, &slots)
        .expect("fibre slots are consistent")
        .map(|w| fibre_witness(w, k));
    FibreExactness { witness, complete }
}

impl FibreWitness {
    pub fn reconstruct(&self, map: &PolyMap, y: &FibrePoint, k: usize) -> KForm {
        let mut out = KForm::zero(map.nvars(), k);
        if let Some(p) = &self.potential {
            out += &p.exterior_derivative();
        }
        for (m, g) in self.multipliers.iter().zip(shifted(map, y)) {
            out += &m.mul_poly(&g);
        }
        out
    }
}

fn require_isolated_cia(map: &PolyMap) -> Result<()> {
    let report = map.is_complete_intersection_at_infinity();
    if !report.is_cia {
        return Err(Error::NotCompleteIntersection);
    }
    if report.dim_singular > 0 {
        return Err(Error::NonIsolatedSingularity(report.dim_singular));
    }
    Ok(())
}

/// Coordinates of the class of an `(n−q)`-form on `F^{-1}(y)` in the basis,
/// by descent on the weighted degree of the remainder.
pub fn fibre_class(omega: &KForm, map: &PolyMap, y: &FibrePoint, basis: &InfinityBasis) -> Result<FibreClass> {
    require_isolated_cia(map)?;
    let n = map.nvars();
    let k = map.fibre_dimension();
    if omega.degree() != k || omega.nvars() != n {
        return Err(Error::IncompatibleDegrees(format!(
            "expected a {k}-form in {n} variables"
        )));
    }
    let w = map.weights();
    let shifted = shifted(map, y);
    let mut lambda = vec![Rational::zero(); basis.len()];
    let mut potential = KForm::zero(n, k - 1);
    let mut etas = vec![KForm::zero(n, k); map.ncomponents()];
    let mut rem = omega.clone();
    while let Some(r) = rem.weighted_degree(w).finite() {
        let top = rem.homogeneous_component(w, r);
        let Some((coords, wit)) = map.coordinates_at_infinity(&top, basis)? else {
            return Err(Error::Internal(format!("degree-descent step unsolvable at degree {r}")));
        };
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                rem -= &basis.forms[i].scale(c);
                lambda[i] += c;
            }
        }
        let pot = wit.potential.expect("positive form degree");
        rem -= &pot.exterior_derivative();
        potential += &pot;
        for ((eta, m), g) in etas.iter_mut().zip(wit.multipliers).zip(&shifted) {
            rem -= &m.mul_poly(g);
            *eta += &m;
        }
        if !rem.weighted_degree(w).at_most(i64::from(r) - 1) {
            return Err(Error::Internal(format!("degree-descent step did not lower degree {r}")));
        }
    }
    Ok(FibreClass {
        lambda,
        potential,
        etas,
    })
}

/// `dω ∧ ω_F = 0` identically.
pub fn relative_closed(omega: &KForm, map: &PolyMap) -> bool {
    omega.exterior_derivative().wedge(map.omega_f()).is_zero()
}

/// Graded search for `ω = dΩ + Σ η_i ∧ df̄_i` with `wdeg Ω = wdeg ω`,
/// `wdeg η_i = wdeg ω − wdeg f_i`. `complete` holds when `dim V(J) < n−k−1`,
/// the depth condition on `J` under which a closed ω must admit such a witness.
pub fn relative_exact_homogeneous(omega: &KForm, map: &PolyMap) -> Result<RelativeExactness> {
    let w = map.weights();
    let n = map.nvars();
    let k = omega.degree();
    if !omega.is_homogeneous(w) {
        return Err(Error::NotHomogeneous);
    }
    let complete = jacobian_dimension(map) < n as i64 - k as i64 - 1;
    let Some(r) = omega.weighted_degree(w).finite() else {
        return Ok(RelativeExactness {
            witness: Some(RelativeWitness {
                potential: (k > 0).then(|| KForm::zero(n, k - 1)),
                etas: if k > 0 {
                    vec![KForm::zero(n, k - 1); map.ncomponents()]
                } else {
                    Vec::new()
                },
            }),
            complete,
        });
    };
    if k == 0 {
        // a nonzero function is never a sum of differentials
        return Ok(RelativeExactness {
            witness: None,
            complete,
        });
    }
    let r = i64::from(r);
    let mut slots = vec![Slot::space(&GradedSpaceSpec::exactly(w, k - 1, r), ColumnOp::Exterior)];
    for (top, &d) in map.tops().iter().zip(map.component_degrees()) {
        let dtop = KForm::from_poly(top.clone()).exterior_derivative();
        slots.push(Slot::space(
            &GradedSpaceSpec::exactly(w, k - 1, r - i64::from(d)),
            ColumnOp::WedgeRight(dtop),
        ));
    }
    let witness = graded_solve(omega, &slots, w)?.map(|wit| {
        let mut values = wit.slots.into_iter().map(|s| s.value);
        RelativeWitness {
            potential: values.next(),
            etas: values.collect(),
        }
    });
    Ok(RelativeExactness { witness, complete })
}

fn jacobian_dimension(map: &PolyMap) -> i64 {
    buchberger(map.jacobian_minors(), map.order()).ideal_dimension()
}

impl RelativeWitness {
    pub fn reconstruct(&self, map: &PolyMap, k: usize) -> KForm {
        let mut out = KForm::zero(map.nvars(), k);
        if let Some(p) = &self.potential {
            out += &p.exterior_derivative();
        }
        for (eta, top) in self.etas.iter().zip(map.tops()) {
            out += &eta.wedge(&KForm::from_poly(top.clone()).exterior_derivative());
        }
        out
    }
}

/// Decomposition of an `(n−q)`-form over `C[F]`: the class at `y = 0` gives
/// `ω = Σ λ_i ω_i + dΩ + Σ f_i η_i`; each `η_i` has strictly smaller degree and
/// is decomposed recursively, and `f_i dΩ_i = d(f_i Ω_i) − (−1)^{k−1} Ω_i ∧ df_i`
/// moves the sub-potentials into the relative terms.
pub fn relative_decompose(omega: &KForm, map: &PolyMap, basis: &InfinityBasis) -> Result<RelativeDecomposition> {
    require_isolated_cia(map)?;
    let k = map.fibre_dimension();
    if omega.degree() != k || omega.nvars() != map.nvars() {
        return Err(Error::IncompatibleDegrees(format!(
            "expected a {k}-form in {} variables",
            map.nvars()
        )));
    }
    decompose_rec(omega, map, basis, &FibrePoint::origin(map.ncomponents()))
}

fn decompose_rec(
    omega: &KForm,
    map: &PolyMap,
    basis: &InfinityBasis,
    origin: &FibrePoint,
) -> Result<RelativeDecomposition> {
    let n = map.nvars();
    let q = map.ncomponents();
    let k = map.fibre_dimension();
    let w = map.weights();
    let mut out = RelativeDecomposition {
        a: vec![Polynomial::zero(q); basis.len()],
        potential: KForm::zero(n, k - 1),
        etas: vec![KForm::zero(n, k - 1); q],
    };
    let degree = omega.weighted_degree(w);
    if degree.is_neg_infinity() {
        return Ok(out);
    }
    let class = fibre_class(omega, map, origin, basis)?;
    for (a, l) in out.a.iter_mut().zip(&class.lambda) {
        *a = Polynomial::constant(q, l.clone());
    }
    out.potential = class.potential;
    let sign = if (k - 1).is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    };
    for (i, eta) in class.etas.iter().enumerate() {
        if eta.is_zero() {
            continue;
        }
        if eta.weighted_degree(w) >= degree {
            return Err(Error::Internal("relative recursion did not lower the degree".into()));
        }
        let f_i = &map.components()[i];
        let sub = decompose_rec(eta, map, basis, origin)?;
        let t_i = Polynomial::var(q, i);
        for (a, b) in out.a.iter_mut().zip(&sub.a) {
            *a += &(&t_i * b);
        }
        out.potential += &sub.potential.mul_poly(f_i);
        for (e, z) in out.etas.iter_mut().zip(&sub.etas) {
            *e += &z.mul_poly(f_i);
        }
        out.etas[i] -= &sub.potential.scale(&sign);
    }
    Ok(out)
}

/// `R = A(F)` via elimination in `C[x, t]` modulo `(f_j − t_j)`; the `t_j` carry
/// weight `wdeg f_j` so the generators are homogeneous in their top parts.
pub fn is_in_subalgebra(r: &Polynomial, map: &PolyMap) -> Option<Polynomial> {
    let n = map.nvars();
    let q = map.ncomponents();
    let t_weights = Weights::new(map.component_degrees().to_vec()).expect("non-constant components");
    let order = MonomialOrder::elimination(map.weights(), &t_weights);
    let gens: Vec<Polynomial> = map
        .components()
        .iter()
        .enumerate()
        .map(|(j, f)| &f.extend_vars(q) - &Polynomial::var(n + q, n + j))
        .collect();
    let gb = buchberger(&gens, &order);
    gb.normal_form(&r.extend_vars(q)).restrict_to(n..n + q)
}

/// `a(F)` for a polynomial in the target variables.
pub fn substitute(a: &Polynomial, map: &PolyMap) -> Polynomial {
    a.compose(map.components())
}

fn check_fibre(omega: &KForm, class: &FibreClass, y: &FibrePoint, map: &PolyMap, basis: &InfinityBasis) -> bool {
    let w = map.weights();
    let k = map.fibre_dimension();
    if omega.degree() != k
        || class.lambda.len() != basis.len()
        || class.etas.len() != map.ncomponents()
        || y.len() != map.ncomponents()
        || class.potential.degree() + 1 != k
        || class.etas.iter().any(|e| e.degree() != k)
    {
        return false;
    }
    let deg = omega.weighted_degree(w);
    let mut rhs = class.potential.exterior_derivative();
    for ((l, form), &d) in class.lambda.iter().zip(&basis.forms).zip(&basis.degrees) {
        if !l.is_zero() {
            if !wdeg_at_most(WDegree::Finite(d), deg, 0) {
                return false;
            }
            rhs += &form.scale(l);
        }
    }
    for ((eta, g), &d) in class.etas.iter().zip(shifted(map, y)).zip(map.component_degrees()) {
        if !wdeg_at_most(eta.weighted_degree(w), deg, d) {
            return false;
        }
        rhs += &eta.mul_poly(&g);
    }
    wdeg_at_most(class.potential.weighted_degree(w), deg, 0) && rhs == *omega
}

fn check_relative(omega: &KForm, dec: &RelativeDecomposition, map: &PolyMap, basis: &InfinityBasis) -> bool {
    let w = map.weights();
    let k = map.fibre_dimension();
    let q = map.ncomponents();
    if omega.degree() != k
        || dec.a.len() != basis.len()
        || dec.etas.len() != q
        || dec.a.iter().any(|a| a.nvars() != q)
        || dec.potential.degree() + 1 != k
        || dec.etas.iter().any(|e| e.degree() + 1 != k)
    {
        return false;
    }
    let deg = omega.weighted_degree(w);
    let mut rhs = dec.potential.exterior_derivative();
    for ((a, form), &d) in dec.a.iter().zip(&basis.forms).zip(&basis.degrees) {
        let af = substitute(a, map);
        if !wdeg_at_most(af.weighted_degree(w), deg, d) {
            return false;
        }
        rhs += &form.mul_poly(&af);
    }
    for ((eta, f), &d) in dec.etas.iter().zip(map.components()).zip(map.component_degrees()) {
        if !wdeg_at_most(eta.weighted_degree(w), deg, d) {
            return false;
        }
        rhs += &eta.wedge(&KForm::from_poly(f.clone()).exterior_derivative());
    }
    wdeg_at_most(dec.potential.weighted_degree(w), deg, 0) && rhs == *omega
}

/// Substitutes a claimed decomposition into its defining identity and checks
/// every degree bound it promises.
pub fn verify_decomposition(omega: &KForm, result: Decomposition<'_>, map: &PolyMap, basis: &InfinityBasis) -> bool {
    match result {
        Decomposition::Fibre { class, point } => check_fibre(omega, class, point, map, basis),
        Decomposition::Relative(dec) => check_relative(omega, dec, map, basis),
    }
}

/// Closed `k`-forms of weighted degree `≤ bound` on `F^{-1}(y)`: a basis of the
/// kernel of `ω ↦ (dω ∧ ω_F mod (f − y))` over the bounded space.
pub fn closed_forms_on_fibre(map: &PolyMap, k: usize, y: &FibrePoint, degree_bound: u32) -> Vec<KForm> {
    let space = monomial_basis(&GradedSpaceSpec::at_most(map.weights(), k, i64::from(degree_bound)));
    if space.is_empty() {
        return Vec::new();
    }
    let gb = fibre_ideal(map, y);
    let images: Vec<KForm> = space
        .iter()
        .map(|b| {
            b.exterior_derivative()
                .wedge(map.omega_f())
                .map_coeffs(|c| gb.normal_form(c))
        })
        .collect();
    kernel(&images)
        .into_iter()
        .map(|v| {
            let mut form = KForm::zero(map.nvars(), k);
            for (c, b) in v.iter().zip(&space) {
                if !c.is_zero() {
                    form += &b.scale(c);
                }
            }
            form
        })
        .collect()
}

/// Checks that every closed `k`-form of degree `≤ D` on the fibre is exact there.
pub fn verify_vanishing(map: &PolyMap, k: usize, y: &FibrePoint, degree_bound: u32) -> Result<VanishingReport> {
    if k == 0 {
        return Err(Error::HypothesisViolated("vanishing needs k > 0".into()));
    }
    let limit = map.fibre_dimension() as i64 - k as i64;
    let dim = map.singular_dimension();
    if dim >= limit {
        return Err(Error::HypothesisViolated(format!(
            "dim V(I+J) = {dim} is not below n−q−k = {limit}"
        )));
    }
    let closed = closed_forms_on_fibre(map, k, y, degree_bound);
    let slots = fibre_slots(map, y, k, i64::from(degree_bound));
    let answers = solve_many(&closed, &slots)?;
    let failures: Vec<KForm> = closed
        .iter()
        .zip(&answers)
        .filter(|(_, a)| a.is_none())
        .map(|(f, _)| f.clone())
        .collect();
    Ok(VanishingReport {
        k,
        degree_bound,
        checked: closed.len(),
        exact: closed.len() - failures.len(),
        failures,
    })
}

/// The normal form of `p` modulo `(f − y)`.
pub fn fibre_normal_form(p: &Polynomial, map: &PolyMap, y: &FibrePoint) -> Polynomial {
    fibre_ideal(map, y).normal_form(p)
}
