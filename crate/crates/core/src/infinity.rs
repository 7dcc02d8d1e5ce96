//! The fibre at infinity `F̄^{-1}(0)`: the ideals `I = (f̄_1..f̄_q)` and `J`
//! (maximal minors of `dF̄`), the complete-intersection test, the Milnor
//! number `μ = dim C[x]/(I+J)` and a weighted-homogeneous basis of the top
//! cohomology at infinity.

use num_traits::Zero;

use crate::gradedlin::{graded_solve, ColumnOp, GradedSpaceSpec, Slot};
use crate::groebner::{buchberger, GroebnerBasis, MonomialOrder};
use crate::polyform::{subsets, KForm, Polynomial, Rational, WDegree, Weights};
use crate::{Error, Result};

/// A polynomial map `F = (f_1, .., f_q)` with its weights and cached data at infinity.
#[derive(Debug, Clone)]
pub struct PolyMap {
    f: Vec<Polynomial>,
    weights: Weights,
    order: MonomialOrder,
    tops: Vec<Polynomial>,
    degrees: Vec<u32>,
    ideal_i: GroebnerBasis,
    minors: Vec<Polynomial>,
    ideal_ij: GroebnerBasis,
    omega_top: KForm,
    omega_f: KForm,
}

/// Outcome of the complete-intersection-at-infinity test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CiaReport {
    pub is_cia: bool,
    /// `dim V(I)`
    pub dim_fibre: i64,
    /// `dim V(I+J)`, `-1` when empty
    pub dim_singular: i64,
}

/// `ω = dΩ + Σ f̄_i Ω_i`. The potential is absent for 0-forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtInfinityWitness {
    pub potential: Option<KForm>,
    pub multipliers: Vec<KForm>,
}

/// μ weighted-homogeneous (n−q)-forms whose classes form a basis of the top
/// cohomology at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfinityBasis {
    pub forms: Vec<KForm>,
    pub degrees: Vec<u32>,
    pub mu: usize,
}

fn wedge_all(forms: impl IntoIterator<Item = KForm>, nvars: usize) -> KForm {
    forms
        .into_iter()
        .fold(KForm::from_poly(Polynomial::one(nvars)), |acc, f| acc.wedge(&f))
}

impl PolyMap {
    pub fn new(f: Vec<Polynomial>, weights: Weights) -> Result<Self> {
        let n = weights.len();
        let q = f.len();
        if q == 0 || n <= q {
            return Err(Error::NotEnoughVariables { n, q });
        }
        for (i, fi) in f.iter().enumerate() {
            if fi.nvars() != n {
                return Err(Error::RingMismatch(format!(
                    "f_{} has {} variables, weights have {n}",
                    i + 1,
                    fi.nvars()
                )));
            }
            if fi.is_zero() {
                return Err(Error::ZeroComponent(i + 1));
            }
            if fi.weighted_degree(&weights) == WDegree::Finite(0) {
                return Err(Error::ConstantComponent(i + 1));
            }
        }
        let order = MonomialOrder::weighted_revlex(&weights);
        let tops: Vec<Polynomial> = f.iter().map(|fi| fi.top_component(&weights)).collect::<Result<_>>()?;
        let degrees: Vec<u32> = tops
            .iter()
            .map(|t| t.weighted_degree(&weights).finite().unwrap())
            .collect();
        let ideal_i = buchberger(&tops, &order);
        let omega_top = wedge_all(
            tops.iter().map(|t| KForm::from_poly(t.clone()).exterior_derivative()),
            n,
        );
        let omega_f = wedge_all(f.iter().map(|t| KForm::from_poly(t.clone()).exterior_derivative()), n);
        // the coefficient of dx_S in df̄_1∧..∧df̄_q is the minor on the columns S
        let minors: Vec<Polynomial> = subsets(n, q).iter().map(|s| omega_top.coeff(s)).collect();
        let mut ij = tops.clone();
        ij.extend(minors.iter().cloned());
        let ideal_ij = buchberger(&ij, &order);
        Ok(PolyMap {
            f,
            weights,
            order,
            tops,
            degrees,
            ideal_i,
            minors,
            ideal_ij,
            omega_top,
            omega_f,
        })
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    pub fn ncomponents(&self) -> usize {
        self.f.len()
    }

    /// `n − q`, the dimension of the generic fibre.
    pub fn fibre_dimension(&self) -> usize {
        self.nvars() - self.ncomponents()
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.f
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    /// `f̄_i`
    pub fn tops(&self) -> &[Polynomial] {
        &self.tops
    }

    /// `wdeg(f_i)`
    pub fn component_degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn ideal_i(&self) -> &GroebnerBasis {
        &self.ideal_i
    }

    pub fn ideal_i_plus_j(&self) -> &GroebnerBasis {
        &self.ideal_ij
    }

    /// The `C(n, q)` maximal minors of `dF̄`, columns in lexicographic order.
    pub fn jacobian_minors(&self) -> &[Polynomial] {
        &self.minors
    }

    /// `ω_F̄ = df̄_1 ∧ .. ∧ df̄_q`
    pub fn omega_top(&self) -> &KForm {
        &self.omega_top
    }

    /// `ω_F = df_1 ∧ .. ∧ df_q`
    pub fn omega_f(&self) -> &KForm {
        &self.omega_f
    }

    pub fn is_complete_intersection_at_infinity(&self) -> CiaReport {
        let dim_singular = self.singular_dimension();
        CiaReport {
            is_cia: dim_singular < self.fibre_dimension() as i64,
            dim_fibre: self.ideal_i.ideal_dimension(),
            dim_singular,
        }
    }

    /// `dim V(I+J)`; `-1` when the singular locus at infinity is empty.
    pub fn singular_dimension(&self) -> i64 {
        self.ideal_ij.ideal_dimension()
    }

    pub fn milnor_number(&self) -> Result<usize> {
        let dim = self.singular_dimension();
        if dim > 0 {
            return Err(Error::NonIsolatedSingularity(dim));
        }
        Ok(self.ideal_ij.quotient_vector_basis()?.len())
    }

    /// `{ i_X(dx_S) : |S| = n−q+1 }`, generators of `ker i_X` on `Ω^{n−q}`.
    pub fn koszul_kernel_generators(&self) -> Vec<KForm> {
        let n = self.nvars();
        subsets(n, self.fibre_dimension() + 1)
            .iter()
            .map(|s| KForm::basic(n, s).euler_contraction(&self.weights))
            .collect()
    }

    /// `i_X(dω)/r`: the representative in `ker i_X` of the class of a
    /// homogeneous form of degree `r > 0`.
    pub fn euler_normalize(&self, omega: &KForm) -> Result<KForm> {
        if !omega.is_homogeneous(&self.weights) {
            return Err(Error::NotHomogeneous);
        }
        let r = match omega.weighted_degree(&self.weights) {
            WDegree::Finite(r) if r > 0 => r,
            _ => return Err(Error::NonPositiveDegree),
        };
        Ok(omega
            .exterior_derivative()
            .euler_contraction(&self.weights)
            .scale(&Rational::new(1.into(), r.into())))
    }

    /// `dω ∧ ω_F̄ ≡ 0 mod I`, coefficient by coefficient.
    pub fn closed_at_infinity(&self, omega: &KForm) -> bool {
        omega
            .exterior_derivative()
            .wedge(&self.omega_top)
            .coeffs()
            .all(|(_, c)| self.ideal_i.contains(c))
    }

    /// Slots for `dΩ + Σ f̄_i Ω_i` inside the graded piece of degree `r` of `Ω^k`.
    pub(crate) fn exactness_slots(&self, k: usize, r: u32) -> Vec<Slot> {
        let w = &self.weights;
        let r = i64::from(r);
        let mut slots = Vec::new();
        if k > 0 {
            slots.push(Slot::space(&GradedSpaceSpec::exactly(w, k - 1, r), ColumnOp::Exterior));
        }
        for (top, &d) in self.tops.iter().zip(&self.degrees) {
            slots.push(Slot::space(
                &GradedSpaceSpec::exactly(w, k, r - i64::from(d)),
                ColumnOp::Multiply(top.clone()),
            ));
        }
        slots
    }

    fn zero_witness(&self, k: usize) -> AtInfinityWitness {
        let n = self.nvars();
        AtInfinityWitness {
            potential: (k > 0).then(|| KForm::zero(n, k - 1)),
            multipliers: vec![KForm::zero(n, k); self.ncomponents()],
        }
    }

    /// Decides `ω ∈ dΩ^{k−1} + IΩ^k` one homogeneous component at a time
    /// (the subspace is graded) and returns a witness when it holds.
    pub fn exact_at_infinity(&self, omega: &KForm) -> Option<AtInfinityWitness> {
        let k = omega.degree();
        let mut acc = self.zero_witness(k);
        for (r, comp) in omega.homogeneous_components(&self.weights) {
            let slots = self.exactness_slots(k, r);
            let wit = graded_solve(&comp, &slots, &self.weights).expect("exactness slots are graded")?;
            let mut values = wit.slots.into_iter().map(|s| s.value);
            if let Some(p) = acc.potential.as_mut() {
                *p += &values.next().unwrap();
            }
            for (m, v) in acc.multipliers.iter_mut().zip(values) {
                *m += &v;
            }
        }
        Some(acc)
    }

    /// Coordinates of the class of a homogeneous `(n−q)`-form in `basis`:
    /// `ω = Σ c_i ω_i + dΩ + Σ f̄_i Ω_i` with only same-degree basis forms used.
    pub fn coordinates_at_infinity(
        &self,
        omega: &KForm,
        basis: &InfinityBasis,
    ) -> Result<Option<(Vec<Rational>, AtInfinityWitness)>> {
        let k = omega.degree();
        let mut coords = vec![Rational::zero(); basis.forms.len()];
        let Some(r) = omega.weighted_degree(&self.weights).finite() else {
            return Ok(Some((coords, self.zero_witness(k))));
        };
        let idx: Vec<usize> = (0..basis.forms.len()).filter(|&i| basis.degrees[i] == r).collect();
        let mut slots = vec![Slot::span(
            self.nvars(),
            k,
            idx.iter().map(|&i| basis.forms[i].clone()).collect(),
        )];
        slots.extend(self.exactness_slots(k, r));
        let Some(wit) = graded_solve(omega, &slots, &self.weights)? else {
            return Ok(None);
        };
        for (j, &i) in idx.iter().enumerate() {
            coords[i] = wit.slots[0].coefficients[j].clone();
        }
        let mut values = wit.slots.into_iter().skip(1).map(|s| s.value);
        let potential = (k > 0).then(|| values.next().unwrap());
        Ok(Some((
            coords,
            AtInfinityWitness {
                potential,
                multipliers: values.collect(),
            },
        )))
    }

    fn require_isolated_cia(&self) -> Result<()> {
        let report = self.is_complete_intersection_at_infinity();
        if !report.is_cia {
            return Err(Error::NotCompleteIntersection);
        }
        if report.dim_singular > 0 {
            return Err(Error::NonIsolatedSingularity(report.dim_singular));
        }
        Ok(())
    }

    /// Greedy selection from `{P·ω_l}` (standard monomials of `I+J` times Koszul
    /// generators) by ascending degree: a candidate is kept unless it lies in
    /// the exact-at-infinity subspace plus the span of kept forms.
    pub fn infinity_basis(&self) -> Result<InfinityBasis> {
        self.require_isolated_cia()?;
        let mu = self.milnor_number()?;
        let n = self.nvars();
        let k = self.fibre_dimension();
        let w = &self.weights;
        let generators = self.koszul_kernel_generators();
        let mut candidates: Vec<(u32, KForm)> = Vec::new();
        for m in self.ideal_ij.quotient_vector_basis()? {
            let p = Polynomial::term(m, Rational::from_integer(1.into()));
            for g in &generators {
                let c = g.mul_poly(&p);
                let d = c.weighted_degree(w).finite().expect("nonzero candidate");
                candidates.push((d, c));
            }
        }
        // stable: ties keep enumeration order
        candidates.sort_by_key(|(d, _)| *d);

        let mut forms: Vec<KForm> = Vec::new();
        let mut degrees: Vec<u32> = Vec::new();
        for (d, c) in candidates {
            if forms.len() == mu {
                break;
            }
            let same: Vec<KForm> = forms
                .iter()
                .zip(&degrees)
                .filter(|(_, &e)| e == d)
                .map(|(f, _)| f.clone())
                .collect();
            let mut slots = vec![Slot::span(n, k, same)];
            slots.extend(self.exactness_slots(k, d));
            if graded_solve(&c, &slots, w)?.is_none() {
                forms.push(c);
                degrees.push(d);
            }
        }
        if forms.len() < mu {
            return Err(Error::Internal(format!(
                "generating set of the cohomology at infinity spans only {} of {mu} dimensions",
                forms.len()
            )));
        }
        Ok(InfinityBasis { forms, degrees, mu })
    }
}

impl AtInfinityWitness {
    pub fn reconstruct(&self, map: &PolyMap, k: usize) -> KForm {
        let mut out = KForm::zero(map.nvars(), k);
        if let Some(p) = &self.potential {
            out += &p.exterior_derivative();
        }
        for (m, top) in self.multipliers.iter().zip(map.tops()) {
            out += &m.mul_poly(top);
        }
        out
    }
}

impl InfinityBasis {
    /// Validates a user-supplied basis: μ homogeneous `(n−q)`-forms of positive
    /// degree, independent modulo forms exact at infinity.
    pub fn from_forms(map: &PolyMap, forms: Vec<KForm>) -> Result<Self> {
        map.require_isolated_cia()?;
        let mu = map.milnor_number()?;
        let w = map.weights();
        let k = map.fibre_dimension();
        let mut degrees = Vec::with_capacity(forms.len());
        for f in &forms {
            if f.degree() != k || f.nvars() != map.nvars() {
                return Err(Error::IncompatibleDegrees(format!("basis forms must be {k}-forms")));
            }
            if !f.is_homogeneous(w) {
                return Err(Error::NotHomogeneous);
            }
            match f.weighted_degree(w) {
                WDegree::Finite(d) if d > 0 => degrees.push(d),
                _ => return Err(Error::NonPositiveDegree),
            }
        }
        if forms.len() != mu {
            return Err(Error::HypothesisViolated(format!(
                "expected {mu} basis forms, got {}",
                forms.len()
            )));
        }
        for (i, f) in forms.iter().enumerate() {
            let others: Vec<KForm> = forms
                .iter()
                .enumerate()
                .filter(|&(j, g)| j != i && degrees[j] == degrees[i] && !g.is_zero())
                .map(|(_, g)| g.clone())
                .collect();
            let mut slots = vec![Slot::span(map.nvars(), k, others)];
            slots.extend(map.exactness_slots(k, degrees[i]));
            if graded_solve(f, &slots, w)?.is_some() {
                return Err(Error::HypothesisViolated(format!(
                    "basis form {} is dependent modulo exact forms",
                    i + 1
                )));
            }
        }
        Ok(InfinityBasis { forms, degrees, mu })
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}
