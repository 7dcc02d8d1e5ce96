use num_traits::Zero;
use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use super::{Monomial, Polynomial, Rational, WDegree, Weights};
use crate::{Error, Result};

/// Polynomial differential k-form `Σ_S P_S dx_S`.
///
/// Keys are strictly increasing index tuples of length `k`; zero coefficients
/// are never stored. Forms of degree `k > n` exist only as zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KForm {
    nvars: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, Polynomial>,
}

/// All strictly increasing `k`-tuples from `0..n`, lexicographically.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Sorts an index sequence, returning the permutation sign, or `None` on a repeat.
fn sort_with_sign(indices: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = indices.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// `dx_a ∧ dx_b` for sorted disjoint tuples: merged tuple and sign.
fn merge(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut inversions = 0usize;
    for &j in b {
        for &i in a {
            if i == j {
                return None;
            }
            if i > j {
                inversions += 1;
            }
        }
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable();
    Some((out, if inversions.is_multiple_of(2) { 1 } else { -1 }))
}

impl KForm {
    pub fn zero(nvars: usize, degree: usize) -> Self {
        KForm {
            nvars,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// A polynomial as a 0-form.
    pub fn from_poly(p: Polynomial) -> Self {
        let nvars = p.nvars();
        let mut f = KForm::zero(nvars, 0);
        if !p.is_zero() {
            f.coeffs.insert(Vec::new(), p);
        }
        f
    }

    /// `p dx_{i1} ∧ .. ∧ dx_{ik}` for an arbitrary (unsorted) index sequence.
    pub fn monomial_form(p: Polynomial, indices: &[usize]) -> Self {
        let nvars = p.nvars();
        assert!(indices.iter().all(|&i| i < nvars), "differential index out of range");
        let mut f = KForm::zero(nvars, indices.len());
        if let Some((sorted, sign)) = sort_with_sign(indices) {
            let c = if sign < 0 { -&p } else { p };
            f.add_coeff(sorted, &c);
        }
        f
    }

    /// `dx_{i1} ∧ .. ∧ dx_{ik}`.
    pub fn basic(nvars: usize, indices: &[usize]) -> Self {
        Self::monomial_form(Polynomial::one(nvars), indices)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&Vec<usize>, &Polynomial)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, indices: &[usize]) -> Polynomial {
        self.coeffs
            .get(indices)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.nvars))
    }

    /// Flattened terms `(indices, monomial, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Monomial, &Rational)> {
        self.coeffs
            .iter()
            .flat_map(|(s, p)| p.terms().map(move |(m, c)| (s, m, c)))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.values().map(Polynomial::len).sum()
    }

    /// The coefficient of a 0-form.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        (self.degree == 0).then(|| self.coeff(&[]))
    }

    /// Adds `p dx_S` for a sorted tuple `S`.
    pub fn add_coeff(&mut self, indices: Vec<usize>, p: &Polynomial) {
        debug_assert_eq!(indices.len(), self.degree);
        if p.is_zero() {
            return;
        }
        match self.coeffs.entry(indices) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(p.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += p;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_term(&mut self, indices: &[usize], m: Monomial, c: Rational) {
        debug_assert_eq!(indices.len(), self.degree);
        if c.is_zero() {
            return;
        }
        let nvars = self.nvars;
        let slot = self
            .coeffs
            .entry(indices.to_vec())
            .or_insert_with(|| Polynomial::zero(nvars));
        slot.add_term(m, c);
        if slot.is_zero() {
            self.coeffs.remove(indices);
        }
    }

    pub fn scale(&self, c: &Rational) -> KForm {
        self.map_coeffs(|p| p.scale(c))
    }

    pub fn mul_poly(&self, p: &Polynomial) -> KForm {
        self.map_coeffs(|c| c * p)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Polynomial) -> Polynomial) -> KForm {
        let mut out = KForm::zero(self.nvars, self.degree);
        for (s, p) in &self.coeffs {
            let q = f(p);
            if !q.is_zero() {
                out.nvars = q.nvars();
                out.coeffs.insert(s.clone(), q);
            }
        }
        out
    }

    /// Exterior product; `dx_S ∧ dx_T` is reordered by adjacent transpositions.
    pub fn wedge(&self, other: &KForm) -> KForm {
        assert_eq!(self.nvars, other.nvars, "ring mismatch");
        let mut out = KForm::zero(self.nvars, self.degree + other.degree);
        for (s, p) in &self.coeffs {
            for (t, q) in &other.coeffs {
                if let Some((u, sign)) = merge(s, t) {
                    let pq = p * q;
                    let c = if sign < 0 { -&pq } else { pq };
                    out.add_coeff(u, &c);
                }
            }
        }
        out
    }

    pub fn exterior_derivative(&self) -> KForm {
        let mut out = KForm::zero(self.nvars, self.degree + 1);
        for (s, p) in &self.coeffs {
            for i in 0..self.nvars {
                if s.contains(&i) {
                    continue;
                }
                let dp = p.derivative(i);
                if dp.is_zero() {
                    continue;
                }
                let (u, sign) = merge(&[i], s).expect("disjoint");
                let c = if sign < 0 { -&dp } else { dp };
                out.add_coeff(u, &c);
            }
        }
        out
    }

    /// Interior product with the Euler field `X = Σ p_i x_i ∂/∂x_i`.
    /// A 0-form contracts to zero.
    pub fn euler_contraction(&self, w: &Weights) -> KForm {
        assert_eq!(w.len(), self.nvars, "weights do not match the ring");
        if self.degree == 0 {
            return KForm::zero(self.nvars, 0);
        }
        let mut out = KForm::zero(self.nvars, self.degree - 1);
        for (s, p) in &self.coeffs {
            for (pos, &i) in s.iter().enumerate() {
                let mut rest = s.clone();
                rest.remove(pos);
                let factor = Polynomial::term(Monomial::var(self.nvars, i), Rational::from_integer(w.get(i).into()));
                let mut c = p * &factor;
                if pos % 2 == 1 {
                    c = -&c;
                }
                out.add_coeff(rest, &c);
            }
        }
        out
    }

    /// `L_X ω = d(i_X ω) + i_X(dω)`.
    pub fn lie_derivative(&self, w: &Weights) -> KForm {
        let mut a = self.euler_contraction(w).exterior_derivative();
        if self.degree == 0 {
            a = KForm::zero(self.nvars, 0);
        }
        let b = self.exterior_derivative().euler_contraction(w);
        &a + &b
    }

    /// Pullback along `x_i ↦ t^{p_i} x_i` with `dx_i ↦ t^{p_i} dx_i`;
    /// `t` is appended as the last variable.
    pub fn scaling_substitution(&self, w: &Weights) -> KForm {
        let n = self.nvars;
        let mut out = KForm::zero(n + 1, self.degree);
        for (s, p) in &self.coeffs {
            let shift = w.differential_degree(s);
            for (m, c) in p.terms() {
                let mut e = m.0.clone();
                e.push(m.degree(w) + shift);
                out.add_term(s, Monomial(e), c.clone());
            }
        }
        out
    }

    pub fn weighted_degree(&self, w: &Weights) -> WDegree {
        self.coeffs
            .iter()
            .map(|(s, p)| match p.weighted_degree(w) {
                WDegree::Finite(d) => WDegree::Finite(d + w.differential_degree(s)),
                WDegree::NegInfinity => WDegree::NegInfinity,
            })
            .max()
            .unwrap_or(WDegree::NegInfinity)
    }

    pub fn homogeneous_component(&self, w: &Weights, r: u32) -> KForm {
        let mut out = KForm::zero(self.nvars, self.degree);
        for (s, p) in &self.coeffs {
            let shift = w.differential_degree(s);
            if shift > r {
                continue;
            }
            let c = p.homogeneous_component(w, r - shift);
            if !c.is_zero() {
                out.coeffs.insert(s.clone(), c);
            }
        }
        out
    }

    /// Nonzero weighted-homogeneous components keyed by degree.
    pub fn homogeneous_components(&self, w: &Weights) -> BTreeMap<u32, KForm> {
        let mut out: BTreeMap<u32, KForm> = BTreeMap::new();
        for (s, m, c) in self.terms() {
            let d = m.degree(w) + w.differential_degree(s);
            out.entry(d)
                .or_insert_with(|| KForm::zero(self.nvars, self.degree))
                .add_term(s, m.clone(), c.clone());
        }
        out
    }

    pub fn top_component(&self, w: &Weights) -> Result<KForm> {
        match self.weighted_degree(w) {
            WDegree::NegInfinity => Err(Error::ZeroLeadingTerm),
            WDegree::Finite(r) => Ok(self.homogeneous_component(w, r)),
        }
    }

    pub fn is_homogeneous(&self, w: &Weights) -> bool {
        self.homogeneous_components(w).len() <= 1
    }

    pub fn extend_vars(&self, extra: usize) -> KForm {
        let mut out = KForm::zero(self.nvars + extra, self.degree);
        for (s, p) in &self.coeffs {
            out.coeffs.insert(s.clone(), p.extend_vars(extra));
        }
        out
    }
}

impl AddAssign<&KForm> for KForm {
    fn add_assign(&mut self, rhs: &KForm) {
        assert_eq!(self.nvars, rhs.nvars, "ring mismatch");
        assert_eq!(self.degree, rhs.degree, "form degree mismatch");
        for (s, p) in &rhs.coeffs {
            self.add_coeff(s.clone(), p);
        }
    }
}

impl SubAssign<&KForm> for KForm {
    fn sub_assign(&mut self, rhs: &KForm) {
        *self += &(-rhs);
    }
}

impl Add for &KForm {
    type Output = KForm;
    fn add(self, rhs: &KForm) -> KForm {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &KForm {
    type Output = KForm;
    fn sub(self, rhs: &KForm) -> KForm {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        self.map_coeffs(|p| -p)
    }
}

impl Neg for KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        -&self
    }
}

impl Add for KForm {
    type Output = KForm;
    fn add(self, rhs: KForm) -> KForm {
        &self + &rhs
    }
}

impl Sub for KForm {
    type Output = KForm;
    fn sub(self, rhs: KForm) -> KForm {
        &self - &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyform::{rat, ratio};

    fn v(n: usize, i: usize) -> Polynomial {
        Polynomial::var(n, i)
    }

    fn dx(n: usize, i: usize) -> KForm {
        KForm::basic(n, &[i])
    }

    #[test]
    fn wedge_signs() {
        let n = 2;
        assert_eq!(dx(n, 0).wedge(&dx(n, 1)), KForm::basic(n, &[0, 1]));
        assert_eq!(dx(n, 1).wedge(&dx(n, 0)), -&KForm::basic(n, &[0, 1]));
        assert!(dx(n, 0).wedge(&dx(n, 0)).is_zero());
        let a = dx(n, 1).mul_poly(&v(n, 0));
        let b = dx(n, 0).mul_poly(&v(n, 1));
        let expected = KForm::monomial_form(-&(&v(n, 0) * &v(n, 1)), &[0, 1]);
        assert_eq!(a.wedge(&b), expected);
    }

    #[test]
    fn exterior_derivative_examples() {
        let n = 3;
        assert!(KForm::from_poly(Polynomial::constant(n, rat(7)))
            .exterior_derivative()
            .is_zero());
        let xy = &v(n, 0) * &v(n, 1);
        let expected = &dx(n, 0).mul_poly(&v(n, 1)) + &dx(n, 1).mul_poly(&v(n, 0));
        assert_eq!(KForm::from_poly(xy).exterior_derivative(), expected);
        // d(z dx - x dz) = 2 dz∧dx
        let w1 = &dx(n, 0).mul_poly(&v(n, 2)) - &dx(n, 2).mul_poly(&v(n, 0));
        let expected = KForm::basic(n, &[2, 0]).scale(&rat(2));
        assert_eq!(w1.exterior_derivative(), expected);
    }

    #[test]
    fn euler_contraction_examples() {
        let w = Weights::new(vec![3, 5]).unwrap();
        assert_eq!(dx(2, 1).euler_contraction(&w), KForm::from_poly(v(2, 1).scale(&rat(5))));
        let w2 = Weights::standard(2);
        let expected = &dx(2, 1).mul_poly(&v(2, 0)) - &dx(2, 0).mul_poly(&v(2, 1));
        assert_eq!(KForm::basic(2, &[0, 1]).euler_contraction(&w2), expected);
        let w3 = Weights::standard(3);
        let expected = &(&KForm::basic(3, &[1, 2]).mul_poly(&v(3, 0)) - &KForm::basic(3, &[0, 2]).mul_poly(&v(3, 1)))
            + &KForm::basic(3, &[0, 1]).mul_poly(&v(3, 2));
        let got = KForm::basic(3, &[0, 1, 2]).euler_contraction(&w3);
        assert_eq!(got, expected);
        assert!(got.euler_contraction(&w3).is_zero());
        assert!(KForm::from_poly(v(2, 0)).euler_contraction(&w2).is_zero());
    }

    #[test]
    fn lie_derivative_examples() {
        let w = Weights::standard(2);
        let xdy = dx(2, 1).mul_poly(&v(2, 0));
        assert_eq!(xdy.lie_derivative(&w), xdy.scale(&rat(2)));
        assert!(KForm::from_poly(Polynomial::one(2)).lie_derivative(&w).is_zero());
        let w32 = Weights::new(vec![3, 2]).unwrap();
        let p = KForm::from_poly(&v(2, 0).pow(2) + &v(2, 1).pow(3));
        assert_eq!(p.lie_derivative(&w32), p.scale(&rat(6)));
    }

    #[test]
    fn scaling_substitution_examples() {
        let w = Weights::standard(2);
        let xdy = dx(2, 1).mul_poly(&v(2, 0));
        let t2 = Polynomial::var(3, 2).pow(2);
        assert_eq!(xdy.scaling_substitution(&w), xdy.extend_vars(1).mul_poly(&t2));
        let w1 = Weights::standard(1);
        let p = KForm::from_poly(&v(1, 0) + &v(1, 0).pow(2));
        let t = Polynomial::var(2, 1);
        let x = Polynomial::var(2, 0);
        let expected = &(&t * &x) + &(&t.pow(2) * &x.pow(2));
        assert_eq!(p.scaling_substitution(&w1), KForm::from_poly(expected));
    }

    #[test]
    fn degrees_and_components() {
        let w = Weights::new(vec![1, 2]).unwrap();
        let f = &dx(2, 0).mul_poly(&v(2, 1)) + &dx(2, 1).scale(&ratio(1, 2));
        assert_eq!(f.weighted_degree(&w), WDegree::Finite(3));
        assert_eq!(f.top_component(&w).unwrap(), dx(2, 0).mul_poly(&v(2, 1)));
        assert_eq!(f.homogeneous_components(&w).len(), 2);
        assert!(KForm::basic(2, &[0, 1, 1]).is_zero());
        assert_eq!(KForm::zero(2, 1).weighted_degree(&w), WDegree::NegInfinity);
    }

    #[test]
    fn subsets_enumerate_in_lex_order() {
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(2, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(2, 3).is_empty());
    }
}
