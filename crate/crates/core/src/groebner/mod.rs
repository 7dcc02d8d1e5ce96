//! Buchberger's algorithm with the normal selection strategy and both
//! Buchberger criteria, producing reduced Gröbner bases.

mod order;

pub use order::{MonomialOrder, OrderKey};

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_traits::{One, Zero};

use crate::polyform::{Monomial, Polynomial, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
struct Term {
    key: OrderKey,
    mono: Monomial,
    coeff: Rational,
}

/// Polynomial with terms sorted descending under a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
struct OrderedPoly {
    terms: Vec<Term>,
}

impl OrderedPoly {
    fn from_poly(p: &Polynomial, order: &MonomialOrder) -> Self {
        let mut terms: Vec<Term> = p
            .terms()
            .map(|(m, c)| Term {
                key: order.key(m),
                mono: m.clone(),
                coeff: c.clone(),
            })
            .collect();
        terms.sort_by(|a, b| b.key.cmp(&a.key));
        OrderedPoly { terms }
    }

    fn from_work(work: Work) -> Self {
        OrderedPoly {
            terms: work
                .into_iter()
                .rev()
                .map(|(key, (mono, coeff))| Term { key, mono, coeff })
                .collect(),
        }
    }

    fn lead(&self) -> &Term {
        &self.terms[0]
    }

    fn make_monic(&mut self) {
        let lc = self.terms[0].coeff.clone();
        if !lc.is_one() {
            for t in &mut self.terms {
                t.coeff /= &lc;
            }
        }
    }

    fn to_poly(&self, nvars: usize) -> Polynomial {
        Polynomial::from_terms(nvars, self.terms.iter().map(|t| (t.mono.clone(), t.coeff.clone())))
    }
}

/// Working polynomial keyed by order key; the largest term is the last entry.
type Work = BTreeMap<OrderKey, (Monomial, Rational)>;

fn work_add(work: &mut Work, key: OrderKey, mono: Monomial, c: Rational) {
    match work.entry(key) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert((mono, c));
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            o.get_mut().1 += c;
            if o.get().1.is_zero() {
                o.remove();
            }
        }
    }
}

/// Adds `coeff · mono · g` (given `key(mono)`), skipping `g`'s leading term when `skip_lead`.
fn work_add_multiple(
    work: &mut Work,
    g: &OrderedPoly,
    key: &OrderKey,
    mono: &Monomial,
    coeff: &Rational,
    skip_lead: bool,
) {
    for t in g.terms.iter().skip(usize::from(skip_lead)) {
        work_add(work, &t.key + key, t.mono.mul(mono), &t.coeff * coeff);
    }
}

/// Reduced Gröbner basis of an ideal under a fixed monomial order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    order: MonomialOrder,
    gens: Vec<OrderedPoly>,
    reduced: bool,
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
/// The empty list (or a list of zeros) generates the zero ideal.
pub fn buchberger(gens: &[Polynomial], order: &MonomialOrder) -> GroebnerBasis {
    let n = order.nvars();
    for g in gens {
        assert_eq!(g.nvars(), n, "generator lives in a different ring");
    }
    let mut basis: Vec<OrderedPoly> = Vec::new();
    for g in gens.iter().filter(|g| !g.is_zero()) {
        let mut p = OrderedPoly::from_poly(g, order);
        p.make_monic();
        basis.push(p);
    }
    if basis.iter().any(|g| g.lead().mono.is_one()) {
        let one = OrderedPoly::from_poly(&Polynomial::one(n), order);
        return GroebnerBasis {
            order: order.clone(),
            gens: vec![one],
            reduced: true,
        };
    }

    let mut pending: Vec<(usize, usize)> = Vec::new();
    let mut pending_set: HashSet<(usize, usize)> = HashSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pending.push((i, j));
            pending_set.insert((i, j));
        }
    }

    while !pending.is_empty() {
        // normal strategy: smallest lcm first, ties by index
        let (pos, _) = pending
            .iter()
            .enumerate()
            .min_by(|(_, &(a, b)), (_, &(c, d))| {
                let la = basis[a].lead().mono.lcm(&basis[b].lead().mono);
                let lc = basis[c].lead().mono.lcm(&basis[d].lead().mono);
                order.key(&la).cmp(&order.key(&lc)).then((a, b).cmp(&(c, d)))
            })
            .unwrap();
        let (i, j) = pending.swap_remove(pos);
        pending_set.remove(&(i, j));

        let li = &basis[i].lead().mono;
        let lj = &basis[j].lead().mono;
        if li.is_coprime(lj) {
            continue;
        }
        let lcm = li.lcm(lj);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k].lead().mono.divides(&lcm)
                && !pending_set.contains(&(i.min(k), i.max(k)))
                && !pending_set.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }

        let s = s_polynomial(&basis[i], &basis[j], order);
        let h = reduce_work(s, &basis, None);
        if h.is_empty() {
            continue;
        }
        let mut h = OrderedPoly::from_work(h);
        h.make_monic();
        if h.lead().mono.is_one() {
            let one = OrderedPoly::from_poly(&Polynomial::one(n), order);
            return GroebnerBasis {
                order: order.clone(),
                gens: vec![one],
                reduced: true,
            };
        }
        let new = basis.len();
        basis.push(h);
        for k in 0..new {
            pending.push((k, new));
            pending_set.insert((k, new));
        }
    }

    GroebnerBasis {
        order: order.clone(),
        gens: interreduce(basis),
        reduced: true,
    }
}

fn s_polynomial(f: &OrderedPoly, g: &OrderedPoly, order: &MonomialOrder) -> Work {
    let lcm = f.lead().mono.lcm(&g.lead().mono);
    let mf = f.lead().mono.quotient_of(&lcm);
    let mg = g.lead().mono.quotient_of(&lcm);
    let mut work = Work::new();
    let kf = order.key(&mf);
    let kg = order.key(&mg);
    work_add_multiple(&mut work, f, &kf, &mf, &(Rational::one() / &f.lead().coeff), true);
    work_add_multiple(&mut work, g, &kg, &mg, &(-Rational::one() / &g.lead().coeff), true);
    work
}

/// Full reduction of `work` by `basis`; returns the remainder. When
/// `cofactors` is given, the quotients are accumulated into it.
fn reduce_work(mut work: Work, basis: &[OrderedPoly], mut cofactors: Option<&mut Vec<Work>>) -> Work {
    let mut rem = Work::new();
    while let Some((key, (mono, c))) = work.pop_last() {
        match basis.iter().position(|g| g.lead().mono.divides(&mono)) {
            Some(gi) => {
                let g = &basis[gi];
                let q = g.lead().mono.quotient_of(&mono);
                let qk = &key - &g.lead().key;
                let qc = &c / &g.lead().coeff;
                work_add_multiple(&mut work, g, &qk, &q, &(-&qc), true);
                if let Some(cf) = cofactors.as_deref_mut() {
                    work_add(&mut cf[gi], qk, q, qc);
                }
            }
            None => {
                rem.insert(key, (mono, c));
            }
        }
    }
    rem
}

fn interreduce(basis: Vec<OrderedPoly>) -> Vec<OrderedPoly> {
    // minimal basis: drop elements whose leading monomial is divisible by another's
    let mut minimal: Vec<OrderedPoly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let redundant = basis
            .iter()
            .enumerate()
            .any(|(j, h)| j != i && h.lead().mono.divides(&g.lead().mono) && (h.lead().mono != g.lead().mono || j < i));
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<OrderedPoly> = minimal
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let g = &minimal[i];
        let tail: Work = g.terms[1..]
            .iter()
            .map(|t| (t.key.clone(), (t.mono.clone(), t.coeff.clone())))
            .collect();
        let mut reduced = reduce_work(tail, &others, None);
        let lead = g.lead().clone();
        reduced.insert(lead.key, (lead.mono, lead.coeff));
        let mut p = OrderedPoly::from_work(reduced);
        p.make_monic();
        out.push(p);
    }
    out.sort_by(|a, b| a.lead().key.cmp(&b.lead().key));
    out
}

impl GroebnerBasis {
    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn nvars(&self) -> usize {
        self.order.nvars()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// Generators in ascending order of leading monomial.
    pub fn generators(&self) -> Vec<Polynomial> {
        self.gens.iter().map(|g| g.to_poly(self.nvars())).collect()
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.gens.iter().map(|g| g.lead().mono.clone()).collect()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.gens.iter().any(|g| g.lead().mono.is_one())
    }

    fn work_of(&self, p: &Polynomial) -> Work {
        assert_eq!(p.nvars(), self.nvars(), "polynomial lives in a different ring");
        p.terms()
            .map(|(m, c)| (self.order.key(m), (m.clone(), c.clone())))
            .collect()
    }

    fn poly_of(&self, w: Work) -> Polynomial {
        Polynomial::from_terms(self.nvars(), w.into_values())
    }

    /// Canonical remainder: supported on standard monomials only; zero iff `p` is in the ideal.
    pub fn normal_form(&self, p: &Polynomial) -> Polynomial {
        self.poly_of(reduce_work(self.work_of(p), &self.gens, None))
    }

    /// Normal form together with cofactors `c_i` such that `p - nf = Σ c_i g_i`,
    /// indexed like [`GroebnerBasis::generators`].
    pub fn normal_form_with_cofactors(&self, p: &Polynomial) -> (Polynomial, Vec<Polynomial>) {
        let mut cf = vec![Work::new(); self.gens.len()];
        let rem = reduce_work(self.work_of(p), &self.gens, Some(&mut cf));
        (self.poly_of(rem), cf.into_iter().map(|w| self.poly_of(w)).collect())
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        self.normal_form(p).is_zero()
    }

    /// Krull dimension of `V(ideal)`: the largest set of variables containing the
    /// support of no leading monomial; `-1` for the unit ideal.
    pub fn ideal_dimension(&self) -> i64 {
        if self.is_unit_ideal() {
            return -1;
        }
        let n = self.nvars();
        let supports: Vec<u64> = self
            .gens
            .iter()
            .map(|g| g.lead().mono.support().fold(0u64, |acc, i| acc | (1 << i)))
            .collect();
        let mut best = 0;
        for set in 0u64..(1u64 << n) {
            let size = set.count_ones() as i64;
            if size > best && supports.iter().all(|&s| s & !set != 0) {
                best = size;
            }
        }
        best
    }

    /// Standard monomials, ascending in the order; a basis of the quotient ring.
    pub fn quotient_vector_basis(&self) -> Result<Vec<Monomial>> {
        if self.is_unit_ideal() {
            return Ok(Vec::new());
        }
        if self.ideal_dimension() > 0 {
            return Err(Error::InfiniteQuotient);
        }
        let n = self.nvars();
        let leads = self.leading_monomials();
        let is_standard = |m: &Monomial| !leads.iter().any(|l| l.divides(m));
        let mut seen: HashSet<Monomial> = HashSet::new();
        let mut queue = VecDeque::from([Monomial::one(n)]);
        seen.insert(Monomial::one(n));
        let mut out = Vec::new();
        while let Some(m) = queue.pop_front() {
            for i in 0..n {
                let next = m.mul(&Monomial::var(n, i));
                if is_standard(&next) && seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
            out.push(m);
        }
        out.sort_by_key(|m| self.order.key(m));
        Ok(out)
    }

    /// Generators free of the eliminated (leading-block) variables: a basis
    /// of the elimination ideal when the order is an elimination order.
    pub fn elimination_ideal(&self) -> Vec<Polynomial> {
        let k = self.order.eliminated_count();
        self.generators()
            .into_iter()
            .filter(|g| g.terms().all(|(m, _)| m.exps()[..k].iter().all(|&e| e == 0)))
            .collect()
    }
}

/// Gröbner basis under a block order whose leading block is eliminated.
pub fn elimination_basis(gens: &[Polynomial], order: &MonomialOrder) -> Result<GroebnerBasis> {
    if order.eliminated_count() == 0 {
        return Err(Error::RingMismatch(
            "elimination needs a block order with an eliminated block".into(),
        ));
    }
    Ok(buchberger(gens, order))
}
