//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use fibera::gradedlin::monomials_of_degree;
use fibera::infinity::PolyMap;
use fibera::polyform::{subsets, KForm, Monomial, Polynomial, Rational, Weights};
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn var(n: usize, i: usize) -> Polynomial {
    Polynomial::var(n, i)
}

pub fn dx(n: usize, i: usize) -> KForm {
    KForm::basic(n, &[i])
}

/// `(xz, x² + y² − z²)` with standard weights.
pub fn worked_example() -> PolyMap {
    let (x, y, z) = (var(3, 0), var(3, 1), var(3, 2));
    PolyMap::new(
        vec![&x * &z, &(&x.pow(2) + &y.pow(2)) - &z.pow(2)],
        Weights::standard(3),
    )
    .unwrap()
}

pub fn sphere() -> PolyMap {
    let f = &(&var(3, 0).pow(2) + &var(3, 1).pow(2)) + &var(3, 2).pow(2);
    PolyMap::new(vec![f], Weights::standard(3)).unwrap()
}

pub fn circle() -> PolyMap {
    PolyMap::new(vec![&var(2, 0).pow(2) + &var(2, 1).pow(2)], Weights::standard(2)).unwrap()
}

pub fn cusp() -> PolyMap {
    PolyMap::new(
        vec![&var(2, 0).pow(2) + &var(2, 1).pow(3)],
        Weights::new(vec![3, 2]).unwrap(),
    )
    .unwrap()
}

pub fn line() -> PolyMap {
    PolyMap::new(vec![var(2, 0)], Weights::standard(2)).unwrap()
}

/// `x⁴ + x²y²` on C².
pub fn non_cia() -> PolyMap {
    let (x, y) = (var(2, 0), var(2, 1));
    PolyMap::new(vec![&x.pow(4) + &(&x.pow(2) * &y.pow(2))], Weights::standard(2)).unwrap()
}

/// `(x₁² + x₂² + x₃² + x₄², x₁x₂ + x₃x₄)` on C⁴.
pub fn four_variable_map() -> PolyMap {
    let x: Vec<Polynomial> = (0..4).map(|i| var(4, i)).collect();
    let f1 = x.iter().fold(Polynomial::zero(4), |acc, v| &acc + &v.pow(2));
    let f2 = &(&x[0] * &x[1]) + &(&x[2] * &x[3]);
    PolyMap::new(vec![f1, f2], Weights::standard(4)).unwrap()
}

/// The five forms listed for the worked example.
pub fn published_forms() -> Vec<KForm> {
    let (x, y, z) = (var(3, 0), var(3, 1), var(3, 2));
    let w1 = &dx(3, 0).mul_poly(&z) - &dx(3, 2).mul_poly(&x);
    let w2 = &dx(3, 2).mul_poly(&y) - &dx(3, 1).mul_poly(&z);
    let w3 = &dx(3, 1).mul_poly(&x) - &dx(3, 0).mul_poly(&y);
    let w4 = w2.mul_poly(&x);
    let w5 = w1.mul_poly(&z);
    vec![w1, w2, w3, w4, w5]
}

pub fn small_rational(rng: &mut impl Rng) -> Rational {
    let mut c = 0;
    while c == 0 {
        c = rng.gen_range(-4..=4);
    }
    if rng.gen_bool(0.2) {
        Rational::new(c.into(), rng.gen_range(2..=3).into())
    } else {
        rat(c)
    }
}

/// Monomials of weighted degree at most `d`.
pub fn monomials_up_to(w: &Weights, d: i64) -> Vec<Monomial> {
    (0..=d.max(-1)).flat_map(|e| monomials_of_degree(w, e as u32)).collect()
}

pub fn random_poly(rng: &mut impl Rng, w: &Weights, max_deg: i64, terms: usize) -> Polynomial {
    let monos = monomials_up_to(w, max_deg);
    let mut p = Polynomial::zero(w.len());
    if monos.is_empty() {
        return p;
    }
    for _ in 0..terms {
        let m = monos[rng.gen_range(0..monos.len())].clone();
        p.add_term(m, small_rational(rng));
    }
    p
}

/// Random `k`-form with every term of weighted degree at most `max_deg`.
pub fn random_form(rng: &mut impl Rng, w: &Weights, k: usize, max_deg: i64, terms: usize) -> KForm {
    let n = w.len();
    let tuples = subsets(n, k);
    let mut out = KForm::zero(n, k);
    for _ in 0..terms {
        let s = &tuples[rng.gen_range(0..tuples.len())];
        let room = max_deg - i64::from(w.differential_degree(s));
        if room < 0 {
            continue;
        }
        let p = random_poly(rng, w, room, 1);
        out += &KForm::monomial_form(p, s);
    }
    out
}

pub fn random_weights(rng: &mut impl Rng, n: usize) -> Weights {
    Weights::new((0..n).map(|_| rng.gen_range(1..=4)).collect()).unwrap()
}

/// Coordinates of forms in a common basis of `(indices, monomial)` keys.
pub fn vectorize(forms: &[KForm]) -> Vec<Vec<Rational>> {
    let mut keys: BTreeMap<(Vec<usize>, Monomial), usize> = BTreeMap::new();
    for f in forms {
        for (s, m, _) in f.terms() {
            let next = keys.len();
            keys.entry((s.clone(), m.clone())).or_insert(next);
        }
    }
    forms
        .iter()
        .map(|f| {
            let mut v = vec![Rational::zero(); keys.len()];
            for (s, m, c) in f.terms() {
                v[keys[&(s.clone(), m.clone())]] = c.clone();
            }
            v
        })
        .collect()
}

/// Rank of a list of vectors by dense Gaussian elimination over Q.
pub fn dense_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = Rational::one() / rows[rank][c].clone();
        let pivot: Vec<Rational> = rows[rank].iter().map(|v| v * &inv).collect();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, pv) in row.iter_mut().zip(&pivot) {
                    *x -= &f * pv;
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

pub fn forms_rank(forms: &[KForm]) -> usize {
    dense_rank(vectorize(forms))
}

/// Spanning set of the exact-at-infinity forms of degree exactly `r`:
/// `d(m dx_S)` for `(k−1)`-monomial forms and `f̄_i · m dx_S` for `k`-monomial forms.
pub fn exact_at_infinity_spanners(map: &PolyMap, k: usize, r: u32) -> Vec<KForm> {
    let w = map.weights();
    let n = map.nvars();
    let mut out = Vec::new();
    let monomial_forms = |deg: i64, kk: usize| -> Vec<KForm> {
        let mut v = Vec::new();
        for s in subsets(n, kk) {
            let rest = deg - i64::from(w.differential_degree(&s));
            if rest < 0 {
                continue;
            }
            for m in monomials_of_degree(w, rest as u32) {
                v.push(KForm::monomial_form(Polynomial::term(m, Rational::one()), &s));
            }
        }
        v
    };
    if k > 0 {
        out.extend(
            monomial_forms(i64::from(r), k - 1)
                .iter()
                .map(KForm::exterior_derivative),
        );
    }
    for (top, &d) in map.tops().iter().zip(map.component_degrees()) {
        out.extend(
            monomial_forms(i64::from(r) - i64::from(d), k)
                .iter()
                .map(|f| f.mul_poly(top)),
        );
    }
    out
}

/// Rank of homogeneous forms modulo exact-at-infinity forms, degree by degree.
pub fn rank_modulo_exact_at_infinity(map: &PolyMap, forms: &[KForm]) -> usize {
    let w = map.weights();
    let mut by_degree: BTreeMap<u32, Vec<KForm>> = BTreeMap::new();
    for f in forms {
        if let Some(d) = f.weighted_degree(w).finite() {
            by_degree.entry(d).or_default().push(f.clone());
        }
    }
    by_degree
        .into_iter()
        .map(|(r, fs)| {
            let k = fs[0].degree();
            let e = exact_at_infinity_spanners(map, k, r);
            let base = forms_rank(&e);
            let mut all = e;
            all.extend(fs);
            forms_rank(&all) - base
        })
        .sum()
}

/// `dim C[x]/K` for an ideal generated by weighted-homogeneous polynomials,
/// summing `dim R_d − dim K_d` over degrees until a full window of zero pieces.
/// `K_d` is spanned by monomial multiples of the generators.
pub fn graded_quotient_dimension(gens: &[Polynomial], w: &Weights, max_deg: u32) -> Option<usize> {
    let window = *w.as_slice().iter().max().unwrap();
    let mut total = 0;
    let mut zeros = 0;
    for d in 0..=max_deg {
        let monos = monomials_of_degree(w, d);
        let mut rows = Vec::new();
        for g in gens.iter().filter(|g| !g.is_zero()) {
            let gd = g.weighted_degree(w).finite().unwrap();
            if gd > d {
                continue;
            }
            for m in monomials_of_degree(w, d - gd) {
                let prod = g.mul_term(&m, &Rational::one());
                rows.push(monos.iter().map(|b| prod.coeff(b)).collect::<Vec<_>>());
            }
        }
        let piece = monos.len() - if rows.is_empty() { 0 } else { dense_rank(rows) };
        total += piece;
        zeros = if piece == 0 { zeros + 1 } else { 0 };
        if zeros >= window {
            return Some(total);
        }
    }
    None
}

/// Maximal minors of the Jacobian of the top components, by cofactor expansion.
pub fn minors_by_expansion(map: &PolyMap) -> Vec<Polynomial> {
    let n = map.nvars();
    let q = map.ncomponents();
    let jac: Vec<Vec<Polynomial>> = map
        .tops()
        .iter()
        .map(|f| (0..n).map(|j| f.derivative(j)).collect())
        .collect();
    fn det(m: &[Vec<Polynomial>], nvars: usize) -> Polynomial {
        if m.is_empty() {
            return Polynomial::one(nvars);
        }
        let mut acc = Polynomial::zero(nvars);
        for c in 0..m.len() {
            let minor: Vec<Vec<Polynomial>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != c)
                        .map(|(_, p)| p.clone())
                        .collect()
                })
                .collect();
            let term = &m[0][c] * &det(&minor, nvars);
            if c % 2 == 0 {
                acc += &term;
            } else {
                acc -= &term;
            }
        }
        acc
    }
    subsets(n, q)
        .iter()
        .map(|cols| {
            let sub: Vec<Vec<Polynomial>> = jac
                .iter()
                .map(|row| cols.iter().map(|&c| row[c].clone()).collect())
                .collect();
            det(&sub, n)
        })
        .collect()
}
