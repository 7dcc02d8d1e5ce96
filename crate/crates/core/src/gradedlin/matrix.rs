//! Fraction-free Gauss–Jordan elimination on sparse integer rows.
//!
//! Each elimination step replaces `r ← a·r − b·p` with integers only and then
//! divides the row by the gcd of its entries, so entries stay small and the
//! arithmetic stays exact. Rows without an entry in the pivot column are never
//! touched.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::polyform::Rational;

pub(crate) type SparseRow = Vec<(usize, BigInt)>;

/// Clears denominators of a rational row, keeping column order.
pub(crate) fn integer_row(entries: Vec<(usize, Rational)>) -> SparseRow {
    let mut entries: Vec<(usize, Rational)> = entries.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    entries.sort_by_key(|(j, _)| *j);
    let lcm = entries.iter().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let mut row: SparseRow = entries
        .into_iter()
        .map(|(j, c)| (j, (c.numer() * &lcm) / c.denom()))
        .collect();
    make_primitive(&mut row);
    row
}

fn make_primitive(row: &mut SparseRow) {
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for (_, v) in row.iter_mut() {
        *v /= &g;
    }
}

fn entry(row: &SparseRow, col: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&col, |(j, _)| *j).ok().map(|i| &row[i].1)
}

/// `a·r − b·p`, merged over sorted column indices.
fn combine(r: &SparseRow, a: &BigInt, p: &SparseRow, b: &BigInt) -> SparseRow {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let take_r = j >= p.len() || (i < r.len() && r[i].0 < p[j].0);
        let take_p = i >= r.len() || (j < p.len() && p[j].0 < r[i].0);
        if take_r {
            out.push((r[i].0, a * &r[i].1));
            i += 1;
        } else if take_p {
            out.push((p[j].0, -(b * &p[j].1)));
            j += 1;
        } else {
            let v = a * &r[i].1 - b * &p[j].1;
            if !v.is_zero() {
                out.push((r[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Reduced row echelon form with pivots restricted to columns `< pivot_limit`;
/// columns at or beyond the limit (right-hand sides) are carried along.
#[derive(Debug, Clone)]
pub(crate) struct Echelon {
    /// Pivot rows in pivot order, with their pivot columns.
    pub pivot_rows: Vec<(usize, SparseRow)>,
    /// Rows with no entry left in the pivotable columns.
    pub residual: Vec<SparseRow>,
}

pub(crate) fn row_reduce(rows: Vec<SparseRow>, pivot_limit: usize) -> Echelon {
    let mut active: Vec<SparseRow> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    let mut done: Vec<(usize, SparseRow)> = Vec::new();
    for col in 0..pivot_limit {
        // active rows only have entries at columns >= col here
        let pick = active
            .iter()
            .enumerate()
            .filter(|(_, r)| r.first().is_some_and(|(j, _)| *j == col))
            .min_by_key(|(_, r)| r.len())
            .map(|(i, _)| i);
        let Some(pi) = pick else { continue };
        let pivot = active.swap_remove(pi);
        let pv = pivot[0].1.clone();
        let eliminate = |r: &mut SparseRow| {
            if let Some(rv) = entry(r, col).cloned() {
                let g = pv.gcd(&rv);
                let mut a = &pv / &g;
                let mut b = &rv / &g;
                if a.is_negative() {
                    a = -a;
                    b = -b;
                }
                *r = combine(r, &a, &pivot, &b);
                make_primitive(r);
            }
        };
        for r in active.iter_mut() {
            eliminate(r);
        }
        active.retain(|r| !r.is_empty());
        for (_, r) in done.iter_mut() {
            eliminate(r);
        }
        done.push((col, pivot));
    }
    Echelon {
        pivot_rows: done,
        residual: active,
    }
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivot_rows.len()
    }

    /// Solution of `A x = column rhs` with free variables zero, if consistent.
    pub fn solve_column(&self, rhs: usize, unknowns: usize) -> Option<Vec<Rational>> {
        if self.residual.iter().any(|r| entry(r, rhs).is_some()) {
            return None;
        }
        let mut x = vec![Rational::zero(); unknowns];
        for (col, row) in &self.pivot_rows {
            if let Some(v) = entry(row, rhs) {
                x[*col] = Rational::new(v.clone(), row[0].1.clone());
            }
        }
        Some(x)
    }

    /// Basis of `{x : A x = 0}` over the first `unknowns` columns, one vector per free column.
    pub fn nullspace(&self, unknowns: usize) -> Vec<Vec<Rational>> {
        let pivot_cols: std::collections::HashSet<usize> = self.pivot_rows.iter().map(|(c, _)| *c).collect();
        let mut out = Vec::new();
        for free in (0..unknowns).filter(|c| !pivot_cols.contains(c)) {
            let mut v = vec![Rational::zero(); unknowns];
            v[free] = Rational::one();
            for (col, row) in &self.pivot_rows {
                if let Some(e) = entry(row, free) {
                    v[*col] = -Rational::new(e.clone(), row[0].1.clone());
                }
            }
            out.push(v);
        }
        out
    }
}
