use std::cmp::Ordering;
use std::ops::{Add, Sub};

use crate::polyform::{Monomial, Weights};

/// Comparison key of a monomial: lexicographic order on keys is the monomial
/// order. Keys are additive, so `key(a·b) = key(a) + key(b)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderKey(Vec<i64>);

impl Add for &OrderKey {
    type Output = OrderKey;
    fn add(self, rhs: &OrderKey) -> OrderKey {
        OrderKey(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &OrderKey {
    type Output = OrderKey;
    fn sub(self, rhs: &OrderKey) -> OrderKey {
        OrderKey(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Block {
    start: usize,
    weights: Vec<u32>,
}

/// Block order: blocks are compared left to right; inside a block, weighted
/// degree first, then reverse lexicographic with `x_start > x_start+1 > ..`.
///
/// With a single block this is the weighted degree reverse lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialOrder {
    blocks: Vec<Block>,
    nvars: usize,
}

impl MonomialOrder {
    pub fn weighted_revlex(w: &Weights) -> Self {
        MonomialOrder {
            blocks: vec![Block {
                start: 0,
                weights: w.as_slice().to_vec(),
            }],
            nvars: w.len(),
        }
    }

    /// Elimination order on `C[x, t]`: the `x` block (first `eliminated.len()`
    /// variables) dominates every monomial in the kept block.
    pub fn elimination(eliminated: &Weights, kept: &Weights) -> Self {
        MonomialOrder {
            blocks: vec![
                Block {
                    start: 0,
                    weights: eliminated.as_slice().to_vec(),
                },
                Block {
                    start: eliminated.len(),
                    weights: kept.as_slice().to_vec(),
                },
            ],
            nvars: eliminated.len() + kept.len(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of variables in the leading block when this is an elimination order.
    pub fn eliminated_count(&self) -> usize {
        if self.blocks.len() > 1 {
            self.blocks[1].start
        } else {
            0
        }
    }

    pub fn key(&self, m: &Monomial) -> OrderKey {
        let e = m.exps();
        debug_assert_eq!(e.len(), self.nvars);
        let mut k = Vec::with_capacity(self.nvars + self.blocks.len());
        for b in &self.blocks {
            let vars = &e[b.start..b.start + b.weights.len()];
            let deg: i64 = vars
                .iter()
                .zip(&b.weights)
                .map(|(&x, &p)| i64::from(x) * i64::from(p))
                .sum();
            k.push(deg);
            k.extend(vars.iter().rev().map(|&x| -i64::from(x)));
        }
        OrderKey(k)
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.key(a).cmp(&self.key(b))
    }
}
