//! Chevalley-basis structure constants `N_{α,β}` from extraspecial pairs.
//!
//! For each positive non-simple root ξ the extraspecial pair is `(α_i, ξ-α_i)`
//! with `i` minimal such that `ξ-α_i` is a root; its constant is fixed to
//! `+(p+1)`. Every other constant follows from the standard relations
//!
//! * `N_{β,α} = -N_{α,β}`
//! * `N_{-α,-β} = -N_{α,β}`
//! * `N_{α,β}/(γ,γ) = N_{β,γ}/(α,α) = N_{γ,α}/(β,β)` when `α+β+γ = 0`
//! * the four-root relation when `α+β+γ+δ = 0` with no opposite pair.

use std::collections::HashMap;

use num_rational::Ratio;

use crate::rootdata::{Root, RootSystem};

pub(crate) struct StructureConstants<'a> {
    rs: &'a RootSystem,
    /// Signed roots: positives first, then their negatives in the same order.
    roots: &'a [Root],
    index: &'a HashMap<Root, usize>,
    memo: HashMap<(usize, usize), i64>,
}

impl<'a> StructureConstants<'a> {
    pub fn new(rs: &'a RootSystem, roots: &'a [Root], index: &'a HashMap<Root, usize>) -> Self {
        StructureConstants {
            rs,
            roots,
            index,
            memo: HashMap::new(),
        }
    }

    fn npos(&self) -> usize {
        self.rs.num_positive()
    }

    fn is_positive(&self, a: usize) -> bool {
        a < self.npos()
    }

    fn neg(&self, a: usize) -> usize {
        let n = self.npos();
        if a < n {
            a + n
        } else {
            a - n
        }
    }

    fn norm(&self, a: usize) -> i64 {
        self.rs.inner(&self.roots[a], &self.roots[a])
    }

    fn combine(&self, a: usize, b: usize, sign: i64) -> Option<usize> {
        let v: Root = self.roots[a]
            .iter()
            .zip(&self.roots[b])
            .map(|(x, y)| x + sign * y)
            .collect();
        self.index.get(&v).copied()
    }

    pub fn sum(&self, a: usize, b: usize) -> Option<usize> {
        self.combine(a, b, 1)
    }

    fn diff(&self, a: usize, b: usize) -> Option<usize> {
        self.combine(a, b, -1)
    }

    /// Largest p with `β - pα` a root.
    fn p_value(&self, a: usize, b: usize) -> i64 {
        let mut p = 0;
        let mut cur: Root = self.roots[b].clone();
        loop {
            for (c, x) in cur.iter_mut().zip(&self.roots[a]) {
                *c -= x;
            }
            if self.index.contains_key(&cur) {
                p += 1;
            } else {
                return p;
            }
        }
    }

    fn extraspecial(&self, xi: usize) -> (usize, usize) {
        let l = self.rs.rank();
        for i in 0..l {
            if let Some(rest) = self.diff(xi, i) {
                if self.is_positive(rest) {
                    return (i, rest);
                }
            }
        }
        unreachable!("non-simple positive root always has an extraspecial pair")
    }

    /// `N_{α,β}` for signed-root indices with `α+β` a root.
    pub fn get(&mut self, a: usize, b: usize) -> i64 {
        if let Some(&v) = self.memo.get(&(a, b)) {
            return v;
        }
        let xi = self.sum(a, b).expect("N_{α,β} requested for non-root sum");
        let v = match (self.is_positive(a), self.is_positive(b)) {
            (true, true) => self.positive_pair(a, b, xi),
            (false, false) => -self.get(self.neg(a), self.neg(b)),
            (false, true) => -self.get(b, a),
            (true, false) => {
                if self.is_positive(xi) {
                    // triple (α, β, -ξ)
                    let r = Ratio::new(self.norm(xi), self.norm(a)) * -self.get(self.neg(b), xi);
                    as_integer(r)
                } else {
                    let r = Ratio::new(self.norm(xi), self.norm(b)) * self.get(self.neg(xi), a);
                    as_integer(r)
                }
            }
        };
        debug_assert_eq!(v.abs(), self.p_value(a, b) + 1);
        self.memo.insert((a, b), v);
        v
    }

    fn positive_pair(&mut self, a: usize, b: usize, xi: usize) -> i64 {
        let (ap, bp) = self.extraspecial(xi);
        if a == ap {
            return self.p_value(a, b) + 1;
        }
        if b == ap {
            return -self.get(b, a);
        }
        let n_extra = self.get(ap, bp);
        let neg_ap = self.neg(ap);
        let neg_bp = self.neg(bp);
        let mut acc = Ratio::from_integer(0i64);
        if let Some(d) = self.diff(b, ap) {
            acc += Ratio::new(self.get(b, neg_ap) * self.get(a, neg_bp), self.norm(d));
        }
        if let Some(d) = self.diff(a, ap) {
            acc += Ratio::new(self.get(neg_ap, a) * self.get(b, neg_bp), self.norm(d));
        }
        as_integer(acc * Ratio::new(self.norm(xi), n_extra))
    }
}

fn as_integer(r: Ratio<i64>) -> i64 {
    assert!(r.is_integer(), "structure constant not integral: {r}");
    r.to_integer()
}
