//! The simple Lie algebra in a Chevalley basis.
//!
//! Basis layout: indices `0..l` are the simple coroots `h_i`; index `l + k`
//! is `e_{β_k}` where `β_0..β_{N-1}` are the positive roots in
//! [`RootSystem`] order and `β_{N+k} = -β_k`.
//!
//! `[e_α, e_{-α}] = h_α`, `[h, e_α] = α(h) e_α`, `[e_α, e_β] = N_{α,β} e_{α+β}`.
//! All structure constants are integers.

mod checks;
mod cyclic;
mod element;
mod involution;
mod principal;
mod structure;

use std::collections::HashMap;

use num_complex::Complex64;

pub use checks::{structure_report, StructureReport};
pub use cyclic::{
    is_cyclic_g1, kostant_section_eval, normalize_cyclic, reference_cyclic, torus_invariant,
    TorusNormalization,
};
pub use element::LieElement;
pub use involution::{
    chevalley_involution, hermitian_form, lambda_hat, rho_hat, Involution, InvolutionKind, Sigma,
};
pub use principal::{build_principal_sl2, coxeter_element, CoxeterElement, PrincipalSL2};

use crate::error::{Result, TodaError};
use crate::rational::Rational;
use crate::rootdata::{self, Root, RootSystem};
use structure::StructureConstants;

/// Sparse bracket of two basis vectors.
pub type SparseTerm = Vec<(usize, i64)>;

#[derive(Debug, Clone)]
pub struct ChevalleyAlgebra {
    pub rs: RootSystem,
    roots: Vec<Root>,
    root_index: HashMap<Root, usize>,
    heights: Vec<i64>,
    table: Vec<SparseTerm>,
    killing: Vec<Vec<i64>>,
    x_coeffs: Vec<Rational>,
    affine: rootdata::AffineCartanData,
}

impl ChevalleyAlgebra {
    pub fn new(rs: RootSystem) -> Self {
        let l = rs.rank();
        let npos = rs.num_positive();
        let mut roots: Vec<Root> = rs.positive_roots.clone();
        roots.extend(rs.positive_roots.iter().map(|r| r.iter().map(|x| -x).collect::<Root>()));
        let root_index: HashMap<Root, usize> =
            roots.iter().enumerate().map(|(k, r)| (r.clone(), k)).collect();
        let dim = l + 2 * npos;

        let mut heights = vec![0i64; dim];
        for (k, r) in roots.iter().enumerate() {
            heights[l + k] = RootSystem::height(r);
        }

        let mut table: Vec<SparseTerm> = vec![Vec::new(); dim * dim];
        {
            let mut sc = StructureConstants::new(&rs, &roots, &root_index);
            for a in 0..dim {
                for b in 0..dim {
                    let term = match (a < l, b < l) {
                        (true, true) => Vec::new(),
                        (true, false) => {
                            let c = rs.pairing(&roots[b - l], a);
                            if c == 0 {
                                Vec::new()
                            } else {
                                vec![(b, c)]
                            }
                        }
                        (false, true) => {
                            let c = rs.pairing(&roots[a - l], b);
                            if c == 0 {
                                Vec::new()
                            } else {
                                vec![(a, -c)]
                            }
                        }
                        (false, false) => {
                            let (ra, rb) = (a - l, b - l);
                            let opposite = roots[ra].iter().zip(&roots[rb]).all(|(x, y)| x + y == 0);
                            if opposite {
                                rs.coroot(&roots[ra])
                                    .into_iter()
                                    .enumerate()
                                    .filter(|(_, c)| *c != 0)
                                    .collect()
                            } else if let Some(s) = sc.sum(ra, rb) {
                                vec![(l + s, sc.get(ra, rb))]
                            } else {
                                Vec::new()
                            }
                        }
                    };
                    table[a * dim + b] = term;
                }
            }
        }

        let x_coeffs = rootdata::x_coefficients(&rs);
        let affine = rootdata::affine_cartan(&rs);
        let mut alg = ChevalleyAlgebra {
            rs,
            roots,
            root_index,
            heights,
            table,
            killing: Vec::new(),
            x_coeffs,
            affine,
        };
        alg.killing = alg.compute_killing();
        alg
    }

    pub fn from_type(t: rootdata::LieType) -> Self {
        Self::new(RootSystem::new(t))
    }

    pub fn dim(&self) -> usize {
        self.heights.len()
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    pub fn num_positive(&self) -> usize {
        self.rs.num_positive()
    }

    pub fn x_coefficients(&self) -> &[Rational] {
        &self.x_coeffs
    }

    pub fn affine(&self) -> &rootdata::AffineCartanData {
        &self.affine
    }

    /// Height grading of a basis vector; 0 on the Cartan.
    pub fn height(&self, b: usize) -> i64 {
        self.heights[b]
    }

    pub fn max_height(&self) -> i64 {
        RootSystem::height(self.rs.highest_root())
    }

    pub fn is_cartan(&self, b: usize) -> bool {
        b < self.rank()
    }

    /// Root of a basis vector, `None` on the Cartan.
    pub fn root_of(&self, b: usize) -> Option<&Root> {
        (b >= self.rank()).then(|| &self.roots[b - self.rank()])
    }

    /// Basis index of `e_root`.
    pub fn root_basis(&self, root: &[i64]) -> Option<usize> {
        self.root_index.get(root).map(|k| k + self.rank())
    }

    pub fn simple_basis(&self, i: usize) -> usize {
        self.rank() + i
    }

    pub fn neg_simple_basis(&self, i: usize) -> usize {
        self.rank() + self.num_positive() + i
    }

    pub fn highest_basis(&self) -> usize {
        self.rank() + self.num_positive() - 1
    }

    pub fn lowest_basis(&self) -> usize {
        self.rank() + 2 * self.num_positive() - 1
    }

    /// The basis index of `e_{-α}` for `b = e_α`; Cartan indices map to themselves.
    pub fn opposite(&self, b: usize) -> usize {
        let l = self.rank();
        let n = self.num_positive();
        if b < l {
            b
        } else if b < l + n {
            b + n
        } else {
            b - n
        }
    }

    pub fn basis_bracket(&self, a: usize, b: usize) -> &[(usize, i64)] {
        &self.table[a * self.dim() + b]
    }

    pub fn bracket(&self, x: &LieElement, y: &LieElement) -> Result<LieElement> {
        let dim = self.dim();
        for v in [x, y] {
            if v.dim() != dim {
                return Err(TodaError::DimensionMismatch {
                    expected: dim,
                    got: v.dim(),
                });
            }
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut out = LieElement::zero(dim);
        for (a, &ca) in x.coeffs.iter().enumerate() {
            if ca == zero {
                continue;
            }
            for (b, &cb) in y.coeffs.iter().enumerate() {
                if cb == zero {
                    continue;
                }
                let c = ca * cb;
                for &(k, n) in self.basis_bracket(a, b) {
                    out.coeffs[k] += c * n as f64;
                }
            }
        }
        Ok(out)
    }

    /// Lie element `Σ h_i` coordinates → element.
    pub fn cartan_element(&self, h: &[f64]) -> LieElement {
        let mut v = LieElement::zero(self.dim());
        for (i, &c) in h.iter().enumerate() {
            v.coeffs[i] = Complex64::new(c, 0.0);
        }
        v
    }

    pub fn coroot_element(&self, root: &[i64]) -> LieElement {
        let h: Vec<f64> = self.rs.coroot(root).iter().map(|&c| c as f64).collect();
        self.cartan_element(&h)
    }

    /// `Ad_{exp H}` for `H ∈ h` given by complex coordinates: scales each
    /// root component by `e^{α(H)}`.
    pub fn ad_exp_cartan(&self, h: &[Complex64], x: &LieElement) -> LieElement {
        let l = self.rank();
        let mut out = x.clone();
        for b in l..self.dim() {
            if out.coeffs[b] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let root = &self.roots[b - l];
            let mut arg = Complex64::new(0.0, 0.0);
            for (i, hi) in h.iter().enumerate() {
                arg += hi * self.rs.pairing(root, i) as f64;
            }
            out.coeffs[b] *= arg.exp();
        }
        out
    }

    /// Real-coordinate version of [`ad_exp_cartan`](Self::ad_exp_cartan).
    pub fn ad_exp_real(&self, h: &[f64], x: &LieElement) -> LieElement {
        let l = self.rank();
        let mut out = x.clone();
        for b in l..self.dim() {
            if out.coeffs[b] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let arg = self.rs.eval_root(&self.roots[b - l], h);
            out.coeffs[b] *= arg.exp();
        }
        out
    }

    /// `α(H)` for the root of basis vector `b`.
    pub fn root_value(&self, b: usize, h: &[f64]) -> f64 {
        self.rs.eval_root(&self.roots[b - self.rank()], h)
    }

    fn compute_killing(&self) -> Vec<Vec<i64>> {
        let dim = self.dim();
        let mut k = vec![vec![0i64; dim]; dim];
        for a in 0..dim {
            // only weight-zero pairs can pair nontrivially
            let partners: Vec<usize> = if self.is_cartan(a) {
                (0..self.rank()).collect()
            } else {
                vec![self.opposite(a)]
            };
            for b in partners {
                let mut tr = 0i64;
                for w in 0..dim {
                    for &(v, c1) in self.basis_bracket(b, w) {
                        for &(u, c2) in self.basis_bracket(a, v) {
                            if u == w {
                                tr += c1 * c2;
                            }
                        }
                    }
                }
                k[a][b] = tr;
            }
        }
        k
    }

    pub fn killing_basis(&self, a: usize, b: usize) -> i64 {
        self.killing[a][b]
    }

    /// Complex-bilinear Killing form.
    pub fn killing(&self, x: &LieElement, y: &LieElement) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (a, ca) in x.coeffs.iter().enumerate() {
            if ca.norm() == 0.0 {
                continue;
            }
            for (b, &kab) in self.killing[a].iter().enumerate() {
                if kab != 0 {
                    s += ca * y.coeffs[b] * kab as f64;
                }
            }
        }
        s
    }

    /// `[[u,v],w] + [[v,w],u] + [[w,u],v]` on basis vectors, exactly.
    pub fn jacobiator(&self, u: usize, v: usize, w: usize) -> SparseTerm {
        let mut acc: Vec<(usize, i64)> = Vec::new();
        for (p, q, r) in [(u, v, w), (v, w, u), (w, u, v)] {
            for &(k, c) in self.basis_bracket(p, q) {
                for &(m, d) in self.basis_bracket(k, r) {
                    acc.push((m, c * d));
                }
            }
        }
        acc.sort_unstable();
        let mut out: SparseTerm = Vec::new();
        for (k, c) in acc {
            match out.last_mut() {
                Some((lk, lc)) if *lk == k => *lc += c,
                _ => out.push((k, c)),
            }
        }
        out.retain(|(_, c)| *c != 0);
        out
    }

    /// Exact check of the Jacobi identity over all basis triples.
    pub fn jacobi_holds(&self) -> bool {
        let dim = self.dim();
        (0..dim).all(|u| (u..dim).all(|v| (v..dim).all(|w| self.jacobiator(u, v, w).is_empty())))
    }

    /// Real matrix of `ad_X` for real `X`, columns indexed by basis.
    pub fn ad_matrix(&self, x: &[f64]) -> nalgebra::DMatrix<f64> {
        let dim = self.dim();
        let mut m = nalgebra::DMatrix::<f64>::zeros(dim, dim);
        for (a, &ca) in x.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            for b in 0..dim {
                for &(k, n) in self.basis_bracket(a, b) {
                    m[(k, b)] += ca * n as f64;
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::LieType;

    fn alg(s: &str) -> ChevalleyAlgebra {
        ChevalleyAlgebra::from_type(s.parse::<LieType>().unwrap())
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bracket_examples() {
        let a2 = alg("A2");
        let dim = a2.dim();
        let e1 = LieElement::basis(dim, a2.simple_basis(0));
        let f1 = LieElement::basis(dim, a2.neg_simple_basis(0));
        let h1 = a2.coroot_element(&[1, 0]);
        assert_eq!(a2.bracket(&e1, &f1).unwrap(), h1);

        let e2 = LieElement::basis(dim, a2.simple_basis(1));
        let got = a2.bracket(&h1, &e2).unwrap();
        assert_eq!(got, e2.scale(c(-1.0)));

        let x = &(&e1 * 0.3) + &(&f1 * 1.7);
        assert!(a2.bracket(&x, &x).unwrap().is_zero());
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let a2 = alg("A2");
        let x = LieElement::zero(3);
        let y = LieElement::zero(a2.dim());
        assert!(matches!(
            a2.bracket(&x, &y),
            Err(TodaError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn antisymmetry_of_basis_brackets() {
        for t in ["A3", "B3", "C3", "G2", "F4"] {
            let g = alg(t);
            let dim = g.dim();
            for a in 0..dim {
                for b in 0..dim {
                    let ab = g.basis_bracket(a, b);
                    let ba: SparseTerm = g.basis_bracket(b, a).iter().map(|&(k, c)| (k, -c)).collect();
                    assert_eq!(ab, &ba[..], "{t} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn jacobi_small_types() {
        for t in ["A1", "A2", "B2", "G2", "A3", "B3", "C3", "D4", "F4"] {
            assert!(alg(t).jacobi_holds(), "{t}");
        }
    }

    #[test]
    fn killing_form_is_invariant() {
        for t in ["A2", "B2", "G2", "B3", "C3"] {
            let g = alg(t);
            let dim = g.dim();
            for a in 0..dim {
                for b in 0..dim {
                    for cc in 0..dim {
                        let lhs: i64 = g
                            .basis_bracket(a, b)
                            .iter()
                            .map(|&(k, n)| n * g.killing_basis(k, cc))
                            .sum();
                        let rhs: i64 = g
                            .basis_bracket(b, cc)
                            .iter()
                            .map(|&(k, n)| n * g.killing_basis(a, k))
                            .sum();
                        assert_eq!(lhs, rhs, "{t}");
                    }
                }
            }
        }
    }

    #[test]
    fn killing_matches_dense_trace() {
        let g = alg("B2");
        let dim = g.dim();
        for a in 0..dim {
            let mut xa = vec![0.0; dim];
            xa[a] = 1.0;
            let ada = g.ad_matrix(&xa);
            for b in 0..dim {
                let mut xb = vec![0.0; dim];
                xb[b] = 1.0;
                let tr = (&ada * g.ad_matrix(&xb)).trace();
                assert_eq!(tr, g.killing_basis(a, b) as f64);
            }
        }
    }

    #[test]
    fn a1_killing_values() {
        // sl2: k(h,h) = 8, k(e,f) = 4
        let g = alg("A1");
        assert_eq!(g.killing_basis(0, 0), 8);
        assert_eq!(g.killing_basis(1, 2), 4);
    }
}
