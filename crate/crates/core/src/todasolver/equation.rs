//! The real affine Toda operator
//! `R(Ω) = -2Ω_{zz̄} + Σ r_i e^{2α_i(Ω)} h_i + |q|² e^{-2δ(Ω)} h_{-δ}`
//! on a grid, with `Ω_{zz̄} = ¼ΔΩ` and `h_{-δ} = -Σ c_i h_i`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::chevalley::{ChevalleyAlgebra, PrincipalSL2};
use crate::connection::HFieldGrid;
use crate::error::{Result, TodaError};
use crate::rational;

#[derive(Debug, Clone)]
pub struct TodaEquation {
    pub rank: usize,
    pub r: Vec<f64>,
    /// `c_1..c_l`, the coefficients of `h_δ`.
    pub comarks: Vec<f64>,
    /// `a_1..a_l`, the coefficients of `δ`.
    pub marks: Vec<f64>,
    /// `pairing[k][j] = α_k(h_j)`.
    pub pairing: Vec<Vec<f64>>,
    /// `δ(h_j)`.
    pub delta_h: Vec<f64>,
    /// Coroot Gram matrix `(h_i, h_j)`; symmetrizes the Jacobian.
    pub gram: DMatrix<f64>,
}

impl TodaEquation {
    pub fn new(alg: &ChevalleyAlgebra, sl2: &PrincipalSL2) -> Self {
        let rs = &alg.rs;
        let l = rs.rank();
        let aff = alg.affine();
        let pairing: Vec<Vec<f64>> = (0..l)
            .map(|k| (0..l).map(|j| rs.cartan[j][k] as f64).collect())
            .collect();
        let delta = rs.highest_root();
        let delta_h = (0..l).map(|j| rs.pairing(delta, j) as f64).collect();
        let g = rs.coroot_gram();
        TodaEquation {
            rank: l,
            r: sl2.r_f64(),
            comarks: aff.comarks[1..].iter().map(|&c| c as f64).collect(),
            marks: aff.marks[1..].iter().map(|&c| c as f64).collect(),
            pairing,
            delta_h,
            gram: DMatrix::from_fn(l, l, |i, j| rational::to_f64(&g[i][j])),
        }
    }

    pub fn alpha(&self, k: usize, w: &[f64]) -> f64 {
        self.pairing[k].iter().zip(w).map(|(a, x)| a * x).sum()
    }

    pub fn delta(&self, w: &[f64]) -> f64 {
        self.delta_h.iter().zip(w).map(|(a, x)| a * x).sum()
    }

    /// `Σ r_i e^{2α_i(w)} h_i + q2 e^{-2δ(w)} h_{-δ}` in `{h_i}` coordinates.
    pub fn source(&self, w: &[f64], q2: f64) -> Vec<f64> {
        let ed = q2 * (-2.0 * self.delta(w)).exp();
        (0..self.rank)
            .map(|k| self.r[k] * (2.0 * self.alpha(k, w)).exp() - ed * self.comarks[k])
            .collect()
    }

    /// Derivative of [`source`](Self::source): `B[k][j] = ∂ source_k / ∂ w_j`.
    pub fn source_jacobian(&self, w: &[f64], q2: f64) -> DMatrix<f64> {
        let l = self.rank;
        let ed = q2 * (-2.0 * self.delta(w)).exp();
        let ea: Vec<f64> = (0..l).map(|k| self.r[k] * (2.0 * self.alpha(k, w)).exp()).collect();
        DMatrix::from_fn(l, l, |k, j| {
            2.0 * ea[k] * self.pairing[k][j] + 2.0 * ed * self.comarks[k] * self.delta_h[j]
        })
    }

    fn check(&self, omega: &HFieldGrid, q2: &[f64]) -> Result<()> {
        if omega.rank != self.rank {
            return Err(TodaError::DimensionMismatch {
                expected: self.rank,
                got: omega.rank,
            });
        }
        if q2.len() != omega.grid.len() {
            return Err(TodaError::DimensionMismatch {
                expected: omega.grid.len(),
                got: q2.len(),
            });
        }
        Ok(())
    }

    /// Node-major residual. Rectangle boundary nodes carry zero.
    pub fn residual(&self, omega: &HFieldGrid, q2: &[f64]) -> Result<Vec<f64>> {
        self.check(omega, q2)?;
        let l = self.rank;
        let grid = omega.grid;
        let mut out = vec![0.0; omega.values.len()];
        out.par_chunks_mut(l).enumerate().for_each(|(n, row)| {
            if grid.is_boundary(n) {
                return;
            }
            let s = self.source(omega.at(n), q2[n]);
            for k in 0..l {
                let lap = grid.laplacian(n, |m| omega.component(m, k));
                row[k] = -0.5 * lap + s[k];
            }
        });
        Ok(out)
    }

    /// `J(Ω)·v` for a node-major direction `v`. Rectangle boundary rows
    /// are zero since the residual there is identically zero.
    pub fn jacobian_vector_product(&self, omega: &HFieldGrid, q2: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        self.check(omega, q2)?;
        if v.len() != omega.values.len() {
            return Err(TodaError::DimensionMismatch {
                expected: omega.values.len(),
                got: v.len(),
            });
        }
        let l = self.rank;
        let grid = omega.grid;
        let mut out = vec![0.0; v.len()];
        out.par_chunks_mut(l).enumerate().for_each(|(n, row)| {
            if grid.is_boundary(n) {
                return;
            }
            let b = self.source_jacobian(omega.at(n), q2[n]);
            for k in 0..l {
                let lap = grid.laplacian(n, |m| v[m * l + k]);
                let mut acc = -0.5 * lap;
                for j in 0..l {
                    acc += b[(k, j)] * v[n * l + j];
                }
                row[k] = acc;
            }
        });
        Ok(out)
    }
}
