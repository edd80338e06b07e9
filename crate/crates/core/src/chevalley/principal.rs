//! Principal three-dimensional subalgebra and the Coxeter element.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::{ChevalleyAlgebra, LieElement};
use crate::error::{Result, TodaError};
use crate::rational::{self, Rational};
use crate::rootdata;

#[derive(Debug, Clone)]
pub struct PrincipalSL2 {
    pub x: LieElement,
    pub e: LieElement,
    pub e_tilde: LieElement,
    pub r: Vec<Rational>,
    pub exponents: Vec<usize>,
    /// Highest weight vectors `e_1..e_l`, with `[x, e_i] = m_i e_i`.
    /// `e_1 = e` and `e_l = e_δ`.
    pub highest_weight: Vec<LieElement>,
}

impl PrincipalSL2 {
    pub fn sqrt_r(&self) -> Vec<f64> {
        self.r.iter().map(|r| rational::to_f64(r).sqrt()).collect()
    }

    pub fn r_f64(&self) -> Vec<f64> {
        self.r.iter().map(rational::to_f64).collect()
    }
}

pub fn build_principal_sl2(alg: &ChevalleyAlgebra) -> Result<PrincipalSL2> {
    let l = alg.rank();
    let dim = alg.dim();
    let r = alg.x_coefficients().to_vec();
    let x = alg.cartan_element(&r.iter().map(rational::to_f64).collect::<Vec<_>>());
    let mut e = LieElement::zero(dim);
    let mut e_tilde = LieElement::zero(dim);
    for (i, ri) in r.iter().enumerate() {
        let s = Complex64::new(rational::to_f64(ri).sqrt(), 0.0);
        e.coeffs[alg.simple_basis(i)] = s;
        e_tilde.coeffs[alg.neg_simple_basis(i)] = s;
    }

    let exponents = rootdata::exponents(&alg.rs);
    let e_real = e.real_part();
    let mut highest_weight: Vec<LieElement> = Vec::with_capacity(l);
    let mut m_prev = 0usize;
    for &m in &exponents {
        if m == m_prev {
            continue;
        }
        m_prev = m;
        let mult = exponents.iter().filter(|&&k| k == m).count();
        let vectors = if m == 1 {
            vec![e.clone()]
        } else if m as i64 == alg.max_height() {
            vec![LieElement::basis(dim, alg.highest_basis())]
        } else {
            kernel_of_ad_e(alg, &e_real, m as i64)?
        };
        if vectors.len() != mult {
            return Err(TodaError::Consistency(format!(
                "centralizer of e in height {m} has dimension {}, expected {mult}",
                vectors.len()
            )));
        }
        highest_weight.extend(vectors);
    }
    if highest_weight.len() != l {
        return Err(TodaError::Consistency(format!(
            "centralizer of e has dimension {}, expected {l}",
            highest_weight.len()
        )));
    }

    Ok(PrincipalSL2 {
        x,
        e,
        e_tilde,
        r,
        exponents,
        highest_weight,
    })
}

/// Orthonormal basis of `ker(ad_e) ∩ g_m`, each vector signed so its
/// largest entry is positive.
fn kernel_of_ad_e(alg: &ChevalleyAlgebra, e: &[f64], m: i64) -> Result<Vec<LieElement>> {
    let dim = alg.dim();
    let src: Vec<usize> = (0..dim).filter(|&b| alg.height(b) == m).collect();
    let dst: Vec<usize> = (0..dim).filter(|&b| alg.height(b) == m + 1).collect();
    let mut mat = DMatrix::<f64>::zeros(dst.len(), src.len());
    for (col, &b) in src.iter().enumerate() {
        for (a, &ca) in e.iter().enumerate() {
            if ca == 0.0 {
                continue;
            }
            for &(k, n) in alg.basis_bracket(a, b) {
                let row = dst
                    .iter()
                    .position(|&d| d == k)
                    .ok_or_else(|| TodaError::Consistency("ad_e leaves the height grading".into()))?;
                mat[(row, col)] += ca * n as f64;
            }
        }
    }
    let gram = mat.transpose() * &mat;
    let eig = SymmetricEigen::new(gram);
    let scale = eig.eigenvalues.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
    let mut out = Vec::new();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam.abs() > 1e-9 * scale {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        let pivot = v.iter().fold(0.0f64, |a, &b| if b.abs() > a.abs() { b } else { a });
        let sign = pivot.signum();
        let mut el = LieElement::zero(dim);
        for (j, &b) in src.iter().enumerate() {
            el.coeffs[b] = Complex64::new(sign * v[j], 0.0);
        }
        out.push(el);
    }
    Ok(out)
}

/// `Ad_g` for `g = exp(2πi x/h)`: a basis vector of height m gets the
/// phase `m mod h`.
#[derive(Debug, Clone)]
pub struct CoxeterElement {
    pub h: usize,
    pub phases: Vec<usize>,
}

pub fn coxeter_element(alg: &ChevalleyAlgebra, sl2: &PrincipalSL2) -> CoxeterElement {
    let h = rootdata::coxeter_number(&alg.rs);
    debug_assert_eq!(*sl2.exponents.last().unwrap() + 1, h);
    let phases = (0..alg.dim())
        .map(|b| alg.height(b).rem_euclid(h as i64) as usize)
        .collect();
    CoxeterElement { h, phases }
}

impl CoxeterElement {
    /// `e^{2πi m/h}`.
    pub fn root_of_unity(&self, m: usize) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 / self.h as f64)
    }

    pub fn apply(&self, x: &LieElement) -> LieElement {
        LieElement {
            coeffs: x
                .coeffs
                .iter()
                .zip(&self.phases)
                .map(|(c, &p)| c * self.root_of_unity(p))
                .collect(),
        }
    }

    /// Phases of `Ad_g^k`.
    pub fn power_phases(&self, k: usize) -> Vec<usize> {
        self.phases.iter().map(|p| (p * k) % self.h).collect()
    }

    /// Basis indices spanning the `e^{2πi m/h}` eigenspace.
    pub fn eigenspace(&self, m: usize) -> Vec<usize> {
        (0..self.phases.len()).filter(|&b| self.phases[b] == m % self.h).collect()
    }
}
