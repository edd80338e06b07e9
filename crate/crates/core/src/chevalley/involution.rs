//! The split-form automorphism σ, the compact anti-involution ρ̂ and their
//! product λ̂ = σρ̂.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ChevalleyAlgebra, LieElement, PrincipalSL2};
use crate::error::{Result, TodaError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvolutionKind {
    Sigma,
    RhoHat,
    LambdaHat,
}

/// σ as a real matrix in the Chevalley basis.
///
/// Built on the basis `{(ad_ẽ)^k e_i : 0 ≤ k ≤ 2m_i}` where
/// `σ((ad_ẽ)^k e_i) = (-1)^{k+1} (ad_ẽ)^k e_i`.
#[derive(Debug, Clone)]
pub struct Sigma {
    matrix: DMatrix<f64>,
}

impl Sigma {
    pub fn new(alg: &ChevalleyAlgebra, sl2: &PrincipalSL2) -> Result<Self> {
        let dim = alg.dim();
        let mut basis = DMatrix::<f64>::zeros(dim, dim);
        let mut signs = Vec::with_capacity(dim);
        let mut col = 0;
        for (ei, &m) in sl2.highest_weight.iter().zip(&sl2.exponents) {
            let mut v = ei.clone();
            for k in 0..=2 * m {
                if col >= dim {
                    return Err(TodaError::Consistency("(ad_ẽ)^k e_i overcounts dim g".into()));
                }
                let n = v.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                if n < 1e-12 {
                    return Err(TodaError::Consistency(format!(
                        "(ad_ẽ)^{k} e_i vanished before k = 2m_i"
                    )));
                }
                v = v.scale(Complex64::new(1.0 / n, 0.0));
                for b in 0..dim {
                    basis[(b, col)] = v.coeffs[b].re;
                }
                signs.push(if k % 2 == 0 { -1.0 } else { 1.0 });
                col += 1;
                v = alg.bracket(&sl2.e_tilde, &v)?;
            }
        }
        if col != dim {
            return Err(TodaError::Consistency(format!(
                "(ad_ẽ)^k e_i spans {col} vectors, dim g = {dim}"
            )));
        }
        let inv = basis
            .clone()
            .try_inverse()
            .ok_or_else(|| TodaError::Consistency("(ad_ẽ)^k e_i do not span g".into()))?;
        let check = (&basis * &inv - DMatrix::<f64>::identity(dim, dim)).amax();
        if check > 1e-8 {
            return Err(TodaError::Consistency(format!(
                "(ad_ẽ)^k e_i basis is ill-conditioned (residual {check:e})"
            )));
        }
        let d = DMatrix::<f64>::from_diagonal(&nalgebra::DVector::from_vec(signs));
        let mut matrix = &basis * d * inv;
        // entries are exactly 0 or ±1-scale values in exact arithmetic; flush noise
        matrix.iter_mut().for_each(|x| {
            if x.abs() < 1e-13 {
                *x = 0.0
            }
        });
        Ok(Sigma { matrix })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn apply(&self, x: &LieElement) -> LieElement {
        let re = nalgebra::DVector::from_vec(x.real_part());
        let im = nalgebra::DVector::from_vec(x.imag_part());
        let sr = &self.matrix * re;
        let si = &self.matrix * im;
        LieElement {
            coeffs: sr.iter().zip(si.iter()).map(|(&a, &b)| Complex64::new(a, b)).collect(),
        }
    }
}

/// `ρ̂(h_α) = -h_α`, `ρ̂(e_α) = -e_{-α}`, extended anti-linearly.
pub fn rho_hat(alg: &ChevalleyAlgebra, x: &LieElement) -> LieElement {
    let mut out = LieElement::zero(alg.dim());
    for (b, c) in x.coeffs.iter().enumerate() {
        out.coeffs[alg.opposite(b)] = -c.conj();
    }
    out
}

/// The linear Chevalley involution `h ↦ -h`, `e_α ↦ -e_{-α}`. Maps
/// `g^g_{-1}` onto `g^g_1`.
pub fn chevalley_involution(alg: &ChevalleyAlgebra, x: &LieElement) -> LieElement {
    let mut out = LieElement::zero(alg.dim());
    for (b, c) in x.coeffs.iter().enumerate() {
        out.coeffs[alg.opposite(b)] = -c;
    }
    out
}

pub fn lambda_hat(alg: &ChevalleyAlgebra, sigma: &Sigma, x: &LieElement) -> LieElement {
    sigma.apply(&rho_hat(alg, x))
}

/// `H(u, v) = -k(u, ρ̂(v))`.
pub fn hermitian_form(alg: &ChevalleyAlgebra, u: &LieElement, v: &LieElement) -> Complex64 {
    -alg.killing(u, &rho_hat(alg, v))
}

pub struct Involution<'a> {
    pub kind: InvolutionKind,
    alg: &'a ChevalleyAlgebra,
    sigma: &'a Sigma,
}

impl<'a> Involution<'a> {
    pub fn new(kind: InvolutionKind, alg: &'a ChevalleyAlgebra, sigma: &'a Sigma) -> Self {
        Involution { kind, alg, sigma }
    }

    pub fn is_antilinear(&self) -> bool {
        self.kind != InvolutionKind::Sigma
    }

    pub fn apply(&self, x: &LieElement) -> LieElement {
        match self.kind {
            InvolutionKind::Sigma => self.sigma.apply(x),
            InvolutionKind::RhoHat => rho_hat(self.alg, x),
            InvolutionKind::LambdaHat => lambda_hat(self.alg, self.sigma, x),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::build_principal_sl2;
    use crate::rootdata::{diagram_automorphism, LieType};

    fn setup(s: &str) -> (ChevalleyAlgebra, PrincipalSL2, Sigma) {
        let alg = ChevalleyAlgebra::from_type(s.parse::<LieType>().unwrap());
        let sl2 = build_principal_sl2(&alg).unwrap();
        let sigma = Sigma::new(&alg, &sl2).unwrap();
        (alg, sl2, sigma)
    }

    #[test]
    fn sigma_fixes_defining_relations() {
        for t in ["A1", "A2", "A3", "B2", "G2", "D5", "E6"] {
            let (alg, sl2, sigma) = setup(t);
            assert!((&sigma.apply(&sl2.e_tilde) + &sl2.e_tilde).norm_inf() < 1e-12, "{t}");
            assert!((&sigma.apply(&sl2.x) - &sl2.x).norm_inf() < 1e-12, "{t}");
            for ei in &sl2.highest_weight {
                assert!((&sigma.apply(ei) + ei).norm_inf() < 1e-12, "{t}");
            }
            let nu = diagram_automorphism(&alg.rs);
            for i in 0..alg.rank() {
                let hi = LieElement::basis(alg.dim(), i);
                let want = LieElement::basis(alg.dim(), nu.perm[i]);
                assert!((&sigma.apply(&hi) - &want).norm_inf() < 1e-12, "{t} h_{i}");
            }
        }
    }

    #[test]
    fn sigma_is_an_involutive_automorphism() {
        for t in ["A2", "B3", "C3", "G2", "D4", "A4"] {
            let (alg, _, sigma) = setup(t);
            let dim = alg.dim();
            for a in 0..dim {
                let ea = LieElement::basis(dim, a);
                let sa = sigma.apply(&ea);
                assert!((&sigma.apply(&sa) - &ea).norm_inf() < 1e-12);
                for b in 0..dim {
                    let eb = LieElement::basis(dim, b);
                    let lhs = sigma.apply(&alg.bracket(&ea, &eb).unwrap());
                    let rhs = alg.bracket(&sa, &sigma.apply(&eb)).unwrap();
                    assert!((&lhs - &rhs).norm_inf() < 1e-11, "{t} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn rho_hat_examples() {
        let (alg, _, _) = setup("A2");
        let dim = alg.dim();
        let h = alg.coroot_element(&[1, 1]);
        assert_eq!(rho_hat(&alg, &h), -&h);
        let i_e = LieElement::basis(dim, alg.simple_basis(0)).scale(Complex64::new(0.0, 1.0));
        let want = LieElement::basis(dim, alg.neg_simple_basis(0)).scale(Complex64::new(0.0, 1.0));
        assert_eq!(rho_hat(&alg, &i_e), want);
    }

    #[test]
    fn rho_hat_preserves_brackets_antilinearly() {
        for t in ["A2", "B2", "G2", "C3"] {
            let (alg, _, _) = setup(t);
            let dim = alg.dim();
            for a in 0..dim {
                for b in 0..dim {
                    let ea = LieElement::basis(dim, a);
                    let eb = LieElement::basis(dim, b);
                    let lhs = rho_hat(&alg, &alg.bracket(&ea, &eb).unwrap());
                    let rhs = alg.bracket(&rho_hat(&alg, &ea), &rho_hat(&alg, &eb)).unwrap();
                    assert_eq!(lhs, rhs, "{t}");
                }
            }
        }
    }

    #[test]
    fn hermitian_form_is_positive_on_basis() {
        for t in ["A2", "B2", "G2", "F4"] {
            let (alg, _, _) = setup(t);
            let dim = alg.dim();
            for a in 0..dim {
                let ea = LieElement::basis(dim, a);
                let v = hermitian_form(&alg, &ea, &ea);
                assert!(v.re > 0.0 && v.im == 0.0, "{t} {a}");
            }
            // and positive definite on the Cartan block
            let l = alg.rank();
            let m = nalgebra::DMatrix::from_fn(l, l, |i, j| {
                hermitian_form(&alg, &LieElement::basis(dim, i), &LieElement::basis(dim, j)).re
            });
            assert!(m.symmetric_eigenvalues().iter().all(|&x| x > 0.0));
        }
    }

    #[test]
    fn involutions_commute_and_square_to_one() {
        for t in ["A3", "B2", "G2", "E6"] {
            let (alg, _, sigma) = setup(t);
            let dim = alg.dim();
            let lam = Involution::new(InvolutionKind::LambdaHat, &alg, &sigma);
            let rho = Involution::new(InvolutionKind::RhoHat, &alg, &sigma);
            let sig = Involution::new(InvolutionKind::Sigma, &alg, &sigma);
            assert!(lam.is_antilinear() && !sig.is_antilinear());
            for a in 0..dim {
                let v = LieElement::basis(dim, a).scale(Complex64::new(0.3, 0.8));
                assert!((&rho.apply(&rho.apply(&v)) - &v).norm_inf() < 1e-12);
                assert!((&lam.apply(&lam.apply(&v)) - &v).norm_inf() < 1e-12);
                let sr = sig.apply(&rho.apply(&v));
                let rs = rho.apply(&sig.apply(&v));
                assert!((&sr - &rs).norm_inf() < 1e-12, "{t}");
            }
        }
    }
}
