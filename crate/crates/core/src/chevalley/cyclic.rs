//! Cyclic elements of `g^g_1`, the Kostant section and torus normalization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{ChevalleyAlgebra, CoxeterElement, LieElement, PrincipalSL2};
use crate::error::{Result, TodaError};

/// Basis indices of `Π̄ = Π ∪ {-δ}`, simple roots first.
fn extended_simple(alg: &ChevalleyAlgebra) -> Vec<usize> {
    let mut v: Vec<usize> = (0..alg.rank()).map(|i| alg.simple_basis(i)).collect();
    v.push(alg.lowest_basis());
    v
}

fn check_in_g1(alg: &ChevalleyAlgebra, cox: &CoxeterElement, x: &LieElement) -> Result<()> {
    if x.dim() != alg.dim() {
        return Err(TodaError::DimensionMismatch {
            expected: alg.dim(),
            got: x.dim(),
        });
    }
    let bad = (0..alg.dim()).find(|&b| cox.phases[b] != 1 && x.coeffs[b] != Complex64::new(0.0, 0.0));
    match bad {
        Some(b) => Err(TodaError::Precondition(format!(
            "element has a component outside g^g_1 (basis index {b})"
        ))),
        None => Ok(()),
    }
}

/// True iff `X ∈ g^g_1` has all `l+1` coefficients on `Π̄` nonzero.
pub fn is_cyclic_g1(alg: &ChevalleyAlgebra, cox: &CoxeterElement, x: &LieElement) -> Result<bool> {
    check_in_g1(alg, cox, x)?;
    Ok(extended_simple(alg)
        .into_iter()
        .all(|b| x.coeffs[b] != Complex64::new(0.0, 0.0)))
}

/// `f = ẽ + Σ α_i e_i` and the generator values `p_i(f) = α_i`.
pub fn kostant_section_eval(sl2: &PrincipalSL2, coeffs: &[Complex64]) -> Result<(LieElement, Vec<Complex64>)> {
    if coeffs.len() != sl2.highest_weight.len() {
        return Err(TodaError::DimensionMismatch {
            expected: sl2.highest_weight.len(),
            got: coeffs.len(),
        });
    }
    let mut f = sl2.e_tilde.clone();
    for (ei, &a) in sl2.highest_weight.iter().zip(coeffs) {
        f.add_scaled(ei, a);
    }
    Ok((f, coeffs.to_vec()))
}

/// `Σ_{α∈Π̄} e_α`.
pub fn reference_cyclic(alg: &ChevalleyAlgebra) -> LieElement {
    let mut y = LieElement::zero(alg.dim());
    for b in extended_simple(alg) {
        y.coeffs[b] = Complex64::new(1.0, 0.0);
    }
    y
}

/// `Π c_α^{a_α}` over `Π̄` with the affine marks; invariant under the
/// torus, and `λ^h` for the normalization below.
pub fn torus_invariant(alg: &ChevalleyAlgebra, cox: &CoxeterElement, x: &LieElement) -> Result<Complex64> {
    check_in_g1(alg, cox, x)?;
    let marks = &alg.affine().marks;
    let idx = extended_simple(alg);
    let l = alg.rank();
    let mut p = x.coeffs[idx[l]].powi(marks[0] as i32);
    for i in 0..l {
        p *= x.coeffs[idx[i]].powi(marks[i + 1] as i32);
    }
    Ok(p)
}

#[derive(Debug, Clone)]
pub struct TorusNormalization {
    /// `ξ` in `{h_i}` coordinates.
    pub xi: Vec<Complex64>,
    pub lambda: Complex64,
}

/// Find `ξ ∈ h` and `λ` with `Ad_{exp ξ} X = λ Σ_{α∈Π̄} e_α`.
///
/// In log coordinates this is `α(ξ) - log λ = -log c_α` for the `l+1`
/// roots of `Π̄`, which is nonsingular because the marks relation
/// `Σ a_i α_i = δ` leaves `-(Σ a_i) log λ` on the `λ` column.
pub fn normalize_cyclic(alg: &ChevalleyAlgebra, cox: &CoxeterElement, x: &LieElement) -> Result<TorusNormalization> {
    if !is_cyclic_g1(alg, cox, x)? {
        return Err(TodaError::Precondition("element is not cyclic".into()));
    }
    let l = alg.rank();
    let idx = extended_simple(alg);
    let mut m = DMatrix::<Complex64>::zeros(l + 1, l + 1);
    let mut rhs = DVector::<Complex64>::zeros(l + 1);
    for (row, &b) in idx.iter().enumerate() {
        let root = alg.root_of(b).expect("root basis vector").clone();
        for j in 0..l {
            m[(row, j)] = Complex64::new(alg.rs.pairing(&root, j) as f64, 0.0);
        }
        m[(row, l)] = Complex64::new(-1.0, 0.0);
        rhs[row] = -x.coeffs[b].ln();
    }
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| TodaError::Consistency("torus normalization system is singular".into()))?;
    let xi: Vec<Complex64> = sol.iter().take(l).copied().collect();
    let lambda = sol[l].exp();

    let y = alg.ad_exp_cartan(&xi, x);
    let target = reference_cyclic(alg).scale(lambda);
    let err = (&y - &target).norm_inf();
    if err > 1e-9 * (1.0 + lambda.norm()) {
        return Err(TodaError::Consistency(format!("torus normalization residual {err:e}")));
    }
    Ok(TorusNormalization { xi, lambda })
}
