//! Structure checks run by `lie check` and the acceptance suite.

use serde::Serialize;

use super::{build_principal_sl2, coxeter_element, ChevalleyAlgebra};
use crate::error::Result;
use crate::rational::Rational;

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub lie_type: String,
    pub rank: usize,
    pub dim: usize,
    pub jacobi_exact: bool,
    /// `α_i(x) = 1` for every simple root, exactly.
    pub simple_roots_on_x: bool,
    /// `Σ (2m_i + 1) = dim g`.
    pub exponent_dimension: bool,
    pub sl2_error: f64,
    pub coxeter_order: bool,
    pub dim_g0: usize,
    pub dim_g1: usize,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.jacobi_exact
            && self.simple_roots_on_x
            && self.exponent_dimension
            && self.sl2_error <= 1e-12
            && self.coxeter_order
            && self.dim_g0 == self.rank
            && self.dim_g1 == self.rank + 1
    }
}

pub fn structure_report(alg: &ChevalleyAlgebra) -> Result<StructureReport> {
    let rs = &alg.rs;
    let l = rs.rank();
    let r = alg.x_coefficients();
    let simple_roots_on_x = (0..l).all(|i| {
        let v: Rational = (0..l)
            .map(|j| r[j] * Rational::from_integer(rs.cartan[j][i]))
            .sum();
        v == Rational::from_integer(1)
    });
    let sl2 = build_principal_sl2(alg)?;
    let ef = alg.bracket(&sl2.e, &sl2.e_tilde)?;
    let sl2_error = (&ef - &sl2.x).norm_inf();
    let exponent_dimension = sl2.exponents.iter().map(|m| 2 * m + 1).sum::<usize>() == alg.dim();
    let cox = coxeter_element(alg, &sl2);
    Ok(StructureReport {
        lie_type: rs.lie_type.to_string(),
        rank: l,
        dim: alg.dim(),
        jacobi_exact: alg.jacobi_holds(),
        simple_roots_on_x,
        exponent_dimension,
        sl2_error,
        coxeter_order: cox.power_phases(cox.h).iter().all(|&p| p == 0),
        dim_g0: cox.eigenspace(0).len(),
        dim_g1: cox.eigenspace(1).len(),
    })
}
