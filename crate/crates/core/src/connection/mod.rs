//! The flat connection attached to a Toda field, in the Toda gauge or the
//! Higgs gauge, and its discrete curvature.
//!
//! In the Toda gauge, with `c_i = d_i = √r_i`,
//!
//! ```text
//! A_z = -∂_zΩ,  A_z̄ = ∂_z̄Ω,
//! Φ = Ad_{e^{-Ω}}(Σ c_i e_{-α_i} + q e_δ),  Ψ = Ad_{e^{Ω}}(Σ d_i e_{α_i} + q̄ e_{-δ}).
//! ```
//!
//! A gauge transformation by `H ∈ h` sends `A ↦ A - dH` and `Φ, Ψ ↦ Ad_{e^H}`;
//! `H = Ω` gives the Higgs gauge. Curvature is stored as the coefficient of
//! `dz∧dz̄`:
//! `F = ∂_z(A_z̄ + Ψ) - ∂_z̄(A_z + Φ) + [A_z + Φ, A_z̄ + Ψ]`.

mod grid;
pub mod io;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use grid::{Axis, DomainGrid, HFieldGrid, QDifferential, Stencil, Topology};

use crate::chevalley::{rho_hat, ChevalleyAlgebra, LieElement, PrincipalSL2};
use crate::error::{Result, TodaError};
use crate::todasolver::TodaEquation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    Toda,
    Higgs,
    /// Any other `h`-valued gauge.
    General,
}

#[derive(Debug, Clone)]
pub struct ConnectionData {
    pub gauge: Gauge,
    pub grid: DomainGrid,
    pub a_z: Vec<LieElement>,
    pub a_zbar: Vec<LieElement>,
    pub phi: Vec<LieElement>,
    pub psi: Vec<LieElement>,
    /// `c_0..c_l` and `d_0..d_l`.
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `(∂_z H, ∂_z̄ H)` as Cartan elements at node `n`.
fn cartan_derivatives(alg: &ChevalleyAlgebra, h: &HFieldGrid, n: usize) -> (LieElement, LieElement) {
    let mut dz = LieElement::zero(alg.dim());
    let mut dzb = LieElement::zero(alg.dim());
    for k in 0..h.rank {
        let f = |m: usize| Complex64::new(h.component(m, k), 0.0);
        dz.coeffs[k] = h.grid.d_z(n, f);
        dzb.coeffs[k] = h.grid.d_zbar(n, f);
    }
    (dz, dzb)
}

fn check_field(alg: &ChevalleyAlgebra, h: &HFieldGrid) -> Result<()> {
    if h.rank != alg.rank() {
        return Err(TodaError::DimensionMismatch {
            expected: alg.rank(),
            got: h.rank,
        });
    }
    if !h.is_finite() {
        return Err(TodaError::NonFinite("Toda field contains non-finite values".into()));
    }
    Ok(())
}

pub fn build_toda_connection(
    omega: &HFieldGrid,
    q: &QDifferential,
    alg: &ChevalleyAlgebra,
    sl2: &PrincipalSL2,
    gauge: Gauge,
) -> Result<ConnectionData> {
    check_field(alg, omega)?;
    if gauge == Gauge::General {
        return Err(TodaError::Precondition(
            "a connection is built in the toda or the higgs gauge".into(),
        ));
    }
    let dim = alg.dim();
    let l = alg.rank();
    let sqrt_r = sl2.sqrt_r();
    let grid = omega.grid;
    let qs = q.on_grid(&grid);

    let nodes: Vec<[LieElement; 4]> = (0..grid.len())
        .into_par_iter()
        .map(|n| {
            let w = omega.at(n);
            let neg_w: Vec<f64> = w.iter().map(|x| -x).collect();
            let (dz, dzb) = cartan_derivatives(alg, omega, n);
            let mut lower = LieElement::zero(dim);
            let mut upper = LieElement::zero(dim);
            for i in 0..l {
                lower.coeffs[alg.neg_simple_basis(i)] = Complex64::new(sqrt_r[i], 0.0);
                upper.coeffs[alg.simple_basis(i)] = Complex64::new(sqrt_r[i], 0.0);
            }
            lower.coeffs[alg.highest_basis()] += qs[n];
            upper.coeffs[alg.lowest_basis()] += qs[n].conj();
            [
                -&dz,
                dzb,
                alg.ad_exp_real(&neg_w, &lower),
                alg.ad_exp_real(w, &upper),
            ]
        })
        .collect();

    let mut c = vec![1.0];
    c.extend_from_slice(&sqrt_r);
    let mut conn = ConnectionData {
        gauge: Gauge::Toda,
        grid,
        a_z: Vec::with_capacity(grid.len()),
        a_zbar: Vec::with_capacity(grid.len()),
        phi: Vec::with_capacity(grid.len()),
        psi: Vec::with_capacity(grid.len()),
        d: c.clone(),
        c,
    };
    for [az, azb, phi, psi] in nodes {
        conn.a_z.push(az);
        conn.a_zbar.push(azb);
        conn.phi.push(phi);
        conn.psi.push(psi);
    }
    match gauge {
        Gauge::Higgs => {
            let mut out = gauge_transform(alg, &conn, omega)?;
            out.gauge = Gauge::Higgs;
            Ok(out)
        }
        _ => Ok(conn),
    }
}

/// `A ↦ A - dH`, `Φ ↦ Ad_{e^H}Φ`, `Ψ ↦ Ad_{e^H}Ψ`.
pub fn gauge_transform(alg: &ChevalleyAlgebra, conn: &ConnectionData, h: &HFieldGrid) -> Result<ConnectionData> {
    check_field(alg, h)?;
    if !h.grid.same_shape(&conn.grid) {
        return Err(TodaError::Precondition("gauge field lives on a different grid".into()));
    }
    let parts: Vec<[LieElement; 4]> = (0..conn.grid.len())
        .into_par_iter()
        .map(|n| {
            let (dz, dzb) = cartan_derivatives(alg, h, n);
            [
                &conn.a_z[n] - &dz,
                &conn.a_zbar[n] - &dzb,
                alg.ad_exp_real(h.at(n), &conn.phi[n]),
                alg.ad_exp_real(h.at(n), &conn.psi[n]),
            ]
        })
        .collect();
    let identity = h.values.iter().all(|&v| v == 0.0);
    let mut out = ConnectionData {
        gauge: Gauge::General,
        grid: conn.grid,
        a_z: Vec::with_capacity(parts.len()),
        a_zbar: Vec::with_capacity(parts.len()),
        phi: Vec::with_capacity(parts.len()),
        psi: Vec::with_capacity(parts.len()),
        c: conn.c.clone(),
        d: conn.d.clone(),
    };
    for [az, azb, phi, psi] in parts {
        out.a_z.push(az);
        out.a_zbar.push(azb);
        out.phi.push(phi);
        out.psi.push(psi);
    }
    out.gauge = if identity {
        conn.gauge
    } else if conn.gauge == Gauge::Toda && out.a_zbar.iter().all(|a| a.is_zero()) {
        Gauge::Higgs
    } else {
        Gauge::General
    };
    Ok(out)
}

/// First difference of one basis component of a field of Lie elements.
/// Root components use `f·log(f₊/f₋)/span` when all three values are
/// nonzero: exact for fields of the form `c·e^{β(H)}`, so the discrete
/// curvature stays gauge covariant.
fn component_diff(grid: &DomainGrid, f: &[LieElement], n: usize, b: usize, axis: Axis, multiplicative: bool) -> Complex64 {
    let s = grid.stencil(n, axis);
    let (fp, fm) = (f[s.plus].coeffs[b], f[s.minus].coeffs[b]);
    if multiplicative {
        let f0 = f[n].coeffs[b];
        if f0 != zero() && fp != zero() && fm != zero() {
            return f0 * (fp / fm).ln() / s.span;
        }
    }
    (fp - fm) / s.span
}

fn d_field(alg: &ChevalleyAlgebra, grid: &DomainGrid, f: &[LieElement], n: usize, conj: bool) -> LieElement {
    let l = alg.rank();
    let i = Complex64::i();
    let coeffs = (0..alg.dim())
        .map(|b| {
            let gx = component_diff(grid, f, n, b, Axis::X, b >= l);
            let gy = component_diff(grid, f, n, b, Axis::Y, b >= l);
            if conj {
                0.5 * (gx + i * gy)
            } else {
                0.5 * (gx - i * gy)
            }
        })
        .collect();
    LieElement { coeffs }
}

/// Discrete curvature, one Lie element per node.
pub fn curvature(alg: &ChevalleyAlgebra, conn: &ConnectionData) -> Result<Vec<LieElement>> {
    let grid = conn.grid;
    let one_zero: Vec<LieElement> = conn.a_z.iter().zip(&conn.phi).map(|(a, p)| a + p).collect();
    let zero_one: Vec<LieElement> = conn.a_zbar.iter().zip(&conn.psi).map(|(a, p)| a + p).collect();
    (0..grid.len())
        .into_par_iter()
        .map(|n| {
            let dz = d_field(alg, &grid, &zero_one, n, false);
            let dzb = d_field(alg, &grid, &one_zero, n, true);
            let br = alg.bracket(&one_zero[n], &zero_one[n])?;
            Ok(&(&dz - &dzb) + &br)
        })
        .collect()
}

/// `max ‖F‖_∞` over interior nodes.
pub fn curvature_norm(grid: &DomainGrid, f: &[LieElement]) -> f64 {
    (0..grid.len())
        .filter(|&n| !grid.is_boundary(n))
        .map(|n| f[n].norm_inf())
        .fold(0.0, f64::max)
}

/// `max_n ‖Ψ - Φ*‖_∞`, with `X* = -ρ̂(X)` in the Toda gauge and
/// `X* = -Ad_{e^{2Ω}}ρ̂(X)` in the Higgs gauge.
pub fn reality_defect(alg: &ChevalleyAlgebra, conn: &ConnectionData, omega: &HFieldGrid) -> Result<f64> {
    let scale = match conn.gauge {
        Gauge::Toda => 0.0,
        Gauge::Higgs => 2.0,
        Gauge::General => {
            return Err(TodaError::Precondition(
                "reality condition is only defined in the toda or higgs gauge".into(),
            ))
        }
    };
    let defect = (0..conn.grid.len())
        .map(|n| {
            let w: Vec<f64> = omega.at(n).iter().map(|x| scale * x).collect();
            let star = -&alg.ad_exp_real(&w, &rho_hat(alg, &conn.phi[n]));
            (&conn.psi[n] - &star).norm_inf()
        })
        .fold(0.0, f64::max);
    Ok(defect)
}

/// Closed form `[Φ, Φ*] = -Σ r_i e^{2α_i(Ω)} h_i - |q|² e^{-2δ(Ω)} h_{-δ}`
/// for the Higgs-gauge field `Φ = Σ √r_i e_{-α_i} + q e_δ`.
pub fn commutator_closed_form(eq: &TodaEquation, w: &[f64], q2: f64) -> Vec<f64> {
    eq.source(w, q2).into_iter().map(|s| -s).collect()
}

/// `[Φ, Φ*]` by explicit brackets in the Higgs gauge at one point.
pub fn commutator_explicit(
    alg: &ChevalleyAlgebra,
    sl2: &PrincipalSL2,
    w: &[f64],
    q: Complex64,
) -> Result<LieElement> {
    let mut phi = sl2.e_tilde.clone();
    phi.coeffs[alg.highest_basis()] += q;
    let two_w: Vec<f64> = w.iter().map(|x| 2.0 * x).collect();
    let star = -&alg.ad_exp_real(&two_w, &rho_hat(alg, &phi));
    alg.bracket(&phi, &star)
}

/// Toda residual per node, written as an h-valued field. Also checks the
/// explicit commutator against the closed form at every node.
pub fn higgs_residual(
    omega: &HFieldGrid,
    q: &QDifferential,
    alg: &ChevalleyAlgebra,
    sl2: &PrincipalSL2,
) -> Result<HFieldGrid> {
    check_field(alg, omega)?;
    let eq = TodaEquation::new(alg, sl2);
    let qs = q.on_grid(&omega.grid);
    let q2: Vec<f64> = qs.iter().map(|z| z.norm_sqr()).collect();
    let l = alg.rank();
    (0..omega.grid.len()).into_par_iter().try_for_each(|n| {
        let w = omega.at(n);
        let closed = commutator_closed_form(&eq, w, q2[n]);
        let explicit = commutator_explicit(alg, sl2, w, qs[n])?;
        let scale = closed.iter().fold(1.0f64, |a, c| a.max(c.abs()));
        let mut err = explicit.coeffs[l..].iter().map(|c| c.norm()).fold(0.0, f64::max);
        for k in 0..l {
            err = err.max((explicit.coeffs[k] - closed[k]).norm());
        }
        if err > 1e-12 * scale {
            return Err(TodaError::Consistency(format!(
                "[Φ,Φ*] closed form disagrees with explicit brackets at node {n} (error {err:e})"
            )));
        }
        Ok(())
    })?;
    let values = eq.residual(omega, &q2)?;
    HFieldGrid::new(omega.grid, l, values)
}

/// Scale root components by `g^{height}`; Cartan components are unchanged.
pub fn chart_transition(alg: &ChevalleyAlgebra, field: &[LieElement], g: &[Complex64]) -> Result<Vec<LieElement>> {
    if field.len() != g.len() {
        return Err(TodaError::DimensionMismatch {
            expected: field.len(),
            got: g.len(),
        });
    }
    if let Some(n) = g.iter().position(|z| *z == zero() || !z.is_finite()) {
        return Err(TodaError::Precondition(format!(
            "transition function vanishes or is non-finite at node {n}"
        )));
    }
    Ok(field
        .iter()
        .zip(g)
        .map(|(x, gn)| {
            let mut y = x.clone();
            for b in alg.rank()..alg.dim() {
                y.coeffs[b] *= gn.powi(alg.height(b) as i32);
            }
            y
        })
        .collect())
}

/// Toda field in chart `i` from chart `j`: `Ω_i = Ω_j + f x` with
/// `e^{2f} = |g|²`, `g = dz_j/dz_i`.
pub fn transition_toda_field(omega_j: &HFieldGrid, g: &[Complex64], x: &[f64]) -> Result<HFieldGrid> {
    if g.len() != omega_j.grid.len() {
        return Err(TodaError::DimensionMismatch {
            expected: omega_j.grid.len(),
            got: g.len(),
        });
    }
    if x.len() != omega_j.rank {
        return Err(TodaError::DimensionMismatch {
            expected: omega_j.rank,
            got: x.len(),
        });
    }
    let l = omega_j.rank;
    let mut values = omega_j.values.clone();
    for (n, gn) in g.iter().enumerate() {
        if *gn == zero() {
            return Err(TodaError::Precondition(format!("transition function vanishes at node {n}")));
        }
        let f = gn.norm().ln();
        for k in 0..l {
            values[n * l + k] += f * x[k];
        }
    }
    HFieldGrid::new(omega_j.grid, l, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::build_principal_sl2;
    use crate::rootdata::LieType;
    use crate::todasolver::constant_solution;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(t: &str) -> (ChevalleyAlgebra, PrincipalSL2) {
        let alg = ChevalleyAlgebra::from_type(t.parse::<LieType>().unwrap());
        let sl2 = build_principal_sl2(&alg).unwrap();
        (alg, sl2)
    }

    fn torus(n: usize) -> DomainGrid {
        DomainGrid::with_extent(Topology::Torus, n, n, 2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI).unwrap()
    }

    fn smooth_field(grid: DomainGrid, l: usize, seed: u64, amp: f64) -> HFieldGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coef: Vec<[f64; 4]> = (0..l)
            .map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.0..6.0)])
            .collect();
        HFieldGrid::from_fn(grid, l, |x, y| {
            coef.iter()
                .map(|c| amp * (c[0] * x.sin() + c[1] * (y + c[3]).cos() + c[2] * (x + 2.0 * y).sin()))
                .collect()
        })
        .unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_field_toda_gauge() {
        let (alg, sl2) = setup("A2");
        let g = torus(8);
        let omega = HFieldGrid::zeros(g, 2);
        let conn = build_toda_connection(&omega, &QDifferential::Constant(c(0.0)), &alg, &sl2, Gauge::Toda).unwrap();
        for n in 0..g.len() {
            assert!(conn.a_z[n].is_zero() && conn.a_zbar[n].is_zero());
            assert_eq!(conn.phi[n], sl2.e_tilde);
        }
        // F = [ẽ, e] = -x = -Σ r_i h_i
        let f = curvature(&alg, &conn).unwrap();
        let want = -&sl2.x;
        assert!((&f[5] - &want).norm_inf() < 1e-15);
        assert!(curvature_norm(&g, &f) > 0.5);
    }

    #[test]
    fn a1_higgs_gauge_layout() {
        let (alg, sl2) = setup("A1");
        let omega = HFieldGrid::zeros(torus(8), 1);
        let conn = build_toda_connection(&omega, &QDifferential::Constant(c(1.0)), &alg, &sl2, Gauge::Higgs).unwrap();
        assert_eq!(conn.gauge, Gauge::Higgs);
        let phi = &conn.phi[0];
        assert!((phi.coeffs[alg.neg_simple_basis(0)].re - 0.5f64.sqrt()).abs() < 1e-15);
        // for A_1 the highest root is α itself
        assert_eq!(phi.coeffs[alg.simple_basis(0)], c(1.0));
        assert_eq!(conn.c, vec![1.0, 0.5f64.sqrt()]);
    }

    #[test]
    fn reality_in_both_gauges() {
        for t in ["A2", "B2", "G2"] {
            let (alg, sl2) = setup(t);
            let omega = smooth_field(torus(8), alg.rank(), 3, 0.4);
            let q = QDifferential::Polynomial(vec![Complex64::new(0.3, 0.2), Complex64::new(-0.1, 0.4)]);
            for gauge in [Gauge::Toda, Gauge::Higgs] {
                let conn = build_toda_connection(&omega, &q, &alg, &sl2, gauge).unwrap();
                assert!(reality_defect(&alg, &conn, &omega).unwrap() < 1e-12, "{t} {gauge:?}");
            }
        }
    }

    #[test]
    fn higgs_gauge_shape() {
        let (alg, sl2) = setup("A3");
        let omega = smooth_field(torus(8), 3, 1, 0.3);
        let q = QDifferential::Constant(Complex64::new(0.4, -0.7));
        let conn = build_toda_connection(&omega, &q, &alg, &sl2, Gauge::Higgs).unwrap();
        let toda = build_toda_connection(&omega, &q, &alg, &sl2, Gauge::Toda).unwrap();
        let mut phi0 = sl2.e_tilde.clone();
        phi0.coeffs[alg.highest_basis()] = Complex64::new(0.4, -0.7);
        for n in 0..conn.grid.len() {
            assert!(conn.a_zbar[n].is_zero());
            assert!((&conn.a_z[n] - &(&toda.a_z[n] * 2.0)).norm_inf() < 1e-15);
            assert!((&conn.phi[n] - &phi0).norm_inf() < 1e-14);
        }
    }

    #[test]
    fn constant_gauge_scales_root_slots() {
        let (alg, sl2) = setup("B2");
        let g = torus(8);
        let omega = smooth_field(g, 2, 9, 0.2);
        let conn = build_toda_connection(&omega, &QDifferential::Constant(c(1.0)), &alg, &sl2, Gauge::Toda).unwrap();
        let hv = [0.3, -0.2];
        let out = gauge_transform(&alg, &conn, &HFieldGrid::constant(g, &hv)).unwrap();
        assert_eq!(out.gauge, Gauge::General);
        for i in 0..2 {
            let b = alg.neg_simple_basis(i);
            let f = (-alg.rs.eval_root(&alg.rs.simple_root(i), &hv)).exp();
            assert!((out.phi[4].coeffs[b] - conn.phi[4].coeffs[b] * f).norm() < 1e-14);
        }
        assert_eq!(out.a_z, conn.a_z);

        let id = gauge_transform(&alg, &conn, &HFieldGrid::zeros(g, 2)).unwrap();
        assert_eq!(id.gauge, Gauge::Toda);
        assert_eq!(id.phi, conn.phi);
        assert_eq!(id.a_zbar, conn.a_zbar);
    }

    #[test]
    fn constant_solution_is_flat() {
        for t in ["A1", "A2", "C3", "G2"] {
            let (alg, sl2) = setup(t);
            let g = torus(16);
            let w0 = constant_solution(&alg, &sl2, 1.7).unwrap();
            let omega = HFieldGrid::constant(g, &w0);
            let q = QDifferential::Constant(Complex64::from_polar(1.7f64.sqrt(), 0.4));
            for gauge in [Gauge::Toda, Gauge::Higgs] {
                let conn = build_toda_connection(&omega, &q, &alg, &sl2, gauge).unwrap();
                let f = curvature(&alg, &conn).unwrap();
                assert!(curvature_norm(&g, &f) < 1e-10, "{t}");
            }
        }
    }

    #[test]
    fn curvature_is_gauge_covariant() {
        let (alg, sl2) = setup("A2");
        let g = torus(16);
        let omega = smooth_field(g, 2, 5, 0.5);
        let q = QDifferential::Polynomial(vec![c(1.0), Complex64::new(0.1, 0.05)]);
        let conn = build_toda_connection(&omega, &q, &alg, &sl2, Gauge::Toda).unwrap();
        let f = curvature(&alg, &conn).unwrap();
        let h = smooth_field(g, 2, 6, 0.7);
        let conn2 = gauge_transform(&alg, &conn, &h).unwrap();
        let f2 = curvature(&alg, &conn2).unwrap();
        let err = (0..g.len())
            .map(|n| (&f2[n] - &alg.ad_exp_real(h.at(n), &f[n])).norm_inf())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err:e}");
    }

    #[test]
    fn curvature_matches_toda_residual_to_second_order() {
        let (alg, sl2) = setup("A1");
        let q = QDifferential::Constant(c(1.0));
        let errs: Vec<f64> = [16, 32]
            .iter()
            .map(|&n| {
                let g = torus(n);
                let omega = smooth_field(g, 1, 2, 0.3);
                let conn = build_toda_connection(&omega, &q, &alg, &sl2, Gauge::Toda).unwrap();
                let f = curvature(&alg, &conn).unwrap();
                let r = higgs_residual(&omega, &q, &alg, &sl2).unwrap();
                (0..g.len())
                    .map(|m| (f[m].coeffs[0].re + r.at(m)[0]).abs().max(f[m].coeffs[0].im.abs()))
                    .fold(0.0, f64::max)
            })
            .collect();
        let ratio = errs[0] / errs[1];
        assert!((3.2..4.8).contains(&ratio), "{errs:?}");
    }

    #[test]
    fn higgs_residual_examples() {
        let (alg, sl2) = setup("A1");
        let g = torus(8);
        let r = higgs_residual(&HFieldGrid::zeros(g, 1), &QDifferential::Constant(Complex64::new(0.0, 0.5f64.sqrt())), &alg, &sl2).unwrap();
        assert!(r.values.iter().all(|v| v.abs() < 1e-15));

        // Ω = (u/2)h_α with u = sin x: -u_{zz̄} + ½e^{2u} - |q|²e^{-2u}
        let g = torus(64);
        let omega = HFieldGrid::from_fn(g, 1, |x, _| vec![0.5 * x.sin()]).unwrap();
        let r = higgs_residual(&omega, &QDifferential::Constant(c(1.0)), &alg, &sl2).unwrap();
        for n in [0, 17, 100] {
            let x = g.point(n).re;
            let u = x.sin();
            let want = 0.25 * u + 0.5 * (2.0 * u).exp() - (-2.0 * u).exp();
            assert!((r.at(n)[0] - want).abs() < 1e-3);
        }
    }

    #[test]
    fn commutator_closed_form_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for t in ["A1", "A2", "B2", "G2", "D4", "F4"] {
            let (alg, sl2) = setup(t);
            let eq = TodaEquation::new(&alg, &sl2);
            for _ in 0..20 {
                let w: Vec<f64> = (0..alg.rank()).map(|_| rng.random_range(-1.0..1.0)).collect();
                let q = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                let ex = commutator_explicit(&alg, &sl2, &w, q).unwrap();
                let cf = commutator_closed_form(&eq, &w, q.norm_sqr());
                let scale = cf.iter().fold(1.0f64, |a, v| a.max(v.abs()));
                for k in 0..alg.rank() {
                    assert!((ex.coeffs[k] - c(cf[k])).norm() < 1e-12 * scale, "{t}");
                }
                assert!(ex.coeffs[alg.rank()..].iter().all(|z| z.norm() < 1e-12 * scale));
            }
        }
    }

    #[test]
    fn chart_transition_basics() {
        let (alg, sl2) = setup("A2");
        let phi = vec![sl2.e_tilde.clone(); 3];
        assert_eq!(chart_transition(&alg, &phi, &[c(1.0); 3]).unwrap(), phi);
        let g = [Complex64::new(0.0, 2.0); 3];
        let out = chart_transition(&alg, &phi, &g).unwrap();
        let b = alg.neg_simple_basis(1);
        assert!((out[0].coeffs[b] - phi[0].coeffs[b] / g[0]).norm() < 1e-15);
        assert!(chart_transition(&alg, &phi, &[c(1.0), c(0.0), c(1.0)]).is_err());
    }

    #[test]
    fn two_chart_higgs_fields_agree() {
        // chart j: z_j = z; chart i: z_i = 2z, so g = dz_j/dz_i = ½.
        // q_i dz_i^h = q_j dz_j^h gives q_i = q_j g^h.
        let (alg, sl2) = setup("A2");
        let h = 3;
        let gj = DomainGrid::with_extent(Topology::Rectangle, 9, 9, 1.0, 1.0).unwrap();
        let gi = DomainGrid::with_extent(Topology::Rectangle, 9, 9, 2.0, 2.0).unwrap();
        let qj = QDifferential::Polynomial(vec![c(1.0), Complex64::new(0.3, 0.4)]);
        let half = c(0.5);
        let qi = QDifferential::Polynomial(vec![c(1.0) * half.powi(h), Complex64::new(0.3, 0.4) * half.powi(h) * 0.5]);
        for n in 0..gj.len() {
            assert!((qi.eval(gi.point(n)) - qj.eval(gj.point(n)) * half.powi(h)).norm() < 1e-15);
        }
        let w0 = HFieldGrid::zeros(gj, 2);
        let phi_j = build_toda_connection(&w0, &qj, &alg, &sl2, Gauge::Higgs).unwrap().phi;
        let phi_i = build_toda_connection(&HFieldGrid::zeros(gi, 2), &qi, &alg, &sl2, Gauge::Higgs).unwrap().phi;
        // Φ_i dz_i = Φ_j dz_j, i.e. Φ_i = g · (transition of Φ_j)
        let moved = chart_transition(&alg, &phi_j, &vec![half; gj.len()]).unwrap();
        for n in 0..gj.len() {
            let lhs = &phi_i[n];
            let rhs = &moved[n] * half.re;
            assert!((lhs - &rhs).norm_inf() < 1e-12, "{n}");
        }
    }

    #[test]
    fn toda_field_transition_preserves_constant_solutions() {
        // Ω_i = Ω_j + f x with e^{2f} = |g|² takes the constant solution
        // for |q_j|² to the one for |q_i|² = |g|^{2h} |q_j|².
        for t in ["A2", "B3", "G2"] {
            let (alg, sl2) = setup(t);
            let h = crate::rootdata::coxeter_number(&alg.rs) as i32;
            let g = Complex64::new(0.3, 0.4);
            let grid = torus(8);
            let wj = constant_solution(&alg, &sl2, 1.3).unwrap();
            let x = sl2.x.real_part()[..alg.rank()].to_vec();
            let moved = transition_toda_field(&HFieldGrid::constant(grid, &wj), &vec![g; grid.len()], &x).unwrap();
            let wi = constant_solution(&alg, &sl2, 1.3 * g.norm_sqr().powi(h)).unwrap();
            for k in 0..alg.rank() {
                assert!((moved.at(3)[k] - wi[k]).abs() < 1e-12, "{t}");
            }
        }
    }
}
