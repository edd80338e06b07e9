//! Reduction by a diagram automorphism `ν`: restricted roots
//! `r(α) = ½(α + ν̂ᵗα)`, their coroots, and identification of the
//! resulting affine diagram in Kac's tables.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::chevalley::ChevalleyAlgebra;
use crate::connection::{HFieldGrid, QDifferential};
use crate::error::{Result, TodaError};
use crate::rational::{self, Rational};
use crate::rootdata::{self, affine_cartan, DiagramAutomorphism, Family, LieType, RootSystem};

#[derive(Debug, Clone)]
pub struct RestrictedSystem {
    pub base: RootSystem,
    pub nu: DiagramAutomorphism,
    /// `r(α_i)` in simple-root coordinates, one per `ν`-orbit, followed by
    /// `-δ`.
    pub restricted_roots: Vec<Vec<Rational>>,
    /// The `ν`-orbit (simple-root indices) behind each restricted simple root.
    pub orbits: Vec<Vec<usize>>,
    /// `h̃_β` in `{h_i}` coordinates, same order as `restricted_roots`.
    pub restricted_coroots: Vec<Vec<Rational>>,
    /// `r̃_β` for the restricted simple roots.
    pub r_tilde: Vec<Rational>,
    /// `gcm[i][j] = 2(β_i, β_j)/(β_i, β_i)`.
    pub gcm: Vec<Vec<i64>>,
    pub label: String,
}

/// `r(α) = ½(α + ν̂ᵗα)`.
pub fn project(nu: &DiagramAutomorphism, alpha: &[Rational]) -> Vec<Rational> {
    let moved = nu.apply_root(alpha);
    alpha
        .iter()
        .zip(&moved)
        .map(|(a, b)| (a + b) / Rational::from_integer(2))
        .collect()
}

/// Coroot of a rational root vector: `(2/(β,β)) Σ b_i d_i h_i`.
fn coroot_of(rs: &RootSystem, beta: &[Rational]) -> Vec<Rational> {
    let norm = rs.inner_q(beta, beta);
    let two = Rational::from_integer(2);
    beta.iter()
        .zip(&rs.symmetrizer)
        .map(|(b, &d)| two * b * Rational::from_integer(d) / norm)
        .collect()
}

pub fn restrict(rs: &RootSystem, nu: &DiagramAutomorphism) -> Result<RestrictedSystem> {
    let l = rs.rank();
    if nu.perm.len() != l || !nu.preserves(&rs.cartan) {
        return Err(TodaError::Precondition(format!(
            "{:?} is not a diagram automorphism of {}",
            nu.perm, rs.lie_type
        )));
    }
    let mut roots: Vec<Vec<Rational>> = Vec::new();
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for i in 0..l {
        let alpha: Vec<Rational> = (0..l)
            .map(|k| if k == i { Rational::one() } else { Rational::zero() })
            .collect();
        let beta = project(nu, &alpha);
        match roots.iter().position(|b| *b == beta) {
            Some(k) => orbits[k].push(i),
            None => {
                roots.push(beta);
                orbits.push(vec![i]);
            }
        }
    }
    let minus_delta: Vec<Rational> = rs.highest_root().iter().map(|&a| Rational::from_integer(-a)).collect();
    if project(nu, &minus_delta) != minus_delta {
        return Err(TodaError::Consistency("ν does not fix δ".into()));
    }
    roots.push(minus_delta);

    let m = roots.len();
    let mut gcm = vec![vec![0i64; m]; m];
    for i in 0..m {
        let nii = rs.inner_q(&roots[i], &roots[i]);
        for j in 0..m {
            let v = Rational::from_integer(2) * rs.inner_q(&roots[i], &roots[j]) / nii;
            if !v.is_integer() {
                return Err(TodaError::Consistency(format!(
                    "restricted Cartan entry ({i},{j}) = {} is not an integer",
                    rational::format(&v)
                )));
            }
            gcm[i][j] = v.to_integer();
        }
    }
    let coroots: Vec<Vec<Rational>> = roots.iter().map(|b| coroot_of(rs, b)).collect();

    // Σ_{α ∈ orbit} h_α = κ h̃_β, and r̃_β = r_α κ
    let r = rootdata::x_coefficients(rs);
    let mut r_tilde = Vec::with_capacity(orbits.len());
    for (k, orbit) in orbits.iter().enumerate() {
        let mut sum = vec![Rational::zero(); l];
        for &i in orbit {
            sum[i] += Rational::one();
        }
        let pivot = (0..l)
            .find(|&i| !coroots[k][i].is_zero())
            .ok_or_else(|| TodaError::Consistency("zero restricted coroot".into()))?;
        let kappa = sum[pivot] / coroots[k][pivot];
        if (0..l).any(|i| sum[i] != kappa * coroots[k][i]) {
            return Err(TodaError::Consistency(format!(
                "orbit coroot sum is not proportional to h̃ for orbit {orbit:?}"
            )));
        }
        if orbit.iter().any(|&i| r[i] != r[orbit[0]]) {
            return Err(TodaError::Consistency("x coefficients are not ν-invariant".into()));
        }
        r_tilde.push(r[orbit[0]] * kappa);
    }

    let mut rest = RestrictedSystem {
        base: rs.clone(),
        nu: nu.clone(),
        restricted_roots: roots,
        orbits,
        restricted_coroots: coroots,
        r_tilde,
        gcm,
        label: String::new(),
    };
    rest.label = classify_affine(&rest)?;
    Ok(rest)
}

#[derive(Debug, Clone)]
struct CatalogEntry {
    label: String,
    family: Family,
    twisted: bool,
    gcm: Vec<Vec<i64>>,
}

fn transpose(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    rational::transpose(m)
}

/// Chain of `l+1` nodes with squared lengths `4, 2, …, 2, 1`.
fn a_even_twisted(l: usize) -> Vec<Vec<i64>> {
    let n = l + 1;
    let len: Vec<i64> = (0..n)
        .map(|i| if i == 0 { 4 } else if i + 1 == n { 1 } else { 2 })
        .collect();
    let mut g = vec![vec![0i64; n]; n];
    for i in 0..n {
        g[i][i] = 2;
        if i + 1 < n {
            let ip = -len[i].max(len[i + 1]) / 2;
            g[i][i + 1] = 2 * ip / len[i];
            g[i + 1][i] = 2 * ip / len[i + 1];
        }
    }
    g
}

fn catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for t in LieType::all() {
        let aff = affine_cartan(&RootSystem::new(t));
        out.push(CatalogEntry {
            label: aff.kac_label,
            family: t.family,
            twisted: false,
            gcm: aff.gcm,
        });
    }
    let untwisted = |f: Family, r: usize| affine_cartan(&RootSystem::new(LieType::new(f, r).unwrap())).gcm;
    for l in 1..=rootdata::MAX_RANK {
        out.push(CatalogEntry {
            label: format!("A{}(2)", 2 * l),
            family: Family::A,
            twisted: true,
            gcm: a_even_twisted(l),
        });
    }
    for l in 3..=rootdata::MAX_RANK {
        out.push(CatalogEntry {
            label: format!("A{}(2)", 2 * l - 1),
            family: Family::A,
            twisted: true,
            gcm: transpose(&untwisted(Family::B, l)),
        });
    }
    for l in 2..=rootdata::MAX_RANK {
        out.push(CatalogEntry {
            label: format!("D{}(2)", l + 1),
            family: Family::D,
            twisted: true,
            gcm: transpose(&untwisted(Family::C, l)),
        });
    }
    out.push(CatalogEntry {
        label: "E6(2)".into(),
        family: Family::E,
        twisted: true,
        gcm: transpose(&untwisted(Family::F, 4)),
    });
    out.push(CatalogEntry {
        label: "D4(3)".into(),
        family: Family::D,
        twisted: true,
        gcm: transpose(&untwisted(Family::G, 2)),
    });
    out
}

/// Whether `b` is `a` with rows and columns simultaneously permuted.
pub fn equivalent_gcm(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    let n = a.len();
    if b.len() != n {
        return false;
    }
    let profile = |m: &[Vec<i64>], i: usize| {
        let mut row: Vec<i64> = m[i].clone();
        let mut col: Vec<i64> = (0..n).map(|k| m[k][i]).collect();
        row.sort_unstable();
        col.sort_unstable();
        (row, col)
    };
    let pa: Vec<_> = (0..n).map(|i| profile(a, i)).collect();
    let pb: Vec<_> = (0..n).map(|i| profile(b, i)).collect();
    let mut assign = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn extend(
        i: usize,
        a: &[Vec<i64>],
        b: &[Vec<i64>],
        pa: &[(Vec<i64>, Vec<i64>)],
        pb: &[(Vec<i64>, Vec<i64>)],
        assign: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let n = a.len();
        if i == n {
            return true;
        }
        for j in 0..n {
            if used[j] || pa[i] != pb[j] {
                continue;
            }
            let ok = (0..i).all(|k| a[i][k] == b[j][assign[k]] && a[k][i] == b[assign[k]][j]);
            if !ok {
                continue;
            }
            assign[i] = j;
            used[j] = true;
            if extend(i + 1, a, b, pa, pb, assign, used) {
                return true;
            }
            used[j] = false;
        }
        false
    }
    extend(0, a, b, &pa, &pb, &mut assign, &mut used)
}

/// Kac label of the restricted affine diagram.
///
/// Low-rank coincidences (`B2(1) = C2(1)`, `A3(1) = D3(1)`) are resolved
/// by preferring the base type's own label when `ν` is trivial and the
/// family the reduction lands in otherwise (`A → C`, `D → B`, `E → F`).
pub fn classify_affine(rest: &RestrictedSystem) -> Result<String> {
    let matches: Vec<CatalogEntry> = catalog()
        .into_par_iter()
        .filter(|e| equivalent_gcm(&rest.gcm, &e.gcm))
        .collect();
    if matches.is_empty() {
        return Err(TodaError::NoCatalogMatch(rest.gcm.clone()));
    }
    let base = rest.base.lie_type;
    if rest.nu.is_trivial() {
        let own = format!("{base}(1)");
        if let Some(e) = matches.iter().find(|e| e.label == own) {
            return Ok(e.label.clone());
        }
    }
    let preferred = match base.family {
        Family::A => Some(Family::C),
        Family::D => Some(Family::B),
        Family::E => Some(Family::F),
        _ => None,
    };
    let pick = preferred
        .and_then(|f| matches.iter().find(|e| e.family == f && !e.twisted))
        .or_else(|| matches.iter().find(|e| e.twisted && e.family == base.family))
        .unwrap_or(&matches[0]);
    Ok(pick.label.clone())
}

/// Largest `|Ω_i - Ω_{ν(i)}|` over the grid.
pub fn nu_defect(omega: &HFieldGrid, nu: &DiagramAutomorphism) -> f64 {
    (0..omega.grid.len())
        .map(|n| {
            let w = omega.at(n);
            (0..w.len()).map(|i| (w[i] - w[nu.perm[i]]).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// `-2Ω_{zz̄} + Σ_β r̃_β e^{2β(Ω)} h̃_β + |q|² e^{-2δ(Ω)} h̃_{-δ}` on a
/// `ν`-fixed field, in `{h_i}` coordinates.
pub fn restricted_toda_residual(
    omega: &HFieldGrid,
    q: &QDifferential,
    rest: &RestrictedSystem,
    alg: &ChevalleyAlgebra,
) -> Result<HFieldGrid> {
    let l = rest.base.rank();
    if omega.rank != l || alg.rank() != l {
        return Err(TodaError::DimensionMismatch {
            expected: l,
            got: omega.rank,
        });
    }
    let defect = nu_defect(omega, &rest.nu);
    if defect > 1e-12 {
        return Err(TodaError::Precondition(format!(
            "field is not ν-fixed (defect {defect:e})"
        )));
    }
    let to_f = |v: &[Rational]| v.iter().map(rational::to_f64).collect::<Vec<f64>>();
    let betas: Vec<Vec<f64>> = rest.restricted_roots.iter().map(|b| to_f(b)).collect();
    let coroots: Vec<Vec<f64>> = rest.restricted_coroots.iter().map(|h| to_f(h)).collect();
    let r_tilde: Vec<f64> = rest.r_tilde.iter().map(rational::to_f64).collect();
    let k = r_tilde.len();
    let cartan = &rest.base.cartan;
    let grid = omega.grid;
    let q2 = q.abs_sq_on_grid(&grid);

    let mut values = vec![0.0; omega.values.len()];
    values.par_chunks_mut(l).enumerate().for_each(|(n, row)| {
        if grid.is_boundary(n) {
            return;
        }
        let w = omega.at(n);
        // β(Ω) = Σ_i b_i α_i(Ω), α_i(Ω) = Σ_j w_j A[j][i]
        let alpha: Vec<f64> = (0..l).map(|i| (0..l).map(|j| w[j] * cartan[j][i] as f64).sum()).collect();
        let eval = |b: &[f64]| b.iter().zip(&alpha).map(|(x, y)| x * y).sum::<f64>();
        for (c, out) in row.iter_mut().enumerate() {
            *out = -0.5 * grid.laplacian(n, |m| omega.component(m, c));
        }
        for (j, beta) in betas.iter().enumerate() {
            let coef = if j < k {
                r_tilde[j] * (2.0 * eval(beta)).exp()
            } else {
                // β = -δ
                q2[n] * (2.0 * eval(beta)).exp()
            };
            for c in 0..l {
                row[c] += coef * coroots[j][c];
            }
        }
    });
    HFieldGrid::new(grid, l, values)
}

#[derive(Debug, Clone, Serialize)]
pub struct RestrictionSummary {
    pub lie_type: String,
    pub nu: Vec<usize>,
    pub restricted_roots: Vec<Vec<String>>,
    pub r_tilde: Vec<String>,
    pub gcm: Vec<Vec<i64>>,
    pub label: String,
}

impl RestrictedSystem {
    pub fn summary(&self) -> RestrictionSummary {
        let fmt = |v: &[Rational]| v.iter().map(rational::format).collect::<Vec<_>>();
        RestrictionSummary {
            lie_type: self.base.lie_type.to_string(),
            nu: self.nu.perm.clone(),
            restricted_roots: self.restricted_roots.iter().map(|b| fmt(b)).collect(),
            r_tilde: fmt(&self.r_tilde),
            gcm: self.gcm.clone(),
            label: self.label.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevalley::build_principal_sl2;
    use crate::connection::{higgs_residual, DomainGrid, Topology};
    use crate::rootdata::diagram_automorphism;
    use crate::todasolver::constant_solution;
    use num_complex::Complex64;

    fn rest(t: &str) -> RestrictedSystem {
        let rs = RootSystem::new(t.parse().unwrap());
        let nu = diagram_automorphism(&rs);
        restrict(&rs, &nu).unwrap()
    }

    #[test]
    fn a2_gcm_by_hand() {
        let r = rest("A2");
        assert_eq!(r.gcm, vec![vec![2, -4], vec![-1, 2]]);
        assert_eq!(r.label, "A2(2)");
        assert_eq!(r.r_tilde, vec![Rational::new(1, 2)]);
    }

    #[test]
    fn a3_collapses_to_c2() {
        let r = rest("A3");
        assert_eq!(r.restricted_roots.len(), 3);
        assert_eq!(r.orbits, vec![vec![0, 2], vec![1]]);
        assert_eq!(r.label, "C2(1)");
        // orthogonal orbit: κ = 1
        assert_eq!(r.r_tilde[0], rootdata::x_coefficients(&r.base)[0]);
    }

    #[test]
    fn table() {
        for (t, want) in [
            ("A2", "A2(2)"),
            ("A4", "A4(2)"),
            ("A6", "A6(2)"),
            ("A8", "A8(2)"),
            ("A3", "C2(1)"),
            ("A5", "C3(1)"),
            ("A7", "C4(1)"),
            ("D5", "B4(1)"),
            ("D7", "B6(1)"),
            ("E6", "F4(1)"),
        ] {
            assert_eq!(rest(t).label, want, "{t}");
        }
    }

    #[test]
    fn trivial_nu_gives_extended_diagram() {
        for t in LieType::all() {
            let rs = RootSystem::new(t);
            let r = restrict(&rs, &DiagramAutomorphism::identity(t.rank)).unwrap();
            assert_eq!(r.label, format!("{t}(1)"));
            assert_eq!(r.gcm, {
                // same matrix up to moving node 0 to the end
                let g = affine_cartan(&rs).gcm;
                let n = g.len();
                let idx = |i: usize| (i + 1) % n;
                (0..n).map(|i| (0..n).map(|j| g[idx(i)][idx(j)]).collect()).collect::<Vec<Vec<i64>>>()
            });
        }
    }

    #[test]
    fn restricted_gcm_is_affine() {
        for t in ["A2", "A3", "A4", "A5", "A8", "D5", "D7", "E6"] {
            let r = rest(t);
            assert_eq!(rational::integer_nullspace(&r.gcm).len(), 1, "{t}");
            assert_eq!(rational::integer_nullspace(&transpose(&r.gcm)).len(), 1, "{t}");
        }
    }

    #[test]
    fn rejects_non_automorphism() {
        let rs = RootSystem::new("B3".parse().unwrap());
        let bad = DiagramAutomorphism {
            perm: vec![2, 1, 0],
            order: 2,
        };
        assert!(restrict(&rs, &bad).is_err());
    }

    #[test]
    fn unmatched_gcm_is_an_error() {
        let mut r = rest("A3");
        r.gcm = vec![vec![2, -5], vec![-1, 2]];
        assert!(matches!(classify_affine(&r), Err(TodaError::NoCatalogMatch(_))));
    }

    #[test]
    fn coroots_are_dual_on_restricted_space() {
        for t in ["A4", "D5", "E6"] {
            let r = rest(t);
            let rs = &r.base;
            for (i, b) in r.restricted_roots.iter().enumerate() {
                for (j, hb) in r.restricted_coroots.iter().enumerate() {
                    // β_i(h̃_j) with β_i = Σ b_k α_k and α_k(h_m) = A[m][k]
                    let mut v = Rational::zero();
                    for k in 0..rs.rank() {
                        for m in 0..rs.rank() {
                            v += b[k] * hb[m] * Rational::from_integer(rs.cartan[m][k]);
                        }
                    }
                    assert_eq!(v, Rational::from_integer(r.gcm[j][i]), "{t}");
                }
            }
        }
    }

    fn symmetric_field(grid: DomainGrid, nu: &DiagramAutomorphism, seed: f64) -> HFieldGrid {
        let l = nu.perm.len();
        HFieldGrid::from_fn(grid, l, |x, y| {
            let raw: Vec<f64> = (0..l)
                .map(|i| 0.2 * ((i as f64 + seed) * x).sin() + 0.1 * ((i as f64 + 1.0) * y + seed).cos())
                .collect();
            let moved = nu.apply_coroot(&raw);
            raw.iter().zip(&moved).map(|(a, b)| 0.5 * (a + b)).collect()
        })
        .unwrap()
    }

    #[test]
    fn restricted_matches_unrestricted_on_symmetric_fields() {
        let p = 2.0 * std::f64::consts::PI;
        let grid = DomainGrid::with_extent(Topology::Torus, 16, 16, p, p).unwrap();
        let q = QDifferential::Constant(Complex64::new(0.8, 0.3));
        for t in ["A2", "A3", "A4", "A5", "D5", "E6", "B3"] {
            let r = rest(t);
            let alg = ChevalleyAlgebra::from_type(t.parse().unwrap());
            let sl2 = build_principal_sl2(&alg).unwrap();
            let omega = symmetric_field(grid, &r.nu, 0.7);
            let a = restricted_toda_residual(&omega, &q, &r, &alg).unwrap();
            let b = higgs_residual(&omega, &q, &alg, &sl2).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12, "{t}: {:e}", a.max_abs_diff(&b));
        }
    }

    #[test]
    fn restricted_residual_of_oracle_and_asymmetric_input() {
        let r = rest("A2");
        let alg = ChevalleyAlgebra::from_type("A2".parse().unwrap());
        let sl2 = build_principal_sl2(&alg).unwrap();
        let grid = DomainGrid::new(Topology::Torus, 8, 8, 0.5, 0.5).unwrap();
        let q = QDifferential::Constant(Complex64::new(1.3, 0.0));
        let w0 = constant_solution(&alg, &sl2, 1.69).unwrap();
        let res = restricted_toda_residual(&HFieldGrid::constant(grid, &w0), &q, &r, &alg).unwrap();
        assert!(res.values.iter().all(|v| v.abs() < 1e-13));
        let asym = HFieldGrid::constant(grid, &[0.1, 0.2]);
        assert!(restricted_toda_residual(&asym, &q, &r, &alg).is_err());
    }
}
