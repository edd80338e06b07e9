//! Damped Newton solver for the real affine Toda equations on a grid.
//!
//! The Newton system `J s = -R` is left-multiplied node-wise by the coroot
//! Gram matrix, which makes it symmetric positive definite, and solved by
//! preconditioned conjugate gradients with node-block Jacobi.

mod equation;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use equation::TodaEquation;

use crate::chevalley::{ChevalleyAlgebra, LieElement, PrincipalSL2, Sigma};
use crate::connection::{DomainGrid, HFieldGrid, QDifferential};
use crate::error::{Result, TodaError};
use crate::rootdata::{self, LieType};

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    Zero,
    ConstantOracle,
    Perturbed { seed: u64, amplitude: f64 },
    Field(HFieldGrid),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub lie_type: LieType,
    pub grid: DomainGrid,
    pub q: QDifferential,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub init: Init,
    /// Consecutive iterations without a new best residual before giving up.
    pub patience: usize,
}

impl SolverConfig {
    pub fn new(lie_type: LieType, grid: DomainGrid, q: QDifferential) -> Self {
        SolverConfig {
            lie_type,
            grid,
            q,
            tol: 1e-10,
            max_iter: 50,
            damping: 1.0,
            init: Init::Zero,
            patience: 8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(TodaError::Precondition(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(TodaError::Precondition(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if let Init::Perturbed { amplitude, .. } = self.init {
            if !(amplitude >= 0.0 && amplitude.is_finite()) {
                return Err(TodaError::Precondition(format!("bad perturbation amplitude {amplitude}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub omega: HFieldGrid,
    /// Residual ∞-norm before each Newton step, and after the last one.
    pub residual_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub diagnostics: Option<String>,
}

impl Solution {
    pub fn residual(&self) -> f64 {
        *self.residual_history.last().unwrap_or(&f64::INFINITY)
    }
}

/// The constant Toda field for `|q|² = q2`:
/// `r_i e^{2α_i(Ω₀)} = s c_i` with `s = q2 e^{-2δ(Ω₀)}`.
///
/// Writing `δ = Σ a_i α_i` and `Σ a_i = h - 1` gives
/// `h ln s = ln q2 - Σ a_i ln(c_i / r_i)`, then `α_i(Ω₀) = ½ ln(s c_i / r_i)`
/// is a linear system in the `{h_i}` coordinates.
pub fn constant_solution(alg: &ChevalleyAlgebra, sl2: &PrincipalSL2, q2: f64) -> Result<Vec<f64>> {
    if !(q2 > 0.0 && q2.is_finite()) {
        return Err(TodaError::Precondition(format!("|q|² must be positive, got {q2}")));
    }
    let eq = TodaEquation::new(alg, sl2);
    let l = eq.rank;
    let h = rootdata::coxeter_number(&alg.rs) as f64;
    let log_ratio: Vec<f64> = (0..l).map(|i| (eq.comarks[i] / eq.r[i]).ln()).collect();
    let ln_s = (q2.ln() - (0..l).map(|i| eq.marks[i] * log_ratio[i]).sum::<f64>()) / h;
    let y = DVector::from_fn(l, |i, _| 0.5 * (ln_s + log_ratio[i]));
    let pairing = DMatrix::from_fn(l, l, |k, j| eq.pairing[k][j]);
    let w = pairing
        .lu()
        .solve(&y)
        .ok_or_else(|| TodaError::Consistency("Cartan matrix is singular".into()))?;
    Ok(w.iter().copied().collect())
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Fixed-order pairwise sum.
fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 64 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let p: Vec<f64> = a.par_iter().zip(b).map(|(x, y)| x * y).collect();
    pairwise_sum(&p)
}

fn initial_field(cfg: &SolverConfig, alg: &ChevalleyAlgebra, sl2: &PrincipalSL2) -> Result<HFieldGrid> {
    let l = alg.rank();
    let grid = cfg.grid;
    let oracle = || -> Result<HFieldGrid> {
        let mut values = Vec::with_capacity(grid.len() * l);
        for q2 in cfg.q.abs_sq_on_grid(&grid) {
            values.extend(constant_solution(alg, sl2, q2)?);
        }
        HFieldGrid::new(grid, l, values)
    };
    match &cfg.init {
        Init::Zero => Ok(HFieldGrid::zeros(grid, l)),
        Init::ConstantOracle => oracle(),
        // pointwise oracle where q has no zeros, else zero
        Init::Perturbed { seed, amplitude } => {
            let mut base = match oracle() {
                Ok(f) => f,
                _ => HFieldGrid::zeros(grid, l),
            };
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for n in 0..grid.len() {
                for k in 0..l {
                    let u: f64 = rng.random_range(-1.0..1.0);
                    if !grid.is_boundary(n) {
                        base.values[n * l + k] += amplitude * u;
                    }
                }
            }
            Ok(base)
        }
        Init::Field(f) => {
            if f.rank != l || !f.grid.same_shape(&grid) {
                return Err(TodaError::Precondition(format!(
                    "initial field is {}x{} with rank {}, expected {}x{} with rank {l}",
                    f.grid.nx, f.grid.ny, f.rank, grid.nx, grid.ny
                )));
            }
            HFieldGrid::new(grid, l, f.values.clone())
        }
    }
}

/// Newton operator `G·J` restricted to unknowns off the rectangle
/// boundary; boundary rows act as `G`.
struct NewtonSystem<'a> {
    eq: &'a TodaEquation,
    omega: &'a HFieldGrid,
    blocks: Vec<DMatrix<f64>>,
    precond: Vec<DMatrix<f64>>,
}

impl<'a> NewtonSystem<'a> {
    fn new(eq: &'a TodaEquation, omega: &'a HFieldGrid, q2: &'a [f64]) -> Self {
        let grid = omega.grid;
        let diag = 1.0 / (grid.dx * grid.dx) + 1.0 / (grid.dy * grid.dy);
        let l = eq.rank;
        let (blocks, precond): (Vec<_>, Vec<_>) = (0..grid.len())
            .into_par_iter()
            .map(|n| {
                let b = eq.source_jacobian(omega.at(n), q2[n]);
                let p = if grid.is_boundary(n) {
                    eq.gram.clone()
                } else {
                    &eq.gram * (&b + DMatrix::identity(l, l) * diag)
                };
                let inv = p
                    .clone()
                    .cholesky()
                    .map(|c| c.inverse())
                    .or_else(|| p.try_inverse())
                    .unwrap_or_else(|| DMatrix::identity(l, l));
                (b, inv)
            })
            .unzip();
        NewtonSystem {
            eq,
            omega,
            blocks,
            precond,
        }
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let l = self.eq.rank;
        let grid = self.omega.grid;
        let g = &self.eq.gram;
        let mut out = vec![0.0; v.len()];
        out.par_chunks_mut(l).enumerate().for_each(|(n, row)| {
            let mut jv = vec![0.0; l];
            if grid.is_boundary(n) {
                jv.copy_from_slice(&v[n * l..(n + 1) * l]);
            } else {
                let b = &self.blocks[n];
                for (k, jk) in jv.iter_mut().enumerate() {
                    let lap = grid.laplacian(n, |m| if grid.is_boundary(m) { 0.0 } else { v[m * l + k] });
                    *jk = -0.5 * lap + (0..l).map(|j| b[(k, j)] * v[n * l + j]).sum::<f64>();
                }
            }
            for i in 0..l {
                row[i] = (0..l).map(|k| g[(i, k)] * jv[k]).sum();
            }
        });
        out
    }

    fn precondition(&self, r: &[f64]) -> Vec<f64> {
        let l = self.eq.rank;
        let mut out = vec![0.0; r.len()];
        out.par_chunks_mut(l).enumerate().for_each(|(n, row)| {
            let p = &self.precond[n];
            for i in 0..l {
                row[i] = (0..l).map(|k| p[(i, k)] * r[n * l + k]).sum();
            }
        });
        out
    }

    /// Solve `J s = -R` by PCG on `G J s = -G R`.
    fn newton_step(&self, residual: &[f64], rtol: f64, max_iter: usize) -> Vec<f64> {
        let l = self.eq.rank;
        let g = &self.eq.gram;
        let grid = self.omega.grid;
        let mut b = vec![0.0; residual.len()];
        b.par_chunks_mut(l).enumerate().for_each(|(n, row)| {
            if grid.is_boundary(n) {
                return;
            }
            for i in 0..l {
                row[i] = -(0..l).map(|k| g[(i, k)] * residual[n * l + k]).sum::<f64>();
            }
        });
        let mut x = vec![0.0; b.len()];
        let mut r = b.clone();
        let bnorm = dot(&b, &b).sqrt();
        if bnorm == 0.0 {
            return x;
        }
        let mut z = self.precondition(&r);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        for _ in 0..max_iter {
            let ap = self.apply(&p);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                break;
            }
            let alpha = rz / pap;
            x.par_iter_mut().zip(&p).for_each(|(xi, pi)| *xi += alpha * pi);
            r.par_iter_mut().zip(&ap).for_each(|(ri, api)| *ri -= alpha * api);
            if dot(&r, &r).sqrt() <= rtol * bnorm {
                break;
            }
            z = self.precondition(&r);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            p.par_iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
        }
        x
    }
}

pub fn solve(cfg: &SolverConfig, alg: &ChevalleyAlgebra, sl2: &PrincipalSL2) -> Result<Solution> {
    cfg.validate()?;
    if alg.rs.lie_type != cfg.lie_type {
        return Err(TodaError::Precondition(format!(
            "config is for {} but the algebra is {}",
            cfg.lie_type, alg.rs.lie_type
        )));
    }
    let eq = TodaEquation::new(alg, sl2);
    let q2 = cfg.q.abs_sq_on_grid(&cfg.grid);
    let mut omega = initial_field(cfg, alg, sl2)?;
    let mut r = eq.residual(&omega, &q2)?;
    let mut res = inf_norm(&r);
    if !res.is_finite() {
        return Err(TodaError::NonFinite("initial residual".into()));
    }
    let mut history = vec![res];
    let mut best = res;
    let mut since_best = 0usize;
    let mut iterations = 0usize;
    let mut diagnostics = None;
    let cg_max = 20 * omega.values.len().max(100);

    while res > cfg.tol {
        if iterations >= cfg.max_iter {
            diagnostics = Some(format!("reached max_iter = {}", cfg.max_iter));
            break;
        }
        let step = NewtonSystem::new(&eq, &omega, &q2).newton_step(&r, 1e-12, cg_max);
        if step.iter().any(|v| !v.is_finite()) {
            return Err(TodaError::NonFinite(format!("Newton step at iteration {iterations}")));
        }
        let f0 = dot(&r, &r);
        let mut t = cfg.damping;
        let mut accepted = None;
        for _ in 0..40 {
            let values: Vec<f64> = omega.values.iter().zip(&step).map(|(w, s)| w + t * s).collect();
            if values.iter().all(|v| v.is_finite()) {
                let trial = HFieldGrid {
                    grid: omega.grid,
                    rank: omega.rank,
                    values,
                };
                let rt = eq.residual(&trial, &q2)?;
                let ft = dot(&rt, &rt);
                if ft.is_finite() && ft <= (1.0 - 2e-4 * t) * f0 {
                    accepted = Some((trial, rt));
                    break;
                }
            }
            t *= 0.5;
        }
        iterations += 1;
        let Some((trial, rt)) = accepted else {
            diagnostics = Some(format!(
                "line search stalled at iteration {iterations} with residual {res:e}"
            ));
            break;
        };
        omega = trial;
        r = rt;
        res = inf_norm(&r);
        if !res.is_finite() {
            return Err(TodaError::NonFinite(format!("residual at iteration {iterations}")));
        }
        history.push(res);
        if res < best {
            best = res;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= cfg.patience {
                diagnostics = Some(format!(
                    "residual has not improved on {best:e} for {} iterations",
                    cfg.patience
                ));
                break;
            }
        }
    }
    Ok(Solution {
        omega,
        converged: res <= cfg.tol,
        residual_history: history,
        iterations,
        diagnostics,
    })
}

/// Residual ∞-norm of a given field.
pub fn residual_norm(omega: &HFieldGrid, q: &QDifferential, alg: &ChevalleyAlgebra, sl2: &PrincipalSL2) -> Result<f64> {
    let eq = TodaEquation::new(alg, sl2);
    let r = eq.residual(omega, &q.abs_sq_on_grid(&omega.grid))?;
    Ok(inf_norm(&r))
}

/// `max_n ‖σ(Ω) - Ω‖_∞`.
pub fn sigma_symmetry_defect(omega: &HFieldGrid, alg: &ChevalleyAlgebra, sigma: &Sigma) -> f64 {
    (0..omega.grid.len())
        .into_par_iter()
        .map(|n| {
            let w: LieElement = alg.cartan_element(omega.at(n));
            (&sigma.apply(&w) - &w).norm_inf()
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub max_discrepancy: f64,
    pub converged_seeds: Vec<u64>,
    pub failed_seeds: Vec<u64>,
}

/// Solve from perturbed starts, one per seed, and report the largest
/// pairwise difference between converged fields.
pub fn uniqueness_probe(cfg: &SolverConfig, alg: &ChevalleyAlgebra, sl2: &PrincipalSL2, seeds: &[u64]) -> Result<ProbeReport> {
    if seeds.len() < 2 {
        return Err(TodaError::Precondition("uniqueness probe needs at least two seeds".into()));
    }
    let amplitude = match cfg.init {
        Init::Perturbed { amplitude, .. } => amplitude,
        _ => 0.1,
    };
    let mut fields: Vec<HFieldGrid> = Vec::new();
    let mut report = ProbeReport {
        max_discrepancy: 0.0,
        converged_seeds: Vec::new(),
        failed_seeds: Vec::new(),
    };
    for &seed in seeds {
        let mut c = cfg.clone();
        c.init = Init::Perturbed { seed, amplitude };
        let sol = solve(&c, alg, sl2)?;
        if sol.converged {
            report.converged_seeds.push(seed);
            fields.push(sol.omega);
        } else {
            report.failed_seeds.push(seed);
        }
    }
    for a in 0..fields.len() {
        for b in a + 1..fields.len() {
            report.max_discrepancy = report.max_discrepancy.max(fields[a].max_abs_diff(&fields[b]));
        }
    }
    Ok(report)
}
