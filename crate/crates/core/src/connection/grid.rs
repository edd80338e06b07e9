//! Uniform grids on a flat torus or a rectangle, h-valued fields on them
//! and the holomorphic differential `q`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TodaError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Torus,
    Rectangle,
}

impl FromStr for Topology {
    type Err = TodaError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "torus" => Ok(Topology::Torus),
            "rectangle" | "rect" => Ok(Topology::Rectangle),
            _ => Err(TodaError::Parse(format!("unknown topology '{s}'"))),
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topology::Torus => "torus",
            Topology::Rectangle => "rectangle",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Neighbours used by a first difference at one node.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    pub plus: usize,
    pub minus: usize,
    pub span: f64,
}

/// Node `(ix, iy)` sits at `z = ix·dx + i·iy·dy`; nodes are stored
/// row-major, `n = iy·nx + ix`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainGrid {
    pub topology: Topology,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

impl DomainGrid {
    pub fn new(topology: Topology, nx: usize, ny: usize, dx: f64, dy: f64) -> Result<Self> {
        if nx < 8 || ny < 8 {
            return Err(TodaError::Precondition(format!(
                "grid must be at least 8x8, got {nx}x{ny}"
            )));
        }
        if !(dx > 0.0 && dy > 0.0 && dx.is_finite() && dy.is_finite()) {
            return Err(TodaError::Precondition(format!(
                "grid spacings must be positive, got dx={dx}, dy={dy}"
            )));
        }
        Ok(DomainGrid {
            topology,
            nx,
            ny,
            dx,
            dy,
        })
    }

    /// Grid covering `[0, lx] × [0, ly]`. On a torus the far edge is
    /// identified with the near one.
    pub fn with_extent(topology: Topology, nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        let (sx, sy) = match topology {
            Topology::Torus => (nx as f64, ny as f64),
            Topology::Rectangle => (nx.saturating_sub(1) as f64, ny.saturating_sub(1) as f64),
        };
        Self::new(topology, nx, ny, lx / sx, ly / sy)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    pub fn coords(&self, n: usize) -> (usize, usize) {
        (n % self.nx, n / self.nx)
    }

    pub fn point(&self, n: usize) -> Complex64 {
        let (ix, iy) = self.coords(n);
        Complex64::new(ix as f64 * self.dx, iy as f64 * self.dy)
    }

    pub fn is_boundary(&self, n: usize) -> bool {
        if self.topology == Topology::Torus {
            return false;
        }
        let (ix, iy) = self.coords(n);
        ix == 0 || iy == 0 || ix + 1 == self.nx || iy + 1 == self.ny
    }

    /// Nodes where residuals are measured.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.len()).filter(|&n| !self.is_boundary(n)).collect()
    }

    /// Central difference in the interior or on a torus, one-sided on a
    /// rectangle edge.
    pub fn stencil(&self, n: usize, axis: Axis) -> Stencil {
        let (ix, iy) = self.coords(n);
        let (i, len, h) = match axis {
            Axis::X => (ix, self.nx, self.dx),
            Axis::Y => (iy, self.ny, self.dy),
        };
        let (ip, im, span) = match self.topology {
            Topology::Torus => ((i + 1) % len, (i + len - 1) % len, 2.0 * h),
            Topology::Rectangle if i == 0 => (1, 0, h),
            Topology::Rectangle if i + 1 == len => (i, i - 1, h),
            Topology::Rectangle => (i + 1, i - 1, 2.0 * h),
        };
        let at = |k: usize| match axis {
            Axis::X => self.index(k, iy),
            Axis::Y => self.index(ix, k),
        };
        Stencil {
            plus: at(ip),
            minus: at(im),
            span,
        }
    }

    /// The four 5-point neighbours `(x+, x-, y+, y-)` of an interior node.
    pub fn neighbors(&self, n: usize) -> [usize; 4] {
        let (ix, iy) = self.coords(n);
        let (nx, ny) = (self.nx, self.ny);
        [
            self.index((ix + 1) % nx, iy),
            self.index((ix + nx - 1) % nx, iy),
            self.index(ix, (iy + 1) % ny),
            self.index(ix, (iy + ny - 1) % ny),
        ]
    }

    /// `∂f` along `axis` at node `n` for a scalar field given by `f`.
    pub fn diff<F: Fn(usize) -> Complex64>(&self, n: usize, axis: Axis, f: F) -> Complex64 {
        let s = self.stencil(n, axis);
        (f(s.plus) - f(s.minus)) / s.span
    }

    /// `∂_z = ½(∂_x - i∂_y)`.
    pub fn d_z<F: Fn(usize) -> Complex64>(&self, n: usize, f: F) -> Complex64 {
        let fx = self.diff(n, Axis::X, &f);
        let fy = self.diff(n, Axis::Y, &f);
        0.5 * (fx - Complex64::i() * fy)
    }

    /// `∂_z̄ = ½(∂_x + i∂_y)`.
    pub fn d_zbar<F: Fn(usize) -> Complex64>(&self, n: usize, f: F) -> Complex64 {
        let fx = self.diff(n, Axis::X, &f);
        let fy = self.diff(n, Axis::Y, &f);
        0.5 * (fx + Complex64::i() * fy)
    }

    /// 5-point Laplacian; zero on rectangle boundary nodes.
    pub fn laplacian<F: Fn(usize) -> f64>(&self, n: usize, f: F) -> f64 {
        if self.is_boundary(n) {
            return 0.0;
        }
        let [xp, xm, yp, ym] = self.neighbors(n);
        let c = f(n);
        (f(xp) - 2.0 * c + f(xm)) / (self.dx * self.dx) + (f(yp) - 2.0 * c + f(ym)) / (self.dy * self.dy)
    }

    pub fn same_shape(&self, other: &DomainGrid) -> bool {
        self.topology == other.topology && self.nx == other.nx && self.ny == other.ny
    }
}

/// An h-valued field: at each node the coordinates in the `{h_i}` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HFieldGrid {
    pub grid: DomainGrid,
    pub rank: usize,
    /// Node-major: `values[n * rank + k]`.
    pub values: Vec<f64>,
}

impl HFieldGrid {
    pub fn new(grid: DomainGrid, rank: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() * rank {
            return Err(TodaError::DimensionMismatch {
                expected: grid.len() * rank,
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(TodaError::NonFinite(format!(
                "field value at node {}, component {}",
                k / rank.max(1),
                k % rank.max(1)
            )));
        }
        Ok(HFieldGrid { grid, rank, values })
    }

    pub fn zeros(grid: DomainGrid, rank: usize) -> Self {
        HFieldGrid {
            grid,
            rank,
            values: vec![0.0; grid.len() * rank],
        }
    }

    pub fn constant(grid: DomainGrid, value: &[f64]) -> Self {
        let mut values = Vec::with_capacity(grid.len() * value.len());
        for _ in 0..grid.len() {
            values.extend_from_slice(value);
        }
        HFieldGrid {
            grid,
            rank: value.len(),
            values,
        }
    }

    /// Sample `f(x, y)` at every node.
    pub fn from_fn<F: Fn(f64, f64) -> Vec<f64>>(grid: DomainGrid, rank: usize, f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len() * rank);
        for n in 0..grid.len() {
            let z = grid.point(n);
            let v = f(z.re, z.im);
            if v.len() != rank {
                return Err(TodaError::DimensionMismatch {
                    expected: rank,
                    got: v.len(),
                });
            }
            values.extend(v);
        }
        Self::new(grid, rank, values)
    }

    pub fn at(&self, n: usize) -> &[f64] {
        &self.values[n * self.rank..(n + 1) * self.rank]
    }

    pub fn component(&self, n: usize, k: usize) -> f64 {
        self.values[n * self.rank + k]
    }

    /// `max_n max_k |a - b|`.
    pub fn max_abs_diff(&self, other: &HFieldGrid) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// The holomorphic differential `q` in a chart.
#[derive(Debug, Clone, PartialEq)]
pub enum QDifferential {
    Constant(Complex64),
    /// Coefficients in increasing degree.
    Polynomial(Vec<Complex64>),
}

impl QDifferential {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            QDifferential::Constant(c) => *c,
            QDifferential::Polynomial(cs) => cs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, QDifferential::Constant(_))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        match self {
            QDifferential::Constant(c) => QDifferential::Constant(c * s),
            QDifferential::Polynomial(cs) => QDifferential::Polynomial(cs.iter().map(|c| c * s).collect()),
        }
    }

    pub fn on_grid(&self, grid: &DomainGrid) -> Vec<Complex64> {
        (0..grid.len()).map(|n| self.eval(grid.point(n))).collect()
    }

    /// `|q|²` at every node.
    pub fn abs_sq_on_grid(&self, grid: &DomainGrid) -> Vec<f64> {
        self.on_grid(grid).iter().map(|q| q.norm_sqr()).collect()
    }
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || TodaError::Parse(format!("expected 're' or 're,im', got '{s}'"));
    let mut it = s.split(',').map(str::trim);
    let re: f64 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let im: f64 = match it.next() {
        Some(t) => t.parse().map_err(|_| bad())?,
        None => 0.0,
    };
    if it.next().is_some() || !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// `const:re[,im]` or `poly:re,im;re,im;...` (constant term first).
impl FromStr for QDifferential {
    type Err = TodaError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("const:") {
            return Ok(QDifferential::Constant(parse_complex(rest)?));
        }
        if let Some(rest) = s.strip_prefix("poly:") {
            let cs = rest
                .split(';')
                .filter(|t| !t.trim().is_empty())
                .map(parse_complex)
                .collect::<Result<Vec<_>>>()?;
            if cs.is_empty() {
                return Err(TodaError::Parse("polynomial q needs at least one coefficient".into()));
            }
            return Ok(QDifferential::Polynomial(cs));
        }
        Err(TodaError::Parse(format!(
            "q must look like 'const:re[,im]' or 'poly:re,im;re,im;...', got '{s}'"
        )))
    }
}

impl fmt::Display for QDifferential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QDifferential::Constant(c) => write!(f, "const:{},{}", c.re, c.im),
            QDifferential::Polynomial(cs) => {
                let parts: Vec<String> = cs.iter().map(|c| format!("{},{}", c.re, c.im)).collect();
                write!(f, "poly:{}", parts.join(";"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_small_or_degenerate() {
        assert!(DomainGrid::new(Topology::Torus, 4, 16, 0.1, 0.1).is_err());
        assert!(DomainGrid::new(Topology::Torus, 16, 16, 0.0, 0.1).is_err());
        assert!(DomainGrid::new(Topology::Torus, 16, 16, 0.1, f64::NAN).is_err());
    }

    #[test]
    fn torus_stencil_wraps() {
        let g = DomainGrid::new(Topology::Torus, 8, 10, 0.5, 0.25).unwrap();
        let s = g.stencil(g.index(0, 3), Axis::X);
        assert_eq!(s.plus, g.index(1, 3));
        assert_eq!(s.minus, g.index(7, 3));
        assert_eq!(s.span, 1.0);
        let s = g.stencil(g.index(2, 9), Axis::Y);
        assert_eq!(s.plus, g.index(2, 0));
        assert_eq!(s.minus, g.index(2, 8));
        assert!(g.interior().len() == g.len());
    }

    #[test]
    fn rectangle_one_sided_at_edges() {
        let g = DomainGrid::with_extent(Topology::Rectangle, 9, 9, 1.0, 1.0).unwrap();
        assert_eq!(g.dx, 0.125);
        let s = g.stencil(g.index(0, 4), Axis::X);
        assert_eq!((s.plus, s.minus, s.span), (g.index(1, 4), g.index(0, 4), 0.125));
        let s = g.stencil(g.index(4, 8), Axis::Y);
        assert_eq!((s.plus, s.minus), (g.index(4, 8), g.index(4, 7)));
        assert_eq!(g.interior().len(), 49);
    }

    #[test]
    fn differences_of_quadratics() {
        let g = DomainGrid::with_extent(Topology::Rectangle, 11, 11, 1.0, 1.0).unwrap();
        // f = z z̄ = x² + y²: ∂_z f = z̄, Δf = 4
        let f = |n: usize| {
            let z = g.point(n);
            z * z.conj()
        };
        let n = g.index(5, 3);
        let z = g.point(n);
        assert!((g.d_z(n, f) - z.conj()).norm() < 1e-12);
        assert!((g.d_zbar(n, f) - z).norm() < 1e-12);
        assert!((g.laplacian(n, |m| f(m).re) - 4.0).abs() < 1e-10);
        assert_eq!(g.laplacian(g.index(0, 0), |m| f(m).re), 0.0);
    }

    #[test]
    fn q_parsing_and_eval() {
        let q: QDifferential = "const:1.5".parse().unwrap();
        assert_eq!(q, QDifferential::Constant(Complex64::new(1.5, 0.0)));
        let q: QDifferential = "poly:1,0;0,2".parse().unwrap();
        let z = Complex64::new(0.5, -1.0);
        assert_eq!(q.eval(z), Complex64::new(1.0, 0.0) + Complex64::new(0.0, 2.0) * z);
        assert_eq!(q.to_string().parse::<QDifferential>().unwrap(), q);
        assert!("const:x".parse::<QDifferential>().is_err());
        assert!("sin:1".parse::<QDifferential>().is_err());
        assert!("const:1,2,3".parse::<QDifferential>().is_err());
    }

    #[test]
    fn field_checks() {
        let g = DomainGrid::new(Topology::Torus, 8, 8, 1.0, 1.0).unwrap();
        assert!(HFieldGrid::new(g, 2, vec![0.0; 127]).is_err());
        let mut v = vec![0.0; 128];
        v[77] = f64::INFINITY;
        assert!(matches!(HFieldGrid::new(g, 2, v), Err(TodaError::NonFinite(_))));
        let c = HFieldGrid::constant(g, &[1.0, -2.0]);
        assert_eq!(c.at(63), &[1.0, -2.0]);
        assert_eq!(c.max_abs_diff(&HFieldGrid::zeros(g, 2)), 2.0);
    }
}
