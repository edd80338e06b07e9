use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Element of the complexified algebra as a dense coefficient vector over
/// the Chevalley basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LieElement {
    pub coeffs: Vec<Complex64>,
}

impl LieElement {
    pub fn zero(dim: usize) -> Self {
        LieElement {
            coeffs: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.coeffs[i] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_real(values: &[f64]) -> Self {
        LieElement {
            coeffs: values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        LieElement {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Max-modulus norm.
    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.re).collect()
    }

    pub fn imag_part(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.im).collect()
    }

    pub fn add_scaled(&mut self, other: &LieElement, s: Complex64) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * s;
        }
    }
}

impl Add for &LieElement {
    type Output = LieElement;
    fn add(self, rhs: &LieElement) -> LieElement {
        LieElement {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &LieElement {
    type Output = LieElement;
    fn sub(self, rhs: &LieElement) -> LieElement {
        LieElement {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &LieElement {
    type Output = LieElement;
    fn neg(self) -> LieElement {
        LieElement {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl Mul<Complex64> for &LieElement {
    type Output = LieElement;
    fn mul(self, s: Complex64) -> LieElement {
        self.scale(s)
    }
}

impl Mul<f64> for &LieElement {
    type Output = LieElement;
    fn mul(self, s: f64) -> LieElement {
        self.scale(Complex64::new(s, 0.0))
    }
}
