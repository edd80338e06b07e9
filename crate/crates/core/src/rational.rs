//! Exact rational linear algebra over `Ratio<i64>`.
//!
//! Matrices here are at most 9×9 with small entries, so `i64` never
//! overflows in practice.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Rational = Ratio<i64>;

/// Basis of the right kernel `{v : M v = 0}` of a rational matrix.
pub fn nullspace(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c];
                for j in 0..cols {
                    let t = a[r][j] * f;
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][f];
            }
            v
        })
        .collect()
}

/// Integer kernel of an integer matrix, each basis vector scaled to a
/// primitive integer vector.
pub fn integer_nullspace(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let q: Vec<Vec<Rational>> = m
        .iter()
        .map(|row| row.iter().map(|&x| Rational::from_integer(x)).collect())
        .collect();
    nullspace(&q).iter().map(|v| primitive(v)).collect()
}

/// Clear denominators and divide by the gcd. The first nonzero entry is
/// made positive.
pub fn primitive(v: &[Rational]) -> Vec<i64> {
    let lcm = v.iter().fold(1i64, |acc, x| acc.lcm(x.denom()));
    let ints: Vec<i64> = v.iter().map(|x| (x * lcm).to_integer()).collect();
    let g = ints.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g == 0 {
        return ints;
    }
    let sign = ints.iter().find(|x| **x != 0).map_or(1, |x| x.signum());
    ints.iter().map(|x| sign * x / g).collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |acc, x| acc.gcd(x))
}

/// Render a rational as `p` or `p/q`.
pub fn format(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_affine_a2() {
        let m = vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]];
        assert_eq!(integer_nullspace(&m), vec![vec![1, 1, 1]]);
    }

    #[test]
    fn full_rank_has_trivial_kernel() {
        let m = vec![vec![2, -1], vec![-1, 2]];
        assert!(integer_nullspace(&m).is_empty());
    }

    #[test]
    fn primitive_clears_denominators() {
        let v = [Rational::new(1, 2), Rational::new(-3, 4), Rational::zero()];
        assert_eq!(primitive(&v), vec![2, -3, 0]);
        assert_eq!(format(&Rational::new(3, 2)), "3/2");
        assert_eq!(format(&Rational::from_integer(4)), "4");
    }
}
