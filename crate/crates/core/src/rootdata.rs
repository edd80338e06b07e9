//! Root systems of the simple Lie algebras of rank at most 8.
//!
//! Roots are integer coefficient vectors over the simple roots. The inner
//! product is the symmetrized Cartan form `(α_i, α_j) = d_i A_ij`, with
//! `d_i = (α_i, α_i)/2` equal to 1 on short roots. All data here is exact.
//!
//! Cartan matrix convention: `A[i][j] = α_j(h_i) = 2(α_i, α_j)/(α_i, α_i)`,
//! Bourbaki node numbering. In the affine matrix node 0 is `α_0 = -δ`.
//!
//! Positive roots are ordered by height, then by descending lexicographic
//! order of their coefficient vectors, so the simple roots come first and
//! in index order.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Result, TodaError};
use crate::rational::{self, Rational};

pub const MAX_RANK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LieType {
    pub family: Family,
    pub rank: usize,
}

impl LieType {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 3,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if !ok || rank > MAX_RANK {
            return Err(TodaError::UnsupportedType(format!("{}{}", family.letter(), rank)));
        }
        Ok(LieType { family, rank })
    }

    /// Every supported type, in family then rank order.
    pub fn all() -> Vec<LieType> {
        use Family::*;
        let mut out = Vec::new();
        for family in [A, B, C, D, E, F, G] {
            for rank in 1..=MAX_RANK {
                if let Ok(t) = LieType::new(family, rank) {
                    out.push(t);
                }
            }
        }
        out
    }

    /// Finite Cartan matrix, `A[i][j] = α_j(h_i)`.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let l = self.rank;
        let mut a = vec![vec![0i64; l]; l];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut link = |i: usize, j: usize| {
            a[i][j] = -1;
            a[j][i] = -1;
        };
        match self.family {
            Family::A => (0..l - 1).for_each(|i| link(i, i + 1)),
            Family::B | Family::C => (0..l - 1).for_each(|i| link(i, i + 1)),
            Family::D => {
                (0..l - 2).for_each(|i| link(i, i + 1));
                link(l - 3, l - 1);
            }
            Family::E => {
                for (i, j) in [(0, 2), (2, 3), (3, 4), (1, 3)] {
                    link(i, j);
                }
                (4..l - 1).for_each(|i| link(i, i + 1));
            }
            Family::F => (0..3).for_each(|i| link(i, i + 1)),
            Family::G => link(0, 1),
        }
        match self.family {
            // α_l short
            Family::B => a[l - 1][l - 2] = -2,
            // α_l long
            Family::C => a[l - 2][l - 1] = -2,
            // α_1, α_2 long; α_3, α_4 short
            Family::F => a[2][1] = -2,
            // α_1 short
            Family::G => a[0][1] = -3,
            _ => {}
        }
        a
    }

    /// Half squared lengths `d_i` of the simple roots (short roots have 1).
    pub fn symmetrizer(&self) -> Vec<i64> {
        let l = self.rank;
        match self.family {
            Family::B => (0..l).map(|i| if i == l - 1 { 1 } else { 2 }).collect(),
            Family::C => (0..l).map(|i| if i == l - 1 { 2 } else { 1 }).collect(),
            Family::F => vec![2, 2, 1, 1],
            Family::G => vec![1, 3],
            _ => vec![1; l],
        }
    }
}

impl fmt::Display for LieType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for LieType {
    type Err = TodaError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(TodaError::UnsupportedType(s.to_string())),
        };
        let rank: usize = chars
            .as_str()
            .trim_start_matches('_')
            .parse()
            .map_err(|_| TodaError::UnsupportedType(s.to_string()))?;
        LieType::new(family, rank)
    }
}

impl Serialize for LieType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A root as its coefficient vector over the simple roots.
pub type Root = Vec<i64>;

#[derive(Debug, Clone)]
pub struct RootSystem {
    pub lie_type: LieType,
    pub cartan: Vec<Vec<i64>>,
    pub symmetrizer: Vec<i64>,
    pub positive_roots: Vec<Root>,
    index: HashMap<Root, usize>,
}

impl RootSystem {
    pub fn new(lie_type: LieType) -> Self {
        build_root_system(lie_type)
    }

    pub fn rank(&self) -> usize {
        self.lie_type.rank
    }

    pub fn num_positive(&self) -> usize {
        self.positive_roots.len()
    }

    pub fn dim(&self) -> usize {
        self.rank() + 2 * self.num_positive()
    }

    pub fn simple_root(&self, i: usize) -> Root {
        let mut r = vec![0; self.rank()];
        r[i] = 1;
        r
    }

    /// Highest root δ; last in the ordering since it is the unique root of
    /// maximal height.
    pub fn highest_root(&self) -> &Root {
        self.positive_roots.last().expect("nonempty root system")
    }

    pub fn height(root: &[i64]) -> i64 {
        root.iter().sum()
    }

    /// Index of a positive root, if `root` is one.
    pub fn positive_index(&self, root: &[i64]) -> Option<usize> {
        self.index.get(root).copied()
    }

    pub fn is_root(&self, root: &[i64]) -> bool {
        if self.index.contains_key(root) {
            return true;
        }
        let neg: Root = root.iter().map(|x| -x).collect();
        self.index.contains_key(&neg)
    }

    /// `(a, b)` under the symmetrized form, for integer vectors.
    pub fn inner(&self, a: &[i64], b: &[i64]) -> i64 {
        let l = self.rank();
        let mut s = 0;
        for i in 0..l {
            if a[i] == 0 {
                continue;
            }
            for j in 0..l {
                s += a[i] * b[j] * self.symmetrizer[i] * self.cartan[i][j];
            }
        }
        s
    }

    /// `(a, b)` for rational vectors in simple-root coordinates.
    pub fn inner_q(&self, a: &[Rational], b: &[Rational]) -> Rational {
        let l = self.rank();
        let mut s = Rational::from_integer(0);
        for i in 0..l {
            for j in 0..l {
                s += a[i] * b[j] * Rational::from_integer(self.symmetrizer[i] * self.cartan[i][j]);
            }
        }
        s
    }

    /// `root(h_i)`.
    pub fn pairing(&self, root: &[i64], i: usize) -> i64 {
        root.iter().zip(&self.cartan[i]).map(|(a, c)| a * c).sum()
    }

    /// Coordinates of the coroot `h_α` in the basis `{h_i}`.
    pub fn coroot(&self, root: &[i64]) -> Vec<i64> {
        let d_alpha = self.inner(root, root) / 2;
        root.iter()
            .zip(&self.symmetrizer)
            .map(|(a, d)| {
                debug_assert_eq!((a * d) % d_alpha, 0);
                a * d / d_alpha
            })
            .collect()
    }

    /// `root(h)` for `h` given in `{h_i}` coordinates.
    pub fn eval_root(&self, root: &[i64], h: &[f64]) -> f64 {
        (0..self.rank())
            .map(|i| h[i] * self.pairing(root, i) as f64)
            .sum()
    }

    /// Symmetric Gram matrix `(h_i, h_j)` of the simple coroots, using the
    /// form normalized so that short roots have squared length 2.
    pub fn coroot_gram(&self) -> Vec<Vec<Rational>> {
        let l = self.rank();
        (0..l)
            .map(|i| {
                (0..l)
                    .map(|j| Rational::new(self.cartan[i][j], self.symmetrizer[j]))
                    .collect()
            })
            .collect()
    }
}

/// Generate the positive roots by closing the simple roots under root
/// strings, level by level in height.
pub fn build_root_system(lie_type: LieType) -> RootSystem {
    let l = lie_type.rank;
    let cartan = lie_type.cartan_matrix();
    let symmetrizer = lie_type.symmetrizer();
    for i in 0..l {
        for j in 0..l {
            assert_eq!(symmetrizer[i] * cartan[i][j], symmetrizer[j] * cartan[j][i]);
        }
    }

    let mut levels: Vec<Vec<Root>> = vec![(0..l)
        .map(|i| {
            let mut r = vec![0; l];
            r[i] = 1;
            r
        })
        .collect()];
    let mut known: std::collections::HashSet<Root> = levels[0].iter().cloned().collect();
    loop {
        let current = levels.last().unwrap();
        let mut next: Vec<Root> = Vec::new();
        for beta in current {
            for i in 0..l {
                let simple = {
                    let mut r = vec![0; l];
                    r[i] = 1;
                    r
                };
                if *beta == simple {
                    continue;
                }
                // q: how far the α_i-string extends downward from β
                let mut q = 0;
                let mut down = beta.clone();
                loop {
                    down[i] -= 1;
                    if known.contains(&down) {
                        q += 1;
                    } else {
                        break;
                    }
                }
                let pair: i64 = beta.iter().zip(&cartan[i]).map(|(a, c)| a * c).sum();
                let p = q - pair;
                if p > 0 {
                    let mut up = beta.clone();
                    up[i] += 1;
                    if !next.contains(&up) {
                        next.push(up);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        known.extend(next.iter().cloned());
        levels.push(next);
    }

    let mut positive_roots: Vec<Root> = levels.into_iter().flatten().collect();
    positive_roots.sort_by(|a, b| {
        RootSystem::height(a)
            .cmp(&RootSystem::height(b))
            .then_with(|| b.cmp(a))
    });
    let index = positive_roots
        .iter()
        .enumerate()
        .map(|(k, r)| (r.clone(), k))
        .collect();
    RootSystem {
        lie_type,
        cartan,
        symmetrizer,
        positive_roots,
        index,
    }
}

/// Exponents read off the height array: row k holds the roots of height k,
/// right aligned; the column lengths from left to right are the exponents.
pub fn exponents(rs: &RootSystem) -> Vec<usize> {
    let max_h = RootSystem::height(rs.highest_root()) as usize;
    let mut row_len = vec![0usize; max_h + 1];
    for r in &rs.positive_roots {
        row_len[RootSystem::height(r) as usize] += 1;
    }
    let width = rs.rank();
    (0..width)
        .map(|col| (1..=max_h).filter(|&k| row_len[k] >= width - col).count())
        .collect()
}

pub fn coxeter_number(rs: &RootSystem) -> usize {
    RootSystem::height(rs.highest_root()) as usize + 1
}

/// Coefficients `r_i` with `x = ½ Σ_{α>0} h_α = Σ r_i h_i`.
pub fn x_coefficients(rs: &RootSystem) -> Vec<Rational> {
    let l = rs.rank();
    let mut sum = vec![0i64; l];
    for r in &rs.positive_roots {
        for (s, c) in sum.iter_mut().zip(rs.coroot(r)) {
            *s += c;
        }
    }
    sum.into_iter().map(|s| Rational::new(s, 2)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AffineCartanData {
    /// Indexed 0..=l, node 0 is `α_0 = -δ`.
    pub gcm: Vec<Vec<i64>>,
    pub marks: Vec<i64>,
    pub comarks: Vec<i64>,
    pub kac_label: String,
}

pub fn affine_cartan(rs: &RootSystem) -> AffineCartanData {
    let l = rs.rank();
    let delta = rs.highest_root().clone();
    let minus_delta: Root = delta.iter().map(|x| -x).collect();
    let h0 = rs.coroot(&minus_delta);
    let mut gcm = vec![vec![0i64; l + 1]; l + 1];
    gcm[0][0] = 2;
    for j in 0..l {
        // α_j(h_0)
        gcm[0][j + 1] = (0..l).map(|k| h0[k] * rs.cartan[k][j]).sum();
        // α_0(h_j)
        gcm[j + 1][0] = rs.pairing(&minus_delta, j);
        for i in 0..l {
            gcm[i + 1][j + 1] = rs.cartan[i][j];
        }
    }
    let marks = positive_null_vector(&gcm);
    let comarks = positive_null_vector(&rational::transpose(&gcm));
    AffineCartanData {
        gcm,
        marks,
        comarks,
        kac_label: format!("{}(1)", rs.lie_type),
    }
}

/// The unique primitive positive integer null vector of an affine matrix.
pub(crate) fn positive_null_vector(m: &[Vec<i64>]) -> Vec<i64> {
    let kernel = rational::integer_nullspace(m);
    assert_eq!(kernel.len(), 1, "affine matrix must have corank 1");
    let v = kernel.into_iter().next().unwrap();
    assert!(v.iter().all(|&x| x > 0), "null vector must be positive: {v:?}");
    v
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramAutomorphism {
    /// `perm[i] = ν(i)` on 0-based simple-root indices.
    pub perm: Vec<usize>,
    pub order: usize,
}

impl DiagramAutomorphism {
    pub fn identity(l: usize) -> Self {
        DiagramAutomorphism {
            perm: (0..l).collect(),
            order: 1,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// `ν̂ᵗ` on simple-root coordinates.
    pub fn apply_root<T: Clone>(&self, root: &[T]) -> Vec<T> {
        let mut out = root.to_vec();
        for (i, &j) in self.perm.iter().enumerate() {
            out[j] = root[i].clone();
        }
        out
    }

    /// `h_i ↦ h_{ν(i)}` on coroot coordinates.
    pub fn apply_coroot<T: Clone>(&self, h: &[T]) -> Vec<T> {
        self.apply_root(h)
    }

    pub fn preserves(&self, cartan: &[Vec<i64>]) -> bool {
        let l = self.perm.len();
        (0..l).all(|i| (0..l).all(|j| cartan[self.perm[i]][self.perm[j]] == cartan[i][j]))
    }
}

/// The order-2 graph symmetry for `A_n (n ≥ 2)`, `D_{odd}` and `E_6`;
/// identity for every other type.
pub fn diagram_automorphism(rs: &RootSystem) -> DiagramAutomorphism {
    let l = rs.rank();
    let t = rs.lie_type;
    let perm: Vec<usize> = match t.family {
        Family::A if l >= 2 => (0..l).map(|i| l - 1 - i).collect(),
        Family::D if l % 2 == 1 => {
            let mut p: Vec<usize> = (0..l).collect();
            p.swap(l - 2, l - 1);
            p
        }
        Family::E if l == 6 => vec![5, 1, 4, 3, 2, 0],
        _ => return DiagramAutomorphism::identity(l),
    };
    DiagramAutomorphism { perm, order: 2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(s: &str) -> RootSystem {
        RootSystem::new(s.parse().unwrap())
    }

    /// Independent closure: keep adding simple roots to known roots as long
    /// as the result has positive norm and lies in a reflection orbit.
    /// Uses Weyl reflections rather than root strings.
    fn brute_force_positive_roots(t: LieType) -> Vec<Root> {
        let a = t.cartan_matrix();
        let l = t.rank;
        let mut all: std::collections::BTreeSet<Root> = (0..l)
            .map(|i| {
                let mut r = vec![0; l];
                r[i] = 1;
                r
            })
            .collect();
        loop {
            let mut added = false;
            let current: Vec<Root> = all.iter().cloned().collect();
            for r in &current {
                for i in 0..l {
                    let pair: i64 = r.iter().zip(&a[i]).map(|(x, c)| x * c).sum();
                    let mut s = r.clone();
                    s[i] -= pair;
                    if s.iter().all(|&x| x >= 0) && s.iter().any(|&x| x > 0) && all.insert(s) {
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        all.into_iter().collect()
    }

    #[test]
    fn rank_restrictions() {
        assert!("B1".parse::<LieType>().is_err());
        assert!("D2".parse::<LieType>().is_err());
        assert!("E5".parse::<LieType>().is_err());
        assert!("E9".parse::<LieType>().is_err());
        assert!("F3".parse::<LieType>().is_err());
        assert!("G3".parse::<LieType>().is_err());
        assert!("A9".parse::<LieType>().is_err());
        assert!("X2".parse::<LieType>().is_err());
        assert_eq!("e6".parse::<LieType>().unwrap().to_string(), "E6");
    }

    #[test]
    fn small_examples() {
        let a1 = rs("A1");
        assert_eq!(a1.positive_roots, vec![vec![1]]);
        assert_eq!(a1.highest_root(), &vec![1]);

        let a2 = rs("A2");
        assert_eq!(a2.positive_roots, vec![vec![1, 0], vec![0, 1], vec![1, 1]]);

        let g2 = rs("G2");
        assert_eq!(g2.num_positive(), 6);
        assert_eq!(g2.highest_root(), &vec![3, 2]);
        assert!(g2.inner(&[1, 0], &[1, 0]) < g2.inner(&[0, 1], &[0, 1]));
    }

    #[test]
    fn closure_matches_reflection_oracle() {
        for t in LieType::all() {
            let mut ours = RootSystem::new(t).positive_roots;
            ours.sort();
            assert_eq!(ours, brute_force_positive_roots(t), "{t}");
        }
    }

    #[test]
    fn positive_root_counts() {
        let expected = [
            ("A8", 36),
            ("B8", 64),
            ("C5", 25),
            ("D8", 56),
            ("E6", 36),
            ("E7", 63),
            ("E8", 120),
            ("F4", 24),
        ];
        for (t, n) in expected {
            assert_eq!(rs(t).num_positive(), n, "{t}");
        }
    }

    #[test]
    fn exponents_and_coxeter() {
        assert_eq!(exponents(&rs("A1")), vec![1]);
        assert_eq!(exponents(&rs("A2")), vec![1, 2]);
        assert_eq!(exponents(&rs("D4")), vec![1, 3, 3, 5]);
        assert_eq!(exponents(&rs("G2")), vec![1, 5]);
        assert_eq!(exponents(&rs("E8")), vec![1, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(coxeter_number(&rs("A1")), 2);
        assert_eq!(coxeter_number(&rs("A2")), 3);
        assert_eq!(coxeter_number(&rs("G2")), 6);
        assert_eq!(coxeter_number(&rs("E8")), 30);
    }

    #[test]
    fn x_coefficients_examples() {
        assert_eq!(x_coefficients(&rs("A1")), vec![Rational::new(1, 2)]);
        assert_eq!(
            x_coefficients(&rs("A2")),
            vec![Rational::from_integer(1), Rational::from_integer(1)]
        );
    }

    #[test]
    fn dimension_and_grading_identities() {
        for t in LieType::all() {
            let r = RootSystem::new(t);
            let m = exponents(&r);
            let dim: usize = m.iter().map(|mi| 2 * mi + 1).sum();
            assert_eq!(dim, r.dim(), "{t}");
            assert_eq!(m.iter().sum::<usize>(), r.num_positive(), "{t}");
            assert_eq!(*m.last().unwrap() as i64, RootSystem::height(r.highest_root()));
            let x = x_coefficients(&r);
            for i in 0..r.rank() {
                // α_i(x) = Σ_j r_j α_i(h_j)
                let v: Rational = (0..r.rank())
                    .map(|j| x[j] * Rational::from_integer(r.cartan[j][i]))
                    .sum();
                assert_eq!(v, Rational::from_integer(1), "{t} α_{i}(x)");
            }
        }
    }

    #[test]
    fn affine_examples() {
        let a2 = affine_cartan(&rs("A2"));
        assert_eq!(a2.marks, vec![1, 1, 1]);
        assert_eq!(a2.comarks, vec![1, 1, 1]);
        let g2 = affine_cartan(&rs("G2"));
        assert_eq!(g2.marks, vec![1, 3, 2]);
        let a1 = affine_cartan(&rs("A1"));
        assert_eq!(a1.gcm, vec![vec![2, -2], vec![-2, 2]]);
        assert_eq!(a1.marks, vec![1, 1]);
        assert_eq!(a1.kac_label, "A1(1)");
    }

    #[test]
    fn affine_null_vectors_all_types() {
        for t in LieType::all() {
            let r = RootSystem::new(t);
            let aff = affine_cartan(&r);
            let l = r.rank();
            for i in 0..=l {
                let row: i64 = (0..=l).map(|j| aff.gcm[i][j] * aff.marks[j]).sum();
                let col: i64 = (0..=l).map(|j| aff.comarks[j] * aff.gcm[j][i]).sum();
                assert_eq!((row, col), (0, 0), "{t}");
            }
            assert_eq!(rational::gcd_all(&aff.marks), 1);
            assert_eq!(rational::gcd_all(&aff.comarks), 1);
            for i in 0..l {
                assert_eq!(aff.gcm[i + 1][1..], r.cartan[i][..]);
            }
            // marks are δ's coefficients, comarks h_δ's
            assert_eq!(aff.marks[1..], r.highest_root()[..]);
            assert_eq!(aff.comarks[1..], r.coroot(r.highest_root())[..]);
            // Coxeter number is the sum of the marks
            assert_eq!(aff.marks.iter().sum::<i64>() as usize, coxeter_number(&r));
        }
    }

    #[test]
    fn diagram_automorphisms() {
        let a3 = diagram_automorphism(&rs("A3"));
        assert_eq!(a3.perm, vec![2, 1, 0]);
        assert_eq!(a3.order, 2);
        assert!(diagram_automorphism(&rs("B3")).is_trivial());
        assert!(diagram_automorphism(&rs("D4")).is_trivial());
        assert!(diagram_automorphism(&rs("A1")).is_trivial());
        let e6 = diagram_automorphism(&rs("E6"));
        assert_eq!(e6.order, 2);
        // branch node α_4 and the attached α_2 are fixed
        assert_eq!((e6.perm[1], e6.perm[3]), (1, 3));
        for t in LieType::all() {
            let r = RootSystem::new(t);
            let nu = diagram_automorphism(&r);
            assert!(nu.preserves(&r.cartan), "{t}");
            assert_eq!(nu.apply_root(r.highest_root()), *r.highest_root(), "{t}");
        }
    }

    #[test]
    fn e6_has_unique_nontrivial_symmetry() {
        // graph symmetry search over all permutations fixing the Cartan matrix
        let r = rs("E6");
        let mut found = Vec::new();
        let mut perm: Vec<usize> = (0..6).collect();
        permutations(&mut perm, 0, &mut |p| {
            let nu = DiagramAutomorphism { perm: p.to_vec(), order: 2 };
            if nu.preserves(&r.cartan) && p.iter().enumerate().any(|(i, &j)| i != j) {
                found.push(p.to_vec());
            }
        });
        assert_eq!(found, vec![diagram_automorphism(&r).perm]);
    }

    fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == p.len() {
            f(p);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            permutations(p, k + 1, f);
            p.swap(k, i);
        }
    }
}
