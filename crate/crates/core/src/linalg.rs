//! Dense exact linear algebra over Euclidean rings and their fraction fields.
//!
//! Everything here is generic in the scalar: integer routines take any
//! [`ExactInt`] (`i64`, `BigInt`, ...), field routines any [`Field`], which in
//! practice means `Ratio<T>` for an exact integer type `T`. The rest of the
//! crate instantiates them at [`crate::Int`] and [`crate::Rat`].
//!
//! Coefficients: the complexes studied by this crate are defined over `ℚ`
//! (every differential has rational entries in the bases we pick), while the
//! geometric statements are about complex vector spaces. Rank is invariant
//! under field extension, so `dim_ℚ H = dim_ℂ (H ⊗ ℂ)` and computing over `ℚ`
//! loses nothing.

use std::fmt::Debug;
use std::ops::{Index, IndexMut, Neg};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, One, Signed, Zero};
use thiserror::Error;

/// Integer scalars with exact Euclidean division.
pub trait ExactInt: Integer + Signed + Clone + Debug {}
impl<T: Integer + Signed + Clone + Debug> ExactInt for T {}

/// Scalars with exact division.
pub trait Field: Num + Clone + Debug + Neg<Output = Self> {}
impl<T: ExactInt> Field for Ratio<T> {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("zero vector has no primitive generator")]
    ZeroVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    /// Row-major construction. Panics if `data.len() != rows * cols`.
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix entry count mismatch");
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from rows of length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<T>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row");
            data.extend(r.iter().cloned());
        }
        Matrix { rows: rows.len(), cols, data }
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<T>]) -> Self {
        let mut data = Vec::with_capacity(rows * cols.len());
        for i in 0..rows {
            for c in cols {
                assert_eq!(c.len(), rows, "ragged column");
                data.push(c[i].clone());
            }
        }
        Matrix { rows, cols: cols.len(), data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
}

impl<T: Clone + Zero> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }
}

impl<T: Clone + Num> Matrix<T> {
    pub fn mul(&self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out: Matrix<T> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = a.clone() * rhs[(l, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "shape mismatch in product");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Clone + Num>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Embeds an integer matrix into its fraction field.
pub fn to_rational<T: ExactInt>(m: &Matrix<T>) -> Matrix<Ratio<T>> {
    m.map(|x| Ratio::from_integer(x.clone()))
}

/// Smith normal form `left · A · right = diag(divisors)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithData<T> {
    /// `min(rows, cols)` nonnegative entries, each dividing the next.
    pub divisors: Vec<T>,
    pub left: Matrix<T>,
    pub right: Matrix<T>,
}

impl<T: ExactInt> SmithData<T> {
    pub fn rank(&self) -> usize {
        self.divisors.iter().filter(|d| !d.is_zero()).count()
    }
}

/// Smith normal form by alternating row and column elimination.
pub fn snf<T: ExactInt>(a: &Matrix<T>) -> SmithData<T> {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut left = Matrix::<T>::identity(m);
    let mut right = Matrix::<T>::identity(n);

    let row_axpy = |mat: &mut Matrix<T>, dst: usize, src: usize, q: &T| {
        for j in 0..mat.cols {
            let t = q.clone() * mat[(src, j)].clone();
            mat[(dst, j)] = mat[(dst, j)].clone() - t;
        }
    };
    let col_axpy = |mat: &mut Matrix<T>, dst: usize, src: usize, q: &T| {
        for i in 0..mat.rows {
            let t = q.clone() * mat[(i, src)].clone();
            mat[(i, dst)] = mat[(i, dst)].clone() - t;
        }
    };

    let steps = m.min(n);
    for t in 0..steps {
        loop {
            // Pivot: smallest nonzero magnitude in the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = &d[(i, j)];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < d[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            d.swap_rows(t, pi);
            left.swap_rows(t, pi);
            d.swap_cols(t, pj);
            right.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = d[(i, t)].div_floor(&d[(t, t)]);
                row_axpy(&mut d, i, t, &q);
                row_axpy(&mut left, i, t, &q);
                dirty |= !d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = d[(t, j)].div_floor(&d[(t, t)]);
                col_axpy(&mut d, j, t, &q);
                col_axpy(&mut right, j, t, &q);
                dirty |= !d[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            // Divisibility of the trailing block by the pivot.
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&d[(t, t)])));
            match offender {
                Some(i) => {
                    let minus_one = -T::one();
                    row_axpy(&mut d, t, i, &minus_one);
                    row_axpy(&mut left, t, i, &minus_one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            for j in 0..n {
                d[(t, j)] = -d[(t, j)].clone();
            }
            for j in 0..m {
                left[(t, j)] = -left[(t, j)].clone();
            }
        }
    }

    let divisors = (0..steps).map(|i| d[(i, i)].clone()).collect();
    SmithData { divisors, left, right }
}

/// Reduced row echelon form with the first nonzero entry of each column
/// (scanning rows top to bottom) as pivot. Returns the pivot columns.
fn rref_in_place<F: Field>(a: &mut Matrix<F>, limit_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..limit_cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&i| !a[(i, col)].is_zero()) else {
            continue;
        };
        a.swap_rows(row, p);
        let inv = F::one() / a[(row, col)].clone();
        for j in 0..a.cols {
            a[(row, j)] = a[(row, j)].clone() * inv.clone();
        }
        for i in 0..a.rows {
            if i == row || a[(i, col)].is_zero() {
                continue;
            }
            let f = a[(i, col)].clone();
            for j in 0..a.cols {
                let t = f.clone() * a[(row, j)].clone();
                a[(i, j)] = a[(i, j)].clone() - t;
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

pub fn rank<F: Field>(a: &Matrix<F>) -> usize {
    let mut w = a.clone();
    rref_in_place(&mut w, a.cols).len()
}

/// Rank and a basis of the right kernel `{x : A x = 0}`.
///
/// One basis vector per free column `f`, with `x_f = 1` and zeros at the other
/// free columns, so the basis is reproducible for a given matrix.
pub fn rank_and_kernel<F: Field>(a: &Matrix<F>) -> (usize, Vec<Vec<F>>) {
    let mut w = a.clone();
    let pivots = rref_in_place(&mut w, a.cols);
    let mut is_pivot = vec![false; a.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let kernel = (0..a.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = vec![F::zero(); a.cols];
            x[f] = F::one();
            for (r, &p) in pivots.iter().enumerate() {
                x[p] = -w[(r, f)].clone();
            }
            x
        })
        .collect();
    (pivots.len(), kernel)
}

/// Some `X` with `A X = B`, or `None` if the system is inconsistent.
pub fn solve<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Option<Matrix<F>> {
    assert_eq!(a.rows, b.rows, "shape mismatch in solve");
    let cols = a.cols + b.cols;
    let mut aug = Matrix::zeros(a.rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            aug[(i, j)] = a[(i, j)].clone();
        }
        for j in 0..b.cols {
            aug[(i, a.cols + j)] = b[(i, j)].clone();
        }
    }
    let pivots = rref_in_place(&mut aug, a.cols);
    for i in pivots.len()..a.rows {
        if (0..b.cols).any(|j| !aug[(i, a.cols + j)].is_zero()) {
            return None;
        }
    }
    let mut x = Matrix::zeros(a.cols, b.cols);
    for (r, &p) in pivots.iter().enumerate() {
        for j in 0..b.cols {
            x[(p, j)] = aug[(r, a.cols + j)].clone();
        }
    }
    Some(x)
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det<T: ExactInt>(a: &Matrix<T>) -> T {
    assert_eq!(a.rows, a.cols, "determinant of a non-square matrix");
    let n = a.rows;
    if n == 0 {
        return T::one();
    }
    let mut m = a.clone();
    let mut sign = T::one();
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[(k, k)].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                return T::zero();
            };
            m.swap_rows(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[(i, j)].clone() * m[(k, k)].clone() - m[(i, k)].clone() * m[(k, j)].clone();
                m[(i, j)] = num / prev.clone();
            }
        }
        prev = m[(k, k)].clone();
    }
    sign * m[(n - 1, n - 1)].clone()
}

/// Determinant over a field by elimination.
pub fn det_field<F: Field>(a: &Matrix<F>) -> F {
    assert_eq!(a.rows, a.cols, "determinant of a non-square matrix");
    let n = a.rows;
    let mut m = a.clone();
    let mut acc = F::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[(i, k)].is_zero()) else {
            return F::zero();
        };
        if p != k {
            m.swap_rows(k, p);
            acc = -acc;
        }
        let piv = m[(k, k)].clone();
        acc = acc * piv.clone();
        for i in k + 1..n {
            if m[(i, k)].is_zero() {
                continue;
            }
            let f = m[(i, k)].clone() / piv.clone();
            for j in k..n {
                let t = f.clone() * m[(k, j)].clone();
                m[(i, j)] = m[(i, j)].clone() - t;
            }
        }
    }
    acc
}

/// gcd of the absolute values of the entries (zero for the zero vector).
pub fn content<T: ExactInt>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |g, x| g.gcd(x))
}

/// The primitive lattice vector on the ray through `v`.
pub fn primitive<T: ExactInt>(v: &[T]) -> Result<Vec<T>, LinalgError> {
    let g = content(v);
    if g.is_zero() {
        return Err(LinalgError::ZeroVector);
    }
    Ok(v.iter().map(|x| x.clone() / g.clone()).collect())
}

/// Clears denominators of a rational vector and divides by the content,
/// keeping the direction. The zero vector maps to the zero vector.
pub fn integral_direction<T: ExactInt>(v: &[Ratio<T>]) -> Vec<T> {
    let l = v.iter().fold(T::one(), |l, x| l.lcm(x.denom()));
    let scaled: Vec<T> = v.iter().map(|x| x.numer().clone() * (l.clone() / x.denom().clone())).collect();
    primitive(&scaled).unwrap_or(scaled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    type Q = Ratio<BigInt>;

    fn imat(rows: &[&[i64]]) -> Matrix<BigInt> {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Matrix::from_rows(cols, &rows)
    }

    fn qmat(rows: &[&[i64]]) -> Matrix<Q> {
        to_rational(&imat(rows))
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn check_smith(a: &Matrix<BigInt>, s: &SmithData<BigInt>) {
        let prod = s.left.mul(a).mul(&s.right);
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let want = if i == j { s.divisors[i].clone() } else { BigInt::zero() };
                assert_eq!(prod[(i, j)], want, "entry ({i},{j}) of left*A*right");
            }
        }
        for w in s.divisors.windows(2) {
            assert!(w[0] >= BigInt::zero());
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]), "{:?}", s.divisors);
            }
        }
        assert_eq!(det(&s.left).abs(), BigInt::one());
        assert_eq!(det(&s.right).abs(), BigInt::one());
    }

    #[test]
    fn snf_small_cases() {
        let s = snf(&imat(&[&[2]]));
        assert_eq!(s.divisors, big(&[2]));
        let id = Matrix::<BigInt>::identity(3);
        assert_eq!(snf(&id).divisors, big(&[1, 1, 1]));
        let a = imat(&[&[1, 0], &[1, 2]]);
        let s = snf(&a);
        assert_eq!(s.divisors, big(&[1, 2]));
        check_smith(&a, &s);
    }

    #[test]
    fn snf_needs_divisibility_fix() {
        // diag(2, 3) is diagonal but not in normal form
        let a = imat(&[&[2, 0], &[0, 3]]);
        let s = snf(&a);
        assert_eq!(s.divisors, big(&[1, 6]));
        check_smith(&a, &s);
    }

    #[test]
    fn rank_and_kernel_examples() {
        let (r, k) = rank_and_kernel(&Matrix::<Q>::zeros(2, 3));
        assert_eq!((r, k.len()), (0, 3));
        let (r, k) = rank_and_kernel(&Matrix::<Q>::identity(4));
        assert_eq!((r, k.len()), (4, 0));
        let (r, k) = rank_and_kernel(&qmat(&[&[1, 0, 0], &[1, 1, 2]]));
        assert_eq!(r, 2);
        let want: Vec<Q> = big(&[0, -2, 1]).into_iter().map(Q::from_integer).collect();
        assert_eq!(k, vec![want]);
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(primitive(&big(&[2, 4])).unwrap(), big(&[1, 2]));
        assert_eq!(primitive(&big(&[-3, 6, -9])).unwrap(), big(&[-1, 2, -3]));
        assert_eq!(primitive(&big(&[5, 0, 0])).unwrap(), big(&[1, 0, 0]));
        assert_eq!(primitive(&big(&[0, 0])), Err(LinalgError::ZeroVector));
        // the generic path also works on machine integers
        assert_eq!(primitive(&[4i64, -6]).unwrap(), vec![2, -3]);
    }

    #[test]
    fn solve_and_det() {
        let a = qmat(&[&[1, 1], &[0, 2]]);
        let b = qmat(&[&[3], &[4]]);
        let x = solve(&a, &b).unwrap();
        assert_eq!(a.mul(&x), b);
        let sing = qmat(&[&[1, 1], &[1, 1]]);
        assert!(solve(&sing, &qmat(&[&[1], &[2]])).is_none());
        assert_eq!(det(&imat(&[&[1, 0], &[1, 2]])), BigInt::from(2));
        assert_eq!(det(&imat(&[&[0, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(det(&imat(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]])), BigInt::from(18));
    }

    /// Rank oracle: the largest `r` with a nonzero `r × r` minor, minors by
    /// cofactor expansion.
    fn minor_rank(a: &[Vec<i64>]) -> usize {
        fn cofactor_det(m: &[Vec<i64>]) -> i64 {
            if m.is_empty() {
                return 1;
            }
            let n = m.len();
            (0..n)
                .map(|j| {
                    let sub: Vec<Vec<i64>> = m[1..]
                        .iter()
                        .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                        .collect();
                    let s = if j % 2 == 0 { 1 } else { -1 };
                    s * m[0][j] * cofactor_det(&sub)
                })
                .sum()
        }
        fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
            if r == 0 {
                return vec![vec![]];
            }
            if n < r {
                return vec![];
            }
            let mut out = subsets(n - 1, r);
            for mut s in subsets(n - 1, r - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        let rows = a.len();
        let cols = a.first().map_or(0, |r| r.len());
        for r in (1..=rows.min(cols)).rev() {
            for rs in subsets(rows, r) {
                for cs in subsets(cols, r) {
                    let m: Vec<Vec<i64>> = rs.iter().map(|&i| cs.iter().map(|&j| a[i][j]).collect()).collect();
                    if cofactor_det(&m) != 0 {
                        return r;
                    }
                }
            }
        }
        0
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-5i64..=5, c), r))
    }

    fn to_big(a: &[Vec<i64>]) -> Matrix<BigInt> {
        let rows: Vec<Vec<BigInt>> = a.iter().map(|r| big(r)).collect();
        Matrix::from_rows(a[0].len(), &rows)
    }

    proptest! {
        #[test]
        fn smith_invariants_hold(a in small_matrix()) {
            let m = to_big(&a);
            let s = snf(&m);
            check_smith(&m, &s);
            prop_assert_eq!(s.rank(), minor_rank(&a));
        }

        #[test]
        fn rank_and_kernel_match_minor_oracle(a in small_matrix()) {
            let m = to_rational(&to_big(&a));
            let (r, kernel) = rank_and_kernel(&m);
            prop_assert_eq!(r, minor_rank(&a));
            prop_assert_eq!(r + kernel.len(), m.cols());
            for k in &kernel {
                prop_assert!(m.mul_vec(k).iter().all(Zero::is_zero));
            }
            if !kernel.is_empty() {
                prop_assert_eq!(rank(&Matrix::from_rows(m.cols(), &kernel)), kernel.len());
            }
        }

        #[test]
        fn machine_and_big_integers_agree(a in small_matrix()) {
            let small: Matrix<i64> = Matrix::from_rows(a[0].len(), &a);
            let s = snf(&small);
            let b = snf(&to_big(&a));
            let bd: Vec<BigInt> = s.divisors.iter().map(|&x| BigInt::from(x)).collect();
            prop_assert_eq!(bd, b.divisors);
        }
    }
}
