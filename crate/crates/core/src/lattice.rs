//! Exact integer foundation: matrices, configurations, moves, the conformal
//! order and higher Lawrence liftings.
//!
//! Entries are stored as `i64`. Every arithmetic step that can grow entries
//! (matrix-vector products, kernel reduction) is checked and reports
//! [`Error::Overflow`] instead of wrapping; kernel reduction runs in `i128`
//! and narrows at the end.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    r.len(),
                    cols
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns<C: AsRef<[i64]>>(rows: usize, columns: &[C]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(Error::DimensionMismatch(format!(
                    "column {} has {} entries, expected {}",
                    j,
                    c.len(),
                    rows
                )));
            }
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<i64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<i64>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    /// Checked product `A x`.
    pub fn mul_vec(&self, x: &[i64]) -> Result<Vec<i64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        let mut out = vec![0i64; self.rows];
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc: i64 = 0;
            for (a, &xi) in self.row(r).iter().zip(x) {
                if *a == 0 || xi == 0 {
                    continue;
                }
                let p = a.checked_mul(xi).ok_or(Error::Overflow("matrix-vector product"))?;
                acc = acc
                    .checked_add(p)
                    .ok_or(Error::Overflow("matrix-vector product"))?;
            }
            *o = acc;
        }
        Ok(out)
    }

    /// True iff `A z = 0`.
    pub fn annihilates(&self, z: &[i64]) -> bool {
        matches!(self.mul_vec(z), Ok(v) if v.iter().all(|&x| x == 0))
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        rational_rref(&to_rational(self)).1.len()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// An integer matrix together with a rational row vector `v` with
/// `v A = (1, ..., 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    matrix: IntMatrix,
    grading: Vec<BigRational>,
}

impl Configuration {
    /// Finds the minimal-norm rational grading of `matrix`.
    ///
    /// The minimal-norm solution of `A^T v = 1` is the unique solution in the
    /// column space of `A`, so the result does not depend on pivoting.
    pub fn validate(matrix: IntMatrix) -> Result<Self> {
        validate_configuration(matrix)
    }

    /// Wraps `matrix` with a caller-supplied grading after checking `v A = 1`.
    pub fn with_grading(matrix: IntMatrix, grading: Vec<BigRational>) -> Result<Self> {
        if grading.len() != matrix.rows() {
            return Err(Error::DimensionMismatch(format!(
                "grading of length {} for {} rows",
                grading.len(),
                matrix.rows()
            )));
        }
        for c in 0..matrix.cols() {
            let mut s = BigRational::zero();
            for (r, v) in grading.iter().enumerate() {
                let a = matrix.get(r, c);
                if a != 0 {
                    s += v * BigRational::from_integer(BigInt::from(a));
                }
            }
            if !s.is_one() {
                return Err(Error::NotAConfiguration(format!(
                    "grading gives {} on column {}",
                    s, c
                )));
            }
        }
        Ok(Configuration { matrix, grading })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn grading(&self) -> &[BigRational] {
        &self.grading
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// `v . b`, the common 1-norm of every element of the `b`-fiber.
    pub fn degree_of(&self, b: &[i64]) -> BigRational {
        self.grading
            .iter()
            .zip(b)
            .map(|(v, &bi)| v * BigRational::from_integer(BigInt::from(bi)))
            .fold(BigRational::zero(), |a, x| a + x)
    }
}

pub fn validate_configuration(matrix: IntMatrix) -> Result<Configuration> {
    if matrix.is_empty() {
        return Err(Error::NotAConfiguration("empty matrix".into()));
    }
    let a = to_rational(&matrix);
    let (_, pivots) = rational_rref(&a);
    // v = C w with C the pivot columns; solve (A^T C) w = 1.
    let r = pivots.len();
    let n = matrix.cols();
    let mut system = vec![vec![BigRational::zero(); r + 1]; n];
    for (j, row) in system.iter_mut().enumerate() {
        for (k, &p) in pivots.iter().enumerate() {
            row[k] = a
                .iter()
                .fold(BigRational::zero(), |s, ai| s + &ai[j] * &ai[p]);
        }
        row[r] = BigRational::one();
    }
    let (red, sys_pivots) = rational_rref(&system);
    if sys_pivots.last() == Some(&r) {
        return Err(Error::NotAConfiguration(
            "no rational v with vA = (1,...,1)".into(),
        ));
    }
    let mut w = vec![BigRational::zero(); r];
    for (row, &p) in sys_pivots.iter().enumerate() {
        w[p] = red[row][r].clone();
    }
    let grading: Vec<BigRational> = (0..matrix.rows())
        .map(|i| {
            pivots
                .iter()
                .zip(&w)
                .map(|(&p, wk)| &a[i][p] * wk)
                .fold(BigRational::zero(), |s, x| s + x)
        })
        .collect();
    Configuration::with_grading(matrix, grading)
}

fn to_rational(m: &IntMatrix) -> Vec<Vec<BigRational>> {
    (0..m.rows())
        .map(|r| {
            m.row(r)
                .iter()
                .map(|&x| BigRational::from_integer(BigInt::from(x)))
                .collect()
        })
        .collect()
}

/// Reduced row echelon form over Q with left-to-right pivot columns.
fn rational_rref(m: &[Vec<BigRational>]) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut pr = 0;
    for c in 0..cols {
        if pr == rows {
            break;
        }
        let Some(sel) = (pr..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(pr, sel);
        let inv = a[pr][c].recip();
        for x in a[pr].iter_mut() {
            *x *= &inv;
        }
        let prow = a[pr].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != pr && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        pr += 1;
    }
    (a, pivots)
}

/// An integer vector read as a move (an element of some integer kernel).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move(Vec<i64>);

impl Move {
    pub fn new(v: Vec<i64>) -> Self {
        Move(v)
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn positive_part(&self) -> Vec<i64> {
        self.0.iter().map(|&x| x.max(0)).collect()
    }

    pub fn negative_part(&self) -> Vec<i64> {
        self.0.iter().map(|&x| (-x).max(0)).collect()
    }

    /// `|z+|_1`.
    pub fn degree(&self) -> u64 {
        self.0.iter().filter(|&&x| x > 0).map(|&x| x as u64).sum()
    }

    pub fn one_norm(&self) -> u64 {
        self.0.iter().map(|x| x.unsigned_abs()).sum()
    }

    pub fn negated(&self) -> Move {
        Move(self.0.iter().map(|&x| -x).collect())
    }

    /// Sign representative whose first nonzero entry is positive.
    pub fn canonical(&self) -> Move {
        match self.0.iter().find(|&&x| x != 0) {
            Some(&x) if x < 0 => self.negated(),
            _ => self.clone(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        !matches!(self.0.iter().find(|&&x| x != 0), Some(&x) if x < 0)
    }
}

impl From<Vec<i64>> for Move {
    fn from(v: Vec<i64>) -> Self {
        Move(v)
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `u ⊑ v`: same signs wherever `u` is nonzero and `|u_i| <= |v_i|`.
pub fn conformal_leq(u: &[i64], v: &[i64]) -> bool {
    assert_eq!(u.len(), v.len(), "conformal_leq on vectors of unequal length");
    u.iter()
        .zip(v)
        .all(|(&a, &b)| a == 0 || ((a > 0) == (b > 0) && b != 0 && a.unsigned_abs() <= b.unsigned_abs()))
}

/// A lattice basis of `ker_Z A`, in Hermite normal form (rows with positive
/// pivots, entries above each pivot reduced into `[0, pivot)`).
pub fn kernel_lattice_basis(cfg: &Configuration) -> Result<Vec<Move>> {
    integer_kernel(cfg.matrix())
}

/// Integer kernel of an arbitrary integer matrix; see [`kernel_lattice_basis`].
pub fn integer_kernel(a: &IntMatrix) -> Result<Vec<Move>> {
    let d = a.rows();
    let n = a.cols();
    // Columns of [A; I] as i128 vectors, reduced by unimodular column operations.
    let mut cols: Vec<Vec<i128>> = (0..n)
        .map(|j| {
            let mut c: Vec<i128> = (0..d).map(|i| a.get(i, j) as i128).collect();
            c.extend((0..n).map(|k| i128::from(k == j)));
            c
        })
        .collect();
    let mut p = 0usize;
    for row in 0..d {
        if p == n {
            break;
        }
        loop {
            let nz: Vec<usize> = (p..n).filter(|&c| cols[c][row] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let piv = *nz
                .iter()
                .min_by_key(|&&c| (cols[c][row].unsigned_abs(), c))
                .expect("nonempty");
            cols.swap(p, piv);
            let pv = cols[p][row];
            for c in p + 1..n {
                let x = cols[c][row];
                if x == 0 {
                    continue;
                }
                let q = x.div_euclid(pv);
                if q != 0 {
                    let (left, right) = cols.split_at_mut(c);
                    axpy(&mut right[0], -q, &left[p])?;
                }
            }
            if (p + 1..n).all(|c| cols[c][row] == 0) {
                p += 1;
                break;
            }
        }
    }
    let mut basis: Vec<Vec<i128>> = cols[p..].iter().map(|c| c[d..].to_vec()).collect();
    hermite_rows(&mut basis)?;
    basis
        .into_iter()
        .map(|v| {
            v.into_iter()
                .map(|x| i64::try_from(x).map_err(|_| Error::Overflow("kernel basis")))
                .collect::<Result<Vec<i64>>>()
                .map(Move::new)
        })
        .collect()
}

fn axpy(y: &mut [i128], a: i128, x: &[i128]) -> Result<()> {
    for (yi, &xi) in y.iter_mut().zip(x) {
        if xi != 0 {
            let t = a.checked_mul(xi).ok_or(Error::Overflow("kernel reduction"))?;
            *yi = yi.checked_add(t).ok_or(Error::Overflow("kernel reduction"))?;
        }
    }
    Ok(())
}

/// Row-style Hermite normal form of a full-row-rank integer matrix, in place.
fn hermite_rows(rows: &mut [Vec<i128>]) -> Result<()> {
    let m = rows.len();
    if m == 0 {
        return Ok(());
    }
    let n = rows[0].len();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let nz: Vec<usize> = (r..m).filter(|&i| rows[i][c] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let piv = *nz
                .iter()
                .min_by_key(|&&i| (rows[i][c].unsigned_abs(), i))
                .expect("nonempty");
            rows.swap(r, piv);
            let pv = rows[r][c];
            let mut done = true;
            for i in r + 1..m {
                let x = rows[i][c];
                if x == 0 {
                    continue;
                }
                let q = x.div_euclid(pv);
                let (top, bottom) = rows.split_at_mut(i);
                axpy(&mut bottom[0], -q, &top[r])?;
                if bottom[0][c] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows[r][c] == 0 {
            continue;
        }
        if rows[r][c] < 0 {
            for x in rows[r].iter_mut() {
                *x = -*x;
            }
        }
        let pv = rows[r][c];
        for i in 0..r {
            let q = rows[i][c].div_euclid(pv);
            if q != 0 {
                let (top, bottom) = rows.split_at_mut(r);
                axpy(&mut top[i], -q, &bottom[0])?;
            }
        }
        r += 1;
    }
    Ok(())
}

/// Matrix of the `N`-th Lawrence lifting: `N` diagonal copies of `A` above
/// `N` horizontally repeated `n x n` identities.
pub fn lawrence_matrix(a: &IntMatrix, copies: usize) -> IntMatrix {
    let (d, n) = (a.rows(), a.cols());
    let mut m = IntMatrix::zeros(d * copies + n, n * copies);
    for k in 0..copies {
        for i in 0..d {
            for j in 0..n {
                m.set(k * d + i, k * n + j, a.get(i, j));
            }
        }
        for j in 0..n {
            m.set(d * copies + j, k * n + j, 1);
        }
    }
    m
}

pub fn lawrence_lift(cfg: &Configuration, copies: usize) -> Result<Configuration> {
    if copies == 0 {
        return Err(Error::PreconditionViolated(
            "Lawrence lifting needs N >= 1".into(),
        ));
    }
    Configuration::validate(lawrence_matrix(cfg.matrix(), copies))
}

/// An element of the kernel of a Lawrence lifting, stored slice by slice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LiftedMove {
    base_cols: usize,
    slices: Vec<Vec<i64>>,
}

impl LiftedMove {
    pub fn new(base_cols: usize, slices: Vec<Vec<i64>>) -> Result<Self> {
        if let Some((k, s)) = slices.iter().enumerate().find(|(_, s)| s.len() != base_cols) {
            return Err(Error::DimensionMismatch(format!(
                "slice {} has length {}, expected {}",
                k,
                s.len(),
                base_cols
            )));
        }
        Ok(LiftedMove { base_cols, slices })
    }

    /// Splits a flat vector of length `N * base_cols` into slices.
    pub fn from_flat(base_cols: usize, flat: &[i64]) -> Result<Self> {
        if base_cols == 0 || !flat.len().is_multiple_of(base_cols) {
            return Err(Error::DimensionMismatch(format!(
                "flat vector of length {} is not a multiple of {}",
                flat.len(),
                base_cols
            )));
        }
        Ok(LiftedMove {
            base_cols,
            slices: flat.chunks(base_cols).map(|c| c.to_vec()).collect(),
        })
    }

    pub fn to_flat(&self) -> Vec<i64> {
        self.slices.concat()
    }

    pub fn base_cols(&self) -> usize {
        self.base_cols
    }

    pub fn slices(&self) -> &[Vec<i64>] {
        &self.slices
    }

    pub fn num_slices(&self) -> usize {
        self.slices.len()
    }

    /// Sum of all slices.
    pub fn slice_sum(&self) -> Vec<i64> {
        let mut s = vec![0i64; self.base_cols];
        for sl in &self.slices {
            for (a, b) in s.iter_mut().zip(sl) {
                *a += b;
            }
        }
        s
    }

    /// Checks that every slice lies in `ker A` and the slices sum to zero.
    pub fn check(&self, a: &IntMatrix) -> Result<()> {
        if a.cols() != self.base_cols {
            return Err(Error::DimensionMismatch(format!(
                "lifted move over {} columns against a matrix with {}",
                self.base_cols,
                a.cols()
            )));
        }
        for (k, s) in self.slices.iter().enumerate() {
            if !a.annihilates(s) {
                return Err(Error::PreconditionViolated(format!(
                    "slice {} is not in the kernel",
                    k
                )));
            }
        }
        if self.slice_sum().iter().any(|&x| x != 0) {
            return Err(Error::PreconditionViolated(
                "slices do not sum to zero".into(),
            ));
        }
        Ok(())
    }
}

/// Number of nonzero slices.
pub fn lifted_type(m: &LiftedMove) -> usize {
    m.slices.iter().filter(|s| s.iter().any(|&x| x != 0)).count()
}

/// Type of a flat lifted vector with slices of length `base_cols`.
pub fn flat_type(base_cols: usize, v: &[i64]) -> usize {
    v.chunks(base_cols)
        .filter(|s| s.iter().any(|&x| x != 0))
        .count()
}

pub(crate) fn rational_to_integer(q: &BigRational) -> Option<i64> {
    if q.is_integer() {
        i64::try_from(q.to_integer()).ok()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn k4() -> IntMatrix {
        IntMatrix::from_rows(&[
            [1, 1, 1, 0, 0, 0],
            [1, 0, 0, 1, 1, 0],
            [0, 1, 0, 1, 0, 1],
            [0, 0, 1, 0, 1, 1],
        ])
        .unwrap()
    }

    #[test]
    fn grading_of_k4_is_one_half() {
        let cfg = Configuration::validate(k4()).unwrap();
        assert_eq!(cfg.grading(), &[q(1, 2), q(1, 2), q(1, 2), q(1, 2)]);
    }

    #[test]
    fn grading_of_twisted_cubic() {
        let m = IntMatrix::from_rows(&[[1, 1, 1], [0, 1, 2]]).unwrap();
        let cfg = Configuration::validate(m).unwrap();
        assert_eq!(cfg.grading(), &[q(1, 1), q(0, 1)]);
    }

    #[test]
    fn inconsistent_grading_is_rejected() {
        let m = IntMatrix::from_rows(&[[1, 2]]).unwrap();
        assert!(matches!(
            Configuration::validate(m),
            Err(Error::NotAConfiguration(_))
        ));
    }

    #[test]
    fn empty_matrix_is_rejected() {
        let m = IntMatrix::zeros(0, 0);
        assert!(Configuration::validate(m).is_err());
    }

    #[test]
    fn rank_deficient_grading_is_minimal_norm() {
        // duplicated row: any (t, 1-t) works, minimal norm is (1/2, 1/2)
        let m = IntMatrix::from_rows(&[[1, 1, 1], [1, 1, 1]]).unwrap();
        let cfg = Configuration::validate(m).unwrap();
        assert_eq!(cfg.grading(), &[q(1, 2), q(1, 2)]);
    }

    #[test]
    fn kernel_of_twisted_cubic() {
        let m = IntMatrix::from_rows(&[[1, 1, 1], [0, 1, 2]]).unwrap();
        let cfg = Configuration::validate(m).unwrap();
        let k = kernel_lattice_basis(&cfg).unwrap();
        assert_eq!(k, vec![Move::new(vec![1, -2, 1])]);
    }

    #[test]
    fn kernel_of_k4_has_rank_two() {
        let cfg = Configuration::validate(k4()).unwrap();
        let k = kernel_lattice_basis(&cfg).unwrap();
        assert_eq!(k.len(), 2);
        for z in &k {
            assert!(cfg.matrix().annihilates(z.as_slice()));
            let s = z.as_slice();
            assert_eq!(s[0], s[5]);
            assert_eq!(s[1], s[4]);
            assert_eq!(s[2], s[3]);
        }
        assert_eq!(
            k,
            vec![
                Move::new(vec![1, 0, -1, -1, 0, 1]),
                Move::new(vec![0, 1, -1, -1, 1, 0])
            ]
        );
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert!(integer_kernel(&IntMatrix::identity(2)).unwrap().is_empty());
    }

    #[test]
    fn kernel_of_non_unimodular_matrix() {
        // ker [2 3] over Z is generated by (3,-2)
        let m = IntMatrix::from_rows(&[[2, 3]]).unwrap();
        assert_eq!(integer_kernel(&m).unwrap(), vec![Move::new(vec![3, -2])]);
    }

    #[test]
    fn conformal_examples() {
        assert!(conformal_leq(&[1, -1, 0], &[2, -3, 5]));
        assert!(!conformal_leq(&[1, 0, 0], &[-1, 0, 0]));
        assert!(conformal_leq(&[0, 0, 0], &[4, -1, 0]));
        assert!(!conformal_leq(&[2, 0], &[1, 0]));
    }

    #[test]
    fn lawrence_of_single_row() {
        let m = IntMatrix::from_rows(&[[1, 1]]).unwrap();
        let l = lawrence_matrix(&m, 2);
        assert_eq!(
            l,
            IntMatrix::from_rows(&[[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]])
                .unwrap()
        );
        let cfg = Configuration::validate(m).unwrap();
        assert!(lawrence_lift(&cfg, 2).is_ok());
        assert!(lawrence_lift(&cfg, 0).is_err());
    }

    #[test]
    fn lifted_kernel_vectors() {
        let m = IntMatrix::from_rows(&[[1, 1, 1], [0, 1, 2]]).unwrap();
        let l = lawrence_matrix(&m, 3);
        assert!(l.annihilates(&[1, -2, 1, -1, 2, -1, 0, 0, 0]));
        assert!(!l.annihilates(&[1, -2, 1, 0, 0, 0, 0, 0, 0]));
        // A(2,2) lifted twice
        let a22 =
            IntMatrix::from_rows(&[[1, 1, 0, 0], [0, 0, 1, 1], [1, 0, 1, 0], [0, 1, 0, 1]])
                .unwrap();
        let l2 = lawrence_matrix(&a22, 2);
        assert!(l2.annihilates(&[1, -1, -1, 1, -1, 1, 1, -1]));
    }

    #[test]
    fn lifted_types() {
        let m = LiftedMove::new(3, vec![vec![1, -2, 1], vec![-1, 2, -1]]).unwrap();
        assert_eq!(lifted_type(&m), 2);
        let z = LiftedMove::new(2, vec![vec![0, 0]; 3]).unwrap();
        assert_eq!(lifted_type(&z), 0);
        assert!(LiftedMove::new(2, vec![vec![0, 0, 0]]).is_err());
    }

    #[test]
    fn canonical_sign() {
        let z = Move::new(vec![0, -1, 2, -1]);
        assert_eq!(z.canonical(), Move::new(vec![0, 1, -2, 1]));
        assert_eq!(z.degree(), 2);
        assert_eq!(z.one_norm(), 4);
        assert_eq!(z.positive_part(), vec![0, 0, 2, 0]);
        assert_eq!(z.negative_part(), vec![0, 1, 0, 1]);
    }

    #[test]
    fn overflow_is_detected() {
        let m = IntMatrix::from_rows(&[[i64::MAX, 1]]).unwrap();
        assert_eq!(m.mul_vec(&[2, 0]), Err(Error::Overflow("matrix-vector product")));
    }
}
