//! Dense matrices over exact rings, exact row reduction, and the rational PSD test.

use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use crate::rational::Q;

/// Exact commutative ring with the operations the matrix code needs.
pub trait Ring: Clone + PartialEq + Debug {
    fn r_zero() -> Self;
    fn r_one() -> Self;
    fn r_add(&self, other: &Self) -> Self;
    fn r_sub(&self, other: &Self) -> Self;
    fn r_mul(&self, other: &Self) -> Self;
    fn r_neg(&self) -> Self;
    fn r_is_zero(&self) -> bool;
    fn r_from_q(v: &Q) -> Self;
}

impl Ring for Q {
    fn r_zero() -> Self {
        Zero::zero()
    }
    fn r_one() -> Self {
        One::one()
    }
    fn r_add(&self, other: &Self) -> Self {
        self + other
    }
    fn r_sub(&self, other: &Self) -> Self {
        self - other
    }
    fn r_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn r_neg(&self) -> Self {
        -self
    }
    fn r_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn r_from_q(v: &Q) -> Self {
        v.clone()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Ring> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::r_zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::r_one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.r_is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.r_is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].r_add(&a.r_mul(b));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.r_add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.r_sub(b)).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.r_mul(c)).collect(),
        }
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::r_zero(), |acc, i| acc.r_add(self.get(i, i)))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        *v == T::r_one()
                    } else {
                        v.r_is_zero()
                    }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `MᵀM = I`.
    pub fn is_orthogonal(&self) -> bool {
        self.is_square() && self.transpose().mul(self).is_identity()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }
}

impl<T> Mat<T> {
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Mat<Q>) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                m.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = m.get(r, c).recip();
        for j in c..cols {
            let v = m.get(r, j) * &inv;
            m.set(r, j, v);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = m.get(i, c).clone();
            if f.is_zero() {
                continue;
            }
            for j in c..cols {
                let pv = m.get(r, j);
                if pv.is_zero() {
                    continue;
                }
                let v = m.get(i, j) - &f * pv;
                m.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Mat<Q>) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

/// Basis of the right null space, one vector per non-pivot column.
pub fn nullspace(m: &Mat<Q>) -> Vec<Vec<Q>> {
    let mut w = m.clone();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); m.cols];
            v[f] = Q::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -w.get(r, f).clone();
            }
            v
        })
        .collect()
}

/// Solve `A x = b`. Returns `None` if inconsistent; `Some((x, unique))` otherwise,
/// with free variables set to zero.
pub fn solve(a: &Mat<Q>, b: &[Q]) -> Option<(Vec<Q>, bool)> {
    assert_eq!(a.rows, b.len());
    let mut aug = Mat::from_fn(a.rows, a.cols + 1, |i, j| {
        if j < a.cols {
            a.get(i, j).clone()
        } else {
            b[i].clone()
        }
    });
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&a.cols) {
        return None;
    }
    let mut x = vec![Q::zero(); a.cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug.get(r, a.cols).clone();
    }
    Some((x, pivots.len() == a.cols))
}

/// Outcome of the exact positive semidefiniteness test.
#[derive(Clone, Debug, PartialEq)]
pub enum PsdCheck {
    Psd,
    /// A negative pivot was met at this position of the pivot sequence.
    NegativePivot(usize),
    /// A zero pivot whose row was not entirely zero.
    ZeroPivotNonzeroRow(usize),
    NotSymmetric,
}

/// Rational `LDLᵀ` with symmetric diagonal pivoting: PSD iff every pivot is
/// non-negative and each zero pivot comes with an all-zero remaining row.
pub fn psd_check(m: &Mat<Q>) -> PsdCheck {
    if !m.is_symmetric() {
        return PsdCheck::NotSymmetric;
    }
    let mut a = m.clone();
    let n = a.rows;
    let mut active: Vec<usize> = (0..n).collect();
    let mut step = 0;
    while !active.is_empty() {
        // Pick the largest diagonal entry among the remaining indices.
        let (pos, &k) = active
            .iter()
            .enumerate()
            .max_by(|(_, &i), (_, &j)| a.get(i, i).cmp(a.get(j, j)))
            .expect("nonempty");
        let d = a.get(k, k).clone();
        if d.is_negative() {
            return PsdCheck::NegativePivot(step);
        }
        if d.is_zero() {
            // All remaining diagonals are <= 0, hence 0; PSD forces the rest to vanish.
            for &i in &active {
                for &j in &active {
                    if !a.get(i, j).is_zero() {
                        return PsdCheck::ZeroPivotNonzeroRow(step);
                    }
                }
            }
            return PsdCheck::Psd;
        }
        active.remove(pos);
        for &i in &active {
            let f = a.get(i, k) / &d;
            if f.is_zero() {
                continue;
            }
            for &j in &active {
                let v = a.get(i, j) - &f * a.get(k, j);
                a.set(i, j, v);
            }
        }
        step += 1;
    }
    PsdCheck::Psd
}

pub fn is_psd(m: &Mat<Q>) -> bool {
    psd_check(m) == PsdCheck::Psd
}

pub fn to_f64_mat(m: &Mat<Q>) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_fn(m.rows, m.cols, |i, j| crate::rational::to_f64(m.get(i, j)))
}

/// Smallest eigenvalue of a symmetric float matrix; `+inf` for the empty matrix.
pub fn min_eigenvalue(m: &nalgebra::DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}
