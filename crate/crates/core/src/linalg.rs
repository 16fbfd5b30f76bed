//! Small dense linear algebra over a generic scalar.
//!
//! Dimensions in this crate stay small (algebra dimension rarely above a few
//! dozen), so everything here is plain `O(n³)` code without blocking.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from a row-major slice.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has wrong length");
        Matrix { rows, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[Vec<T>]) -> Self {
        Self::from_fn(rows, cols.len(), |r, c| cols[c][r])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "mul_vec: dimension mismatch");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).fold(T::zero(), |s, (a, b)| s + *a * *b))
            .collect()
    }

    pub fn max_abs(&self) -> T {
        crate::scalar::max_abs(&self.data)
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |s, i| s + self[(i, i)])
    }

    /// Numerical rank via Gaussian elimination with full pivoting.
    pub fn rank(&self, tol: T) -> usize {
        let mut a = self.clone();
        let (m, n) = (a.rows, a.cols);
        let mut rank = 0;
        let mut used_col = vec![false; n];
        let mut used_row = vec![false; m];
        loop {
            let mut best = (T::zero(), 0, 0);
            for r in (0..m).filter(|r| !used_row[*r]) {
                for c in (0..n).filter(|c| !used_col[*c]) {
                    if a[(r, c)].abs() > best.0 {
                        best = (a[(r, c)].abs(), r, c);
                    }
                }
            }
            if best.0 <= tol {
                return rank;
            }
            let (_, pr, pc) = best;
            used_row[pr] = true;
            used_col[pc] = true;
            rank += 1;
            for r in (0..m).filter(|r| !used_row[*r]) {
                let f = a[(r, pc)] / a[(pr, pc)];
                if f != T::zero() {
                    for c in 0..n {
                        let v = a[(pr, c)];
                        a[(r, c)] = a[(r, c)] - f * v;
                    }
                }
            }
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| s + *x * *y)
}

pub fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Extends an orthonormal family with the candidates, keeping a candidate when
/// its residual after projection exceeds `tol`. Two passes of modified
/// Gram-Schmidt per candidate.
pub fn extend_orthonormal<T: Scalar>(basis: &mut Vec<Vec<T>>, candidates: &[Vec<T>], tol: T) {
    for v in candidates {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in basis.iter() {
                let p = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi = *wi - p * *qi;
                }
            }
        }
        let nw = norm(&w);
        if nw > tol {
            for wi in &mut w {
                *wi = *wi / nw;
            }
            basis.push(w);
        }
    }
}

/// Orthonormal basis of the span of `vectors`.
pub fn orthonormal_basis<T: Scalar>(vectors: &[Vec<T>], tol: T) -> Vec<Vec<T>> {
    let mut basis = Vec::new();
    extend_orthonormal(&mut basis, vectors, tol);
    basis
}

/// Orthonormal basis of the orthogonal complement of an orthonormal family in `T^n`.
pub fn orthogonal_complement<T: Scalar>(basis: &[Vec<T>], n: usize) -> Vec<Vec<T>> {
    let mut all = basis.to_vec();
    let start = all.len();
    let unit: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    // Unit vectors leave a residual of at least 1/sqrt(n) in any missing direction.
    extend_orthonormal(&mut all, &unit, T::lit(0.5) / T::from_count(n.max(1)).sqrt());
    all.split_off(start)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    let n = a.rows;
    assert_eq!(n, a.cols, "solve: matrix not square");
    assert_eq!(n, b.len(), "solve: rhs length mismatch");
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = m.max_abs().max(T::min_positive_value());
    let tiny = scale * T::epsilon() * T::from_count(n.max(1)) * T::lit(16.0);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[(i, k)].abs().partial_cmp(&m[(j, k)].abs()).unwrap())?;
        if m[(p, k)].abs() <= tiny {
            return None;
        }
        if p != k {
            for c in 0..n {
                m.data.swap(p * n + c, k * n + c);
            }
            x.swap(p, k);
        }
        for i in k + 1..n {
            let f = m[(i, k)] / m[(k, k)];
            if f != T::zero() {
                for c in k..n {
                    let v = m[(k, c)];
                    m[(i, c)] = m[(i, c)] - f * v;
                }
                x[i] = x[i] - f * x[k];
            }
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for c in k + 1..n {
            s = s - m[(k, c)] * x[c];
        }
        x[k] = s / m[(k, k)];
    }
    Some(x)
}

/// Inverse of a square matrix, `None` when numerically singular.
pub fn inverse<T: Scalar>(a: &Matrix<T>) -> Option<Matrix<T>> {
    let n = a.rows;
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<T> = (0..n).map(|i| if i == j { T::one() } else { T::zero() }).collect();
        cols.push(solve(a, &e)?);
    }
    Some(Matrix::from_columns(n, &cols))
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues and a matrix whose columns are the matching
/// orthonormal eigenvectors.
pub fn symmetric_eigen<T: Scalar>(a: &Matrix<T>) -> (Vec<T>, Matrix<T>) {
    let n = a.rows;
    assert_eq!(n, a.cols, "symmetric_eigen: matrix not square");
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off + m[(i, j)] * m[(i, j)];
                }
            }
        }
        let total = off + (0..n).fold(T::zero(), |s, i| s + m[(i, i)] * m[(i, i)]);
        if off <= T::epsilon() * T::epsilon() * total || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| m[(i, i)]).collect(), v)
}

/// Reduces a square matrix to upper Hessenberg form by stabilized elementary
/// similarity transformations.
fn hessenberg<T: Scalar>(a: &mut Matrix<T>) {
    let n = a.rows;
    for m in 1..n.saturating_sub(1) {
        let mut x = T::zero();
        let mut piv = m;
        for j in m..n {
            if a[(j, m - 1)].abs() > x.abs() {
                x = a[(j, m - 1)];
                piv = j;
            }
        }
        if piv != m {
            for j in (m - 1)..n {
                let t = a[(piv, j)];
                a[(piv, j)] = a[(m, j)];
                a[(m, j)] = t;
            }
            for i in 0..n {
                let t = a[(i, piv)];
                a[(i, piv)] = a[(i, m)];
                a[(i, m)] = t;
            }
        }
        if x != T::zero() {
            for i in m + 1..n {
                let mut y = a[(i, m - 1)];
                if y != T::zero() {
                    y = y / x;
                    a[(i, m - 1)] = y;
                    for j in m..n {
                        let v = a[(m, j)];
                        a[(i, j)] = a[(i, j)] - y * v;
                    }
                    for j in 0..n {
                        let v = a[(j, i)];
                        a[(j, m)] = a[(j, m)] + y * v;
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            a[(i, j)] = T::zero();
        }
    }
}

#[inline]
fn sign<T: Scalar>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// All eigenvalues `(re, im)` of a real square matrix via the shifted QR
/// algorithm on the Hessenberg form. `None` if the iteration stalls.
pub fn eigenvalues<T: Scalar>(a: &Matrix<T>) -> Option<Vec<(T, T)>> {
    let n = a.rows;
    assert_eq!(n, a.cols, "eigenvalues: matrix not square");
    let mut a = a.clone();
    hessenberg(&mut a);
    let mut wr = vec![T::zero(); n];
    let mut wi = vec![T::zero(); n];
    let mut anorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm = anorm + a[(i, j)].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = T::zero();
    let (mut p, mut q, mut r);
    let (mut x, mut y, mut z, mut w);
    while nn >= 0 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 1 {
                let lu = l as usize;
                let mut s = a[(lu - 1, lu - 1)].abs() + a[(lu, lu)].abs();
                if s == T::zero() {
                    s = anorm;
                }
                if a[(lu, lu - 1)].abs() + s == s {
                    a[(lu, lu - 1)] = T::zero();
                    break;
                }
                l -= 1;
            }
            let nu = nn as usize;
            x = a[(nu, nu)];
            if l == nn {
                wr[nu] = x + t;
                wi[nu] = T::zero();
                nn -= 1;
                break;
            }
            y = a[(nu - 1, nu - 1)];
            w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
            if l == nn - 1 {
                p = T::lit(0.5) * (y - x);
                q = p * p + w;
                z = q.abs().sqrt();
                x = x + t;
                if q >= T::zero() {
                    z = p + sign(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = x + z;
                    if z != T::zero() {
                        wr[nu] = x - w / z;
                    }
                    wi[nu - 1] = T::zero();
                    wi[nu] = T::zero();
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return None;
            }
            if its == 10 || its == 20 || its == 40 {
                t = t + x;
                for i in 0..=nu {
                    a[(i, i)] = a[(i, i)] - x;
                }
                let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                x = T::lit(0.75) * s;
                y = x;
                w = T::lit(-0.4375) * s * s;
            }
            its += 1;
            let lu = l as usize;
            let mut m = nu - 2;
            loop {
                z = a[(m, m)];
                r = x - z;
                let s = y - z;
                p = (r * s - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - r - s;
                r = a[(m + 2, m + 1)];
                let s = p.abs() + q.abs() + r.abs();
                p = p / s;
                q = q / s;
                r = r / s;
                if m == lu {
                    break;
                }
                let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[(i, i - 2)] = T::zero();
                if i != m + 2 {
                    a[(i, i - 3)] = T::zero();
                }
            }
            let mut k = m;
            while k < nu {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = T::zero();
                    if k + 1 != nu {
                        r = a[(k + 2, k - 1)];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != T::zero() {
                        p = p / x;
                        q = q / x;
                        r = r / x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != T::zero() {
                    if k == m {
                        if lu != m {
                            a[(k, k - 1)] = -a[(k, k - 1)];
                        }
                    } else {
                        a[(k, k - 1)] = -s * x;
                    }
                    p = p + s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q = q / p;
                    r = r / p;
                    for j in k..=nu {
                        p = a[(k, j)] + q * a[(k + 1, j)];
                        if k + 1 != nu {
                            p = p + r * a[(k + 2, j)];
                            a[(k + 2, j)] = a[(k + 2, j)] - p * z;
                        }
                        a[(k + 1, j)] = a[(k + 1, j)] - p * y;
                        a[(k, j)] = a[(k, j)] - p * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in lu..=mmin {
                        p = x * a[(i, k)] + y * a[(i, k + 1)];
                        if k + 1 != nu {
                            p = p + z * a[(i, k + 2)];
                            a[(i, k + 2)] = a[(i, k + 2)] - p * r;
                        }
                        a[(i, k + 1)] = a[(i, k + 1)] - p * q;
                        a[(i, k)] = a[(i, k)] - p;
                    }
                }
                k += 1;
            }
        }
    }
    Some(wr.into_iter().zip(wi).collect())
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<T: Scalar>(m: &Matrix<T>) -> T {
    let n = m.rows();
    let mut a = m.clone();
    let mut det = T::one();
    for c in 0..n {
        let p = (c..n).fold(c, |best, r| if a[(r, c)].abs() > a[(best, c)].abs() { r } else { best });
        if a[(p, c)] == T::zero() {
            return T::zero();
        }
        if p != c {
            for k in 0..n {
                let t = a[(p, k)];
                a[(p, k)] = a[(c, k)];
                a[(c, k)] = t;
            }
            det = -det;
        }
        det = det * a[(c, c)];
        for r in c + 1..n {
            let f = a[(r, c)] / a[(c, c)];
            for k in c..n {
                a[(r, k)] = a[(r, k)] - f * a[(c, k)];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn solve_and_inverse() {
        let a = Matrix::from_row_major(3, 3, vec![2.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 4.0]);
        let x = solve(&a, &[1.0, 2.0, 3.0]).unwrap();
        let back = a.mul_vec(&x);
        assert!(crate::scalar::abs_err(&back, &[1.0, 2.0, 3.0]) < 1e-14);
        let inv = inverse(&a).unwrap();
        let id = a.matmul(&inv);
        assert!(crate::scalar::abs_err(id.as_slice(), Matrix::identity(3).as_slice()) < 1e-14);
        let sing = Matrix::from_row_major(2, 2, vec![1.0, 2.0, 2.0, 4.0]);
        assert!(solve(&sing, &[1.0, 1.0]).is_none());
    }

    #[test]
    fn rank_of_rank_deficient() {
        let a = Matrix::from_row_major(3, 3, vec![1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, 1.0]);
        assert_eq!(a.rank(1e-12), 2);
    }

    #[test]
    fn jacobi_diagonalizes() {
        let a = Matrix::from_row_major(3, 3, vec![4.0, 1.0, 2.0, 1.0, 3.0, 0.5, 2.0, 0.5, 5.0]);
        let (vals, vecs) = symmetric_eigen(&a);
        for (i, lam) in vals.iter().enumerate() {
            let v = vecs.col(i);
            let av = a.mul_vec(&v);
            let lv: Vec<f64> = v.iter().map(|x| x * lam).collect();
            assert!(crate::scalar::abs_err(&av, &lv) < 1e-12);
        }
        assert!((vals.iter().sum::<f64>() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn qr_real_and_complex_spectra() {
        // companion-like matrix with eigenvalues 1, 2, 3
        let a = Matrix::from_row_major(3, 3, vec![6.0, -11.0, 6.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let ev = sorted_re(eigenvalues(&a).unwrap());
        for (k, (re, im)) in ev.iter().enumerate() {
            assert!((re - (k as f64 + 1.0)).abs() < 1e-10);
            assert_eq!(*im, 0.0);
        }
        // rotation generator: eigenvalues ±i
        let j = Matrix::from_row_major(2, 2, vec![0.0f64, -1.0, 1.0, 0.0]);
        let ev = sorted_re(eigenvalues(&j).unwrap());
        assert!((ev[0].1.abs() - 1.0).abs() < 1e-14);
        assert!(ev[0].0.abs() < 1e-14);
    }

    #[test]
    fn qr_larger_matrix_matches_trace_and_det() {
        let n = 7;
        let a = Matrix::from_fn(n, n, |r, c| ((r * 7 + c * 3) % 5) as f64 - 1.5 + if r == c { 4.0 } else { 0.0 });
        let ev = eigenvalues(&a).unwrap();
        let tr: f64 = ev.iter().map(|e| e.0).sum();
        assert!((tr - a.trace()).abs() < 1e-9);
        let im_sum: f64 = ev.iter().map(|e| e.1).sum();
        assert!(im_sum.abs() < 1e-9);
    }

    #[test]
    fn complement_spans_rest() {
        let b = orthonormal_basis(&[vec![1.0f64, 1.0, 0.0]], 1e-12);
        let c = orthogonal_complement(&b, 3);
        assert_eq!(c.len(), 2);
        for v in &c {
            assert!(dot(v, &b[0]).abs() < 1e-14);
        }
    }
}
