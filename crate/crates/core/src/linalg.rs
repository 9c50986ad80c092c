//! Small dense linear algebra: complex and real matrices, a cyclic Jacobi
//! eigensolver for real symmetric matrices, closed-form 2×2 Hermitian
//! eigendecomposition, and the SVD / pseudo-inverse of tall M×2 matrices.
//!
//! Everything here is sized for the relay problem (M relay antennas, 8×8 real
//! SDP blocks). Nothing is blocked or cache-tuned.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{invalid, Error, Result};

pub type C64 = Complex<f64>;

/// Default relative tolerance for rank decisions in [`pinv_tall`].
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Relative threshold below which the second singular value of a tall matrix
/// is snapped to zero and the second left singular vector is completed by
/// Gram–Schmidt instead of normalisation.
const DEFLATION_TOL: f64 = 1e-13;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Euclidean norm of a complex vector.
pub fn norm(x: &[C64]) -> f64 {
    norm_sqr(x).sqrt()
}

pub fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// `x^H y`.
pub fn dot_h(x: &[C64], y: &[C64]) -> C64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// `x^T y` (no conjugation).
pub fn dot_t(x: &[C64], y: &[C64]) -> C64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn conj_vec(x: &[C64]) -> Vec<C64> {
    x.iter().map(|z| z.conj()).collect()
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[&[C64]]) -> Self {
        let rows = columns[0].len();
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged columns");
            for (i, z) in c.iter().enumerate() {
                m[(i, j)] = *z;
            }
        }
        m
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self {
            rows,
            cols,
            data: data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows).map(|i| dot_t(self.row(i), x)).collect()
    }

    pub fn transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> CMatrix {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Squared Frobenius norm, i.e. `tr(A A^H)`.
    pub fn frobenius_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_sqr().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Dense real matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct RMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count mismatch");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// `v v^T`.
    pub fn outer(v: &[f64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j];
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn mul(&self, other: &RMatrix) -> RMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = RMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `x^T S x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn transpose(&self) -> RMatrix {
        let mut out = RMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn add(&self, other: &RMatrix) -> RMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &RMatrix) -> RMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &RMatrix) -> RMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + s * b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> RMatrix {
        RMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Frobenius inner product `tr(A^T B)`.
    pub fn inner(&self, other: &RMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.abs()).fold(0.0, f64::max)
    }

    /// Largest `|S_ij - S_ji|`.
    pub fn asymmetry(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// `(S + S^T) / 2`.
    pub fn symmetrize(&self) -> RMatrix {
        assert_eq!(self.rows, self.cols);
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let m = 0.5 * (self[(i, j)] + self[(j, i)]);
                out[(i, j)] = m;
                out[(j, i)] = m;
            }
        }
        out
    }

    /// `P^T S P`.
    pub fn congruence(&self, p: &RMatrix) -> RMatrix {
        p.transpose().mul(self).mul(p)
    }
}

impl Index<(usize, usize)> for RMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:+.6e} ", self[(i, j)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Eigendecomposition `S = V diag(values) V^T` with eigenvalues sorted in
/// descending order and orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: RMatrix,
}

impl SymEigen {
    /// `V f(diag) V^T`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> RMatrix {
        let n = self.values.len();
        let mut out = RMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)];
                }
            }
        }
        out
    }

    pub fn min_value(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }
}

/// Cyclic Jacobi eigendecomposition of a real symmetric matrix.
///
/// Sweeps until the off-diagonal Frobenius mass drops below
/// `tol * ||S||_F` (or the rounding floor, whichever is larger).
pub fn eig_sym(s: &RMatrix, tol: f64) -> Result<SymEigen> {
    let n = s.rows();
    if n == 0 || s.cols() != n {
        return Err(invalid("eig_sym needs a non-empty square matrix"));
    }
    let scale = s.max_abs();
    if !scale.is_finite() {
        return Err(invalid("eig_sym input has non-finite entries"));
    }
    if s.asymmetry() > tol * scale.max(f64::MIN_POSITIVE) {
        return Err(invalid(format!(
            "matrix is not symmetric within {tol:e} (asymmetry {:e})",
            s.asymmetry()
        )));
    }

    let mut a = s.symmetrize();
    let mut v = RMatrix::identity(n);
    let fro = a.frobenius_norm();
    let target = (tol * fro).max(4.0 * f64::EPSILON * fro * n as f64);

    for _sweep in 0..64 {
        let off: f64 = {
            let mut acc = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    acc += 2.0 * a[(i, j)] * a[(i, j)];
                }
            }
            acc.sqrt()
        };
        if off <= target || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps input order among equal eigenvalues
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = RMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        // sign convention: largest-magnitude component positive
        let mut pivot = 0;
        for i in 0..n {
            if v[(i, src)].abs() > v[(pivot, src)].abs() + 1e-14 {
                pivot = i;
            }
        }
        let sign = if v[(pivot, src)] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors[(i, dst)] = sign * v[(i, src)];
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Closed-form eigendecomposition of the 2×2 Hermitian matrix
/// `[[a, b], [conj(b), d]]`. Eigenvalues are returned in descending order and
/// the eigenvectors as the columns of a unitary matrix. A diagonal input with
/// equal entries yields the identity.
pub fn eig_herm2(a: f64, b: C64, d: f64) -> ([f64; 2], CMatrix) {
    let half_diff = 0.5 * (a - d);
    let r = half_diff.hypot(b.norm());
    let mean = 0.5 * (a + d);
    let l1 = mean + r;
    let l2 = mean - r;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);

    if b.norm() <= f64::EPSILON * (a.abs() + d.abs()) || r == 0.0 {
        return if a >= d {
            ([a, d], CMatrix::identity(2))
        } else {
            ([d, a], CMatrix::from_rows(&[&[zero, one], &[one, zero]]))
        };
    }

    // pick the eigenvector formula that avoids cancellation
    let v1 = if a >= d {
        [C64::new(l1 - d, 0.0), b.conj()]
    } else {
        [b, C64::new(l1 - a, 0.0)]
    };
    let nv = norm(&v1);
    let v1 = [v1[0] / nv, v1[1] / nv];
    let v2 = [-v1[1].conj(), v1[0].conj()];
    ([l1, l2], CMatrix::from_rows(&[&[v1[0], v2[0]], &[v1[1], v2[1]]]))
}

/// Eigendecomposition of a 2×2 Hermitian [`CMatrix`].
pub fn eig_herm2_matrix(m: &CMatrix) -> ([f64; 2], CMatrix) {
    assert_eq!((m.rows(), m.cols()), (2, 2));
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    eig_herm2(m[(0, 0)].re, b, m[(1, 1)].re)
}

/// Applies `f` to the spectrum of a 2×2 Hermitian matrix.
pub fn herm2_apply(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (lam, v) = eig_herm2_matrix(m);
    let mut d = CMatrix::zeros(2, 2);
    d[(0, 0)] = C64::new(f(lam[0]), 0.0);
    d[(1, 1)] = C64::new(f(lam[1]), 0.0);
    v.mul(&d).mul(&v.adjoint())
}

/// Thin SVD `H = U diag(sigma) V^H` of an M×2 complex matrix.
#[derive(Clone, Debug)]
pub struct TallSvd {
    /// M×2 with orthonormal columns.
    pub u: CMatrix,
    /// `sigma[0] >= sigma[1] >= 0`.
    pub sigma: [f64; 2],
    /// 2×2 unitary.
    pub v: CMatrix,
}

impl TallSvd {
    pub fn reconstruct(&self) -> CMatrix {
        let mut s = CMatrix::zeros(2, 2);
        s[(0, 0)] = C64::new(self.sigma[0], 0.0);
        s[(1, 1)] = C64::new(self.sigma[1], 0.0);
        self.u.mul(&s).mul(&self.v.adjoint())
    }
}

/// SVD of a tall M×2 matrix through the closed-form eigendecomposition of its
/// 2×2 Gram matrix, followed by `U = H V Σ^{-1}`. When the second singular
/// value vanishes the second column of `U` is completed by Gram–Schmidt.
pub fn svd_tall(h: &CMatrix) -> Result<TallSvd> {
    let m = h.rows();
    if h.cols() != 2 {
        return Err(invalid(format!("svd_tall expects two columns, got {}", h.cols())));
    }
    if m < 2 {
        return Err(invalid("svd_tall expects at least two rows"));
    }
    if !h.is_finite() {
        return Err(invalid("svd_tall input has non-finite entries"));
    }
    let c1 = h.column(0);
    let c2 = h.column(1);
    let (_, v) = eig_herm2(norm_sqr(&c1), dot_h(&c1, &c2), norm_sqr(&c2));

    let w1 = h.mul_vec(&v.column(0));
    let mut w2 = h.mul_vec(&v.column(1));
    let sigma1 = norm(&w1);

    let u1: Vec<C64> = if sigma1 > 0.0 {
        w1.iter().map(|z| z / sigma1).collect()
    } else {
        unit_vector(m, 0)
    };
    let proj = dot_h(&u1, &w2);
    for (z, u) in w2.iter_mut().zip(&u1) {
        *z -= u * proj;
    }
    let mut sigma2 = norm(&w2);

    let u2: Vec<C64> = if sigma2 > DEFLATION_TOL * sigma1 && sigma2 > 0.0 {
        w2.iter().map(|z| z / sigma2).collect()
    } else {
        sigma2 = 0.0;
        orthogonal_complement(&u1)
    };

    Ok(TallSvd {
        u: CMatrix::from_columns(&[&u1, &u2]),
        sigma: [sigma1, sigma2],
        v,
    })
}

fn unit_vector(m: usize, k: usize) -> Vec<C64> {
    let mut e = vec![C64::new(0.0, 0.0); m];
    e[k] = C64::new(1.0, 0.0);
    e
}

/// A unit vector orthogonal to the unit vector `u`, built from the standard
/// basis vector on which `u` has the least weight.
fn orthogonal_complement(u: &[C64]) -> Vec<C64> {
    let k = (0..u.len())
        .min_by(|&i, &j| u[i].norm().partial_cmp(&u[j].norm()).unwrap())
        .unwrap_or(0);
    let mut e = unit_vector(u.len(), k);
    let proj = dot_h(u, &e);
    for (z, ui) in e.iter_mut().zip(u) {
        *z -= ui * proj;
    }
    let n = norm(&e);
    e.iter().map(|z| z / n).collect()
}

/// Moore–Penrose pseudo-inverse of a full-column-rank M×2 matrix.
///
/// Fails with [`Error::RankDeficient`] when `sigma2 <= rank_tol * sigma1`.
pub fn pinv_tall(h: &CMatrix, rank_tol: f64) -> Result<CMatrix> {
    let svd = svd_tall(h)?;
    let [s1, s2] = svd.sigma;
    if s1 == 0.0 || s2 <= rank_tol * s1 {
        return Err(Error::RankDeficient { sigma1: s1, sigma2: s2 });
    }
    let mut sinv = CMatrix::zeros(2, 2);
    sinv[(0, 0)] = C64::new(1.0 / s1, 0.0);
    sinv[(1, 1)] = C64::new(1.0 / s2, 0.0);
    Ok(svd.v.mul(&sinv).mul(&svd.u.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cmatrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
        let data = (0..rows * cols)
            .map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        CMatrix::from_vec(rows, cols, data).unwrap()
    }

    #[test]
    fn eig_sym_diagonal() {
        let e = eig_sym(&RMatrix::from_diag(&[3.0, 1.0]), 1e-14).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
        assert_eq!(e.vectors, RMatrix::identity(2));
    }

    #[test]
    fn eig_sym_swap_matrix() {
        let s = RMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = eig_sym(&s, 1e-14).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] + 1.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.vectors[(0, 0)].abs() - r).abs() < 1e-14);
        assert!((e.vectors[(0, 0)] - e.vectors[(1, 0)]).abs() < 1e-14);
        assert!((e.vectors[(0, 1)] + e.vectors[(1, 1)]).abs() < 1e-14);
    }

    #[test]
    fn eig_sym_random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tol = 1e-13;
        for _ in 0..20 {
            let mut s = RMatrix::zeros(8, 8);
            for i in 0..8 {
                for j in i..8 {
                    let x = rng.gen_range(-2.0..2.0);
                    s[(i, j)] = x;
                    s[(j, i)] = x;
                }
            }
            let e = eig_sym(&s, tol).unwrap();
            let back = e.apply(|l| l);
            assert!(back.sub(&s).max_abs() <= 10.0 * tol * s.max_abs());
            let vtv = e.vectors.transpose().mul(&e.vectors);
            assert!(vtv.sub(&RMatrix::identity(8)).max_abs() <= 10.0 * tol);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eig_sym_rejects_asymmetric() {
        let s = RMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(eig_sym(&s, 1e-12), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn herm2_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a = rng.gen_range(-3.0..3.0);
            let d = rng.gen_range(-3.0..3.0);
            let b = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let m = CMatrix::from_rows(&[&[c64(a, 0.0), b], &[b.conj(), c64(d, 0.0)]]);
            let (lam, v) = eig_herm2(a, b, d);
            assert!(lam[0] >= lam[1]);
            let mut dm = CMatrix::zeros(2, 2);
            dm[(0, 0)] = c64(lam[0], 0.0);
            dm[(1, 1)] = c64(lam[1], 0.0);
            assert!(v.mul(&dm).mul(&v.adjoint()).sub(&m).max_abs() < 1e-13);
            assert!(v.adjoint().mul(&v).sub(&CMatrix::identity(2)).max_abs() < 1e-14);
        }
    }

    #[test]
    fn svd_identity() {
        let svd = svd_tall(&CMatrix::identity(2)).unwrap();
        assert_eq!(svd.sigma, [1.0, 1.0]);
        assert!(svd.u.sub(&CMatrix::identity(2)).max_abs() < 1e-15);
        assert!(svd.v.sub(&CMatrix::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn svd_parallel_columns() {
        let h = vec![c64(0.5, 0.5), c64(0.5, -0.5)];
        let m = CMatrix::from_columns(&[&h, &h]);
        let svd = svd_tall(&m).unwrap();
        assert_eq!(svd.sigma[1], 0.0);
        assert!((svd.sigma[0] - 2f64.sqrt()).abs() < 1e-14);
        assert!(svd.u.adjoint().mul(&svd.u).sub(&CMatrix::identity(2)).max_abs() < 1e-14);
        assert!(svd.reconstruct().sub(&m).max_abs() < 1e-14);
    }

    #[test]
    fn svd_random_tall() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in 2..=6 {
            for _ in 0..50 {
                let h = random_cmatrix(&mut rng, m, 2);
                let svd = svd_tall(&h).unwrap();
                assert!(svd.reconstruct().sub(&h).frobenius_norm() <= 1e-10 * h.frobenius_norm());
                assert!(svd.u.adjoint().mul(&svd.u).sub(&CMatrix::identity(2)).max_abs() < 1e-12);
                assert!(svd.sigma[0] >= svd.sigma[1] && svd.sigma[1] >= 0.0);
                // sigma_i^2 are the Gram eigenvalues
                let gram = h.adjoint().mul(&h);
                let (lam, _) = eig_herm2_matrix(&gram);
                assert!((svd.sigma[0].powi(2) - lam[0]).abs() < 1e-9);
                assert!((svd.sigma[1].powi(2) - lam[1]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn pinv_orthonormal_and_scaled() {
        let h = CMatrix::identity(2);
        assert!(pinv_tall(&h, DEFAULT_RANK_TOL).unwrap().sub(&h).max_abs() < 1e-15);

        let h = CMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let p = pinv_tall(&h, DEFAULT_RANK_TOL).unwrap();
        let want = CMatrix::from_real(2, 2, &[0.5, 0.0, 0.0, 1.0]);
        assert!(p.sub(&want).max_abs() < 1e-15);
    }

    #[test]
    fn pinv_rank_deficient() {
        let h = vec![c64(1.0, 0.0), c64(0.0, 1.0), c64(0.5, 0.0)];
        let m = CMatrix::from_columns(&[&h, &h]);
        assert!(matches!(
            pinv_tall(&m, DEFAULT_RANK_TOL),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn pinv_moore_penrose_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let h = random_cmatrix(&mut rng, 4, 2);
            let p = pinv_tall(&h, DEFAULT_RANK_TOL).unwrap();
            let hp = h.mul(&p);
            let ph = p.mul(&h);
            assert!(ph.sub(&CMatrix::identity(2)).max_abs() < 1e-9);
            assert!(hp.mul(&h).sub(&h).max_abs() < 1e-9);
            assert!(ph.mul(&p).sub(&p).max_abs() < 1e-9);
            assert!(hp.sub(&hp.adjoint()).max_abs() < 1e-9);
            assert!(ph.sub(&ph.adjoint()).max_abs() < 1e-9);
        }
    }
}
