//! Small dense complex linear algebra: Householder QR, LU solves, one-sided
//! Jacobi singular values and the complex Schur decomposition.
//!
//! Everything here works on matrices of dimension at most a few dozen, so the
//! routines favour clarity and backward stability over blocking.

use std::ops::{Index, IndexMut, Mul};

use crate::scalar::{cone, czero, vec_norm, Real, C};

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[C<T>]) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has the wrong length");
        Self { rows, cols, data: data.to_vec() }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C<T>>]) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn from_rows(rows: &[Vec<C<T>>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    pub fn diagonal(diag: &[C<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [C<T>] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C<T>]) {
        for (i, z) in v.iter().enumerate() {
            self[(i, j)] = *z;
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| self.row(i).iter().zip(v).fold(czero(), |acc, (a, b)| acc + a * b)).collect()
    }

    /// `self* · v` without forming the adjoint.
    pub fn adjoint_mul_vec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![czero(); self.cols];
        for (i, vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a.conj() * vi;
            }
        }
        out
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn frobenius_norm(&self) -> T {
        vec_norm(&self.data)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// `‖self* · self − I‖_Frob`
    pub fn unitarity_defect(&self) -> T {
        let g = self.adjoint() * self;
        g.sub(&Self::identity(self.cols)).frobenius_norm()
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul<&CMatrix<T>> for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == czero() {
                    continue;
                }
                let src = rhs.row(k);
                let dst = out.row_mut(i);
                for (d, b) in dst.iter_mut().zip(src) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }
}

impl<T: Real> Mul<&CMatrix<T>> for CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        &self * rhs
    }
}

impl<T: Real> Mul<CMatrix<T>> for CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: CMatrix<T>) -> CMatrix<T> {
        &self * &rhs
    }
}

/// Unit Householder vector `v` with `(I − 2vv*)x = α e₀`, `|α| = ‖x‖`.
///
/// The target phase is opposite to that of `x₀`, so `x − α e₀` never cancels.
/// Returns `None` when `x` vanishes.
pub(crate) fn householder_vector<T: Real>(x: &[C<T>]) -> Option<(Vec<C<T>>, C<T>)> {
    let nrm = vec_norm(x);
    if !(nrm > T::zero()) {
        return None;
    }
    let phase = if x[0].norm() > T::zero() { x[0] / x[0].norm() } else { cone() };
    let alpha = -phase * nrm;
    let mut v = x.to_vec();
    v[0] = v[0] - alpha;
    let vn = vec_norm(&v);
    if !(vn > T::zero()) {
        return None;
    }
    v.iter_mut().for_each(|z| *z = *z / vn);
    Some((v, alpha))
}

/// Applies `I − 2vv*` from the left to rows `offset..` of `m`.
fn reflect_rows<T: Real>(m: &mut CMatrix<T>, v: &[C<T>], offset: usize) {
    let two = T::lit(2.0);
    for j in 0..m.cols {
        let mut s = czero();
        for (k, vk) in v.iter().enumerate() {
            s = s + vk.conj() * m[(offset + k, j)];
        }
        if s == czero() {
            continue;
        }
        for (k, vk) in v.iter().enumerate() {
            m[(offset + k, j)] = m[(offset + k, j)] - vk * s * two;
        }
    }
}

/// Applies `I − 2vv*` from the right to columns `offset..` of `m`.
fn reflect_cols<T: Real>(m: &mut CMatrix<T>, v: &[C<T>], offset: usize) {
    let two = T::lit(2.0);
    for i in 0..m.rows {
        let mut s: C<T> = czero();
        for (k, vk) in v.iter().enumerate() {
            s = s + m[(i, offset + k)] * vk;
        }
        if s == czero() {
            continue;
        }
        for (k, vk) in v.iter().enumerate() {
            m[(i, offset + k)] = m[(i, offset + k)] - s * vk.conj() * two;
        }
    }
}

/// Full Householder QR: returns `(Q, R)` with `Q` square unitary and `A = QR`.
pub fn householder_qr<T: Real>(a: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let (m, n) = (a.rows, a.cols);
    let mut r = a.clone();
    let mut q = CMatrix::identity(m);
    for k in 0..n.min(m.saturating_sub(1)) {
        let x: Vec<C<T>> = (k..m).map(|i| r[(i, k)]).collect();
        if let Some((v, _)) = householder_vector(&x) {
            reflect_rows(&mut r, &v, k);
            reflect_cols(&mut q, &v, k);
            for i in k + 1..m {
                r[(i, k)] = czero();
            }
        }
    }
    (q, r)
}

/// Orthonormal basis of the orthogonal complement of the span of `vectors`
/// in `C^dim`, obtained from the trailing columns of a full QR factor.
pub fn orthogonal_complement<T: Real>(vectors: &[Vec<C<T>>], dim: usize) -> Vec<Vec<C<T>>> {
    if vectors.is_empty() {
        return (0..dim).map(|j| (0..dim).map(|i| if i == j { cone() } else { czero() }).collect()).collect();
    }
    let a = CMatrix::from_columns(vectors);
    let (q, _) = householder_qr(&a);
    (vectors.len()..dim).map(|j| q.column(j)).collect()
}

/// Result of an LU solve.
#[derive(Clone, Debug)]
pub struct LuSolution<T> {
    pub x: Vec<C<T>>,
    /// Reciprocal 1-norm condition number `1 / (‖A‖₁ ‖A⁻¹‖₁)`.
    pub rcond: T,
}

/// Solves `A x = b` by LU with partial pivoting; `None` on an exactly
/// singular pivot.
pub fn lu_solve<T: Real>(a: &CMatrix<T>, b: &[C<T>]) -> Option<LuSolution<T>> {
    let n = a.rows;
    assert_eq!(a.cols, n, "LU solve needs a square matrix");
    assert_eq!(b.len(), n);
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (p, pmax) =
            (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pmax > T::zero()) || !pmax.is_finite() {
            return None;
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
            perm.swap(k, p);
        }
        let piv = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / piv;
            lu[(i, k)] = f;
            if f == czero() {
                continue;
            }
            for j in k + 1..n {
                let u = lu[(k, j)];
                lu[(i, j)] = lu[(i, j)] - f * u;
            }
        }
    }
    let solve = |rhs: &[C<T>]| -> Vec<C<T>> {
        let mut y: Vec<C<T>> = perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            for j in 0..i {
                y[i] = y[i] - lu[(i, j)] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] = y[i] - lu[(i, j)] * y[j];
            }
            y[i] = y[i] / lu[(i, i)];
        }
        y
    };
    let x = solve(b);
    let norm1 = |cols: &dyn Fn(usize) -> T| (0..n).map(cols).fold(T::zero(), T::max);
    let a_norm = norm1(&|j| (0..n).map(|i| a[(i, j)].norm()).fold(T::zero(), |s, v| s + v));
    let mut inv_norm = T::zero();
    let mut e = vec![czero(); n];
    for j in 0..n {
        e[j] = cone();
        let col = solve(&e);
        e[j] = czero();
        inv_norm = inv_norm.max(col.iter().fold(T::zero(), |s, z| s + z.norm()));
    }
    let rcond = T::one() / (a_norm * inv_norm);
    Some(LuSolution { x, rcond: if rcond.is_finite() { rcond } else { T::zero() } })
}

/// Singular values of `a`, in decreasing order, by one-sided Jacobi
/// (Hestenes) rotations. Returns `min(rows, cols)` values.
pub fn singular_values<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    // orthogonalise the columns of whichever of a, a* is tall
    let tall = if a.rows >= a.cols { a.clone() } else { a.adjoint() };
    let (m, p) = (tall.rows, tall.cols);
    let mut cols: Vec<Vec<C<T>>> = (0..p).map(|j| tall.column(j)).collect();
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..p {
            for j in i + 1..p {
                let alpha = cols[i].iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                let beta = cols[j].iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                let gamma = cols[i].iter().zip(&cols[j]).fold(czero::<T>(), |s, (x, y)| s + x.conj() * y);
                let g = gamma.norm();
                if !(g > eps * (alpha * beta).sqrt()) || g == T::zero() {
                    continue;
                }
                rotated = true;
                let phase: C<T> = gamma / g;
                let zeta = (beta - alpha) / (g + g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let t = if zeta == T::zero() { T::one() } else { t };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for k in 0..m {
                    let bi = cols[i][k];
                    let bj = cols[j][k] * phase.conj();
                    cols[i][k] = bi * c - bj * s;
                    cols[j][k] = (bi * s + bj * c) * phase;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = cols.iter().map(|c| vec_norm(c)).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Complex Schur decomposition `A = Q T Q*`.
#[derive(Clone, Debug)]
pub struct Schur<T> {
    /// Unitary Schur vectors (identity when not requested).
    pub q: CMatrix<T>,
    /// Upper triangular factor.
    pub t: CMatrix<T>,
    pub converged: bool,
}

/// Reduces to Hessenberg form with Householder reflections and runs the
/// single-shift QR iteration with Wilkinson shifts and deflation.
pub fn schur<T: Real>(a: &CMatrix<T>, want_vectors: bool) -> Schur<T> {
    let n = a.rows;
    assert_eq!(a.cols, n, "Schur decomposition needs a square matrix");
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        if x[1..].iter().all(|z| *z == czero()) {
            continue;
        }
        if let Some((v, _)) = householder_vector(&x) {
            reflect_rows(&mut h, &v, k + 1);
            reflect_cols(&mut h, &v, k + 1);
            if want_vectors {
                reflect_cols(&mut q, &v, k + 1);
            }
            for i in k + 2..n {
                h[(i, k)] = czero();
            }
        }
    }
    let converged = hessenberg_qr(&mut h, want_vectors.then_some(&mut q));
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = czero();
        }
    }
    Schur { q, t: h, converged }
}

/// Eigenvalues of a square complex matrix (Schur diagonal).
pub fn eigenvalues<T: Real>(a: &CMatrix<T>) -> (Vec<C<T>>, bool) {
    let s = schur(a, false);
    ((0..a.rows).map(|i| s.t[(i, i)]).collect(), s.converged)
}

fn hessenberg_qr<T: Real>(h: &mut CMatrix<T>, mut q: Option<&mut CMatrix<T>>) -> bool {
    let n = h.rows;
    if n < 2 {
        return true;
    }
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let max_total = 200 * n;
    let mut rot: Vec<(C<T>, C<T>)> = Vec::with_capacity(n);
    while hi > 0 {
        // locate the start of the unreduced block ending at hi
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let floor = if diag > T::zero() { diag } else { h.max_abs() };
            if sub <= eps * floor {
                h[(l, l - 1)] = czero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_total {
            return false;
        }
        let shift = if iter % 11 == 10 {
            // exceptional shift breaks rare stagnation cycles
            h[(hi, hi)] + C::new(h[(hi, hi - 1)].norm() * T::lit(0.75), T::zero())
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for k in l..=hi {
            h[(k, k)] = h[(k, k)] - shift;
        }
        rot.clear();
        for k in l..hi {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r > T::zero() { (x / r, y / r) } else { (C::new(T::one(), T::zero()), czero()) };
            // G = [[c̄, s̄], [−s, c]] maps (x, y) to (r, 0)
            for j in k..n {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = c.conj() * a + s.conj() * b;
                h[(k + 1, j)] = -s * a + c * b;
            }
            rot.push((c, s));
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = l + idx;
            // right-multiply by G*
            for i in 0..=(k + 1).min(hi) {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s;
                h[(i, k + 1)] = -a * s.conj() + b * c.conj();
            }
            if let Some(q) = q.as_deref_mut() {
                for i in 0..n {
                    let a = q[(i, k)];
                    let b = q[(i, k + 1)];
                    q[(i, k)] = a * c + b * s;
                    q[(i, k + 1)] = -a * s.conj() + b * c.conj();
                }
            }
        }
        for k in l..=hi {
            h[(k, k)] = h[(k, k)] + shift;
        }
    }
    true
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift<T: Real>(a: C<T>, b: C<T>, c: C<T>, d: C<T>) -> C<T> {
    let half = T::lit(0.5);
    let m = (a + d) * half;
    let disc = ((a - d) * (a - d) * T::lit(0.25) + b * c).sqrt();
    let l1 = m + disc;
    let l2 = m - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}
