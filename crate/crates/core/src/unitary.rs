//! Unitary matrices, tuples of them, and continuation paths in `U(n+1)ⁿ`.
//!
//! Lengths and speeds use the metric `‖A‖_u = ‖A‖_Frob / √2` on each factor
//! and the Euclidean product metric on tuples.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{householder_qr, schur, singular_values, CMatrix};
use crate::scalar::{cis, complex_normal, cone, czero, principal_arg, vec_norm, wrap_angle, Real, C};

/// `‖A‖_u = ‖A‖_Frob / √2`
pub fn unitary_metric_norm<T: Real>(a: &CMatrix<T>) -> T {
    a.frobenius_norm() / T::SQRT_2()
}

/// A square unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix<T> {
    m: CMatrix<T>,
}

impl<T: Real> UnitaryMatrix<T> {
    /// Validates `‖M*M − I‖_Frob ≤ 1e−10`.
    pub fn new(m: CMatrix<T>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        let defect = m.unitarity_defect();
        if !(defect <= T::tol(1e-10)) {
            return Err(Error::NonOrthonormal { defect: defect.to_f64_lossy() });
        }
        Ok(Self { m })
    }

    /// Wraps a matrix known to be unitary up to rounding.
    pub(crate) fn from_trusted(m: CMatrix<T>) -> Self {
        debug_assert!(m.unitarity_defect() <= T::tol(1e-9), "matrix drifted away from U(k)");
        Self { m }
    }

    pub fn identity(k: usize) -> Self {
        Self { m: CMatrix::identity(k) }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    #[inline]
    pub fn matrix(&self) -> &CMatrix<T> {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.m
    }

    /// The inverse `U*`.
    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { m: &self.m * &other.m }
    }

    /// `U v`
    pub fn apply(&self, v: &[C<T>]) -> Vec<C<T>> {
        self.m.mul_vec(v)
    }

    /// `U* v`
    pub fn apply_adjoint(&self, v: &[C<T>]) -> Vec<C<T>> {
        self.m.adjoint_mul_vec(v)
    }

    pub fn unitarity_defect(&self) -> T {
        self.m.unitarity_defect()
    }

    pub fn cast<U: Real>(&self) -> UnitaryMatrix<U> {
        UnitaryMatrix { m: cast_matrix(&self.m) }
    }
}

pub(crate) fn cast_matrix<T: Real, U: Real>(m: &CMatrix<T>) -> CMatrix<U> {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        let z = m[(i, j)];
        C::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy()))
    })
}

/// An element `𝐮 = (u_1, …, u_n)` of `U(n+1)ⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryTuple<T> {
    components: Vec<UnitaryMatrix<T>>,
}

impl<T: Real> UnitaryTuple<T> {
    /// Requires `n` components of size `(n+1)×(n+1)`.
    pub fn new(components: Vec<UnitaryMatrix<T>>) -> Result<Self> {
        let n = components.len();
        for u in &components {
            if u.dim() != n + 1 {
                return Err(Error::DimensionMismatch { expected: n + 1, got: u.dim() });
            }
        }
        Ok(Self { components })
    }

    pub fn identity(n: usize) -> Self {
        Self { components: (0..n).map(|_| UnitaryMatrix::identity(n + 1)).collect() }
    }

    /// Haar-distributed tuple.
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self { components: (0..n).map(|_| sample_unitary(n + 1, rng)).collect() }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.components.len()
    }

    #[inline]
    pub fn components(&self) -> &[UnitaryMatrix<T>] {
        &self.components
    }

    #[inline]
    pub fn component(&self, i: usize) -> &UnitaryMatrix<T> {
        &self.components[i]
    }

    /// Componentwise product `(w_1 u_1, …, w_n u_n)`.
    pub fn left_mul(&self, w: &Self) -> Self {
        Self { components: w.components.iter().zip(&self.components).map(|(a, b)| a.mul(b)).collect() }
    }

    /// Componentwise inverse.
    pub fn inverse(&self) -> Self {
        Self { components: self.components.iter().map(UnitaryMatrix::adjoint).collect() }
    }

    /// Riemannian distance `(Σ ‖log(u_i* v_i)‖_u²)^{1/2}` in the product metric.
    pub fn distance(&self, other: &Self) -> T {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| {
                let log = UnitaryLog::new(&a.adjoint().mul(b));
                log.metric_norm().powi(2)
            })
            .fold(T::zero(), |s, x| s + x)
            .sqrt()
    }

    /// Product-metric norm of the difference, used for finite-difference speeds.
    pub fn chordal_distance(&self, other: &Self) -> T {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| unitary_metric_norm(&a.m.sub(&b.m)).powi(2))
            .fold(T::zero(), |s, x| s + x)
            .sqrt()
    }

    pub fn max_entry_distance(&self, other: &Self) -> T {
        self.components.iter().zip(&other.components).map(|(a, b)| a.m.sub(&b.m).max_abs()).fold(T::zero(), T::max)
    }

    pub fn cast<U: Real>(&self) -> UnitaryTuple<U> {
        UnitaryTuple { components: self.components.iter().map(UnitaryMatrix::cast).collect() }
    }
}

/// Haar-random element of `U(k)`: the Q factor of a complex Gaussian matrix,
/// with the phases of R's diagonal moved into Q.
pub fn sample_unitary<T: Real, R: Rng + ?Sized>(k: usize, rng: &mut R) -> UnitaryMatrix<T> {
    assert!(k >= 1, "unitary group of dimension 0");
    loop {
        let g = CMatrix::from_fn(k, k, |_, _| complex_normal::<T, R>(rng));
        let (q, r) = householder_qr(&g);
        let scale = g.max_abs();
        let floor = T::epsilon() * T::lit(1e3) * scale;
        if (0..k).any(|i| !(r[(i, i)].norm() > floor)) {
            continue;
        }
        let phases: Vec<C<T>> = (0..k).map(|i| r[(i, i)] / r[(i, i)].norm()).collect();
        let m = CMatrix::from_fn(k, k, |i, j| q[(i, j)] * phases[j]);
        return UnitaryMatrix::from_trusted(m);
    }
}

/// `R(l, θ) = I + (e^{iθ} − 1) l l*`
pub fn rank_one_rotation<T: Real>(l: &[C<T>], theta: T) -> Result<UnitaryMatrix<T>> {
    let nrm = vec_norm(l);
    if !((nrm - T::one()).abs() <= T::tol(1e-10)) {
        return Err(Error::NonUnit { norm: nrm.to_f64_lossy() });
    }
    let f = cis(theta) - cone();
    let k = l.len();
    let m = CMatrix::from_fn(k, k, |i, j| {
        let delta: C<T> = if i == j { cone() } else { czero() };
        delta + f * l[i] * l[j].conj()
    });
    Ok(UnitaryMatrix::from_trusted(m))
}

/// `X ← R(l, θ)·X` in `O(k²)`.
fn rotate_left<T: Real>(x: &mut CMatrix<T>, l: &[C<T>], theta: T) {
    let f = cis(theta) - cone();
    for j in 0..x.ncols() {
        let mut s = czero::<T>();
        for (i, li) in l.iter().enumerate() {
            s = s + li.conj() * x[(i, j)];
        }
        if s == czero() {
            continue;
        }
        let s = s * f;
        for (i, li) in l.iter().enumerate() {
            x[(i, j)] = x[(i, j)] + li * s;
        }
    }
}

/// `m = e^{iα} R(l₁, π) ⋯ R(l_n, π) · diag(e^{iφ₀}, …, e^{iφ_{n−1}}, 1)`.
///
/// A product of `n` reflections in `U(n+1)` always fixes a vector, so the
/// reflections alone reach only a thin subset of the group; the trailing
/// diagonal factor, itself a product of rotations `R(e_j, φ_j)`, restores
/// surjectivity.
#[derive(Clone, Debug, PartialEq)]
pub struct HouseholderDecomposition<T> {
    pub alpha: T,
    pub lines: Vec<Vec<C<T>>>,
    pub phases: Vec<T>,
}

impl<T: Real> HouseholderDecomposition<T> {
    /// The factorised matrix with every angle scaled by `s`, so `s = 0` gives
    /// the identity and `s = 1` gives `m`.
    pub fn evaluate(&self, s: T) -> CMatrix<T> {
        let k = self.lines.len() + 1;
        let mut diag: Vec<C<T>> = self.phases.iter().map(|&p| cis(p * s)).collect();
        diag.push(cone());
        let mut x = CMatrix::diagonal(&diag);
        for l in self.lines.iter().rev() {
            rotate_left(&mut x, l, T::PI() * s);
        }
        debug_assert_eq!(x.nrows(), k);
        x.scale(cis(self.alpha * s))
    }

    /// `½(α² + nπ² + Σφ_j²)`, the squared speed scale of one component.
    pub fn tau_sq(&self) -> T {
        let n = T::from_usize_lossy(self.lines.len());
        let phi2 = self.phases.iter().fold(T::zero(), |s, &p| s + p * p);
        (self.alpha * self.alpha + n * T::PI() * T::PI() + phi2) * T::lit(0.5)
    }
}

/// Reduces `m` to a diagonal with `k − 1` reflections whose angle is exactly π.
pub fn householder_phase_decompose<T: Real>(m: &UnitaryMatrix<T>) -> HouseholderDecomposition<T> {
    let k = m.dim();
    let mut x = m.m.clone();
    let mut lines = Vec::with_capacity(k.saturating_sub(1));
    for col in 0..k.saturating_sub(1) {
        let sub: Vec<C<T>> = (col..k).map(|i| x[(i, col)]).collect();
        // a unit column never vanishes; reflecting towards −phase(x_col)·e_col
        // keeps x − ρe away from cancellation even when already aligned
        let phase = if sub[0].norm() > T::zero() { sub[0] / sub[0].norm() } else { cone() };
        let rho = -phase;
        let mut v: Vec<C<T>> = vec![czero(); k];
        for (i, z) in sub.iter().enumerate() {
            v[col + i] = *z;
        }
        v[col] = v[col] - rho;
        let l = crate::scalar::normalized(&v).unwrap_or_else(|| {
            let mut e = vec![czero(); k];
            e[col] = cone();
            e
        });
        rotate_left(&mut x, &l, T::PI());
        lines.push(l);
    }
    let delta: Vec<C<T>> = (0..k).map(|i| x[(i, i)]).collect();
    let alpha = principal_arg(delta[k - 1]);
    let phases = delta[..k - 1].iter().map(|d| wrap_angle(principal_arg(*d) - alpha)).collect();
    HouseholderDecomposition { alpha, lines, phases }
}

/// Spectral logarithm of a unitary matrix: `m = Q diag(e^{iθ}) Q*`, with
/// principal phases `θ_j ∈ (−π, π]`.
#[derive(Clone, Debug)]
pub struct UnitaryLog<T> {
    pub q: CMatrix<T>,
    pub theta: Vec<T>,
}

impl<T: Real> UnitaryLog<T> {
    pub fn new(m: &UnitaryMatrix<T>) -> Self {
        let s = schur(&m.m, true);
        debug_assert!(s.converged, "Schur iteration did not converge on a unitary matrix");
        // phases at rounding level are snapped so that m = I gives A = 0 exactly
        let floor = T::epsilon() * T::lit(64.0);
        let theta = (0..m.dim())
            .map(|i| principal_arg(s.t[(i, i)]))
            .map(|t| if t.abs() <= floor { T::zero() } else { t })
            .collect();
        Self { q: s.q, theta }
    }

    /// The skew-Hermitian generator `A = Q diag(iθ) Q*`.
    pub fn generator(&self) -> CMatrix<T> {
        let d: Vec<C<T>> = self.theta.iter().map(|&t| C::new(T::zero(), t)).collect();
        &(&self.q * &CMatrix::diagonal(&d)) * &self.q.adjoint()
    }

    /// `exp(s·A)`
    pub fn exp_scaled(&self, s: T) -> CMatrix<T> {
        let k = self.theta.len();
        let d: Vec<C<T>> = self.theta.iter().map(|&t| cis(t * s)).collect();
        CMatrix::from_fn(k, k, |i, j| {
            (0..k).fold(czero(), |acc, l| acc + self.q[(i, l)] * d[l] * self.q[(j, l)].conj())
        })
    }

    /// `‖A‖_u = (½ Σ θ_j²)^{1/2}`
    pub fn metric_norm(&self) -> T {
        (self.theta.iter().fold(T::zero(), |s, &t| s + t * t) * T::lit(0.5)).sqrt()
    }
}

/// Skew-Hermitian `A` with `exp(A) = m`, from the principal eigenphases.
pub fn log_unitary<T: Real>(m: &UnitaryMatrix<T>) -> CMatrix<T> {
    UnitaryLog::new(m).generator()
}

/// Matrix exponential of a skew-Hermitian matrix, via the eigendecomposition
/// of the unitary `exp` it is known to produce: `A = iH`, `H` Hermitian.
pub fn exp_skew_hermitian<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    // H = −iA is Hermitian, hence normal; its Schur form is diagonal
    let h = a.scale(C::new(T::zero(), -T::one()));
    let s = schur(&h, true);
    let k = a.nrows();
    let d: Vec<C<T>> = (0..k).map(|i| cis(s.t[(i, i)].re)).collect();
    &(&s.q * &CMatrix::diagonal(&d)) * &s.q.adjoint()
}

/// Which rigid continuation path to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PathKind {
    #[default]
    Geodesic,
    Householder,
}

impl std::fmt::Display for PathKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PathKind::Geodesic => "geodesic",
            PathKind::Householder => "householder",
        })
    }
}

impl std::str::FromStr for PathKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "geodesic" => Ok(PathKind::Geodesic),
            "householder" => Ok(PathKind::Householder),
            other => Err(format!("unknown path kind `{other}`")),
        }
    }
}

#[derive(Clone, Debug)]
enum Generator<T> {
    Geodesic(UnitaryLog<T>),
    Householder(HouseholderDecomposition<T>),
}

/// Grid size and step of the finite-difference speed probe.
const SPEED_GRID: usize = 64;
const SPEED_STEP: f64 = 1e-6;

/// A path `t ↦ w_t` from `v` (at `t = 0`) to `u` (at `t = T`).
///
/// Only `m_i = v_i⁻¹ u_i` enters the generators, so the path from
/// `(w·v, w·u)` is `w` times the path from `(v, u)`.
#[derive(Clone, Debug)]
pub struct ContinuationPath<T> {
    kind: PathKind,
    base: UnitaryTuple<T>,
    generators: Vec<Generator<T>>,
    speeds: Vec<T>,
    length: T,
    speed_bound: T,
}

impl<T: Real> ContinuationPath<T> {
    #[inline]
    pub fn kind(&self) -> PathKind {
        self.kind
    }

    #[inline]
    pub fn base(&self) -> &UnitaryTuple<T> {
        &self.base
    }

    /// Total length `T`.
    #[inline]
    pub fn length(&self) -> T {
        self.length
    }

    /// Per-component speed scales `τ_i`.
    pub fn component_speeds(&self) -> &[T] {
        &self.speeds
    }

    /// Upper bound on the speed: 1 for geodesics, the measured maximum
    /// (at least 1) for Householder paths.
    #[inline]
    pub fn speed_bound(&self) -> T {
        self.speed_bound
    }

    /// The skew-Hermitian generators `A_i` of a geodesic path.
    pub fn generators(&self) -> Option<Vec<CMatrix<T>>> {
        self.generators
            .iter()
            .map(|g| match g {
                Generator::Geodesic(log) => Some(log.generator()),
                Generator::Householder(_) => None,
            })
            .collect()
    }

    /// `w_t`, for `0 ≤ t ≤ T`.
    pub fn evaluate(&self, t: T) -> Result<UnitaryTuple<T>> {
        let slack = T::epsilon() * T::lit(16.0) * self.length.max(T::one());
        if !(t >= -slack && t <= self.length + slack) {
            return Err(Error::OutOfRange { t: t.to_f64_lossy(), length: self.length.to_f64_lossy() });
        }
        Ok(self.evaluate_unchecked(t))
    }

    fn evaluate_unchecked(&self, t: T) -> UnitaryTuple<T> {
        let s = if self.length > T::zero() { (t / self.length).max(T::zero()).min(T::one()) } else { T::zero() };
        let components = self
            .base
            .components
            .iter()
            .zip(&self.generators)
            .map(|(v, g)| {
                let step = match g {
                    Generator::Geodesic(log) => log.exp_scaled(s),
                    Generator::Householder(h) => h.evaluate(s),
                };
                UnitaryMatrix::from_trusted(&v.m * &step)
            })
            .collect();
        UnitaryTuple { components }
    }

    /// Largest finite-difference speed over a uniform grid of the parameter.
    pub fn measured_speed(&self) -> T {
        if self.length == T::zero() {
            return T::zero();
        }
        let h = T::lit(SPEED_STEP);
        (0..SPEED_GRID)
            .map(|j| {
                let t = self.length * T::from_usize_lossy(j) / T::from_usize_lossy(SPEED_GRID);
                let (a, b) = if t + h <= self.length { (t, t + h) } else { (t - h, t) };
                self.evaluate_unchecked(a).chordal_distance(&self.evaluate_unchecked(b)) / h
            })
            .fold(T::zero(), T::max)
    }
}

/// Builds the rigid path from `v` to `u`.
pub fn build_path<T: Real>(v: &UnitaryTuple<T>, u: &UnitaryTuple<T>, kind: PathKind) -> Result<ContinuationPath<T>> {
    if v.n() != u.n() {
        return Err(Error::DimensionMismatch { expected: v.n(), got: u.n() });
    }
    let n = v.n();
    let mut generators = Vec::with_capacity(n);
    let mut speeds = Vec::with_capacity(n);
    for (vi, ui) in v.components.iter().zip(&u.components) {
        let m = vi.adjoint().mul(ui);
        match kind {
            PathKind::Geodesic => {
                let log = UnitaryLog::new(&m);
                speeds.push(log.metric_norm());
                generators.push(Generator::Geodesic(log));
            }
            PathKind::Householder => {
                let h = householder_phase_decompose(&m);
                speeds.push(h.tau_sq().sqrt());
                generators.push(Generator::Householder(h));
            }
        }
    }
    let length = speeds.iter().fold(T::zero(), |s, &x| s + x * x).sqrt();
    let bound = T::from_usize_lossy(4 * n);
    assert!(length <= bound * (T::one() + T::tol(1e-12)), "path length {length} exceeds 4n = {bound}");
    let mut path = ContinuationPath { kind, base: v.clone(), generators, speeds, length, speed_bound: T::one() };
    if kind == PathKind::Householder {
        path.speed_bound = path.measured_speed().max(T::one());
    }
    Ok(path)
}

/// `r`-th largest singular value of an `r × c` matrix with `r ≤ c`.
pub fn min_singular_value<T: Real>(m: &CMatrix<T>) -> T {
    debug_assert!(m.nrows() <= m.ncols(), "expected a wide matrix");
    singular_values(m).last().copied().unwrap_or(T::zero())
}

/// The unitary sending `from[j]` to `to[j]` for every `j`.
pub fn frame_unitary<T: Real>(from: &[Vec<C<T>>], to: &[Vec<C<T>>]) -> Result<UnitaryMatrix<T>> {
    if from.len() != to.len() {
        return Err(Error::DimensionMismatch { expected: from.len(), got: to.len() });
    }
    let a = CMatrix::from_columns(from);
    let b = CMatrix::from_columns(to);
    if a.nrows() != a.ncols() || b.nrows() != b.ncols() {
        return Err(Error::DimensionMismatch { expected: a.ncols(), got: a.nrows() });
    }
    let defect = a.unitarity_defect().max(b.unitarity_defect());
    if !(defect <= T::tol(1e-10)) {
        return Err(Error::NonOrthonormal { defect: defect.to_f64_lossy() });
    }
    Ok(UnitaryMatrix::from_trusted(&b * &a.adjoint()))
}
