//! Projective points, the projective Newton operator of a rotated system,
//! roots of binary forms, and a contraction-based certificate.

use crate::error::{Error, Result};
use crate::hpoly::{HomogeneousPoly, PolySystem};
use crate::linalg::{eigenvalues, lu_solve, CMatrix};
use crate::scalar::{cone, czero, fubini_study, normalized, vec_norm, Real, C};
use crate::unitary::UnitaryTuple;

/// Unit-norm representative of a point of `Pⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivePoint<T> {
    rep: Vec<C<T>>,
}

impl<T: Real> ProjectivePoint<T> {
    /// Normalizes `v`; fails on a zero vector.
    pub fn new(v: Vec<C<T>>) -> Result<Self> {
        normalized(&v).map(|rep| Self { rep }).ok_or(Error::NonUnit { norm: 0.0 })
    }

    /// Coordinate point `e_k` in `C^{dim}`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut rep = vec![czero(); dim];
        rep[k] = cone();
        Self { rep }
    }

    #[inline]
    pub fn rep(&self) -> &[C<T>] {
        &self.rep
    }

    pub fn into_rep(self) -> Vec<C<T>> {
        self.rep
    }

    /// `n + 1`
    #[inline]
    pub fn dim(&self) -> usize {
        self.rep.len()
    }

    /// Fubini–Study distance.
    pub fn distance(&self, other: &Self) -> T {
        fubini_study(&self.rep, &other.rep)
    }

    pub fn scale(&self, lambda: C<T>) -> Result<Self> {
        Self::new(self.rep.iter().map(|z| z * lambda).collect())
    }

    pub fn cast<U: Real>(&self) -> ProjectivePoint<U> {
        ProjectivePoint {
            rep: self.rep.iter().map(|z| C::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy()))).collect(),
        }
    }
}

fn check_shapes<T: Real>(f: &PolySystem<T>, u: &UnitaryTuple<T>, z: &ProjectivePoint<T>) -> Result<()> {
    if u.n() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), got: u.n() });
    }
    if z.dim() != f.n() + 1 {
        return Err(Error::DimensionMismatch { expected: f.n() + 1, got: z.dim() });
    }
    Ok(())
}

/// Relative residuals `|f_i(u_i* z)| / ‖f_i‖_W`.
pub fn residuals<T: Real>(f: &PolySystem<T>, u: &UnitaryTuple<T>, z: &ProjectivePoint<T>) -> Result<Vec<T>> {
    check_shapes(f, u, z)?;
    f.polys()
        .iter()
        .zip(u.components())
        .map(|(fi, ui)| Ok(fi.evaluate(&ui.apply_adjoint(z.rep()))?.norm() / fi.weyl_norm()))
        .collect()
}

/// Smallest admissible reciprocal condition of the bordered Newton system.
pub const NEWTON_RCOND_FLOOR: f64 = 1e-14;

/// Solution `δ ∈ z⊥` of the bordered Newton system of `u·F` at `z`, and its
/// reciprocal condition estimate.
pub fn newton_correction<T: Real>(
    f: &PolySystem<T>,
    u: &UnitaryTuple<T>,
    z: &ProjectivePoint<T>,
) -> Result<(Vec<C<T>>, T)> {
    check_shapes(f, u, z)?;
    let n = f.n();
    let mut a = CMatrix::zeros(n + 1, n + 1);
    let mut rhs = vec![czero(); n + 1];
    for (i, (fi, ui)) in f.polys().iter().zip(u.components()).enumerate() {
        let y = ui.apply_adjoint(z.rep());
        let value = fi.evaluate(&y)?;
        let grad = fi.gradient(&y)?;
        // d_z(f_i ∘ u_i*) = grad · u_i*; rows are scaled to unit norm, which
        // leaves the correction unchanged
        let row = ui.matrix().mul_vec(&grad.iter().map(|g| g.conj()).collect::<Vec<_>>());
        let nrm = vec_norm(&row);
        let scale = if nrm > T::zero() { T::one() / nrm } else { T::one() };
        for (j, r) in row.iter().enumerate() {
            a[(i, j)] = r.conj() * scale;
        }
        rhs[i] = value * scale;
    }
    for (j, zj) in z.rep().iter().enumerate() {
        a[(n, j)] = zj.conj();
    }
    let sol = lu_solve(&a, &rhs).ok_or(Error::SingularNewton { rcond: 0.0 })?;
    if !(sol.rcond >= T::lit(NEWTON_RCOND_FLOOR)) || sol.x.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::SingularNewton { rcond: sol.rcond.to_f64_lossy() });
    }
    Ok((sol.x, sol.rcond))
}

/// One projective Newton step for `u·F = (f_1 ∘ u_1*, …, f_n ∘ u_n*)`.
pub fn newton_step<T: Real>(
    f: &PolySystem<T>,
    u: &UnitaryTuple<T>,
    z: &ProjectivePoint<T>,
) -> Result<ProjectivePoint<T>> {
    let (delta, _) = newton_correction(f, u, z)?;
    ProjectivePoint::new(z.rep().iter().zip(&delta).map(|(a, b)| a - b).collect())
}

/// Roots of a binary form on `P¹`, with multiplicity.
#[derive(Clone, Debug)]
pub struct BivariateRoots<T> {
    pub roots: Vec<ProjectivePoint<T>>,
    /// Set when two roots coincide numerically or `[0:1]` is a multiple root.
    pub has_multiple: bool,
}

/// Distance below which two refined roots count as one repeated root.
const MULTIPLE_ROOT_SEPARATION: f64 = 1e-6;
const POLISH_STEP_FLOOR: f64 = 1e-14;
const POLISH_MAX_ITERS: usize = 60;

/// All `d` roots of `g(s, t) = Σ_k c_k s^{d−k} t^k`.
///
/// Finite roots `[1 : t]` come from the companion matrix of `g(1, t)`; a
/// drop of the `t`-degree by `k` contributes `k` copies of `[0 : 1]`. Every
/// root is then polished by Newton's method in whichever affine chart has
/// the larger coordinate.
pub fn bivariate_roots<T: Real>(g: &HomogeneousPoly<T>) -> Result<BivariateRoots<T>> {
    if g.n_vars() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: g.n_vars() });
    }
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let d = g.degree();
    let c = g.coeffs();
    let m = (0..=d).rev().find(|&k| c[k] != czero()).unwrap_or(0);
    let mut roots = Vec::with_capacity(d);
    if m > 0 {
        let lead = c[m];
        let comp = CMatrix::from_fn(m, m, |i, j| {
            if i == 0 {
                -c[m - 1 - j] / lead
            } else if i == j + 1 {
                cone()
            } else {
                czero()
            }
        });
        let (ev, _) = eigenvalues(&comp);
        for t in ev {
            let p = polish(g, [cone(), t]);
            roots.push(ProjectivePoint::new(p.to_vec())?);
        }
    }
    for _ in m..d {
        roots.push(ProjectivePoint::basis(2, 1));
    }
    let sep = T::tol(MULTIPLE_ROOT_SEPARATION);
    let mut has_multiple = d - m >= 2;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if roots[i].distance(&roots[j]) < sep {
                has_multiple = true;
            }
        }
    }
    Ok(BivariateRoots { roots, has_multiple })
}

/// Newton refinement in an affine chart of `P¹`; keeps the iterate with the
/// smallest residual.
fn polish<T: Real>(g: &HomogeneousPoly<T>, start: [C<T>; 2]) -> [C<T>; 2] {
    let d = g.degree();
    let c = g.coeffs();
    // chart s = 1 evaluates Σ c_k x^k, chart t = 1 evaluates Σ c_k x^{d−k}
    let eval = |x: C<T>, flip: bool| -> (C<T>, C<T>) {
        let mut p = czero();
        let mut dp = czero();
        for k in (0..=d).rev() {
            let coeff = if flip { c[d - k] } else { c[k] };
            dp = dp * x + p;
            p = p * x + coeff;
        }
        (p, dp)
    };
    let to_point = |x: C<T>, flip: bool| -> [C<T>; 2] {
        if flip {
            [x, cone()]
        } else {
            [cone(), x]
        }
    };
    let flip = start[1].norm() > start[0].norm();
    let mut x = if flip { start[0] / start[1] } else { start[1] / start[0] };
    if !(x.re.is_finite() && x.im.is_finite()) {
        return start;
    }
    let mut best = (eval(x, flip).0.norm(), x);
    let floor = T::tol(POLISH_STEP_FLOOR);
    for _ in 0..POLISH_MAX_ITERS {
        let (p, dp) = eval(x, flip);
        if dp == czero() || p == czero() {
            break;
        }
        let nx = x - p / dp;
        if !(nx.re.is_finite() && nx.im.is_finite()) {
            break;
        }
        let step = fubini_study(&to_point(x, flip), &to_point(nx, flip));
        x = nx;
        let r = eval(x, flip).0.norm();
        if r < best.0 {
            best = (r, x);
        }
        if step < floor {
            break;
        }
    }
    to_point(best.1, flip)
}

/// Outcome of [`certify_by_contraction`].
#[derive(Clone, Debug)]
pub struct CertificateResult<T> {
    pub certified: bool,
    /// `d_P(z_{k+1}, z_{k+2}) / d_P(z_k, z_{k+1})`, for steps above the floor.
    pub contraction_ratios: Vec<T>,
    /// Distances between consecutive iterates.
    pub step_distances: Vec<T>,
    /// `|f_i(u_i* z)| / ‖f_i‖_W` at the last iterate.
    pub final_residuals: Vec<T>,
    /// Last Newton iterate.
    pub refined: ProjectivePoint<T>,
}

/// Number of extra Newton steps used by default.
pub const CERTIFY_EXTRA_STEPS: usize = 3;
/// Step size below which contraction is no longer measurable.
pub const CONTRACTION_FLOOR: f64 = 1e-14;
/// Largest admissible ratio between consecutive Newton steps.
pub const CONTRACTION_RATIO: f64 = 0.5 + 1e-6;

/// Checks that Newton steps from `z` for `u·F` at least halve each time
/// (until they reach rounding level) and that the final residual is below
/// `tol`.
pub fn certify_by_contraction<T: Real>(
    f: &PolySystem<T>,
    u: &UnitaryTuple<T>,
    z: &ProjectivePoint<T>,
    extra_steps: usize,
    tol: T,
) -> Result<CertificateResult<T>> {
    check_shapes(f, u, z)?;
    let floor = T::tol(CONTRACTION_FLOOR);
    let ratio_max = T::lit(CONTRACTION_RATIO);
    let mut cur = z.clone();
    let mut dists = Vec::with_capacity(extra_steps);
    let mut newton_ok = true;
    for _ in 0..extra_steps {
        match newton_step(f, u, &cur) {
            Ok(next) => {
                dists.push(cur.distance(&next));
                cur = next;
            }
            Err(_) => {
                newton_ok = false;
                break;
            }
        }
    }
    let mut ratios = Vec::new();
    let mut contracting = newton_ok;
    for w in dists.windows(2) {
        if w[1] <= floor {
            continue;
        }
        let r = if w[0] > T::zero() { w[1] / w[0] } else { T::infinity() };
        ratios.push(r);
        if !(r <= ratio_max) {
            contracting = false;
        }
    }
    let final_residuals = residuals(f, u, &cur)?;
    let small = final_residuals.iter().all(|r| *r <= tol);
    Ok(CertificateResult {
        certified: contracting && small,
        contraction_ratios: ratios,
        step_distances: dists,
        final_residuals,
        refined: cur,
    })
}
