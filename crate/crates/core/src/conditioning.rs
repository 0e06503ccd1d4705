//! Condition numbers of a rotated system at a point: the unit-row
//! linearization `L`, `κ = 1/σ_min(L)`, the Frobenius gamma of each equation
//! and the split number `ĥγ_Frob = κ·(Σ γ_i²)^{1/2}`.

use crate::error::{Error, Result};
use crate::hpoly::{HomogeneousPoly, PolySystem};
use crate::linalg::CMatrix;
use crate::scalar::{vec_norm, Real, C};
use crate::unitary::{min_singular_value, UnitaryTuple};
use crate::zeros::ProjectivePoint;

/// Unit-row matrix of the normalized differentials `d_z(f_i ∘ u_i*)`.
#[derive(Clone, Debug)]
pub struct LinearizationMatrix<T> {
    /// `n × (n+1)`; row `i` is a covector acting without conjugation.
    pub rows: CMatrix<T>,
    /// Norms of the differentials before normalization.
    pub row_norms: Vec<T>,
    /// Set when some differential vanishes.
    pub degenerate: bool,
}

/// Gradient norms below this count as zero.
fn vanishing<T: Real>() -> T {
    T::lit(1e-300).max(T::min_positive_value())
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

/// `grad · u*`, the differential of `f ∘ u*` at `z` given the gradient of `f`
/// at `u* z`.
fn rotate_covector<T: Real>(grad: &[C<T>], u: &crate::unitary::UnitaryMatrix<T>) -> Vec<C<T>> {
    // (grad · u*)_j = Σ_k grad_k conj(u_jk)
    let m = u.matrix();
    (0..m.nrows())
        .map(|j| m.row(j).iter().zip(grad).fold(C::new(T::zero(), T::zero()), |acc, (a, g)| acc + a.conj() * g))
        .collect()
}

fn assemble<T: Real>(raw_rows: Vec<Vec<C<T>>>) -> LinearizationMatrix<T> {
    let n = raw_rows.len();
    let cols = raw_rows.first().map_or(0, Vec::len);
    let mut rows = CMatrix::zeros(n, cols);
    let mut row_norms = Vec::with_capacity(n);
    let mut degenerate = false;
    for (i, r) in raw_rows.iter().enumerate() {
        let nrm = vec_norm(r);
        row_norms.push(nrm);
        if !(nrm > vanishing()) || !nrm.is_finite() {
            degenerate = true;
            continue;
        }
        for (j, x) in r.iter().enumerate() {
            rows[(i, j)] = x / nrm;
        }
    }
    LinearizationMatrix { rows, row_norms, degenerate }
}

/// `L(𝐮·F, z)`.
pub fn linearization<T: Real>(
    f: &PolySystem<T>,
    u: &UnitaryTuple<T>,
    z: &ProjectivePoint<T>,
) -> Result<LinearizationMatrix<T>> {
    check_shapes(f, u, z)?;
    let raw = f
        .polys()
        .iter()
        .zip(u.components())
        .map(|(fi, ui)| Ok(rotate_covector(&fi.gradient(&ui.apply_adjoint(z.rep()))?, ui)))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(raw))
}

/// `1/σ_min(L)`, or `+∞` for degenerate or rank-deficient `L`.
pub fn kappa_of<T: Real>(l: &LinearizationMatrix<T>) -> T {
    if l.degenerate {
        return T::infinity();
    }
    let s = min_singular_value(&l.rows);
    if s > T::zero() {
        T::one() / s
    } else {
        T::infinity()
    }
}

/// Incidence condition number `κ(𝐮·F, z)`.
pub fn kappa<T: Real>(f: &PolySystem<T>, u: &UnitaryTuple<T>, z: &ProjectivePoint<T>) -> Result<T> {
    Ok(kappa_of(&linearization(f, u, z)?))
}

/// `max_{2≤k≤d} (‖g_k‖_W / ‖g_1‖)^{1/(k−1)}` from the Taylor components of
/// `f(z + x)`; `+∞` if the gradient vanishes, 0 for linear `f`.
pub fn gamma_from_shift<T: Real>(shift: &[HomogeneousPoly<T>]) -> T {
    let d = shift.len() - 1;
    if d < 2 {
        return T::zero();
    }
    let g1 = vec_norm(shift[1].coeffs());
    if !(g1 > vanishing()) {
        return T::infinity();
    }
    (2..=d).map(|k| (shift[k].weyl_norm() / g1).powf(T::one() / T::from_usize_lossy(k - 1))).fold(T::zero(), T::max)
}

/// Frobenius gamma `γ_Frob(f, z)`.
pub fn gamma_frob<T: Real>(f: &HomogeneousPoly<T>, z: &ProjectivePoint<T>) -> Result<T> {
    Ok(gamma_from_shift(&f.taylor_shift(z.rep())?))
}

/// Everything the tracker needs at one point of the path.
#[derive(Clone, Debug)]
pub struct ConditionReport<T> {
    pub kappa: T,
    /// `γ_Frob(f_i, u_i* z)`
    pub gamma_frob_per_eq: Vec<T>,
    pub hat_gamma_frob: T,
    /// The continuation's `g`; equal to `hat_gamma_frob`.
    pub g_value: T,
    pub linearization: LinearizationMatrix<T>,
}

/// `ĥγ_Frob(𝐮·F, z)`, computed from one Taylor shift per equation: the
/// shift yields both the gradient (for `L`) and the higher components.
pub fn hat_gamma_frob<T: Real>(
    f: &PolySystem<T>,
    u: &UnitaryTuple<T>,
    z: &ProjectivePoint<T>,
) -> Result<ConditionReport<T>> {
    check_shapes(f, u, z)?;
    let mut gammas = Vec::with_capacity(f.n());
    let mut raw = Vec::with_capacity(f.n());
    for (fi, ui) in f.polys().iter().zip(u.components()) {
        let shift = fi.taylor_shift(&ui.apply_adjoint(z.rep()))?;
        gammas.push(gamma_from_shift(&shift));
        raw.push(rotate_covector(shift[1].coeffs(), ui));
    }
    let lin = assemble(raw);
    let kappa = kappa_of(&lin);
    let rss = gammas.iter().fold(T::zero(), |s, &g| s + g * g).sqrt();
    let hat = if kappa.is_infinite() || rss.is_infinite() { T::infinity() } else { kappa * rss };
    Ok(ConditionReport { kappa, gamma_frob_per_eq: gammas, hat_gamma_frob: hat, g_value: hat, linearization: lin })
}

/// Materializes `𝐮·F = (f_1 ∘ u_1*, …, f_n ∘ u_n*)` coefficientwise.
pub fn rotated_system<T: Real>(f: &PolySystem<T>, u: &UnitaryTuple<T>) -> Result<PolySystem<T>> {
    if u.n() != f.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), got: u.n() });
    }
    let polys = f
        .polys()
        .iter()
        .zip(u.components())
        .map(|(fi, ui)| fi.compose_linear(ui.adjoint().matrix()))
        .collect::<Result<Vec<_>>>()?;
    PolySystem::new(polys)
}
