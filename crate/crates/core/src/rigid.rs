//! Start-pair sampling on the rigid solution variety, numerical continuation
//! along a rigid path, and the resulting solver.

use rand::Rng;
use rayon::prelude::*;

use crate::conditioning::hat_gamma_frob;
use crate::error::{Error, Result};
use crate::hpoly::PolySystem;
use crate::linalg::{householder_qr, orthogonal_complement, CMatrix};
use crate::rng::{stream, trial_rng};
use crate::scalar::{cis, complex_normal, inner, normalized, Real, C};
use crate::unitary::{build_path, frame_unitary, sample_unitary, PathKind, UnitaryMatrix, UnitaryTuple};
use crate::zeros::{
    bivariate_roots, certify_by_contraction, newton_step, residuals, CertificateResult, ProjectivePoint,
};

/// A point `(𝐮, ζ)` of the rigid solution variety: `f_i(u_i* ζ) = 0` for all `i`.
#[derive(Clone, Debug)]
pub struct RigidPair<T> {
    pub u: UnitaryTuple<T>,
    pub zeta: ProjectivePoint<T>,
    /// `|f_i(u_i* ζ)| / ‖f_i‖_W`
    pub residuals: Vec<T>,
}

/// Attempts per equation before sampling gives up.
pub const SAMPLE_RETRIES: usize = 16;
/// Largest relative residual accepted for a sampled pair.
pub const SAMPLE_RESIDUAL_TOL: f64 = 1e-10;

/// Samples `(𝐮, ζ)` with `𝐮` Haar-distributed and `ζ` a uniform zero of `𝐮·F`.
///
/// `ζ` is the common zero of `n` random hyperplanes `ker λ_i`. For each
/// equation a uniform point `y_i` of the hypersurface `f_i = 0` is drawn by
/// intersecting it with a Haar-random line; `u_i` then maps `y_i` to `ζ`
/// and the tangent space at `y_i` onto `ker λ_i`, composed with a uniform
/// element of the stabilizer of that flag.
pub fn sample_solution_variety<T: Real, R: Rng + ?Sized>(f: &PolySystem<T>, rng: &mut R) -> Result<RigidPair<T>> {
    let n = f.n();
    let dim = n + 1;
    let (zeta, normals) = sample_hyperplanes::<T, R>(n, rng)?;
    let mut components = Vec::with_capacity(n);
    let tol = T::tol(SAMPLE_RESIDUAL_TOL);
    for (fi, nu) in f.polys().iter().zip(&normals) {
        let mut accepted = None;
        for _ in 0..SAMPLE_RETRIES {
            let Some(y) = sample_hypersurface_point(fi, rng)? else { continue };
            let grad = fi.gradient(&y)?;
            let Some(ny) = normalized(&grad.iter().map(|g| g.conj()).collect::<Vec<_>>()) else { continue };
            // remove the rounding-level component along y
            let proj = inner(&ny, &y);
            let Some(ny) = normalized(&ny.iter().zip(&y).map(|(a, b)| a - proj * b).collect::<Vec<_>>()) else {
                continue;
            };
            let from = adapted_frame(&y, &ny, dim);
            let to = adapted_frame(zeta.rep(), nu, dim);
            let v = frame_unitary(&from, &to)?;
            let w = stabilizer_element(&to, rng);
            let u = w.mul(&v);
            let res = fi.evaluate(&u.apply_adjoint(zeta.rep()))?.norm() / fi.weyl_norm();
            if res <= tol {
                accepted = Some(u);
                break;
            }
        }
        components.push(
            accepted
                .ok_or_else(|| Error::Sampling(format!("no simple zero found on {SAMPLE_RETRIES} random lines")))?,
        );
    }
    let u = UnitaryTuple::new(components)?;
    let residuals = residuals(f, &u, &zeta)?;
    Ok(RigidPair { u, zeta, residuals })
}

/// A point together with unit normals of hyperplanes through it.
type PointAndNormals<T> = (ProjectivePoint<T>, Vec<Vec<C<T>>>);

/// Random hyperplanes `ker λ_i` and their common zero, with a random phase.
/// Returns the unit normals `conj(λ_i)/‖λ_i‖`.
fn sample_hyperplanes<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PointAndNormals<T>> {
    let dim = n + 1;
    for _ in 0..SAMPLE_RETRIES {
        let lambdas: Vec<Vec<C<T>>> = (0..n).map(|_| (0..dim).map(|_| complex_normal::<T, R>(rng)).collect()).collect();
        // the last column of the full Q of Λ* spans ker Λ
        let lstar = CMatrix::from_fn(dim, n, |i, j| lambdas[j][i].conj());
        let (q, r) = householder_qr(&lstar);
        let scale = lstar.max_abs();
        if (0..n).any(|i| !(r[(i, i)].norm() > T::epsilon() * T::lit(1e3) * scale)) {
            continue;
        }
        let phase = cis(T::lit(rng.random_range(0.0..std::f64::consts::TAU)));
        let zeta = ProjectivePoint::new(q.column(n).iter().map(|z| z * phase).collect())?;
        let normals = lambdas
            .iter()
            .map(|l| normalized(&l.iter().map(|z| z.conj()).collect::<Vec<_>>()))
            .collect::<Option<Vec<_>>>();
        if let Some(normals) = normals {
            return Ok((zeta, normals));
        }
    }
    Err(Error::Sampling("random hyperplanes kept failing to meet in a point".into()))
}

/// A uniform zero of `f` on a Haar-random line, or `None` when the
/// restriction has a repeated root.
pub fn sample_hypersurface_point<T: Real, R: Rng + ?Sized>(
    f: &crate::hpoly::HomogeneousPoly<T>,
    rng: &mut R,
) -> Result<Option<Vec<C<T>>>> {
    let dim = f.n_vars();
    let frame: UnitaryMatrix<T> = sample_unitary(dim, rng);
    let p = frame.matrix().column(0);
    let q = frame.matrix().column(1);
    let g = f.restrict_to_line(&p, &q)?;
    if g.is_zero() {
        return Ok(None);
    }
    let roots = bivariate_roots(&g)?;
    if roots.has_multiple {
        return Ok(None);
    }
    let pick = rng.random_range(0..roots.roots.len());
    let st = roots.roots[pick].rep();
    Ok(Some(p.iter().zip(&q).map(|(a, b)| st[0] * a + st[1] * b).collect()))
}

/// `[x, orthonormal basis of {x, normal}⊥, normal]`
fn adapted_frame<T: Real>(x: &[C<T>], normal: &[C<T>], dim: usize) -> Vec<Vec<C<T>>> {
    let mut frame = Vec::with_capacity(dim);
    frame.push(x.to_vec());
    frame.extend(orthogonal_complement(&[x.to_vec(), normal.to_vec()], dim));
    frame.push(normal.to_vec());
    frame
}

/// Uniform element of `U(1) × U(dim − 2) × U(1)` acting in the given frame.
fn stabilizer_element<T: Real, R: Rng + ?Sized>(frame: &[Vec<C<T>>], rng: &mut R) -> UnitaryMatrix<T> {
    let dim = frame.len();
    let tau = std::f64::consts::TAU;
    let mut block = CMatrix::zeros(dim, dim);
    block[(0, 0)] = cis(T::lit(rng.random_range(0.0..tau)));
    if dim > 2 {
        let mid: UnitaryMatrix<T> = sample_unitary(dim - 2, rng);
        for i in 0..dim - 2 {
            for j in 0..dim - 2 {
                block[(i + 1, j + 1)] = mid.matrix()[(i, j)];
            }
        }
    }
    block[(dim - 1, dim - 1)] = cis(T::lit(rng.random_range(0.0..tau)));
    let fm = CMatrix::from_columns(frame);
    UnitaryMatrix::from_trusted(&(&fm * &block) * &fm.adjoint())
}

/// Parameters of the continuation.
#[derive(Clone, Debug)]
pub struct TrackerSettings<T> {
    /// Lipschitz constant `C` of `1/g`; at least 10.
    pub lipschitz_c: T,
    /// Extra step divisor `M ≥ 1`; the path's own speed bound is applied on top.
    pub relaxation_m: T,
    pub max_steps: u64,
    pub path_kind: PathKind,
    /// Floor on `g` for linear systems, whose `ĥγ_Frob` vanishes.
    pub linear_g_floor: T,
    /// Relative residual accepted by the final certificate.
    pub certify_tol: T,
    pub record_trace: bool,
}

impl<T: Real> Default for TrackerSettings<T> {
    fn default() -> Self {
        Self {
            lipschitz_c: T::lit(15.0),
            relaxation_m: T::one(),
            max_steps: 10_000_000,
            path_kind: PathKind::Geodesic,
            linear_g_floor: T::lit(1e-3),
            certify_tol: T::lit(1e-8),
            record_trace: false,
        }
    }
}

impl<T: Real> TrackerSettings<T> {
    /// `16·C`
    pub fn step_denominator(&self) -> T {
        T::lit(16.0) * self.lipschitz_c
    }

    /// `A = 1/(4C)`
    pub fn tracking_radius(&self) -> T {
        T::one() / (T::lit(4.0) * self.lipschitz_c)
    }
}

/// How a continuation ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    StepUnderflow,
    MaxStepsExceeded,
    NewtonFailure,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Success => "success",
            Outcome::StepUnderflow => "step_underflow",
            Outcome::MaxStepsExceeded => "max_steps_exceeded",
            Outcome::NewtonFailure => "newton_failure",
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One accepted step: the point after the Newton update at `w_t` and the
/// condition numbers there.
#[derive(Clone, Debug)]
pub struct TraceSample<T> {
    pub t: T,
    pub kappa: T,
    pub g: T,
    pub z: ProjectivePoint<T>,
    pub w: UnitaryTuple<T>,
}

#[derive(Clone, Debug)]
pub struct ContinuationStats<T> {
    /// Number of Newton updates.
    pub steps_k: u64,
    pub path_length_t: T,
    /// Step divisor actually used, `max(M, path speed bound)`.
    pub relaxation_m: T,
    pub kappa_g_trace: Option<Vec<TraceSample<T>>>,
    pub outcome: Outcome,
}

/// Follows the zero `z` of `v·F` along the rigid path from `v` to `u`.
///
/// Each iteration applies one Newton step for `w_t·F` and advances `t` by
/// `1/(16·C·M·κ·g)` evaluated at the new point.
pub fn numerical_continuation<T: Real>(
    f: &PolySystem<T>,
    u_target: &UnitaryTuple<T>,
    v_start: &UnitaryTuple<T>,
    z: &ProjectivePoint<T>,
    settings: &TrackerSettings<T>,
) -> Result<(ProjectivePoint<T>, ContinuationStats<T>)> {
    if z.dim() != f.n() + 1 {
        return Err(Error::DimensionMismatch { expected: f.n() + 1, got: z.dim() });
    }
    let path = build_path(v_start, u_target, settings.path_kind)?;
    let length = path.length();
    let m = settings.relaxation_m.max(path.speed_bound()).max(T::one());
    let denom = settings.step_denominator() * m;
    let linear = f.max_degree() == 1;
    let underflow = T::lit(1e-16) * length;
    let step_at = |w: &UnitaryTuple<T>, z: &ProjectivePoint<T>| -> Result<(T, T, T)> {
        let rep = hat_gamma_frob(f, w, z)?;
        let g = if linear { rep.g_value.max(settings.linear_g_floor) } else { rep.g_value };
        Ok((T::one() / (denom * rep.kappa * g), rep.kappa, g))
    };
    let mut stats = ContinuationStats {
        steps_k: 0,
        path_length_t: length,
        relaxation_m: m,
        kappa_g_trace: settings.record_trace.then(Vec::new),
        outcome: Outcome::Success,
    };
    let mut z = z.clone();
    let (mut t, _, _) = step_at(&path.evaluate(T::zero())?, &z)?;
    if !(t > T::zero()) || !t.is_finite() {
        stats.outcome = Outcome::StepUnderflow;
        return Ok((z, stats));
    }
    while t < length {
        if stats.steps_k >= settings.max_steps {
            stats.outcome = Outcome::MaxStepsExceeded;
            return Ok((z, stats));
        }
        let w = path.evaluate(t)?;
        z = match newton_step(f, &w, &z) {
            Ok(next) => next,
            Err(_) => {
                stats.outcome = Outcome::NewtonFailure;
                return Ok((z, stats));
            }
        };
        stats.steps_k += 1;
        let (step, kappa, g) = step_at(&w, &z)?;
        if let Some(trace) = stats.kappa_g_trace.as_mut() {
            trace.push(TraceSample { t, kappa, g, z: z.clone(), w: w.clone() });
        }
        if !(step > underflow) || !step.is_finite() {
            stats.outcome = Outcome::StepUnderflow;
            return Ok((z, stats));
        }
        t = t + step;
    }
    Ok((z, stats))
}

/// Result of [`solve`].
#[derive(Clone, Debug)]
pub struct SolveOutput<T> {
    pub zero: ProjectivePoint<T>,
    pub stats: ContinuationStats<T>,
    pub start: RigidPair<T>,
    /// Certificate against `u·F`; present when the continuation succeeded.
    pub certificate: Option<CertificateResult<T>>,
}

impl<T: Real> SolveOutput<T> {
    pub fn certified(&self) -> bool {
        self.certificate.as_ref().is_some_and(|c| c.certified)
    }
}

/// Samples a start pair for `F` and continues it to `u·F`.
pub fn solve<T: Real, R: Rng + ?Sized>(
    f: &PolySystem<T>,
    u: &UnitaryTuple<T>,
    rng: &mut R,
    settings: &TrackerSettings<T>,
) -> Result<SolveOutput<T>> {
    let start = sample_solution_variety(f, rng)?;
    let (zero, stats) = numerical_continuation(f, u, &start.u, &start.zeta, settings)?;
    let certificate = if stats.outcome == Outcome::Success {
        Some(certify_by_contraction(f, u, &zero, crate::zeros::CERTIFY_EXTRA_STEPS, settings.certify_tol)?)
    } else {
        None
    };
    Ok(SolveOutput { zero, stats, start, certificate })
}

/// One Monte Carlo trial of the step-count experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub steps_k: u64,
    pub outcome: Outcome,
    pub certified: bool,
    /// `min_i (γ_Frob(f_i, u_i* z) − (d_i − 1)/2)` at the certified zero.
    pub gamma_margin: Option<f64>,
}

/// Mean step count over Kostlan systems with the given degrees.
#[derive(Clone, Debug)]
pub struct StepCountSummary {
    pub trials: usize,
    /// Mean `K` over successful, certified trials.
    pub mean_k: f64,
    pub stderr: f64,
    pub failures: usize,
    pub records: Vec<TrialRecord>,
}

/// Runs `solve` on `trials` fresh Kostlan systems with `u = 𝟏`.
///
/// Trial `k` draws everything from its own stream derived from
/// `(master_seed, k)`, and results are reduced in trial order, so the
/// summary does not depend on the number of worker threads.
pub fn mean_step_count(
    n: usize,
    degrees: &[usize],
    trials: usize,
    master_seed: u64,
    settings: &TrackerSettings<f64>,
) -> StepCountSummary {
    assert_eq!(degrees.len(), n, "one degree per equation");
    let records: Vec<TrialRecord> =
        (0..trials as u64).into_par_iter().map(|k| run_trial(degrees, master_seed, k, settings)).collect();
    summarize(records)
}

fn run_trial(degrees: &[usize], master_seed: u64, k: u64, settings: &TrackerSettings<f64>) -> TrialRecord {
    let mut rng = trial_rng(master_seed, stream::STEP_SCALING, k);
    let f = PolySystem::<f64>::kostlan_sample(degrees, &mut rng);
    let id = UnitaryTuple::identity(degrees.len());
    match solve(&f, &id, &mut rng, settings) {
        Ok(out) => {
            let certified = out.certified();
            let gamma_margin = out.certificate.as_ref().filter(|c| c.certified).map(|c| {
                f.polys()
                    .iter()
                    .map(|fi| {
                        let g = crate::conditioning::gamma_frob(fi, &c.refined).unwrap_or(f64::NAN);
                        g - (fi.degree() as f64 - 1.0) / 2.0
                    })
                    .fold(f64::INFINITY, f64::min)
            });
            TrialRecord { steps_k: out.stats.steps_k, outcome: out.stats.outcome, certified, gamma_margin }
        }
        Err(_) => TrialRecord { steps_k: 0, outcome: Outcome::NewtonFailure, certified: false, gamma_margin: None },
    }
}

fn summarize(records: Vec<TrialRecord>) -> StepCountSummary {
    let ok: Vec<f64> =
        records.iter().filter(|r| r.outcome == Outcome::Success && r.certified).map(|r| r.steps_k as f64).collect();
    let (mean_k, stderr) = mean_and_stderr(&ok);
    StepCountSummary { trials: records.len(), mean_k, stderr, failures: records.len() - ok.len(), records }
}

/// Sample mean and standard error of the mean (NaN when undefined).
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
