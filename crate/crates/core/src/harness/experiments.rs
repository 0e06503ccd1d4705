//! Monte Carlo experiments and their CSV records.
//!
//! Every trial draws from its own generator keyed by `(seed, stream, trial)`
//! and results are collected in trial order before any reduction, so the
//! output is the same for any number of worker threads.

use rand::Rng;
use rayon::prelude::*;

use crate::conditioning::{gamma_frob, hat_gamma_frob};
use crate::hpoly::{HomogeneousPoly, PolySystem};
use crate::linalg::{singular_values, CMatrix};
use crate::rigid::{mean_and_stderr, mean_step_count, sample_hypersurface_point, TrackerSettings};
use crate::rng::{derive_seed, stream, trial_rng, TrialRng};
use crate::scalar::{complex_normal, fubini_study, inner, normalized, C};
use crate::unitary::{exp_skew_hermitian, unitary_metric_norm, UnitaryMatrix, UnitaryTuple};
use crate::zeros::ProjectivePoint;

/// A row type that can be written as CSV.
pub trait CsvRecord {
    fn header() -> &'static str;
    fn row(&self) -> String;
}

/// Header line followed by one line per record.
pub fn to_csv<R: CsvRecord>(records: &[R]) -> String {
    let mut out = String::from(R::header());
    out.push('\n');
    for r in records {
        out.push_str(&r.row());
        out.push('\n');
    }
    out
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Runs `op` on a dedicated pool with `threads` workers.
pub fn with_threads<R: Send>(threads: usize, op: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("failed to build thread pool")
        .install(op)
}

fn uniform_sphere(dim: usize, rng: &mut TrialRng) -> Vec<C<f64>> {
    loop {
        let v: Vec<C<f64>> = (0..dim).map(|_| complex_normal(rng)).collect();
        if let Some(u) = normalized(&v) {
            return u;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KappaMomentRecord {
    pub n: usize,
    pub trials: usize,
    pub mean_kappa_sq: f64,
    pub stderr: f64,
    pub bound_6n2: f64,
}

impl CsvRecord for KappaMomentRecord {
    fn header() -> &'static str {
        "n,trials,mean_kappa_sq,stderr,bound_6n2"
    }

    fn row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.n,
            self.trials,
            fmt_f64(self.mean_kappa_sq),
            fmt_f64(self.stderr),
            fmt_f64(self.bound_6n2)
        )
    }
}

/// `E[κ²]` for `n × (n+1)` matrices with independent uniform unit rows.
pub fn kappa_moment(n: usize, trials: usize, seed: u64) -> KappaMomentRecord {
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(seed, stream::KAPPA_MOMENT, k);
            let rows: Vec<Vec<C<f64>>> = (0..n).map(|_| uniform_sphere(n + 1, &mut rng)).collect();
            let smin = *singular_values(&CMatrix::from_rows(&rows)).last().expect("n ≥ 1");
            1.0 / (smin * smin)
        })
        .collect();
    let (mean_kappa_sq, stderr) = mean_and_stderr(&samples);
    KappaMomentRecord { n, trials, mean_kappa_sq, stderr, bound_6n2: 6.0 * (n * n) as f64 }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaMomentRecord {
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    pub mean_gamma_sq: f64,
    pub stderr: f64,
    pub bound: f64,
    /// Smallest `γ_Frob − (d − 1)/2` over all sampled zeros; not part of the CSV.
    pub min_gamma_margin: f64,
}

impl CsvRecord for GammaMomentRecord {
    fn header() -> &'static str {
        "n,d,trials,mean_gamma_sq,stderr,bound"
    }

    fn row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n,
            self.d,
            self.trials,
            fmt_f64(self.mean_gamma_sq),
            fmt_f64(self.stderr),
            fmt_f64(self.bound)
        )
    }
}

/// `E[γ_Frob(f, ζ)²]` for Kostlan `f` of degree `d` in `n + 1` variables
/// and `ζ` a uniform zero of `f`.
pub fn gamma_moment(n: usize, d: usize, trials: usize, seed: u64) -> GammaMomentRecord {
    assert!(d >= 2, "degree must be at least 2");
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(seed, stream::GAMMA_MOMENT, k);
            let f = HomogeneousPoly::<f64>::kostlan_sample(n, d, &mut rng);
            let y = loop {
                if let Some(y) = sample_hypersurface_point(&f, &mut rng).expect("valid line restriction") {
                    break y;
                }
            };
            gamma_frob(&f, &ProjectivePoint::new(y).expect("unit point")).expect("matching dimension")
        })
        .collect();
    let sq: Vec<f64> = samples.iter().map(|g| g * g).collect();
    let (mean_gamma_sq, stderr) = mean_and_stderr(&sq);
    let floor = (d as f64 - 1.0) / 2.0;
    let min_gamma_margin = samples.iter().map(|g| g - floor).fold(f64::INFINITY, f64::min);
    let df = d as f64;
    GammaMomentRecord {
        n,
        d,
        trials,
        mean_gamma_sq,
        stderr,
        bound: 0.25 * df.powi(3) * (df + n as f64),
        min_gamma_margin,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepScalingRecord {
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    pub mean_k: f64,
    pub stderr: f64,
    pub failures: usize,
    pub step_bound: f64,
    /// Smallest `γ_Frob − (d_i − 1)/2` over certified outputs; not part of the CSV.
    pub min_gamma_margin: f64,
}

impl CsvRecord for StepScalingRecord {
    fn header() -> &'static str {
        "n,D,trials,mean_K,stderr,failures,paper_bound_9000_n4_D2"
    }

    fn row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            self.d,
            self.trials,
            fmt_f64(self.mean_k),
            fmt_f64(self.stderr),
            self.failures,
            fmt_f64(self.step_bound)
        )
    }
}

/// Mean step count of `solve` for each `(n, D)` cell, uniform degree `D`.
pub fn step_scaling(
    ns: std::ops::RangeInclusive<usize>,
    ds: std::ops::RangeInclusive<usize>,
    trials: usize,
    seed: u64,
    settings: &TrackerSettings<f64>,
) -> Vec<StepScalingRecord> {
    let mut out = Vec::new();
    for n in ns {
        for d in ds.clone() {
            let cell_seed = derive_seed(seed, stream::STEP_SCALING, ((n as u64) << 32) | d as u64);
            let summary = mean_step_count(n, &vec![d; n], trials, cell_seed, settings);
            let min_gamma_margin = summary.records.iter().filter_map(|r| r.gamma_margin).fold(f64::INFINITY, f64::min);
            out.push(StepScalingRecord {
                n,
                d,
                trials,
                mean_k: summary.mean_k,
                stderr: summary.stderr,
                failures: summary.failures,
                step_bound: 9000.0 * (n as f64).powi(4) * (d as f64).powi(2),
                min_gamma_margin,
            });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzRecord {
    pub trials: usize,
    pub n: usize,
    pub d: usize,
    pub violations_5: usize,
    pub violations_15: usize,
    /// Largest observed `|Δ(1/γ_Frob)| / (5·d_P)`.
    pub max_ratio_5: f64,
    /// Largest observed `|Δ(1/ĥγ_Frob)| / (15·d)` on `𝓤 × Pⁿ`.
    pub max_ratio_15: f64,
}

impl CsvRecord for LipschitzRecord {
    fn header() -> &'static str {
        "trials,n,d,violations_5,violations_15,max_ratio_5,max_ratio_15"
    }

    fn row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.trials,
            self.n,
            self.d,
            self.violations_5,
            self.violations_15,
            fmt_f64(self.max_ratio_5),
            fmt_f64(self.max_ratio_15)
        )
    }
}

/// Relative slack allowed on the Lipschitz inequalities.
pub const LIPSCHITZ_SLACK: f64 = 1.0 + 1e-6;

/// A point at Fubini–Study distance `theta` from `x` in a random direction.
fn nearby_point(x: &[C<f64>], theta: f64, rng: &mut TrialRng) -> Vec<C<f64>> {
    loop {
        let v = uniform_sphere(x.len(), rng);
        let proj = inner(&v, x);
        let t: Vec<C<f64>> = v.iter().zip(x).map(|(a, b)| a - proj * b).collect();
        if let Some(t) = normalized(&t) {
            return x.iter().zip(&t).map(|(a, b)| a * theta.cos() + b * theta.sin()).collect();
        }
    }
}

/// `u·exp(s·A)` with `A` a random skew-Hermitian direction of unit `‖·‖_u` norm.
fn nearby_unitary(u: &UnitaryMatrix<f64>, s: f64, rng: &mut TrialRng) -> UnitaryMatrix<f64> {
    let k = u.dim();
    let g = CMatrix::from_fn(k, k, |_, _| complex_normal(rng));
    let a = g.sub(&g.adjoint()).scale(C::new(0.5, 0.0));
    let a = a.scale(C::new(s / unitary_metric_norm(&a), 0.0));
    UnitaryMatrix::new(u.matrix() * &exp_skew_hermitian(&a)).expect("product of unitaries")
}

/// Random two-point checks of the Lipschitz constants of `1/γ_Frob` (5, on
/// `Pⁿ`) and `1/ĥγ_Frob` (15, on `𝓤 × Pⁿ` with the product metric).
///
/// Each trial draws a Kostlan system and a base point, then a second point
/// at a log-uniform distance in `[1e-4, 1]`.
pub fn lipschitz(n: usize, d: usize, trials: usize, seed: u64) -> LipschitzRecord {
    let ratios: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(seed, stream::LIPSCHITZ, k);
            let f = PolySystem::<f64>::kostlan_sample(&vec![d; n], &mut rng);
            let x = uniform_sphere(n + 1, &mut rng);
            let theta = 10f64.powf(rng.random_range(-4.0..0.0));
            let y = nearby_point(&x, theta, &mut rng);
            let (px, py) = (ProjectivePoint::new(x).unwrap(), ProjectivePoint::new(y).unwrap());
            let dp = fubini_study(px.rep(), py.rep());

            let f0 = &f.polys()[0];
            let inv = |g: f64| if g.is_finite() { 1.0 / g } else { 0.0 };
            let diff5 = (inv(gamma_frob(f0, &px).unwrap()) - inv(gamma_frob(f0, &py).unwrap())).abs();
            let r5 = if dp > 0.0 {
                diff5 / (5.0 * dp)
            } else if diff5 == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };

            let u = UnitaryTuple::<f64>::sample(n, &mut rng);
            let s = 10f64.powf(rng.random_range(-4.0..0.0)) / (n as f64).sqrt();
            let v =
                UnitaryTuple::new(u.components().iter().map(|ui| nearby_unitary(ui, s, &mut rng)).collect()).unwrap();
            let du = u.distance(&v);
            let dist = (du * du + dp * dp).sqrt();
            let gx = hat_gamma_frob(&f, &u, &px).unwrap().hat_gamma_frob;
            let gy = hat_gamma_frob(&f, &v, &py).unwrap().hat_gamma_frob;
            let diff15 = (inv(gx) - inv(gy)).abs();
            let r15 = if dist > 0.0 {
                diff15 / (15.0 * dist)
            } else if diff15 == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            (r5, r15)
        })
        .collect();
    LipschitzRecord {
        trials,
        n,
        d,
        violations_5: ratios.iter().filter(|r| r.0 > LIPSCHITZ_SLACK).count(),
        violations_15: ratios.iter().filter(|r| r.1 > LIPSCHITZ_SLACK).count(),
        max_ratio_5: ratios.iter().map(|r| r.0).fold(0.0, f64::max),
        max_ratio_15: ratios.iter().map(|r| r.1).fold(0.0, f64::max),
    }
}
