//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances and budgets are the constants below.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use rigid_hc::conditioning::hat_gamma_frob;
use rigid_hc::harness::{gamma_moment, kappa_moment, lipschitz, step_scaling, GammaMomentRecord, StepScalingRecord};
use rigid_hc::rigid::{sample_solution_variety, solve};
use rigid_hc::unitary::{build_path, unitary_metric_norm, PathKind};
use rigid_hc::{PolyF64, PolySystemF64, ProjectivePointF64, TrackerSettings, UnitaryTupleF64};

const SEED: u64 = 20_240_601;

const KAPPA_TRIALS: usize = 10_000;
const KAPPA_BUDGET: Duration = Duration::from_secs(60);
const GAMMA_TRIALS: usize = 1_000;
const GAMMA_BUDGET: Duration = Duration::from_secs(5 * 60);
const WEYL_POLYS: usize = 100;
const WEYL_REL_TOL: f64 = 1e-10;
const LIPSCHITZ_TRIALS: usize = 10_000;
const GAMMA_FLOOR_TOL: f64 = 1e-8;
const PATH_PAIRS: usize = 100;
const PATH_ENDPOINT_TOL: f64 = 1e-8;
const PATH_SPEED_TOL: f64 = 1e-4;
const PATH_INVARIANCE_TOL: f64 = 1e-8;
const SOLVE_TRIALS: usize = 100;
const SOLVE_BUDGET: Duration = Duration::from_secs(15 * 60);
const MARGINAL_SAMPLES: usize = 10_000;
const MARGINAL_P_MIN: f64 = 1e-3;
const ORACLE_INSTANCES: usize = 50;
const ORACLE_TOL: f64 = 1e-8;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut worst = String::new();
    let mut ok = true;
    for n in 2..=8 {
        let r = kappa_moment(n, KAPPA_TRIALS, SEED);
        let lhs = r.mean_kappa_sq + 3.0 * r.stderr;
        if lhs > r.bound_6n2 {
            ok = false;
        }
        worst.push_str(&format!(" n={n}:{lhs:.2}/{:.0}", r.bound_6n2));
    }
    let elapsed = start.elapsed();
    verdict(ok && elapsed <= KAPPA_BUDGET, format!("mean+3se vs 6n²:{worst}; {:.1}s", elapsed.as_secs_f64()))
}

fn criterion_2() -> (Verdict, Vec<GammaMomentRecord>) {
    let start = Instant::now();
    let mut records = Vec::new();
    let mut detail = String::new();
    let mut ok = true;
    for n in 2..=3 {
        for d in 2..=4 {
            let r = gamma_moment(n, d, GAMMA_TRIALS, SEED);
            let lhs = r.mean_gamma_sq + 3.0 * r.stderr;
            ok &= lhs <= r.bound;
            detail.push_str(&format!(" ({n},{d}):{lhs:.2}/{:.2}", r.bound));
            records.push(r);
        }
    }
    let elapsed = start.elapsed();
    ok &= elapsed <= GAMMA_BUDGET;
    (verdict(ok, format!("mean+3se vs d³(d+n)/4:{detail}; {:.1}s", elapsed.as_secs_f64())), records)
}

fn criterion_3() -> Verdict {
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    for _ in 0..WEYL_POLYS {
        let n = r.random_range(1..=3);
        let d = r.random_range(2..=5);
        let f = PolyF64::kostlan_sample(n, d, &mut r);
        let z: Vec<Complex64> = (0..=n).map(|_| rigid_hc::scalar::complex_normal(&mut r)).collect();
        let parts = f.taylor_shift(&z).unwrap();
        for (k, part) in parts.iter().enumerate().skip(2) {
            let frob = common::frobenius_of_derivative(&f, k, &z);
            let weyl = part.weyl_norm();
            worst = worst.max((frob - weyl).abs() / weyl.max(f64::MIN_POSITIVE));
            checks += 1;
        }
    }
    verdict(worst <= WEYL_REL_TOL, format!("{checks} (poly, k) pairs, max rel err {worst:.2e}"))
}

fn criterion_4() -> Verdict {
    let r = lipschitz(2, 3, LIPSCHITZ_TRIALS, SEED);
    verdict(
        r.violations_5 == 0 && r.violations_15 == 0,
        format!(
            "violations 5-Lip {} / 15-Lip {} of {}; max ratios {:.3} {:.3}",
            r.violations_5, r.violations_15, r.trials, r.max_ratio_5, r.max_ratio_15
        ),
    )
}

fn criterion_5(gamma: &[GammaMomentRecord], solves: &[StepScalingRecord]) -> Verdict {
    let a = gamma.iter().map(|r| r.min_gamma_margin).fold(f64::INFINITY, f64::min);
    let b = solves.iter().map(|r| r.min_gamma_margin).fold(f64::INFINITY, f64::min);
    verdict(
        a >= -GAMMA_FLOOR_TOL && b >= -GAMMA_FLOOR_TOL,
        format!("min γ_Frob − (d−1)/2: sampled zeros {a:.3e}, certified solver outputs {b:.3e}"),
    )
}

fn criterion_6() -> Verdict {
    let mut r = rng(6);
    let (mut end_err, mut speed_err, mut inv_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut length_ok = true;
    for k in 0..PATH_PAIRS {
        let n = 1 + k % 4;
        let v = UnitaryTupleF64::sample(n, &mut r);
        let u = UnitaryTupleF64::sample(n, &mut r);
        let path = build_path(&v, &u, PathKind::Geodesic).unwrap();
        let t_len = path.length();
        length_ok &= t_len <= 4.0 * n as f64;
        end_err = end_err.max(path.evaluate(0.0).unwrap().max_entry_distance(&v));
        end_err = end_err.max(path.evaluate(t_len).unwrap().max_entry_distance(&u));
        // central difference of the product path in the ‖·‖_u metric
        let h = 1e-5;
        let t = r.random_range(h..t_len - h);
        let (a, b) = (path.evaluate(t - h).unwrap(), path.evaluate(t + h).unwrap());
        let speed_sq: f64 = a
            .components()
            .iter()
            .zip(b.components())
            .map(|(x, y)| (unitary_metric_norm(&y.matrix().sub(x.matrix())) / (2.0 * h)).powi(2))
            .sum();
        speed_err = speed_err.max((speed_sq.sqrt() - 1.0).abs());
        let w = UnitaryTupleF64::sample(n, &mut r);
        let moved = build_path(&v.left_mul(&w), &u.left_mul(&w), PathKind::Geodesic).unwrap();
        let s = r.random_range(0.0..t_len);
        inv_err = inv_err.max(moved.evaluate(s).unwrap().max_entry_distance(&path.evaluate(s).unwrap().left_mul(&w)));
    }
    verdict(
        end_err <= PATH_ENDPOINT_TOL && speed_err <= PATH_SPEED_TOL && inv_err <= PATH_INVARIANCE_TOL && length_ok,
        format!("endpoint {end_err:.1e}, |speed−1| {speed_err:.1e}, left invariance {inv_err:.1e}, T ≤ 4n {length_ok}"),
    )
}

fn criterion_7() -> (Verdict, Vec<StepScalingRecord>) {
    let start = Instant::now();
    let records = step_scaling(1..=3, 2..=3, SOLVE_TRIALS, SEED, &TrackerSettings::default());
    let elapsed = start.elapsed();
    let mut ok = elapsed <= SOLVE_BUDGET;
    let mut detail = String::new();
    for r in &records {
        ok &= r.failures == 0 && r.mean_k <= r.step_bound;
        detail.push_str(&format!(" ({},{}): K̄={:.0} fail={}", r.n, r.d, r.mean_k, r.failures));
    }
    (verdict(ok, format!("{detail}; {:.1}s", elapsed.as_secs_f64())), records)
}

fn criterion_8() -> Verdict {
    let mut r = rng(8);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 6];
    coeffs[0] = Complex64::new(1.0, 0.0); // s⁵
    coeffs[5] = Complex64::new(-1.0, 0.0); // t⁵
    let f = PolySystemF64::new(vec![PolyF64::new(2, 5, coeffs).unwrap()]).unwrap();
    let roots: Vec<ProjectivePointF64> = (0..5)
        .map(|k| {
            let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 5.0);
            ProjectivePointF64::new(vec![w, Complex64::new(1.0, 0.0)]).unwrap()
        })
        .collect();
    let mut counts = [0usize; 5];
    for _ in 0..MARGINAL_SAMPLES {
        let pair = sample_solution_variety(&f, &mut r).unwrap();
        let y = ProjectivePointF64::new(pair.u.component(0).apply_adjoint(pair.zeta.rep())).unwrap();
        let (idx, dist) = roots.iter().map(|x| x.distance(&y)).enumerate().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        assert!(dist < 1e-8, "sampled point is not a root");
        counts[idx] += 1;
    }
    let expected = MARGINAL_SAMPLES as f64 / 5.0;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new(4.0).unwrap().cdf(stat);
    verdict(p > MARGINAL_P_MIN, format!("counts {counts:?}, χ²={stat:.2}, p={p:.3}"))
}

fn criterion_9() -> Verdict {
    let mut r = rng(9);
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for k in 0..ORACLE_INSTANCES {
        let n = 1 + k % 2;
        let degrees: Vec<usize> = (0..n).map(|_| r.random_range(2..=4)).collect();
        let f = PolySystemF64::kostlan_sample(&degrees, &mut r);
        let u = UnitaryTupleF64::sample(n, &mut r);
        // alternate between certified zeros and arbitrary points
        let z = if k % 4 < 2 {
            let out = solve(&f, &u, &mut r, &TrackerSettings::default()).unwrap();
            assert!(out.certified());
            out.certificate.unwrap().refined
        } else {
            ProjectivePointF64::new((0..=n).map(|_| rigid_hc::scalar::complex_normal(&mut r)).collect()).unwrap()
        };
        let oracle = common::operator_gamma(&f, &u, &z, &mut r);
        let hat = hat_gamma_frob(&f, &u, &z).unwrap().hat_gamma_frob;
        ok &= oracle <= hat + ORACLE_TOL;
        worst = worst.max(oracle / hat);
    }
    verdict(ok, format!("{ORACLE_INSTANCES} instances, max γ/ĥγ_Frob {worst:.3}"))
}

fn run_cli(args: &[&str]) -> (Vec<u8>, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_rigid-hc")).args(args).output().expect("run rigid-hc");
    (out.stdout, out.status.code())
}

fn criterion_10() -> Verdict {
    let quadric = concat!(env!("CARGO_MANIFEST_DIR"), "/data/quadric.polysys");
    let invocations: Vec<Vec<&str>> = vec![
        vec!["solve", "--system", quadric, "--seed", "42"],
        vec!["solve", "--system", quadric, "--seed", "42", "--json", "--path", "householder"],
        vec!["kappa-moment", "--n", "3", "--trials", "500", "--seed", "5"],
        vec!["gamma-moment", "--n", "2", "--d", "3", "--trials", "100", "--seed", "5"],
        vec!["step-scaling", "--n-range", "1:2", "--d-range", "2:2", "--trials", "8", "--seed", "5"],
        vec!["lipschitz", "--trials", "300", "--seed", "5"],
    ];
    let mut mismatches = Vec::new();
    for args in &invocations {
        let runs: Vec<(Vec<u8>, Option<i32>)> = ["1", "1", "8"]
            .iter()
            .map(|threads| {
                let mut a = args.clone();
                a.extend(["--threads", threads]);
                run_cli(&a)
            })
            .collect();
        let ok = runs.iter().all(|x| x == &runs[0]) && !runs[0].0.is_empty() && runs[0].1 == Some(0);
        if !ok {
            mismatches.push(args[0]);
        }
    }
    verdict(
        mismatches.is_empty(),
        format!("{} invocations × (1, 1, 8 threads); differing: {mismatches:?}", invocations.len()),
    )
}

fn main() {
    let mut lines = Vec::new();
    let mut report = |id: usize, name: &str, v: Verdict| {
        let line = format!("criterion {id:>2} {name:<28} {} {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        println!("{line}");
        lines.push(v.pass);
    };
    report(1, "kappa moment", criterion_1());
    let (v2, gamma_records) = criterion_2();
    report(2, "gamma_Frob moment", v2);
    report(3, "Weyl-Frobenius identity", criterion_3());
    report(4, "Lipschitz constants", criterion_4());
    report(6, "path contract", criterion_6());
    let (v7, solve_records) = criterion_7();
    report(7, "end-to-end solve", v7);
    report(5, "gamma lower bound", criterion_5(&gamma_records, &solve_records));
    report(8, "sampling marginal", criterion_8());
    report(9, "operator gamma oracle", criterion_9());
    report(10, "determinism", criterion_10());
    let failed = lines.iter().filter(|p| !**p).count();
    println!("acceptance: {} passed, {failed} failed", lines.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
