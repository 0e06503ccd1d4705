//! Brute-force oracles shared by the integration tests. They work from the
//! raw coefficient list and avoid the library's Taylor shift and norms.

#![allow(dead_code)]

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use rigid_hc::linalg::{lu_solve, CMatrix};
use rigid_hc::scalar::complex_normal;
use rigid_hc::{PolyF64, PolySystemF64, ProjectivePointF64, UnitaryTupleF64};

/// `∂^|m| f / ∂x^m` at `z`, where `m[v]` counts derivatives in `x_v`.
pub fn naive_partial(f: &PolyF64, m: &[usize], z: &[Complex64]) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for (exps, c) in f.basis().iter().zip(f.coeffs()) {
        let mut term = *c;
        for (v, (&e, &mv)) in exps.iter().zip(m).enumerate() {
            let e = e as usize;
            if mv > e {
                term = Complex64::new(0.0, 0.0);
                break;
            }
            let falling: f64 = ((e - mv + 1)..=e).map(|x| x as f64).product();
            term *= falling * z[v].powu((e - mv) as u32);
        }
        total += term;
    }
    total
}

/// All `(n+1)^k` entries of `d^k f(z)`, index `i_1` most significant.
pub fn derivative_tensor(f: &PolyF64, k: usize, z: &[Complex64]) -> Vec<Complex64> {
    let nv = f.n_vars();
    let mut memo: HashMap<Vec<usize>, Complex64> = HashMap::new();
    let total = nv.pow(k as u32);
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let mut m = vec![0usize; nv];
        let mut r = flat;
        for _ in 0..k {
            m[r % nv] += 1;
            r /= nv;
        }
        let v = *memo.entry(m.clone()).or_insert_with(|| naive_partial(f, &m, z));
        out.push(v);
    }
    out
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// `‖(1/k!) d^k f(z)‖_Frob` by enumeration.
pub fn frobenius_of_derivative(f: &PolyF64, k: usize, z: &[Complex64]) -> f64 {
    let t = derivative_tensor(f, k, z);
    t.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt() / factorial(k)
}

/// Contracts a `k`-tensor over `C^dim` with `k` vectors.
fn contract(t: &[Complex64], dim: usize, ys: &[Vec<Complex64>]) -> Complex64 {
    let k = ys.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (flat, &c) in t.iter().enumerate() {
        let mut r = flat;
        let mut prod = c;
        for y in ys.iter().take(k) {
            prod *= y[r % dim];
            r /= dim;
        }
        acc += prod;
    }
    acc
}

fn unit(v: Vec<Complex64>) -> Vec<Complex64> {
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / n).collect()
}

/// Operator-norm gamma `sup_k ‖(1/k!) dG^† d^k G‖^{1/(k−1)}` of
/// `G = u·F` at `z`, estimated by alternating maximization over each
/// argument with random restarts. Returns a lower bound on the true value.
pub fn operator_gamma<R: Rng>(f: &PolySystemF64, u: &UnitaryTupleF64, z: &ProjectivePointF64, rng: &mut R) -> f64 {
    let n = f.n();
    let dim = n + 1;
    let zr = z.rep();
    // points x_i = u_i* z and the chain rule d^k(f∘u*)(z)(y…) = d^k f(x)(u* y…)
    let xs: Vec<Vec<Complex64>> = u.components().iter().map(|ui| ui.apply_adjoint(zr)).collect();
    let jac = CMatrix::from_fn(n, dim, |i, j| {
        let grad: Vec<Complex64> = (0..dim)
            .map(|v| {
                let mut m = vec![0; dim];
                m[v] = 1;
                naive_partial(&f.polys()[i], &m, &xs[i])
            })
            .collect();
        // (grad · u_i*)_j = Σ_v grad_v conj(u_i[j][v])
        let ui = u.component(i).matrix();
        (0..dim).map(|v| grad[v] * ui[(j, v)].conj()).sum()
    });
    let gram = &jac * &jac.adjoint();
    let pinv = |v: &[Complex64]| -> Vec<Complex64> {
        let w = lu_solve(&gram, v).expect("surjective derivative").x;
        jac.adjoint_mul_vec(&w)
    };
    let mut best: f64 = 0.0;
    for k in 2..=f.max_degree() {
        let tensors: Vec<Vec<Complex64>> = (0..n).map(|i| derivative_tensor(&f.polys()[i], k, &xs[i])).collect();
        let kf = factorial(k);
        let eval = |ys: &[Vec<Complex64>]| -> Vec<Complex64> {
            let v: Vec<Complex64> = (0..n)
                .map(|i| {
                    let rotated: Vec<Vec<Complex64>> = ys.iter().map(|y| u.component(i).apply_adjoint(y)).collect();
                    contract(&tensors[i], dim, &rotated) / kf
                })
                .collect();
            pinv(&v)
        };
        let norm = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let mut op: f64 = 0.0;
        for _ in 0..8 {
            let mut ys: Vec<Vec<Complex64>> =
                (0..k).map(|_| unit((0..dim).map(|_| complex_normal(rng)).collect())).collect();
            for _ in 0..40 {
                for j in 0..k {
                    // the map y_j ↦ h(…, y_j, …) is linear; take its top right singular vector
                    let cols: Vec<Vec<Complex64>> = (0..dim)
                        .map(|m| {
                            let mut e = vec![Complex64::new(0.0, 0.0); dim];
                            e[m] = Complex64::new(1.0, 0.0);
                            let mut args = ys.clone();
                            args[j] = e;
                            eval(&args)
                        })
                        .collect();
                    let a = CMatrix::from_columns(&cols);
                    let ata = &a.adjoint() * &a;
                    let mut y = ys[j].clone();
                    for _ in 0..30 {
                        let next = ata.mul_vec(&y);
                        if norm(&next) == 0.0 {
                            break;
                        }
                        y = unit(next);
                    }
                    ys[j] = y;
                }
            }
            op = op.max(norm(&eval(&ys)));
        }
        best = best.max(op.powf(1.0 / (k as f64 - 1.0)));
    }
    best
}
