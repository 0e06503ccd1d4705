//! Dense homogeneous polynomials over `C`.
//!
//! Coefficients are stored in graded reverse lexicographic order. For a fixed
//! degree this order groups monomials into contiguous blocks by the exponent
//! of the last variable (ascending), and orders each block recursively by the
//! same rule on the remaining variables. With two variables `(s, t)` the
//! coefficient at index `k` belongs to `s^{d−k} t^k`; with `n + 1` variables
//! the linear monomials come out as `x₀, x₁, …, x_n`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{binomial, complex_normal, czero, factorial, inner, vec_norm, Real, C};

/// Number of monomials of degree `d` in `n_vars` variables.
pub fn monomial_count(n_vars: usize, degree: usize) -> usize {
    if n_vars == 0 {
        return usize::from(degree == 0);
    }
    binomial(degree + n_vars - 1, n_vars - 1)
}

/// Exponent table for one `(n_vars, degree)` shape, in storage order.
#[derive(Debug)]
pub struct Basis {
    n_vars: usize,
    degree: usize,
    exps: Vec<u32>,
}

impl Basis {
    fn build(n_vars: usize, degree: usize) -> Self {
        let mut exps = Vec::with_capacity(monomial_count(n_vars, degree) * n_vars);
        let mut cur = vec![0u32; n_vars];
        fill(n_vars, degree, &mut cur, &mut exps);
        Self { n_vars, degree, exps }
    }

    pub fn len(&self) -> usize {
        if self.n_vars == 0 {
            return 0;
        }
        self.exps.len() / self.n_vars
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn exponents(&self, idx: usize) -> &[u32] {
        &self.exps[idx * self.n_vars..(idx + 1) * self.n_vars]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> {
        self.exps.chunks_exact(self.n_vars.max(1))
    }
}

// places the last variable outermost so blocks are contiguous
fn fill(nv: usize, d: usize, cur: &mut [u32], out: &mut Vec<u32>) {
    if nv == 1 {
        cur[0] = d as u32;
        out.extend_from_slice(cur);
        return;
    }
    for e in 0..=d {
        cur[nv - 1] = e as u32;
        fill(nv - 1, d - e, cur, out);
    }
    cur[nv - 1] = 0;
}

thread_local! {
    static BASES: RefCell<HashMap<(usize, usize), Rc<Basis>>> = RefCell::new(HashMap::new());
}

/// Shared exponent table for `(n_vars, degree)`.
pub fn basis(n_vars: usize, degree: usize) -> Rc<Basis> {
    BASES.with(|cell| {
        cell.borrow_mut().entry((n_vars, degree)).or_insert_with(|| Rc::new(Basis::build(n_vars, degree))).clone()
    })
}

/// Storage index of an exponent tuple.
pub fn monomial_rank(exps: &[u32]) -> usize {
    let mut d: usize = exps.iter().map(|&e| e as usize).sum();
    let mut rank = 0;
    for nv in (2..=exps.len()).rev() {
        let n = nv - 1;
        let e = exps[n] as usize;
        rank += binomial(d + n, n) - binomial(d - e + n, n);
        d -= e;
    }
    rank
}

/// Start of the block whose last-variable exponent is `e`.
fn block_start(n_vars: usize, degree: usize, e: usize) -> usize {
    let n = n_vars - 1;
    binomial(degree + n, n) - binomial(degree - e + n, n)
}

/// `d! / (j₀! ⋯ j_n!)`
fn multinomial<T: Real>(exps: &[u32]) -> T {
    let d: usize = exps.iter().map(|&e| e as usize).sum();
    exps.iter().fold(factorial::<T>(d), |acc, &e| acc / factorial::<T>(e as usize))
}

/// One homogeneous polynomial with dense coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousPoly<T> {
    n_vars: usize,
    degree: usize,
    coeffs: Vec<C<T>>,
}

impl<T: Real> HomogeneousPoly<T> {
    pub fn new(n_vars: usize, degree: usize, coeffs: Vec<C<T>>) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::InvalidSystem("a polynomial needs at least one variable".into()));
        }
        let expected = monomial_count(n_vars, degree);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: coeffs.len() });
        }
        Ok(Self { n_vars, degree, coeffs })
    }

    pub fn zero(n_vars: usize, degree: usize) -> Self {
        Self { n_vars, degree, coeffs: vec![czero(); monomial_count(n_vars, degree)] }
    }

    /// Builds a polynomial from `(exponents, coefficient)` terms; repeated
    /// exponents accumulate.
    pub fn from_terms(n_vars: usize, degree: usize, terms: &[(Vec<u32>, C<T>)]) -> Result<Self> {
        let mut p = Self::zero(n_vars, degree);
        for (exps, c) in terms {
            if exps.len() != n_vars {
                return Err(Error::DimensionMismatch { expected: n_vars, got: exps.len() });
            }
            let sum: usize = exps.iter().map(|&e| e as usize).sum();
            if sum != degree {
                return Err(Error::InvalidSystem(format!("monomial {exps:?} has degree {sum}, expected {degree}")));
            }
            let idx = monomial_rank(exps);
            p.coeffs[idx] = p.coeffs[idx] + c;
        }
        Ok(p)
    }

    #[inline]
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn coeffs(&self) -> &[C<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, exps: &[u32]) -> C<T> {
        if exps.len() != self.n_vars || exps.iter().map(|&e| e as usize).sum::<usize>() != self.degree {
            return czero();
        }
        self.coeffs[monomial_rank(exps)]
    }

    pub fn basis(&self) -> Rc<Basis> {
        basis(self.n_vars, self.degree)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == czero())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self { n_vars: self.n_vars, degree: self.degree, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    fn check_len(&self, v: &[C<T>]) -> Result<()> {
        if v.len() != self.n_vars {
            return Err(Error::DimensionMismatch { expected: self.n_vars, got: v.len() });
        }
        Ok(())
    }

    /// `f(v)`, by nested Horner evaluation over the last-variable blocks.
    pub fn evaluate(&self, v: &[C<T>]) -> Result<C<T>> {
        self.check_len(v)?;
        Ok(horner(&self.coeffs, self.n_vars, self.degree, v))
    }

    /// `(∂f/∂x₀, …, ∂f/∂x_n)` at `v`.
    pub fn gradient(&self, v: &[C<T>]) -> Result<Vec<C<T>>> {
        self.check_len(v)?;
        let nv = self.n_vars;
        let d = self.degree;
        let mut grad = vec![czero(); nv];
        if d == 0 {
            return Ok(grad);
        }
        // pow[k * (d + 1) + p] = v_k^p
        let mut pow = vec![czero(); nv * (d + 1)];
        for (k, vk) in v.iter().enumerate() {
            let mut acc = C::new(T::one(), T::zero());
            for p in 0..=d {
                pow[k * (d + 1) + p] = acc;
                acc = acc * vk;
            }
        }
        let b = self.basis();
        for (c, exps) in self.coeffs.iter().zip(b.iter()) {
            if *c == czero() {
                continue;
            }
            for k in 0..nv {
                let jk = exps[k] as usize;
                if jk == 0 {
                    continue;
                }
                let mut term = c * T::from_usize_lossy(jk) * pow[k * (d + 1) + jk - 1];
                for (r, &jr) in exps.iter().enumerate() {
                    if r != k && jr > 0 {
                        term = term * pow[r * (d + 1) + jr as usize];
                    }
                }
                grad[k] = grad[k] + term;
            }
        }
        Ok(grad)
    }

    /// Partial derivative with respect to `x_k` as a polynomial of degree `d − 1`.
    pub fn derivative(&self, k: usize) -> Self {
        assert!(k < self.n_vars, "variable index out of range");
        if self.degree == 0 {
            return Self::zero(self.n_vars, 0);
        }
        let mut out = Self::zero(self.n_vars, self.degree - 1);
        let b = self.basis();
        let mut e = vec![0u32; self.n_vars];
        for (c, exps) in self.coeffs.iter().zip(b.iter()) {
            if exps[k] == 0 || *c == czero() {
                continue;
            }
            e.copy_from_slice(exps);
            e[k] -= 1;
            let idx = monomial_rank(&e);
            out.coeffs[idx] = out.coeffs[idx] + c * T::from_usize_lossy(exps[k] as usize);
        }
        out
    }

    /// Weyl norm `(Σ |c_j|² / multinomial(j))^{1/2}`.
    pub fn weyl_norm(&self) -> T {
        let b = self.basis();
        let scaled: Vec<C<T>> =
            self.coeffs.iter().zip(b.iter()).map(|(c, exps)| c / multinomial::<T>(exps).sqrt()).collect();
        vec_norm(&scaled)
    }

    /// Homogeneous components `g_0, …, g_d` of `x ↦ f(z + x)`.
    ///
    /// Works on the homogenization `f(x + z·h)` in one extra variable `h`:
    /// each variable is shifted in turn by a binomial expansion, and `g_k`
    /// is then the block where `h` carries exponent `d − k`.
    pub fn taylor_shift(&self, z: &[C<T>]) -> Result<Vec<Self>> {
        self.check_len(z)?;
        let nv = self.n_vars;
        let d = self.degree;
        let big = basis(nv + 1, d);
        let mut cur = vec![czero(); big.len()];
        cur[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        let mut next = vec![czero(); big.len()];
        let mut zpow = vec![czero(); d + 1];
        let mut e = vec![0u32; nv + 1];
        for (j, zj) in z.iter().enumerate() {
            if *zj == czero() {
                continue;
            }
            let mut acc = C::new(T::one(), T::zero());
            for p in zpow.iter_mut() {
                *p = acc;
                acc = acc * zj;
            }
            next.iter_mut().for_each(|c| *c = czero());
            for (idx, c) in cur.iter().enumerate() {
                if *c == czero() {
                    continue;
                }
                let exps = big.exponents(idx);
                let a = exps[j] as usize;
                e.copy_from_slice(exps);
                for m in 0..=a {
                    e[j] = (a - m) as u32;
                    e[nv] = exps[nv] + m as u32;
                    let w = T::from_usize_lossy(binomial(a, m));
                    let r = monomial_rank(&e);
                    next[r] = next[r] + c * zpow[m] * w;
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok((0..=d)
            .map(|k| {
                let start = block_start(nv + 1, d, d - k);
                let len = monomial_count(nv, k);
                Self { n_vars: nv, degree: k, coeffs: cur[start..start + len].to_vec() }
            })
            .collect())
    }

    /// `y ↦ f(M y)` for an `n_vars × k` matrix `M`; the result has `k` variables.
    pub fn compose_linear(&self, m: &CMatrix<T>) -> Result<Self> {
        if m.nrows() != self.n_vars {
            return Err(Error::DimensionMismatch { expected: self.n_vars, got: m.nrows() });
        }
        let k = m.ncols();
        let d = self.degree;
        // powers[r][p] = (row_r · y)^p
        let powers: Vec<Vec<Self>> = (0..self.n_vars)
            .map(|r| {
                let lin = Self { n_vars: k, degree: 1, coeffs: m.row(r).to_vec() };
                let mut out = vec![Self::one(k)];
                for p in 1..=d {
                    let nxt = out[p - 1].mul(&lin);
                    out.push(nxt);
                }
                out
            })
            .collect();
        let mut result = Self::zero(k, d);
        let b = self.basis();
        for (c, exps) in self.coeffs.iter().zip(b.iter()) {
            if *c == czero() {
                continue;
            }
            let mut term = Self::one(k).scale(*c);
            for (r, &e) in exps.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&powers[r][e as usize]);
                }
            }
            for (acc, t) in result.coeffs.iter_mut().zip(&term.coeffs) {
                *acc = *acc + t;
            }
        }
        Ok(result)
    }

    /// `g(s, t) = f(s·p + t·q)` for an orthonormal pair `(p, q)`.
    pub fn restrict_to_line(&self, p: &[C<T>], q: &[C<T>]) -> Result<Self> {
        self.check_len(p)?;
        self.check_len(q)?;
        let tol = T::tol(1e-10);
        let defect = inner(p, q).norm().max((vec_norm(p) - T::one()).abs()).max((vec_norm(q) - T::one()).abs());
        if !(defect <= tol) {
            return Err(Error::NonOrthonormal { defect: defect.to_f64_lossy() });
        }
        self.compose_linear(&CMatrix::from_columns(&[p.to_vec(), q.to_vec()]))
    }

    /// The constant polynomial 1 in `n_vars` variables.
    fn one(n_vars: usize) -> Self {
        let mut p = Self::zero(n_vars, 0);
        p.coeffs[0] = C::new(T::one(), T::zero());
        p
    }

    /// Product of two polynomials in the same variables.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n_vars, other.n_vars, "product of polynomials in different variables");
        let mut out = Self::zero(self.n_vars, self.degree + other.degree);
        let (ba, bb) = (self.basis(), other.basis());
        let mut e = vec![0u32; self.n_vars];
        for (ca, ea) in self.coeffs.iter().zip(ba.iter()) {
            if *ca == czero() {
                continue;
            }
            for (cb, eb) in other.coeffs.iter().zip(bb.iter()) {
                for ((x, a), b) in e.iter_mut().zip(ea).zip(eb) {
                    *x = a + b;
                }
                let idx = monomial_rank(&e);
                out.coeffs[idx] = out.coeffs[idx] + ca * cb;
            }
        }
        out
    }

    /// Random polynomial from the Kostlan distribution in `n + 1` variables.
    pub fn kostlan_sample<R: Rng + ?Sized>(n: usize, degree: usize, rng: &mut R) -> Self {
        let b = basis(n + 1, degree);
        let coeffs = b.iter().map(|exps| complex_normal::<T, R>(rng) * multinomial::<T>(exps).sqrt()).collect();
        Self { n_vars: n + 1, degree, coeffs }
    }

    /// Converts the coefficients to another scalar type.
    pub fn cast<U: Real>(&self) -> HomogeneousPoly<U> {
        HomogeneousPoly {
            n_vars: self.n_vars,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| C::new(U::lit(c.re.to_f64_lossy()), U::lit(c.im.to_f64_lossy())))
                .collect(),
        }
    }
}

fn horner<T: Real>(c: &[C<T>], nv: usize, d: usize, v: &[C<T>]) -> C<T> {
    if nv == 1 {
        let mut acc = c[0];
        for _ in 0..d {
            acc = acc * v[0];
        }
        return acc;
    }
    let last = v[nv - 1];
    let mut acc = czero();
    for e in (0..=d).rev() {
        let start = block_start(nv, d, e);
        let len = monomial_count(nv - 1, d - e);
        acc = acc * last + horner(&c[start..start + len], nv - 1, d - e, v);
    }
    acc
}

/// A square system: `n` polynomials in `n + 1` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem<T> {
    polys: Vec<HomogeneousPoly<T>>,
}

impl<T: Real> PolySystem<T> {
    pub fn new(polys: Vec<HomogeneousPoly<T>>) -> Result<Self> {
        let n = polys.len();
        if n == 0 {
            return Err(Error::InvalidSystem("empty system".into()));
        }
        for (i, f) in polys.iter().enumerate() {
            if f.n_vars != n + 1 {
                return Err(Error::InvalidSystem(format!(
                    "polynomial {i} has {} variables, a system of {n} equations needs {}",
                    f.n_vars,
                    n + 1
                )));
            }
            if f.degree == 0 {
                return Err(Error::InvalidSystem(format!("polynomial {i} has degree 0")));
            }
            if f.is_zero() {
                return Err(Error::InvalidSystem(format!("polynomial {i} is zero")));
            }
        }
        Ok(Self { polys })
    }

    /// Kostlan system with the given degrees.
    pub fn kostlan_sample<R: Rng + ?Sized>(degrees: &[usize], rng: &mut R) -> Self {
        let n = degrees.len();
        Self { polys: degrees.iter().map(|&d| HomogeneousPoly::kostlan_sample(n, d, rng)).collect() }
    }

    /// Number of equations `n`.
    #[inline]
    pub fn n(&self) -> usize {
        self.polys.len()
    }

    #[inline]
    pub fn polys(&self) -> &[HomogeneousPoly<T>] {
        &self.polys
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.polys.iter().map(|f| f.degree).collect()
    }

    /// `D = max d_i`
    pub fn max_degree(&self) -> usize {
        self.polys.iter().map(|f| f.degree).max().unwrap_or(0)
    }

    /// `N = Σ dim H_{d_i}`
    pub fn input_size(&self) -> usize {
        self.polys.iter().map(|f| f.coeffs.len()).sum()
    }

    pub fn weyl_norms(&self) -> Vec<T> {
        self.polys.iter().map(HomogeneousPoly::weyl_norm).collect()
    }

    pub fn cast<U: Real>(&self) -> PolySystem<U> {
        PolySystem { polys: self.polys.iter().map(HomogeneousPoly::cast).collect() }
    }
}
