//! Real scalar abstraction shared by every numeric module.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use rand::Rng;
use rand_distr::StandardNormal;

/// Floating point type backing the complex arithmetic: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal fits the scalar type")
    }

    #[inline]
    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("usize fits the scalar type")
    }

    /// A validation tolerance: `x`, widened to a few hundred ulps for `f32`.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(256.0))
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type C<T> = Complex<T>;

#[inline]
pub fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub fn creal<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// `e^{iθ}`
#[inline]
pub fn cis<T: Real>(theta: T) -> C<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// Complex standard normal: real and imaginary parts are independent `N(0, 1)`.
pub fn complex_normal<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re), T::lit(im))
}

/// Euclidean norm of a complex vector.
pub fn vec_norm<T: Real>(v: &[C<T>]) -> T {
    // scaled accumulation avoids overflow for huge coefficients
    let scale = v.iter().fold(T::zero(), |m, z| m.max(z.re.abs()).max(z.im.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    let s = v.iter().fold(T::zero(), |acc, z| acc + (z / scale).norm_sqr());
    scale * s.sqrt()
}

/// Hermitian inner product `⟨a, b⟩ = Σ a_j · conj(b_j)`.
pub fn inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).fold(czero(), |acc, (x, y)| acc + x * y.conj())
}

/// Bilinear pairing of a covector with a vector, `Σ λ_j v_j` (no conjugation).
pub fn pair<T: Real>(covector: &[C<T>], v: &[C<T>]) -> C<T> {
    covector.iter().zip(v).fold(czero(), |acc, (x, y)| acc + x * y)
}

/// Returns `v / ‖v‖`, or `None` for a (numerically) zero vector.
pub fn normalized<T: Real>(v: &[C<T>]) -> Option<Vec<C<T>>> {
    let nrm = vec_norm(v);
    if !(nrm > T::min_positive_value()) || !nrm.is_finite() {
        return None;
    }
    Some(v.iter().map(|z| z / nrm).collect())
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut t = theta % two_pi;
    if t > T::PI() {
        t = t - two_pi;
    } else if t <= -T::PI() {
        t = t + two_pi;
    }
    t
}

/// Principal argument in `(−π, π]`; an argument of exactly `−π` maps to `+π`.
#[inline]
pub fn principal_arg<T: Real>(z: C<T>) -> T {
    let a = z.arg();
    if a <= -T::PI() {
        T::PI()
    } else {
        a
    }
}

/// `n!` as a real number.
pub fn factorial<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::from_usize_lossy(k))
}

/// Binomial coefficient `C(n, k)` as an integer.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Fubini–Study distance `arcsin √(1 − |⟨x, y⟩|²)` between unit representatives.
///
/// The radicand is evaluated as the squared norm of the component of `y`
/// orthogonal to `x`, which keeps full relative accuracy for nearby points.
pub fn fubini_study<T: Real>(x: &[C<T>], y: &[C<T>]) -> T {
    let nx2 = inner(x, x).re;
    let ny = vec_norm(y);
    if !(nx2 > T::zero()) || !(ny > T::zero()) {
        return T::nan();
    }
    let proj = inner(y, x) / nx2;
    let perp: Vec<C<T>> = y.iter().zip(x).map(|(b, a)| b - proj * a).collect();
    let s = (vec_norm(&perp) / ny).max(T::zero()).min(T::one());
    s.asin()
}
