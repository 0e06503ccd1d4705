//! Homotopy continuation along rigid paths for square systems of
//! homogeneous polynomial equations.
//!
//! A system `F = (f_1, …, f_n)` in `n + 1` variables is deformed by moving
//! each equation with its own unitary change of variables, `f_i ∘ u_i*`.
//! [`rigid::solve`] samples a start pair `(𝐯, η)` with `η` a known zero of
//! `𝐯·F`, then follows it along a path in `U(n+1)ⁿ` to the target with
//! projective Newton steps sized by the condition numbers in
//! [`conditioning`].
//!
//! Everything is generic over the real scalar (`f32` or `f64`); the aliases
//! below fix the common choices.
//!
//! ```
//! use rand::SeedableRng;
//! use rigid_hc::{rigid, PolySystemF64, UnitaryTupleF64};
//!
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
//! let f = PolySystemF64::kostlan_sample(&[2, 2], &mut rng);
//! let target = UnitaryTupleF64::identity(2);
//! let out = rigid::solve(&f, &target, &mut rng, &rigid::TrackerSettings::default()).unwrap();
//! assert!(out.certified());
//! ```

// `!(x > y)` is used on purpose so that NaN takes the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod conditioning;
pub mod error;
pub mod harness;
pub mod hpoly;
pub mod linalg;
pub mod rigid;
pub mod rng;
pub mod scalar;
pub mod unitary;
pub mod zeros;

pub use error::{Error, Result};
pub use hpoly::{HomogeneousPoly, PolySystem};
pub use rigid::{ContinuationStats, Outcome, RigidPair, TrackerSettings};
pub use scalar::Real;
pub use unitary::{PathKind, UnitaryMatrix, UnitaryTuple};
pub use zeros::ProjectivePoint;

pub type PolyF64 = HomogeneousPoly<f64>;
pub type PolySystemF64 = PolySystem<f64>;
pub type UnitaryMatrixF64 = UnitaryMatrix<f64>;
pub type UnitaryTupleF64 = UnitaryTuple<f64>;
pub type ProjectivePointF64 = ProjectivePoint<f64>;

pub type PolyF32 = HomogeneousPoly<f32>;
pub type PolySystemF32 = PolySystem<f32>;
pub type UnitaryMatrixF32 = UnitaryMatrix<f32>;
pub type UnitaryTupleF32 = UnitaryTuple<f32>;
pub type ProjectivePointF32 = ProjectivePoint<f32>;
