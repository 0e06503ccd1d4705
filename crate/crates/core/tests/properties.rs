//! Property tests across modules, driven by seeds.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rigid_hc::conditioning::{hat_gamma_frob, kappa};
use rigid_hc::harness::{parse_system, serialize_system};
use rigid_hc::rigid::sample_solution_variety;
use rigid_hc::unitary::{build_path, PathKind};
use rigid_hc::zeros::{newton_step, residuals};
use rigid_hc::{PolySystemF64, ProjectivePointF64, UnitaryTupleF64};

mod common;

fn degrees() -> impl Strategy<Value = Vec<usize>> {
    (1usize..=3).prop_flat_map(|n| proptest::collection::vec(1usize..=4, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn system_files_round_trip(seed in any::<u64>(), degs in degrees()) {
        let f = PolySystemF64::kostlan_sample(&degs, &mut ChaCha8Rng::seed_from_u64(seed));
        let text = serialize_system(&f);
        let g = parse_system(&text).unwrap();
        prop_assert_eq!(f.polys(), g.polys());
        prop_assert_eq!(serialize_system(&g), text);
    }

    #[test]
    fn condition_numbers_are_left_invariant(seed in any::<u64>(), degs in degrees()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = degs.len();
        let f = PolySystemF64::kostlan_sample(&degs, &mut rng);
        let u = UnitaryTupleF64::sample(n, &mut rng);
        let z = ProjectivePointF64::new((0..=n).map(|_| rigid_hc::scalar::complex_normal(&mut rng)).collect()).unwrap();
        // acting by the same w on every u_i and on z leaves (𝐮·F, z) congruent
        let w = rigid_hc::unitary::sample_unitary::<f64, _>(n + 1, &mut rng);
        let ws = UnitaryTupleF64::new(vec![w.clone(); n]).unwrap();
        let moved = ProjectivePointF64::new(w.apply(z.rep())).unwrap();
        let a = hat_gamma_frob(&f, &u, &z).unwrap();
        let b = hat_gamma_frob(&f, &u.left_mul(&ws), &moved).unwrap();
        prop_assert!((a.kappa - b.kappa).abs() <= 1e-8 * a.kappa);
        prop_assert!((a.hat_gamma_frob - b.hat_gamma_frob).abs() <= 1e-8 * a.hat_gamma_frob.max(1.0));
        prop_assert!(kappa(&f, &u, &z).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn gamma_frob_matches_tensor_enumeration(seed in any::<u64>(), n in 1usize..=2, d in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = rigid_hc::PolyF64::kostlan_sample(n, d, &mut rng);
        let z = ProjectivePointF64::new((0..=n).map(|_| rigid_hc::scalar::complex_normal(&mut rng)).collect()).unwrap();
        let grad = common::frobenius_of_derivative(&f, 1, z.rep());
        let oracle = (2..=d)
            .map(|k| (common::frobenius_of_derivative(&f, k, z.rep()) / grad).powf(1.0 / (k as f64 - 1.0)))
            .fold(0.0, f64::max);
        let got = rigid_hc::conditioning::gamma_frob(&f, &z).unwrap();
        prop_assert!((got - oracle).abs() <= 1e-10 * oracle);
    }

    #[test]
    fn sampled_pairs_are_newton_fixed_points(seed in any::<u64>(), degs in degrees()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = PolySystemF64::kostlan_sample(&degs, &mut rng);
        let pair = sample_solution_variety(&f, &mut rng).unwrap();
        prop_assert!(pair.residuals.iter().all(|&r| r <= 1e-10));
        let next = newton_step(&f, &pair.u, &pair.zeta).unwrap();
        prop_assert!(next.distance(&pair.zeta) <= 1e-8);
        prop_assert!(residuals(&f, &pair.u, &next).unwrap().iter().all(|&r| r <= 1e-10));
    }

    #[test]
    fn path_endpoints_and_length(seed in any::<u64>(), n in 1usize..=4, householder in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = UnitaryTupleF64::sample(n, &mut rng);
        let u = UnitaryTupleF64::sample(n, &mut rng);
        let kind = if householder { PathKind::Householder } else { PathKind::Geodesic };
        let p = build_path(&v, &u, kind).unwrap();
        prop_assert!(p.length() <= 4.0 * n as f64);
        prop_assert!(p.evaluate(0.0).unwrap().max_entry_distance(&v) <= 1e-8);
        prop_assert!(p.evaluate(p.length()).unwrap().max_entry_distance(&u) <= 1e-8);
    }
}
