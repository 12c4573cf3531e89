use nalgebra::{Matrix3, Vector2, Vector3};
use photopol::linalg::{max_abs_diff, min_eigenvalue};
use photopol::scattering::{identity, pauli_depolarizer};
use photopol::*;
use proptest::prelude::*;
use std::sync::Arc;

fn wave_vector() -> impl Strategy<Value = Vector3<f64>> {
    (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0)
        .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-6)
        .prop_map(|(x, y, z)| Vector3::new(x, y, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn frame_is_orthogonal_and_spans_transverse_plane(k in wave_vector(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let basis = ReferenceBasis::from_rotation(&random::rotation(&mut rng)).unwrap();
        let grid = Arc::new(ModeGrid::single(k).unwrap());
        let frame = frame_map(&grid, &basis).unwrap();
        let l = frame.lambda(0);
        prop_assert!((l.transpose() * l - Matrix3::identity()).abs().max() <= 1e-12);
        let khat = basis.components(&k).normalize();
        prop_assert!((l.column(2) - khat).abs().max() <= 1e-12);
        let delta = transverse_delta(&basis.components(&k)).unwrap();
        let sum = l.column(0) * l.column(0).transpose() + l.column(1) * l.column(1).transpose();
        prop_assert!((sum - delta).abs().max() <= 1e-12);
    }

    #[test]
    fn transverse_delta_is_rank_two_projector(k in wave_vector()) {
        let d = transverse_delta(&k).unwrap();
        prop_assert!((d * d - d).abs().max() <= 1e-12);
        prop_assert!((d.trace() - 2.0).abs() <= 1e-12);
        prop_assert!((d * k).abs().max() <= 1e-12 * k.norm());
    }

    #[test]
    fn triad_is_deterministic_and_right_handed(k in wave_vector()) {
        let a = polarization_triad(&k).unwrap();
        let b = polarization_triad(&k).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a[0].dot(&a[1]).abs() <= 1e-15);
        prop_assert!((a[0].cross(&a[1]) - k / k.norm()).norm() <= 1e-15);
    }

    #[test]
    fn rotated_basis_frame_is_rt_lambda(k in wave_vector(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let r = random::rotation(&mut rng);
        let grid = Arc::new(ModeGrid::single(k).unwrap());
        let l = *frame_map(&grid, &ReferenceBasis::standard()).unwrap().lambda(0);
        let lr = *frame_map(&grid, &ReferenceBasis::from_rotation(&r).unwrap()).unwrap().lambda(0);
        // definition check by explicit dot products
        let eps = polarization_triad(&k).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let direct = r.column(a).dot(&eps[b]);
                prop_assert!((lr[(a, b)] - direct).abs() <= 1e-12);
            }
        }
        prop_assert!((lr - r.transpose() * l).abs().max() <= 1e-12);
    }

    #[test]
    fn stokes_round_trip_and_linearity(seed in any::<u64>(), k in 1usize..5, alpha in -2.0f64..2.0, beta in -2.0f64..2.0) {
        let mut rng = random::rng(seed);
        let grid = random::grid(&mut rng, k);
        let a = random::state(&mut rng, &grid, 3);
        let b = random::state(&mut rng, &grid, 1);
        let (back, _) = state_from_stokes(&two_mode_stokes(&a)).unwrap();
        prop_assert!(max_abs_diff(back.weighted(), a.weighted()) <= 1e-12);

        let combo = PhotonState::from_weighted(
            Arc::clone(&grid),
            a.weighted() * Complex64::new(alpha, 0.0) + b.weighted() * Complex64::new(beta, 0.0),
        ).unwrap();
        let lhs = two_mode_stokes(&combo);
        let (sa, sb) = (two_mode_stokes(&a), two_mode_stokes(&b));
        let rhs: Vec<[Complex64; 4]> = sa.values().iter().zip(sb.values())
            .map(|(x, y)| std::array::from_fn(|mu| x[mu] * alpha + y[mu] * beta))
            .collect();
        let rhs = StokesField::from_values(Arc::clone(&grid), rhs).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        prop_assert!(sa.conjugate_symmetry_defect() <= 1e-12);
        for i in 0..k {
            for mu in 0..4 {
                prop_assert!(sa.get(i, i)[mu].im.abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn mixtures_stay_normalized_and_positive(seed in any::<u64>(), k in 1usize..5, w in proptest::collection::vec(0.0f64..3.0, 1..5)) {
        prop_assume!(w.iter().sum::<f64>() > 1e-3);
        let mut rng = random::rng(seed);
        let grid = random::grid(&mut rng, k);
        let states: Vec<PhotonState> = w.iter().map(|_| random::pure_state(&mut rng, &grid)).collect();
        let parts: Vec<(f64, &PhotonState)> = w.iter().copied().zip(states.iter()).collect();
        let m = mixed_state(&parts).unwrap();
        let d = validate(&m);
        prop_assert!((d.trace - 1.0).abs() <= 1e-12);
        prop_assert!(d.min_eigenvalue >= -1e-10);
    }

    #[test]
    fn wave_packets_are_pure(seed in any::<u64>(), k in 1usize..6) {
        let mut rng = random::rng(seed);
        let grid = random::grid(&mut rng, k);
        let amps: Vec<Complex64> = (0..k).map(|_| random::complex_normal(&mut rng)).collect();
        let pols: Vec<Vector2<Complex64>> = (0..k)
            .map(|_| Vector2::new(random::complex_normal(&mut rng), random::complex_normal(&mut rng)))
            .collect();
        let s = wave_packet_state(&grid, &amps, &pols).unwrap();
        let rho = s.weighted();
        prop_assert!(max_abs_diff(&(rho * rho), rho) <= 1e-10);
        prop_assert!((s.trace() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn correlation_covariance_and_monotonicity(seed in any::<u64>(), k in 1usize..5) {
        let mut rng = random::rng(seed);
        let grid = random::grid(&mut rng, k);
        let s = random::state(&mut rng, &grid, 2);
        let std = frame_map(&grid, &ReferenceBasis::standard()).unwrap();
        let j = correlation_matrix(&s, &std).unwrap();
        prop_assert!((j.trace() - photon_number(&s)).abs() <= 1e-10);
        let jm = j.matrix();
        prop_assert!((jm - jm.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max) <= 1e-12);

        let r = random::rotation(&mut rng);
        let rot = frame_map(&grid, &ReferenceBasis::from_rotation(&r).unwrap()).unwrap();
        let jr = correlation_matrix(&s, &rot).unwrap();
        let rc = r.map(|x| Complex64::new(x, 0.0));
        let expect = rc.transpose() * jm * rc;
        prop_assert!((jr.matrix() - expect).iter().map(|z| z.norm()).fold(0.0, f64::max) <= 1e-10);

        let mut prev = 0.0;
        for n in 1..=k {
            let idx: Vec<usize> = (0..n).collect();
            let t = correlation_matrix_detected(&s, &std, &idx).unwrap().trace();
            prop_assert!(t >= prev - 1e-15);
            prev = t;
        }
    }

    #[test]
    fn channel_and_stokes_paths_commute(seed in any::<u64>(), k in 1usize..5, n in 1usize..17, complete in any::<bool>()) {
        let mut rng = random::rng(seed);
        let grid = random::grid(&mut rng, k);
        let s = random::state(&mut rng, &grid, 3);
        let ens = if complete {
            random::kraus_complete_ensemble(&mut rng, &grid, n)
        } else {
            random::general_ensemble(&mut rng, &grid, n)
        };
        let out = apply_ensemble(&ens, &s).unwrap();
        let density = two_mode_stokes(&out);
        let stokes = propagate_stokes(&mueller_ensemble(&ens), &two_mode_stokes(&s)).unwrap();
        prop_assert!(density.max_abs_diff(&stokes) <= 1e-10);

        let d = validate(&out);
        prop_assert!(d.min_eigenvalue >= -1e-10 * d.trace);
        prop_assert!(d.hermitian);
        let preserved = (out.trace() - s.trace()).abs() <= 1e-10;
        prop_assert_eq!(preserved, ens.trace_preserving());
    }

    #[test]
    fn single_mode_reduction_matches_full_path(seed in any::<u64>(), k in 1usize..4, n in 1usize..9) {
        let mut rng = random::rng(seed);
        let grid = random::grid(&mut rng, k);
        let ens = random::general_ensemble(&mut rng, &grid, n);
        let tensor = mueller_ensemble(&ens);
        prop_assert!(tensor.aligned_reality_defect() <= 1e-12);
        let mode = (seed % k as u64) as usize;
        let pol = Vector2::new(random::complex_normal(&mut rng), random::complex_normal(&mut rng));
        let s = plane_wave_state(&grid, mode, &pol).unwrap();
        let out = propagate_stokes(&tensor, &two_mode_stokes(&s)).unwrap();
        let s_in = nalgebra::Vector4::from(two_mode_stokes(&s).mode_vector(mode));
        for q in 0..k {
            let r = reduce_single_mode(&tensor, mode, q).unwrap();
            let predicted = r * s_in;
            let actual = out.mode_vector(q);
            for mu in 0..4 {
                prop_assert!((predicted[mu] - actual[mu]).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn identity_and_depolarizer_positivity() {
    let mut rng = random::rng(77);
    let grid = random::grid(&mut rng, 3);
    let s = random::state(&mut rng, &grid, 6);
    for ens in [identity(&grid), pauli_depolarizer(&grid)] {
        let out = apply_ensemble(&ens, &s).unwrap();
        assert!(min_eigenvalue(out.weighted()) >= -1e-12);
        assert!((out.trace() - 1.0).abs() < 1e-12);
    }
}
