use gcurkit::matkit::{lstsq, max_principal_angle, orthonormality_error, spectral_norm, svd, thin_qr};
use gcurkit::synth::{gaussian, stream_rng};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn factorizations_reconstruct(seed in any::<u64>(), m in 1usize..=50, n in 1usize..=50) {
        let a = gaussian(m, n, &mut stream_rng(seed, 0));
        let na = spectral_norm(&a).unwrap();
        let f = svd(&a).unwrap();
        prop_assert!(spectral_norm(&a.sub(&f.reconstruct())).unwrap() <= 1e-10 * na);
        prop_assert!(orthonormality_error(&f.w) <= 1e-12 * 50.0);
        prop_assert!(f.psi.windows(2).all(|w| w[0] >= w[1]) && f.psi.iter().all(|&p| p >= 0.0));
        if m >= n {
            let qr = thin_qr(&a).unwrap();
            prop_assert!(spectral_norm(&a.sub(&qr.q.matmul(&qr.t))).unwrap() <= 1e-10 * na);
            for j in 0..n {
                prop_assert!(qr.t[(j, j)] >= 0.0);
                for i in j + 1..n {
                    prop_assert_eq!(qr.t[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn least_squares_is_optimal(seed in any::<u64>(), m in 2usize..20, n in 1usize..8) {
        let mut rng = stream_rng(seed, 1);
        let a = gaussian(m, n, &mut rng);
        let b = gaussian(m, 2, &mut rng);
        let x = lstsq(&a, &b).unwrap();
        let base = a.matmul(&x).sub(&b).fro_norm();
        for _ in 0..100 {
            let other = x.add(&gaussian(x.rows(), x.cols(), &mut rng).scale(1e-3));
            prop_assert!(base <= a.matmul(&other).sub(&b).fro_norm() + 1e-12);
        }
    }

    #[test]
    fn principal_angle_is_symmetric(seed in any::<u64>(), n in 2usize..20, k in 1usize..5) {
        let k = k.min(n);
        let mut rng = stream_rng(seed, 2);
        let u1 = thin_qr(&gaussian(n, k, &mut rng)).unwrap().q;
        let u2 = thin_qr(&gaussian(n, k, &mut rng)).unwrap().q;
        let t1 = max_principal_angle(&u1, &u2).unwrap();
        let t2 = max_principal_angle(&u2, &u1).unwrap();
        prop_assert!((t1 - t2).abs() <= 1e-12, "{} vs {}", t1, t2);
        prop_assert!((0.0..=std::f64::consts::FRAC_PI_2).contains(&t1));
    }
}
