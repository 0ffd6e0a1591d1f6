use proptest::prelude::*;
use spectral_series::baselines::{knn_predict, nw_predict};
use spectral_series::dataset::split_indices;
use spectral_series::kernels::gram_matrix;
use spectral_series::prelude::*;

fn matrix(n: usize, d: usize, vals: &[f64]) -> Mat<f64> {
    Mat::from_fn(n, d, |i, j| vals[i * d + j])
}

fn points(max_n: usize, d: usize) -> impl Strategy<Value = Mat<f64>> {
    (2..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(-3.0f64..3.0, n * d).prop_map(move |v| matrix(n, d, &v))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn split_is_a_partition(n in 3usize..300, seed in any::<u64>()) {
        let idx = split_indices(n, &SplitSpec::standard(seed)).unwrap();
        let mut all: Vec<usize> = idx.train.iter().chain(&idx.val).chain(&idx.test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn standardize_is_idempotent(x in points(30, 3)) {
        let ds = Dataset::new(x, None, None).unwrap();
        let (once, _) = standardize(&ds).unwrap();
        let (twice, _) = standardize(&once).unwrap();
        for i in 0..once.n() {
            for j in 0..once.d() {
                prop_assert!((once.features()[(i, j)] - twice.features()[(i, j)]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn standardizer_round_trips(x in points(20, 4)) {
        let s = Standardizer::fit(x.as_ref()).unwrap();
        let back = s.inverse_transform(s.transform(x.as_ref()).unwrap().as_ref()).unwrap();
        for i in 0..x.nrows() {
            for j in 0..x.ncols() {
                if s.constant[j] { continue; }
                let tol = 1e-12 * x[(i, j)].abs().max(1.0);
                prop_assert!((back[(i, j)] - x[(i, j)]).abs() <= tol);
            }
        }
    }

    #[test]
    fn rotated_circle_has_unit_rows(n in 1usize..50, d in 2usize..20, seed in any::<u64>()) {
        let ds = gen_circle(n, d, 0.0, true, seed).unwrap();
        for i in 0..n {
            let norm: f64 = (0..d).map(|j| ds.features()[(i, j)].powi(2)).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_spiral_angle_matches_response(n in 1usize..100, seed in any::<u64>()) {
        let ds = gen_spiral(n, 0.0, SPIRAL_U_MAX, seed).unwrap();
        let y = ds.responses().unwrap();
        for (i, &yi) in y.iter().enumerate() {
            let (a, b) = (ds.features()[(i, 0)], ds.features()[(i, 1)]);
            if a.hypot(b) < 1e-8 { continue; }
            let diff = (b.atan2(a) - yi).rem_euclid(2.0 * std::f64::consts::PI);
            let diff = diff.min(2.0 * std::f64::consts::PI - diff);
            prop_assert!(diff < 1e-10);
        }
    }

    #[test]
    fn self_gram_is_symmetric_and_psd(x in points(40, 3), eps in 0.01f64..10.0) {
        let k = gram_matrix(&KernelSpec::gaussian(eps).unwrap(), x.as_ref(), x.as_ref()).unwrap();
        let n = x.nrows();
        let mut norm: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(k[(i, j)], k[(j, i)]);
                norm += k[(i, j)] * k[(i, j)];
            }
        }
        let eig = k.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        prop_assert!(eig[0] >= -1e-8 * norm.sqrt());
    }

    #[test]
    fn polynomial_on_unit_rows_is_bounded(x in points(20, 4), q in 1u32..7) {
        let unit = spectral_series::dataset::unit_normalize_matrix(x.as_ref());
        prop_assume!(unit.is_ok());
        let unit = unit.unwrap();
        let k = gram_matrix(&KernelSpec::polynomial(q).unwrap(), unit.as_ref(), unit.as_ref()).unwrap();
        let hi = 2f64.powi(q as i32) * (1.0 + 1e-12);
        for i in 0..k.nrows() {
            for j in 0..k.ncols() {
                prop_assert!(k[(i, j)] >= -1e-12 && k[(i, j)] <= hi);
            }
        }
    }

    #[test]
    fn gaussian_ignores_coordinate_order(
        x in prop::collection::vec(-5.0f64..5.0, 4),
        y in prop::collection::vec(-5.0f64..5.0, 4),
        eps in 0.01f64..5.0,
    ) {
        let spec = KernelSpec::gaussian(eps).unwrap();
        let perm = [2, 0, 3, 1];
        let xp: Vec<f64> = perm.iter().map(|&i| x[i]).collect();
        let yp: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
        let a = kernel_value(&spec, &x, &y).unwrap();
        let b = kernel_value(&spec, &xp, &yp).unwrap();
        prop_assert!((a - b).abs() <= 1e-15);
        prop_assert_eq!(a, kernel_value(&spec, &y, &x).unwrap());
    }

    #[test]
    fn stationary_weights_sum_to_one(x in points(30, 2), eps in 0.05f64..5.0) {
        let k = gram_matrix(&KernelSpec::gaussian(eps).unwrap(), x.as_ref(), x.as_ref()).unwrap();
        let s = spectral_series::diffusion::stationary_weights(k.as_ref()).unwrap();
        prop_assert!(s.iter().all(|&v| v >= 0.0));
        prop_assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nadaraya_watson_stays_in_envelope(
        x in points(25, 2),
        q in points(10, 2),
        eps in 1e-4f64..10.0,
        seed in any::<u64>(),
    ) {
        let y: Vec<f64> = (0..x.nrows()).map(|i| ((i as u64 ^ seed) % 17) as f64 - 8.0).collect();
        let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let p = nw_predict(x.as_ref(), &y, eps, q.as_ref()).unwrap();
        prop_assert!(p.iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12));
    }

    #[test]
    fn knn_ignores_training_order(x in points(25, 2), q in points(8, 2), k in 1usize..5) {
        let n = x.nrows();
        let k = k.min(n);
        // distinct labels per row, so only genuine distance ties could matter
        let y: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let rev = Mat::from_fn(n, 2, |i, j| x[(n - 1 - i, j)]);
        let yrev: Vec<f64> = y.iter().rev().copied().collect();
        let a = knn_predict(x.as_ref(), &y, k, q.as_ref()).unwrap();
        let b = knn_predict(rev.as_ref(), &yrev, k, q.as_ref()).unwrap();
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn loss_is_permutation_invariant(v in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..40)) {
        let (p, y): (Vec<f64>, Vec<f64>) = v.iter().copied().unzip();
        let (pr, yr): (Vec<f64>, Vec<f64>) = v.iter().rev().copied().unzip();
        let a = empirical_loss(&p, &y).unwrap();
        let b = empirical_loss(&pr, &yr).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn se_shrinks_with_replication(v in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 2..20)) {
        let (p, y): (Vec<f64>, Vec<f64>) = v.iter().copied().unzip();
        let p4: Vec<f64> = p.iter().cycle().take(4 * p.len()).copied().collect();
        let y4: Vec<f64> = y.iter().cycle().take(4 * y.len()).copied().collect();
        let a = loss_se(&p, &y).unwrap();
        let b = loss_se(&p4, &y4).unwrap();
        let n = p.len() as f64;
        let expect = a * ((n - 1.0) / (4.0 * n - 1.0)).sqrt();
        prop_assert!((b - expect).abs() <= 1e-9 * a.max(1e-12));
    }
}
