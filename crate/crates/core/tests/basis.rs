mod common;

use common::*;
use faer::Side;
use spectral_series::diffusion::{row_stochastic, stationary_weights, symmetric_normalize};
use spectral_series::model_selection::spearman;
use spectral_series::prelude::*;

#[test]
fn spiral_basis_passes_invariants() {
    let ds = spiral(50, 0.05, 3);
    let basis = fit_basis(ds.features(), &gaussian(0.5), 10, &BasisOptions::default()).unwrap();
    assert!((basis.eigenvalues()[0] - 1.0).abs() < 1e-8);
    let psi0 = col(basis.eigenvectors(), 0);
    assert!(psi0.iter().all(|v| (v - psi0[0]).abs() < 1e-6));
    assert!(max_offset_from_identity(&weighted_inner(&basis), 1.0) < 1e-8);
    assert!(eigen_residual(&basis) < 1e-8);
    let lam = basis.eigenvalues();
    assert!(lam.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn symmetrized_and_markov_matrices_share_eigenvalues() {
    let ds = gen_uniform_interval(20, -1.0, 1.0, 9).unwrap();
    let k = gram_matrix(&gaussian(0.1), ds.features(), ds.features()).unwrap();
    let sym = symmetric_normalize(k.as_ref()).unwrap();
    let markov = row_stochastic(k.as_ref()).unwrap();
    let mut a: Vec<f64> = sym.self_adjoint_eigenvalues(Side::Lower).unwrap();
    let mut b: Vec<f64> = markov.eigenvalues().unwrap().iter().map(|c| c.re).collect();
    assert!(markov.eigenvalues().unwrap().iter().all(|c| c.im.abs() < 1e-10));
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10, "{x} vs {y}");
    }
    for i in 0..20 {
        for j in 0..20 {
            assert_eq!(sym[(i, j)], sym[(j, i)]);
        }
    }
}

#[test]
fn full_eigenvalues_match_general_solver() {
    for (seed, eps) in [(1u64, 0.3), (2, 1.0), (3, 4.0)] {
        let ds = spiral(40, 0.1, seed);
        let basis = fit_basis(ds.features(), &gaussian(eps), 39, &BasisOptions::default()).unwrap();
        let k = gram_matrix(&gaussian(eps), ds.features(), ds.features()).unwrap();
        let markov = row_stochastic(k.as_ref()).unwrap();
        let mut oracle: Vec<f64> = markov.eigenvalues().unwrap().iter().map(|c| c.re).collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        for (x, y) in basis.eigenvalues().iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-8, "eps {eps}: {x} vs {y}");
        }
        assert!(basis.eigenvalues().iter().all(|l| *l <= 1.0 + 1e-10 && *l >= -1.0 - 1e-10));
    }
}

#[test]
fn stationary_weights_are_left_fixed_point() {
    let ds = gen_circle(30, 3, 0.0, true, 4).unwrap();
    let k = gram_matrix(&gaussian(0.2), ds.features(), ds.features()).unwrap();
    let s = stationary_weights(k.as_ref()).unwrap();
    let a = row_stochastic(k.as_ref()).unwrap();
    assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    for j in 0..30 {
        let sa: f64 = (0..30).map(|i| s[i] * a[(i, j)]).sum();
        assert!((sa - s[j]).abs() < 1e-10);
    }
}

#[test]
fn orthonormality_over_modes_and_sizes() {
    let ds = spiral(300, 0.1, 5);
    for mode in [
        NormalizationMode::Stochastic,
        NormalizationMode::Symmetric,
        NormalizationMode::BiasCorrected,
    ] {
        let opts = BasisOptions { mode, ..Default::default() };
        let basis = fit_basis(ds.features(), &gaussian(1.0), 50, &opts).unwrap();
        let err = max_offset_from_identity(&weighted_inner(&basis), 1.0);
        assert!(err < 1e-8, "{mode:?}: {err}");
    }
}

#[test]
fn uniform_mode_polynomial_columns_are_orthonormal() {
    let ds = spiral(60, 0.1, 6);
    let opts = BasisOptions {
        mode: NormalizationMode::Uniform,
        ..Default::default()
    };
    let basis = fit_basis(ds.features(), &KernelSpec::polynomial(3).unwrap(), 9, &opts).unwrap();
    let psi = basis.eigenvectors();
    let n = basis.n() as f64;
    // Uniform weights: (1/n) Σ ψ_j ψ_k (1/n) = δ_jk, i.e. (1/n) Σ ψ_j ψ_k = n δ_jk.
    for a in 0..10 {
        for b in 0..10 {
            let ip: f64 = (0..basis.n()).map(|i| psi[(i, a)] * psi[(i, b)]).sum::<f64>() / n;
            let target = if a == b { n } else { 0.0 };
            assert!((ip - target).abs() < 1e-8 * n);
        }
    }
}

#[test]
fn randomized_is_deterministic_and_close_to_full() {
    let ds = spiral(300, 0.1, 8);
    let kernel = gaussian(2.0);
    let full = fit_basis(ds.features(), &kernel, 20, &BasisOptions::default()).unwrap();
    let opts = BasisOptions {
        method: EigenMethod::randomized(11),
        ..Default::default()
    };
    let a = fit_basis(ds.features(), &kernel, 20, &opts).unwrap();
    let b = fit_basis(ds.features(), &kernel, 20, &opts).unwrap();
    assert_eq!(a.eigenvalues(), b.eigenvalues());
    assert!(a.eigenvectors() == b.eigenvectors());
    for (x, y) in a.eigenvalues().iter().zip(full.eigenvalues()) {
        assert!(((x - y) / y).abs() < 1e-3, "{x} vs {y}");
    }
}

#[test]
fn nystrom_reproduces_training_rows() {
    let ds = spiral(200, 0.1, 12);
    for eps in bandwidth_grid(ds.features(), 5).unwrap() {
        let basis = fit_basis(ds.features(), &gaussian(eps), 20, &BasisOptions::default()).unwrap();
        let j = basis.extendable_j().unwrap();
        let ext = extend(&basis, ds.features(), j).unwrap();
        let psi = basis.eigenvectors();
        for c in 0..=j {
            let scale = (0..basis.n()).map(|i| psi[(i, c)].abs()).fold(0.0, f64::max);
            // 1/λ amplifies the rounding error in the stored vector
            let tol = f64::max(1e-10, 64.0 * f64::EPSILON * scale / basis.eigenvalues()[c]);
            for i in 0..basis.n() {
                assert!((ext[(i, c)] - psi[(i, c)]).abs() < tol, "eps {eps}, ({i}, {c})");
            }
        }
    }
}

#[test]
fn nystrom_constant_column_and_far_points() {
    let ds = spiral(80, 0.1, 13);
    let eps = 0.5;
    let basis = fit_basis(ds.features(), &gaussian(eps), 8, &BasisOptions::default()).unwrap();
    let psi0 = basis.eigenvectors()[(0, 0)];
    let far = 20.0 * (4.0 * eps).sqrt() + 20.0;
    let queries = Mat::from_fn(4, 2, |i, j| match (i, j) {
        (0, _) => 0.3,
        (1, 0) => far,
        (1, _) => 0.0,
        (2, _) => -far,
        (3, 0) => 1e6,
        _ => 1e6,
    });
    let ext = extend(&basis, queries.as_ref(), 8).unwrap();
    for i in 0..4 {
        assert!((ext[(i, 0)] - psi0).abs() < 1e-8);
        for c in 0..=8 {
            assert!(ext[(i, c)].is_finite());
        }
    }
}

#[test]
fn nystrom_is_continuous() {
    let ds = spiral(150, 0.1, 14);
    let basis = fit_basis(ds.features(), &gaussian(1.0), 6, &BasisOptions::default()).unwrap();
    let base = Mat::from_fn(5, 2, |i, j| ds.features()[(10 * i, j)] + 0.01);
    let moved = Mat::from_fn(5, 2, |i, j| base[(i, j)] + 1e-6);
    let a = extend(&basis, base.as_ref(), 6).unwrap();
    let b = extend(&basis, moved.as_ref(), 6).unwrap();
    for i in 0..5 {
        for c in 0..=6 {
            assert!((a[(i, c)] - b[(i, c)]).abs() < 1e-4);
        }
    }
}

#[test]
fn eigenmap_follows_the_arc() {
    let ds = spiral(400, 0.05, 15);
    let x = ds.features();
    let eps = bandwidth_grid(x, 1).unwrap()[0] / 10.0;
    let basis = fit_basis(x, &gaussian(eps), 2, &BasisOptions::default()).unwrap();
    let coords = eigenmap(&basis, x, 1).unwrap();
    assert_eq!(coords.shape(), (400, 1));
    let rho = spearman(&col(coords.as_ref(), 0), ds.responses().unwrap()).unwrap();
    assert!(rho.abs() >= 0.95, "rho = {rho}");

    let two = eigenmap(&basis, x, 2).unwrap();
    for i in 0..400 {
        for c in 0..2 {
            assert!((two[(i, c)] - basis.eigenvectors()[(i, c + 1)]).abs() < 1e-10);
        }
    }
}

#[test]
fn smoothness_spectrum_is_monotone() {
    let ds = spiral(100, 0.1, 16);
    let basis = fit_basis(ds.features(), &gaussian(0.7), 15, &BasisOptions::default()).unwrap();
    let nu = smoothness_spectrum(&basis).unwrap();
    assert!(nu[0].abs() < 1e-8);
    assert!(nu.windows(2).all(|w| w[1] >= w[0]));
    assert!(nu.iter().all(|&v| v >= 0.0));
}
