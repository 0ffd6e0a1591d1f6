#![allow(dead_code)]

use spectral_series::prelude::*;

pub fn spiral(n: usize, noise: f64, seed: u64) -> Dataset {
    gen_spiral(n, noise, SPIRAL_U_MAX, seed).unwrap()
}

pub fn gaussian(eps: f64) -> KernelSpec {
    KernelSpec::gaussian(eps).unwrap()
}

/// `(1/n) Σ_i ψ_j(i) ψ_k(i) ŝ_i` for every pair `(j, k)`.
pub fn weighted_inner(basis: &EigenBasis) -> Mat<f64> {
    let psi = basis.eigenvectors();
    let s = basis.stationary();
    let n = basis.n();
    let k = psi.ncols();
    Mat::from_fn(k, k, |a, b| {
        (0..n).map(|i| psi[(i, a)] * psi[(i, b)] * s[i]).sum::<f64>() / n as f64
    })
}

pub fn max_offset_from_identity(m: &Mat<f64>, scale: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { scale } else { 0.0 };
            worst = worst.max((m[(i, j)] - target).abs());
        }
    }
    worst
}

/// `‖𝔸ψ_j − λ_j ψ_j‖_∞` over all stored components, with `𝔸` the
/// row-stochastic matrix rebuilt independently from the kernel.
pub fn eigen_residual(basis: &EigenBasis) -> f64 {
    let x = basis.training_points();
    let k = gram_matrix(basis.kernel(), x, x).unwrap();
    let n = basis.n();
    let rows: Vec<f64> = (0..n).map(|i| (0..n).map(|j| k[(i, j)]).sum()).collect();
    let psi = basis.eigenvectors();
    let mut worst: f64 = 0.0;
    for (c, &lambda) in basis.eigenvalues().iter().enumerate() {
        for i in 0..n {
            let av: f64 = (0..n).map(|l| k[(i, l)] * psi[(l, c)]).sum::<f64>() / rows[i];
            worst = worst.max((av - lambda * psi[(i, c)]).abs());
        }
    }
    worst
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn col(m: MatRef<'_, f64>, j: usize) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}
