//! Shared fixtures for the criterion benches.

use spectral_series::prelude::*;

pub fn spiral(n: usize, seed: u64) -> Dataset {
    gen_spiral(n, SPIRAL_NOISE_SD, SPIRAL_U_MAX, seed).expect("spiral fixture")
}

pub fn circle(n: usize, d: usize, seed: u64) -> Dataset {
    gen_circle(n, d, CIRCLE_NOISE_VAR, false, seed).expect("circle fixture")
}

/// Median-ish bandwidth for `x`, taken from a one-point grid.
pub fn bandwidth(x: MatRef<'_, f64>) -> f64 {
    bandwidth_grid(x, 1).expect("bandwidth")[0]
}

/// Symmetric normalized Gram matrix D^{-1/2} K D^{-1/2} of a circle sample.
pub fn symmetric_kernel(n: usize, d: usize, seed: u64) -> Mat<f64> {
    let ds = circle(n, d, seed);
    let x = ds.features();
    let kernel = KernelSpec::gaussian(bandwidth(x)).unwrap();
    let k = gram_matrix(&kernel, x, x).unwrap();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|i| 1.0 / (0..n).map(|j| k[(i, j)]).sum::<f64>().sqrt())
        .collect();
    Mat::from_fn(n, n, |i, j| k[(i, j)] * inv_sqrt[i] * inv_sqrt[j])
}
