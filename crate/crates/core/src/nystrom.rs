//! Out-of-sample extension of basis vectors and eigenmap coordinates.
//!
//! For a query `x` the extension is `ψ_j(x) = (1/λ_j) Σ_l w_l(x) ψ_j(X_l)`
//! where `w(x)` is the row of the diffusion operator at `x`. At a training
//! point this is the eigen-equation itself, so the stored vectors are
//! reproduced.

use faer::{Mat, MatRef};
use rayon::prelude::*;

use crate::diffusion::{EigenBasis, NormalizationMode};
use crate::error::{Error, Result};
use crate::kernels::{pairwise, squared_distance, KernelSpec};

/// Operator rows `w(x_i)` for every query, `m × n`.
pub(crate) fn extension_weights(basis: &EigenBasis, xnew: MatRef<'_, f64>) -> Result<Mat<f64>> {
    if xnew.ncols() != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: xnew.ncols(),
        });
    }
    let train = basis.training_points();
    let n = basis.n();
    let kernel = *basis.kernel();
    let mut k = pairwise(xnew, train, |a, b| kernel.eval_unchecked(a, b))?;
    let p = basis.degrees();
    let n_f = n as f64;

    let mode = basis.mode();
    let rows: Vec<Vec<f64>> = (0..xnew.nrows())
        .into_par_iter()
        .map(|i| {
            let mut row: Vec<f64> = k.row(i).iter().copied().collect();
            match mode {
                NormalizationMode::Stochastic | NormalizationMode::BiasCorrected => {
                    if mode == NormalizationMode::BiasCorrected {
                        row.iter_mut().zip(p).for_each(|(v, pl)| *v /= pl);
                    }
                    let total: f64 = row.iter().sum();
                    if total > 0.0 && total.is_finite() {
                        row.iter_mut().for_each(|v| *v /= total);
                    } else {
                        log::warn!("kernel weights underflow at query {i}; using nearest-point weights");
                        row = fallback_weights(&kernel, xnew, train, i, if mode == NormalizationMode::BiasCorrected { Some(p) } else { None });
                    }
                }
                NormalizationMode::Symmetric => {
                    let total: f64 = row.iter().sum();
                    if total > 0.0 && total.is_finite() {
                        let root = total.sqrt();
                        row.iter_mut()
                            .zip(p)
                            .for_each(|(v, pl)| *v /= root * (n_f * pl).sqrt());
                    } else {
                        log::warn!("kernel weights underflow at query {i}; extension is zero");
                        row.iter_mut().for_each(|v| *v = 0.0);
                    }
                }
                NormalizationMode::Uniform => row.iter_mut().for_each(|v| *v /= n_f),
            }
            row
        })
        .collect();
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            k[(i, j)] = v;
        }
    }
    Ok(k)
}

/// Normalized weights for a query whose raw kernel row underflowed.
///
/// For Gaussian kernels the exponent is shifted by the nearest squared
/// distance, which is the exact limit of the normalized weights and
/// concentrates on the nearest training points. Other kernels put all
/// weight on the single nearest point.
fn fallback_weights(
    kernel: &KernelSpec,
    xnew: MatRef<'_, f64>,
    train: MatRef<'_, f64>,
    i: usize,
    degrees: Option<&[f64]>,
) -> Vec<f64> {
    let q: Vec<f64> = xnew.row(i).iter().copied().collect();
    let d2: Vec<f64> = (0..train.nrows())
        .map(|l| {
            let t: Vec<f64> = train.row(l).iter().copied().collect();
            squared_distance(&q, &t)
        })
        .collect();
    let (nearest, dmin) = d2
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (l, v)| if v < acc.1 { (l, v) } else { acc });
    let mut w = match kernel {
        KernelSpec::Gaussian { bandwidth } => d2
            .iter()
            .map(|v| (-(v - dmin) / (4.0 * bandwidth)).exp())
            .collect(),
        KernelSpec::Polynomial { .. } => {
            let mut w = vec![0.0; d2.len()];
            w[nearest] = 1.0;
            w
        }
    };
    if let Some(p) = degrees {
        w.iter_mut().zip(p).for_each(|(v, pl)| *v /= pl);
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

fn check_truncation(basis: &EigenBasis, j: usize) -> Result<()> {
    if j > basis.j_max() {
        return Err(Error::invalid(format!(
            "J = {j} exceeds the {} components held by the basis",
            basis.j_max()
        )));
    }
    let floor = basis.eigen_floor();
    if let Some(idx) = (0..=j).find(|&idx| !(basis.eigenvalues()[idx] > floor)) {
        return Err(Error::EigenvalueBelowFloor {
            index: idx,
            value: basis.eigenvalues()[idx],
            floor,
        });
    }
    Ok(())
}

/// Values of ψ_0..=ψ_J at the query points, `m × (J + 1)`.
pub fn extend(basis: &EigenBasis, xnew: MatRef<'_, f64>, j: usize) -> Result<Mat<f64>> {
    check_truncation(basis, j)?;
    let w = extension_weights(basis, xnew)?;
    let psi = basis.eigenvectors().subcols(0, j + 1);
    let mut out = &w * psi;
    for c in 0..=j {
        let inv = 1.0 / basis.eigenvalues()[c];
        for r in 0..out.nrows() {
            out[(r, c)] *= inv;
        }
    }
    Ok(out)
}

/// Eigenmap coordinates `(ψ_1, …, ψ_J)`, dropping the constant ψ_0.
pub fn eigenmap(basis: &EigenBasis, xnew: MatRef<'_, f64>, j: usize) -> Result<Mat<f64>> {
    if j == 0 {
        return Err(Error::invalid("eigenmap needs J >= 1"));
    }
    let full = extend(basis, xnew, j)?;
    Ok(full.subcols(1, j).to_owned())
}
