//! The spectral series estimator `f(x) = Σ_{j ≤ J} β_j ψ_j(x)`.

use std::sync::Arc;

use faer::{Mat, MatRef, Side};
use faer::linalg::solvers::Solve;

use crate::diffusion::{fit_basis, smoothness_spectrum, BasisOptions, EigenBasis};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::nystrom::extend;

/// A fitted series regressor. Coefficients are held up to `J_max`; the
/// active truncation `J` selects how many are used.
#[derive(Debug, Clone)]
pub struct SeriesModel {
    basis: Arc<EigenBasis>,
    coefficients: Vec<f64>,
    j: usize,
    ssl: bool,
}

impl SeriesModel {
    pub fn new(basis: Arc<EigenBasis>, coefficients: Vec<f64>, j: usize, ssl: bool) -> Result<Self> {
        if coefficients.len() != basis.j_max() + 1 {
            return Err(Error::DimensionMismatch {
                expected: basis.j_max() + 1,
                found: coefficients.len(),
            });
        }
        if j > basis.j_max() {
            return Err(Error::invalid(format!(
                "truncation J = {j} exceeds J_max = {}",
                basis.j_max()
            )));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numerical("non-finite expansion coefficient".into()));
        }
        Ok(SeriesModel {
            basis,
            coefficients,
            j,
            ssl,
        })
    }

    pub fn basis(&self) -> &EigenBasis {
        &self.basis
    }

    pub fn shared_basis(&self) -> Arc<EigenBasis> {
        Arc::clone(&self.basis)
    }

    /// All coefficients up to `J_max`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn is_ssl(&self) -> bool {
        self.ssl
    }

    /// The same fit viewed at another truncation. No refitting happens.
    pub fn with_truncation(&self, j: usize) -> Result<Self> {
        SeriesModel::new(Arc::clone(&self.basis), self.coefficients.clone(), j, self.ssl)
    }

    pub fn predict(&self, xnew: MatRef<'_, f64>) -> Result<Vec<f64>> {
        let psi = extend(&self.basis, xnew, self.j)?;
        Ok(combine(psi.as_ref(), &self.coefficients, self.j))
    }

    /// Fitted values at the training points, using the stored eigenvectors.
    pub fn fitted(&self) -> Vec<f64> {
        combine(self.basis.eigenvectors(), &self.coefficients, self.j)
    }

    /// `Σ_{j ≤ J} ν²_j β_j²`; requires a Gaussian basis.
    pub fn smoothness_functional(&self) -> Result<f64> {
        let nu = smoothness_spectrum(&self.basis)?;
        Ok((0..=self.j)
            .map(|k| nu[k] * self.coefficients[k] * self.coefficients[k])
            .sum())
    }
}

/// Row-wise `Σ_{k ≤ j} psi[i, k] β_k`.
pub(crate) fn combine(psi: MatRef<'_, f64>, beta: &[f64], j: usize) -> Vec<f64> {
    (0..psi.nrows())
        .map(|i| (0..=j).map(|k| psi[(i, k)] * beta[k]).sum())
        .collect()
}

/// Expansion coefficients `β_j` from the labeled training rows.
///
/// With every row labeled this is `(1/n) Σ_i y_i ψ_j(X_i) ŝ_i`. With a
/// subset labeled, ŝ is renormalized to sum to one over the labeled rows,
/// so constants are still represented exactly.
pub fn estimate_coefficients(basis: &EigenBasis, labeled: &[usize], y: &[f64]) -> Result<Vec<f64>> {
    if labeled.is_empty() {
        return Err(Error::invalid("no labeled rows"));
    }
    if labeled.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: labeled.len(),
            found: y.len(),
        });
    }
    let n = basis.n();
    if let Some(&bad) = labeled.iter().find(|&&i| i >= n) {
        return Err(Error::invalid(format!("labeled index {bad} out of range for {n} rows")));
    }
    let s = basis.stationary();
    let psi = basis.eigenvectors();
    let weight_total: f64 = if labeled.len() == n {
        1.0
    } else {
        labeled.iter().map(|&i| s[i]).sum()
    };
    let scale = 1.0 / (n as f64 * weight_total);
    // With partial labels the ψ_j (j ≥ 1) are not orthogonal to constants
    // over the labeled rows, so the labeled weighted mean is removed first.
    let center = if labeled.len() == n {
        0.0
    } else {
        labeled.iter().zip(y).map(|(&i, &yi)| s[i] * yi).sum::<f64>() / weight_total
    };
    Ok((0..=basis.j_max())
        .map(|j| {
            let shift = if j == 0 { 0.0 } else { center };
            let dot: f64 = labeled
                .iter()
                .zip(y)
                .map(|(&i, &yi)| (yi - shift) * psi[(i, j)] * s[i])
                .sum();
            dot * scale
        })
        .collect())
}

/// `ZᵀWZ` with `Z` the eigenvector matrix and `W = diag(ŝ)`.
pub fn weighted_gram(basis: &EigenBasis) -> Mat<f64> {
    let z = basis.eigenvectors();
    let s = basis.stationary();
    let wz = Mat::from_fn(z.nrows(), z.ncols(), |i, j| s[i] * z[(i, j)]);
    z.transpose() * &wz
}

/// Coefficients by weighted least squares: solves `(ZᵀWZ) β = ZᵀW y`
/// directly instead of relying on orthogonality.
pub fn wls_coefficients(basis: &EigenBasis, y: &[f64]) -> Result<Vec<f64>> {
    let n = basis.n();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    let z = basis.eigenvectors();
    let s = basis.stationary();
    let gram = weighted_gram(basis);
    let rhs = Mat::from_fn(z.ncols(), 1, |j, _| {
        (0..n).map(|i| z[(i, j)] * s[i] * y[i]).sum::<f64>()
    });
    let chol = gram
        .llt(Side::Lower)
        .map_err(|_| Error::Numerical("ZᵀWZ is singular; basis orthogonality is broken".into()))?;
    let beta = chol.solve(&rhs);
    Ok(beta.col(0).iter().copied().collect())
}

/// Supervised fit: basis on `x`, coefficients from `y`, truncation `J_max`.
pub fn fit(
    x: MatRef<'_, f64>,
    y: &[f64],
    kernel: &KernelSpec,
    j_max: usize,
    options: &BasisOptions,
) -> Result<SeriesModel> {
    fit_ssl(x, y, None, kernel, j_max, options)
}

/// Semi-supervised fit: the basis is built on labeled and unlabeled rows
/// together; coefficients use the labeled rows only.
pub fn fit_ssl(
    x_labeled: MatRef<'_, f64>,
    y: &[f64],
    x_unlabeled: Option<MatRef<'_, f64>>,
    kernel: &KernelSpec,
    j_max: usize,
    options: &BasisOptions,
) -> Result<SeriesModel> {
    let n_lab = x_labeled.nrows();
    if n_lab == 0 {
        return Err(Error::invalid("no labeled rows"));
    }
    if y.len() != n_lab {
        return Err(Error::DimensionMismatch {
            expected: n_lab,
            found: y.len(),
        });
    }
    let pooled = pool_rows(x_labeled, x_unlabeled)?;
    let ssl = pooled.nrows() > n_lab;
    let basis = fit_basis(pooled.as_ref(), kernel, j_max, options)?;
    let labeled: Vec<usize> = (0..n_lab).collect();
    let beta = estimate_coefficients(&basis, &labeled, y)?;
    SeriesModel::new(Arc::new(basis), beta, j_max, ssl)
}

/// Stacks labeled rows on top of unlabeled rows.
pub(crate) fn pool_rows(
    x_labeled: MatRef<'_, f64>,
    x_unlabeled: Option<MatRef<'_, f64>>,
) -> Result<Mat<f64>> {
    let Some(xu) = x_unlabeled.filter(|u| u.nrows() > 0) else {
        return Ok(x_labeled.to_owned());
    };
    if xu.ncols() != x_labeled.ncols() {
        return Err(Error::DimensionMismatch {
            expected: x_labeled.ncols(),
            found: xu.ncols(),
        });
    }
    let n_lab = x_labeled.nrows();
    Ok(Mat::from_fn(n_lab + xu.nrows(), x_labeled.ncols(), |i, j| {
        if i < n_lab {
            x_labeled[(i, j)]
        } else {
            xu[(i - n_lab, j)]
        }
    }))
}
