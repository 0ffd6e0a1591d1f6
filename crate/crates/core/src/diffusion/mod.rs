//! Diffusion normalizations of a kernel matrix and the adaptive eigenbasis
//! built from them.
//!
//! The basis vectors are right eigenvectors of the row-stochastic matrix
//! `A = D⁻¹K`. They are obtained from the symmetric conjugate
//! `Ã = D^{-1/2} K D^{-1/2}` (same spectrum) and rescaled by `1/√ŝ`, which
//! makes them orthonormal under `(1/n) Σ ψ_j ψ_k ŝ = δ_jk`.

mod eigen;

use std::time::Instant;

use faer::{Mat, MatRef};
use serde::{Deserialize, Serialize};

pub use eigen::{eigendecompose, relative_asymmetry, EigenMethod, SYMMETRY_TOL};

use crate::error::{Error, Result};
use crate::kernels::{gram_matrix_sym, KernelSpec};

/// Relative eigenvalue floor below which a component cannot be extended.
pub const EIGEN_FLOOR_REL: f64 = 1e-10;

/// Which normalization of the kernel matrix defines the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMode {
    /// Row-stochastic diffusion operator; basis orthogonal under ŝ.
    #[default]
    Stochastic,
    /// Eigenvectors of the symmetric normalization used as they are;
    /// orthogonal under the empirical distribution.
    Symmetric,
    /// Row-stochastic operator of the density-corrected kernel
    /// `k(x, y) / (p(x) p(y))`.
    BiasCorrected,
    /// Eigenvectors of `K / n` with uniform weights. Works for kernels with
    /// negative entries.
    Uniform,
}

/// Row sums of `k`, all required to be strictly positive.
pub fn row_sums(k: MatRef<'_, f64>) -> Result<Vec<f64>> {
    let sums: Vec<f64> = (0..k.nrows()).map(|i| k.row(i).iter().sum()).collect();
    match sums.iter().position(|&s| !(s > 0.0)) {
        Some(i) => Err(Error::ZeroRowSum(i)),
        None => Ok(sums),
    }
}

/// Degrees `p̂(X_i) = (1/n) Σ_j k(X_i, X_j)`.
pub fn degrees(k: MatRef<'_, f64>) -> Result<Vec<f64>> {
    let n = k.ncols() as f64;
    Ok(row_sums(k)?.into_iter().map(|s| s / n).collect())
}

/// Markov matrix `A(i, j) = K(i, j) / Σ_l K(i, l)`.
pub fn row_stochastic(k: MatRef<'_, f64>) -> Result<Mat<f64>> {
    let sums = row_sums(k)?;
    Ok(Mat::from_fn(k.nrows(), k.ncols(), |i, j| k[(i, j)] / sums[i]))
}

/// `Ã(i, j) = K(i, j) / (√r_i √r_j)` with `r` the row sums.
pub fn symmetric_normalize(k: MatRef<'_, f64>) -> Result<Mat<f64>> {
    let roots: Vec<f64> = row_sums(k)?.into_iter().map(f64::sqrt).collect();
    let a = Mat::from_fn(k.nrows(), k.ncols(), |i, j| k[(i, j)] / (roots[i] * roots[j]));
    Ok(crate::kernels::symmetrize(a.as_ref()))
}

/// Stationary distribution of the Markov chain `D⁻¹K`: degrees over their total.
pub fn stationary_weights(k: MatRef<'_, f64>) -> Result<Vec<f64>> {
    let sums = row_sums(k)?;
    let total: f64 = sums.iter().sum();
    Ok(sums.into_iter().map(|s| s / total).collect())
}

/// Density-corrected kernel `K*(i, j) = K(i, j) / (p̂_i p̂_j)`.
pub fn bias_correct(k: MatRef<'_, f64>) -> Result<Mat<f64>> {
    let p = degrees(k)?;
    let kc = Mat::from_fn(k.nrows(), k.ncols(), |i, j| k[(i, j)] / (p[i] * p[j]));
    Ok(crate::kernels::symmetrize(kc.as_ref()))
}

/// Divides row `i` of `vectors` by `√ŝ_i`.
pub fn rescale(vectors: MatRef<'_, f64>, stationary: &[f64]) -> Result<Mat<f64>> {
    if stationary.len() != vectors.nrows() {
        return Err(Error::DimensionMismatch {
            expected: vectors.nrows(),
            found: stationary.len(),
        });
    }
    if let Some(i) = stationary.iter().position(|&s| !(s > 0.0)) {
        return Err(Error::invalid(format!(
            "stationary weight {i} is not positive ({})",
            stationary[i]
        )));
    }
    let roots: Vec<f64> = stationary.iter().map(|s| s.sqrt()).collect();
    Ok(Mat::from_fn(vectors.nrows(), vectors.ncols(), |i, j| {
        vectors[(i, j)] / roots[i]
    }))
}

/// A kernel matrix together with its degrees and stationary weights under
/// one normalization mode.
#[derive(Debug, Clone)]
pub struct DiffusionSystem {
    gram: Mat<f64>,
    degrees: Vec<f64>,
    stationary: Vec<f64>,
    mode: NormalizationMode,
    /// The kernel the Markov chain actually runs on (`K*` when bias corrected).
    working: Option<Mat<f64>>,
}

impl DiffusionSystem {
    pub fn new(gram: Mat<f64>, mode: NormalizationMode) -> Result<Self> {
        let n = gram.nrows();
        if gram.ncols() != n || n == 0 {
            return Err(Error::invalid("kernel matrix must be square and nonempty"));
        }
        let uniform = vec![1.0 / n as f64; n];
        let (degrees, stationary, working) = match mode {
            NormalizationMode::Stochastic => {
                (degrees(gram.as_ref())?, stationary_weights(gram.as_ref())?, None)
            }
            NormalizationMode::Symmetric => (degrees(gram.as_ref())?, uniform, None),
            NormalizationMode::BiasCorrected => {
                let kc = bias_correct(gram.as_ref())?;
                let s = stationary_weights(kc.as_ref())?;
                (degrees(gram.as_ref())?, s, Some(kc))
            }
            NormalizationMode::Uniform => {
                let n_f = n as f64;
                let p = (0..n).map(|i| gram.row(i).iter().sum::<f64>() / n_f).collect();
                (p, uniform, None)
            }
        };
        Ok(DiffusionSystem {
            gram,
            degrees,
            stationary,
            mode,
            working,
        })
    }

    pub fn gram(&self) -> MatRef<'_, f64> {
        self.gram.as_ref()
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn mode(&self) -> NormalizationMode {
        self.mode
    }

    fn working(&self) -> MatRef<'_, f64> {
        self.working.as_ref().unwrap_or(&self.gram).as_ref()
    }

    /// The symmetric matrix handed to the eigensolver.
    pub fn symmetric_matrix(&self) -> Result<Mat<f64>> {
        match self.mode {
            NormalizationMode::Uniform => {
                let n = self.gram.nrows() as f64;
                let a = Mat::from_fn(self.gram.nrows(), self.gram.ncols(), |i, j| {
                    self.gram[(i, j)] / n
                });
                Ok(crate::kernels::symmetrize(a.as_ref()))
            }
            _ => symmetric_normalize(self.working()),
        }
    }

    /// The operator whose right eigenvectors are the basis vectors.
    pub fn operator(&self) -> Result<Mat<f64>> {
        match self.mode {
            NormalizationMode::Stochastic | NormalizationMode::BiasCorrected => {
                row_stochastic(self.working())
            }
            NormalizationMode::Symmetric | NormalizationMode::Uniform => self.symmetric_matrix(),
        }
    }
}

/// Mode and eigensolver used when fitting a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BasisOptions {
    pub mode: NormalizationMode,
    pub method: EigenMethod,
}

/// Estimated eigenvalues and eigenvectors of the diffusion operator at the
/// training points, with everything needed for out-of-sample extension.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    pub(crate) kernel: KernelSpec,
    pub(crate) options: BasisOptions,
    pub(crate) training_points: Mat<f64>,
    pub(crate) eigenvalues: Vec<f64>,
    pub(crate) eigenvectors: Mat<f64>,
    pub(crate) stationary: Vec<f64>,
    pub(crate) degrees: Vec<f64>,
}

/// Wall-clock seconds spent building a basis.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BasisTimings {
    pub kernel: f64,
    pub eigen: f64,
}

impl EigenBasis {
    /// Reassembles a basis from stored parts, checking shapes.
    pub fn from_parts(
        kernel: KernelSpec,
        options: BasisOptions,
        training_points: Mat<f64>,
        eigenvalues: Vec<f64>,
        eigenvectors: Mat<f64>,
        stationary: Vec<f64>,
        degrees: Vec<f64>,
    ) -> Result<Self> {
        kernel.validate()?;
        let n = training_points.nrows();
        let k = eigenvalues.len();
        if k == 0 || eigenvectors.shape() != (n, k) || stationary.len() != n || degrees.len() != n {
            return Err(Error::invalid(format!(
                "inconsistent basis parts: n = {n}, {k} eigenvalues, vectors {:?}, {} weights, {} degrees",
                eigenvectors.shape(),
                stationary.len(),
                degrees.len()
            )));
        }
        Ok(EigenBasis {
            kernel,
            options,
            training_points,
            eigenvalues,
            eigenvectors,
            stationary,
            degrees,
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn options(&self) -> &BasisOptions {
        &self.options
    }

    pub fn mode(&self) -> NormalizationMode {
        self.options.mode
    }

    pub fn training_points(&self) -> MatRef<'_, f64> {
        self.training_points.as_ref()
    }

    pub fn n(&self) -> usize {
        self.training_points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.training_points.ncols()
    }

    /// Largest component index held, `J_max`.
    pub fn j_max(&self) -> usize {
        self.eigenvalues.len() - 1
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `n × (J_max + 1)` matrix whose column `j` is ψ_j at the training points.
    pub fn eigenvectors(&self) -> MatRef<'_, f64> {
        self.eigenvectors.as_ref()
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    /// Kernel degrees `p̂` at the training points.
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn eigen_floor(&self) -> f64 {
        EIGEN_FLOOR_REL * self.eigenvalues[0]
    }

    /// Largest `J` such that λ_0..=λ_J all exceed the eigenvalue floor.
    /// `None` when even λ_0 is not above it.
    pub fn extendable_j(&self) -> Option<usize> {
        let floor = self.eigen_floor();
        let count = self.eigenvalues.iter().take_while(|&&l| l > floor).count();
        count.checked_sub(1)
    }
}

pub fn fit_basis(
    x: MatRef<'_, f64>,
    kernel: &KernelSpec,
    j_max: usize,
    options: &BasisOptions,
) -> Result<EigenBasis> {
    fit_basis_timed(x, kernel, j_max, options).map(|(b, _)| b)
}

/// `fit_basis` that also reports time spent on the kernel and the eigensolve.
pub fn fit_basis_timed(
    x: MatRef<'_, f64>,
    kernel: &KernelSpec,
    j_max: usize,
    options: &BasisOptions,
) -> Result<(EigenBasis, BasisTimings)> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::invalid(format!("basis needs at least 2 points, got {n}")));
    }
    if j_max + 1 > n {
        return Err(Error::invalid(format!(
            "J_max = {j_max} needs at least {} points, got {n}",
            j_max + 1
        )));
    }

    let start = Instant::now();
    let gram = gram_matrix_sym(kernel, x)?;
    if options.mode != NormalizationMode::Uniform {
        let has_negative = (0..n).any(|j| gram.col(j).iter().any(|&v| v < 0.0));
        if has_negative {
            return Err(Error::invalid(format!(
                "{} kernel has negative entries on this data; use the uniform mode",
                kernel.family()
            )));
        }
    }
    let system = DiffusionSystem::new(gram, options.mode)?;
    let sym = system.symmetric_matrix()?;
    let kernel_secs = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let (eigenvalues, vectors) = eigendecompose(sym.as_ref(), j_max, &options.method)?;
    let eigenvectors = rescale(vectors.as_ref(), system.stationary())?;
    let eigen_secs = start.elapsed().as_secs_f64();

    let basis = EigenBasis {
        kernel: *kernel,
        options: *options,
        training_points: x.to_owned(),
        eigenvalues,
        eigenvectors,
        stationary: system.stationary().to_vec(),
        degrees: system.degrees().to_vec(),
    };
    Ok((
        basis,
        BasisTimings {
            kernel: kernel_secs,
            eigen: eigen_secs,
        },
    ))
}

/// Smoothness spectrum `ν²_j = (1 - λ_j) / ε` of a Gaussian basis.
pub fn smoothness_spectrum(basis: &EigenBasis) -> Result<Vec<f64>> {
    let eps = basis.kernel.bandwidth().ok_or_else(|| {
        Error::invalid("smoothness spectrum needs a Gaussian kernel with a bandwidth")
    })?;
    Ok(basis
        .eigenvalues
        .iter()
        .map(|l| ((1.0 - l) / eps).max(0.0))
        .collect())
}
