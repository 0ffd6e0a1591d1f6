//! Leading eigenpairs of symmetric matrices, exact or by randomized range
//! finding.

use faer::{Mat, MatRef, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative asymmetry tolerated in eigensolver input.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// How the leading eigenpairs are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EigenMethod {
    /// Dense symmetric eigendecomposition of the whole matrix.
    #[default]
    Full,
    /// Gaussian sketch of `k + oversample` columns refined by `power_iters`
    /// subspace iterations, followed by Rayleigh-Ritz on the sketch.
    Randomized {
        oversample: usize,
        power_iters: usize,
        seed: u64,
    },
}

impl EigenMethod {
    pub const DEFAULT_OVERSAMPLE: usize = 10;
    pub const DEFAULT_POWER_ITERS: usize = 2;

    pub fn randomized(seed: u64) -> Self {
        EigenMethod::Randomized {
            oversample: Self::DEFAULT_OVERSAMPLE,
            power_iters: Self::DEFAULT_POWER_ITERS,
            seed,
        }
    }
}

/// Largest absolute difference `|a_ij - a_ji|` relative to `max |a_ij|`.
pub fn relative_asymmetry(a: MatRef<'_, f64>) -> f64 {
    let n = a.nrows();
    let mut scale = 0.0f64;
    let mut diff = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            scale = scale.max(a[(i, j)].abs());
            if i > j {
                diff = diff.max((a[(i, j)] - a[(j, i)]).abs());
            }
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// Top `j_max + 1` eigenpairs of a symmetric matrix.
///
/// Eigenvalues come back in descending order. Each eigenvector `v` is
/// scaled so that `(1/n) Σ v_i² = 1` and its largest-magnitude entry is
/// positive.
pub fn eigendecompose(
    a: MatRef<'_, f64>,
    j_max: usize,
    method: &EigenMethod,
) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    let k = j_max + 1;
    if k > n {
        return Err(Error::invalid(format!(
            "requested {k} eigenpairs from a {n}x{n} matrix"
        )));
    }
    let asym = relative_asymmetry(a);
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }

    let (values, mut vectors) = match *method {
        EigenMethod::Full => full_top(a, k)?,
        EigenMethod::Randomized {
            oversample,
            power_iters,
            seed,
        } => randomized_top(a, k, oversample, power_iters, seed)?,
    };

    let scale = (n as f64).sqrt();
    for j in 0..k {
        let norm = vectors.col(j).iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Numerical(format!("eigenvector {j} has zero norm")));
        }
        let mut pivot = 0;
        for i in 1..n {
            if vectors[(i, j)].abs() > vectors[(pivot, j)].abs() {
                pivot = i;
            }
        }
        let s = vectors[(pivot, j)].signum() * scale / norm;
        for i in 0..n {
            vectors[(i, j)] *= s;
        }
    }

    for (j, w) in values.windows(2).enumerate() {
        if (w[0] - w[1]).abs() < 1e-12 {
            log::debug!(
                "eigenvalues {j} and {} are numerically tied ({:.3e})",
                j + 1,
                w[0]
            );
        }
    }
    Ok((values, vectors))
}

fn full_top(a: MatRef<'_, f64>, k: usize) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = a.nrows();
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("symmetric eigensolver failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    // ascending order from the solver
    let values = (0..k).map(|j| s[n - 1 - j]).collect();
    let vectors = Mat::from_fn(n, k, |i, j| u[(i, n - 1 - j)]);
    Ok((values, vectors))
}

fn orthonormal_basis(y: MatRef<'_, f64>) -> Mat<f64> {
    y.qr().compute_thin_Q()
}

fn randomized_top(
    a: MatRef<'_, f64>,
    k: usize,
    oversample: usize,
    power_iters: usize,
    seed: u64,
) -> Result<(Vec<f64>, Mat<f64>)> {
    let n = a.nrows();
    let l = (k + oversample).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut omega = Mat::<f64>::zeros(n, l);
    for j in 0..l {
        for i in 0..n {
            omega[(i, j)] = StandardNormal.sample(&mut rng);
        }
    }
    let mut q = orthonormal_basis((a * &omega).as_ref());
    for _ in 0..power_iters {
        q = orthonormal_basis((a * &q).as_ref());
    }
    let aq = a * &q;
    let b = q.transpose() * &aq;
    let b = crate::kernels::symmetrize(b.as_ref());
    let (values, u) = full_top(b.as_ref(), k)?;
    Ok((values, &q * &u))
}
