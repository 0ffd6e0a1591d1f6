//! Mercer kernels and Gram matrices.

use faer::{Mat, MatRef};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A kernel family with its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum KernelSpec {
    /// `exp(-‖x - y‖² / (4ε))`
    Gaussian { bandwidth: f64 },
    /// `(⟨x, y⟩ + 1)^q`
    Polynomial { degree: u32 },
}

impl KernelSpec {
    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        let spec = KernelSpec::Gaussian { bandwidth };
        spec.validate()?;
        Ok(spec)
    }

    pub fn polynomial(degree: u32) -> Result<Self> {
        let spec = KernelSpec::Polynomial { degree };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Gaussian { bandwidth } if !(bandwidth > 0.0 && bandwidth.is_finite()) => {
                Err(Error::invalid(format!("bandwidth must be positive, got {bandwidth}")))
            }
            KernelSpec::Polynomial { degree: 0 } => {
                Err(Error::invalid("polynomial degree must be at least 1"))
            }
            _ => Ok(()),
        }
    }

    /// The bandwidth ε, if this is a Gaussian kernel.
    pub fn bandwidth(&self) -> Option<f64> {
        match *self {
            KernelSpec::Gaussian { bandwidth } => Some(bandwidth),
            KernelSpec::Polynomial { .. } => None,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            KernelSpec::Gaussian { .. } => "gaussian",
            KernelSpec::Polynomial { .. } => "poly",
        }
    }

    /// The numeric parameter: ε for Gaussian kernels, q for polynomial ones.
    pub fn param(&self) -> f64 {
        match *self {
            KernelSpec::Gaussian { bandwidth } => bandwidth,
            KernelSpec::Polynomial { degree } => f64::from(degree),
        }
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            KernelSpec::Gaussian { bandwidth } => {
                (-squared_distance(x, y) / (4.0 * bandwidth)).exp()
            }
            KernelSpec::Polynomial { degree } => {
                let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                (dot + 1.0).powi(degree as i32)
            }
        }
    }
}

#[inline]
pub fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub fn kernel_value(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(spec.eval_unchecked(x, y))
}

/// Copies the rows of `x` into one contiguous row-major buffer.
pub(crate) fn row_major(x: MatRef<'_, f64>) -> Vec<f64> {
    let (n, d) = x.shape();
    let mut out = Vec::with_capacity(n * d);
    for i in 0..n {
        out.extend(x.row(i).iter().copied());
    }
    out
}

/// Applies `f(a_i, b_j)` to every pair of rows, in parallel over rows of `a`.
pub(crate) fn pairwise<F>(a: MatRef<'_, f64>, b: MatRef<'_, f64>, f: F) -> Result<Mat<f64>>
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    if a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch {
            expected: b.ncols(),
            found: a.ncols(),
        });
    }
    let (n, m, d) = (a.nrows(), b.nrows(), a.ncols());
    let ar = row_major(a);
    let br = row_major(b);
    let mut buf = vec![0.0; n * m];
    if d == 0 {
        let empty: &[f64] = &[];
        buf.iter_mut().for_each(|v| *v = f(empty, empty));
    } else {
        buf.par_chunks_mut(m.max(1))
            .zip(ar.par_chunks(d))
            .for_each(|(out, x)| {
                for (o, y) in out.iter_mut().zip(br.chunks(d)) {
                    *o = f(x, y);
                }
            });
    }
    Ok(Mat::from_fn(n, m, |i, j| buf[i * m + j]))
}

pub fn squared_distances(a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> Result<Mat<f64>> {
    pairwise(a, b, squared_distance)
}

/// Kernel matrix with entry `(i, j) = k(a_i, b_j)`.
pub fn gram_matrix(spec: &KernelSpec, a: MatRef<'_, f64>, b: MatRef<'_, f64>) -> Result<Mat<f64>> {
    spec.validate()?;
    pairwise(a, b, |x, y| spec.eval_unchecked(x, y))
}

/// Self-Gram matrix, explicitly symmetrized as `(K + Kᵀ) / 2`.
pub fn gram_matrix_sym(spec: &KernelSpec, a: MatRef<'_, f64>) -> Result<Mat<f64>> {
    let k = gram_matrix(spec, a, a)?;
    Ok(symmetrize(k.as_ref()))
}

pub(crate) fn symmetrize(k: MatRef<'_, f64>) -> Mat<f64> {
    Mat::from_fn(k.nrows(), k.ncols(), |i, j| 0.5 * (k[(i, j)] + k[(j, i)]))
}

/// Candidate Gaussian bandwidths derived from the spread of squared pairwise
/// distances: a log-spaced grid between the 1st and 99th percentiles,
/// divided by 4. A single-point grid is the median divided by 4.
/// Coincident pairs are ignored.
pub fn bandwidth_grid(x: MatRef<'_, f64>, n_grid: usize) -> Result<Vec<f64>> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::invalid(format!("bandwidth grid needs n >= 2, got {n}")));
    }
    if n_grid == 0 {
        return Err(Error::invalid("bandwidth grid needs at least one point"));
    }
    let d = x.ncols();
    let rows = row_major(x);
    let mut dists: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let rows = &rows;
            (i + 1..n).map(move |j| squared_distance(&rows[i * d..(i + 1) * d], &rows[j * d..(j + 1) * d]))
        })
        .filter(|&v| v > 0.0)
        .collect();
    if dists.is_empty() {
        return Err(Error::invalid("all points coincide; no distance spread"));
    }
    dists.par_sort_unstable_by(f64::total_cmp);

    if n_grid == 1 {
        return Ok(vec![quantile_sorted(&dists, 0.5) / 4.0]);
    }
    let lo = quantile_sorted(&dists, 0.01);
    let hi = quantile_sorted(&dists, 0.99);
    if !(hi > lo) {
        return Err(Error::invalid("pairwise distances have no spread"));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let grid: Vec<f64> = (0..n_grid)
        .map(|k| {
            let t = k as f64 / (n_grid - 1) as f64;
            (llo + t * (lhi - llo)).exp() / 4.0
        })
        .collect();
    Ok(grid)
}

/// Linear-interpolation quantile of an ascending slice.
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> Mat<f64> {
        Mat::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    #[test]
    fn kernel_values() {
        let g = KernelSpec::gaussian(0.5).unwrap();
        assert_eq!(kernel_value(&g, &[1.0, 2.0], &[1.0, 2.0]).unwrap(), 1.0);
        // ‖x - y‖² = 2 = 4ε
        let v = kernel_value(&g, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        let p = KernelSpec::polynomial(2).unwrap();
        assert_eq!(kernel_value(&p, &[1.0, 0.0], &[1.0, 5.0]).unwrap(), 4.0);
        assert!(kernel_value(&g, &[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn invalid_specs() {
        assert!(KernelSpec::gaussian(0.0).is_err());
        assert!(KernelSpec::gaussian(-1.0).is_err());
        assert!(KernelSpec::polynomial(0).is_err());
    }

    #[test]
    fn gram_shapes_and_values() {
        let g = KernelSpec::gaussian(1.0).unwrap();
        let a = mat(&[&[0.0], &[2.0]]);
        let k = gram_matrix_sym(&g, a.as_ref()).unwrap();
        assert_eq!(k[(0, 0)], 1.0);
        assert!((k[(0, 1)] - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(k[(0, 1)], k[(1, 0)]);

        let a = Mat::<f64>::zeros(3, 4);
        let b = Mat::<f64>::zeros(5, 4);
        assert_eq!(gram_matrix(&g, a.as_ref(), b.as_ref()).unwrap().shape(), (3, 5));
        let c = Mat::<f64>::zeros(5, 3);
        assert!(gram_matrix(&g, a.as_ref(), c.as_ref()).is_err());
    }

    #[test]
    fn grid_contracts() {
        let two = mat(&[&[0.0], &[2.0]]);
        assert_eq!(bandwidth_grid(two.as_ref(), 1).unwrap(), vec![1.0]);

        let x = Mat::from_fn(30, 2, |i, j| ((i * 7 + j * 3) % 11) as f64 * 0.3);
        let grid = bandwidth_grid(x.as_ref(), 8).unwrap();
        assert_eq!(grid.len(), 8);
        assert!(grid[0] > 0.0);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));

        let same = Mat::from_fn(4, 2, |_, _| 1.5);
        assert!(bandwidth_grid(same.as_ref(), 3).is_err());
    }
}
