//! Reference estimators: Nadaraya-Watson, k-nearest neighbors and kernel
//! ridge regression.

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::kernels::{gram_matrix, gram_matrix_sym, squared_distances, KernelSpec};

/// Condition-number estimate above which the ridge system is rejected.
pub const KRR_MAX_CONDITION: f64 = 1e12;

fn check_training(x: MatRef<'_, f64>, y: &[f64]) -> Result<()> {
    if x.nrows() == 0 {
        return Err(Error::invalid("no training rows"));
    }
    if y.len() != x.nrows() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            found: y.len(),
        });
    }
    Ok(())
}

/// Nadaraya-Watson smoother with a Gaussian kernel of bandwidth `eps`.
///
/// Queries where every kernel weight underflows fall back to weights
/// shifted by the nearest squared distance, which concentrate on the
/// nearest training label.
pub fn nw_predict(
    x_train: MatRef<'_, f64>,
    y: &[f64],
    eps: f64,
    xnew: MatRef<'_, f64>,
) -> Result<Vec<f64>> {
    check_training(x_train, y)?;
    KernelSpec::gaussian(eps)?;
    let d2 = squared_distances(xnew, x_train)?;
    Ok((0..xnew.nrows())
        .map(|i| {
            let row = d2.row(i);
            let mut num = 0.0;
            let mut den = 0.0;
            for (l, &v) in row.iter().enumerate() {
                let w = (-v / (4.0 * eps)).exp();
                num += w * y[l];
                den += w;
            }
            if den > 0.0 && den.is_finite() {
                return num / den;
            }
            log::warn!("Nadaraya-Watson weights underflow at query {i}; using nearest labels");
            let dmin = row.iter().copied().fold(f64::INFINITY, f64::min);
            let (mut num, mut den) = (0.0, 0.0);
            for (l, &v) in row.iter().enumerate() {
                let w = (-(v - dmin) / (4.0 * eps)).exp();
                num += w * y[l];
                den += w;
            }
            num / den
        })
        .collect())
}

/// Mean label of the `k` nearest training points; distance ties go to the
/// lower training index.
pub fn knn_predict(
    x_train: MatRef<'_, f64>,
    y: &[f64],
    k: usize,
    xnew: MatRef<'_, f64>,
) -> Result<Vec<f64>> {
    check_training(x_train, y)?;
    let n = x_train.nrows();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k = {k} must lie in 1..={n}")));
    }
    let d2 = squared_distances(xnew, x_train)?;
    Ok((0..xnew.nrows())
        .map(|i| {
            let mut order: Vec<(f64, usize)> = d2.row(i).iter().copied().zip(0..n).collect();
            let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < n {
                order.select_nth_unstable_by(k - 1, cmp);
            }
            order[..k].iter().map(|&(_, l)| y[l]).sum::<f64>() / k as f64
        })
        .collect())
}

/// Kernel ridge regression in dual form: `f(x) = Σ_i α_i k(x, X_i)` with
/// `(K + nγI) α = y`.
#[derive(Debug, Clone)]
pub struct KrrModel {
    pub kernel: KernelSpec,
    pub training_points: Mat<f64>,
    pub dual_coefficients: Vec<f64>,
    pub penalty: f64,
}

pub fn krr_fit(x: MatRef<'_, f64>, y: &[f64], kernel: &KernelSpec, penalty: f64) -> Result<KrrModel> {
    check_training(x, y)?;
    if !(penalty > 0.0 && penalty.is_finite()) {
        return Err(Error::invalid(format!("ridge penalty must be positive, got {penalty}")));
    }
    let n = x.nrows();
    let mut system = gram_matrix_sym(kernel, x)?;
    let shift = n as f64 * penalty;
    for i in 0..n {
        system[(i, i)] += shift;
    }
    let rhs = Mat::from_fn(n, 1, |i, _| y[i]);

    let alpha = match system.llt(Side::Lower) {
        Ok(chol) => {
            let l = chol.L();
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for i in 0..n {
                let v = l[(i, i)];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let cond = (hi / lo).powi(2);
            if !(cond <= KRR_MAX_CONDITION) {
                return Err(Error::Numerical(format!(
                    "ridge system is ill-conditioned (estimate {cond:.3e})"
                )));
            }
            chol.solve(&rhs)
        }
        Err(_) => {
            return Err(Error::Numerical(
                "ridge system is not positive definite".into(),
            ))
        }
    };
    let dual_coefficients: Vec<f64> = alpha.col(0).iter().copied().collect();
    if dual_coefficients.iter().any(|a| !a.is_finite()) {
        return Err(Error::Numerical("ridge solve produced non-finite values".into()));
    }
    Ok(KrrModel {
        kernel: *kernel,
        training_points: x.to_owned(),
        dual_coefficients,
        penalty,
    })
}

pub fn krr_predict(model: &KrrModel, xnew: MatRef<'_, f64>) -> Result<Vec<f64>> {
    let k = gram_matrix(&model.kernel, xnew, model.training_points.as_ref())?;
    Ok((0..xnew.nrows())
        .map(|i| {
            k.row(i)
                .iter()
                .zip(&model.dual_coefficients)
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect())
}

impl KrrModel {
    pub fn predict(&self, xnew: MatRef<'_, f64>) -> Result<Vec<f64>> {
        krr_predict(self, xnew)
    }

    /// `‖(K + nγI)α − y‖∞ / ‖y‖∞`.
    pub fn dual_residual(&self, y: &[f64]) -> Result<f64> {
        let n = self.training_points.nrows();
        let k = gram_matrix_sym(&self.kernel, self.training_points.as_ref())?;
        let shift = n as f64 * self.penalty;
        let mut worst = 0.0f64;
        for i in 0..n {
            let lhs: f64 = (0..n).map(|j| k[(i, j)] * self.dual_coefficients[j]).sum::<f64>()
                + shift * self.dual_coefficients[i];
            worst = worst.max((lhs - y[i]).abs());
        }
        let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(if scale > 0.0 { worst / scale } else { worst })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> Mat<f64> {
        Mat::from_fn(points.len(), 1, |i, _| points[i])
    }

    #[test]
    fn nw_limits() {
        let x = line(&[0.0, 1.0, 2.5]);
        let y = [1.0, 4.0, -2.0];
        let q = line(&[0.3, 1.7, 9.0]);

        let single = nw_predict(line(&[0.5]).as_ref(), &[7.0], 0.1, q.as_ref()).unwrap();
        assert!(single.iter().all(|&v| v == 7.0));

        let wide = nw_predict(x.as_ref(), &y, 1e12, q.as_ref()).unwrap();
        let mean = y.iter().sum::<f64>() / 3.0;
        assert!(wide.iter().all(|v| (v - mean).abs() < 1e-6));

        let narrow = nw_predict(x.as_ref(), &y, 1e-12, x.as_ref()).unwrap();
        assert_eq!(narrow, y.to_vec());
        // far away from everything with a tiny bandwidth: nearest label
        let far = nw_predict(x.as_ref(), &y, 1e-12, line(&[2.4]).as_ref()).unwrap();
        assert_eq!(far, vec![-2.0]);
    }

    #[test]
    fn knn_cases() {
        let x = line(&[0.0, 1.0, 2.0]);
        let y = [0.0, 1.0, 2.0];
        assert_eq!(knn_predict(x.as_ref(), &y, 2, line(&[0.9]).as_ref()).unwrap(), vec![0.5]);
        assert_eq!(knn_predict(x.as_ref(), &y, 1, line(&[2.0]).as_ref()).unwrap(), vec![2.0]);
        assert_eq!(knn_predict(x.as_ref(), &y, 3, line(&[-5.0]).as_ref()).unwrap(), vec![1.0]);
        // equidistant from 0 and 2: lower index wins
        assert_eq!(knn_predict(line(&[0.0, 2.0]).as_ref(), &[5.0, 9.0], 1, line(&[1.0]).as_ref()).unwrap(), vec![5.0]);
        assert!(knn_predict(x.as_ref(), &y, 0, x.as_ref()).is_err());
        assert!(knn_predict(x.as_ref(), &y, 4, x.as_ref()).is_err());
    }

    #[test]
    fn krr_scalar_and_limits() {
        let g = KernelSpec::gaussian(1.0).unwrap();
        let one = krr_fit(line(&[0.3]).as_ref(), &[3.0], &g, 1.0).unwrap();
        assert!((one.dual_coefficients[0] - 1.5).abs() < 1e-15);

        let x = line(&[0.0, 3.0, 6.0, 9.0, 12.0]);
        let y = [1.0, -1.0, 2.0, 0.5, 3.0];
        let heavy = krr_fit(x.as_ref(), &y, &g, 1e12).unwrap();
        assert!(heavy.dual_coefficients.iter().all(|a| a.abs() < 1e-10));
        assert!(heavy.predict(x.as_ref()).unwrap().iter().all(|p| p.abs() < 1e-10));

        let light = krr_fit(x.as_ref(), &y, &g, 1e-10).unwrap();
        let fitted = light.predict(x.as_ref()).unwrap();
        for (f, t) in fitted.iter().zip(&y) {
            assert!((f - t).abs() < 1e-4);
        }
        assert!(light.dual_residual(&y).unwrap() <= 1e-8);
        assert!(krr_fit(x.as_ref(), &y, &g, 0.0).is_err());
    }

    #[test]
    fn krr_prediction_is_linear_in_alpha() {
        let g = KernelSpec::gaussian(0.7).unwrap();
        let x = line(&[0.0, 0.5, 1.4]);
        let mut m = krr_fit(x.as_ref(), &[1.0, 2.0, 0.0], &g, 0.1).unwrap();
        let q = line(&[0.2, 0.9]);
        let base = m.predict(q.as_ref()).unwrap();
        m.dual_coefficients.iter_mut().for_each(|a| *a *= 2.0);
        let doubled = m.predict(q.as_ref()).unwrap();
        for (b, d) in base.iter().zip(&doubled) {
            assert!((2.0 * b - d).abs() < 1e-14);
        }
        m.dual_coefficients.iter_mut().for_each(|a| *a = 0.0);
        assert!(m.predict(q.as_ref()).unwrap().iter().all(|&p| p == 0.0));
    }
}
