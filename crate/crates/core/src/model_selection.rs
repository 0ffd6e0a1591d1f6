//! Validation losses, the (kernel, J) tuning loop and baseline tuning.

use std::sync::Arc;
use std::time::Instant;

use faer::MatRef;
use serde::Serialize;

use crate::baselines::{knn_predict, krr_fit, nw_predict, KrrModel};
use crate::dataset::Dataset;
use crate::diffusion::{fit_basis_timed, BasisOptions};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::nystrom::extend;
use crate::series::{estimate_coefficients, pool_rows, SeriesModel};

/// Default cap on the number of basis functions considered.
pub const DEFAULT_J_MAX: usize = 60;

/// Mean squared error `(1/n) Σ (y_i − ŷ_i)²`.
pub fn empirical_loss(predictions: &[f64], actuals: &[f64]) -> Result<f64> {
    check_pair(predictions, actuals, 1)?;
    let n = predictions.len() as f64;
    Ok(predictions
        .iter()
        .zip(actuals)
        .map(|(p, y)| (y - p) * (y - p))
        .sum::<f64>()
        / n)
}

/// Standard error of [`empirical_loss`]: `s / √n` with `s²` the sample
/// variance of the squared residuals.
pub fn loss_se(predictions: &[f64], actuals: &[f64]) -> Result<f64> {
    check_pair(predictions, actuals, 2)?;
    let sq: Vec<f64> = predictions
        .iter()
        .zip(actuals)
        .map(|(p, y)| (y - p) * (y - p))
        .collect();
    let n = sq.len() as f64;
    let mean = sq.iter().sum::<f64>() / n;
    let var = sq.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok((var / n).sqrt())
}

fn check_pair(a: &[f64], b: &[f64], min: usize) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: b.len(),
            found: a.len(),
        });
    }
    if a.len() < min {
        return Err(Error::invalid(format!(
            "need at least {min} observations, got {}",
            a.len()
        )));
    }
    Ok(())
}

/// Spearman rank correlation, with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    check_pair(a, b, 2)?;
    let ra = ranks(a);
    let rb = ranks(b);
    let n = a.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::invalid("rank correlation of a constant vector"));
    }
    Ok(sab / (saa * sbb).sqrt())
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
    let mut out = vec![0.0; v.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && v[idx[end]] == v[idx[start]] {
            end += 1;
        }
        let avg = (start + end - 1) as f64 / 2.0 + 1.0;
        for &i in &idx[start..end] {
            out[i] = avg;
        }
        start = end;
    }
    out
}

/// Kernel candidates and the largest truncation to consider.
#[derive(Debug, Clone, PartialEq)]
pub struct TuneGrid {
    pub kernels: Vec<KernelSpec>,
    pub j_max: usize,
}

impl TuneGrid {
    pub fn new(kernels: Vec<KernelSpec>, j_max: usize) -> Result<Self> {
        let grid = TuneGrid { kernels, j_max };
        grid.validate()?;
        Ok(grid)
    }

    pub fn gaussian(bandwidths: &[f64], j_max: usize) -> Result<Self> {
        let kernels = bandwidths
            .iter()
            .map(|&e| KernelSpec::gaussian(e))
            .collect::<Result<Vec<_>>>()?;
        TuneGrid::new(kernels, j_max)
    }

    pub fn polynomial(degrees: &[u32], j_max: usize) -> Result<Self> {
        let kernels = degrees
            .iter()
            .map(|&q| KernelSpec::polynomial(q))
            .collect::<Result<Vec<_>>>()?;
        TuneGrid::new(kernels, j_max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.kernels.is_empty() {
            return Err(Error::invalid("empty tuning grid"));
        }
        for k in &self.kernels {
            k.validate()?;
        }
        let eps: Vec<f64> = self.kernels.iter().filter_map(KernelSpec::bandwidth).collect();
        if eps.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("bandwidths must be strictly ascending"));
        }
        Ok(())
    }
}

/// Wall-clock seconds per stage, summed over all candidates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub kernel: f64,
    pub eigen: f64,
    pub coefficients: f64,
    pub validation: f64,
}

impl StageTimings {
    pub fn total(&self) -> f64 {
        self.kernel + self.eigen + self.coefficients + self.validation
    }
}

/// One point of a tuning grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "estimator", rename_all = "kebab-case")]
pub enum Candidate {
    Series { kernel: KernelSpec, j: usize },
    NadarayaWatson { bandwidth: f64 },
    Knn { k: usize },
    Krr { kernel: KernelSpec, penalty: f64 },
}

impl Candidate {
    /// Short label for the kernel or estimator family.
    pub fn label(&self) -> String {
        match self {
            Candidate::Series { kernel, .. } => kernel.family().to_string(),
            Candidate::NadarayaWatson { .. } => "nw".into(),
            Candidate::Knn { .. } => "knn".into(),
            Candidate::Krr { kernel, .. } => format!("krr-{}", kernel.family()),
        }
    }

    /// The primary smoothing parameter (ε, q or k).
    pub fn param(&self) -> f64 {
        match self {
            Candidate::Series { kernel, .. } | Candidate::Krr { kernel, .. } => kernel.param(),
            Candidate::NadarayaWatson { bandwidth } => *bandwidth,
            Candidate::Knn { k } => *k as f64,
        }
    }

    /// True when `self` is the smoother of two comparable candidates.
    fn smoother_than(&self, other: &Candidate) -> bool {
        fn kernel_smoother(a: &KernelSpec, b: &KernelSpec) -> Option<bool> {
            match (a, b) {
                (KernelSpec::Gaussian { bandwidth: x }, KernelSpec::Gaussian { bandwidth: y }) => {
                    (x != y).then_some(x > y)
                }
                (KernelSpec::Polynomial { degree: x }, KernelSpec::Polynomial { degree: y }) => {
                    (x != y).then_some(x < y)
                }
                _ => None,
            }
        }
        match (self, other) {
            (Candidate::Series { kernel: ka, j: ja }, Candidate::Series { kernel: kb, j: jb }) => {
                if ja != jb {
                    ja < jb
                } else {
                    kernel_smoother(ka, kb).unwrap_or(false)
                }
            }
            (Candidate::NadarayaWatson { bandwidth: a }, Candidate::NadarayaWatson { bandwidth: b }) => a > b,
            (Candidate::Knn { k: a }, Candidate::Knn { k: b }) => a > b,
            (Candidate::Krr { kernel: ka, penalty: pa }, Candidate::Krr { kernel: kb, penalty: pb }) => {
                if pa != pb {
                    pa > pb
                } else {
                    kernel_smoother(ka, kb).unwrap_or(false)
                }
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossPoint {
    pub candidate: Candidate,
    pub loss: f64,
}

/// Validation-loss surface and the selected candidate.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub loss_surface: Vec<LossPoint>,
    pub chosen: Candidate,
    pub validation_loss: f64,
    pub test_loss: Option<f64>,
    pub test_se: Option<f64>,
    pub timings: StageTimings,
}

impl FitReport {
    fn from_surface(loss_surface: Vec<LossPoint>, timings: StageTimings) -> Result<Self> {
        let best = select_best(&loss_surface)
            .ok_or_else(|| Error::Numerical("no candidate produced a finite validation loss".into()))?;
        Ok(FitReport {
            chosen: best.candidate,
            validation_loss: best.loss,
            loss_surface,
            test_loss: None,
            test_se: None,
            timings,
        })
    }

    /// Records the held-out loss and its standard error.
    pub fn record_test(&mut self, predictions: &[f64], actuals: &[f64]) -> Result<()> {
        self.test_loss = Some(empirical_loss(predictions, actuals)?);
        self.test_se = Some(loss_se(predictions, actuals)?);
        Ok(())
    }

    /// Long-format CSV: `kernel,param,J,loss`. Baseline rows leave `J` empty.
    pub fn write_surface_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        use crate::dataset::fmt_float;
        writeln!(out, "kernel,param,J,loss")?;
        for p in &self.loss_surface {
            let j = match p.candidate {
                Candidate::Series { j, .. } => j.to_string(),
                _ => String::new(),
            };
            writeln!(
                out,
                "{},{},{},{}",
                p.candidate.label(),
                fmt_float(p.candidate.param()),
                j,
                fmt_float(p.loss)
            )?;
        }
        Ok(())
    }
}

/// Minimum-loss point; exact ties go to the smoother candidate.
fn select_best(points: &[LossPoint]) -> Option<LossPoint> {
    let mut best: Option<LossPoint> = None;
    for p in points.iter().filter(|p| p.loss.is_finite()) {
        best = match best {
            None => Some(*p),
            Some(b) if p.loss < b.loss => Some(*p),
            Some(b) if p.loss == b.loss && p.candidate.smoother_than(&b.candidate) => Some(*p),
            keep => keep,
        };
    }
    best
}

/// Validation loss for every truncation `J = 0..=j_last` of one fitted
/// model, using a single extension of all components.
pub fn truncation_losses(
    model: &SeriesModel,
    j_last: usize,
    x_val: MatRef<'_, f64>,
    y_val: &[f64],
) -> Result<Vec<f64>> {
    let psi = extend(model.basis(), x_val, j_last)?;
    let beta = model.coefficients();
    let m = x_val.nrows();
    let mut partial = vec![0.0; m];
    let mut losses = Vec::with_capacity(j_last + 1);
    for j in 0..=j_last {
        for (i, p) in partial.iter_mut().enumerate() {
            *p += beta[j] * psi[(i, j)];
        }
        losses.push(empirical_loss(&partial, y_val)?);
    }
    Ok(losses)
}

pub fn tune_series(
    train: &Dataset,
    val: &Dataset,
    grid: &TuneGrid,
    options: &BasisOptions,
) -> Result<(SeriesModel, FitReport)> {
    tune_series_ssl(train, None, val, grid, options)
}

/// Tunes (kernel, J) on a validation set. Each kernel candidate is fitted
/// once at `J_max`; smaller truncations reuse the same coefficients.
/// Unlabeled rows, if given, join the basis but not the coefficients.
pub fn tune_series_ssl(
    train: &Dataset,
    unlabeled: Option<MatRef<'_, f64>>,
    val: &Dataset,
    grid: &TuneGrid,
    options: &BasisOptions,
) -> Result<(SeriesModel, FitReport)> {
    grid.validate()?;
    let y_train = train.require_responses("training")?;
    let y_val = val.require_responses("validation")?;
    if train.d() != val.d() {
        return Err(Error::DimensionMismatch {
            expected: train.d(),
            found: val.d(),
        });
    }
    let pooled = pool_rows(train.features(), unlabeled)?;
    let ssl = pooled.nrows() > train.n();
    let j_cap = grid.j_max.min(pooled.nrows() - 1);
    let labeled: Vec<usize> = (0..train.n()).collect();

    let mut timings = StageTimings::default();
    let mut surface = Vec::new();
    let mut models = Vec::new();
    for kernel in &grid.kernels {
        let (basis, bt) = fit_basis_timed(pooled.as_ref(), kernel, j_cap, options)?;
        timings.kernel += bt.kernel;
        timings.eigen += bt.eigen;

        let Some(j_last) = basis.extendable_j() else {
            log::warn!("{kernel:?}: no eigenvalue above the floor; skipped");
            continue;
        };
        let start = Instant::now();
        let beta = estimate_coefficients(&basis, &labeled, y_train)?;
        let model = SeriesModel::new(Arc::new(basis), beta, j_cap, ssl)?;
        timings.coefficients += start.elapsed().as_secs_f64();

        let start = Instant::now();
        let losses = truncation_losses(&model, j_last, val.features(), y_val)?;
        timings.validation += start.elapsed().as_secs_f64();
        if j_last < j_cap {
            log::debug!("{kernel:?}: components above J = {j_last} are below the eigenvalue floor");
        }
        for (j, loss) in losses.into_iter().enumerate() {
            surface.push(LossPoint {
                candidate: Candidate::Series { kernel: *kernel, j },
                loss,
            });
        }
        models.push(model);
    }

    let report = FitReport::from_surface(surface, timings)?;
    let Candidate::Series { kernel, j } = report.chosen else {
        unreachable!("series surface holds only series candidates");
    };
    let model = models
        .into_iter()
        .find(|m| *m.basis().kernel() == kernel)
        .expect("chosen kernel was fitted")
        .with_truncation(j)?;
    Ok((model, report))
}

/// A fitted baseline estimator.
#[derive(Debug, Clone)]
pub enum BaselineModel {
    NadarayaWatson {
        x: faer::Mat<f64>,
        y: Vec<f64>,
        bandwidth: f64,
    },
    Knn {
        x: faer::Mat<f64>,
        y: Vec<f64>,
        k: usize,
    },
    Krr(KrrModel),
}

impl BaselineModel {
    pub fn fit(candidate: &Candidate, x: MatRef<'_, f64>, y: &[f64]) -> Result<Self> {
        match *candidate {
            Candidate::NadarayaWatson { bandwidth } => Ok(BaselineModel::NadarayaWatson {
                x: x.to_owned(),
                y: y.to_vec(),
                bandwidth,
            }),
            Candidate::Knn { k } => Ok(BaselineModel::Knn {
                x: x.to_owned(),
                y: y.to_vec(),
                k,
            }),
            Candidate::Krr { kernel, penalty } => Ok(BaselineModel::Krr(krr_fit(x, y, &kernel, penalty)?)),
            Candidate::Series { .. } => Err(Error::invalid("series candidates are tuned by tune_series")),
        }
    }

    pub fn predict(&self, xnew: MatRef<'_, f64>) -> Result<Vec<f64>> {
        match self {
            BaselineModel::NadarayaWatson { x, y, bandwidth } => nw_predict(x.as_ref(), y, *bandwidth, xnew),
            BaselineModel::Knn { x, y, k } => knn_predict(x.as_ref(), y, *k, xnew),
            BaselineModel::Krr(m) => m.predict(xnew),
        }
    }
}

/// Picks the baseline candidate with the lowest validation loss; exact ties
/// go to the smoother parameter (larger ε, k or γ).
pub fn tune_baseline(
    train: &Dataset,
    val: &Dataset,
    candidates: &[Candidate],
) -> Result<(BaselineModel, FitReport)> {
    if candidates.is_empty() {
        return Err(Error::invalid("no baseline candidates"));
    }
    let y_train = train.require_responses("training")?;
    let y_val = val.require_responses("validation")?;
    let mut timings = StageTimings::default();
    let mut surface = Vec::with_capacity(candidates.len());
    for c in candidates {
        let start = Instant::now();
        let model = match BaselineModel::fit(c, train.features(), y_train) {
            Ok(m) => m,
            Err(e) if e.kind() == crate::error::ErrorKind::Numerical => {
                log::debug!("{c:?} skipped: {e}");
                continue;
            }
            Err(e) => return Err(e),
        };
        timings.coefficients += start.elapsed().as_secs_f64();
        let start = Instant::now();
        let pred = model.predict(val.features())?;
        surface.push(LossPoint {
            candidate: *c,
            loss: empirical_loss(&pred, y_val)?,
        });
        timings.validation += start.elapsed().as_secs_f64();
    }
    let report = FitReport::from_surface(surface, timings)?;
    let model = BaselineModel::fit(&report.chosen, train.features(), y_train)?;
    Ok((model, report))
}

/// Ridge penalties `1e-8 ..= 1e2`, ten log-spaced points.
pub fn default_penalties() -> Vec<f64> {
    (0..10).map(|i| 10f64.powf(-8.0 + 10.0 * i as f64 / 9.0)).collect()
}

/// Neighbor counts roughly log-spaced over `1..=n`.
pub fn default_neighbor_counts(n: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = (0..12)
        .map(|i| ((n as f64).powf(i as f64 / 11.0)).round() as usize)
        .map(|k| k.clamp(1, n))
        .collect();
    ks.dedup();
    ks
}
