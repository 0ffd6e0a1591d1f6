//! Benchmark harness: one trial splits, standardizes, tunes and scores a
//! single estimator; suites sweep a trial over seeds and a size parameter.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use spectral_series::dataset::{fmt_float, split, standardize, Dataset, SplitSpec};
use spectral_series::diffusion::{BasisOptions, EigenMethod, NormalizationMode};
use spectral_series::kernels::{bandwidth_grid, KernelSpec};
use spectral_series::model_selection::{
    default_neighbor_counts, default_penalties, tune_baseline, tune_series, Candidate, FitReport,
    StageTimings, TuneGrid, DEFAULT_J_MAX,
};
use spectral_series::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    SeriesRadial,
    SeriesPoly,
    SeriesPoly1,
    SeriesRsvd,
    KrrRadial,
    Nw,
    Knn,
}

impl Estimator {
    pub const ALL: [Estimator; 7] = [
        Estimator::SeriesRadial,
        Estimator::SeriesPoly,
        Estimator::SeriesPoly1,
        Estimator::SeriesRsvd,
        Estimator::KrrRadial,
        Estimator::Nw,
        Estimator::Knn,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Estimator::SeriesRadial => "series-radial",
            Estimator::SeriesPoly => "series-poly",
            Estimator::SeriesPoly1 => "series-poly1",
            Estimator::SeriesRsvd => "series-rsvd",
            Estimator::KrrRadial => "krr-radial",
            Estimator::Nw => "nw",
            Estimator::Knn => "knn",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Estimator::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown estimator '{s}'"))
    }
}

/// Settings shared by every trial of a suite.
#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub grid_size: usize,
    pub j_max: Option<usize>,
    pub degrees: Vec<u32>,
    pub split: [f64; 3],
    pub oversample: usize,
    pub power_iters: usize,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            grid_size: 10,
            j_max: None,
            degrees: (1..=6).collect(),
            split: [0.5, 0.25, 0.25],
            oversample: 10,
            power_iters: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub estimator: Estimator,
    pub seed: u64,
    pub report: FitReport,
    /// Wall-clock seconds for the whole trial.
    pub seconds: f64,
}

impl TrialOutcome {
    pub fn test_loss(&self) -> f64 {
        self.report.test_loss.expect("trial records a test loss")
    }

    pub fn test_se(&self) -> f64 {
        self.report.test_se.expect("trial records a test loss")
    }

    pub fn timings(&self) -> StageTimings {
        self.report.timings
    }
}

/// Splits `data`, standardizes on the training part, tunes `estimator` on
/// validation and scores it on test.
pub fn run_trial(data: &Dataset, estimator: Estimator, seed: u64, cfg: &TrialConfig) -> Result<TrialOutcome> {
    let start = Instant::now();
    let [a, b, c] = cfg.split;
    let (train, val, test) = split(data, &SplitSpec::new(a, b, c, seed)?)?;
    let (train, st) = standardize(&train)?;
    let val = val.with_features(st.transform(val.features())?)?;
    let test = test.with_features(st.transform(test.features())?)?;
    let j_max = cfg.j_max.unwrap_or(DEFAULT_J_MAX).min(train.n() - 1);
    let bandwidths = || bandwidth_grid(train.features(), cfg.grid_size);

    let series = |grid: TuneGrid, opts: BasisOptions| -> Result<(Vec<f64>, FitReport)> {
        let (model, report) = tune_series(&train, &val, &grid, &opts)?;
        Ok((model.predict(test.features())?, report))
    };
    let baseline = |cands: Vec<Candidate>| -> Result<(Vec<f64>, FitReport)> {
        let (model, report) = tune_baseline(&train, &val, &cands)?;
        Ok((model.predict(test.features())?, report))
    };
    let uniform = BasisOptions {
        mode: NormalizationMode::Uniform,
        ..Default::default()
    };

    let (pred, mut report) = match estimator {
        Estimator::SeriesRadial => series(TuneGrid::gaussian(&bandwidths()?, j_max)?, BasisOptions::default())?,
        Estimator::SeriesRsvd => series(
            TuneGrid::gaussian(&bandwidths()?, j_max)?,
            BasisOptions {
                method: EigenMethod::Randomized {
                    oversample: cfg.oversample,
                    power_iters: cfg.power_iters,
                    seed,
                },
                ..Default::default()
            },
        )?,
        Estimator::SeriesPoly => series(TuneGrid::polynomial(&cfg.degrees, j_max)?, uniform)?,
        Estimator::SeriesPoly1 => series(TuneGrid::polynomial(&[1], j_max)?, uniform)?,
        Estimator::KrrRadial => {
            let mut cands = Vec::new();
            for eps in bandwidths()? {
                for &penalty in &default_penalties() {
                    cands.push(Candidate::Krr {
                        kernel: KernelSpec::gaussian(eps)?,
                        penalty,
                    });
                }
            }
            baseline(cands)?
        }
        Estimator::Nw => baseline(
            bandwidths()?
                .into_iter()
                .map(|bandwidth| Candidate::NadarayaWatson { bandwidth })
                .collect(),
        )?,
        Estimator::Knn => baseline(
            default_neighbor_counts(train.n())
                .into_iter()
                .map(|k| Candidate::Knn { k })
                .collect(),
        )?,
    };
    report.record_test(&pred, test.require_responses("test")?)?;
    Ok(TrialOutcome {
        estimator,
        seed,
        report,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// One row of a suite's results.
#[derive(Debug, Clone)]
pub struct SuiteRecord {
    pub suite: &'static str,
    pub sweep_value: f64,
    pub outcome: TrialOutcome,
}

pub fn circle_dims(
    dims: &[usize],
    n: usize,
    noise_var: f64,
    rotate: bool,
    seeds: &[u64],
    estimators: &[Estimator],
    cfg: &TrialConfig,
) -> Result<Vec<SuiteRecord>> {
    let mut out = Vec::new();
    for &d in dims {
        for &seed in seeds {
            let data = spectral_series::dataset::gen_circle(n, d, noise_var, rotate, seed)?;
            for &e in estimators {
                out.push(SuiteRecord {
                    suite: "circle-dims",
                    sweep_value: d as f64,
                    outcome: run_trial(&data, e, seed, cfg)?,
                });
            }
        }
    }
    Ok(out)
}

/// Circle data at increasing `n`; compares full and randomized eigensolvers.
pub fn growing_n(
    ns: &[usize],
    d: usize,
    noise_var: f64,
    seeds: &[u64],
    estimators: &[Estimator],
    cfg: &TrialConfig,
) -> Result<Vec<SuiteRecord>> {
    let mut out = Vec::new();
    for &n in ns {
        for &seed in seeds {
            let data = spectral_series::dataset::gen_circle(n, d, noise_var, false, seed)?;
            for &e in estimators {
                out.push(SuiteRecord {
                    suite: "growing-n",
                    sweep_value: n as f64,
                    outcome: run_trial(&data, e, seed, cfg)?,
                });
            }
        }
    }
    Ok(out)
}

pub fn spiral_compare(
    ns: &[usize],
    noise_sd: f64,
    seeds: &[u64],
    estimators: &[Estimator],
    cfg: &TrialConfig,
) -> Result<Vec<SuiteRecord>> {
    let mut out = Vec::new();
    for &n in ns {
        for &seed in seeds {
            let data = spectral_series::dataset::gen_spiral(n, noise_sd, spectral_series::dataset::SPIRAL_U_MAX, seed)?;
            for &e in estimators {
                out.push(SuiteRecord {
                    suite: "spiral-compare",
                    sweep_value: n as f64,
                    outcome: run_trial(&data, e, seed, cfg)?,
                });
            }
        }
    }
    Ok(out)
}

const HEADER: &str = "suite,estimator,sweep_value,seed,loss,se,stage,seconds";

/// Long-format test losses, one row per trial.
pub fn write_loss_csv(records: &[SuiteRecord], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for r in records {
        let o = &r.outcome;
        writeln!(
            out,
            "{},{},{},{},{},{},test,{}",
            r.suite,
            o.estimator,
            r.sweep_value,
            o.seed,
            fmt_float(o.test_loss()),
            fmt_float(o.test_se()),
            fmt_float(o.seconds)
        )?;
    }
    Ok(())
}

/// Long-format stage timings, one row per trial and stage.
pub fn write_time_csv(records: &[SuiteRecord], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for r in records {
        let o = &r.outcome;
        let t = o.timings();
        for (stage, secs) in [
            ("kernel", t.kernel),
            ("eigen", t.eigen),
            ("coefficients", t.coefficients),
            ("validation", t.validation),
        ] {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.suite,
                o.estimator,
                r.sweep_value,
                o.seed,
                fmt_float(o.test_loss()),
                fmt_float(o.test_se()),
                stage,
                fmt_float(secs)
            )?;
        }
    }
    Ok(())
}

pub fn median(mut v: Vec<f64>) -> f64 {
    assert!(!v.is_empty(), "median of an empty sample");
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Median of `f` over the records for one estimator and sweep value.
pub fn median_of<F>(records: &[SuiteRecord], estimator: Estimator, sweep_value: f64, f: F) -> Option<f64>
where
    F: Fn(&TrialOutcome) -> f64,
{
    let v: Vec<f64> = records
        .iter()
        .filter(|r| r.outcome.estimator == estimator && r.sweep_value == sweep_value)
        .map(|r| f(&r.outcome))
        .collect();
    (!v.is_empty()).then(|| median(v))
}

/// Median test loss and stage times per (estimator, sweep value).
pub fn write_summary(records: &[SuiteRecord], out: &mut dyn Write) -> std::io::Result<()> {
    let mut keys: Vec<(Estimator, f64)> = Vec::new();
    for r in records {
        let k = (r.outcome.estimator, r.sweep_value);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    writeln!(
        out,
        "{:<15} {:>10} {:>6} {:>12} {:>10} {:>10} {:>10}",
        "estimator", "sweep", "seeds", "median loss", "kernel s", "eigen s", "coef s"
    )?;
    for (e, s) in keys {
        let count = records
            .iter()
            .filter(|r| r.outcome.estimator == e && r.sweep_value == s)
            .count();
        let m = |f: &dyn Fn(&TrialOutcome) -> f64| median_of(records, e, s, f).unwrap_or(f64::NAN);
        writeln!(
            out,
            "{:<15} {:>10} {:>6} {:>12.5} {:>10.4} {:>10.4} {:>10.4}",
            e.name(),
            s,
            count,
            m(&|o| o.test_loss()),
            m(&|o| o.timings().kernel),
            m(&|o| o.timings().eigen),
            m(&|o| o.timings().coefficients),
        )?;
    }
    Ok(())
}
