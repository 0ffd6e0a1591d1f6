//! Argument definitions and the body of each subcommand.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spectral_series::dataset::{
    fmt_float, gen_circle, gen_spiral, gen_uniform_interval, read_csv_table, split,
    CsvTable, Dataset, ResponseColumn, SplitSpec, Standardizer, CIRCLE_NOISE_VAR, RESPONSE_COLUMN,
    SPIRAL_NOISE_SD, SPIRAL_U_MAX,
};
use spectral_series::diffusion::{fit_basis, BasisOptions, EigenMethod, NormalizationMode};
use spectral_series::kernels::{bandwidth_grid, KernelSpec};
use spectral_series::model_selection::{spearman, tune_series_ssl, FitReport, TuneGrid, DEFAULT_J_MAX};
use spectral_series::nystrom::eigenmap;
use spectral_series::Mat;

use crate::archive::{ModelArchive, Preprocessing};
use crate::error::{CliError, Result};
use crate::experiments::{self, Estimator, SuiteRecord, TrialConfig};
use crate::output::{ensure_dir, write_atomic};

#[derive(Debug, Parser)]
#[command(name = "spectral-series", version, about = "Spectral series nonparametric regression")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset as CSV.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Tune bandwidth or degree and truncation on a split of a CSV file.
    Tune(TuneArgs),
    /// Predict with a saved model.
    Predict(PredictArgs),
    /// Export eigenmap coordinates.
    Embed(EmbedArgs),
    /// Run a benchmark suite.
    Benchmark(BenchmarkArgs),
    /// Check generated data or exported coordinates.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Noisy spiral in the plane; the response is the arc parameter.
    Spiral {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = SPIRAL_NOISE_SD, help = "Noise standard deviation (implementation default)")]
        noise_sd: f64,
        #[arg(long, default_value_t = SPIRAL_U_MAX, help = "Upper limit of u (implementation default 9π²)")]
        u_max: f64,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Unit circle embedded in d dimensions with a noisy angle response.
    Circle {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        d: usize,
        #[arg(long, default_value_t = CIRCLE_NOISE_VAR)]
        noise_var: f64,
        /// Place the circle in a random plane.
        #[arg(long)]
        rotate: bool,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Uniform sample on an interval, no response.
    Uniform {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        hi: f64,
        #[command(flatten)]
        common: GenCommon,
    },
}

#[derive(Debug, Args)]
pub struct GenCommon {
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelFamily {
    Gaussian,
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Full,
    Randomized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Stochastic,
    Symmetric,
    BiasCorrected,
    Uniform,
}

impl From<ModeArg> for NormalizationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Stochastic => NormalizationMode::Stochastic,
            ModeArg::Symmetric => NormalizationMode::Symmetric,
            ModeArg::BiasCorrected => NormalizationMode::BiasCorrected,
            ModeArg::Uniform => NormalizationMode::Uniform,
        }
    }
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Full)]
    method: MethodArg,
    #[arg(long, default_value_t = EigenMethod::DEFAULT_OVERSAMPLE)]
    oversample: usize,
    #[arg(long, default_value_t = EigenMethod::DEFAULT_POWER_ITERS)]
    power_iters: usize,
    /// Kernel normalization. Defaults to uniform for polynomial kernels and
    /// stochastic otherwise.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
}

impl EigenArgs {
    fn options(&self, family: KernelFamily, seed: u64) -> BasisOptions {
        let mode = match (self.mode, family) {
            (Some(m), _) => m.into(),
            (None, KernelFamily::Poly) => NormalizationMode::Uniform,
            (None, KernelFamily::Gaussian) => NormalizationMode::Stochastic,
        };
        let method = match self.method {
            MethodArg::Full => EigenMethod::Full,
            MethodArg::Randomized => EigenMethod::Randomized {
                oversample: self.oversample,
                power_iters: self.power_iters,
                seed,
            },
        };
        BasisOptions { mode, method }
    }
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    /// Training CSV with a header line.
    #[arg(long)]
    data: PathBuf,
    /// Name of the response column.
    #[arg(long, default_value = RESPONSE_COLUMN)]
    response: String,
    #[arg(long, value_enum, default_value_t = KernelFamily::Gaussian)]
    kernel: KernelFamily,
    /// Polynomial degrees to try.
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3, 4, 5, 6])]
    degree: Vec<u32>,
    /// Gaussian bandwidths to try; a quantile grid when omitted.
    #[arg(long, value_delimiter = ',')]
    bandwidth: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    grid_size: usize,
    #[arg(long, default_value_t = DEFAULT_J_MAX)]
    jmax: usize,
    #[command(flatten)]
    eigen: EigenArgs,
    #[arg(long)]
    seed: Option<u64>,
    /// Train, validation and test fractions.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.25, 0.25])]
    split: Vec<f64>,
    /// Extra covariates that join the basis but carry no labels.
    #[arg(long)]
    unlabeled: Option<PathBuf>,
    /// Standardize covariates using training-split statistics.
    #[arg(long)]
    standardize: bool,
    /// Scale each row to unit Euclidean norm.
    #[arg(long)]
    unit_norm: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Query CSV with a header line. A response column, if present, is ignored.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Points to embed (CSV with a header line).
    #[arg(long)]
    data: PathBuf,
    /// Embed through a saved model's basis instead of fitting one on `--data`.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Number of coordinates.
    #[arg(long, short = 'j')]
    j: usize,
    /// Gaussian bandwidth when fitting on `--data`; a twentieth of the
    /// median grid point when omitted.
    #[arg(long)]
    bandwidth: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Response column copied to the output for colouring.
    #[arg(long, default_value = RESPONSE_COLUMN)]
    response: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    CircleDims,
    GrowingN,
    SpiralCompare,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Ambient dimensions for circle-dims.
    #[arg(long, value_delimiter = ',', default_values_t = [10usize, 50, 100, 500, 1000, 2500])]
    dims: Vec<usize>,
    /// Sample size for circle-dims.
    #[arg(long, default_value_t = 500)]
    n: usize,
    /// Sample sizes for growing-n and spiral-compare.
    #[arg(long, value_delimiter = ',')]
    ns: Vec<usize>,
    /// Ambient dimension for growing-n.
    #[arg(long, default_value_t = 10)]
    d: usize,
    #[arg(long, default_value_t = CIRCLE_NOISE_VAR)]
    noise_var: f64,
    #[arg(long, default_value_t = SPIRAL_NOISE_SD)]
    noise_sd: f64,
    #[arg(long)]
    rotate: bool,
    /// Number of replicates.
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    /// First replicate seed; later replicates count up from it.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    estimators: Vec<Estimator>,
    #[arg(long, default_value_t = 10)]
    grid_size: usize,
    #[arg(long)]
    jmax: Option<usize>,
    #[arg(long, default_value_t = EigenMethod::DEFAULT_OVERSAMPLE)]
    oversample: usize,
    #[arg(long, default_value_t = EigenMethod::DEFAULT_POWER_ITERS)]
    power_iters: usize,
    /// Output directory for loss.csv, time.csv and summary.txt.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Every row of a noiseless spiral file lies on the curve its response names.
    Spiral {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// The first exported coordinate is monotone in the response.
    Embedding {
        /// Output of `embed`, with a response column.
        #[arg(long)]
        coords: PathBuf,
        #[arg(long, default_value_t = 0.95)]
        min_rho: f64,
    },
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(g) => cmd_gen(g),
        Command::Tune(a) => cmd_tune(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Embed(a) => cmd_embed(a),
        Command::Benchmark(a) => cmd_benchmark(a),
        Command::Verify(v) => cmd_verify(v),
    }
}

/// The given seed, or a fresh one that is printed so the run can be repeated.
fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        println!("seed={s}");
        s
    })
}

fn cmd_gen(cmd: GenCommand) -> Result<()> {
    let (data, common) = match cmd {
        GenCommand::Spiral { n, noise_sd, u_max, common } => {
            let seed = resolve_seed(common.seed);
            (gen_spiral(n, noise_sd, u_max, seed)?, (seed, common.out))
        }
        GenCommand::Circle { n, d, noise_var, rotate, common } => {
            let seed = resolve_seed(common.seed);
            (gen_circle(n, d, noise_var, rotate, seed)?, (seed, common.out))
        }
        GenCommand::Uniform { n, lo, hi, common } => {
            let seed = resolve_seed(common.seed);
            (gen_uniform_interval(n, lo, hi, seed)?, (seed, common.out))
        }
    };
    let (seed, out) = common;
    let comment = format!("seed={seed}");
    match out {
        Some(path) => write_atomic(&path, |w| data.write_csv(w, Some(&comment))),
        None => data
            .write_csv(std::io::stdout().lock(), Some(&comment))
            .map_err(|e| CliError::Io {
                context: "writing to standard output".into(),
                source: e,
            }),
    }
}

/// Query features with the named response column removed when present.
struct Features {
    x: Mat<f64>,
    response: Option<Vec<f64>>,
}

fn read_features(path: &Path, response: Option<&str>) -> Result<Features> {
    let CsvTable { header, ncols, rows } = read_csv_table(path, true)?;
    let drop = match (&header, response) {
        (Some(h), Some(name)) => h.iter().position(|c| c == name),
        _ => None,
    };
    let keep: Vec<usize> = (0..ncols).filter(|&c| Some(c) != drop).collect();
    Ok(Features {
        x: Mat::from_fn(rows.len(), keep.len(), |i, j| rows[i][keep[j]]),
        response: drop.map(|c| rows.iter().map(|r| r[c]).collect()),
    })
}

#[derive(Serialize)]
struct TuneRecord<'a> {
    seed: u64,
    data: String,
    n_train: usize,
    n_val: usize,
    n_test: usize,
    n_unlabeled: usize,
    j_max: usize,
    options: BasisOptions,
    unit_norm: bool,
    standardize: bool,
    report: &'a FitReport,
}

fn cmd_tune(args: TuneArgs) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let &[f_train, f_val, f_test] = args.split.as_slice() else {
        return Err(CliError::Input(format!(
            "--split needs three fractions, got {}",
            args.split.len()
        )));
    };
    let spec = SplitSpec::new(f_train, f_val, f_test, seed)?;
    let data = read_csv_table(&args.data, true)?
        .into_dataset(Some(&ResponseColumn::Name(args.response.clone())))?;

    let mut pre = Preprocessing {
        unit_norm: args.unit_norm,
        standardizer: None,
    };
    let work = data.with_features(pre.apply(data.features())?)?;
    let (train, val, test) = split(&work, &spec)?;
    if args.standardize {
        pre.standardizer = Some(Standardizer::fit(train.features())?);
    }
    let transform = |ds: &Dataset| -> Result<Dataset> {
        match &pre.standardizer {
            Some(s) => Ok(ds.with_features(s.transform(ds.features())?)?),
            None => Ok(ds.clone()),
        }
    };
    let (train, val, test) = (transform(&train)?, transform(&val)?, transform(&test)?);
    let unlabeled = match &args.unlabeled {
        Some(path) => {
            let f = read_features(path, Some(&args.response))?;
            if f.x.nrows() == 0 {
                return Err(CliError::Input(format!("{} has no data rows", path.display())));
            }
            Some(pre.apply(f.x.as_ref())?)
        }
        None => None,
    };

    let grid = match args.kernel {
        KernelFamily::Gaussian => {
            let mut eps = if args.bandwidth.is_empty() {
                bandwidth_grid(train.features(), args.grid_size)?
            } else {
                args.bandwidth.clone()
            };
            eps.sort_by(f64::total_cmp);
            eps.dedup();
            TuneGrid::gaussian(&eps, args.jmax)?
        }
        KernelFamily::Poly => {
            let mut q = args.degree.clone();
            q.sort_unstable();
            q.dedup();
            TuneGrid::polynomial(&q, args.jmax)?
        }
    };
    let opts = args.eigen.options(args.kernel, seed);
    let (model, mut report) =
        tune_series_ssl(&train, unlabeled.as_ref().map(|m| m.as_ref()), &val, &grid, &opts)?;
    let test_pred = model.predict(test.features())?;
    report.record_test(&test_pred, test.require_responses("test")?)?;

    let archive = ModelArchive {
        model,
        preprocessing: pre,
        feature_names: data.column_names().map(<[String]>::to_vec),
        response_name: Some(args.response.clone()),
    };
    let fitted = archive.predict(data.features())?;

    ensure_dir(&args.out)?;
    archive.save(&args.out.join("model.ssm"))?;
    write_atomic(&args.out.join("loss_surface.csv"), |w| report.write_surface_csv(w))?;
    write_atomic(&args.out.join("fitted.csv"), |w| write_predictions(w, &fitted))?;
    let record = TuneRecord {
        seed,
        data: args.data.display().to_string(),
        n_train: train.n(),
        n_val: val.n(),
        n_test: test.n(),
        n_unlabeled: unlabeled.as_ref().map_or(0, |m| m.nrows()),
        j_max: args.jmax,
        options: opts,
        unit_norm: args.unit_norm,
        standardize: args.standardize,
        report: &report,
    };
    let json = serde_json::to_string_pretty(&record).expect("report serializes");
    write_atomic(&args.out.join("report.json"), |w| writeln!(w, "{json}"))?;
    let summary = tune_summary(&report, &record);
    write_atomic(&args.out.join("summary.txt"), |w| w.write_all(summary.as_bytes()))?;
    print!("{summary}");
    Ok(())
}

fn tune_summary(report: &FitReport, record: &TuneRecord<'_>) -> String {
    let (kernel, j) = match report.chosen {
        spectral_series::model_selection::Candidate::Series { kernel, j } => (kernel, j),
        other => unreachable!("series tuning chose {other:?}"),
    };
    let kernel = match kernel {
        KernelSpec::Gaussian { bandwidth } => format!("gaussian, bandwidth {bandwidth:.6e}"),
        KernelSpec::Polynomial { degree } => format!("polynomial, degree {degree}"),
    };
    let t = report.timings;
    let mut s = String::new();
    s += &format!("seed             {}\n", record.seed);
    s += &format!(
        "split            {} train / {} validation / {} test",
        record.n_train, record.n_val, record.n_test
    );
    if record.n_unlabeled > 0 {
        s += &format!(" / {} unlabeled", record.n_unlabeled);
    }
    s += "\n";
    s += &format!("kernel           {kernel}\n");
    s += &format!("truncation J     {j}\n");
    s += &format!("validation loss  {:.6e}\n", report.validation_loss);
    s += &format!(
        "test loss        {:.6e} ± {:.2e}\n",
        report.test_loss.unwrap_or(f64::NAN),
        report.test_se.unwrap_or(f64::NAN)
    );
    s += &format!(
        "timings (s)      kernel {:.3}  eigen {:.3}  coefficients {:.3}  validation {:.3}\n",
        t.kernel, t.eigen, t.coefficients, t.validation
    );
    s
}

fn write_predictions(w: &mut dyn Write, values: &[f64]) -> std::io::Result<()> {
    writeln!(w, "prediction")?;
    for v in values {
        writeln!(w, "{}", fmt_float(*v))?;
    }
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<()> {
    let archive = ModelArchive::load(&args.model)?;
    let q = read_features(&args.data, archive.response_name.as_deref())?;
    let pred = if q.x.nrows() == 0 {
        Vec::new()
    } else {
        archive.predict(q.x.as_ref())?
    };
    write_atomic(&args.out, |w| write_predictions(w, &pred))
}

fn cmd_embed(args: EmbedArgs) -> Result<()> {
    if args.j == 0 {
        return Err(CliError::Input("J must be at least 1".into()));
    }
    let q = read_features(&args.data, Some(&args.response))?;
    if q.x.nrows() == 0 {
        return Err(CliError::Input(format!("{} has no data rows", args.data.display())));
    }
    let coords = match &args.model {
        Some(path) => {
            let archive = ModelArchive::load(path)?;
            let basis = archive.model.basis();
            check_components(args.j, basis.extendable_j().unwrap_or(0))?;
            let x = archive.preprocessing.apply(q.x.as_ref())?;
            eigenmap(basis, x.as_ref(), args.j)?
        }
        None => {
            check_components(args.j, q.x.nrows() - 1)?;
            let eps = match args.bandwidth {
                Some(e) => e,
                None => bandwidth_grid(q.x.as_ref(), 1)?[0] / 20.0,
            };
            let opts = BasisOptions {
                mode: args.mode.map_or(NormalizationMode::Stochastic, Into::into),
                method: EigenMethod::Full,
            };
            let basis = fit_basis(q.x.as_ref(), &KernelSpec::gaussian(eps)?, args.j, &opts)?;
            check_components(args.j, basis.extendable_j().unwrap_or(0))?;
            eigenmap(&basis, q.x.as_ref(), args.j)?
        }
    };
    write_atomic(&args.out, |w| {
        let mut header: Vec<String> = (1..=args.j).map(|c| format!("psi{c}")).collect();
        if q.response.is_some() {
            header.push(args.response.clone());
        }
        writeln!(w, "{}", header.join(","))?;
        for i in 0..coords.nrows() {
            let mut row: Vec<String> = (0..args.j).map(|c| fmt_float(coords[(i, c)])).collect();
            if let Some(y) = &q.response {
                row.push(fmt_float(y[i]));
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    })
}

fn check_components(j: usize, available: usize) -> Result<()> {
    if j > available {
        return Err(CliError::Numerical(format!(
            "J = {j} exceeds the {available} available nontrivial components"
        )));
    }
    Ok(())
}

fn cmd_benchmark(args: BenchmarkArgs) -> Result<()> {
    let base = resolve_seed(args.seed);
    let seeds: Vec<u64> = (0..args.seeds).map(|k| base.wrapping_add(k)).collect();
    let cfg = TrialConfig {
        grid_size: args.grid_size,
        j_max: args.jmax,
        oversample: args.oversample,
        power_iters: args.power_iters,
        ..Default::default()
    };
    let pick = |default: &[Estimator]| {
        if args.estimators.is_empty() {
            default.to_vec()
        } else {
            args.estimators.clone()
        }
    };
    let ns = |default: &[usize]| {
        if args.ns.is_empty() {
            default.to_vec()
        } else {
            args.ns.clone()
        }
    };
    use Estimator::*;
    let records: Vec<SuiteRecord> = match args.suite {
        Suite::CircleDims => experiments::circle_dims(
            &args.dims,
            args.n,
            args.noise_var,
            args.rotate,
            &seeds,
            &pick(&[SeriesRadial, KrrRadial, Nw, Knn]),
            &cfg,
        )?,
        Suite::GrowingN => experiments::growing_n(
            &ns(&[250, 500, 1000, 2000]),
            args.d,
            args.noise_var,
            &seeds,
            &pick(&[SeriesRadial, SeriesRsvd]),
            &cfg,
        )?,
        Suite::SpiralCompare => experiments::spiral_compare(
            &ns(&[400]),
            args.noise_sd,
            &seeds,
            &pick(&[SeriesRadial, SeriesPoly, SeriesPoly1, KrrRadial, Nw, Knn]),
            &cfg,
        )?,
    };
    ensure_dir(&args.out)?;
    write_atomic(&args.out.join("loss.csv"), |w| experiments::write_loss_csv(&records, w))?;
    write_atomic(&args.out.join("time.csv"), |w| experiments::write_time_csv(&records, w))?;
    let mut summary = Vec::new();
    experiments::write_summary(&records, &mut summary).expect("writing to memory");
    write_atomic(&args.out.join("summary.txt"), |w| w.write_all(&summary))?;
    std::io::stdout()
        .write_all(&summary)
        .map_err(|e| CliError::Io {
            context: "writing to standard output".into(),
            source: e,
        })
}

fn cmd_verify(cmd: VerifyCommand) -> Result<()> {
    match cmd {
        VerifyCommand::Spiral { data, tol } => {
            let ds = read_csv_table(&data, true)?.into_dataset(Some(&RESPONSE_COLUMN.into()))?;
            if ds.d() != 2 {
                return Err(CliError::Input(format!("spiral data has 2 features, found {}", ds.d())));
            }
            let y = ds.require_responses("spiral")?;
            let mut worst = 0.0f64;
            for (i, &t) in y.iter().enumerate() {
                let (px, py) = (t * t.cos(), t * t.sin());
                let dx = ds.features()[(i, 0)] - px;
                let dy = ds.features()[(i, 1)] - py;
                worst = worst.max(dx.hypot(dy) / (1.0 + t.abs()));
            }
            let ok = worst <= tol;
            println!(
                "spiral identity: max relative deviation {worst:.3e} (tolerance {tol:.1e}) {}",
                if ok { "ok" } else { "FAILED" }
            );
            ok.then_some(())
                .ok_or_else(|| CliError::Check(format!("{} rows are off the spiral", data.display())))
        }
        VerifyCommand::Embedding { coords, min_rho } => {
            let ds = read_csv_table(&coords, true)?.into_dataset(Some(&RESPONSE_COLUMN.into()))?;
            let first: Vec<f64> = (0..ds.n()).map(|i| ds.features()[(i, 0)]).collect();
            let rho = spearman(&first, ds.require_responses("embedding")?)?;
            let ok = rho.abs() >= min_rho;
            println!(
                "embedding: |Spearman| between the first coordinate and the response is {:.4} (minimum {min_rho}) {}",
                rho.abs(),
                if ok { "ok" } else { "FAILED" }
            );
            ok.then_some(())
                .ok_or_else(|| CliError::Check(format!("rank correlation {rho:.4} is below {min_rho}")))
        }
    }
}
