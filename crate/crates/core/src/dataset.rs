//! Datasets, CSV ingestion, preprocessing, deterministic splits and the
//! synthetic geometries used throughout the test suite and benchmarks.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use faer::{Mat, MatRef};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name given to the response column when writing CSV files.
pub const RESPONSE_COLUMN: &str = "y";

/// A feature matrix (rows are observations) with optional responses.
#[derive(Debug, Clone)]
pub struct Dataset {
    features: Mat<f64>,
    responses: Option<Vec<f64>>,
    column_names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(
        features: Mat<f64>,
        responses: Option<Vec<f64>>,
        column_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let (n, d) = features.shape();
        if n == 0 || d == 0 {
            return Err(Error::invalid(format!(
                "dataset must have at least one row and one column, got {n}x{d}"
            )));
        }
        if let Some(y) = &responses {
            if y.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: y.len(),
                });
            }
            if let Some(i) = y.iter().position(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("response {i} is not finite")));
            }
        }
        if let Some(names) = &column_names {
            if names.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: names.len(),
                });
            }
        }
        for j in 0..d {
            for i in 0..n {
                if !features[(i, j)].is_finite() {
                    return Err(Error::invalid(format!(
                        "feature ({i}, {j}) is not finite"
                    )));
                }
            }
        }
        Ok(Dataset {
            features,
            responses,
            column_names,
        })
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn d(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> MatRef<'_, f64> {
        self.features.as_ref()
    }

    pub fn responses(&self) -> Option<&[f64]> {
        self.responses.as_deref()
    }

    /// Responses, or an error naming the dataset role when they are absent.
    pub fn require_responses(&self, role: &str) -> Result<&[f64]> {
        self.responses()
            .ok_or_else(|| Error::invalid(format!("{role} data has no responses")))
    }

    pub fn column_names(&self) -> Option<&[String]> {
        self.column_names.as_deref()
    }

    pub fn into_parts(self) -> (Mat<f64>, Option<Vec<f64>>, Option<Vec<String>>) {
        (self.features, self.responses, self.column_names)
    }

    /// Replaces the feature matrix, keeping responses and names.
    pub fn with_features(&self, features: Mat<f64>) -> Result<Self> {
        Dataset::new(features, self.responses.clone(), self.column_names.clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let d = self.d();
        let features = Mat::from_fn(rows.len(), d, |i, j| self.features[(rows[i], j)]);
        let responses = self
            .responses
            .as_ref()
            .map(|y| rows.iter().map(|&i| y[i]).collect());
        Dataset::new(features, responses, self.column_names.clone())
    }

    /// Writes the dataset as CSV with a header line. Feature columns are
    /// named `x1..xd` unless names are attached; the response, if any, is
    /// the final column `y`.
    pub fn write_csv<W: Write>(&self, mut out: W, comment: Option<&str>) -> io::Result<()> {
        if let Some(c) = comment {
            writeln!(out, "# {c}")?;
        }
        let mut header: Vec<String> = match &self.column_names {
            Some(names) => names.clone(),
            None => (1..=self.d()).map(|j| format!("x{j}")).collect(),
        };
        if self.responses.is_some() {
            header.push(RESPONSE_COLUMN.to_string());
        }
        writeln!(out, "{}", header.join(","))?;
        let mut line = String::new();
        for i in 0..self.n() {
            line.clear();
            for j in 0..self.d() {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&fmt_float(self.features[(i, j)]));
            }
            if let Some(y) = &self.responses {
                line.push(',');
                line.push_str(&fmt_float(y[i]));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Formats a float with 17 significant digits, enough to round-trip any f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Which column of a CSV file holds the response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResponseColumn {
    Name(String),
    Index(usize),
}

impl From<&str> for ResponseColumn {
    fn from(name: &str) -> Self {
        ResponseColumn::Name(name.to_string())
    }
}

/// Raw numeric contents of a CSV file. May have zero rows.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub header: Option<Vec<String>>,
    pub ncols: usize,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    /// Splits the table into features and the named response column.
    pub fn into_dataset(self, response: Option<&ResponseColumn>) -> Result<Dataset> {
        if self.rows.is_empty() {
            return Err(Error::invalid("csv file contains no data rows"));
        }
        let response_idx = match response {
            None => None,
            Some(ResponseColumn::Index(i)) if *i < self.ncols => Some(*i),
            Some(ResponseColumn::Index(i)) => {
                return Err(Error::MissingColumn(format!("#{i}")));
            }
            Some(ResponseColumn::Name(name)) => {
                let pos = self
                    .header
                    .as_ref()
                    .and_then(|h| h.iter().position(|c| c == name));
                Some(pos.ok_or_else(|| Error::MissingColumn(name.clone()))?)
            }
        };
        let feature_cols: Vec<usize> = (0..self.ncols).filter(|&c| Some(c) != response_idx).collect();
        if feature_cols.is_empty() {
            return Err(Error::invalid("csv file has no feature columns"));
        }
        let n = self.rows.len();
        let features = Mat::from_fn(n, feature_cols.len(), |i, j| self.rows[i][feature_cols[j]]);
        let responses = response_idx.map(|c| self.rows.iter().map(|r| r[c]).collect());
        let names = self
            .header
            .map(|h| feature_cols.iter().map(|&c| h[c].clone()).collect());
        Dataset::new(features, responses, names)
    }
}

/// Reads a comma-separated numeric file. Lines starting with `#` are
/// comments. Every row must have the same number of fields.
pub fn read_csv_table(path: &Path, has_header: bool) -> Result<CsvTable> {
    let file = File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut header = None;
    let mut ncols = None;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        match ncols {
            None => ncols = Some(record.len()),
            Some(expected) if expected != record.len() => {
                return Err(parse_err(
                    line,
                    format!("expected {expected} fields, found {}", record.len()),
                ));
            }
            Some(_) => {}
        }
        if has_header && header.is_none() {
            header = Some(record.iter().map(str::to_string).collect());
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(c, field)| {
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        parse_err(line, format!("field {} is not a finite number: {field:?}", c + 1))
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(CsvTable {
        header,
        ncols: ncols.unwrap_or(0),
        rows,
    })
}

pub fn load_csv(
    path: &Path,
    has_header: bool,
    response: Option<&ResponseColumn>,
) -> Result<Dataset> {
    read_csv_table(path, has_header)?.into_dataset(response)
}

/// Per-column affine transform to zero mean and unit sample standard
/// deviation (n - 1 denominator). Constant columns map to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    pub constant: Vec<bool>,
}

impl Standardizer {
    pub fn fit(x: MatRef<'_, f64>) -> Result<Self> {
        let (n, d) = x.shape();
        if n < 2 {
            return Err(Error::invalid(format!(
                "standardization needs at least 2 rows, got {n}"
            )));
        }
        let mut means = Vec::with_capacity(d);
        let mut sds = Vec::with_capacity(d);
        let mut constant = Vec::with_capacity(d);
        for j in 0..d {
            let col = x.col(j);
            let mean = col.iter().sum::<f64>() / n as f64;
            let ss: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
            let sd = (ss / (n - 1) as f64).sqrt();
            let scale = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            means.push(mean);
            sds.push(sd);
            constant.push(sd == 0.0 || sd <= 1e-12 * scale);
        }
        Ok(Standardizer { means, sds, constant })
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn transform(&self, x: MatRef<'_, f64>) -> Result<Mat<f64>> {
        self.check_dim(x.ncols())?;
        Ok(Mat::from_fn(x.nrows(), x.ncols(), |i, j| {
            if self.constant[j] {
                0.0
            } else {
                (x[(i, j)] - self.means[j]) / self.sds[j]
            }
        }))
    }

    pub fn inverse_transform(&self, z: MatRef<'_, f64>) -> Result<Mat<f64>> {
        self.check_dim(z.ncols())?;
        Ok(Mat::from_fn(z.nrows(), z.ncols(), |i, j| {
            if self.constant[j] {
                self.means[j]
            } else {
                z[(i, j)] * self.sds[j] + self.means[j]
            }
        }))
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: d,
            });
        }
        Ok(())
    }
}

pub fn standardize(data: &Dataset) -> Result<(Dataset, Standardizer)> {
    let st = Standardizer::fit(data.features())?;
    let z = st.transform(data.features())?;
    Ok((data.with_features(z)?, st))
}

/// Scales every row of `x` to unit Euclidean norm.
pub fn unit_normalize_matrix(x: MatRef<'_, f64>) -> Result<Mat<f64>> {
    let norms: Vec<f64> = (0..x.nrows())
        .map(|i| x.row(i).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if let Some(i) = norms.iter().position(|&r| r == 0.0) {
        return Err(Error::ZeroRow(i));
    }
    Ok(Mat::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] / norms[i]))
}

pub fn unit_normalize_rows(data: &Dataset) -> Result<Dataset> {
    data.with_features(unit_normalize_matrix(data.features())?)
}

/// Train/validation/test fractions plus the shuffling seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: f64,
    pub val: f64,
    pub test: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train: f64, val: f64, test: f64, seed: u64) -> Result<Self> {
        let spec = SplitSpec { train, val, test, seed };
        spec.validate()?;
        Ok(spec)
    }

    /// The 50/25/25 protocol.
    pub fn standard(seed: u64) -> Self {
        SplitSpec {
            train: 0.5,
            val: 0.25,
            test: 0.25,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fracs = [self.train, self.val, self.test];
        if fracs.iter().any(|f| !(*f > 0.0 && *f < 1.0)) {
            return Err(Error::invalid(format!(
                "split fractions must lie in (0, 1), got {fracs:?}"
            )));
        }
        if (fracs.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "split fractions must sum to 1, got {fracs:?}"
            )));
        }
        Ok(())
    }

    /// Partition sizes: validation and test are floored, train takes the rest.
    pub fn sizes(&self, n: usize) -> (usize, usize, usize) {
        let floor = |f: f64| ((n as f64) * f + 1e-9).floor() as usize;
        let val = floor(self.val);
        let test = floor(self.test);
        (n - val - test, val, test)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

/// Seeded shuffle into three sorted index sets. Small `n` may leave the
/// validation or test set empty.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<SplitIndices> {
    spec.validate()?;
    if n < 3 {
        return Err(Error::invalid(format!("split needs at least 3 rows, got {n}")));
    }
    let (n_train, n_val, _) = spec.sizes(n);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let mut train = perm[..n_train].to_vec();
    let mut val = perm[n_train..n_train + n_val].to_vec();
    let mut test = perm[n_train + n_val..].to_vec();
    train.sort_unstable();
    val.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices { train, val, test })
}

/// Splits into train, validation and test sets. Unlike [`split_indices`],
/// every part must be nonempty.
pub fn split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset, Dataset)> {
    let idx = split_indices(data.n(), spec)?;
    if idx.val.is_empty() || idx.test.is_empty() {
        return Err(Error::invalid(format!(
            "split of {} rows leaves an empty partition ({}/{}/{})",
            data.n(),
            idx.train.len(),
            idx.val.len(),
            idx.test.len()
        )));
    }
    Ok((
        data.select_rows(&idx.train)?,
        data.select_rows(&idx.val)?,
        data.select_rows(&idx.test)?,
    ))
}

/// Default `u` range for the spiral: the arc parameter spans `[0, 3π]`.
pub const SPIRAL_U_MAX: f64 = 9.0 * std::f64::consts::PI * std::f64::consts::PI;
pub const SPIRAL_NOISE_SD: f64 = 0.1;
pub const CIRCLE_NOISE_VAR: f64 = 0.5;

/// Point on the noiseless spiral for a given `u`, with its arc parameter.
pub fn spiral_point(u: f64) -> ([f64; 2], f64) {
    let t = u.sqrt();
    ([t * t.cos(), t * t.sin()], t)
}

/// Noisy spiral `(√u cos √u, √u sin √u) + noise` with `u ~ U(0, u_max)`.
/// The response is the arc parameter `√u`.
pub fn gen_spiral(n: usize, noise_sd: f64, u_max: f64, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::invalid("spiral needs n >= 1"));
    }
    if !(noise_sd >= 0.0) || !(u_max > 0.0) {
        return Err(Error::invalid(format!(
            "spiral needs noise_sd >= 0 and u_max > 0, got {noise_sd} and {u_max}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut features = Mat::zeros(n, 2);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let u = rng.random_range(0.0..u_max);
        let ([px, py], t) = spiral_point(u);
        let ex: f64 = rng.sample(StandardNormal);
        let ey: f64 = rng.sample(StandardNormal);
        features[(i, 0)] = px + noise_sd * ex;
        features[(i, 1)] = py + noise_sd * ey;
        y.push(t);
    }
    Dataset::new(features, Some(y), None)
}

/// Points on a unit circle embedded in `R^d` with `Y ~ N(θ, noise_var)`.
///
/// Without rotation the circle occupies the first two coordinates. With
/// rotation it lies in a random plane, equivalent to applying a Haar
/// orthogonal matrix to the unrotated points.
pub fn gen_circle(
    n: usize,
    d: usize,
    noise_var: f64,
    rotate: bool,
    seed: u64,
) -> Result<Dataset> {
    if d < 2 {
        return Err(Error::invalid(format!("circle needs d >= 2, got {d}")));
    }
    if n == 0 || !(noise_var >= 0.0) {
        return Err(Error::invalid("circle needs n >= 1 and noise_var >= 0"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_var.sqrt())
        .map_err(|e| Error::invalid(format!("noise variance: {e}")))?;
    let thetas: Vec<f64> = (0..n)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect();
    let y: Vec<f64> = thetas.iter().map(|&t| t + noise.sample(&mut rng)).collect();

    let mut features = Mat::zeros(n, d);
    if rotate {
        let (a, b) = random_orthonormal_pair(d, &mut rng);
        for (i, &t) in thetas.iter().enumerate() {
            let (s, c) = t.sin_cos();
            for j in 0..d {
                features[(i, j)] = c * a[j] + s * b[j];
            }
        }
    } else {
        for (i, &t) in thetas.iter().enumerate() {
            let (s, c) = t.sin_cos();
            features[(i, 0)] = c;
            features[(i, 1)] = s;
        }
    }
    Dataset::new(features, Some(y), None)
}

fn random_orthonormal_pair(d: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let normalize = |v: &mut Vec<f64>| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    };
    let mut a: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    normalize(&mut a);
    let mut b: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    // two Gram-Schmidt passes keep b orthogonal to a at machine precision
    for _ in 0..2 {
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        b.iter_mut().zip(&a).for_each(|(y, x)| *y -= dot * x);
    }
    normalize(&mut b);
    (a, b)
}

/// One-dimensional sample, uniform on the open interval `(lo, hi)`.
pub fn gen_uniform_interval(n: usize, lo: f64, hi: f64, seed: u64) -> Result<Dataset> {
    if !(lo < hi) {
        return Err(Error::invalid(format!("need lo < hi, got {lo} and {hi}")));
    }
    if n == 0 {
        return Err(Error::invalid("uniform sample needs n >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..n)
        .map(|_| loop {
            let v = rng.random_range(lo..hi);
            if v > lo {
                break v;
            }
        })
        .collect();
    Dataset::new(Mat::from_fn(n, 1, |i, _| values[i]), None, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_plain_numeric() {
        let f = write_tmp("1,2\n3,4\n5,6\n");
        let ds = load_csv(f.path(), false, None).unwrap();
        assert_eq!((ds.n(), ds.d()), (3, 2));
        assert!(ds.responses().is_none());
        assert_eq!(ds.features()[(2, 1)], 6.0);
    }

    #[test]
    fn load_with_named_response() {
        let f = write_tmp("# seed=3\nx1,x2,y\n1,2,3\n4,5,6\n");
        let ds = load_csv(f.path(), true, Some(&"y".into())).unwrap();
        assert_eq!(ds.d(), 2);
        assert_eq!(ds.responses().unwrap(), &[3.0, 6.0]);
        assert_eq!(ds.column_names().unwrap(), &["x1".to_string(), "x2".to_string()]);
    }

    #[test]
    fn arity_error_names_the_line() {
        let f = write_tmp("1,2\n3\n");
        let err = load_csv(f.path(), false, None).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn non_numeric_and_missing_column() {
        let f = write_tmp("a,b\n1,x\n");
        assert!(matches!(load_csv(f.path(), true, None), Err(Error::Parse { .. })));
        let f = write_tmp("a,b\n1,2\n");
        let err = load_csv(f.path(), true, Some(&"y".into())).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(ref c) if c == "y"));
    }

    #[test]
    fn two_point_standardization() {
        let ds = Dataset::new(Mat::from_fn(2, 1, |i, _| [1.0, 3.0][i]), None, None).unwrap();
        let (z, _) = standardize(&ds).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((z.features()[(0, 0)] + h).abs() < 1e-15);
        assert!((z.features()[(1, 0)] - h).abs() < 1e-15);
    }

    #[test]
    fn constant_column_is_flagged() {
        let x = Mat::from_fn(3, 2, |i, j| if j == 0 { 5.0 } else { i as f64 });
        let ds = Dataset::new(x, None, None).unwrap();
        let (z, st) = standardize(&ds).unwrap();
        assert_eq!(st.constant, vec![true, false]);
        assert!(z.features().col(0).iter().all(|&v| v == 0.0));
        let back = st.inverse_transform(z.features()).unwrap();
        assert_eq!(back[(1, 0)], 5.0);
    }

    #[test]
    fn standardize_needs_two_rows() {
        let ds = Dataset::new(Mat::from_fn(1, 1, |_, _| 1.0), None, None).unwrap();
        assert!(standardize(&ds).is_err());
    }

    #[test]
    fn unit_rows() {
        let x = Mat::from_fn(2, 2, |i, j| [[3.0, 4.0], [0.6, 0.8]][i][j]);
        let ds = unit_normalize_rows(&Dataset::new(x, None, None).unwrap()).unwrap();
        assert!((ds.features()[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((ds.features()[(0, 1)] - 0.8).abs() < 1e-15);
        assert!((ds.features()[(1, 0)] - 0.6).abs() < 1e-15);
        let zero = Dataset::new(Mat::zeros(2, 2), None, None).unwrap();
        assert!(matches!(unit_normalize_rows(&zero), Err(Error::ZeroRow(0))));
    }

    #[test]
    fn split_sizes() {
        assert_eq!(SplitSpec::standard(0).sizes(100), (50, 25, 25));
        assert_eq!(SplitSpec::standard(0).sizes(11), (7, 2, 2));
        let a = split_indices(10, &SplitSpec::standard(9)).unwrap();
        let b = split_indices(10, &SplitSpec::standard(9)).unwrap();
        assert_eq!(a, b);
        assert!(SplitSpec::new(0.5, 0.5, 0.0, 1).is_err());
        assert!(SplitSpec::new(0.5, 0.3, 0.3, 1).is_err());
    }

    #[test]
    fn spiral_landmarks() {
        let pi = std::f64::consts::PI;
        let ([x, y], t) = spiral_point(pi * pi);
        assert!((x + pi).abs() < 1e-12 && y.abs() < 1e-12 && (t - pi).abs() < 1e-15);
        let ([x, y], t) = spiral_point(0.0);
        assert_eq!((x, y, t), (0.0, 0.0, 0.0));
    }

    #[test]
    fn noiseless_spiral_radius_matches_response() {
        let ds = gen_spiral(1000, 0.0, SPIRAL_U_MAX, 4).unwrap();
        let y = ds.responses().unwrap();
        for (i, &yi) in y.iter().enumerate() {
            let (a, b) = (ds.features()[(i, 0)], ds.features()[(i, 1)]);
            assert!((a * a + b * b - yi * yi).abs() < 1e-10);
        }
    }

    #[test]
    fn circle_embedding() {
        let ds = gen_circle(50, 2, 0.0, false, 1).unwrap();
        let y = ds.responses().unwrap();
        for (i, &yi) in y.iter().enumerate() {
            let (a, b) = (ds.features()[(i, 0)], ds.features()[(i, 1)]);
            assert!((a * a + b * b - 1.0).abs() < 1e-12);
            assert!((b.atan2(a).rem_euclid(std::f64::consts::TAU) - yi).abs() < 1e-12);
        }
        let wide = gen_circle(20, 500, 0.0, false, 1).unwrap();
        for j in 2..500 {
            assert!(wide.features().col(j).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn uniform_interval() {
        let ds = gen_uniform_interval(5, -1.0, 1.0, 2).unwrap();
        assert!(ds.features().col(0).iter().all(|&v| v > -1.0 && v < 1.0));
        let again = gen_uniform_interval(5, -1.0, 1.0, 2).unwrap();
        assert_eq!(ds.features(), again.features());
        assert!(gen_uniform_interval(5, 1.0, 1.0, 2).is_err());

        let n = 10_000;
        let big = gen_uniform_interval(n, -1.0, 1.0, 3).unwrap();
        let mean = big.features().col(0).iter().sum::<f64>() / n as f64;
        assert!(mean.abs() <= 3.0 / (12.0 * n as f64).sqrt());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let ds = gen_spiral(20, 0.1, SPIRAL_U_MAX, 5).unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf, Some("seed=5")).unwrap();
        let f = write_tmp(std::str::from_utf8(&buf).unwrap());
        let back = load_csv(f.path(), true, Some(&"y".into())).unwrap();
        assert_eq!(back.features(), ds.features());
        assert_eq!(back.responses(), ds.responses());
    }
}
