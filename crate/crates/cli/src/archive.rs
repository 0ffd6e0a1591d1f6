//! Model archive: an 8-byte magic, a length-prefixed JSON header, then
//! length-prefixed little-endian `f64` blocks in row-major order.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use spectral_series::dataset::{unit_normalize_matrix, Standardizer};
use spectral_series::diffusion::{BasisOptions, EigenBasis};
use spectral_series::kernels::KernelSpec;
use spectral_series::series::SeriesModel;
use spectral_series::{Mat, MatRef};

use crate::error::{CliError, Result};
use crate::output::write_bytes;

pub const MAGIC: &[u8; 8] = b"SPSERIES";
pub const FORMAT_VERSION: u32 = 1;

/// Transformations applied to covariates before they reach the model.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Preprocessing {
    pub unit_norm: bool,
    pub standardizer: Option<Standardizer>,
}

impl Preprocessing {
    /// Row normalization first, then standardization.
    pub fn apply(&self, x: MatRef<'_, f64>) -> Result<Mat<f64>> {
        let mut out = if self.unit_norm {
            unit_normalize_matrix(x)?
        } else {
            x.to_owned()
        };
        if let Some(s) = &self.standardizer {
            out = s.transform(out.as_ref())?;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct ModelArchive {
    pub model: SeriesModel,
    pub preprocessing: Preprocessing,
    pub feature_names: Option<Vec<String>>,
    pub response_name: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format_version: u32,
    kernel: KernelSpec,
    options: BasisOptions,
    n: usize,
    d: usize,
    j_max: usize,
    j: usize,
    ssl: bool,
    unit_norm: bool,
    standardized: bool,
    feature_names: Option<Vec<String>>,
    response_name: Option<String>,
}

impl ModelArchive {
    pub fn predict(&self, x: MatRef<'_, f64>) -> Result<Vec<f64>> {
        let z = self.preprocessing.apply(x)?;
        Ok(self.model.predict(z.as_ref())?)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let basis = self.model.basis();
        let header = Header {
            format_version: FORMAT_VERSION,
            kernel: *basis.kernel(),
            options: *basis.options(),
            n: basis.n(),
            d: basis.dim(),
            j_max: basis.j_max(),
            j: self.model.j(),
            ssl: self.model.is_ssl(),
            unit_norm: self.preprocessing.unit_norm,
            standardized: self.preprocessing.standardizer.is_some(),
            feature_names: self.feature_names.clone(),
            response_name: self.response_name.clone(),
        };
        let json = serde_json::to_vec(&header).expect("header serializes");
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(json.len() as u64).to_le_bytes());
        out.extend_from_slice(&json);
        put_matrix(&mut out, basis.training_points());
        put_row(&mut out, basis.eigenvalues());
        put_matrix(&mut out, basis.eigenvectors());
        put_row(&mut out, basis.stationary());
        put_row(&mut out, basis.degrees());
        put_row(&mut out, self.model.coefficients());
        if let Some(s) = &self.preprocessing.standardizer {
            put_row(&mut out, &s.means);
            put_row(&mut out, &s.sds);
            let flags: Vec<f64> = s.constant.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect();
            put_row(&mut out, &flags);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err(CliError::Archive("bad magic bytes".into()));
        }
        let len = r.u64()? as usize;
        let header: Header = serde_json::from_slice(r.take(len)?)
            .map_err(|e| CliError::Archive(format!("header: {e}")))?;
        if header.format_version != FORMAT_VERSION {
            return Err(CliError::Archive(format!(
                "format version {} is not supported (expected {FORMAT_VERSION})",
                header.format_version
            )));
        }
        let (n, d, k) = (header.n, header.d, header.j_max + 1);
        let points = r.matrix(n, d)?;
        let eigenvalues = r.row(k)?;
        let vectors = r.matrix(n, k)?;
        let stationary = r.row(n)?;
        let degrees = r.row(n)?;
        let coefficients = r.row(k)?;
        let standardizer = if header.standardized {
            let means = r.row(d)?;
            let sds = r.row(d)?;
            let constant = r.row(d)?.into_iter().map(|v| v != 0.0).collect();
            Some(Standardizer { means, sds, constant })
        } else {
            None
        };
        if r.pos != bytes.len() {
            return Err(CliError::Archive(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        let basis = EigenBasis::from_parts(
            header.kernel,
            header.options,
            points,
            eigenvalues,
            vectors,
            stationary,
            degrees,
        )
        .map_err(|e| CliError::Archive(e.to_string()))?;
        let model = SeriesModel::new(Arc::new(basis), coefficients, header.j, header.ssl)
            .map_err(|e| CliError::Archive(e.to_string()))?;
        Ok(ModelArchive {
            model,
            preprocessing: Preprocessing {
                unit_norm: header.unit_norm,
                standardizer,
            },
            feature_names: header.feature_names,
            response_name: header.response_name,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_bytes(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, "reading", e))?;
        ModelArchive::from_bytes(&bytes)
    }
}

fn put_block(out: &mut Vec<u8>, rows: usize, cols: usize, values: impl Iterator<Item = f64>) {
    out.extend_from_slice(&(rows as u64).to_le_bytes());
    out.extend_from_slice(&(cols as u64).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn put_matrix(out: &mut Vec<u8>, m: MatRef<'_, f64>) {
    let (rows, cols) = m.shape();
    put_block(out, rows, cols, (0..rows).flat_map(move |i| (0..cols).map(move |j| m[(i, j)])));
}

fn put_row(out: &mut Vec<u8>, v: &[f64]) {
    put_block(out, 1, v.len(), v.iter().copied());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| CliError::Archive("unexpected end of file".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn block(&mut self, rows: usize, cols: usize) -> Result<Vec<f64>> {
        let (r, c) = (self.u64()? as usize, self.u64()? as usize);
        if (r, c) != (rows, cols) {
            return Err(CliError::Archive(format!(
                "block is {r}x{c}, expected {rows}x{cols}"
            )));
        }
        let len = rows
            .checked_mul(cols)
            .and_then(|k| k.checked_mul(8))
            .ok_or_else(|| CliError::Archive("block too large".into()))?;
        Ok(self
            .take(len)?
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
            .collect())
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> Result<Mat<f64>> {
        let v = self.block(rows, cols)?;
        Ok(Mat::from_fn(rows, cols, |i, j| v[i * cols + j]))
    }

    fn row(&mut self, len: usize) -> Result<Vec<f64>> {
        self.block(1, len)
    }
}
