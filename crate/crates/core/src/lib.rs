//! Spectral series regression.
//!
//! A regression function is expanded in the eigenvectors of a kernel
//! diffusion operator built from the data itself. The eigenvectors form an
//! orthogonal basis adapted to where the covariates actually lie, so the
//! estimator's behavior depends on the intrinsic rather than the ambient
//! dimension. Eigenvectors are extended to new points with the Nyström
//! formula, and the bandwidth and truncation are picked on a validation
//! set.
//!
//! ```
//! use spectral_series::prelude::*;
//!
//! let data = gen_spiral(200, 0.05, SPIRAL_U_MAX, 1).unwrap();
//! let (train, val, _test) = split(&data, &SplitSpec::standard(1)).unwrap();
//! let grid = TuneGrid::gaussian(&bandwidth_grid(train.features(), 5).unwrap(), 20).unwrap();
//! let (model, report) = tune_series(&train, &val, &grid, &BasisOptions::default()).unwrap();
//! assert!(report.validation_loss.is_finite());
//! let _pred = model.predict(val.features()).unwrap();
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod baselines;
pub mod dataset;
pub mod diffusion;
pub mod error;
pub mod kernels;
pub mod model_selection;
pub mod nystrom;
pub mod series;

pub use faer::{Mat, MatRef};

pub use error::{Error, ErrorKind, Result};

pub mod prelude {
    pub use crate::baselines::{knn_predict, krr_fit, krr_predict, nw_predict, KrrModel};
    pub use crate::dataset::{
        gen_circle, gen_spiral, gen_uniform_interval, load_csv, split, split_indices, standardize,
        unit_normalize_rows, Dataset, ResponseColumn, SplitSpec, Standardizer, CIRCLE_NOISE_VAR,
        SPIRAL_NOISE_SD, SPIRAL_U_MAX,
    };
    pub use crate::diffusion::{
        eigendecompose, fit_basis, smoothness_spectrum, BasisOptions, DiffusionSystem, EigenBasis,
        EigenMethod, NormalizationMode,
    };
    pub use crate::error::{Error, ErrorKind, Result};
    pub use crate::kernels::{bandwidth_grid, gram_matrix, kernel_value, KernelSpec};
    pub use crate::model_selection::{
        empirical_loss, loss_se, tune_baseline, tune_series, tune_series_ssl, BaselineModel,
        Candidate, FitReport, StageTimings, TuneGrid,
    };
    pub use crate::nystrom::{eigenmap, extend};
    pub use crate::series::{
        estimate_coefficients, fit, fit_ssl, wls_coefficients, SeriesModel,
    };
    pub use faer::{Mat, MatRef};
}
