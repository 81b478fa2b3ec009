//! Stage one: one-at-a-time nonparametric prediction of `y`.
//!
//! Each predictor column gets its own cubic P-spline (B-spline basis with a
//! second-order difference penalty on the coefficients) with the smoothing
//! parameter chosen by GCV. The fitted vectors are the "np" predictors fed
//! to the shrinkage stage.

mod basis;
mod fit;

pub use basis::{build_basis, BasisAdjustment, BasisBuild, SplineBasis, CUBIC};
pub use fit::{
    fit_penalized, gcv_select, predict, relative_grid, FitRecord, SmootherFit, GRID_LOG10_RANGE,
    GRID_POINTS,
};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::Result;
use crate::ingest::{write_columns_csv, Dataset};

/// Default number of basis functions per smooth.
pub const DEFAULT_K: usize = 10;

/// The `p` fitted smooths of `y` on each predictor.
#[derive(Debug, Clone)]
pub struct NpTransform {
    pub fits: Vec<SmootherFit>,
    pub adjustments: Vec<Option<BasisAdjustment>>,
    /// `n x p`, column `j` is the smooth of `y` on `x_j`.
    pub np: DMatrix<f64>,
}

impl NpTransform {
    /// `np1`, `np2`, ...
    pub fn names(&self) -> Vec<String> {
        np_names(self.fits.len())
    }

    /// The fits as an outcome-plus-np [`Dataset`] over the same rows.
    pub fn np_dataset(&self, source: &Dataset) -> Result<Dataset> {
        source.with_predictors(self.names(), self.np.clone())
    }
}

pub fn np_names(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("np{j}")).collect()
}

/// Fits one smooth per predictor. Fits run on the current rayon pool; the
/// result does not depend on how many threads it has.
pub fn np_transform(d: &Dataset, k: usize) -> Result<NpTransform> {
    let y = d.y.as_slice();
    let results: Vec<Result<(SmootherFit, Option<BasisAdjustment>)>> = (0..d.p())
        .into_par_iter()
        .map(|j| {
            let x = d.x_column(j);
            let built = build_basis(&x, k)?;
            let fit = gcv_select(y, &x, &built.basis)?;
            Ok((fit, built.adjustment))
        })
        .collect();
    let mut fits = Vec::with_capacity(d.p());
    let mut adjustments = Vec::with_capacity(d.p());
    for r in results {
        let (fit, adj) = r?;
        fits.push(fit);
        adjustments.push(adj);
    }
    let np = DMatrix::from_fn(d.n(), d.p(), |i, j| fits[j].fitted[i]);
    Ok(NpTransform {
        fits,
        adjustments,
        np,
    })
}

/// Writes the `2p + 1` column frame: `y`, the predictors, then `np1..npP`.
pub fn write_np_frame(
    d: &Dataset,
    t: &NpTransform,
    path: impl AsRef<std::path::Path>,
) -> Result<()> {
    let mut headers = vec![d.y_name.clone()];
    headers.extend(d.x_names.iter().cloned());
    headers.extend(t.names());
    let mut columns = vec![d.y.as_slice().to_vec()];
    columns.extend((0..d.p()).map(|j| d.x_column(j)));
    columns.extend(t.fits.iter().map(|f| f.fitted.clone()));
    write_columns_csv(path, &headers, &columns)
}
