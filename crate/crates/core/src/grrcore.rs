//! Generalized ridge regression in canonical (principal axis) coordinates.
//!
//! With the standardized design decomposed as `Xs = U S V'`, the eigenvalues
//! of `Xs'Xs` are `lambda_i = s_i^2` and the OLS fit has canonical components
//! `c_i = u_i'ys / s_i`, so that `beta_ols = V c`. A generalized ridge
//! estimator shrinks each component by its own factor `delta_i` in `[0, 1]`:
//!
//! ```text
//! beta(delta) = V diag(delta) c
//! ```
//!
//! The estimated MSE-optimal factor for component `i` is
//! `c_i^2 / (c_i^2 + sigma2 / lambda_i)`. The efficient path runs in straight
//! lines from the OLS corner (all ones) through that optimum to the origin
//! and is indexed by the multicollinearity allowance `m = p - sum(delta)`.

use nalgebra::{DMatrix, DVector, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::StandardizedDesign;

/// Knot positions closer than this to an endpoint collapse one path piece.
pub const KNOT_COLLAPSE_TOL: f64 = 1e-10;

/// Standardized design in SVD canonical form with its OLS summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalModel {
    /// Right singular vectors as columns, sign-normalized so the largest
    /// magnitude entry of each column is positive.
    pub v: DMatrix<f64>,
    /// Eigenvalues of `Xs'Xs`, descending.
    pub eigenvalues: Vec<f64>,
    pub c_hat: Vec<f64>,
    /// OLS coefficients on the standardized scale.
    pub beta_ols: Vec<f64>,
    pub rss: f64,
    /// `rss / (n - p - 1)`; also the residual mean square.
    pub sigma2: f64,
    pub resid_se: f64,
    pub n: usize,
    pub p: usize,
}

impl CanonicalModel {
    /// Residual mean square on the standardized-y scale.
    pub fn rms_ols(&self) -> f64 {
        self.sigma2
    }

    pub fn record(&self) -> CanonicalRecord {
        CanonicalRecord {
            n: self.n,
            p: self.p,
            eigenvalues: self.eigenvalues.clone(),
            v_row_major: (0..self.p)
                .flat_map(|i| (0..self.p).map(move |j| (i, j)))
                .map(|(i, j)| self.v[(i, j)])
                .collect(),
            c_hat: self.c_hat.clone(),
            beta_ols: self.beta_ols.clone(),
            rss: self.rss,
            sigma2: self.sigma2,
            resid_se: self.resid_se,
        }
    }

    pub fn from_record(r: &CanonicalRecord) -> Result<Self> {
        let p = r.p;
        if r.eigenvalues.len() != p
            || r.c_hat.len() != p
            || r.beta_ols.len() != p
            || r.v_row_major.len() != p * p
        {
            return Err(Error::Dimension(
                "canonical record lengths disagree with p".into(),
            ));
        }
        Ok(CanonicalModel {
            v: DMatrix::from_row_slice(p, p, &r.v_row_major),
            eigenvalues: r.eigenvalues.clone(),
            c_hat: r.c_hat.clone(),
            beta_ols: r.beta_ols.clone(),
            rss: r.rss,
            sigma2: r.sigma2,
            resid_se: r.resid_se,
            n: r.n,
            p,
        })
    }
}

/// JSON audit form of a [`CanonicalModel`] (`V` stored row-major).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalRecord {
    pub n: usize,
    pub p: usize,
    pub eigenvalues: Vec<f64>,
    pub v_row_major: Vec<f64>,
    pub c_hat: Vec<f64>,
    pub beta_ols: Vec<f64>,
    pub rss: f64,
    pub sigma2: f64,
    pub resid_se: f64,
}

/// Optimal per-component shrinkage factors and the knot of the efficient path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkagePath {
    pub dmse: Vec<f64>,
    /// `p - sum(dmse)`.
    pub m_star: f64,
    pub p: usize,
}

/// Everything known about the fit at one extent `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub m: f64,
    pub delta: Vec<f64>,
    /// Standardized-scale coefficients.
    pub beta: Vec<f64>,
    /// Intercept in original `y` units.
    pub intercept: f64,
    pub rel_risk: Vec<f64>,
}

/// SVD of the standardized design plus OLS summaries.
pub fn canonical_decompose(sd: &StandardizedDesign) -> Result<CanonicalModel> {
    let n = sd.n();
    let p = sd.p();
    if p == 0 || n < p + 2 {
        return Err(Error::TooFewRows { n, p });
    }
    let svd = SVD::new(sd.xs.clone(), true, true);
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let vt = svd.v_t.as_ref().expect("right singular vectors requested");

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut v = DMatrix::zeros(p, p);
    let mut eigenvalues = Vec::with_capacity(p);
    let mut c_hat = Vec::with_capacity(p);
    for (col, &idx) in order.iter().enumerate() {
        let s = svd.singular_values[idx];
        let mut vi: DVector<f64> = vt.row(idx).transpose();
        let pivot = vi
            .iter()
            .copied()
            .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        vi *= sign;
        let proj = sign * u.column(idx).dot(&sd.ys);
        v.set_column(col, &vi);
        eigenvalues.push(s * s);
        c_hat.push(if s > 0.0 { proj / s } else { 0.0 });
    }

    let largest = eigenvalues[0];
    let smallest = eigenvalues[p - 1];
    let tolerance = p as f64 * f64::EPSILON * largest;
    if smallest.is_nan() || smallest < tolerance || largest <= 0.0 {
        return Err(Error::RankDeficient {
            smallest,
            tolerance,
        });
    }

    let beta = &v * DVector::from_vec(c_hat.clone());
    let resid = &sd.ys - &sd.xs * &beta;
    let rss = resid.norm_squared();
    let sigma2 = rss / (n - p - 1) as f64;
    Ok(CanonicalModel {
        v,
        eigenvalues,
        c_hat,
        beta_ols: beta.iter().copied().collect(),
        rss,
        sigma2,
        resid_se: sigma2.sqrt(),
        n,
        p,
    })
}

/// Plug-in maximum likelihood estimates of the MSE-optimal shrinkage factors.
pub fn dmse_factors(cm: &CanonicalModel) -> ShrinkagePath {
    let dmse: Vec<f64> = cm
        .c_hat
        .iter()
        .zip(&cm.eigenvalues)
        .map(|(&c, &lambda)| {
            let signal = c * c;
            if signal == 0.0 {
                0.0
            } else {
                signal / (signal + cm.sigma2 / lambda)
            }
        })
        .collect();
    ShrinkagePath::from_factors(dmse)
}

impl ShrinkagePath {
    /// Path whose knot sits at the given factors.
    pub fn from_factors(dmse: Vec<f64>) -> Self {
        let p = dmse.len();
        let m_star = p as f64 - dmse.iter().sum::<f64>();
        ShrinkagePath {
            m_star: m_star.clamp(0.0, p as f64),
            dmse,
            p,
        }
    }

    fn check_extent(&self, m: f64) -> Result<()> {
        if !(0.0..=self.p as f64).contains(&m) {
            return Err(Error::ExtentOutOfRange { m, p: self.p });
        }
        Ok(())
    }

    /// Shrinkage factors at extent `m`; see [`delta_at`].
    pub fn delta(&self, m: f64) -> Result<Vec<f64>> {
        delta_at(self, m)
    }
}

/// Shrinkage factors on the two-piece linear path at extent `m`.
///
/// Before the knot, `delta_i = 1 - (m / m*)(1 - dmse_i)`; after it,
/// `delta_i = dmse_i (p - m) / (p - m*)`. Both pieces keep
/// `sum(delta) = p - m`. When the knot sits at an endpoint the collapsed
/// piece is replaced by uniform shrinkage `(p - m) / p`.
pub fn delta_at(path: &ShrinkagePath, m: f64) -> Result<Vec<f64>> {
    path.check_extent(m)?;
    let p = path.p as f64;
    if m == 0.0 {
        return Ok(vec![1.0; path.p]);
    }
    if m == p {
        return Ok(vec![0.0; path.p]);
    }
    let m_star = path.m_star;
    let uniform = || vec![(p - m) / p; path.p];
    if m_star < KNOT_COLLAPSE_TOL {
        return Ok(uniform());
    }
    if m <= m_star {
        let t = m / m_star;
        return Ok(path.dmse.iter().map(|d| 1.0 - t * (1.0 - d)).collect());
    }
    if m_star > p - KNOT_COLLAPSE_TOL {
        return Ok(uniform());
    }
    let t = (p - m) / (p - m_star);
    Ok(path.dmse.iter().map(|d| d * t).collect())
}

/// Standardized-scale coefficients `V diag(delta(m)) c` at extent `m`.
pub fn beta_at(cm: &CanonicalModel, path: &ShrinkagePath, m: f64) -> Result<Vec<f64>> {
    check_dims(cm, path)?;
    let delta = delta_at(path, m)?;
    Ok(beta_from_delta(cm, &delta))
}

pub fn beta_from_delta(cm: &CanonicalModel, delta: &[f64]) -> Vec<f64> {
    let shrunk = DVector::from_iterator(cm.p, delta.iter().zip(&cm.c_hat).map(|(d, c)| d * c));
    (&cm.v * shrunk).iter().copied().collect()
}

/// Diagonal of the estimated coefficient MSE matrix over `sigma2`.
pub fn relative_risk_at(cm: &CanonicalModel, path: &ShrinkagePath, m: f64) -> Result<Vec<f64>> {
    check_dims(cm, path)?;
    let delta = delta_at(path, m)?;
    relative_risk_from_delta(cm, &delta)
}

/// `diag(V [diag(delta^2 sigma2 / lambda) + b b'] V') / sigma2` with the
/// plug-in bias `b = (1 - delta) c`.
pub fn relative_risk_from_delta(cm: &CanonicalModel, delta: &[f64]) -> Result<Vec<f64>> {
    if cm.sigma2 <= 0.0 {
        return Err(Error::InvalidArgument(
            "relative risk is undefined when the residual variance is zero".into(),
        ));
    }
    let p = cm.p;
    let variance: Vec<f64> = (0..p)
        .map(|k| delta[k] * delta[k] / cm.eigenvalues[k])
        .collect();
    let bias: Vec<f64> = (0..p).map(|k| (1.0 - delta[k]) * cm.c_hat[k]).collect();
    Ok((0..p)
        .map(|j| {
            let mut var = 0.0;
            let mut b = 0.0;
            for k in 0..p {
                let vjk = cm.v[(j, k)];
                var += vjk * vjk * variance[k];
                b += vjk * bias[k];
            }
            var + b * b / cm.sigma2
        })
        .collect())
}

/// Coefficients in original units: `beta_j * y_sd / x_sd_j`.
pub fn destandardize(beta: &[f64], sd: &StandardizedDesign) -> Result<Vec<f64>> {
    if beta.len() != sd.p() {
        return Err(Error::Dimension(format!(
            "{} coefficients for {} predictors",
            beta.len(),
            sd.p()
        )));
    }
    Ok(beta
        .iter()
        .zip(&sd.x_sds)
        .map(|(b, s)| b * sd.y_sd / s)
        .collect())
}

/// Intercept `y_mean - x_means' beta_orig` for standardized-scale `beta`.
///
/// The fitted hyperplane always passes through the means, so the intercept
/// moves as the slopes are shrunk.
pub fn intercept_at(sd: &StandardizedDesign, beta: &[f64]) -> Result<f64> {
    let orig = destandardize(beta, sd)?;
    Ok(sd.y_mean
        - sd.x_means
            .iter()
            .zip(&orig)
            .map(|(m, b)| m * b)
            .sum::<f64>())
}

/// All path quantities at extent `m`.
pub fn path_point(
    cm: &CanonicalModel,
    sd: &StandardizedDesign,
    path: &ShrinkagePath,
    m: f64,
) -> Result<PathPoint> {
    check_dims(cm, path)?;
    let delta = delta_at(path, m)?;
    let beta = beta_from_delta(cm, &delta);
    let rel_risk = relative_risk_from_delta(cm, &delta)?;
    let intercept = intercept_at(sd, &beta)?;
    Ok(PathPoint {
        m,
        delta,
        beta,
        intercept,
        rel_risk,
    })
}

fn check_dims(cm: &CanonicalModel, path: &ShrinkagePath) -> Result<()> {
    if cm.p != path.p || path.dmse.len() != cm.p {
        return Err(Error::Dimension(format!(
            "model has p = {} but path has p = {}",
            cm.p, path.p
        )));
    }
    Ok(())
}
