use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::basis::SplineBasis;
use crate::error::{Error, Result};

/// Points on the relative lambda grid.
pub const GRID_POINTS: usize = 201;
/// log10 bounds of the relative lambda grid.
pub const GRID_LOG10_RANGE: (f64, f64) = (-8.0, 8.0);
const GOLDEN_ITERATIONS: usize = 60;

/// One fitted univariate penalized regression spline.
#[derive(Debug, Clone, PartialEq)]
pub struct SmootherFit {
    pub basis: SplineBasis,
    pub coef: Vec<f64>,
    pub lambda: f64,
    pub edf: f64,
    pub fitted: Vec<f64>,
    /// GCV score at `lambda`.
    pub gcv: f64,
}

/// Portable form of a fit: enough to evaluate the spline anywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub knots: Vec<f64>,
    pub degree: usize,
    pub coef: Vec<f64>,
    pub lambda: f64,
    pub edf: f64,
    pub boundary: [f64; 2],
}

impl FitRecord {
    pub fn basis(&self) -> Result<SplineBasis> {
        let basis = SplineBasis::new(
            self.knots.clone(),
            self.degree,
            (self.boundary[0], self.boundary[1]),
        )?;
        if basis.k() != self.coef.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients for a basis of size {}",
                self.coef.len(),
                basis.k()
            )));
        }
        Ok(basis)
    }

    pub fn predict(&self, x_new: &[f64]) -> Result<Vec<f64>> {
        let basis = self.basis()?;
        Ok(x_new
            .iter()
            .map(|&x| basis.evaluate(&self.coef, x))
            .collect())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let record: FitRecord = serde_json::from_str(s)?;
        record.basis()?;
        Ok(record)
    }
}

impl SmootherFit {
    pub fn record(&self) -> FitRecord {
        FitRecord {
            knots: self.basis.knots.clone(),
            degree: self.basis.degree,
            coef: self.coef.clone(),
            lambda: self.lambda,
            edf: self.edf,
            boundary: [self.basis.boundary.0, self.basis.boundary.1],
        }
    }

    /// Roughness `c'Pc` of the coefficient vector.
    pub fn roughness(&self) -> f64 {
        let c = DVector::from_column_slice(&self.coef);
        (c.transpose() * self.basis.penalty() * &c)[(0, 0)]
    }
}

/// Evaluates a fit at new points; outside the training range the spline is
/// extended along its boundary tangent.
pub fn predict(fit: &SmootherFit, x_new: &[f64]) -> Vec<f64> {
    x_new
        .iter()
        .map(|&x| fit.basis.evaluate(&fit.coef, x))
        .collect()
}

/// One smoothing problem, reduced once so that each lambda costs a `k x k`
/// factorization.
///
/// Rows are put in a canonical `(x, y)` order before anything is summed, so
/// results are bitwise invariant under joint permutation of the inputs.
pub(crate) struct PenalizedProblem<'a> {
    pub basis: &'a SplineBasis,
    /// Canonical position -> original row.
    order: Vec<usize>,
    /// Basis matrix in canonical row order.
    design: DMatrix<f64>,
    difference: DMatrix<f64>,
    /// `R` and `Q'y` from the thin QR of the design.
    r_design: DMatrix<f64>,
    qty: DVector<f64>,
    /// Part of `||y||^2` outside the column space of the design.
    rss_floor: f64,
    n: usize,
}

struct Solution {
    coef: DVector<f64>,
    edf: f64,
    rss: f64,
}

impl<'a> PenalizedProblem<'a> {
    pub fn new(y: &[f64], x: &[f64], basis: &'a SplineBasis) -> Result<Self> {
        if y.len() != x.len() {
            return Err(Error::Dimension(format!(
                "y has length {} but x has length {}",
                y.len(),
                x.len()
            )));
        }
        if y.iter().chain(x).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "non-finite input to smoother".into(),
            ));
        }
        let mut order: Vec<usize> = (0..y.len()).collect();
        order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));
        let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
        let ys = DVector::from_iterator(y.len(), order.iter().map(|&i| y[i]));

        let design = basis.design(&xs);
        let qr = design.clone().qr();
        let q = qr.q();
        let qty = q.transpose() * &ys;
        let rss_floor = (ys.norm_squared() - qty.norm_squared()).max(0.0);
        Ok(PenalizedProblem {
            basis,
            order,
            r_design: qr.r(),
            difference: basis.difference_matrix(),
            design,
            qty,
            rss_floor,
            n: y.len(),
        })
    }

    /// Mean eigenvalue of `B'B`, the unit of the relative lambda grid.
    pub fn lambda_scale(&self) -> f64 {
        self.design.norm_squared() / self.design.ncols() as f64
    }

    /// Least squares on `[R_B; sqrt(lambda) D] c ~ [Q'y; 0]` by Householder
    /// QR. This is the augmented system `[B; sqrt(lambda) D]` after the
    /// design has been reduced by its own QR, and avoids squaring the
    /// condition number as the penalized normal equations would.
    fn solve(&self, lambda: f64) -> Result<Solution> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "smoothing parameter must be finite and >= 0, got {lambda}"
            )));
        }
        let (top, k) = self.r_design.shape();
        let rows = top + self.difference.nrows();
        let mut aug = DMatrix::zeros(rows, k);
        aug.rows_mut(0, top).copy_from(&self.r_design);
        aug.rows_mut(top, rows - top)
            .copy_from(&(&self.difference * lambda.sqrt()));
        let mut rhs = DVector::zeros(rows);
        rhs.rows_mut(0, top).copy_from(&self.qty);

        let qr = aug.qr();
        let r = qr.r();
        if r.nrows() < k {
            return Err(Error::SingularSystem);
        }
        let largest = r.diagonal().amax();
        let tol = largest * f64::EPSILON * rows.max(self.n) as f64;
        if largest == 0.0 || r.diagonal().iter().any(|d| d.abs() <= tol) {
            return Err(Error::SingularSystem);
        }
        let qtb = qr.q().transpose() * rhs;
        let coef = r
            .solve_upper_triangular(&qtb)
            .ok_or(Error::SingularSystem)?;
        if !coef.iter().all(|c| c.is_finite()) {
            return Err(Error::SingularSystem);
        }
        // edf = tr(B (A'A)^-1 B') = ||R_B R^-1||_F^2
        let w = r
            .tr_solve_upper_triangular(&self.r_design.transpose())
            .ok_or(Error::SingularSystem)?;
        let edf = w.norm_squared();
        let rss = (&self.qty - &self.r_design * &coef).norm_squared() + self.rss_floor;
        Ok(Solution { coef, edf, rss })
    }

    fn gcv(&self, s: &Solution) -> f64 {
        let n = self.n as f64;
        let denom = n - s.edf;
        if denom <= 0.0 {
            return f64::INFINITY;
        }
        n * s.rss / (denom * denom)
    }

    fn make_fit(&self, lambda: f64, s: Solution) -> SmootherFit {
        let gcv = self.gcv(&s);
        let sorted_fit = &self.design * &s.coef;
        let mut fitted = vec![0.0; self.n];
        for (pos, &row) in self.order.iter().enumerate() {
            fitted[row] = sorted_fit[pos];
        }
        SmootherFit {
            basis: self.basis.clone(),
            coef: s.coef.iter().copied().collect(),
            lambda,
            edf: s.edf,
            fitted,
            gcv,
        }
    }

    pub fn fit(&self, lambda: f64) -> Result<SmootherFit> {
        let s = self.solve(lambda)?;
        Ok(self.make_fit(lambda, s))
    }

    pub fn gcv_at(&self, lambda: f64) -> Result<f64> {
        let s = self.solve(lambda)?;
        Ok(self.gcv(&s))
    }
}

/// Minimizes `||y - Bc||^2 + lambda c'Pc` for a fixed smoothing parameter.
///
/// `x` are the training points the basis is evaluated at.
pub fn fit_penalized(
    y: &[f64],
    x: &[f64],
    basis: &SplineBasis,
    lambda: f64,
) -> Result<SmootherFit> {
    PenalizedProblem::new(y, x, basis)?.fit(lambda)
}

/// Relative lambda grid values, ascending.
pub fn relative_grid() -> Vec<f64> {
    let (lo, hi) = GRID_LOG10_RANGE;
    (0..GRID_POINTS)
        .map(|i| {
            let e = lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64;
            10f64.powf(e)
        })
        .collect()
}

/// Selects lambda by minimizing `GCV = n RSS / (n - edf)^2`.
///
/// The search evaluates a 201-point log grid spanning `1e-8 .. 1e8` times the
/// mean eigenvalue of `B'B`, keeps the first minimum scanning from the
/// largest lambda down (ties go to smoother fits), then refines with golden
/// section search in `log10(lambda)` between the grid neighbours. The refined
/// point replaces the grid point only if its score is strictly lower.
pub fn gcv_select(y: &[f64], x: &[f64], basis: &SplineBasis) -> Result<SmootherFit> {
    let problem = PenalizedProblem::new(y, x, basis)?;
    // no penalty to tune for bases without a second difference
    if basis.k() < 3 {
        return problem.fit(0.0);
    }
    let scale = problem.lambda_scale();
    let grid: Vec<f64> = relative_grid().into_iter().map(|r| r * scale).collect();
    let scores: Vec<f64> = grid
        .iter()
        .map(|&l| problem.gcv_at(l))
        .collect::<Result<_>>()?;

    let mut best = grid.len() - 1;
    for i in (0..grid.len()).rev() {
        if scores[i] < scores[best] {
            best = i;
        }
    }

    let lo = grid[best.saturating_sub(1)].log10();
    let hi = grid[(best + 1).min(grid.len() - 1)].log10();
    let objective = |e: f64| problem.gcv_at(10f64.powf(e)).unwrap_or(f64::INFINITY);
    let (e_star, score_star) = golden_section(objective, lo, hi);

    let lambda = if score_star < scores[best] {
        10f64.powf(e_star)
    } else {
        grid[best]
    };
    problem.fit(lambda)
}

/// Golden-section minimization on `[a, b]` with a fixed iteration count.
fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..GOLDEN_ITERATIONS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
