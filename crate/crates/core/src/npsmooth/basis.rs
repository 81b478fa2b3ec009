use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cubic degree used for regular fits.
pub const CUBIC: usize = 3;

/// Clamped B-spline basis on `[boundary.0, boundary.1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineBasis {
    /// Interior knots, strictly increasing and strictly inside the boundary.
    pub knots: Vec<f64>,
    pub degree: usize,
    pub boundary: (f64, f64),
}

/// Why the basis differs from what was requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BasisAdjustment {
    /// Fewer distinct x values than requested basis functions.
    ReducedK { requested: usize, used: usize },
    /// Fewer than four distinct values; a straight line is fitted instead.
    LinearFallback { distinct: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisBuild {
    pub basis: SplineBasis,
    pub adjustment: Option<BasisAdjustment>,
}

impl SplineBasis {
    pub fn new(knots: Vec<f64>, degree: usize, boundary: (f64, f64)) -> Result<Self> {
        let (lo, hi) = boundary;
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidArgument(format!(
                "invalid spline boundary [{lo}, {hi}]"
            )));
        }
        if degree == 0 {
            return Err(Error::InvalidArgument("spline degree must be >= 1".into()));
        }
        let mut prev = lo;
        for &t in &knots {
            if t.is_nan() || t <= prev || t >= hi {
                return Err(Error::InvalidArgument(
                    "interior knots must be strictly increasing inside the boundary".into(),
                ));
            }
            prev = t;
        }
        Ok(SplineBasis {
            knots,
            degree,
            boundary,
        })
    }

    /// Number of basis functions.
    pub fn k(&self) -> usize {
        self.knots.len() + self.degree + 1
    }

    /// Full clamped knot vector, length `k + degree + 1`.
    pub fn knot_vector(&self) -> Vec<f64> {
        let (lo, hi) = self.boundary;
        let mut t = vec![lo; self.degree + 1];
        t.extend_from_slice(&self.knots);
        t.extend(std::iter::repeat_n(hi, self.degree + 1));
        t
    }

    /// Values of all `k` basis functions at `x`; `x` is clamped to the boundary.
    pub fn eval_row(&self, x: f64) -> Vec<f64> {
        let t = self.knot_vector();
        let mut row = vec![0.0; self.k()];
        let (span, local) = nonzero_basis(&t, self.degree, self.k(), x);
        for (r, v) in local.into_iter().enumerate() {
            row[span - self.degree + r] = v;
        }
        row
    }

    /// `n x k` design matrix at the given points.
    pub fn design(&self, x: &[f64]) -> DMatrix<f64> {
        let t = self.knot_vector();
        let k = self.k();
        let mut b = DMatrix::zeros(x.len(), k);
        for (i, &xi) in x.iter().enumerate() {
            let (span, local) = nonzero_basis(&t, self.degree, k, xi);
            for (r, v) in local.into_iter().enumerate() {
                b[(i, span - self.degree + r)] = v;
            }
        }
        b
    }

    /// Greville abscissae: knot averages where each coefficient "sits".
    /// Coefficients of a linear function `a + b x` are `a + b * greville_j`.
    pub fn greville(&self) -> Vec<f64> {
        let t = self.knot_vector();
        (0..self.k())
            .map(|j| t[j + 1..=j + self.degree].iter().sum::<f64>() / self.degree as f64)
            .collect()
    }

    /// Second-order difference operator, `(k - 2) x k` (no rows for `k < 3`).
    ///
    /// Rows are second divided differences over the Greville abscissae,
    /// scaled by twice the squared mean spacing, so the operator equals the
    /// plain `[1, -2, 1]` stencil for equally spaced knots and annihilates
    /// the coefficients of every linear function for any knot placement.
    pub fn difference_matrix(&self) -> DMatrix<f64> {
        let k = self.k();
        let rows = k.saturating_sub(2);
        let mut d = DMatrix::zeros(rows, k);
        if rows == 0 {
            return d;
        }
        let g = self.greville();
        let mean_h = (g[k - 1] - g[0]) / (k - 1) as f64;
        let scale = 2.0 * mean_h * mean_h;
        for r in 0..rows {
            let h1 = g[r + 1] - g[r];
            let h2 = g[r + 2] - g[r + 1];
            let h = g[r + 2] - g[r];
            d[(r, r)] = scale / (h1 * h);
            d[(r, r + 1)] = -scale / (h1 * h2);
            d[(r, r + 2)] = scale / (h2 * h);
        }
        d
    }

    /// Second-order difference penalty `D'D`.
    pub fn penalty(&self) -> DMatrix<f64> {
        let d = self.difference_matrix();
        d.transpose() * d
    }

    /// Spline value at `x`, extended linearly outside the boundary.
    pub fn evaluate(&self, coef: &[f64], x: f64) -> f64 {
        let (lo, hi) = self.boundary;
        if x < lo {
            let (v, slope) = self.left_tangent(coef);
            return v + slope * (x - lo);
        }
        if x > hi {
            let (v, slope) = self.right_tangent(coef);
            return v + slope * (x - hi);
        }
        self.eval_row(x).iter().zip(coef).map(|(b, c)| b * c).sum()
    }

    /// Value and first derivative at the lower boundary.
    pub fn left_tangent(&self, coef: &[f64]) -> (f64, f64) {
        let t = self.knot_vector();
        let d = self.degree as f64;
        (
            coef[0],
            d * (coef[1] - coef[0]) / (t[self.degree + 1] - t[1]),
        )
    }

    /// Value and first derivative at the upper boundary.
    pub fn right_tangent(&self, coef: &[f64]) -> (f64, f64) {
        let t = self.knot_vector();
        let k = self.k();
        let d = self.degree as f64;
        (
            coef[k - 1],
            d * (coef[k - 1] - coef[k - 2]) / (t[k + self.degree - 1] - t[k - 1]),
        )
    }

    /// `design(x) * coef`, exact evaluation inside the boundary.
    pub fn apply(&self, x: &[f64], coef: &[f64]) -> DVector<f64> {
        self.design(x) * DVector::from_column_slice(coef)
    }
}

/// Cox-de Boor recursion for the `degree + 1` nonzero basis functions at `x`.
fn nonzero_basis(t: &[f64], degree: usize, k: usize, x: f64) -> (usize, Vec<f64>) {
    let lo = t[degree];
    let hi = t[k];
    let x = x.clamp(lo, hi);
    // last span for x == hi so the basis stays a partition of unity there
    let span = if x >= hi {
        k - 1
    } else {
        let mut s = degree;
        while s < k - 1 && x >= t[s + 1] {
            s += 1;
        }
        s
    };
    let mut n = vec![0.0; degree + 1];
    let mut left = vec![0.0; degree + 1];
    let mut right = vec![0.0; degree + 1];
    n[0] = 1.0;
    for j in 1..=degree {
        left[j] = x - t[span + 1 - j];
        right[j] = t[span + j] - x;
        let mut saved = 0.0;
        for r in 0..j {
            let temp = n[r] / (right[r + 1] + left[j - r]);
            n[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        n[j] = saved;
    }
    (span, n)
}

/// Sorted distinct values.
pub(crate) fn distinct_sorted(x: &[f64]) -> Vec<f64> {
    let mut u = x.to_vec();
    u.sort_by(f64::total_cmp);
    u.dedup();
    u
}

/// Linearly interpolated quantile (R type 7) of sorted values.
fn quantile_sorted(u: &[f64], q: f64) -> f64 {
    let h = (u.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    if lo + 1 >= u.len() {
        return u[u.len() - 1];
    }
    u[lo] + (h - lo as f64) * (u[lo + 1] - u[lo])
}

/// Builds a cubic basis with `k` functions, interior knots at equally spaced
/// quantiles of the distinct values of `x`.
///
/// With fewer than `k` distinct values `k` is reduced to the distinct count;
/// with fewer than four the basis degrades to a single linear piece.
pub fn build_basis(x: &[f64], k: usize) -> Result<BasisBuild> {
    if k < 4 {
        return Err(Error::InvalidArgument(format!(
            "basis size k must be >= 4, got {k}"
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite x value".into()));
    }
    let u = distinct_sorted(x);
    let distinct = u.len();
    if distinct < 2 {
        return Err(Error::TooFewDistinct { distinct });
    }
    let boundary = (u[0], u[distinct - 1]);
    if distinct < 4 {
        return Ok(BasisBuild {
            basis: SplineBasis::new(Vec::new(), 1, boundary)?,
            adjustment: Some(BasisAdjustment::LinearFallback { distinct }),
        });
    }
    let (used, adjustment) = if distinct < k {
        (
            distinct,
            Some(BasisAdjustment::ReducedK {
                requested: k,
                used: distinct,
            }),
        )
    } else {
        (k, None)
    };
    let interior = used - CUBIC - 1;
    let knots = (1..=interior)
        .map(|j| quantile_sorted(&u, j as f64 / (interior + 1) as f64))
        .collect();
    Ok(BasisBuild {
        basis: SplineBasis::new(knots, CUBIC, boundary)?,
        adjustment,
    })
}
