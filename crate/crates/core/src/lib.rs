//! Two-stage nonparametric generalized ridge regression.
//!
//! Stage one replaces each predictor `x_j` by a penalized-spline smooth of
//! `y` on `x_j` alone ([`npsmooth`]). Stage two fits a linear model on either
//! set of predictors and shrinks it along the efficient generalized ridge
//! path, with per-component shrinkage chosen to minimize estimated MSE risk
//! ([`grrcore`]). The [`report`] module evaluates coefficient and risk traces
//! along that path and compares the linear and np models.
//!
//! ```
//! use nalgebra::{DMatrix, DVector};
//! use ridgepath::grrcore::{beta_at, canonical_decompose, dmse_factors};
//! use ridgepath::ingest::{standardize, Dataset};
//!
//! let x = DMatrix::from_row_slice(6, 2, &[
//!     1.0, 2.0,
//!     2.0, 1.0,
//!     3.0, 5.0,
//!     4.0, 3.0,
//!     5.0, 6.0,
//!     6.0, 4.0,
//! ]);
//! let y = DVector::from_vec(vec![1.1, 1.9, 3.4, 3.8, 5.2, 5.9]);
//! let d = Dataset::new("y", vec!["a".into(), "b".into()], y, x)?;
//! let sd = standardize(&d)?;
//! let cm = canonical_decompose(&sd)?;
//! let path = dmse_factors(&cm);
//!
//! // m = 0 is ordinary least squares, m = p shrinks everything to zero
//! assert_eq!(beta_at(&cm, &path, 0.0)?, cm.beta_ols);
//! assert!(beta_at(&cm, &path, 2.0)?.iter().all(|b| *b == 0.0));
//! # Ok::<(), ridgepath::Error>(())
//! ```

pub mod error;
pub mod grrcore;
pub mod ingest;
pub mod npsmooth;
pub mod report;

pub use error::{Error, Result};
pub use nalgebra;

// The guide under `book/` is compiled here so its snippets run as doctests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/ingest.md")]
    pub mod ingest {}
    #[doc = include_str!("../../../book/src/smoothing.md")]
    pub mod smoothing {}
    #[doc = include_str!("../../../book/src/canonical.md")]
    pub mod canonical {}
    #[doc = include_str!("../../../book/src/efficient_path.md")]
    pub mod efficient_path {}
    #[doc = include_str!("../../../book/src/traces.md")]
    pub mod traces {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
