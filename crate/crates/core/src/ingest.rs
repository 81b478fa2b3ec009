//! CSV ingestion, standardization and Pearson correlation tables.
//!
//! The CSV dialect is fixed: comma separated, one header row, `.` as the
//! decimal mark, and `NA` or an empty cell marking a missing value. Rows with
//! a missing value in any *selected* column are dropped (listwise deletion);
//! columns that were not selected are never inspected.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An outcome vector and an ordered set of predictor columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub y_name: String,
    pub x_names: Vec<String>,
    pub y: DVector<f64>,
    /// `n x p`, columns in the order of `x_names`.
    pub x: DMatrix<f64>,
    /// Rows removed by listwise deletion while loading.
    pub dropped_rows: usize,
}

impl Dataset {
    /// Validates the shape and variance invariants.
    pub fn new(
        y_name: impl Into<String>,
        x_names: Vec<String>,
        y: DVector<f64>,
        x: DMatrix<f64>,
    ) -> Result<Self> {
        let y_name = y_name.into();
        let n = y.len();
        let p = x.ncols();
        if x.nrows() != n {
            return Err(Error::Dimension(format!(
                "y has {n} rows but X has {}",
                x.nrows()
            )));
        }
        if x_names.len() != p {
            return Err(Error::Dimension(format!(
                "{} names for {p} predictor columns",
                x_names.len()
            )));
        }
        if n == 0 {
            return Err(Error::NoUsableRows);
        }
        if p == 0 || n < p + 2 {
            return Err(Error::TooFewRows { n, p });
        }
        if y.iter().chain(x.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite value in dataset".into()));
        }
        if sample_sd(y.as_slice()) == 0.0 {
            return Err(Error::ZeroVariance(y_name));
        }
        for (j, name) in x_names.iter().enumerate() {
            let col: Vec<f64> = x.column(j).iter().copied().collect();
            if sample_sd(&col) == 0.0 {
                return Err(Error::ZeroVariance(name.clone()));
            }
        }
        Ok(Dataset {
            y_name,
            x_names,
            y,
            x,
            dropped_rows: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Predictor column `j` as an owned vector.
    pub fn x_column(&self, j: usize) -> Vec<f64> {
        self.x.column(j).iter().copied().collect()
    }

    /// Same rows and outcome, different predictors (used to build the np model).
    pub fn with_predictors(&self, x_names: Vec<String>, x: DMatrix<f64>) -> Result<Self> {
        let mut d = Dataset::new(self.y_name.clone(), x_names, self.y.clone(), x)?;
        d.dropped_rows = self.dropped_rows;
        Ok(d)
    }

    /// Writes the selected columns back out as CSV (`y` first, then the predictors).
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut headers = vec![self.y_name.clone()];
        headers.extend(self.x_names.iter().cloned());
        let mut columns = vec![self.y.as_slice().to_vec()];
        columns.extend((0..self.p()).map(|j| self.x_column(j)));
        write_columns_csv(path, &headers, &columns)
    }
}

/// Writes equal-length numeric columns with a header row.
///
/// Values use Rust's shortest round-trip float formatting, which always uses
/// `.` as the decimal mark.
pub fn write_columns_csv(
    path: impl AsRef<Path>,
    headers: &[String],
    columns: &[Vec<f64>],
) -> Result<()> {
    let path = path.as_ref();
    let n = columns.first().map_or(0, Vec::len);
    if headers.len() != columns.len() || columns.iter().any(|c| c.len() != n) {
        return Err(Error::Dimension("ragged columns in CSV output".into()));
    }
    let mut out = String::new();
    out.push_str(&headers.join(","));
    out.push('\n');
    for i in 0..n {
        let row: Vec<String> = columns.iter().map(|c| format!("{}", c[i])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(path, e))
}

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell == "NA"
}

/// Loads `y_col` and the ordered `x_cols` from a CSV file.
pub fn load_csv(path: impl AsRef<Path>, y_col: &str, x_cols: &[&str]) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader.headers()?.clone();
    let locate = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let mut selected = vec![(y_col.to_string(), locate(y_col)?)];
    for name in x_cols {
        selected.push((name.to_string(), locate(name)?));
    }

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); selected.len()];
    let mut dropped = 0usize;
    let mut row_values = Vec::with_capacity(selected.len());
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        row_values.clear();
        let mut missing = false;
        for (name, idx) in &selected {
            let cell = record.get(*idx).unwrap_or("");
            if is_missing(cell) {
                missing = true;
                continue;
            }
            let value: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                column: name.clone(),
                row: row + 1,
                value: cell.to_string(),
            })?;
            if !value.is_finite() {
                missing = true;
            }
            row_values.push(value);
        }
        if missing {
            dropped += 1;
            continue;
        }
        for (col, v) in columns.iter_mut().zip(&row_values) {
            col.push(*v);
        }
    }

    let n = columns[0].len();
    if n == 0 {
        return Err(Error::NoUsableRows);
    }
    let y = DVector::from_vec(columns.remove(0));
    let x = DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i]);
    let mut dataset = Dataset::new(y_col, x_cols.iter().map(|s| s.to_string()).collect(), y, x)?;
    dataset.dropped_rows = dropped;
    Ok(dataset)
}

pub(crate) fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation with the `n - 1` denominator.
pub(crate) fn sample_sd(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    let ss: f64 = v.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (v.len() - 1) as f64).sqrt()
}

/// Location/scale record for one column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnScale {
    pub column: String,
    pub mean: f64,
    pub sd: f64,
}

/// Centered, unit-variance copy of a [`Dataset`] together with the
/// parameters needed to undo the transform.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedDesign {
    pub xs: DMatrix<f64>,
    pub ys: DVector<f64>,
    pub x_means: Vec<f64>,
    pub x_sds: Vec<f64>,
    pub y_mean: f64,
    pub y_sd: f64,
    pub y_name: String,
    pub x_names: Vec<String>,
}

impl StandardizedDesign {
    pub fn n(&self) -> usize {
        self.ys.len()
    }

    pub fn p(&self) -> usize {
        self.xs.ncols()
    }

    /// Per-column scale parameters, outcome first.
    pub fn scales(&self) -> Vec<ColumnScale> {
        let mut out = vec![ColumnScale {
            column: self.y_name.clone(),
            mean: self.y_mean,
            sd: self.y_sd,
        }];
        out.extend(
            self.x_names
                .iter()
                .zip(self.x_means.iter().zip(&self.x_sds))
                .map(|(name, (&mean, &sd))| ColumnScale {
                    column: name.clone(),
                    mean,
                    sd,
                }),
        );
        out
    }

    pub fn scales_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.scales())?)
    }
}

/// Centers every column and scales it to unit sample variance.
pub fn standardize(d: &Dataset) -> Result<StandardizedDesign> {
    let (ys, y_mean, y_sd) = standardize_column(d.y.as_slice(), &d.y_name)?;
    let p = d.p();
    let mut xs = DMatrix::zeros(d.n(), p);
    let mut x_means = Vec::with_capacity(p);
    let mut x_sds = Vec::with_capacity(p);
    for j in 0..p {
        let (col, m, s) = standardize_column(&d.x_column(j), &d.x_names[j])?;
        xs.set_column(j, &DVector::from_vec(col));
        x_means.push(m);
        x_sds.push(s);
    }
    Ok(StandardizedDesign {
        xs,
        ys: DVector::from_vec(ys),
        x_means,
        x_sds,
        y_mean,
        y_sd,
        y_name: d.y_name.clone(),
        x_names: d.x_names.clone(),
    })
}

/// Returns the standardized column with its mean and sample sd.
pub fn standardize_column(v: &[f64], name: &str) -> Result<(Vec<f64>, f64, f64)> {
    let m = mean(v);
    let s = sample_sd(v);
    if s == 0.0 || !s.is_finite() {
        return Err(Error::ZeroVariance(name.to_string()));
    }
    Ok((v.iter().map(|x| (x - m) / s).collect(), m, s))
}

/// Pearson product-moment correlation.
pub fn pearson_corr(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "correlation of vectors with lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 3 {
        return Err(Error::InvalidArgument(
            "correlation needs at least 3 observations".into(),
        ));
    }
    let (ma, mb) = (mean(a), mean(b));
    let (mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        saa += dx * dx;
        sbb += dy * dy;
        sab += dx * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::ConstantInput);
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Lower-triangular correlation table. Row `i` holds correlations with
/// columns `0..=i`; the diagonal is exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrTable {
    pub labels: Vec<String>,
    pub lower: Vec<Vec<f64>>,
}

impl CorrTable {
    /// Symmetric lookup.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            self.lower[i][j]
        } else {
            self.lower[j][i]
        }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    /// Plain-text rendering with 4 decimals.
    pub fn to_text(&self) -> String {
        let width = self
            .labels
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(0)
            .max(8);
        let mut out = format!("{:width$}", "variable");
        for label in &self.labels {
            out.push_str(&format!(" {label:>8}"));
        }
        out.push('\n');
        for (i, row) in self.lower.iter().enumerate() {
            out.push_str(&format!("{:width$}", self.labels[i]));
            for v in row {
                out.push_str(&format!(" {v:>8.4}"));
            }
            out.push('\n');
        }
        out
    }

    /// CSV with the full (mirrored) square matrix.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("variable");
        for label in &self.labels {
            out.push(',');
            out.push_str(label);
        }
        out.push('\n');
        for i in 0..self.len() {
            out.push_str(&self.labels[i]);
            for j in 0..self.len() {
                out.push_str(&format!(",{}", self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

pub fn corr_table(labels: &[String], columns: &[&[f64]]) -> Result<CorrTable> {
    if labels.len() != columns.len() {
        return Err(Error::Dimension(format!(
            "{} labels for {} columns",
            labels.len(),
            columns.len()
        )));
    }
    let mut lower = Vec::with_capacity(columns.len());
    for i in 0..columns.len() {
        let mut row = Vec::with_capacity(i + 1);
        for j in 0..i {
            row.push(pearson_corr(columns[i], columns[j])?);
        }
        // constant columns must still be rejected on the diagonal
        if sample_sd(columns[i]) == 0.0 {
            return Err(Error::ConstantInput);
        }
        row.push(1.0);
        lower.push(row);
    }
    Ok(CorrTable {
        labels: labels.to_vec(),
        lower,
    })
}
