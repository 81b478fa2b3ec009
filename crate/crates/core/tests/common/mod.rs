#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use ridgepath::ingest::Dataset;
use ridgepath::nalgebra::{DMatrix, DVector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Correlated predictors plus a linear signal with noise.
pub fn random_dataset(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Dataset {
    let mix = DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { 0.4 * normal(rng) });
    let z = DMatrix::from_fn(n, p, |_, _| normal(rng));
    let mut x = z * mix;
    for j in 0..p {
        let scale = 0.1 + 10.0 * rng.random::<f64>();
        let shift = 20.0 * normal(rng);
        for i in 0..n {
            x[(i, j)] = x[(i, j)] * scale + shift;
        }
    }
    let coef: Vec<f64> = (0..p).map(|_| normal(rng)).collect();
    let y = DVector::from_fn(n, |i, _| {
        5.0 + (0..p).map(|j| coef[j] * x[(i, j)]).sum::<f64>() + 3.0 * normal(rng)
    });
    let names = (1..=p).map(|j| format!("x{j}")).collect();
    Dataset::new("y", names, y, x).unwrap()
}

/// Columns with sample mean zero and sample correlation matrix exactly `r`.
pub fn with_correlation(rng: &mut ChaCha8Rng, n: usize, r: &DMatrix<f64>) -> DMatrix<f64> {
    let k = r.nrows();
    let mut z = DMatrix::from_fn(n, k, |_, _| normal(rng));
    for j in 0..k {
        let m = z.column(j).mean();
        z.column_mut(j).add_scalar_mut(-m);
    }
    let q = z.qr().q();
    let l = r.clone().cholesky().expect("correlation matrix is PD").l();
    q * l.transpose() * ((n - 1) as f64).sqrt()
}

pub fn symmetric_from_lower(rows: &[&[f64]]) -> DMatrix<f64> {
    let k = rows.len();
    DMatrix::from_fn(k, k, |i, j| if j <= i { rows[i][j] } else { rows[j][i] })
}

/// Pairwise correlations among y (first) and six predictors for the EPA
/// county mortality data.
pub const EPA_X_BLOCK: [&[f64]; 7] = [
    &[1.0],
    &[0.2489, 1.0],
    &[0.4589, 0.58472, 1.0],
    &[0.6421, 0.08896, 0.4217, 1.0],
    &[0.6047, 0.32707, 0.4622, 0.67611, 1.0],
    &[0.5524, 0.11336, 0.4884, 0.69932, 0.6605, 1.0],
    &[0.3040, 0.13933, 0.4163, 0.41804, 0.3800, 0.5708, 1.0],
];

/// Same layout for y and the six smoothed predictors.
pub const EPA_NP_BLOCK: [&[f64]; 7] = [
    &[1.0],
    &[0.3888, 1.0],
    &[0.4809, 0.5991, 1.0],
    &[0.6769, 0.3077, 0.5117, 1.0],
    &[0.6156, 0.5002, 0.5485, 0.6621, 1.0],
    &[0.5656, 0.3029, 0.5192, 0.7348, 0.6607, 1.0],
    &[0.3379, 0.1884, 0.4378, 0.4389, 0.3775, 0.5775, 1.0],
];

pub const EPA_N: usize = 2793;

/// A dataset whose sample correlations equal the given lower-triangular block.
pub fn calibrated_dataset(seed: u64, block: &[&[f64]], n: usize) -> Dataset {
    let r = symmetric_from_lower(block);
    let w = with_correlation(&mut rng(seed), n, &r);
    let p = r.nrows() - 1;
    let y = DVector::from_fn(n, |i, _| w[(i, 0)]);
    let x = DMatrix::from_fn(n, p, |i, j| w[(i, j + 1)]);
    let names = (1..=p).map(|j| format!("x{j}")).collect();
    Dataset::new("y", names, y, x).unwrap()
}
