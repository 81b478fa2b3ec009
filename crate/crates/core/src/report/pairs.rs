use std::path::Path;

use super::write_string;
use crate::error::{Error, Result};

/// One scatter panel from the lower triangle of a pairs plot.
#[derive(Debug, Clone, PartialEq)]
pub struct PairBlock {
    /// 1-based, row-major over the lower triangle.
    pub pair_index: usize,
    pub x_name: String,
    pub y_name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Lower-panel scatter pairs for the selected columns.
///
/// Panel `(i, j)` with `j < i` plots column `j` on the horizontal axis
/// against column `i`, matching the lower panel of a scatterplot matrix.
pub fn pairs_data(columns: &[(String, Vec<f64>)], selection: &[&str]) -> Result<Vec<PairBlock>> {
    let picked: Vec<&(String, Vec<f64>)> = selection
        .iter()
        .map(|name| {
            columns
                .iter()
                .find(|(n, _)| n == name)
                .ok_or_else(|| Error::UnknownName(name.to_string()))
        })
        .collect::<Result<_>>()?;
    if let Some(first) = picked.first() {
        let n = first.1.len();
        if picked.iter().any(|(_, v)| v.len() != n) {
            return Err(Error::Dimension("pairs columns differ in length".into()));
        }
    }
    let mut blocks = Vec::new();
    for i in 1..picked.len() {
        for j in 0..i {
            blocks.push(PairBlock {
                pair_index: blocks.len() + 1,
                x_name: picked[j].0.clone(),
                y_name: picked[i].0.clone(),
                x: picked[j].1.clone(),
                y: picked[i].1.clone(),
            });
        }
    }
    Ok(blocks)
}

pub fn pairs_csv_string(blocks: &[PairBlock]) -> String {
    let mut out = String::from("pairIndex,xName,yName,xValue,yValue\n");
    for b in blocks {
        for (x, y) in b.x.iter().zip(&b.y) {
            out.push_str(&format!(
                "{},{},{},{x},{y}\n",
                b.pair_index, b.x_name, b.y_name
            ));
        }
    }
    out
}

pub fn write_pairs_csv(blocks: &[PairBlock], path: impl AsRef<Path>) -> Result<()> {
    write_string(path, &pairs_csv_string(blocks))
}
