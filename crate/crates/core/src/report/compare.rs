use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grrcore::{
    beta_at, canonical_decompose, destandardize, dmse_factors, intercept_at, relative_risk_at,
    CanonicalModel, ShrinkagePath,
};
use crate::ingest::{standardize, Dataset, StandardizedDesign};

/// A dataset taken through standardization, canonical decomposition and
/// optimal shrinkage.
#[derive(Debug, Clone)]
pub struct FittedModel {
    pub label: String,
    pub design: StandardizedDesign,
    pub canonical: CanonicalModel,
    pub path: ShrinkagePath,
}

impl FittedModel {
    pub fn fit(label: impl Into<String>, d: &Dataset) -> Result<Self> {
        let design = standardize(d)?;
        let canonical = canonical_decompose(&design)?;
        let path = dmse_factors(&canonical);
        Ok(FittedModel {
            label: label.into(),
            design,
            canonical,
            path,
        })
    }

    pub fn summary(&self) -> Result<ModelSummary> {
        let cm = &self.canonical;
        let sd = &self.design;
        let ml_beta = beta_at(cm, &self.path, self.path.m_star)?;
        let y_var = sd.y_sd * sd.y_sd;
        Ok(ModelSummary {
            label: self.label.clone(),
            formula: format!("{} ~ {}", sd.y_name, sd.x_names.join(" + ")),
            predictors: sd.x_names.clone(),
            n: cm.n,
            residual_mean_square: cm.rms_ols(),
            residual_std_error: cm.resid_se,
            residual_mean_square_original: cm.rms_ols() * y_var,
            residual_std_error_original: cm.resid_se * sd.y_sd,
            ols_intercept: intercept_at(sd, &cm.beta_ols)?,
            ml_intercept: intercept_at(sd, &ml_beta)?,
            ols_beta_original: destandardize(&cm.beta_ols, sd)?,
            ml_beta_original: destandardize(&ml_beta, sd)?,
            ols_beta: cm.beta_ols.clone(),
            ml_beta,
            ols_relative_risk: relative_risk_at(cm, &self.path, 0.0)?,
            ml_relative_risk: relative_risk_at(cm, &self.path, self.path.m_star)?,
            dmse: self.path.dmse.clone(),
            m_star: self.path.m_star,
        })
    }
}

/// The per-model block of the comparison table. Scale-dependent quantities
/// are on the standardized scale unless the name says `original`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub label: String,
    pub formula: String,
    pub predictors: Vec<String>,
    pub n: usize,
    pub residual_mean_square: f64,
    pub residual_std_error: f64,
    pub residual_mean_square_original: f64,
    pub residual_std_error_original: f64,
    pub ols_beta: Vec<f64>,
    pub ml_beta: Vec<f64>,
    pub ols_relative_risk: Vec<f64>,
    pub ml_relative_risk: Vec<f64>,
    pub dmse: Vec<f64>,
    pub m_star: f64,
    pub ols_intercept: f64,
    pub ml_intercept: f64,
    pub ols_beta_original: Vec<f64>,
    pub ml_beta_original: Vec<f64>,
}

impl ModelSummary {
    /// `residual_mean_square * ml_relative_risk_j`.
    pub fn risk_products(&self) -> Vec<f64> {
        self.ml_relative_risk
            .iter()
            .map(|r| self.residual_mean_square * r)
            .collect()
    }

    /// Variables whose shrunken relative risk is strictly below the OLS one.
    pub fn shrinkage_gains(&self) -> usize {
        self.ml_relative_risk
            .iter()
            .zip(&self.ols_relative_risk)
            .filter(|(ml, ols)| ml < ols)
            .count()
    }

    pub fn p(&self) -> usize {
        self.ols_beta.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Linear,
    Np,
    Tie,
}

/// Side-by-side statistics for the linear and np models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub linear: ModelSummary,
    pub np: ModelSummary,
    pub linear_risk_products: Vec<f64>,
    pub np_risk_products: Vec<f64>,
    /// Lower risk product wins.
    pub winners: Vec<Winner>,
    pub np_wins: usize,
    pub linear_wins: usize,
    pub ties: usize,
    /// Per model, variables where shrinkage lowered the relative risk.
    pub linear_shrinkage_gains: usize,
    pub np_shrinkage_gains: usize,
}

pub fn compare_models(linear: &ModelSummary, np: &ModelSummary) -> Result<ComparisonReport> {
    let p = linear.p();
    let lens = [
        linear.ml_relative_risk.len(),
        linear.ols_relative_risk.len(),
        linear.dmse.len(),
        np.ols_beta.len(),
        np.ml_relative_risk.len(),
        np.ols_relative_risk.len(),
        np.dmse.len(),
    ];
    if lens.iter().any(|&l| l != p) {
        return Err(Error::Dimension(format!(
            "models disagree on the number of predictors ({p} vs {})",
            np.p()
        )));
    }
    let lin_prod = linear.risk_products();
    let np_prod = np.risk_products();
    let winners: Vec<Winner> = lin_prod
        .iter()
        .zip(&np_prod)
        .map(|(l, n)| {
            if n < l {
                Winner::Np
            } else if l < n {
                Winner::Linear
            } else {
                Winner::Tie
            }
        })
        .collect();
    let count = |w: Winner| winners.iter().filter(|&&x| x == w).count();
    Ok(ComparisonReport {
        np_wins: count(Winner::Np),
        linear_wins: count(Winner::Linear),
        ties: count(Winner::Tie),
        linear_shrinkage_gains: linear.shrinkage_gains(),
        np_shrinkage_gains: np.shrinkage_gains(),
        linear: linear.clone(),
        np: np.clone(),
        linear_risk_products: lin_prod,
        np_risk_products: np_prod,
        winners,
    })
}

impl ComparisonReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Fixed-width text rendering of the two model blocks.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for model in [&self.linear, &self.np] {
            out.push_str(&format!("{} model: {}\n", model.label, model.formula));
            out.push_str(&format!(
                "{:<27}{:.6}\n",
                "Residual Mean Square", model.residual_mean_square
            ));
            out.push_str(&format!(
                "{:<27}{:.6}\n",
                "Residual Std. Error", model.residual_std_error
            ));
            let rows: [(&str, &[f64]); 5] = [
                ("OLS Beta Coefficients", &model.ols_beta),
                ("ML Optimally Biased Betas", &model.ml_beta),
                ("OLS Relative MSE Risks", &model.ols_relative_risk),
                ("ML Minimum Relative Risks", &model.ml_relative_risk),
                ("dMSE Estimates", &model.dmse),
            ];
            for (label, values) in rows {
                out.push_str(&format!("{label:<27}"));
                for v in values {
                    out.push_str(&format!("{v:>11.6}"));
                }
                out.push('\n');
            }
            out.push_str(&format!("{:<27}{:.4}\n\n", "m*", model.m_star));
        }
        out.push_str(&format!(
            "risk products: np lower on {} of {}, linear lower on {}, ties {}\n",
            self.np_wins,
            self.winners.len(),
            self.linear_wins,
            self.ties
        ));
        out
    }
}
