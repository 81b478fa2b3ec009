use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use ridgepath::grrcore::{CanonicalRecord, ShrinkagePath};
use ridgepath::ingest::{corr_table, load_csv, pearson_corr, CorrTable, Dataset};
use ridgepath::npsmooth::{np_transform, write_np_frame, BasisAdjustment, NpTransform};
use ridgepath::report::{
    build_traces, compare_models, emit_trace_csv, emit_trace_svg, pairs_data, write_pairs_csv,
    FittedModel, ModelSummary, TraceKind,
};

use crate::config::{RunConfig, UsageError};

/// Everything a command writes goes through here, so the manifest lists
/// exactly the files produced, relative to the output directory.
struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root)
            .with_context(|| format!("cannot create output directory {}", root.display()))?;
        Ok(OutDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    /// Absolute target for `rel`, creating its parent and recording it.
    fn file(&mut self, rel: &str) -> Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)
                .with_context(|| format!("cannot create {}", parent.display()))?;
        }
        self.written.push(rel.to_string());
        Ok(path)
    }

    fn text(&mut self, rel: &str, contents: &str) -> Result<()> {
        let path = self.file(rel)?;
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))
    }

    fn json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.text(rel, &s)
    }

    fn finish(mut self, command: &str, cfg: &RunConfig) -> Result<()> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            command: &'a str,
            y: &'a str,
            x: &'a [String],
            k: usize,
            steps: usize,
            mode: crate::config::Mode,
            files: &'a [String],
        }
        let files = std::mem::take(&mut self.written);
        let m = Manifest {
            command,
            y: &cfg.y_column,
            x: &cfg.x_columns,
            k: cfg.k,
            steps: cfg.steps,
            mode: cfg.mode,
            files: &files,
        };
        self.json("manifest.json", &m)
    }
}

fn load(cfg: &RunConfig) -> Result<Dataset> {
    let d = load_csv(&cfg.input, &cfg.y_column, &cfg.x_refs())
        .map_err(|e| UsageError(format!("{}: {e}", cfg.input.display())))?;
    if d.dropped_rows > 0 {
        eprintln!(
            "note: dropped {} row(s) with missing values, {} remain",
            d.dropped_rows,
            d.n()
        );
    }
    Ok(d)
}

fn smooth(d: &Dataset, k: usize) -> Result<NpTransform> {
    let t = np_transform(d, k).context("stage-one smoothing failed")?;
    for (name, adj) in d.x_names.iter().zip(&t.adjustments) {
        match adj {
            Some(BasisAdjustment::ReducedK { requested, used }) => eprintln!(
                "note: `{name}` has too few distinct values for k = {requested}, used k = {used}"
            ),
            Some(BasisAdjustment::LinearFallback { distinct }) => eprintln!(
                "note: `{name}` has only {distinct} distinct values, fitted a straight line"
            ),
            None => {}
        }
    }
    Ok(t)
}

pub fn cmd_smooth(cfg: &RunConfig) -> Result<()> {
    let d = load(cfg)?;
    let t = smooth(&d, cfg.k)?;
    let mut out = OutDir::create(&cfg.out_dir)?;
    write_np_frame(&d, &t, out.file("np_frame.csv")?)?;
    for (name, fit) in t.names().iter().zip(&t.fits) {
        let mut json = fit.record().to_json()?;
        json.push('\n');
        out.text(&format!("fits/{name}.json"), &json)?;
    }
    out.finish("smooth", cfg)
}

#[derive(Serialize)]
struct ModelFile<'a> {
    summary: &'a ModelSummary,
    canonical: CanonicalRecord,
    path: &'a ShrinkagePath,
}

fn emit_model(out: &mut OutDir, fm: &FittedModel, steps: usize) -> Result<ModelSummary> {
    let summary = fm.summary()?;
    let traces = build_traces(&fm.canonical, &fm.path, &fm.design.x_names, steps)?;
    let dir = &fm.label;
    emit_trace_csv(&traces, out.file(&format!("{dir}/trace.csv"))?)?;
    emit_trace_svg(
        &traces,
        TraceKind::Coef,
        out.file(&format!("{dir}/coef_trace.svg"))?,
    )?;
    emit_trace_svg(
        &traces,
        TraceKind::Risk,
        out.file(&format!("{dir}/risk_trace.svg"))?,
    )?;
    out.json(
        &format!("{dir}/model.json"),
        &ModelFile {
            summary: &summary,
            canonical: fm.canonical.record(),
            path: &fm.path,
        },
    )?;
    Ok(summary)
}

/// Outcome plus the two predictors most correlated with it, each followed
/// by its smooth.
fn pairs_selection(d: &Dataset, np_names: &[String]) -> Result<Vec<String>> {
    let mut ranked: Vec<(usize, f64)> = (0..d.p())
        .map(|j| Ok((j, pearson_corr(d.y.as_slice(), &d.x_column(j))?.abs())))
        .collect::<Result<_>>()?;
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut sel = vec![d.y_name.clone()];
    for &(j, _) in ranked.iter().take(2) {
        sel.push(d.x_names[j].clone());
        sel.push(np_names[j].clone());
    }
    Ok(sel)
}

pub fn cmd_fit(cfg: &RunConfig) -> Result<()> {
    let d = load(cfg)?;
    let mut out = OutDir::create(&cfg.out_dir)?;
    let linear = if cfg.mode.linear() {
        let fm = FittedModel::fit("linear", &d).context("linear model fit failed")?;
        Some(emit_model(&mut out, &fm, cfg.steps)?)
    } else {
        None
    };
    let np = if cfg.mode.np() {
        let t = smooth(&d, cfg.k)?;
        let nd = t.np_dataset(&d)?;
        let fm = FittedModel::fit("np", &nd).context("np model fit failed")?;
        Some((emit_model(&mut out, &fm, cfg.steps)?, t))
    } else {
        None
    };
    if let (Some(lin), Some((nps, t))) = (&linear, &np) {
        let report = compare_models(lin, nps)?;
        let mut json = report.to_json()?;
        json.push('\n');
        out.text("report.json", &json)?;
        out.text("report.txt", &report.to_text())?;

        let names = t.names();
        let mut columns = vec![(d.y_name.clone(), d.y.as_slice().to_vec())];
        columns.extend((0..d.p()).map(|j| (d.x_names[j].clone(), d.x_column(j))));
        columns.extend((0..d.p()).map(|j| (names[j].clone(), t.fits[j].fitted.clone())));
        let sel = pairs_selection(&d, &names)?;
        let sel: Vec<&str> = sel.iter().map(String::as_str).collect();
        write_pairs_csv(&pairs_data(&columns, &sel)?, out.file("pairs.csv")?)?;
    }
    out.finish("fit", cfg)
}

fn block(y_name: &str, y: &[f64], names: &[String], cols: &[Vec<f64>]) -> Result<CorrTable> {
    let mut labels = vec![y_name.to_string()];
    labels.extend(names.iter().cloned());
    let mut refs: Vec<&[f64]> = vec![y];
    refs.extend(cols.iter().map(Vec::as_slice));
    Ok(corr_table(&labels, &refs)?)
}

pub fn cmd_corr(cfg: &RunConfig) -> Result<()> {
    let d = load(cfg)?;
    let t = smooth(&d, cfg.k)?;
    let y = d.y.as_slice();
    let x_cols: Vec<Vec<f64>> = (0..d.p()).map(|j| d.x_column(j)).collect();
    let np_cols: Vec<Vec<f64>> = t.fits.iter().map(|f| f.fitted.clone()).collect();
    let xb = block(&d.y_name, y, &d.x_names, &x_cols)?;
    let nb = block(&d.y_name, y, &t.names(), &np_cols)?;

    let mut out = OutDir::create(&cfg.out_dir)?;
    for (stem, table) in [("corr_x", &xb), ("corr_np", &nb)] {
        out.text(&format!("{stem}.txt"), &table.to_text())?;
        out.text(&format!("{stem}.csv"), &table.to_csv())?;
    }
    print!("{}\n{}", xb.to_text(), nb.to_text());
    out.finish("corr", cfg)
}

pub const FETCH_INSTRUCTIONS: &str = "\
The county-level EPA particulate matter data are not distributed with this tool.

Source:
  Young, S. S. and Obenchain, R. L. (2022). \"EPA Particulate Matter Data\",
  Dryad [Data Archive]. https://doi.org/10.5061/dryad.63xsj3v58

Download the CSV from the archive page, then run for example

  ridgepath fit --input <file.csv> --y AACRmort \\
      --x Avoc,Bvoc,PREMdeath,ASmoke,ChildPOV,IncomIEQ --out results

Expected columns:
  AACRmort   age adjusted circulatory-respiratory mortality (outcome)
  Avoc       anthropogenic volatile organic compounds
  Bvoc       biogenic volatile organic compounds
  PREMdeath  premature death index (before age 75)
  ASmoke     adult smoking percentage
  ChildPOV   children living in poverty index
  IncomIEQ   income inequality index
";
