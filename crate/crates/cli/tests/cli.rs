use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ridgepath::npsmooth::FitRecord;

const X: &str = "Avoc,Bvoc,PREMdeath,ASmoke,ChildPOV,IncomIEQ";

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic_epa.csv")
}

fn ridgepath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ridgepath"))
        .args(args)
        .env_remove("RIDGEPATH_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}\n{}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn header(path: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .next()
        .unwrap()
        .split(',')
        .map(String::from)
        .collect()
}

#[test]
fn smooth_writes_the_wide_frame_and_reloadable_fits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let f = fixture();
    ok(&ridgepath(&[
        "smooth",
        "--input",
        s(&f),
        "--y",
        "AACRmort",
        "--x",
        X,
        "--out",
        s(&out),
    ]));
    let h = header(&out.join("np_frame.csv"));
    assert_eq!(h.len(), 13);
    assert_eq!(h[0], "AACRmort");
    assert_eq!(&h[7..], ["np1", "np2", "np3", "np4", "np5", "np6"]);

    let text = std::fs::read_to_string(out.join("np_frame.csv")).unwrap();
    let first: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    for j in 0..6 {
        let json = std::fs::read_to_string(out.join(format!("fits/np{}.json", j + 1))).unwrap();
        let rec = FitRecord::from_json(&json).unwrap();
        let pred = rec.predict(&[first[1 + j]]).unwrap()[0];
        assert!((pred - first[7 + j]).abs() < 1e-9 * first[7 + j].abs().max(1.0));
    }
}

#[test]
fn single_predictor_gives_three_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let f = fixture();
    ok(&ridgepath(&[
        "smooth",
        "--input",
        s(&f),
        "--y",
        "AACRmort",
        "--x",
        "PREMdeath",
        "--out",
        s(&out),
    ]));
    assert_eq!(
        header(&out.join("np_frame.csv")),
        ["AACRmort", "PREMdeath", "np1"]
    );
}

#[test]
fn missing_outcome_column_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture();
    for cmd in ["smooth", "fit", "corr"] {
        let out = ridgepath(&[
            cmd,
            "--input",
            s(&f),
            "--y",
            "Mortality",
            "--x",
            X,
            "--out",
            s(dir.path()),
        ]);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("Mortality"));
    }
}

#[test]
fn bad_config_and_thread_values_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture();
    let out = ridgepath(&[
        "fit",
        "--input",
        s(&f),
        "--y",
        "AACRmort",
        "--x",
        X,
        "--k",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_ridgepath"))
        .args([
            "fit",
            "--input",
            s(&f),
            "--y",
            "AACRmort",
            "--x",
            X,
            "--out",
            s(dir.path()),
        ])
        .env("RIDGEPATH_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn fit_with_two_steps_has_three_trace_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let f = fixture();
    ok(&ridgepath(&[
        "fit",
        "--input",
        s(&f),
        "--y",
        "AACRmort",
        "--x",
        X,
        "--steps",
        "2",
        "--mode",
        "linear",
        "--out",
        s(&out),
    ]));
    let text = std::fs::read_to_string(out.join("linear/trace.csv")).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(!out.join("np").exists());
    assert!(!out.join("report.json").exists());
}

#[test]
fn both_mode_report_has_every_statistic_for_each_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let f = fixture();
    ok(&ridgepath(&[
        "fit",
        "--input",
        s(&f),
        "--y",
        "AACRmort",
        "--x",
        X,
        "--out",
        s(&out),
    ]));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    for model in ["linear", "np"] {
        let m = &report[model];
        for key in ["formula", "residual_mean_square", "residual_std_error"] {
            assert!(!m[key].is_null(), "{model}.{key}");
        }
        for key in [
            "ols_beta",
            "ml_beta",
            "ols_relative_risk",
            "ml_relative_risk",
            "dmse",
        ] {
            assert_eq!(m[key].as_array().map(Vec::len), Some(6), "{model}.{key}");
        }
    }
    let wins = ["np_wins", "linear_wins", "ties"]
        .iter()
        .map(|k| report[k].as_u64().unwrap())
        .sum::<u64>();
    assert_eq!(wins, 6);

    let pairs = std::fs::read_to_string(out.join("pairs.csv")).unwrap();
    let blocks: std::collections::BTreeSet<&str> = pairs
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(blocks.len(), 10);
    // every path in the manifest is relative and exists
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    for f in manifest["files"].as_array().unwrap() {
        let rel = Path::new(f.as_str().unwrap());
        assert!(rel.is_relative() && out.join(rel).is_file());
    }
}

/// Columns of the 8-run two-level design: exactly orthogonal and centered.
fn orthogonal_csv(path: &Path) -> [f64; 3] {
    let a = [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0];
    let b = [1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0];
    let c = [1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0];
    let y = [3.1, 0.4, 2.2, -0.9, 1.7, 0.3, 0.8, -1.5];
    let mut text = String::from("y,a,b,c\n");
    for i in 0..8 {
        text.push_str(&format!(
            "{},{},{},{}\n",
            y[i],
            2.0 * a[i] + 5.0,
            b[i],
            0.1 * c[i]
        ));
    }
    std::fs::write(path, text).unwrap();

    // hand calculation: standardized x are orthogonal with X'X = (n-1) I, so
    // each canonical coefficient is the correlation r_j with y
    let n = 8.0;
    let ym = y.iter().sum::<f64>() / n;
    let syy: f64 = y.iter().map(|v| (v - ym).powi(2)).sum();
    let r: Vec<f64> = [a, b, c]
        .iter()
        .map(|x| x.iter().zip(&y).map(|(u, v)| u * (v - ym)).sum::<f64>() / (8.0 * syy).sqrt())
        .collect();
    let sigma2 = (n - 1.0) * (1.0 - r.iter().map(|v| v * v).sum::<f64>()) / (n - 4.0);
    let d = |rj: f64| rj * rj / (rj * rj + sigma2 / (n - 1.0));
    // optimally shrunken betas, returned in column order
    [0, 1, 2].map(|j| d(r[j]) * r[j])
}

#[test]
fn orthogonal_design_matches_hand_calculation() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("orth.csv");
    let ml_expected = orthogonal_csv(&csv);
    let out = dir.path().join("o");
    ok(&ridgepath(&[
        "fit",
        "--input",
        s(&csv),
        "--y",
        "y",
        "--x",
        "a,b,c",
        "--mode",
        "linear",
        "--out",
        s(&out),
    ]));
    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("linear/model.json")).unwrap())
            .unwrap();
    let ml: Vec<f64> = model["summary"]["ml_beta"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for (got, want) in ml.iter().zip(ml_expected) {
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
}

#[test]
fn corr_writes_both_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let f = fixture();
    let run = ridgepath(&[
        "corr",
        "--input",
        s(&f),
        "--y",
        "AACRmort",
        "--x",
        X,
        "--out",
        s(&out),
    ]);
    ok(&run);
    assert!(String::from_utf8_lossy(&run.stdout).contains("PREMdeath"));
    for stem in ["corr_x", "corr_np"] {
        assert!(out.join(format!("{stem}.txt")).is_file());
        assert_eq!(header(&out.join(format!("{stem}.csv"))).len(), 8);
    }

    let single = dir.path().join("one");
    ok(&ridgepath(&[
        "corr",
        "--input",
        s(&f),
        "--y",
        "AACRmort",
        "--x",
        "ASmoke",
        "--out",
        s(&single),
    ]));
    let text = std::fs::read_to_string(single.join("corr_x.csv")).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert_eq!(header(&single.join("corr_x.csv")).len(), 3);
}

#[test]
fn flags_override_config_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("o");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "input": fixture(),
            "y": "AACRmort",
            "x": ["PREMdeath", "ASmoke"],
            "steps": 7,
            "mode": "linear",
            "out": out,
        })
        .to_string(),
    )
    .unwrap();
    ok(&ridgepath(&["fit", "--config", s(&cfg)]));
    let rows = |o: &Path| {
        std::fs::read_to_string(o.join("linear/trace.csv"))
            .unwrap()
            .lines()
            .count()
            - 1
    };
    let from_file = rows(&out);
    assert!(from_file == 7 || from_file == 8);

    let out2 = dir.path().join("o2");
    ok(&ridgepath(&[
        "fit",
        "--config",
        s(&cfg),
        "--steps",
        "3",
        "--out",
        s(&out2),
    ]));
    assert!(matches!(rows(&out2), 3 | 4));
    assert_eq!(header(&out2.join("linear/trace.csv")).len(), 7);
}

#[test]
fn fetch_instructions_lists_the_columns() {
    let out = ridgepath(&["fetch-instructions"]);
    ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    for col in [
        "AACRmort",
        "Avoc",
        "Bvoc",
        "PREMdeath",
        "ASmoke",
        "ChildPOV",
        "IncomIEQ",
        "dryad",
    ] {
        assert!(text.contains(col), "{col}");
    }
}
