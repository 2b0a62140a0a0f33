//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use driveml::config::{validate_config, RunArgs};
use driveml::core::learners::logistic::LogisticObjective;
use driveml::core::mar::{scan, MarConfig, MarVerdict};
use driveml::core::metrics::{auc, lift_table, roc_curve};
use driveml::core::prep::{fit_prep, PrepConfig};
use driveml::core::rng::{self, Stream};
use driveml::core::stats::median;
use driveml::core::table::{infer_schema, split_train_test, MissingTokens, SchemaOptions};
use driveml::core::{prep, Column, Matrix, ModelId, Table};
use driveml::io;
use driveml::run::run;
use rand::Rng;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn stream(label: &str, k: u64) -> Stream {
    rng::stream(k, &[rng::tag(label)])
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn heart_args() -> RunArgs {
    RunArgs {
        input: Some(data("heart.csv")),
        target: Some("target".into()),
        ..RunArgs::default()
    }
}

fn split_fidelity() -> Outcome {
    let start = Instant::now();
    let raw = io::read_csv(&data("heart.csv"), &MissingTokens::default()).unwrap();
    let t = prep::clean(&raw).unwrap();
    let schema = infer_schema(&t, &SchemaOptions::new("target")).unwrap();
    let (train, test) = split_train_test(&t, &schema, 0.2, 1991).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = raw.n_rows() == 303 && raw.n_cols() == 14 && train.n_rows() == 243 && test.n_rows() == 60 && secs < 1.0;
    outcome(
        pass,
        format!(
            "heart split {} train / {} test in {secs:.3}s (need 243/60, < 1s)",
            train.n_rows(),
            test.n_rows()
        ),
    )
}

fn published(model: ModelId) -> f64 {
    match model {
        ModelId::Ranger => 0.953,
        ModelId::Glmnet => 0.941,
        ModelId::Logreg => 0.940,
        ModelId::RandomForest => 0.937,
        ModelId::Xgboost => 0.930,
        ModelId::Rpart => 0.859,
    }
}

fn heart_quality() -> Outcome {
    let start = Instant::now();
    let out = run(&validate_config(&heart_args(), None).unwrap()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let mut pass = out.results.len() == 6 && out.failures.is_empty() && secs < 60.0;
    let mut parts = Vec::new();
    for r in &out.results {
        let a = r.test_auc().unwrap_or(0.0);
        let within = (a - published(r.model_id)).abs() <= 0.08;
        pass &= within;
        parts.push(format!("{}={a:.3}{}", r.model_id, if within { "" } else { "(!)" }));
    }
    let best = out.best_result().test_auc().unwrap_or(0.0);
    let rpart = out
        .results
        .iter()
        .find(|r| r.model_id == ModelId::Rpart)
        .and_then(|r| r.test_auc())
        .unwrap_or(0.0);
    pass &= best >= 0.88 && rpart >= 0.78;
    outcome(
        pass,
        format!(
            "heart best {} {best:.3} (need >= 0.88), rpart {rpart:.3} (need >= 0.78), {} (need each within 0.08 of published; (!) = outside), {secs:.1}s (need < 60s)",
            out.best,
            parts.join(" ")
        ),
    )
}

fn adult() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_driveml"))
        .args(["run", "--input"])
        .arg(data("adult_train.csv"))
        .arg("--test-input")
        .arg(data("adult_test.csv"))
        .args(["--target", "income", "--missing-tokens", ",NA,?", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    let secs = start.elapsed().as_secs_f64();
    if !status.status.success() {
        return outcome(
            false,
            format!("adult run failed: {}", String::from_utf8_lossy(&status.stderr)),
        );
    }
    let metrics: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("metrics.json")).unwrap()).unwrap();
    let xgb = metrics["models"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["model_id"] == "xgboost")
        .and_then(|m| m["test_auc"].as_f64())
        .unwrap_or(0.0);
    outcome(
        xgb >= 0.90 && secs < 600.0,
        format!("adult 32561/16281, all six models: xgboost test AUC {xgb:.4} (need >= 0.90), {secs:.0}s end to end (need < 600s)"),
    )
}

fn pairwise_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (&si, _) in scores.iter().zip(labels).filter(|(_, &l)| l == 1) {
        for (&sj, _) in scores.iter().zip(labels).filter(|(_, &l)| l == 0) {
            pairs += 1.0;
            wins += if si > sj {
                1.0
            } else if si == sj {
                0.5
            } else {
                0.0
            };
        }
    }
    wins / pairs
}

fn fixture(r: &mut Stream, n: usize) -> (Vec<f64>, Vec<u8>) {
    loop {
        let levels = r.random_range(1..=n.max(2));
        let scores: Vec<f64> = (0..n)
            .map(|_| r.random_range(0..levels) as f64 / levels as f64)
            .collect();
        let labels: Vec<u8> = (0..n).map(|_| u8::from(r.random::<bool>())).collect();
        if labels.contains(&0) && labels.contains(&1) {
            return (scores, labels);
        }
    }
}

fn auc_oracle() -> Outcome {
    let mut r = stream("auc", 0);
    let (mut worst_rank, mut worst_trap) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let n = r.random_range(2..=50);
        let (s, l) = fixture(&mut r, n);
        let a = auc(&s, &l).unwrap();
        worst_rank = worst_rank.max((a - pairwise_auc(&s, &l)).abs());
        worst_trap = worst_trap.max((roc_curve(&s, &l).unwrap().trapezoid_area() - a).abs());
    }
    outcome(
        worst_rank <= 1e-12 && worst_trap <= 1e-12,
        format!("1000 tied fixtures: max |rank - pairwise| {worst_rank:.1e}, max |trapezoid - rank| {worst_trap:.1e} (need <= 1e-12)"),
    )
}

fn gradient() -> Outcome {
    let mut worst = 0.0f64;
    for (f, &(n, p, lambda)) in [(30, 2, 0.0), (60, 4, 0.0), (90, 6, 0.05), (150, 3, 0.5), (200, 8, 0.0)]
        .iter()
        .enumerate()
    {
        let mut r = stream("grad", f as u64);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| r.random_range(-3.0..3.0)).collect())
            .collect();
        let y: Vec<u8> = (0..n).map(|_| u8::from(r.random::<bool>())).collect();
        let (obj, _, _) = LogisticObjective::new(&Matrix::from_rows(&rows).unwrap(), &y, lambda);
        for _ in 0..10 {
            let w: Vec<f64> = (0..obj.dim()).map(|_| r.random_range(-2.0..2.0)).collect();
            let g = obj.gradient(&w);
            for k in 0..obj.dim() {
                // Five-point central stencil: O(h^4) truncation, so a wide h
                // keeps rounding in the loss from swamping small components.
                let h = 1e-3;
                let at = |d: f64| {
                    let mut v = w.clone();
                    v[k] += d;
                    obj.loss(&v)
                };
                let fd = (at(-2.0 * h) - 8.0 * at(-h) + 8.0 * at(h) - at(2.0 * h)) / (12.0 * h);
                worst = worst.max((g[k] - fd).abs() / g[k].abs().max(fd.abs()).max(1e-8));
            }
        }
    }
    outcome(
        worst < 1e-5,
        format!("5 fixtures x 10 points: max relative error {worst:.2e} (need < 1e-5)"),
    )
}

fn lift() -> Outcome {
    let mut r = stream("lift", 0);
    let mut failures = 0;
    let mut checked = 0;
    for _ in 0..500 {
        let n = r.random_range(1..400);
        let scores: Vec<f64> = (0..n)
            .map(|_| {
                if r.random::<bool>() {
                    r.random()
                } else {
                    f64::from(r.random_range(0..4u8))
                }
            })
            .collect();
        let mut labels: Vec<u8> = (0..n).map(|_| u8::from(r.random::<f64>() < 0.3)).collect();
        labels[0] = 1;
        let positives = labels.iter().filter(|&&l| l == 1).count();
        for groups in [2, 10, 50] {
            let t = lift_table(&scores, &labels, groups).unwrap();
            let sizes: Vec<usize> = t.bins.iter().map(|b| b.n).collect();
            let ok = sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1
                && t.bins.iter().map(|b| b.events).sum::<usize>() == positives
                && (t.bins.last().unwrap().cumulative_lift - 1.0).abs() <= 1e-9;
            failures += usize::from(!ok);
            checked += 1;
        }
    }
    outcome(
        failures == 0,
        format!("{checked} tables over groups 2/10/50: {failures} violate bin balance, event total or final lift 1"),
    )
}

fn mar_table(seed: u64, informative: bool) -> Table {
    let n = 2000;
    let mut r = stream("mar", seed);
    let x1: Vec<f64> = (0..n).map(|_| r.random()).collect();
    let x2: Vec<f64> = (0..n).map(|_| r.random()).collect();
    let x3: Vec<f64> = (0..n).map(|_| r.random()).collect();
    let m = median(&x2).unwrap();
    let x1 = x1
        .iter()
        .zip(&x2)
        .map(|(&v, &z)| (!if informative { z > m } else { r.random::<bool>() }).then_some(v))
        .collect();
    Table::new(
        "mar",
        vec![
            Column::numeric("x1", x1),
            Column::from_f64("x2", x2),
            Column::from_f64("x3", x3),
        ],
    )
    .unwrap()
}

fn mar_power() -> Outcome {
    let count = |informative: bool, want: MarVerdict| {
        (0..20u64)
            .filter(|&s| {
                let f = &scan(
                    &mar_table(s, informative),
                    &MarConfig {
                        seed: s,
                        ..MarConfig::default()
                    },
                )
                .unwrap()
                .findings[0];
                f.verdict == want && (!informative || f.auc.unwrap_or(0.0) >= 0.8)
            })
            .count()
    };
    let (retained, dropped) = (count(true, MarVerdict::Retained), count(false, MarVerdict::Dropped));
    outcome(
        retained >= 18 && dropped >= 18,
        format!("n=2000: informative missingness retained {retained}/20, random missingness dropped {dropped}/20 (need >= 18 each)"),
    )
}

fn learnability() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("additive.csv");
    let mut r = stream("additive", 0);
    let mut csv = String::from("x1,x2,n1,n2,n3,n4,n5,y\n");
    for _ in 0..2000 {
        let v: Vec<f64> = (0..7).map(|_| r.random()).collect();
        let cells: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
        csv.push_str(&format!("{},{}\n", cells.join(","), u8::from(v[0] + v[1] > 1.0)));
    }
    std::fs::write(&path, csv).unwrap();
    let args = RunArgs {
        input: Some(path),
        target: Some("y".into()),
        ..RunArgs::default()
    };
    let out = run(&validate_config(&args, None).unwrap()).unwrap();
    let best = out.best_result();
    let a = best.test_auc().unwrap_or(0.0);
    let mut ranked = best.model.importance();
    ranked.sort_by(|x, y| y.1.total_cmp(&x.1));
    let top: Vec<&str> = ranked.iter().take(3).map(|(n, _)| n.as_str()).collect();
    let pass = a >= 0.95 && top.contains(&"x1") && top.contains(&"x2");
    outcome(
        pass,
        format!(
            "y = 1[x1 + x2 > 1] + 5 noise, n=2000: best {} test AUC {a:.4} (need >= 0.95), top 3 {top:?} (need x1, x2)",
            out.best
        ),
    )
}

fn pipeline_json(rows: &[Vec<String>], header: &[String]) -> String {
    let t = prep::clean(&Table::from_text("heart", header, rows, &MissingTokens::default()).unwrap()).unwrap();
    let schema = infer_schema(&t, &SchemaOptions::new("target")).unwrap();
    let (train, _) = split_train_test(&t, &schema, 0.2, 1991).unwrap();
    let cfg = PrepConfig {
        auto_mar: true,
        ..PrepConfig::default()
    };
    serde_json::to_string(&fit_prep(&train, &schema, &cfg).unwrap()).unwrap()
}

fn leakage() -> Outcome {
    let mut reader = csv::Reader::from_path(data("heart.csv")).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    let rows: Vec<Vec<String>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    let target = header.iter().position(|h| h == "target").unwrap();

    let ids: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| vec![i.to_string(), r[target].clone()])
        .collect();
    let t = Table::from_text(
        "ids",
        &["id".to_string(), "target".to_string()],
        &ids,
        &MissingTokens::default(),
    )
    .unwrap();
    let schema = infer_schema(&t, &SchemaOptions::new("target")).unwrap();
    let (_, test) = split_train_test(&t, &schema, 0.2, 1991).unwrap();
    let held: Vec<usize> = (0..test.n_rows())
        .map(|i| test.columns()[0].text(i).unwrap().parse().unwrap())
        .collect();

    let before = pipeline_json(&rows, &header);
    let mut r = stream("leak", 0);
    let junk = ["", "NA", "-1e6", "999999", "zzz", "2020-01-01", "yes", "0"];
    let trials = 40;
    let mut changed = 0;
    for _ in 0..trials {
        let mut mutated = rows.clone();
        let row = held[r.random_range(0..held.len())];
        let col = loop {
            let c = r.random_range(0..header.len());
            if c != target {
                break c;
            }
        };
        mutated[row][col] = junk[r.random_range(0..junk.len())].to_string();
        changed += usize::from(pipeline_json(&mutated, &header) != before);
    }
    outcome(
        changed == 0,
        format!("{trials} single-cell test mutations: {changed} changed the serialized pipeline (need 0)"),
    )
}

fn determinism() -> Outcome {
    const FILES: [&str; 5] = [
        "metrics.json",
        "pipeline.json",
        "models.json",
        "evaluation.json",
        "report.html",
    ];
    // Same config means the same output directory too, since it is echoed
    // in the report; the first run's files are read before the second run.
    let dir = tempfile::tempdir().unwrap();
    let mut runs: Vec<Vec<String>> = Vec::new();
    for _ in 0..2 {
        let o = Command::new(env!("CARGO_BIN_EXE_driveml"))
            .args(["run", "--input"])
            .arg(data("heart.csv"))
            .args(["--target", "target", "--no-timings", "--out-dir"])
            .arg(dir.path())
            .output()
            .unwrap();
        if !o.status.success() {
            return outcome(false, format!("run failed: {}", String::from_utf8_lossy(&o.stderr)));
        }
        runs.push(
            FILES
                .iter()
                .map(|f| std::fs::read_to_string(dir.path().join(f)).unwrap())
                .collect(),
        );
        for f in FILES {
            std::fs::remove_file(dir.path().join(f)).unwrap();
        }
    }
    let json_same = runs[0][..4] == runs[1][..4];
    let strip = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with("<footer>"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let html_same = strip(&runs[0][4]) == strip(&runs[1][4]);
    outcome(
        json_same && html_same,
        format!("two heart runs, same config and seed, --no-timings: JSON identical {json_same}, HTML identical except footer {html_same}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("heart split fidelity", split_fidelity),
        ("heart model quality", heart_quality),
        ("adult benchmark", adult),
        ("AUC oracle equivalence", auc_oracle),
        ("gradient correctness", gradient),
        ("lift invariants", lift),
        ("MAR detection power", mar_power),
        ("synthetic learnability", learnability),
        ("leakage", leakage),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "{} {:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
