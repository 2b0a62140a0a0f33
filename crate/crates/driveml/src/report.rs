//! Single-file HTML report with inline SVG charts.
//!
//! The output is a pure function of the run output and the `generated_at`
//! text, which appears only in the last line.

use std::fmt::Write;

use driveml_core::mar::MarVerdict;
use driveml_core::prep::RejectReason;
use driveml_core::ColumnKind;

use crate::run::RunOutput;
use crate::svg::{self, escape, Axes, Series};

/// Column headers of the model comparison table.
pub const METRIC_HEADERS: [&str; 9] = [
    "Model",
    "Fitting time (secs)",
    "Scoring time (secs)",
    "Train AUC",
    "Test AUC",
    "Accuracy",
    "Precision",
    "Recall",
    "F1_score",
];

const STYLE: &str = "body{font-family:sans-serif;max-width:1060px;margin:24px auto;color:#222}\
table{border-collapse:collapse;margin:8px 0 16px}th,td{border:1px solid #ccc;padding:3px 8px;font-size:13px}\
th{background:#f0f0f0}td.n{text-align:right}.charts{display:flex;flex-wrap:wrap;gap:8px}\
pre{background:#f7f7f7;padding:8px;font-size:12px;overflow-x:auto}footer{margin-top:24px;color:#777;font-size:12px}";

fn f3(v: f64) -> String {
    format!("{v:.3}")
}

fn kind_name(k: ColumnKind) -> &'static str {
    match k {
        ColumnKind::Numeric => "numeric",
        ColumnKind::Categorical => "categorical",
        ColumnKind::Date => "date",
        ColumnKind::Boolean => "boolean",
    }
}

fn table_open(out: &mut String, headers: &[&str]) {
    out.push_str("<table><tr>");
    for h in headers {
        let _ = write!(out, "<th>{}</th>", escape(h));
    }
    out.push_str("</tr>\n");
}

fn row(out: &mut String, cells: &[String], numeric_from: usize) {
    out.push_str("<tr>");
    for (k, c) in cells.iter().enumerate() {
        if k >= numeric_from {
            let _ = write!(out, "<td class=\"n\">{}</td>", escape(c));
        } else {
            let _ = write!(out, "<td>{}</td>", escape(c));
        }
    }
    out.push_str("</tr>\n");
}

fn reason_text(r: &RejectReason) -> String {
    match r {
        RejectReason::AllMissing => String::from("every training value missing"),
        RejectReason::HighCardinality { levels } => format!("high cardinality ({levels} levels)"),
        RejectReason::ZeroVariance => String::from("zero variance"),
        RejectReason::HighCorrelation { partner, r } => format!("correlation {r:.3} with {partner}"),
        RejectReason::LowAuc { auc } => format!("univariate AUC {auc:.3}"),
    }
}

fn section_summary(out: &mut String, run: &RunOutput) {
    out.push_str("<h2>Data</h2>\n");
    let _ = writeln!(
        out,
        "<p>{} input rows, {} duplicates removed; {} training and {} test rows. Positive class: <code>{}</code>.</p>",
        run.input_rows,
        run.duplicates_removed,
        run.train_rows,
        run.test_rows,
        escape(&run.positive_label)
    );
    table_open(
        out,
        &[
            "Column",
            "Kind",
            "N",
            "Missing",
            "Missing %",
            "Mean",
            "SD",
            "Min",
            "Q1",
            "Median",
            "Q3",
            "Max",
            "Levels",
            "Top levels",
        ],
    );
    for c in &run.summary.columns {
        let mut cells = vec![
            c.name.clone(),
            kind_name(c.kind).to_string(),
            c.n.to_string(),
            c.missing.to_string(),
            format!("{:.1}", 100.0 * c.missing_fraction),
        ];
        match &c.numeric {
            Some(s) => cells.extend([s.mean, s.sd, s.min, s.q1, s.median, s.q3, s.max].map(f3)),
            None => cells.extend(std::iter::repeat_n(String::new(), 7)),
        }
        match &c.levels {
            Some(l) => {
                cells.push(l.levels.to_string());
                cells.push(
                    l.top
                        .iter()
                        .map(|(k, n)| format!("{k} ({n})"))
                        .collect::<Vec<_>>()
                        .join(", "),
                );
            }
            None => cells.extend([String::new(), String::new()]),
        }
        row(out, &cells, 2);
    }
    out.push_str("</table>\n");
}

fn section_prep(out: &mut String, run: &RunOutput) {
    let p = &run.pipeline;
    out.push_str("<h2>Data preparation</h2>\n");
    let _ = writeln!(
        out,
        "<p>{} source columns, {} engineered candidates, {} selected features; {} outlier flags, {} date columns expanded, {} interactions, {} encoded categoricals.</p>",
        p.sources.len(),
        p.candidates.len(),
        p.selected.len(),
        p.outliers.bounds.len(),
        p.dates.len(),
        p.interactions.len(),
        p.encodings.len()
    );
    let _ = writeln!(out, "<p>Selected: {}</p>", escape(&p.selected.join(", ")));
    if p.rejections.is_empty() {
        out.push_str("<p>No features rejected.</p>\n");
    } else {
        table_open(out, &["Feature", "Reason"]);
        for r in &p.rejections {
            row(out, &[r.feature.clone(), reason_text(&r.reason)], 2);
        }
        out.push_str("</table>\n");
    }
}

fn section_mar(out: &mut String, run: &RunOutput) {
    out.push_str("<h2>Missing-at-random scan</h2>\n");
    let report = run.pipeline.mar.as_ref().filter(|r| !r.is_empty());
    let Some(report) = report else {
        out.push_str("<p>MAR scan: no features scanned.</p>\n");
        return;
    };
    let _ = writeln!(
        out,
        "<p>Indicators are kept when the auxiliary AUC reaches {:.3}.</p>",
        report.auc_threshold
    );
    table_open(
        out,
        &["Feature", "Missing", "Auxiliary AUC", "Verdict", "Indicator", "Note"],
    );
    for f in &report.findings {
        let verdict = match f.verdict {
            MarVerdict::Retained => "retained",
            MarVerdict::Dropped => "dropped",
            MarVerdict::Skipped => "skipped",
        };
        row(
            out,
            &[
                f.feature.clone(),
                f.missing.to_string(),
                f.auc.map(f3).unwrap_or_default(),
                verdict.into(),
                f.indicator.clone().unwrap_or_default(),
                f.note.clone().unwrap_or_default(),
            ],
            1,
        );
    }
    out.push_str("</table>\n");
}

fn section_models(out: &mut String, run: &RunOutput) {
    out.push_str("<h2>Models</h2>\n");
    let mut ranked: Vec<_> = run.results.iter().filter(|r| r.evaluation.is_some()).collect();
    ranked.sort_by(|a, b| b.test_auc().unwrap_or(0.0).total_cmp(&a.test_auc().unwrap_or(0.0)));
    table_open(out, &METRIC_HEADERS);
    for r in &ranked {
        let Some(e) = &r.evaluation else { continue };
        row(
            out,
            &[
                r.model_id.to_string(),
                f3(r.fit_time_s),
                f3(e.score_time_s),
                f3(r.train_auc),
                f3(e.test_auc),
                f3(e.confusion.accuracy),
                f3(e.confusion.precision),
                f3(e.confusion.recall),
                f3(e.confusion.f1),
            ],
            1,
        );
    }
    out.push_str("</table>\n");
    let _ = writeln!(
        out,
        "<p>Best model by test AUC: <strong>{}</strong>. Accuracy, precision, recall and F1 use a probability cut of {}.</p>",
        run.best, run.config.threshold
    );
    for f in &run.failures {
        let _ = writeln!(out, "<p>{} failed: {}</p>", f.model_id, escape(&f.error));
    }
    out.push_str("<h3>Test ROC curves</h3>\n<div class=\"charts\">\n");
    for r in &ranked {
        let Some(e) = &r.evaluation else { continue };
        let series = [Series {
            name: r.model_id.as_str(),
            points: e.roc.points.iter().map(|p| (p.fpr, p.tpr)).collect(),
        }];
        let title = format!("{} test ROC (AUC {:.3})", r.model_id, e.test_auc);
        let axes = Axes {
            x: (0.0, 1.0),
            y: (0.0, 1.0),
        };
        out.push_str(&svg::line_chart(
            &title,
            &series,
            axes,
            "False positive rate",
            "True positive rate",
            Some(((0.0, 0.0), (1.0, 1.0))),
        ));
        out.push('\n');
    }
    out.push_str("</div>\n");

    out.push_str("<h3>Cumulative lift</h3>\n");
    let series: Vec<Series> = ranked
        .iter()
        .filter_map(|r| {
            let e = r.evaluation.as_ref()?;
            let n = e.lift.bins.len() as f64;
            Some(Series {
                name: r.model_id.as_str(),
                points: e
                    .lift
                    .bins
                    .iter()
                    .map(|b| (b.bin as f64 / n, b.cumulative_lift))
                    .collect(),
            })
        })
        .collect();
    let mut axes = Axes::fit(&series);
    axes.x = (0.0, 1.0);
    axes.y = (0.0, axes.y.1.max(1.0));
    out.push_str(&svg::line_chart(
        "Cumulative lift by population share",
        &series,
        axes,
        "Share of test rows (ranked by score)",
        "Cumulative lift",
        Some(((0.0, 1.0), (1.0, 1.0))),
    ));
    out.push('\n');
}

fn section_best(out: &mut String, run: &RunOutput) {
    let best = run.best_result();
    let _ = writeln!(out, "<h2>Best model: {}</h2>", best.model_id);
    let hp: Vec<String> = best.chosen.iter().map(|(k, v)| format!("{k} = {v}")).collect();
    let _ = writeln!(
        out,
        "<p>Chosen hyperparameters: {}. Mean cross-validated AUC {:.3} over {} tuning rows.</p>",
        if hp.is_empty() {
            String::from("none")
        } else {
            escape(&hp.join(", "))
        },
        best.candidates[best.chosen_index].mean_auc,
        best.tuning_rows
    );
    out.push_str(&svg::bar_chart(
        "Variable importance",
        &run.importance,
        "Normalised importance",
    ));
    out.push('\n');

    if let Some(e) = &best.evaluation {
        out.push_str("<h3>Lift table</h3>\n");
        table_open(
            out,
            &[
                "Bin",
                "N",
                "Events",
                "Response rate",
                "Cumulative events",
                "Cumulative capture",
                "Cumulative lift",
            ],
        );
        for b in &e.lift.bins {
            row(
                out,
                &[
                    b.bin.to_string(),
                    b.n.to_string(),
                    b.events.to_string(),
                    f3(b.response_rate),
                    b.cumulative_events.to_string(),
                    f3(b.cumulative_capture),
                    f3(b.cumulative_lift),
                ],
                0,
            );
        }
        out.push_str("</table>\n");
    }

    out.push_str("<h3>Partial dependence</h3>\n<div class=\"charts\">\n");
    for c in &run.pdps {
        let series = [Series {
            name: &c.feature,
            points: c.grid.iter().copied().zip(c.mean_score.iter().copied()).collect(),
        }];
        let mut axes = Axes::fit(&series);
        axes.y = (0.0, 1.0);
        out.push_str(&svg::line_chart(
            &format!("Partial dependence: {}", c.feature),
            &series,
            axes,
            &c.feature,
            "Mean predicted probability",
            None,
        ));
        out.push('\n');
    }
    out.push_str("</div>\n");
}

pub fn render_html(run: &RunOutput, generated_at: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>DriveML report: {}</title>\n<style>{STYLE}</style>\n</head>\n<body>",
        escape(&run.config.target)
    );
    let _ = writeln!(
        out,
        "<h1>Binary classification report: {}</h1>",
        escape(&run.config.target)
    );
    section_summary(&mut out, run);
    section_prep(&mut out, run);
    section_mar(&mut out, run);
    section_models(&mut out, run);
    section_best(&mut out, run);
    out.push_str("<h2>Run configuration</h2>\n<pre>");
    out.push_str(&escape(&serde_json::to_string_pretty(&run.config).unwrap_or_default()));
    out.push_str("</pre>\n");
    let _ = writeln!(out, "<footer>Generated {}</footer>", escape(generated_at));
    out.push_str("</body>\n</html>\n");
    out
}
