use std::path::Path;

use driveml::config::{validate_config, RunArgs};
use driveml::report::{render_html, METRIC_HEADERS};
use driveml::run::{run, RunOutput};
use quick_xml::events::Event;
use quick_xml::Reader;

fn heart_run() -> RunOutput {
    let args = RunArgs {
        input: Some(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/heart.csv")),
        target: Some("target".into()),
        tune_iters: Some(2),
        no_timings: true,
        ..RunArgs::default()
    };
    run(&validate_config(&args, None).unwrap()).unwrap()
}

fn assert_well_formed(svg: &str) {
    let mut reader = Reader::from_str(svg);
    let mut depth = 0i32;
    loop {
        match reader.read_event() {
            Ok(Event::Start(_)) => depth += 1,
            Ok(Event::End(_)) => depth -= 1,
            Ok(Event::Eof) => break,
            Ok(_) => {}
            Err(e) => panic!("malformed svg at {}: {e}\n{svg}", reader.buffer_position()),
        }
    }
    assert_eq!(depth, 0);
}

#[test]
fn report_is_self_contained_and_reproducible() {
    let out = heart_run();
    let stamp = "2026-01-01T00:00:00Z";
    let html = render_html(&out, stamp);
    assert_eq!(html, render_html(&heart_run(), stamp));

    let header: String = METRIC_HEADERS.iter().map(|h| format!("<th>{h}</th>")).collect();
    let start = html.find(&format!("<table><tr>{header}</tr>")).expect("metrics table");
    let end = start + html[start..].find("</table>").unwrap();
    assert_eq!(html[start..end].matches("<tr>").count(), 1 + 6);

    let mut svgs = 0;
    let mut rest = html.as_str();
    while let Some(i) = rest.find("<svg") {
        let j = i + rest[i..].find("</svg>").unwrap() + "</svg>".len();
        assert_well_formed(&rest[i..j]);
        svgs += 1;
        rest = &rest[j..];
    }
    // One ROC per model, the lift chart, importance and at least one PDP.
    assert!(svgs >= 6 + 3, "{svgs} charts");

    assert!(!html.contains("src=") && !html.contains("href=") && !html.contains("<script"));
    let lines: Vec<&str> = html.lines().collect();
    assert_eq!(lines[lines.len() - 3], format!("<footer>Generated {stamp}</footer>"));
    assert_eq!(&lines[lines.len() - 2..], ["</body>", "</html>"]);
    for h in ["Missing-at-random scan", "Data preparation", "Best model"] {
        assert!(html.contains(h), "{h}");
    }
}
