mod common;

use driveml_core::prep::{fit_prep, PrepConfig};
use driveml_core::table::{infer_schema, split_train_test, MissingTokens, SchemaOptions};
use driveml_core::Table;
use proptest::prelude::*;
use rand::Rng;

const HEADER: [&str; 6] = ["Age", "Income", "City", "Joined", "Flag", "y"];

/// Mixed-type rows with missing cells, dates and a categorical column.
fn rows(n: usize, seed: u64) -> Vec<Vec<String>> {
    let mut r = common::stream(seed);
    (0..n)
        .map(|_| {
            let age: f64 = r.random_range(18.0..80.0);
            let income: f64 = r.random_range(0.0..100.0) + age;
            let city = ["north", "south", "east", "west"][r.random_range(0..4)];
            let y = u8::from(age / 80.0 + r.random::<f64>() * 0.8 > 0.9);
            let missing = |r: &mut driveml_core::rng::Stream| r.random::<f64>() < 0.1;
            vec![
                format!("{age:.1}"),
                if missing(&mut r) {
                    "NA".into()
                } else {
                    format!("{income:.2}")
                },
                if missing(&mut r) { String::new() } else { city.into() },
                format!(
                    "20{:02}-{:02}-{:02}",
                    r.random_range(10..24),
                    r.random_range(1..13),
                    r.random_range(1..29)
                ),
                ["yes", "no"][r.random_range(0..2)].into(),
                y.to_string(),
            ]
        })
        .collect()
}

fn table(rows: &[Vec<String>]) -> Table {
    let header: Vec<String> = HEADER.iter().map(|s| s.to_string()).collect();
    Table::from_text("t", &header, rows, &MissingTokens::default()).unwrap()
}

fn config() -> PrepConfig {
    PrepConfig {
        auto_mar: true,
        aucv: 0.0001,
        ..PrepConfig::default()
    }
}

fn fitted_json(rows: &[Vec<String>]) -> String {
    let t = table(rows);
    let schema = infer_schema(&t, &SchemaOptions::new("y")).unwrap();
    let (train, _) = split_train_test(&t, &schema, 0.25, 17).unwrap();
    serde_json::to_string(&fit_prep(&train, &schema, &config()).unwrap()).unwrap()
}

fn test_rows(rows: &[Vec<String>]) -> Vec<usize> {
    let mut tagged = rows.to_vec();
    for (i, r) in tagged.iter_mut().enumerate() {
        r[0] = format!("{i}");
    }
    let t = table(&tagged);
    let schema = infer_schema(&t, &SchemaOptions::new("y")).unwrap();
    let (_, test) = split_train_test(&t, &schema, 0.25, 17).unwrap();
    (0..test.n_rows())
        .map(|i| test.columns()[0].text(i).unwrap().parse().unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn test_cells_do_not_reach_the_pipeline(seed in 0u64..1000, pick in any::<prop::sample::Index>(), col in 0usize..5, junk in "[a-z0-9.-]{0,6}") {
        let base = rows(200, seed);
        let before = fitted_json(&base);
        let held = test_rows(&base);
        let row = held[pick.index(held.len())];
        let mut mutated = base.clone();
        mutated[row][col] = junk;
        prop_assert_eq!(before, fitted_json(&mutated));
    }
}

#[test]
fn prepared_tables_are_complete_and_rowwise() {
    let t = table(&rows(300, 3));
    let schema = infer_schema(&t, &SchemaOptions::new("y")).unwrap();
    let (train, test) = split_train_test(&t, &schema, 0.2, 5).unwrap();
    let pipeline = fit_prep(&train, &schema, &config()).unwrap();
    let out = pipeline.apply(&test).unwrap();

    let mut expected: Vec<&str> = pipeline.selected.iter().map(String::as_str).collect();
    expected.push(pipeline.target.as_str());
    assert_eq!(out.names(), expected);
    assert!(pipeline.selected.iter().all(|s| pipeline.candidates.contains(s)));
    assert!(out.columns().iter().all(|c| c.missing_count() == 0));

    for i in [0, 7, test.n_rows() - 1] {
        let single = pipeline.apply(&test.take_rows(&[i])).unwrap();
        assert_eq!(single, out.take_rows(&[i]));
    }
    assert_eq!(pipeline.apply(&test).unwrap(), out);

    let json = serde_json::to_string(&pipeline).unwrap();
    let back: driveml_core::PrepPipeline = serde_json::from_str(&json).unwrap();
    assert_eq!(back.apply(&test).unwrap(), out);
}

#[test]
fn names_are_cleaned_and_categoricals_expand() {
    let t = table(&rows(300, 4));
    let schema = infer_schema(&t, &SchemaOptions::new("y")).unwrap();
    let pipeline = fit_prep(
        &t,
        &schema,
        &PrepConfig {
            aucv: 1e-9,
            corr: 1.0,
            max_interactions: 0,
            ..config()
        },
    )
    .unwrap();
    assert!(pipeline.candidates.iter().all(|c| c
        .chars()
        .all(|ch| ch.is_ascii_lowercase() || ch.is_ascii_digit() || ch == '_')));
    assert!(pipeline.candidates.iter().any(|c| c.starts_with("city_")));
    assert!(pipeline.candidates.iter().any(|c| c.starts_with("joined_")));
}
