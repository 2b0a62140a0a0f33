use driveml::core::table::MissingTokens;
use driveml::core::{Column, Table};
use driveml::io::{read_csv_from, write_csv_to};
use proptest::prelude::*;

fn column() -> impl Strategy<Value = (u8, Vec<Option<f64>>, Vec<Option<String>>)> {
    (
        0u8..3,
        prop::collection::vec(prop::option::weighted(0.9, -1e9..1e9f64), 12),
        prop::collection::vec(prop::option::weighted(0.9, "w[a-z ,\"]{0,8}[a-z]"), 12),
    )
}

proptest! {
    #[test]
    fn written_tables_read_back_identically(cols in prop::collection::vec(column(), 1..5)) {
        let columns: Vec<Column> = cols
            .iter()
            .enumerate()
            .map(|(j, (kind, nums, words))| match kind {
                0 => Column::numeric(format!("c{j}"), nums.clone()),
                1 => Column::categorical(format!("c{j}"), words),
                _ => Column::boolean(format!("c{j}"), nums.iter().map(|v| v.map(|x| x > 0.0)).collect()),
            })
            .collect();
        let t = Table::new("t", columns).unwrap();
        let mut buf = Vec::new();
        write_csv_to(&t, &mut buf).unwrap();
        let back = read_csv_from(buf.as_slice(), "t", &MissingTokens::default()).unwrap();
        // All-missing columns carry no type information.
        for (a, b) in t.columns().iter().zip(back.columns()) {
            prop_assert_eq!(a.name(), b.name());
            prop_assert_eq!(a.missing_mask(), b.missing_mask());
            if a.missing_count() < a.len() {
                for i in 0..a.len() {
                    prop_assert_eq!(a.text(i), b.text(i));
                }
            }
        }
    }
}
