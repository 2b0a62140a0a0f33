//! Column-typed tables with per-cell missingness, load-time type inference,
//! target schema resolution and stratified splitting.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::date::{self, DateFormat};
use crate::error::{Error, Result};
use crate::math;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Date,
    Boolean,
}

/// Cell storage. Cells flagged missing hold a canonical filler (0, code 0,
/// day 0, `false`) and must not be read as data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    /// Interned level codes; `levels` is in first-appearance order.
    Categorical {
        codes: Vec<u32>,
        levels: Vec<String>,
    },
    /// Days since 1970-01-01.
    Date(Vec<i32>),
    Boolean(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    name: String,
    data: ColumnData,
    missing: Vec<bool>,
}

/// Text tokens read as a missing cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingTokens(BTreeSet<String>);

impl Default for MissingTokens {
    fn default() -> Self {
        MissingTokens::new(["", "NA", "NaN", "null", "N/A"])
    }
}

impl MissingTokens {
    pub fn new<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        MissingTokens(tokens.into_iter().map(Into::into).collect())
    }

    pub fn is_missing(&self, cell: &str) -> bool {
        self.0.contains(cell)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "T" | "1" => Some(true),
        "F" | "0" => Some(false),
        _ if s.eq_ignore_ascii_case("true") => Some(true),
        _ if s.eq_ignore_ascii_case("false") => Some(false),
        _ => None,
    }
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok()
}

fn parse_any_date(s: &str) -> Option<i32> {
    DateFormat::ALL.iter().find_map(|f| f.parse(s))
}

fn intern<'a, I>(cells: I) -> (Vec<u32>, Vec<String>, Vec<bool>)
where
    I: IntoIterator<Item = Option<&'a str>>,
{
    let mut index: BTreeMap<&'a str, u32> = BTreeMap::new();
    let mut levels = Vec::new();
    let mut codes = Vec::new();
    let mut missing = Vec::new();
    for cell in cells {
        match cell {
            Some(s) => {
                let code = *index.entry(s).or_insert_with(|| {
                    levels.push(s.to_string());
                    (levels.len() - 1) as u32
                });
                codes.push(code);
                missing.push(false);
            }
            None => {
                codes.push(0);
                missing.push(true);
            }
        }
    }
    (codes, levels, missing)
}

impl Column {
    /// Numeric column; `None` and non-finite values become missing.
    pub fn numeric(name: impl Into<String>, values: Vec<Option<f64>>) -> Self {
        let mut missing = Vec::with_capacity(values.len());
        let data = values
            .into_iter()
            .map(|v| match v {
                Some(x) if x.is_finite() => {
                    missing.push(false);
                    x
                }
                _ => {
                    missing.push(true);
                    0.0
                }
            })
            .collect();
        Column {
            name: name.into(),
            data: ColumnData::Numeric(data),
            missing,
        }
    }

    /// Numeric column from plain values; non-finite values become missing.
    pub fn from_f64(name: impl Into<String>, values: Vec<f64>) -> Self {
        Column::numeric(name, values.into_iter().map(Some).collect())
    }

    pub fn categorical<S: AsRef<str>>(name: impl Into<String>, cells: &[Option<S>]) -> Self {
        let (codes, levels, missing) = intern(cells.iter().map(|c| c.as_ref().map(AsRef::as_ref)));
        Column {
            name: name.into(),
            data: ColumnData::Categorical { codes, levels },
            missing,
        }
    }

    pub fn boolean(name: impl Into<String>, values: Vec<Option<bool>>) -> Self {
        let missing = values.iter().map(Option::is_none).collect();
        Column {
            name: name.into(),
            data: ColumnData::Boolean(values.into_iter().map(|v| v.unwrap_or(false)).collect()),
            missing,
        }
    }

    pub fn date(name: impl Into<String>, days: Vec<Option<i32>>) -> Self {
        let missing = days.iter().map(Option::is_none).collect();
        Column {
            name: name.into(),
            data: ColumnData::Date(days.into_iter().map(|v| v.unwrap_or(0)).collect()),
            missing,
        }
    }

    /// Types a column of raw text cells: Numeric if every present cell is a
    /// number, else Date if every present cell parses with one date format,
    /// else Boolean if every present cell is a boolean token, else
    /// Categorical.
    pub fn infer(name: impl Into<String>, cells: &[&str], tokens: &MissingTokens) -> Self {
        let present: Vec<Option<&str>> = cells
            .iter()
            .map(|c| if tokens.is_missing(c) { None } else { Some(*c) })
            .collect();
        Column::infer_present(name.into(), &present)
    }

    fn infer_present(name: String, present: &[Option<&str>]) -> Self {
        let mut values = present.iter().flatten();
        if values.clone().all(|c| parse_number(c).is_some()) {
            return Column::numeric(name, present.iter().map(|c| c.and_then(parse_number)).collect());
        }
        for fmt in DateFormat::ALL {
            if values.clone().all(|c| fmt.parse(c).is_some()) {
                return Column::date(name, present.iter().map(|c| c.and_then(|s| fmt.parse(s))).collect());
            }
        }
        if values.all(|c| parse_bool(c).is_some()) {
            return Column::boolean(name, present.iter().map(|c| c.and_then(parse_bool)).collect());
        }
        Column::categorical(name, present)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn kind(&self) -> ColumnKind {
        match self.data {
            ColumnData::Numeric(_) => ColumnKind::Numeric,
            ColumnData::Categorical { .. } => ColumnKind::Categorical,
            ColumnData::Date(_) => ColumnKind::Date,
            ColumnData::Boolean(_) => ColumnKind::Boolean,
        }
    }

    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.missing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.missing.is_empty()
    }

    pub fn missing_mask(&self) -> &[bool] {
        &self.missing
    }

    pub fn is_missing(&self, row: usize) -> bool {
        self.missing[row]
    }

    pub fn missing_count(&self) -> usize {
        self.missing.iter().filter(|m| **m).count()
    }

    pub fn numeric_values(&self) -> Option<&[f64]> {
        match &self.data {
            ColumnData::Numeric(v) => Some(v),
            _ => None,
        }
    }

    /// Level text of a categorical cell.
    pub fn level(&self, row: usize) -> Option<&str> {
        match &self.data {
            ColumnData::Categorical { codes, levels } if !self.missing[row] => {
                Some(levels[codes[row] as usize].as_str())
            }
            _ => None,
        }
    }

    /// Numeric reading of a cell: the value, 0/1 for booleans, days for
    /// dates. `None` for missing and categorical cells.
    pub fn value(&self, row: usize) -> Option<f64> {
        if self.missing[row] {
            return None;
        }
        match &self.data {
            ColumnData::Numeric(v) => Some(v[row]),
            ColumnData::Boolean(v) => Some(if v[row] { 1.0 } else { 0.0 }),
            ColumnData::Date(v) => Some(f64::from(v[row])),
            ColumnData::Categorical { .. } => None,
        }
    }

    /// Dense numeric vector for numeric/boolean/date columns; missing cells
    /// read as 0.
    pub fn to_f64(&self) -> Option<Vec<f64>> {
        match &self.data {
            ColumnData::Categorical { .. } => None,
            _ => Some((0..self.len()).map(|i| self.value(i).unwrap_or(0.0)).collect()),
        }
    }

    /// Text form of a cell, the inverse of load-time parsing.
    pub fn text(&self, row: usize) -> Option<String> {
        if self.missing[row] {
            return None;
        }
        Some(match &self.data {
            ColumnData::Numeric(v) => format!("{}", v[row]),
            ColumnData::Categorical { codes, levels } => levels[codes[row] as usize].clone(),
            ColumnData::Date(v) => date::format_iso(v[row]),
            ColumnData::Boolean(v) => String::from(if v[row] { "true" } else { "false" }),
        })
    }

    /// Stable key of a cell for equality tests: missing cells compare equal
    /// to each other and unequal to every value.
    pub fn cell_key(&self, row: usize) -> u64 {
        if self.missing[row] {
            return u64::MAX;
        }
        match &self.data {
            ColumnData::Numeric(v) => {
                let x = v[row];
                if x == 0.0 {
                    0
                } else {
                    x.to_bits()
                }
            }
            ColumnData::Categorical { codes, .. } => u64::from(codes[row]),
            ColumnData::Date(v) => v[row] as u32 as u64,
            ColumnData::Boolean(v) => u64::from(v[row]),
        }
    }

    pub fn take(&self, rows: &[usize]) -> Column {
        let missing = rows.iter().map(|&r| self.missing[r]).collect();
        let data = match &self.data {
            ColumnData::Numeric(v) => ColumnData::Numeric(rows.iter().map(|&r| v[r]).collect()),
            ColumnData::Categorical { codes, levels } => ColumnData::Categorical {
                codes: rows.iter().map(|&r| codes[r]).collect(),
                levels: levels.clone(),
            },
            ColumnData::Date(v) => ColumnData::Date(rows.iter().map(|&r| v[r]).collect()),
            ColumnData::Boolean(v) => ColumnData::Boolean(rows.iter().map(|&r| v[r]).collect()),
        };
        Column {
            name: self.name.clone(),
            data,
            missing,
        }
    }

    /// Infers the kind again from this column's own present cells, so the
    /// result depends only on the rows it holds. Unobserved levels vanish.
    pub fn retyped(&self) -> Column {
        let texts: Vec<Option<String>> = (0..self.len()).map(|i| self.text(i)).collect();
        let present: Vec<Option<&str>> = texts.iter().map(Option::as_deref).collect();
        Column::infer_present(self.name.clone(), &present)
    }

    /// Re-types the column by round-tripping cells through text; cells that
    /// do not parse as `kind` become missing.
    pub fn coerce(self, kind: ColumnKind) -> Column {
        if self.kind() == kind {
            return self;
        }
        let texts: Vec<Option<String>> = (0..self.len()).map(|i| self.text(i)).collect();
        let name = self.name;
        match kind {
            ColumnKind::Numeric => Column::numeric(
                name,
                texts.iter().map(|t| t.as_deref().and_then(parse_number)).collect(),
            ),
            ColumnKind::Date => Column::date(
                name,
                texts.iter().map(|t| t.as_deref().and_then(parse_any_date)).collect(),
            ),
            ColumnKind::Boolean => {
                Column::boolean(name, texts.iter().map(|t| t.as_deref().and_then(parse_bool)).collect())
            }
            ColumnKind::Categorical => Column::categorical(name, &texts),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    name: String,
    columns: Vec<Column>,
    n_rows: usize,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<Column>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, Column::len);
        let mut seen = BTreeSet::new();
        for c in &columns {
            if c.len() != n_rows {
                return Err(Error::ColumnLength {
                    column: c.name.clone(),
                    expected: n_rows,
                    found: c.len(),
                });
            }
            if !seen.insert(c.name.as_str()) {
                return Err(Error::DuplicateColumn(c.name.clone()));
            }
        }
        Ok(Table {
            name: name.into(),
            columns,
            n_rows,
        })
    }

    /// Builds a typed table from a header and text rows. Rows are numbered
    /// from line 2 (the header is line 1) in ragged-row errors.
    pub fn from_text<S: AsRef<str>>(
        name: impl Into<String>,
        header: &[S],
        rows: &[Vec<S>],
        tokens: &MissingTokens,
    ) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != header.len() {
                return Err(Error::RaggedRow {
                    line: i + 2,
                    expected: header.len(),
                    found: row.len(),
                });
            }
        }
        let columns = header
            .iter()
            .enumerate()
            .map(|(j, h)| {
                let cells: Vec<&str> = rows.iter().map(|r| r[j].as_ref()).collect();
                Column::infer(h.as_ref(), &cells, tokens)
            })
            .collect();
        Table::new(name, columns)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<Column> {
        self.columns
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(Column::name).collect()
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Finds a column by exact name, then by its cleaned form.
    pub fn resolve(&self, name: &str) -> Result<&Column> {
        self.column(name)
            .or_else(|| self.column(&clean_name(name)))
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// Every column re-inferred from the rows this table holds.
    pub fn retyped(&self) -> Table {
        Table {
            name: self.name.clone(),
            columns: self.columns.iter().map(Column::retyped).collect(),
            n_rows: self.n_rows,
        }
    }

    pub fn take_rows(&self, rows: &[usize]) -> Table {
        Table {
            name: self.name.clone(),
            columns: self.columns.iter().map(|c| c.take(rows)).collect(),
            n_rows: rows.len(),
        }
    }

    pub fn select(&self, names: &[&str]) -> Result<Table> {
        let cols = names
            .iter()
            .map(|n| {
                self.column(n)
                    .cloned()
                    .ok_or_else(|| Error::UnknownColumn(n.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Table {
            name: self.name.clone(),
            columns: cols,
            n_rows: self.n_rows,
        })
    }

    pub fn with_column(mut self, column: Column) -> Result<Table> {
        if !self.columns.is_empty() && column.len() != self.n_rows {
            return Err(Error::ColumnLength {
                column: column.name,
                expected: self.n_rows,
                found: self.columns.first().map_or(0, Column::len),
            });
        }
        if self.column(&column.name).is_some() {
            return Err(Error::DuplicateColumn(column.name));
        }
        if self.columns.is_empty() {
            self.n_rows = column.len();
        }
        self.columns.push(column);
        Ok(self)
    }

    /// Rows where `column` is present.
    pub fn drop_missing_rows(&self, column: &str) -> Result<Table> {
        let col = self.resolve(column)?;
        let keep: Vec<usize> = (0..self.n_rows).filter(|&i| !col.is_missing(i)).collect();
        Ok(self.take_rows(&keep))
    }
}

/// Lowercases and replaces every non-alphanumeric character with `_`.
pub fn clean_name(raw: &str) -> String {
    let s: String = raw
        .trim()
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect();
    if s.is_empty() {
        String::from("v")
    } else {
        s
    }
}

/// Cleans every name and suffixes collisions with `_2`, `_3`, ...
pub fn clean_names<S: AsRef<str>>(raw: &[S]) -> Vec<String> {
    let mut used = BTreeSet::new();
    raw.iter()
        .map(|r| {
            let base = clean_name(r.as_ref());
            let mut name = base.clone();
            let mut k = 2;
            while used.contains(&name) {
                name = format!("{base}_{k}");
                k += 1;
            }
            used.insert(name.clone());
            name
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Feature,
    Target,
    Uid,
    Dropped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnRole {
    pub name: String,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub roles: Vec<ColumnRole>,
    pub target: String,
    pub positive_label: String,
    pub negative_label: String,
}

#[derive(Debug, Clone, Default)]
pub struct SchemaOptions {
    pub target: String,
    pub uid: Option<String>,
    pub drop: Vec<String>,
    pub onlykeep: Option<Vec<String>>,
}

impl SchemaOptions {
    pub fn new(target: impl Into<String>) -> Self {
        SchemaOptions {
            target: target.into(),
            ..SchemaOptions::default()
        }
    }
}

/// Observed text levels of a column, ascending.
fn observed_levels(col: &Column) -> BTreeSet<String> {
    (0..col.len()).filter_map(|i| col.text(i)).collect()
}

/// Assigns column roles and picks the positive class: `1` when the levels
/// are `{0, 1}`, otherwise the lexicographically greater level.
pub fn infer_schema(t: &Table, opts: &SchemaOptions) -> Result<Schema> {
    let target = t.resolve(&opts.target)?;
    let levels = observed_levels(target);
    if levels.len() != 2 {
        return Err(Error::TargetNotBinary {
            column: target.name().to_string(),
            levels: levels.len(),
        });
    }
    // {0, 1} already orders "1" last, so one rule covers both cases.
    let mut it = levels.into_iter();
    let (negative_label, positive_label) = (it.next().unwrap_or_default(), it.next().unwrap_or_default());

    let uid = opts
        .uid
        .as_deref()
        .map(|u| t.resolve(u).map(|c| c.name().to_string()))
        .transpose()?;
    let drop = opts
        .drop
        .iter()
        .map(|d| t.resolve(d).map(|c| c.name().to_string()))
        .collect::<Result<BTreeSet<_>>>()?;
    let keep = opts
        .onlykeep
        .as_ref()
        .map(|k| {
            k.iter()
                .map(|n| t.resolve(n).map(|c| c.name().to_string()))
                .collect::<Result<BTreeSet<_>>>()
        })
        .transpose()?;

    let roles = t
        .columns()
        .iter()
        .map(|c| {
            let name = c.name();
            let role = if name == target.name() {
                Role::Target
            } else if uid.as_deref() == Some(name) {
                Role::Uid
            } else if drop.contains(name) || keep.as_ref().is_some_and(|k| !k.contains(name)) {
                Role::Dropped
            } else {
                Role::Feature
            };
            ColumnRole {
                name: name.to_string(),
                role,
            }
        })
        .collect();
    Ok(Schema {
        roles,
        target: target.name().to_string(),
        positive_label,
        negative_label,
    })
}

impl Schema {
    pub fn features(&self) -> impl Iterator<Item = &str> {
        self.roles
            .iter()
            .filter(|r| r.role == Role::Feature)
            .map(|r| r.name.as_str())
    }

    pub fn role(&self, name: &str) -> Option<Role> {
        self.roles.iter().find(|r| r.name == name).map(|r| r.role)
    }

    /// 0/1 labels of the target column of `t`.
    pub fn labels(&self, t: &Table) -> Result<Vec<u8>> {
        let col = t.resolve(&self.target)?;
        (0..col.len())
            .map(|i| match col.text(i) {
                Some(s) => Ok(u8::from(s == self.positive_label)),
                None => Err(Error::TargetHasMissing(self.target.clone())),
            })
            .collect()
    }
}

fn fraction_count(n: usize, fraction: f64) -> usize {
    math::floor(n as f64 * fraction + 1e-9) as usize
}

/// Per-class test counts: `floor(n_class * fraction)` each, then the rows
/// still needed to reach `floor(n * fraction)` go to the classes with the
/// largest fractional remainders (lower class first on ties).
pub fn stratified_counts(class_sizes: &[usize], fraction: f64) -> Vec<usize> {
    let total: usize = class_sizes.iter().sum();
    let mut counts: Vec<usize> = class_sizes.iter().map(|&n| fraction_count(n, fraction)).collect();
    let mut short = fraction_count(total, fraction).saturating_sub(counts.iter().sum());
    let mut order: Vec<usize> = (0..class_sizes.len()).collect();
    let rem = |c: usize| class_sizes[c] as f64 * fraction - counts[c] as f64;
    order.sort_by(|&a, &b| rem(b).total_cmp(&rem(a)).then(a.cmp(&b)));
    for c in order {
        if short == 0 {
            break;
        }
        if counts[c] < class_sizes[c] {
            counts[c] += 1;
            short -= 1;
        }
    }
    counts
}

/// Stratified train/test split of `floor(n * test_fraction)` test rows,
/// allocated across classes by [`stratified_counts`]. Both sides keep the
/// original row order.
pub fn split_train_test(t: &Table, schema: &Schema, test_fraction: f64, seed: u64) -> Result<(Table, Table)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidConfig(String::from("test fraction must be in (0,1)")));
    }
    let labels = schema.labels(t)?;
    let mut is_test = vec![false; t.n_rows()];
    let mut rng = rng::stream(seed, &[rng::tag("split")]);
    let by_class: Vec<Vec<usize>> = [0u8, 1]
        .iter()
        .map(|&c| (0..labels.len()).filter(|&i| labels[i] == c).collect())
        .collect();
    let counts = stratified_counts(&[by_class[0].len(), by_class[1].len()], test_fraction);
    for (class, mut idx) in by_class.into_iter().enumerate() {
        if idx.len() < 2 {
            let label = if class == 1 {
                &schema.positive_label
            } else {
                &schema.negative_label
            };
            return Err(Error::ClassTooSmall {
                label: label.clone(),
                count: idx.len(),
            });
        }
        idx.shuffle(&mut rng);
        for &i in &idx[..counts[class]] {
            is_test[i] = true;
        }
    }
    let test: Vec<usize> = (0..t.n_rows()).filter(|&i| is_test[i]).collect();
    let train: Vec<usize> = (0..t.n_rows()).filter(|&i| !is_test[i]).collect();
    Ok((t.take_rows(&train), t.take_rows(&test)))
}
