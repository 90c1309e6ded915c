//! CSV ingestion with type inference and an optional JSON sidecar schema.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::column::{Column, ColumnType};
use super::dataset::Dataset;
use super::time::{format_datetime, format_duration, parse_datetime, parse_datetime_with, parse_duration};
use crate::error::{Error, Result};

/// Sidecar schema: column name → type, optionally with a datetime format.
///
/// ```json
/// {"Score": "numerical", "Exam Date": {"type": "datetime", "format": "%d/%m/%Y"}}
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Schema {
    pub columns: BTreeMap<String, SchemaEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SchemaEntry {
    Kind(ColumnType),
    Detailed {
        #[serde(rename = "type")]
        kind: ColumnType,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        format: Option<String>,
    },
}

impl SchemaEntry {
    pub fn kind(&self) -> ColumnType {
        match self {
            SchemaEntry::Kind(k) | SchemaEntry::Detailed { kind: k, .. } => *k,
        }
    }

    fn format(&self) -> Option<&str> {
        match self {
            SchemaEntry::Kind(_) => None,
            SchemaEntry::Detailed { format, .. } => format.as_deref(),
        }
    }
}

impl Schema {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read_to_string(path)?)
    }

    /// The schema describing an existing dataset's column types.
    pub fn of(d: &Dataset) -> Self {
        Schema {
            columns: d
                .columns()
                .iter()
                .map(|c| (c.name().to_owned(), SchemaEntry::Kind(c.kind())))
                .collect(),
        }
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
    Ok(text)
}

pub fn load_csv(path: &Path, schema: Option<&Schema>) -> Result<Dataset> {
    let text = read_to_string(path)?;
    let d = parse_csv(&text, schema)?;
    Ok(d.with_load_step(path.display().to_string()))
}

/// Parses CSV text (header row mandatory).
pub fn parse_csv(text: &str, schema: Option<&Schema>) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let mut cells: Vec<Vec<Option<String>>> = vec![Vec::new(); headers.len()];
    for record in reader.records() {
        let record = record?;
        for (i, column) in cells.iter_mut().enumerate() {
            let cell = record.get(i).unwrap_or("").trim();
            column.push((!cell.is_empty()).then(|| cell.to_owned()));
        }
    }
    let row_count = cells.first().map_or(0, Vec::len);

    if let Some(schema) = schema {
        if let Some(unknown) = schema.columns.keys().find(|k| !headers.contains(k)) {
            return Err(Error::Schema(format!("schema names column `{unknown}` absent from the csv")));
        }
    }

    let columns = headers
        .iter()
        .zip(cells)
        .map(|(name, raw)| match schema.and_then(|s| s.columns.get(name)) {
            Some(entry) => typed_column(name, &raw, entry.kind(), entry.format()),
            None => Ok(infer_column(name, &raw)),
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::with_row_count(columns, row_count)
}

fn parse_bool(text: &str) -> Option<bool> {
    match text.to_ascii_lowercase().as_str() {
        "true" | "yes" => Some(true),
        "false" | "no" => Some(false),
        _ => None,
    }
}

fn parse_number(text: &str) -> Option<f64> {
    text.parse::<f64>().ok().filter(|x| x.is_finite())
}

fn all_parse<T>(raw: &[Option<String>], parse: impl Fn(&str) -> Option<T>) -> Option<Vec<Option<T>>> {
    raw.iter()
        .map(|cell| match cell {
            None => Some(None),
            Some(s) => parse(s).map(Some),
        })
        .collect()
}

/// Inference order: number, ISO-8601 datetime, duration literal, boolean,
/// otherwise categorical. A column with no values is categorical.
fn infer_column(name: &str, raw: &[Option<String>]) -> Column {
    if raw.iter().all(Option::is_none) {
        return Column::categorical(name, raw.to_vec());
    }
    if let Some(v) = all_parse(raw, parse_number) {
        return Column::numerical(name, v);
    }
    if let Some(v) = all_parse(raw, parse_datetime) {
        return Column::datetime(name, v);
    }
    if let Some(v) = all_parse(raw, parse_duration) {
        return Column::timedelta(name, v);
    }
    if let Some(v) = all_parse(raw, parse_bool) {
        return Column::boolean(name, v);
    }
    Column::categorical(name, raw.to_vec())
}

fn typed_column(name: &str, raw: &[Option<String>], kind: ColumnType, format: Option<&str>) -> Result<Column> {
    let fail = |row: usize, value: &str| Error::Cell {
        row: row + 1,
        column: name.to_owned(),
        value: value.to_owned(),
        expected: kind.to_string(),
    };
    let parse_all = |parse: &dyn Fn(&str) -> Option<f64>| -> Result<Vec<Option<f64>>> {
        raw.iter()
            .enumerate()
            .map(|(row, cell)| match cell {
                None => Ok(None),
                Some(s) => parse(s).map(Some).ok_or_else(|| fail(row, s)),
            })
            .collect()
    };
    Ok(match kind {
        ColumnType::Numerical => Column::numerical(name, parse_all(&parse_number)?),
        ColumnType::Datetime => match format {
            Some(fmt) => Column::datetime(name, parse_all(&|s| parse_datetime_with(s, fmt))?),
            None => Column::datetime(name, parse_all(&parse_datetime)?),
        },
        ColumnType::Timedelta => Column::timedelta(name, parse_all(&parse_duration)?),
        ColumnType::Boolean => {
            let values = raw
                .iter()
                .enumerate()
                .map(|(row, cell)| match cell {
                    None => Ok(None),
                    Some(s) => parse_bool(s).map(Some).ok_or_else(|| fail(row, s)),
                })
                .collect::<Result<Vec<_>>>()?;
            Column::boolean(name, values)
        }
        ColumnType::Categorical => Column::categorical(name, raw.to_vec()),
    })
}

/// Renders one cell for CSV output; quantitative values round-trip exactly.
fn render_cell(c: &Column, row: usize) -> String {
    match c.get(row) {
        None => String::new(),
        Some(v) => match (c.kind(), v.as_f64()) {
            (ColumnType::Datetime, Some(x)) => format_datetime(x),
            (ColumnType::Timedelta, Some(x)) => format_duration(x),
            _ => v.render(c.kind()),
        },
    }
}

pub fn write_csv<W: Write>(d: &Dataset, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(d.column_names())?;
    for row in 0..d.row_count() {
        writer.write_record(d.columns().iter().map(|c| render_cell(c, row)))?;
    }
    writer.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::time::DAY;

    pub(crate) const TABLE_ONE: &str = "Student,Exam Date,Score,Course Duration
S1,2020-09-01,88,1 year
S2,2019-08-15,92,3 months
S3,2021-01-10,75,6 months
S4,2018-05-20,85,1 year
";

    #[test]
    fn infers_student_table_types() {
        let d = parse_csv(TABLE_ONE, None).unwrap();
        assert_eq!(d.row_count(), 4);
        let kinds: Vec<_> = d.columns().iter().map(|c| c.kind()).collect();
        assert_eq!(
            kinds,
            [ColumnType::Categorical, ColumnType::Datetime, ColumnType::Numerical, ColumnType::Timedelta]
        );
        let duration = d.column("Course Duration").unwrap();
        assert_eq!(duration.numbers()[2], 180.0 * DAY);
    }

    #[test]
    fn header_only_gives_zero_rows() {
        let d = parse_csv("a,b\n", None).unwrap();
        assert_eq!(d.row_count(), 0);
        assert_eq!(d.column_count(), 2);
    }

    #[test]
    fn mixed_column_falls_back_to_categorical() {
        let d = parse_csv("x\n1\n2\nx\n", None).unwrap();
        assert_eq!(d.columns()[0].kind(), ColumnType::Categorical);
    }

    #[test]
    fn empty_cells_are_null() {
        let d = parse_csv("x,y\n1,\n,true\n3,false\n", None).unwrap();
        assert_eq!(d.column("x").unwrap().kind(), ColumnType::Numerical);
        assert_eq!(d.column("y").unwrap().kind(), ColumnType::Boolean);
        assert_eq!(d.column("x").unwrap().non_null_count(), 2);
    }

    #[test]
    fn schema_mismatch_reports_row_and_column() {
        let schema = Schema::from_json(r#"{"Score": "numerical", "Student": "numerical"}"#).unwrap();
        let err = parse_csv(TABLE_ONE, Some(&schema)).unwrap_err();
        match err {
            Error::Cell { row, column, .. } => {
                assert_eq!(row, 1);
                assert_eq!(column, "Student");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn schema_with_datetime_format() {
        let schema = Schema::from_json(r#"{"when": {"type": "datetime", "format": "%d/%m/%Y"}}"#).unwrap();
        let d = parse_csv("when\n01/02/2020\n", Some(&schema)).unwrap();
        assert_eq!(d.columns()[0].kind(), ColumnType::Datetime);
        let unknown = Schema::from_json(r#"{"nope": "numerical"}"#).unwrap();
        assert!(parse_csv("when\n01/02/2020\n", Some(&unknown)).is_err());
    }

    #[test]
    fn write_then_read_is_exact() {
        let d = parse_csv(TABLE_ONE, None).unwrap();
        let mut out = Vec::new();
        write_csv(&d, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let again = parse_csv(&text, Some(&Schema::of(&d))).unwrap();
        assert_eq!(d, again);
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            load_csv(Path::new("/definitely/not/here.csv"), None),
            Err(Error::Io { .. })
        ));
    }
}
