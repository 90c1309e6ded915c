//! Typed in-memory columnar tables and the statistics the search consumes.

mod column;
mod csv_io;
mod dataset;
pub mod stats;
pub mod time;

pub use column::{Column, ColumnData, ColumnType, Origin, Value, ValueKey};
pub use csv_io::{load_csv, parse_csv, write_csv, Schema, SchemaEntry};
pub use dataset::{BaseTable, Dataset, LineageStep};
pub use stats::{column_stats, normalized_entropy, pearson_matrix, ColumnStats, CorrelationMatrix};

/// The four-student example table (categorical, datetime, numerical and
/// timedelta columns).
pub fn student_table() -> Dataset {
    const CSV: &str = "Student,Exam Date,Score,Course Duration
S1,2020-09-01,88,1 year
S2,2019-08-15,92,3 months
S3,2021-01-10,75,6 months
S4,2018-05-20,85,1 year
";
    parse_csv(CSV, None).expect("static table parses")
}
