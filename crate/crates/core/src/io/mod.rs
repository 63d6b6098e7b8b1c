//! Rule-spec parsing, prize data files and command reports.

mod data;
mod report;
mod spec;

pub use data::{
    bundled_dataset, load_prize_data, parse_csv, parse_json, DataError, DataFormat, BUNDLED,
};
pub use report::{format_number, Provenance, Report, ReportBody, Row, TableBlock};
pub use spec::{parse_rule_spec, ParseError};
