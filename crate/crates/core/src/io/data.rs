//! Prize data files.
//!
//! CSV: one event per file, header `position,prize`, endowment supplied
//! separately. JSON: `{"events":[{"name":…,"endowment":…,"prizes":[…]}]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EventSet, ModelError, PrizeTable};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Schema {
        path: String,
        line: Option<u64>,
        message: String,
    },
    #[error("{path}: line {line}: `{value}` is not a number")]
    NonNumeric {
        path: String,
        line: u64,
        value: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    /// Guesses the format from the file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(DataFormat::Csv),
            "json" => Some(DataFormat::Json),
            _ => None,
        }
    }
}

/// Datasets shipped with the crate, in thousands of US dollars.
pub const BUNDLED: [(&str, &str); 2] = [
    ("wcoop2019.json", include_str!("../../data/wcoop2019.json")),
    ("pga2019.json", include_str!("../../data/pga2019.json")),
];

pub fn bundled_dataset(name: &str) -> Option<&'static str> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

#[derive(Debug, Serialize, Deserialize)]
struct DataFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<String>,
    events: Vec<PrizeTable>,
}

/// Loads an event set. A path that does not exist but names a bundled
/// dataset loads the bundled copy.
///
/// For CSV the endowment defaults to the sum of the listed prizes.
pub fn load_prize_data(
    path: &Path,
    format: DataFormat,
    endowment: Option<f64>,
) -> Result<EventSet, DataError> {
    let shown = path.display().to_string();
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(err) => {
            let bundled = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(bundled_dataset);
            match bundled {
                Some(t) if !path.exists() => t.to_string(),
                _ => {
                    return Err(DataError::Io {
                        path: shown,
                        message: err.to_string(),
                    })
                }
            }
        }
    };
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("event");
    match format {
        DataFormat::Json => parse_json(&text, &shown),
        DataFormat::Csv => parse_csv(&text, &shown, name, endowment),
    }
}

pub fn parse_json(text: &str, path: &str) -> Result<EventSet, DataError> {
    let file: DataFile = serde_json::from_str(text).map_err(|e| DataError::Schema {
        path: path.to_string(),
        line: Some(e.line() as u64),
        message: e.to_string(),
    })?;
    if file.events.is_empty() {
        return Err(DataError::Schema {
            path: path.to_string(),
            line: None,
            message: "no events".into(),
        });
    }
    Ok(EventSet::new(file.events)?)
}

pub fn parse_csv(
    text: &str,
    path: &str,
    name: &str,
    endowment: Option<f64>,
) -> Result<EventSet, DataError> {
    let schema = |line: Option<u64>, message: String| DataError::Schema {
        path: path.to_string(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| schema(Some(1), e.to_string()))?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["position", "prize"] {
        return Err(schema(Some(1), "expected header `position,prize`".into()));
    }
    let mut rows: Vec<(usize, f64)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| schema(e.position().map(|p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let (Some(pos), Some(prize)) = (record.get(0), record.get(1)) else {
            return Err(schema(Some(line), "expected two fields".into()));
        };
        let non_numeric = |value: &str| DataError::NonNumeric {
            path: path.to_string(),
            line,
            value: value.to_string(),
        };
        let position: usize = pos.parse().map_err(|_| non_numeric(pos))?;
        let prize: f64 = prize.parse().map_err(|_| non_numeric(prize))?;
        rows.push((position, prize));
    }
    if rows.is_empty() {
        return Err(schema(None, "no prize rows".into()));
    }
    rows.sort_by_key(|(p, _)| *p);
    if rows.iter().enumerate().any(|(k, (p, _))| *p != k + 1) {
        return Err(schema(None, "positions must be 1..n, each once".into()));
    }
    let prizes: Vec<f64> = rows.into_iter().map(|(_, v)| v).collect();
    let endowment = endowment.unwrap_or_else(|| prizes.iter().sum());
    Ok(EventSet::single(PrizeTable::new(name, endowment, prizes)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_poker() {
        let set = load_prize_data(Path::new("wcoop2019.json"), DataFormat::Json, None).unwrap();
        assert_eq!(set.events.len(), 1);
        assert_eq!(set.events[0].endowment, 11180.0);
        assert_eq!(set.events[0].prizes.len(), 10);
        assert_eq!(set.events[0].prizes[0], 1666.0);
    }

    #[test]
    fn bundled_golf() {
        let set = load_prize_data(Path::new("pga2019.json"), DataFormat::Json, None).unwrap();
        let e: Vec<f64> = set.events.iter().map(|t| t.endowment).collect();
        assert_eq!(e, vec![9300.0, 6600.0]);
    }

    #[test]
    fn csv_cases() {
        let set = parse_csv("position,prize\n2,3\n1,5\n3,2\n", "t.csv", "t", Some(10.0)).unwrap();
        assert_eq!(set.events[0].prizes, vec![5.0, 3.0, 2.0]);
        let set = parse_csv("position,prize\n1,5\n2,3\n", "t.csv", "t", None).unwrap();
        assert_eq!(set.events[0].endowment, 8.0);
        assert!(matches!(
            parse_csv("1,5\n2,3\n", "t.csv", "t", None),
            Err(DataError::Schema { .. })
        ));
        assert!(matches!(
            parse_csv("position,prize\n1,five\n", "t.csv", "t", None),
            Err(DataError::NonNumeric { line: 2, .. })
        ));
        assert!(matches!(
            parse_csv("position,prize\n1,5\n3,1\n", "t.csv", "t", None),
            Err(DataError::Schema { .. })
        ));
        assert!(matches!(
            parse_csv("position,prize\n1,5\n", "t.csv", "t", Some(1.0)),
            Err(DataError::Model(_))
        ));
    }

    #[test]
    fn json_cases() {
        assert!(matches!(
            parse_json("{\"events\":[]}", "x"),
            Err(DataError::Schema { .. })
        ));
        assert!(matches!(
            parse_json("{\"rows\":1}", "x"),
            Err(DataError::Schema { .. })
        ));
        let mixed = r#"{"events":[{"name":"a","endowment":3,"prizes":[1]},{"name":"b","endowment":3,"prizes":[1,1]}]}"#;
        assert!(matches!(
            parse_json(mixed, "x"),
            Err(DataError::Model(
                ModelError::InconsistentPositionCounts { .. }
            ))
        ));
    }

    #[test]
    fn missing_file() {
        assert!(matches!(
            load_prize_data(Path::new("/nonexistent/none.json"), DataFormat::Json, None),
            Err(DataError::Io { .. })
        ));
    }
}
