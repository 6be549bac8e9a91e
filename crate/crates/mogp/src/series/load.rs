//! CSV ingestion: long (channel,date,value) and wide (date,ch1,ch2,...) layouts.

use std::collections::BTreeSet;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::series::{Channel, Observation, TimeSeriesSet};

/// Input CSV layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsvSchema {
    /// Columns `channel,date,value`, one observation per row.
    Long,
    /// Columns `date,<name1>,<name2>,...`; empty cells mean "no observation".
    Wide,
}

impl std::str::FromStr for CsvSchema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "long" => Ok(CsvSchema::Long),
            "wide" => Ok(CsvSchema::Wide),
            other => Err(Error::InvalidParameter(format!(
                "unknown CSV schema '{other}' (expected 'long' or 'wide')"
            ))),
        }
    }
}

/// Loads a CSV file into a [`TimeSeriesSet`].
///
/// Dates are ISO-8601 calendar dates and become real day offsets from the
/// earliest date in the file. Rows with empty value cells are skipped.
pub fn load_csv(path: impl AsRef<Path>, schema: CsvSchema) -> Result<TimeSeriesSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path.as_ref())?;

    // (channel name, date, value) triples in file order.
    let mut rows: Vec<(String, NaiveDate, f64)> = Vec::new();
    let mut channel_order: Vec<String> = Vec::new();

    match schema {
        CsvSchema::Long => {
            for (i, record) in reader.records().enumerate() {
                let row = i + 2; // 1-based, after the header
                let record = record?;
                if record.len() < 3 {
                    return Err(Error::DimensionMismatch(format!(
                        "row {row}: long schema needs columns (channel, date, value)"
                    )));
                }
                let channel = record[0].trim().to_string();
                let value_str = record[2].trim();
                if value_str.is_empty() {
                    continue;
                }
                let date = parse_date(&record[1], row)?;
                let value = parse_value(value_str, &channel, row)?;
                if !channel_order.contains(&channel) {
                    channel_order.push(channel.clone());
                }
                rows.push((channel, date, value));
            }
        }
        CsvSchema::Wide => {
            let headers = reader.headers()?.clone();
            if headers.len() < 2 {
                return Err(Error::DimensionMismatch(
                    "wide schema needs a date column plus at least one channel column".into(),
                ));
            }
            let names: Vec<String> = headers.iter().skip(1).map(|h| h.trim().to_string()).collect();
            channel_order = names.clone();
            for (i, record) in reader.records().enumerate() {
                let row = i + 2;
                let record = record?;
                let date = parse_date(&record[0], row)?;
                for (k, name) in names.iter().enumerate() {
                    let cell = record.get(k + 1).unwrap_or("").trim();
                    if cell.is_empty() {
                        continue;
                    }
                    let value = parse_value(cell, name, row)?;
                    rows.push((name.clone(), date, value));
                }
            }
        }
    }

    if rows.is_empty() {
        return Err(Error::InvalidParameter(
            "CSV contains no observations".into(),
        ));
    }

    // Duplicate (channel, date) detection before any offsetting.
    let mut seen: BTreeSet<(String, NaiveDate)> = BTreeSet::new();
    for (channel, date, _) in &rows {
        if !seen.insert((channel.clone(), *date)) {
            return Err(Error::DuplicateObservation {
                channel: channel.clone(),
                date: date.to_string(),
            });
        }
    }

    let epoch = rows.iter().map(|(_, d, _)| *d).min().expect("nonempty");

    let mut channels = Vec::with_capacity(channel_order.len());
    for name in &channel_order {
        let mut obs: Vec<Observation> = rows
            .iter()
            .filter(|(ch, _, _)| ch == name)
            .map(|(_, date, value)| Observation {
                t: (*date - epoch).num_days() as f64,
                y: *value,
            })
            .collect();
        obs.sort_by(|a, b| a.t.partial_cmp(&b.t).expect("finite times"));
        channels.push(Channel::new(name.clone(), obs)?);
    }

    TimeSeriesSet::new(channels)
}

fn parse_date(text: &str, row: usize) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(text.trim(), "%Y-%m-%d").map_err(|_| Error::MalformedDate {
        row,
        value: text.trim().to_string(),
    })
}

fn parse_value(text: &str, channel: &str, row: usize) -> Result<f64> {
    let v: f64 = text.parse().map_err(|_| Error::NonNumericValue {
        row,
        channel: channel.to_string(),
        value: text.to_string(),
    })?;
    if !v.is_finite() {
        return Err(Error::NonNumericValue {
            row,
            channel: channel.to_string(),
            value: text.to_string(),
        });
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn wide_two_rows_two_channels() {
        let f = write_temp("date,a,b\n2017-01-02,1.0,2.0\n2017-01-03,3.0,4.0\n");
        let ts = load_csv(f.path(), CsvSchema::Wide).unwrap();
        assert_eq!(ts.num_channels(), 2);
        for ch in 0..2 {
            let times: Vec<f64> = ts.channel(ch).times().collect();
            assert_eq!(times, vec![0.0, 1.0]);
        }
        assert_eq!(ts.channel(0).name(), "a");
        let values: Vec<f64> = ts.channel(1).values().collect();
        assert_eq!(values, vec![2.0, 4.0]);
    }

    #[test]
    fn long_day_offsets_from_earliest() {
        let f = write_temp("channel,date,value\ngold,2017-01-02,10\ngold,2017-01-09,11\n");
        let ts = load_csv(f.path(), CsvSchema::Long).unwrap();
        let times: Vec<f64> = ts.channel(0).times().collect();
        assert_eq!(times, vec![0.0, 7.0]);
    }

    #[test]
    fn duplicate_row_rejected() {
        let f = write_temp(
            "channel,date,value\ngold,2017-01-02,10\ngold,2017-01-02,11\n",
        );
        let err = load_csv(f.path(), CsvSchema::Long).unwrap_err();
        match err {
            Error::DuplicateObservation { channel, date } => {
                assert_eq!(channel, "gold");
                assert_eq!(date, "2017-01-02");
            }
            other => panic!("expected duplicate error, got {other}"),
        }
    }

    #[test]
    fn malformed_date_names_row() {
        let f = write_temp("channel,date,value\ngold,2017-01-02,10\ngold,01/05/2017,11\n");
        let err = load_csv(f.path(), CsvSchema::Long).unwrap_err();
        match err {
            Error::MalformedDate { row, .. } => assert_eq!(row, 3),
            other => panic!("expected date error, got {other}"),
        }
    }

    #[test]
    fn non_numeric_value_rejected() {
        let f = write_temp("channel,date,value\ngold,2017-01-02,abc\n");
        let err = load_csv(f.path(), CsvSchema::Long).unwrap_err();
        assert!(matches!(err, Error::NonNumericValue { .. }));
    }

    #[test]
    fn empty_cells_skipped_in_wide() {
        let f = write_temp("date,a,b\n2017-01-02,1.0,\n2017-01-03,,4.0\n");
        let ts = load_csv(f.path(), CsvSchema::Wide).unwrap();
        assert_eq!(ts.channel(0).len(), 1);
        assert_eq!(ts.channel(1).len(), 1);
        let times_b: Vec<f64> = ts.channel(1).times().collect();
        assert_eq!(times_b, vec![1.0]);
    }

    #[test]
    fn unsorted_long_rows_end_up_ordered() {
        let f = write_temp("channel,date,value\ngold,2017-01-09,11\ngold,2017-01-02,10\n");
        let ts = load_csv(f.path(), CsvSchema::Long).unwrap();
        let times: Vec<f64> = ts.channel(0).times().collect();
        assert_eq!(times, vec![0.0, 7.0]);
    }
}
