//! Statistics file reading.
//!
//! Input is header-bearing delimited text: the first non-blank line names
//! the columns, every following non-blank line is one observation. The
//! delimiter is a tab when the header contains one, a comma otherwise, so
//! single-column files work with either convention. No quoting; fields are
//! trimmed. Row numbers in messages count data rows (the header is row 0).

use std::fs;
use std::path::Path;

use crate::models::{StatisticBatch, StatisticScale};
use crate::{Error, Result};

/// Read and parse a statistics file.
pub fn read_statistics(
    path: &Path,
    column: Option<&str>,
    scale: StatisticScale,
) -> Result<StatisticBatch> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_statistics(&text, column, scale)
}

/// Parse delimited text into a batch on the given scale.
///
/// `column` selects the statistic column by header name; without it the
/// first column whose value in the first data row parses as a number is
/// used. Blank lines are skipped; a trailing carriage return is tolerated.
pub fn parse_statistics(
    text: &str,
    column: Option<&str>,
    scale: StatisticScale,
) -> Result<StatisticBatch> {
    let mut lines = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Input("empty input: expected a header line".into()))?;
    let delim = if header.contains('\t') { '\t' } else { ',' };
    let names: Vec<&str> = header.split(delim).map(str::trim).collect();
    let rows: Vec<&str> = lines.collect();
    if rows.is_empty() {
        return Err(Error::Input("no data rows after the header".into()));
    }

    let col = match column {
        Some(name) => names.iter().position(|n| *n == name).ok_or_else(|| {
            Error::Input(format!(
                "column {name:?} not found; file has: {}",
                names.join(", ")
            ))
        })?,
        None => first_numeric_column(rows[0], delim).ok_or_else(|| {
            Error::Input("no numeric column in the first data row; use --column".into())
        })?,
    };
    let col_name = names.get(col).copied().unwrap_or("?");

    let mut values = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let field = row.split(delim).nth(col).map(str::trim).ok_or_else(|| {
            Error::Input(format!("row {}: missing column {col_name:?}", i + 1))
        })?;
        let value: f64 = field.parse().map_err(|_| {
            Error::Input(format!(
                "row {}: cannot parse {field:?} in column {col_name:?} as a number",
                i + 1
            ))
        })?;
        values.push(value);
    }
    StatisticBatch::new(values, scale)
}

fn first_numeric_column(row: &str, delim: char) -> Option<usize> {
    row.split(delim)
        .position(|field| field.trim().parse::<f64>().is_ok())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_z(text: &str, column: Option<&str>) -> Result<StatisticBatch> {
        parse_statistics(text, column, StatisticScale::ZScore)
    }

    #[test]
    fn comma_and_tab_delimiters_are_sniffed() {
        let a = parse_z("z\n1.5\n-2.0\n", None).unwrap();
        assert_eq!(a.values(), [1.5, -2.0]);
        let b = parse_z("gene\tz\ng1\t1.5\ng2\t-2.0\n", None).unwrap();
        assert_eq!(b.values(), [1.5, -2.0]);
        let c = parse_z("gene,z\ng1,1.5\ng2,-2.0\n", None).unwrap();
        assert_eq!(c.values(), [1.5, -2.0]);
    }

    #[test]
    fn named_column_wins_over_first_numeric() {
        let text = "alpha,beta\n1.0,10.0\n2.0,20.0\n";
        assert_eq!(parse_z(text, Some("beta")).unwrap().values(), [10.0, 20.0]);
        assert_eq!(parse_z(text, None).unwrap().values(), [1.0, 2.0]);
    }

    #[test]
    fn missing_column_lists_the_header() {
        let err = parse_z("a,b\n1,2\n", Some("zscore")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("zscore") && msg.contains("a, b"), "{msg}");
    }

    #[test]
    fn row_numbers_point_at_the_bad_line() {
        let err = parse_z("z\n1.0\noops\n3.0\n", None).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
        let err = parse_z("a,z\n1,2\nonly-one-field\n", Some("z")).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }

    #[test]
    fn empty_and_headerless_inputs_fail() {
        assert!(parse_z("", None).is_err());
        assert!(parse_z("\n\n", None).is_err());
        assert!(parse_z("z\n", None).is_err());
        assert!(parse_z("name\ng1\n", None).is_err());
    }

    #[test]
    fn blank_lines_and_crlf_are_tolerated() {
        let batch = parse_z("z\r\n\r\n1.0\r\n\r\n2.0\r\n", None).unwrap();
        assert_eq!(batch.values(), [1.0, 2.0]);
    }

    #[test]
    fn scale_validation_reports_the_row() {
        let err = parse_statistics("p\n0.5\n1.5\n", None, StatisticScale::PValue).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
        let err = parse_z("z\n1.0\ninf\n", None).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }
}
