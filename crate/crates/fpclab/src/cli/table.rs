//! CSV output with stable `%.12g`-style number formatting.

use std::io::Write;
use std::path::Path;

use crate::error::Result;

const SIG_DIGITS: usize = 12;

/// Format like C's `%.12g`: 12 significant digits, fixed or scientific
/// depending on magnitude, trailing zeros trimmed. Byte-stable across runs.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // exponent of the value after rounding to 12 significant digits
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp_str) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exp_str.parse().expect("exponent parses");

    if exp >= -4 && exp < SIG_DIGITS as i32 {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        trim_zeros(&fixed).to_string()
    } else {
        let mantissa = trim_zeros(mantissa);
        if exp < 0 {
            format!("{mantissa}e-{:02}", -exp)
        } else {
            format!("{mantissa}e+{exp:02}")
        }
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Column names plus pre-formatted rows.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Numeric cell.
pub fn num(x: f64) -> String {
    fmt_g(x)
}

/// Optional numeric cell; empty when absent.
pub fn opt(x: Option<f64>) -> String {
    x.map(fmt_g).unwrap_or_default()
}

// RFC 4180: quote fields containing separators, quotes or newlines.
fn escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') || field.contains('\r') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Write the table with `# `-prefixed comment lines before the header row.
pub fn write_csv(path: &Path, comments: &[String], table: &Table) -> Result<()> {
    let mut out = Vec::new();
    for line in comments {
        writeln!(out, "# {line}")?;
    }
    writeln!(
        out,
        "{}",
        table
            .columns
            .iter()
            .map(|c| escape(c))
            .collect::<Vec<_>>()
            .join(",")
    )?;
    for row in &table.rows {
        writeln!(
            out,
            "{}",
            row.iter().map(|c| escape(c)).collect::<Vec<_>>().join(",")
        )?;
    }
    std::fs::write(path, out)?;
    Ok(())
}
