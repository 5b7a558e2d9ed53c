//! Report serialization: pretty JSON, or RFC 4180 CSV via the `csv` crate.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Rows of a CSV table with a fixed header.
pub struct CsvTable {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut r: Vec<String> = fields.into_iter().map(Into::into).collect();
        assert!(r.len() <= self.header.len(), "CSV row wider than header");
        r.resize(self.header.len(), String::new());
        self.rows.push(r);
    }

    pub fn render(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }
}

/// Long-format table `section,name,index,value` used by most reports.
pub struct LongTable(CsvTable);

impl LongTable {
    pub fn new() -> Self {
        Self(CsvTable::new(&["section", "name", "index", "value"]))
    }

    pub fn text(&mut self, section: &str, name: &str, value: impl Into<String>) {
        self.0
            .row([section.to_string(), name.to_string(), String::new(), value.into()]);
    }

    pub fn scalar(&mut self, section: &str, name: &str, value: f64) {
        self.text(section, name, fmt_f64(value));
    }

    /// One row per entry, 1-based index.
    pub fn vector(&mut self, section: &str, name: &str, values: &[f64]) {
        for (i, v) in values.iter().enumerate() {
            self.0
                .row([section.to_string(), name.to_string(), (i + 1).to_string(), fmt_f64(*v)]);
        }
    }

    pub fn render(&self) -> String {
        self.0.render()
    }
}

impl Default for LongTable {
    fn default() -> Self {
        Self::new()
    }
}

/// Writes to `out`, or stdout when `None`.
pub fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::io(path, e))?;
            log::info!("wrote {}", path.display());
            Ok(())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 0.0] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_quotes_and_pads() {
        let mut t = CsvTable::new(&["a", "b", "c"]);
        t.row(["x,y", "say \"hi\""]);
        assert_eq!(t.render(), "a,b,c\r\n\"x,y\",\"say \"\"hi\"\"\",\r\n");
    }
}
