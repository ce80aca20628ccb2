//! Deterministic report tables.
//!
//! A report is a list of rows with named, typed cells plus an optional
//! sweep summary. Rows keep their columns in insertion order; the CSV
//! header is the first-seen order of every column across all rows, and a
//! row without a given column leaves the cell empty. Floats are rendered
//! with 17 significant digits (`{:.16e}`) so values round-trip through
//! text bit-faithfully, and nothing in the renderer depends on locale,
//! hashing, or time, so identical inputs produce identical bytes.

use serde::Serialize;
use std::fmt::Write as _;

/// One typed report cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ReportValue {
    Text(String),
    Number(f64),
    Integer(i64),
    Flag(bool),
}

impl ReportValue {
    fn render_csv(&self) -> String {
        match self {
            ReportValue::Text(s) => csv_escape(s),
            ReportValue::Number(x) => format!("{x:.16e}"),
            ReportValue::Integer(n) => n.to_string(),
            ReportValue::Flag(b) => b.to_string(),
        }
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// A row of named cells, insertion-ordered, names unique.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportRow {
    cells: Vec<(String, ReportValue)>,
}

impl ReportRow {
    pub fn new() -> Self {
        ReportRow::default()
    }

    /// Add or overwrite a cell; a re-used name keeps its original slot.
    pub fn set(&mut self, name: impl Into<String>, value: ReportValue) {
        let name = name.into();
        if let Some(cell) = self.cells.iter_mut().find(|(n, _)| *n == name) {
            cell.1 = value;
        } else {
            self.cells.push((name, value));
        }
    }

    pub fn text(&mut self, name: impl Into<String>, value: impl Into<String>) {
        self.set(name, ReportValue::Text(value.into()));
    }

    pub fn number(&mut self, name: impl Into<String>, value: f64) {
        self.set(name, ReportValue::Number(value));
    }

    pub fn integer(&mut self, name: impl Into<String>, value: i64) {
        self.set(name, ReportValue::Integer(value));
    }

    pub fn flag(&mut self, name: impl Into<String>, value: bool) {
        self.set(name, ReportValue::Flag(value));
    }

    pub fn get(&self, name: &str) -> Option<&ReportValue> {
        self.cells.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    pub fn columns(&self) -> impl Iterator<Item = &str> {
        self.cells.iter().map(|(n, _)| n.as_str())
    }
}

/// One line of the sweep summary: how a numeric column behaved across the
/// sweep for one of Bob's actions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryLine {
    pub column: String,
    pub bob_action: String,
    /// `strictly_increasing`, `strictly_decreasing`, `constant`, or `mixed`.
    pub trend: String,
    pub first: f64,
    pub last: f64,
}

/// Rows plus an optional sweep summary.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportTable {
    pub rows: Vec<ReportRow>,
    pub summary: Vec<SummaryLine>,
}

/// Requested serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown output format `{other}` (json or csv)")),
        }
    }
}

impl ReportTable {
    pub fn from_rows(rows: Vec<ReportRow>) -> Self {
        ReportTable {
            rows,
            summary: Vec::new(),
        }
    }

    /// All column names, in first-seen order across the rows.
    pub fn columns(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for row in &self.rows {
            for name in row.columns() {
                if !seen.iter().any(|s| s == name) {
                    seen.push(name.to_string());
                }
            }
        }
        seen
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => self.render_json(),
            OutputFormat::Csv => self.render_csv(),
        }
    }

    /// JSON object `{"rows": [...], "summary": [...]}`; cell order inside
    /// a row follows insertion order.
    pub fn render_json(&self) -> String {
        let mut out = String::from("{\n  \"rows\": [");
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str("\n    {");
            for (j, (name, value)) in row.cells.iter().enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let rendered = serde_json::to_string(value).expect("report cells always serialize");
                let _ = write!(out, "{}: {rendered}", serde_json::to_string(name).unwrap());
            }
            out.push('}');
        }
        if self.rows.is_empty() {
            out.push(']');
        } else {
            out.push_str("\n  ]");
        }
        if self.summary.is_empty() {
            out.push_str("\n}\n");
        } else {
            out.push_str(",\n  \"summary\": [");
            for (i, line) in self.summary.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                let _ = write!(
                    out,
                    "\n    {}",
                    serde_json::to_string(line).expect("summary lines always serialize")
                );
            }
            out.push_str("\n  ]\n}\n");
        }
        out
    }

    /// CSV table over the union of columns, followed by the summary as
    /// `#`-prefixed comment lines so the main table stays plain CSV.
    pub fn render_csv(&self) -> String {
        let columns = self.columns();
        let mut out = String::new();
        out.push_str(
            &columns
                .iter()
                .map(|c| csv_escape(c))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = columns
                .iter()
                .map(|name| row.get(name).map(|v| v.render_csv()).unwrap_or_default())
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        for line in &self.summary {
            let _ = writeln!(
                out,
                "# summary column={} bob_action={} trend={} first={:.16e} last={:.16e}",
                line.column, line.bob_action, line.trend, line.first, line.last
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ReportTable {
        let mut a = ReportRow::new();
        a.text("protocol", "zeno");
        a.integer("param_cycles", 4);
        a.number("p_DB", 0.5);
        a.flag("ok", true);
        let mut b = ReportRow::new();
        b.text("protocol", "zeno");
        b.integer("param_cycles", 5);
        b.number("p_DB", 1.0 / 3.0);
        b.text("note", "extra column");
        ReportTable::from_rows(vec![a, b])
    }

    #[test]
    fn csv_uses_the_union_of_columns_in_first_seen_order() {
        let table = sample();
        let csv = table.render_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("protocol,param_cycles,p_DB,ok,note"));
        assert_eq!(lines.next(), Some("zeno,4,5.0000000000000000e-1,true,"));
        let second = lines.next().unwrap();
        assert!(second.starts_with("zeno,5,3.3333333333333331e-1,,"));
    }

    #[test]
    fn rendered_floats_round_trip_exactly() {
        let value = std::f64::consts::PI / 7.0;
        let text = format!("{value:.16e}");
        assert_eq!(text.parse::<f64>().unwrap(), value);
    }

    #[test]
    fn json_keeps_cell_order_and_parses_back() {
        let mut table = sample();
        table.summary.push(SummaryLine {
            column: "p_DB".into(),
            bob_action: "block".into(),
            trend: "strictly_decreasing".into(),
            first: 0.5,
            last: 1.0 / 3.0,
        });
        let json = table.render_json();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["rows"][0]["p_DB"], 0.5);
        assert_eq!(parsed["rows"][1]["note"], "extra column");
        assert_eq!(parsed["summary"][0]["trend"], "strictly_decreasing");
        let protocol_pos = json.find("\"protocol\"").unwrap();
        let cycles_pos = json.find("\"param_cycles\"").unwrap();
        assert!(protocol_pos < cycles_pos);
    }

    #[test]
    fn rendering_is_reproducible() {
        let table = sample();
        assert_eq!(table.render_json(), table.render_json());
        assert_eq!(table.render_csv(), table.render_csv());
    }

    #[test]
    fn awkward_text_cells_are_escaped() {
        let mut row = ReportRow::new();
        row.text("label", "a,b \"quoted\"");
        let table = ReportTable::from_rows(vec![row]);
        let csv = table.render_csv();
        assert!(csv.contains("\"a,b \"\"quoted\"\"\""));
    }
}
