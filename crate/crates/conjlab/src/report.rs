//! Deterministic CSV and JSON reports.
//!
//! Every rational is emitted twice: exactly as `p/q` and as a fixed-digit
//! decimal (round half to even) for plotting. The decimal is presentation
//! only; the `p/q` column is authoritative.

use std::fmt::Write as _;

use conjlab_core::rational::{format_ratio, to_decimal};
use conjlab_core::Rational;
use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "conjlab/1";
pub const DEFAULT_DIGITS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Field {
    Text(String),
    Int(i64),
    Bool(bool),
    Rat(Rational),
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Text(s.to_owned())
    }
}

impl From<String> for Field {
    fn from(s: String) -> Self {
        Field::Text(s)
    }
}

impl From<bool> for Field {
    fn from(b: bool) -> Self {
        Field::Bool(b)
    }
}

impl From<Rational> for Field {
    fn from(r: Rational) -> Self {
        Field::Rat(r)
    }
}

impl From<&Rational> for Field {
    fn from(r: &Rational) -> Self {
        Field::Rat(r.clone())
    }
}

macro_rules! int_field {
    ($($t:ty),*) => {$(
        impl From<$t> for Field {
            fn from(n: $t) -> Self {
                Field::Int(i64::try_from(n).expect("counter fits in i64"))
            }
        }
    )*};
}
int_field!(u8, u32, u64, usize, i64);

impl Field {
    fn csv_cells(&self, digits: usize, out: &mut Vec<String>) {
        match self {
            Field::Text(s) => out.push(s.clone()),
            Field::Int(n) => out.push(n.to_string()),
            Field::Bool(b) => out.push(b.to_string()),
            Field::Rat(r) => {
                out.push(format_ratio(r));
                out.push(to_decimal(r, digits));
            }
        }
    }

    fn inline(&self, digits: usize) -> String {
        match self {
            Field::Rat(r) => format!("{} ({})", format_ratio(r), to_decimal(r, digits)),
            other => {
                let mut cells = Vec::new();
                other.csv_cells(digits, &mut cells);
                cells.join(",")
            }
        }
    }

    fn json(&self, digits: usize) -> Value {
        match self {
            Field::Text(s) => json!(s),
            Field::Int(n) => json!(n),
            Field::Bool(b) => json!(b),
            Field::Rat(r) => json!({ "exact": format_ratio(r), "decimal": to_decimal(r, digits) }),
        }
    }
}

/// A named table whose rational columns expand to `col` and `col_decimal`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.to_owned(), columns: columns.iter().map(|c| (*c).to_owned()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    fn csv_header(&self) -> String {
        let probe = self.rows.first();
        let mut cells = Vec::new();
        for (i, col) in self.columns.iter().enumerate() {
            cells.push(col.clone());
            if matches!(probe.map(|r| &r[i]), Some(Field::Rat(_))) {
                cells.push(format!("{col}_decimal"));
            }
        }
        cells.join(",")
    }
}

/// Summary lines plus tables, rendered identically on every run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub command: String,
    pub summary: Vec<(String, Field)>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_owned(), summary: Vec::new(), tables: Vec::new() }
    }

    pub fn note(&mut self, key: &str, value: impl Into<Field>) -> &mut Self {
        self.summary.push((key.to_owned(), value.into()));
        self
    }

    pub fn table(&mut self, table: Table) -> &mut Self {
        self.tables.push(table);
        self
    }

    pub fn render(&self, format: Format, digits: usize) -> String {
        match format {
            Format::Csv => self.to_csv(digits),
            Format::Json => self.to_json(digits),
        }
    }

    /// Summary lines start with `# `; a lone table is plain CSV, several are
    /// separated by `# table: <name>` lines.
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::new();
        for (key, value) in &self.summary {
            writeln!(out, "# {key}: {}", value.inline(digits)).unwrap();
        }
        let several = self.tables.len() > 1;
        for table in &self.tables {
            if several {
                writeln!(out, "# table: {}", table.name).unwrap();
            }
            writeln!(out, "{}", table.csv_header()).unwrap();
            for row in &table.rows {
                let mut cells = Vec::new();
                for field in row {
                    field.csv_cells(digits, &mut cells);
                }
                writeln!(out, "{}", cells.join(",")).unwrap();
            }
        }
        out
    }

    pub fn to_json(&self, digits: usize) -> String {
        let mut summary = Map::new();
        for (key, value) in &self.summary {
            summary.insert(key.clone(), value.json(digits));
        }
        let mut tables = Map::new();
        for table in &self.tables {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let mut obj = Map::new();
                    for (col, field) in table.columns.iter().zip(row) {
                        obj.insert(col.clone(), field.json(digits));
                    }
                    Value::Object(obj)
                })
                .collect();
            tables.insert(table.name.clone(), Value::Array(rows));
        }
        let doc = json!({
            "schema": SCHEMA,
            "command": self.command,
            "summary": summary,
            "tables": tables,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("reports serialize");
        text.push('\n');
        text
    }
}
