//! Tabular output. Every number is rounded to 12 significant digits before
//! it is written, so CSV and JSON carry the same values.

use std::fmt::Write as _;

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Shortest decimal text of `round12(x)`.
pub fn num(x: f64) -> String {
    let r = round12(x);
    if !r.is_finite() {
        return if r.is_nan() { "NaN".into() } else if r > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = r.abs();
    if r == 0.0 || (1e-4..1e12).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn json_cell(c: &Cell) -> Value {
    match c {
        Cell::Num(x) => serde_json::Number::from_f64(round12(*x)).map_or(Value::Null, Value::Number),
        Cell::Int(i) => Value::from(*i),
        Cell::Text(s) => Value::from(s.as_str()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match c {
                    Cell::Num(x) => out.push_str(&num(*x)),
                    Cell::Int(v) => write!(out, "{v}").unwrap(),
                    Cell::Text(s) => out.push_str(s),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Array of objects keyed by the header.
    pub fn to_json_value(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(k, c)| ((*k).to_owned(), json_cell(c)))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}
