//! Row formatting: JSON lines or CSV, machine output on stdout only.
//!
//! Every numeric CSV cell is an exact integer, an exact numerator or
//! denominator column, or a float column; big integers are emitted as
//! strings in JSON to avoid precision loss.

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// One output cell.
#[derive(Debug, Clone)]
pub enum Cell {
    Text(String),
    Int(u64),
    /// Arbitrary-precision integer, pre-rendered.
    Big(String),
    Float(f64),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        let raw = match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Big(s) => s.clone(),
            Cell::Float(v) => format!("{v}"),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        };
        if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
            format!("\"{}\"", raw.replace('"', "\"\""))
        } else {
            raw
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) | Cell::Big(s) => Value::String(s.clone()),
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => Value::from(*v),
            Cell::Bool(b) => Value::from(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Print a stdout line, exiting quietly when the consumer has closed
/// the pipe.
fn print_line(line: std::fmt::Arguments<'_>) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if out.write_fmt(format_args!("{line}\n")).is_err() {
        std::process::exit(0);
    }
}

/// Streams homogeneous rows under a fixed column list.
pub struct RowWriter {
    format: Format,
    columns: Vec<&'static str>,
    header_written: bool,
}

impl RowWriter {
    pub fn new(format: Format, columns: Vec<&'static str>) -> RowWriter {
        RowWriter {
            format,
            columns,
            header_written: false,
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.columns.len());
        match self.format {
            Format::Csv => {
                if !self.header_written {
                    print_line(format_args!("{}", self.columns.join(",")));
                    self.header_written = true;
                }
                let line: Vec<String> = cells.iter().map(Cell::csv).collect();
                print_line(format_args!("{}", line.join(",")));
            }
            Format::Json => {
                let mut object = Map::new();
                for (name, cell) in self.columns.iter().zip(&cells) {
                    object.insert(name.to_string(), cell.json());
                }
                print_line(format_args!("{}", Value::Object(object)));
            }
        }
    }
}

/// Verdict summaries are always JSON: on stdout in JSON mode, on the
/// diagnostic stream in CSV mode so the CSV body stays clean.
pub fn verdict(format: Format, value: Value) {
    match format {
        Format::Json => print_line(format_args!("{value}")),
        Format::Csv => eprintln!("{value}"),
    }
}
