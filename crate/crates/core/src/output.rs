//! CSV and JSON tables for the command-line front end.

use std::fmt::Write as _;

use serde_json::{Map, Number, Value};

use crate::evolve::ScanRow;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(usize),
    Num(f64),
    Empty,
}

/// Shortest text with 17 significant digits, enough to round-trip binary64.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(n) => n.to_string(),
            Cell::Num(x) => format_number(*x),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(n) => Value::Number((*n as u64).into()),
            Cell::Num(x) => Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Array of row objects keyed by the header names.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.header.iter().zip(row).map(|(k, c)| (k.to_string(), c.json())).collect();
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

pub fn evolve_table(rows: &[ScanRow]) -> Table {
    let mut t = Table::new(vec!["model", "L", "tau", "K", "K_norm", "chi"]);
    for r in rows {
        t.push(vec![
            Cell::Text(r.kind.to_string()),
            Cell::Int(r.length),
            Cell::Num(r.tau),
            Cell::Num(r.k),
            Cell::Num(r.k_normalized),
            r.chi.into(),
        ]);
    }
    t
}

pub fn evolve_csv(rows: &[ScanRow]) -> String {
    evolve_table(rows).to_csv()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_roundtrip() {
        for x in [0.1, 1.0 / 3.0, 17.421313453637676, 1e-300, 0.0] {
            assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_and_json_shapes() {
        let mut t = Table::new(vec!["model", "n", "b_n"]);
        t.push(vec![Cell::Text("nn".into()), Cell::Int(0), Cell::Empty]);
        t.push(vec![Cell::Text("nn".into()), Cell::Int(1), Cell::Num(2.0)]);
        assert_eq!(t.to_csv(), "model,n,b_n\nnn,0,\nnn,1,2.0000000000000000e0\n");
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v[0]["b_n"], Value::Null);
        assert_eq!(v[1]["b_n"], 2.0);
    }
}
