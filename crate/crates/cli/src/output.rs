use std::cmp::Ordering;

use serde_json::{json, Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn opt(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Num)
    }

    fn rank(&self) -> u8 {
        match self {
            Cell::Empty => 0,
            Cell::Bool(_) => 1,
            Cell::Int(_) | Cell::Num(_) => 2,
            Cell::Text(_) => 3,
        }
    }

    fn total_cmp(&self, other: &Cell) -> Ordering {
        match (self, other) {
            (Cell::Text(a), Cell::Text(b)) => a.cmp(b),
            (Cell::Bool(a), Cell::Bool(b)) => a.cmp(b),
            (Cell::Int(a), Cell::Int(b)) => a.cmp(b),
            (Cell::Int(a), Cell::Num(b)) => (*a as f64).total_cmp(b),
            (Cell::Num(a), Cell::Int(b)) => a.total_cmp(&(*b as f64)),
            (Cell::Num(a), Cell::Num(b)) => a.total_cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }

    fn to_field(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{:?}", v + 0.0),
            Cell::Bool(v) => v.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Text(s) => json!(s),
            Cell::Int(v) => json!(v),
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(v.to_string()),
            Cell::Bool(v) => json!(v),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub cells: Vec<Cell>,
    /// Extra structure carried only by the JSON output.
    pub details: Value,
}

impl Row {
    pub fn new(cells: Vec<Cell>) -> Row {
        Row {
            cells,
            details: Value::Null,
        }
    }

    pub fn with_details(mut self, details: Value) -> Row {
        self.details = details;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Row>,
    /// Command-level summary (verdicts, fitted rates) for JSON and the manifest.
    pub summary: Value,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Table {
        Table {
            columns,
            rows: Vec::new(),
            summary: Value::Null,
        }
    }

    /// Order rows by all cells, left to right.
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.cells
                .iter()
                .zip(&b.cells)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        });
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(CliError::io)?;
        for row in &self.rows {
            w.write_record(row.cells.iter().map(Cell::to_field))
                .map_err(CliError::io)?;
        }
        w.into_inner().map_err(|e| CliError::io(e.into_error()))
    }

    pub fn to_json(&self, command: &str) -> Result<Vec<u8>, CliError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (c, cell) in self.columns.iter().zip(&row.cells) {
                    obj.insert((*c).to_string(), cell.to_json());
                }
                if !row.details.is_null() {
                    obj.insert("details".into(), row.details.clone());
                }
                Value::Object(obj)
            })
            .collect();
        let doc = json!({
            "command": command,
            "columns": self.columns,
            "rows": rows,
            "summary": self.summary,
        });
        let mut out = serde_json::to_vec_pretty(&doc).map_err(CliError::io)?;
        out.push(b'\n');
        Ok(out)
    }

    /// Gnuplot script for the CSV written to `data`.
    /// `x = None` plots against the row number.
    pub fn gnuplot(&self, data: &str, x: Option<&str>, y: &str) -> String {
        let col = |name: &str| {
            self.columns
                .iter()
                .position(|c| *c == name)
                .map_or(0, |i| i + 1)
        };
        let xcol = x.map_or(0, col);
        format!(
            "set datafile separator ','\nset key autotitle columnhead\nset xlabel '{}'\nset ylabel '{y}'\nset grid\nplot '{data}' using {xcol}:{} with points pt 7\npause -1\n",
            x.unwrap_or("row"),
            col(y)
        )
    }
}

pub fn join_point(x: &[f64]) -> String {
    x.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_sort_by_mixed_cells() {
        let mut t = Table::new(vec!["a", "b"]);
        t.rows.push(Row::new(vec![Cell::text("y"), Cell::Num(2.0)]));
        t.rows.push(Row::new(vec![Cell::text("x"), Cell::Num(3.0)]));
        t.rows.push(Row::new(vec![Cell::text("y"), Cell::Int(1)]));
        t.sort();
        let keys: Vec<String> = t.rows.iter().map(|r| format!("{:?}", r.cells)).collect();
        assert!(keys[0].contains("\"x\"") && keys[1].contains("Int(1)"));
    }

    #[test]
    fn csv_quotes_fields_with_commas() {
        let mut t = Table::new(vec!["surface", "value"]);
        t.rows
            .push(Row::new(vec![Cell::text("max(x,y)"), Cell::Num(0.5)]));
        let out = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(out, "surface,value\n\"max(x,y)\",0.5\n");
    }
}
