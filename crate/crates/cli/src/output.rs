//! Tabular output: CSV (comma delimiter, `.` decimal point, LF endings) and
//! JSON.

#[derive(Debug, Clone)]
pub enum Cell {
    Text(String),
    Num(f64),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: Vec<&str>) -> Table {
        Table {
            headers: headers.into_iter().map(String::from).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn fmt_num(v: f64) -> String {
        if v == 0.0 {
            "0".into()
        } else if v.abs() < 1e-4 {
            format!("{v:.6e}")
        } else {
            let s = format!("{v:.6}");
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.headers.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Text(s) => s.clone(),
                    Cell::Num(v) => Self::fmt_num(*v),
                })
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .headers
                    .iter()
                    .zip(row)
                    .map(|(h, c)| {
                        let v = match c {
                            Cell::Text(s) => serde_json::Value::String(s.clone()),
                            Cell::Num(v) => serde_json::json!(v),
                        };
                        (h.clone(), v)
                    })
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("table serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_shape() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Cell::text("x"), Cell::Num(0.5)]);
        t.push(vec![Cell::text("y"), Cell::Num(4.33e-8)]);
        let csv = t.to_csv();
        assert_eq!(csv, "a,b\nx,0.5\ny,4.330000e-8\n");
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn json_is_array_of_objects() {
        let mut t = Table::new(vec!["u", "psi"]);
        t.push(vec![Cell::Num(0.0), Cell::Num(1.0)]);
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v[0]["psi"], serde_json::json!(1.0));
    }
}
