use aot_core::Measure;
use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn render(self, value: &Value, table: &Table) -> String {
        match self {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(value).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => table.to_csv(),
        }
    }
}

/// Flat rows for CSV output.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(header: &[&str], rows: Vec<Vec<Value>>) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    pub fn from_fields(fields: &[(&str, Value)]) -> Self {
        Table {
            header: fields.iter().map(|(k, _)| k.to_string()).collect(),
            rows: vec![fields.iter().map(|(_, v)| v.clone()).collect()],
        }
    }

    /// One row per atom: weight, then the path coordinates `x_t_k`.
    pub fn measure(mu: &Measure) -> Self {
        let mut header = vec!["weight".to_string()];
        for t in 0..mu.horizon() {
            for k in 0..mu.dim() {
                header.push(format!("x_{t}_{k}"));
            }
        }
        let rows = mu
            .atoms()
            .map(|(x, w)| std::iter::once(w).chain(x.iter().copied()).map(Value::from).collect())
            .collect();
        Table { header, rows }
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(cell).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => format!("{:.16e}", n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
