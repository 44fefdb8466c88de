//! Report model and renderers. All numbers go through [`fmt_g`] (12
//! significant digits) so identical invocations produce byte-identical
//! output in every format.

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub enum Value {
    Str(String),
    Num(f64),
    Int(i64),
    Bool(bool),
    List(Vec<Value>),
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_string())
    }
}
impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Str(s)
    }
}
impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}
impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}
impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

/// A report: ordered key/value fields plus an optional series table.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub fields: Vec<(String, Value)>,
    pub table: Option<Table>,
    /// Any verdict in the report was inconclusive (drives `--strict`).
    pub inconclusive: bool,
}

impl Output {
    pub fn push(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.push((key.to_string(), value.into()));
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed,
/// `.` decimal separator, exponent notation outside `[1e-4, 1e12)`.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..12).contains(&exp) {
        let s = format!("{:.*e}", 11, x);
        // trim zeros in the mantissa: "1.25000000000e-7" -> "1.25e-7"
        if let Some(epos) = s.find('e') {
            let (mant, exp_part) = s.split_at(epos);
            let mant = mant.trim_end_matches('0').trim_end_matches('.');
            return format!("{mant}{exp_part}");
        }
        s
    } else {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }
}

/// Complex number as `re`, `imi` or `re+imi`.
pub fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        fmt_g(z.re)
    } else if z.re == 0.0 {
        format!("{}i", fmt_g(z.im))
    } else if z.im < 0.0 {
        format!("{}-{}i", fmt_g(z.re), fmt_g(-z.im))
    } else {
        format!("{}+{}i", fmt_g(z.re), fmt_g(z.im))
    }
}

/// Point as `(a, b, ...)`.
pub fn fmt_point(coords: &[Complex64]) -> String {
    let parts: Vec<String> = coords.iter().map(|z| fmt_c(*z)).collect();
    format!("({})", parts.join(", "))
}

fn value_plain(v: &Value) -> String {
    match v {
        Value::Str(s) => s.clone(),
        Value::Num(x) => fmt_g(*x),
        Value::Int(i) => i.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::List(items) => {
            let parts: Vec<String> = items.iter().map(value_plain).collect();
            format!("[{}]", parts.join(", "))
        }
    }
}

pub fn render_plain(out: &Output) -> String {
    let mut s = String::new();
    for (k, v) in &out.fields {
        s.push_str(k);
        s.push_str(": ");
        s.push_str(&value_plain(v));
        s.push('\n');
    }
    if let Some(t) = &out.table {
        s.push('\n');
        s.push_str(&t.headers.join("  "));
        s.push('\n');
        for row in &t.rows {
            let cells: Vec<String> = row.iter().map(value_plain).collect();
            s.push_str(&cells.join("  "));
            s.push('\n');
        }
    }
    s
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn value_json(v: &Value) -> String {
    match v {
        Value::Str(s) => format!("\"{}\"", json_escape(s)),
        Value::Num(x) => {
            if x.is_finite() {
                fmt_g(*x)
            } else {
                format!("\"{}\"", fmt_g(*x))
            }
        }
        Value::Int(i) => i.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::List(items) => {
            let parts: Vec<String> = items.iter().map(value_json).collect();
            format!("[{}]", parts.join(", "))
        }
    }
}

/// Structured format: JSON with a stable field order and [`fmt_g`] numbers.
pub fn render_structured(out: &Output) -> String {
    let mut s = String::from("{\n");
    for (k, v) in &out.fields {
        s.push_str(&format!("  \"{}\": {},\n", json_escape(k), value_json(v)));
    }
    if let Some(t) = &out.table {
        let headers: Vec<String> =
            t.headers.iter().map(|h| format!("\"{}\"", json_escape(h))).collect();
        s.push_str(&format!("  \"columns\": [{}],\n", headers.join(", ")));
        s.push_str("  \"rows\": [\n");
        for (i, row) in t.rows.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(value_json).collect();
            let comma = if i + 1 < t.rows.len() { "," } else { "" };
            s.push_str(&format!("    [{}]{}\n", cells.join(", "), comma));
        }
        s.push_str("  ],\n");
    }
    s.push_str(&format!("  \"inconclusive\": {}\n}}\n", out.inconclusive));
    s
}

fn csv_cell(v: &Value) -> String {
    let raw = value_plain(v);
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

/// CSV: the series table when the command produces one, key/value rows
/// otherwise. Header row, comma separator, `.` decimal, no locale.
pub fn render_csv(out: &Output) -> String {
    let mut s = String::new();
    if let Some(t) = &out.table {
        s.push_str(&t.headers.join(","));
        s.push('\n');
        for row in &t.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
    } else {
        s.push_str("key,value\n");
        for (k, v) in &out.fields {
            s.push_str(&format!("{},{}\n", k, csv_cell(v)));
        }
    }
    s
}
