//! Deterministic text encodings.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{Number, Value};

use super::CliError;

/// 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            fmt_f64(x).parse::<Number>().map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(xs) => Value::Array(xs.into_iter().map(normalize).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with every float written as [`fmt_f64`] and a trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Numeric(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&normalize(v)).map_err(|e| CliError::Numeric(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn csv_row(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

pub fn obj(vertices: &[[f64; 3]], faces: &[[usize; 3]]) -> String {
    let mut s = String::new();
    for v in vertices {
        let _ = writeln!(s, "v {} {} {}", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2]));
    }
    for f in faces {
        let _ = writeln!(s, "f {} {} {}", f[0], f[1], f[2]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_fixed_width_mantissa() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.25), "-2.5000000000000000e-1");
    }

    #[test]
    fn json_floats_are_normalized() {
        #[derive(Serialize)]
        struct T {
            b: f64,
            a: usize,
            c: Vec<(f64, f64)>,
        }
        let s = canonical_json(&T { b: 0.1, a: 3, c: vec![(1.0, -2.0)] }).unwrap();
        assert!(s.contains("\"b\": 1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"a\": 3"));
        // keys come out sorted
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["c"][0][1].as_f64(), Some(-2.0));
    }
}
