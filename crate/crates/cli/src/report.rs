//! Deterministic report writing: sorted JSON keys (serde_json objects are
//! ordered maps), floats rounded to nine significant digits, LF endings.

use std::io;
use std::path::Path;

use serde_json::Value;

fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exp = x.abs().log10().floor();
    let scale = 10f64.powf(8.0 - exp);
    (x * scale).round() / scale
}

fn sanitize(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.as_i64().is_none() && n.as_u64().is_none() {
                    if let Some(rounded) = serde_json::Number::from_f64(round_sig9(f)) {
                        *v = Value::Number(rounded);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(sanitize),
        Value::Object(map) => map.values_mut().for_each(sanitize),
        _ => {}
    }
}

pub fn write_json(path: impl AsRef<Path>, value: &Value) -> io::Result<()> {
    let mut v = value.clone();
    sanitize(&mut v);
    let mut text = serde_json::to_string_pretty(&v)?;
    text.push('\n');
    std::fs::write(path, text)
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> io::Result<()> {
    std::fs::write(path, text)
}
