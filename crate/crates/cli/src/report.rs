//! Report emission: `report.json`, CSV tables and `plotdata/*.dat` columns.
//! Floats are always printed with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                out.push_str(&n.to_string());
            } else {
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            if a.is_empty() {
                out.push_str("[]");
                return;
            }
            if a.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (i, x) in a.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, indent, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(o) => {
            if o.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, x)) in o.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String(k.clone()));
                write_value(x, indent + 1, out);
                out.push_str(if i + 1 < o.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

pub fn to_json_string(v: &Value) -> String {
    let mut s = String::new();
    write_value(v, 0, &mut s);
    s.push('\n');
    s
}

/// Library-wide thresholds, embedded in every report.
pub fn module_tolerances() -> Value {
    use symfield::tol;
    json!({
        "rank": tol::RANK,
        "ortho": tol::ORTHO,
        "dedup": tol::DEDUP,
        "merge": tol::MERGE,
        "hermitian": tol::HERMITIAN,
        "direction_angle": tol::DIRECTION_ANGLE,
    })
}

pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn create(dir: &Path) -> io::Result<Self> {
        fs::create_dir_all(dir.join("plotdata"))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn json(&self, v: &Value) -> io::Result<()> {
        fs::write(self.dir.join("report.json"), to_json_string(v))
    }

    pub fn csv(&self, name: &str, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
        let mut s = header.join(",");
        s.push('\n');
        for r in rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        fs::write(self.dir.join(format!("{name}.csv")), s)
    }

    pub fn raw_csv(&self, name: &str, body: &str) -> io::Result<()> {
        fs::write(self.dir.join(format!("{name}.csv")), body)
    }

    /// Two-column plot data `x y`.
    pub fn dat(&self, name: &str, xlabel: &str, ylabel: &str, pts: &[(f64, f64)]) -> io::Result<()> {
        let mut s = format!("# {xlabel} {ylabel}\n");
        for (x, y) in pts {
            let _ = writeln!(s, "{} {}", fmt_f64(*x), fmt_f64(*y));
        }
        fs::write(self.dir.join("plotdata").join(format!("{name}.dat")), s)
    }
}

pub fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).unwrap_or(Value::Null)
}
