//! Fixed-format CSV and JSON emission.

use std::fmt::Write as _;

use dirac_spectra::spectra::EigenvalueRecord;
use serde_json::Value;

use crate::CliError;

/// C-style `%.12e`: `-1.234567890123e+05`, `nan`, `inf`.
pub fn fmt_e(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mant}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

pub const SPECTRUM_HEADER: &str = "n,re,im,multiplicity,re0,im0,gap";

/// One record as a CSV row; unpaired records carry `nan` partner and gap.
pub fn spectrum_row(r: &EigenvalueRecord) -> String {
    let (re0, im0) = r.paired.map_or((f64::NAN, f64::NAN), |z| (z.re, z.im));
    format!(
        "{},{},{},{},{},{},{}",
        r.index,
        fmt_e(r.lambda.re),
        fmt_e(r.lambda.im),
        r.multiplicity,
        fmt_e(re0),
        fmt_e(im0),
        fmt_e(r.gap.unwrap_or(f64::NAN))
    )
}

pub fn spectrum_csv(records: &[EigenvalueRecord]) -> String {
    let mut out = String::from(SPECTRUM_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&spectrum_row(r));
        out.push('\n');
    }
    out
}

/// Parses a spectrum CSV back into records.
pub fn read_spectrum_csv(text: &str) -> Result<Vec<EigenvalueRecord>, CliError> {
    let mut lines = text.lines();
    if lines.next() != Some(SPECTRUM_HEADER) {
        return Err(CliError::Config("unexpected CSV header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 7 {
                return Err(CliError::Config(format!("bad CSV row {l:?}")));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| CliError::Config(format!("{s:?}: {e}")));
            let int = |s: &str| s.parse::<i64>().map_err(|e| CliError::Config(format!("{s:?}: {e}")));
            let mut r = EigenvalueRecord::new(dirac_spectra::C64::new(num(f[1])?, num(f[2])?), int(f[3])? as usize);
            r.index = int(f[0])?;
            let (re0, im0, gap) = (num(f[4])?, num(f[5])?, num(f[6])?);
            if !(re0.is_nan() || im0.is_nan()) {
                r.paired = Some(dirac_spectra::C64::new(re0, im0));
            }
            if !gap.is_nan() {
                r.gap = Some(gap);
            }
            Ok(r)
        })
        .collect()
}

/// Pretty JSON with floats in `%.12e`; non-finite floats become strings.
pub fn json(v: &Value) -> String {
    let mut out = String::new();
    emit(v, 0, &mut out);
    out.push('\n');
    out
}

fn emit(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => write!(out, "{i}").unwrap(),
            (_, Some(u), _) => write!(out, "{u}").unwrap(),
            (_, _, Some(f)) => out.push_str(&fmt_e(f)),
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) if a.iter().all(|x| x.is_number()) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                emit(x, depth, out);
            }
            out.push(']');
        }
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                emit(x, depth + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(o) if o.is_empty() => out.push_str("{}"),
        Value::Object(o) => {
            out.push_str("{\n");
            for (i, (k, x)) in o.iter().enumerate() {
                write!(out, "{}{}: ", pad(depth + 1), Value::String(k.clone())).unwrap();
                emit(x, depth + 1, out);
                out.push_str(if i + 1 < o.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
    }
}

/// Finite floats as numbers, the rest as `"nan"` / `"inf"` strings.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(fmt_e(x)), Value::Number)
}

pub fn complex(z: dirac_spectra::C64) -> Value {
    Value::Array(vec![num(z.re), num(z.im)])
}
