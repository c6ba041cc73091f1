//! Fixed-precision real formatting for every persisted or printed number.
//!
//! Reals are written with 17 significant decimal digits in scientific form
//! (`4.0000000000000000e0`), which round-trips every finite `f64` exactly.
//! Non-finite values become JSON `null`.

use serde::Serializer;
use serde_json::{Number, Value};

/// 17 significant digits, scientific notation.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Like [`fmt`] but non-finite values print as an empty field.
pub fn fmt_csv(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => fmt(v),
        _ => String::new(),
    }
}

pub fn json(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(fmt(x).parse::<Number>().expect("formatted float is a JSON number"))
}

pub fn json_opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, json)
}

pub fn json_vec(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json(x)).collect())
}

/// `serialize_with` helper for `f64` fields.
pub fn ser<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&json(*x), s)
}

/// `serialize_with` helper for `Option<f64>` fields.
pub fn ser_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&json_opt(*x), s)
}

/// `serialize_with` helper for `Vec<f64>` fields.
pub fn ser_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&json_vec(xs), s)
}

/// `serialize_with` helper for `Option<Vec<f64>>` fields.
pub fn ser_opt_vec<S: Serializer>(xs: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
    match xs {
        Some(v) => ser_vec(v, s),
        None => s.serialize_none(),
    }
}
