//! Tuple files: one generator per line, `w x y z`, `#` comments allowed.

use std::path::Path;

use gaplab_core::real::fmt;
use gaplab_core::{Error, GroupElement, Result, Tuple};

/// Allowed deviation of `‖q‖` from 1 before renormalizing.
pub const NORM_TOL: f64 = 1e-9;

pub fn parse(text: &str) -> Result<Tuple> {
    let mut elements = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::InvalidInput(format!("line {}: {msg}", no + 1));
        let fields: Vec<f64> = line
            .split_whitespace()
            .map(|f| f.parse::<f64>().map_err(|_| bad(format!("`{f}` is not a number"))))
            .collect::<Result<_>>()?;
        let [w, x, y, z] = fields[..] else {
            return Err(bad(format!("expected 4 fields, found {}", fields.len())));
        };
        let norm = (w * w + x * x + y * y + z * z).sqrt();
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(bad(format!("quaternion norm {norm} is not 1 within {NORM_TOL:e}")));
        }
        elements.push(GroupElement::new(w, x, y, z)?);
    }
    Tuple::new(elements)
}

pub fn load(path: &Path) -> Result<Tuple> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

/// The inverse of [`parse`], at 17 significant digits.
pub fn render(t: &Tuple) -> String {
    t.elements()
        .iter()
        .map(|g| {
            let [w, x, y, z] = g.components();
            format!("{} {} {} {}\n", fmt(w), fmt(x), fmt(y), fmt(z))
        })
        .collect()
}
