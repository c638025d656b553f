//! The `affine-field v1` text format.
//!
//! ```text
//! # affine-field v1
//! <dim> <h> <shape_0> ... <shape_{dim-1}>
//! <one line per grid row, values along axis 0>
//! ```

use super::ScalarField;
use crate::error::{Error, Result};
use crate::geometry::GridDomain;
use std::fmt::Write as _;
use std::sync::Arc;

pub const FIELD_MAGIC: &str = "# affine-field v1";

pub fn write_field(u: &ScalarField) -> String {
    let dom = u.domain();
    let dim = dom.dim();
    let shape = dom.shape();
    let mut out = String::new();
    out.push_str(FIELD_MAGIC);
    out.push('\n');
    let _ = write!(out, "{} {:.16e}", dim, dom.h());
    for s in shape.iter().take(dim) {
        let _ = write!(out, " {}", s);
    }
    out.push('\n');
    for row in u.values().chunks(shape[0]) {
        let mut first = true;
        for v in row {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{:.16e}", v);
        }
        out.push('\n');
    }
    out
}

/// Parses a dump against the grid it was written from.
pub fn read_field(text: &str, dom: Arc<GridDomain>) -> Result<ScalarField> {
    let err = |line: usize, msg: String| Error::FieldFormat { line, msg };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, l)) if l == FIELD_MAGIC => {}
        Some((n, l)) => return Err(err(n, format!("expected '{}', found '{}'", FIELD_MAGIC, l))),
        None => return Err(err(1, "empty input".into())),
    }
    let (hn, header) = lines.next().ok_or_else(|| err(2, "missing grid header".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let dim: usize = toks.first().and_then(|t| t.parse().ok()).ok_or_else(|| err(hn, "bad dimension".into()))?;
    if dim != dom.dim() || toks.len() != dim + 2 {
        return Err(err(hn, format!("header '{}' does not describe a {}-D grid", header, dom.dim())));
    }
    let h: f64 = toks[1].parse().map_err(|_| err(hn, format!("bad spacing '{}'", toks[1])))?;
    if h != dom.h() {
        return Err(err(hn, format!("spacing {} does not match grid spacing {}", h, dom.h())));
    }
    for d in 0..dim {
        let s: usize = toks[2 + d].parse().map_err(|_| err(hn, format!("bad extent '{}'", toks[2 + d])))?;
        if s != dom.shape()[d] {
            return Err(err(hn, format!("extent {} on axis {} does not match {}", s, d, dom.shape()[d])));
        }
    }
    let row_len = dom.shape()[0];
    let rows = dom.num_nodes() / row_len;
    let mut values = Vec::with_capacity(dom.num_nodes());
    for r in 0..rows {
        let (ln, line) = lines.next().ok_or_else(|| err(hn + r + 1, format!("missing row {} of {}", r + 1, rows)))?;
        let before = values.len();
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| err(ln, format!("bad value '{}'", tok)))?;
            if !v.is_finite() {
                return Err(err(ln, format!("non-finite value '{}'", tok)));
            }
            let node = values.len();
            if node < before + row_len && !dom.is_inside(node) && v != 0.0 {
                return Err(err(ln, format!("nonzero value {} at masked node {}", v, node)));
            }
            values.push(v);
        }
        if values.len() - before != row_len {
            return Err(err(ln, format!("row has {} values, expected {}", values.len() - before, row_len)));
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(err(ln, "trailing data after the last row".into()));
    }
    ScalarField::from_values(dom, values)
}
