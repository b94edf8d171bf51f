//! JSON files for representations and flag tuples.
//!
//! Representation: `{"schema": 1, "presentation": {...}, "images": [matrix, ...]}`
//! with row-major matrices. Flag tuple: `{"schema": 1, "flags": [flag, ...]}` where
//! each flag is its list of `n` basis vectors. Documents are written with
//! `serde_json`'s pretty printer and a trailing newline, so parsing and writing a
//! file produced here reproduces it byte for byte.

use std::path::Path;

use nalgebra::DMatrix;
use serde_json::{json, Value};

use super::SCHEMA_VERSION;
use crate::bonahon_dreyer::Flag;
use crate::representation::Representation;
use crate::word_algebra::SurfacePresentation;
use crate::{Error, Result};

fn schema_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        field: field.into(),
        message: message.into(),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn check_schema(root: &Value) -> Result<()> {
    let obj = root
        .as_object()
        .ok_or_else(|| schema_err("$", "expected an object"))?;
    match obj.get("schema").and_then(Value::as_u64) {
        Some(v) if v == u64::from(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(schema_err("schema", format!("unsupported version {v}"))),
        None => Err(schema_err("schema", "missing or not an integer")),
    }
}

fn field<'a>(root: &'a Value, name: &str) -> Result<&'a Value> {
    root.get(name).ok_or_else(|| schema_err(name, "missing"))
}

/// A list of `n` numeric lists of length `n`.
fn square(v: &Value, path: &str) -> Result<Vec<Vec<f64>>> {
    let rows = v
        .as_array()
        .ok_or_else(|| schema_err(path, "expected an array of rows"))?;
    let n = rows.len();
    if n == 0 {
        return Err(schema_err(path, "empty matrix"));
    }
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let at = format!("{path}[{i}]");
            let row = row
                .as_array()
                .ok_or_else(|| schema_err(&at, "expected an array of numbers"))?;
            if row.len() != n {
                return Err(schema_err(&at, format!("has {} entries, expected {n}", row.len())));
            }
            row.iter()
                .enumerate()
                .map(|(j, x)| {
                    x.as_f64()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| schema_err(format!("{at}[{j}]"), "expected a finite number"))
                })
                .collect()
        })
        .collect()
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn representation_to_value(rep: &Representation) -> Value {
    let images: Vec<_> = rep.images().iter().map(matrix_rows).collect();
    json!({
        "schema": SCHEMA_VERSION,
        "presentation": rep.presentation(),
        "images": images,
    })
}

pub fn representation_to_json(rep: &Representation) -> String {
    pretty(&representation_to_value(rep))
}

/// Parses and validates a representation document, including the relator check.
pub fn representation_from_json(text: &str) -> Result<Representation> {
    let root: Value = serde_json::from_str(text)?;
    check_schema(&root)?;
    let presentation: SurfacePresentation = serde_json::from_value(field(&root, "presentation")?.clone())
        .map_err(|e| schema_err("presentation", e.to_string()))?;
    let images = field(&root, "images")?
        .as_array()
        .ok_or_else(|| schema_err("images", "expected an array of matrices"))?;
    if images.len() != presentation.rank() {
        return Err(schema_err(
            "images",
            format!("{} matrices for {} generators", images.len(), presentation.rank()),
        ));
    }
    let mut mats = Vec::with_capacity(images.len());
    let mut n = None;
    for (k, v) in images.iter().enumerate() {
        let path = format!("images[{k}]");
        let rows = square(v, &path)?;
        if *n.get_or_insert(rows.len()) != rows.len() {
            return Err(schema_err(path, format!("is {0}x{0}, expected {1}x{1}", rows.len(), n.unwrap())));
        }
        let size = rows.len();
        mats.push(DMatrix::from_row_iterator(size, size, rows.into_iter().flatten()));
    }
    Representation::new(presentation, mats)
}

pub fn read_representation(path: &Path) -> Result<Representation> {
    representation_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_representation(path: &Path, rep: &Representation) -> Result<()> {
    Ok(std::fs::write(path, representation_to_json(rep))?)
}

pub fn flags_to_json(flags: &[Flag]) -> String {
    let list: Vec<Value> = flags
        .iter()
        .map(|f| serde_json::to_value(f).expect("flags serialize"))
        .collect();
    pretty(&json!({ "schema": SCHEMA_VERSION, "flags": list }))
}

pub fn flags_from_json(text: &str) -> Result<Vec<Flag>> {
    let root: Value = serde_json::from_str(text)?;
    check_schema(&root)?;
    let list = field(&root, "flags")?
        .as_array()
        .ok_or_else(|| schema_err("flags", "expected an array of flags"))?;
    let mut out = Vec::with_capacity(list.len());
    for (k, v) in list.iter().enumerate() {
        let path = format!("flags[{k}]");
        let columns = square(v, &path)?;
        if let Some(first) = out.first().map(Flag::n) {
            if columns.len() != first {
                return Err(schema_err(path, format!("has dimension {}, expected {first}", columns.len())));
            }
        }
        out.push(Flag::from_columns(&columns).map_err(|e| schema_err(path, e.to_string()))?);
    }
    Ok(out)
}

pub fn read_flags(path: &Path) -> Result<Vec<Flag>> {
    flags_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_flags(path: &Path, flags: &[Flag]) -> Result<()> {
    Ok(std::fs::write(path, flags_to_json(flags))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::{pants_representation, ConstructionParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn representation_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rep = pants_representation(3, &mut rng, &ConstructionParams::default()).unwrap();
        let text = representation_to_json(&rep);
        let back = representation_from_json(&text).unwrap();
        assert_eq!(back.images(), rep.images());
        assert_eq!(representation_to_json(&back), text);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rep = pants_representation(3, &mut rng, &ConstructionParams::default()).unwrap();
        let mut v = representation_to_value(&rep);
        v["images"][1][2] = json!([1.0, 2.0]);
        match representation_from_json(&v.to_string()) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "images[1][2]"),
            other => panic!("{other:?}"),
        }
        v["images"][1][2] = json!([1.0, "x", 0.0]);
        match representation_from_json(&v.to_string()) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "images[1][2][1]"),
            other => panic!("{other:?}"),
        }
        v["schema"] = json!(2);
        assert!(matches!(representation_from_json(&v.to_string()), Err(Error::Schema { .. })));
        assert!(matches!(representation_from_json("{"), Err(Error::Json(_))));
    }
}
