//! ShapeField JSON files.
//!
//! Layout: `{spec, samples: [{coords, shape_operator, area_weight,
//! umbilic_flag}], minimal_claimed}`, samples in row-major grid order.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use super::{SamplePoint, ShapeField, SurfaceSpec};
use crate::error::{Error, Result};
use crate::spectral::SymMatrix;
use crate::tolerances::Tolerances;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    coords: Vec<f64>,
    shape_operator: Vec<Vec<f64>>,
    area_weight: f64,
    umbilic_flag: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    spec: SurfaceSpec,
    samples: Vec<RawSample>,
    minimal_claimed: bool,
}

fn classify(err: serde_json::Error) -> Error {
    match err.classify() {
        serde_json::error::Category::Data => Error::Schema(err.to_string()),
        _ => Error::Parse(err),
    }
}

/// Parses and validates a field; violations name the offending sample.
pub fn field_from_json(text: &str, tol: &Tolerances) -> Result<ShapeField> {
    let raw: RawField = serde_json::from_str(text).map_err(classify)?;
    let mut samples = Vec::with_capacity(raw.samples.len());
    for (i, s) in raw.samples.into_iter().enumerate() {
        let shape_operator = SymMatrix::from_rows(&s.shape_operator).map_err(|e| Error::InvariantViolation {
            sample: i,
            reason: format!("shape operator: {e}"),
        })?;
        samples.push(SamplePoint {
            coords: s.coords,
            shape_operator,
            area_weight: s.area_weight,
            umbilic_flag: s.umbilic_flag,
        });
    }
    let field = ShapeField { spec: raw.spec, samples, minimal_claimed: raw.minimal_claimed };
    field.validate(tol)?;
    Ok(field)
}

pub fn field_to_json(field: &ShapeField) -> Result<String> {
    Ok(serde_json::to_string(field)?)
}

pub fn ingest_field(path: impl AsRef<Path>, tol: &Tolerances) -> Result<ShapeField> {
    field_from_json(&fs::read_to_string(path)?, tol)
}

pub fn write_field(field: &ShapeField, path: impl AsRef<Path>) -> Result<()> {
    let mut file = fs::File::create(path)?;
    file.write_all(field_to_json(field)?.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}
