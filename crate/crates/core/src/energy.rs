//! Rotational energy
//! `E_rot = ∫ (c_n |Å|⁴ - |Å²|²) dA` and its conformally invariant variant
//! `E_rot^conf = ∫ |Å|^{n-4} (c_n |Å|⁴ - |Å²|²) dA`, evaluated by the
//! field's quadrature weights.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{is_umbilic, SamplePoint, ShapeField};
use crate::error::{Error, Result};
use crate::inequalities::{main_inequality, quartic_constant, EqualityKind};
use crate::spectral::{norms, trace_free_project};
use crate::sum::CompensatedSum;
use crate::tolerances::{Tolerances, VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    AllUmbilic,
    /// Every sample has an eigenspace of dimension >= n-1, some sample is not umbilic.
    RotationCandidate,
    /// A rotation candidate whose field claims minimality.
    CatenoidCandidate,
    Generic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub coords: Vec<f64>,
    /// `|Å|²`
    pub abar_sq: f64,
    /// `|Å²|²`
    pub abar2_sq: f64,
    /// `c_n |Å|⁴ - |Å²|²`
    pub defect: f64,
    /// `defect / max(1, |Å|⁴)`
    pub relative_defect: f64,
    pub equality_kind: EqualityKind,
    pub umbilic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub version: String,
    pub n: usize,
    #[serde(rename = "E_rot")]
    pub e_rot: f64,
    #[serde(rename = "E_rot_conf")]
    pub e_rot_conf: f64,
    /// `sum w max(1, |Å|⁴)`; "zero" energies are relative to this.
    pub quadrature_scale: f64,
    /// `sum w max(1, |Å|^n)`, the matching scale for `E_rot_conf`.
    pub conf_scale: f64,
    pub max_relative_defect: f64,
    pub min_relative_defect: f64,
    pub classification: Classification,
    /// No sample is umbilic. A sampled patch cannot certify "nowhere".
    pub nowhere_umbilic_on_samples: bool,
    pub minimal_claimed: bool,
    pub tolerances: Tolerances,
    pub pointwise: Vec<PointRecord>,
}

impl EnergyReport {
    pub fn e_rot_is_zero(&self) -> bool {
        self.e_rot.abs() <= self.tolerances.energy_zero_tol * self.quadrature_scale
    }

    pub fn e_rot_conf_is_zero(&self) -> bool {
        self.e_rot_conf.abs() <= self.tolerances.energy_zero_tol * self.conf_scale
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let dims = self.pointwise.first().map_or(0, |p| p.coords.len());
        let mut header: Vec<String> = vec!["sample".into()];
        header.extend((0..dims).map(|i| format!("coord{i}")));
        header.extend(
            ["abar_sq", "abar2_sq", "defect", "relative_defect", "equality_kind", "umbilic"].map(String::from),
        );
        w.write_record(&header)?;
        for (i, p) in self.pointwise.iter().enumerate() {
            let mut row = vec![i.to_string()];
            row.extend(p.coords.iter().map(f64::to_string));
            row.extend([
                p.abar_sq.to_string(),
                p.abar2_sq.to_string(),
                p.defect.to_string(),
                p.relative_defect.to_string(),
                p.equality_kind.to_string(),
                p.umbilic.to_string(),
            ]);
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Integrand {
    record: PointRecord,
    weight: f64,
    conf_factor: f64,
    abar: f64,
}

fn integrand(sample: &SamplePoint, n: usize, tol: &Tolerances) -> Result<Integrand> {
    let abar = trace_free_project(&sample.shape_operator);
    let nm = norms(&abar);
    let a4 = nm.frob_sq * nm.frob_sq;
    let defect = quartic_constant(n) * a4 - nm.square_frob_sq;
    let eq_tol = Tolerances { inequality_tol: tol.equality_tol, ..*tol };
    let main = main_inequality(&abar, &eq_tol)?;
    let frob = nm.frob_sq.sqrt();
    // continuous extension: |Å|^0 = 1, and |Å|^{n-4} = 0 at umbilic points for n > 4
    let conf_factor = if n == 4 { 1.0 } else { frob.powi(n as i32 - 4) };
    Ok(Integrand {
        record: PointRecord {
            coords: sample.coords.clone(),
            abar_sq: nm.frob_sq,
            abar2_sq: nm.square_frob_sq,
            defect,
            relative_defect: defect / a4.max(1.0),
            equality_kind: main.case.kind,
            umbilic: is_umbilic(&sample.shape_operator, tol.umbilic_tol),
        },
        weight: sample.area_weight,
        conf_factor,
        abar: frob,
    })
}

/// Integrates both energies in sample order with compensated summation.
pub fn rotational_energy(field: &ShapeField, tol: &Tolerances) -> Result<EnergyReport> {
    field.validate(tol).map_err(|e| Error::InvalidField(e.to_string()))?;
    let n = field.n();
    let parts: Vec<Integrand> = field
        .samples
        .par_iter()
        .map(|s| integrand(s, n, tol))
        .collect::<Result<_>>()?;

    let mut e_rot = CompensatedSum::new();
    let mut e_conf = CompensatedSum::new();
    let mut scale = CompensatedSum::new();
    let mut conf_scale = CompensatedSum::new();
    let mut max_rel = f64::NEG_INFINITY;
    let mut min_rel = f64::INFINITY;
    for p in &parts {
        let d = p.record.defect;
        e_rot.add(p.weight * d);
        e_conf.add(p.weight * (p.conf_factor * d));
        scale.add(p.weight * p.abar.powi(4).max(1.0));
        conf_scale.add(p.weight * p.abar.powi(n as i32).max(1.0));
        max_rel = max_rel.max(p.record.relative_defect);
        min_rel = min_rel.min(p.record.relative_defect);
    }

    let all_umbilic = parts.iter().all(|p| p.record.umbilic);
    let all_rotational = parts.iter().all(|p| p.record.equality_kind.is_rotational());
    let classification = if all_umbilic {
        Classification::AllUmbilic
    } else if all_rotational && field.minimal_claimed {
        Classification::CatenoidCandidate
    } else if all_rotational {
        Classification::RotationCandidate
    } else {
        Classification::Generic
    };

    Ok(EnergyReport {
        version: VERSION.to_string(),
        n,
        e_rot: e_rot.value(),
        e_rot_conf: e_conf.value(),
        quadrature_scale: scale.value(),
        conf_scale: conf_scale.value(),
        max_relative_defect: max_rel,
        min_relative_defect: min_rel,
        classification,
        nowhere_umbilic_on_samples: parts.iter().all(|p| !p.record.umbilic),
        minimal_claimed: field.minimal_claimed,
        tolerances: *tol,
        pointwise: parts.into_iter().map(|p| p.record).collect(),
    })
}

/// The same immersion under the ambient metric scaled by `t²`:
/// `A -> A / t`, `w -> t^n w`.
pub fn conformal_rescale(field: &ShapeField, t: f64) -> Result<ShapeField> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::BadParams(format!("rescale factor must be positive, got {t}")));
    }
    let n = field.n();
    let weight_factor = t.powi(n as i32);
    let mut out = field.clone();
    for s in &mut out.samples {
        let rows: Vec<f64> = s.shape_operator.as_slice().iter().map(|v| v / t).collect();
        s.shape_operator = crate::spectral::SymMatrix::from_row_major(n, rows)?;
        s.area_weight *= weight_factor;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_cylinder, build_sphere};

    #[test]
    fn sphere_and_cylinder() {
        let tol = Tolerances::default();
        let sphere = rotational_energy(&build_sphere(4, 1.0, &[8, 4], &tol).unwrap(), &tol).unwrap();
        assert_eq!(sphere.e_rot, 0.0);
        assert_eq!(sphere.e_rot_conf, 0.0);
        assert_eq!(sphere.classification, Classification::AllUmbilic);

        let cyl = rotational_energy(&build_cylinder(5, 1.0, 1.0, &[4, 4], &tol).unwrap(), &tol).unwrap();
        assert!(cyl.e_rot.abs() <= 1e-12 * cyl.quadrature_scale);
        assert_eq!(cyl.classification, Classification::RotationCandidate);
        assert!(cyl.nowhere_umbilic_on_samples);
    }

    #[test]
    fn rescale_identity_and_errors() {
        let tol = Tolerances::default();
        let f = build_cylinder(4, 1.0, 1.0, &[3, 3], &tol).unwrap();
        assert_eq!(conformal_rescale(&f, 1.0).unwrap(), f);
        assert!(matches!(conformal_rescale(&f, 0.0), Err(Error::BadParams(_))));
        assert!(matches!(conformal_rescale(&f, -2.0), Err(Error::BadParams(_))));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let tol = Tolerances::default();
        let r = rotational_energy(&build_cylinder(4, 1.0, 1.0, &[2, 3], &tol).unwrap(), &tol).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "sample,coord0,coord1,abar_sq,abar2_sq,defect,relative_defect,equality_kind,umbilic"
        );
        assert_eq!(lines.count(), 6);
    }
}
