use rigidity::catalog::*;
use rigidity::energy::{conformal_rescale, rotational_energy, Classification};
use rigidity::inequalities::EqualityKind;
use rigidity::random::{campaign_rng, random_orthogonal, random_trace_free};
use rigidity::spectral::SymMatrix;
use rigidity::{Error, Tolerances};

fn ellipsoid_field(tol: &Tolerances, fd_step: Option<f64>) -> ShapeField {
    let chart = Chart::ellipsoid(&[1.0, 1.2, 1.4, 1.6, 1.8], 0.3).unwrap();
    chart_shape_operator(&chart, &[6], fd_step, tol).unwrap()
}

#[test]
fn catalog_classifications() {
    let tol = Tolerances::default();
    let sphere = rotational_energy(&build_sphere(5, 1.5, &[16, 8], &tol).unwrap(), &tol).unwrap();
    assert_eq!(sphere.classification, Classification::AllUmbilic);
    assert_eq!((sphere.e_rot, sphere.e_rot_conf), (0.0, 0.0));

    let cyl = rotational_energy(&build_cylinder(4, 2.0, 3.0, &[8, 8], &tol).unwrap(), &tol).unwrap();
    assert_eq!(cyl.classification, Classification::RotationCandidate);
    assert!(cyl.e_rot.abs() <= 1e-12 * cyl.quadrature_scale);
    assert!(cyl.nowhere_umbilic_on_samples);

    let profile = PolynomialProfile::new(vec![1.0, 0.3, 0.5, -0.05]);
    let rot = build_rotation_hypersurface(6, &profile, -1.0, 1.5, &[40, 8], &tol).unwrap();
    let rep = rotational_energy(&rot, &tol).unwrap();
    assert_eq!(rep.classification, Classification::RotationCandidate);
    assert!(rep.e_rot.abs() <= 1e-10 * rep.quadrature_scale);

    let ell = rotational_energy(&ellipsoid_field(&tol, None), &tol).unwrap();
    assert_eq!(ell.classification, Classification::Generic);
    assert!(ell.e_rot > 0.0 && ell.min_relative_defect > 0.0);
}

#[test]
fn catenoid_patches() {
    let tol = Tolerances::default();
    for n in [4, 5, 6] {
        let field = build_catenoid(n, &[48, 8], 1e-8, &tol).unwrap();
        assert!(field.minimal_claimed);
        assert!(minimality_residual(&field) <= 1e-8);
        let rep = rotational_energy(&field, &tol).unwrap();
        assert_eq!(rep.classification, Classification::CatenoidCandidate);
        assert!(rep.e_rot.abs() <= 1e-7 * rep.quadrature_scale);
        for p in &rep.pointwise {
            assert_eq!(p.equality_kind, EqualityKind::EigenspaceDimExactlyNMinus1);
        }
    }
}

#[test]
fn catenoid_step_control_fails_honestly() {
    let err = build_catenoid(4, &[8, 4], 1e-30, &Tolerances::default()).unwrap_err();
    assert!(matches!(err, Error::OdeStepFailure { .. }));
}

#[test]
fn perturbation_onset_is_quadratic() {
    let tol = Tolerances::default();
    let base = build_cylinder(4, 1.0, 2.0, &[8, 8], &tol).unwrap();
    let b = random_trace_free(4, &mut campaign_rng(99, 0)).unwrap();
    let energy = |eps: f64| {
        let mut f = base.clone();
        for s in &mut f.samples {
            s.shape_operator = s.shape_operator.add(&b.scaled(eps)).unwrap();
            s.umbilic_flag = is_umbilic(&s.shape_operator, tol.umbilic_tol);
        }
        rotational_energy(&f, &tol).unwrap().e_rot
    };
    let (e1, e2) = (energy(1e-2), energy(1e-1));
    assert!(e1 > 0.0 && e2 > 0.0);
    let order = (e2 / e1).log10();
    assert!(order >= 1.9, "measured order {order}");
    assert!(energy(1e-4) < e1 * 1e-3);
}

#[test]
fn conformal_bookkeeping() {
    let tol = Tolerances::default();
    let field = ellipsoid_field(&tol, None);
    let base = rotational_energy(&field, &tol).unwrap();
    assert_eq!(base.e_rot.to_bits(), base.e_rot_conf.to_bits());
    assert_eq!(conformal_rescale(&field, 1.0).unwrap(), field);
    for t in [0.5, 2.0, 3.0] {
        let r = rotational_energy(&conformal_rescale(&field, t).unwrap(), &tol).unwrap();
        assert!((r.e_rot_conf - base.e_rot_conf).abs() <= 1e-12 * base.e_rot_conf.abs());
    }
    assert!(matches!(conformal_rescale(&field, 0.0), Err(Error::BadParams(_))));
}

#[test]
fn chart_shape_operators_converge_quadratically() {
    let tol = Tolerances { fd_consistency_tol: 1e-2, ..Tolerances::default() };
    let cases: Vec<(Chart, SymMatrix)> = vec![
        (Chart::sphere(4, 1.3, 0.4).unwrap(), SymMatrix::identity(4).unwrap().scaled(1.0 / 1.3)),
        (Chart::cylinder(5, 0.8, 1.0, 0.4).unwrap(), SymMatrix::from_diagonal(&[1.25, 1.25, 1.25, 1.25, 0.0]).unwrap()),
    ];
    for (chart, exact) in cases {
        let err = |h: f64| {
            chart_shape_operator(&chart, &[3], Some(h), &tol)
                .unwrap()
                .samples
                .iter()
                .map(|s| s.shape_operator.max_abs_diff(&exact))
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(1e-2), err(5e-3));
        let order = (e1 / e2).log2();
        assert!((1.8..=2.3).contains(&order), "order {order}: {e1:e} {e2:e}");
    }
}

#[test]
fn chart_is_frame_independent() {
    let tol = Tolerances::default();
    let mut rng = campaign_rng(5, 0);
    let q = random_orthogonal(5, &mut rng);
    let chart = Chart::ellipsoid(&[1.0, 1.2, 1.4, 1.6, 1.8], 0.3).unwrap();
    let plain = chart_shape_operator(&chart, &[3], Some(1e-2), &tol).unwrap();
    let rotated = chart_shape_operator(&chart.rotated(q).unwrap(), &[3], Some(1e-2), &tol).unwrap();
    for (a, b) in plain.samples.iter().zip(&rotated.samples) {
        assert!(a.shape_operator.max_abs_diff(&b.shape_operator) < 1e-10);
        assert!((a.area_weight - b.area_weight).abs() < 1e-12);
    }
}

#[test]
fn field_files_round_trip_and_report_sample_indices() {
    let tol = Tolerances::default();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cat.json");
    let field = build_catenoid(4, &[16, 4], 1e-8, &tol).unwrap();
    write_field(&field, &path).unwrap();
    assert_eq!(ingest_field(&path, &tol).unwrap(), field);

    let mut value: serde_json::Value = serde_json::from_str(&field_to_json(&field).unwrap()).unwrap();
    value["samples"][5]["shape_operator"][0][1] = serde_json::json!(42.0);
    let err = field_from_json(&value.to_string(), &tol).unwrap_err();
    assert!(matches!(err, Error::InvariantViolation { sample: 5, .. }), "{err}");
    assert!(err.to_string().contains('5'));

    let mut value: serde_json::Value = serde_json::from_str(&field_to_json(&field).unwrap()).unwrap();
    value["samples"][3]["area_weight"] = serde_json::json!(-1.0);
    assert!(matches!(field_from_json(&value.to_string(), &tol), Err(Error::InvariantViolation { sample: 3, .. })));

    assert!(matches!(field_from_json("{\"spec\": 3}", &tol), Err(Error::Schema(_))));
    assert!(matches!(field_from_json("not json", &tol), Err(Error::Parse(_))));
}

#[test]
fn nonnegativity_on_fuzzed_fields() {
    let tol = Tolerances::default();
    for i in 0..20u64 {
        let n = 4 + (i as usize % 4);
        let mut rng = campaign_rng(77, i);
        let mut field = build_sphere(n, 1.0, &[6, 4], &tol).unwrap();
        for s in &mut field.samples {
            s.shape_operator = s.shape_operator.add(&random_trace_free(n, &mut rng).unwrap()).unwrap();
            s.umbilic_flag = false;
        }
        let rep = rotational_energy(&field, &tol).unwrap();
        assert!(rep.e_rot >= -1e-10 * rep.quadrature_scale);
        assert!(rep.e_rot_conf >= -1e-10 * rep.conf_scale);
        assert_eq!(rep.classification, Classification::Generic);
        assert_eq!(rep.e_rot_conf_is_zero(), rep.pointwise.iter().all(|p| p.equality_kind.is_rotational()));
    }
}
