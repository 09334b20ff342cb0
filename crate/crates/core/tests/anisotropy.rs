use magel::tensor::*;
use magel::Error;

fn fd_gradient(spec: &AnisotropySpec<f64>, z: &Vector3<f64>) -> Vector3<f64> {
    let h = 1e-6;
    let mut g = Vector3::zero();
    for k in 0..3 {
        let e = Vector3::unit(k) * h;
        g.0[k] = (spec.phi(&(*z + e)) - spec.phi(&(*z - e))) / (2.0 * h);
    }
    g
}

#[test]
fn uniaxial_density() {
    let spec = AnisotropySpec::<f64>::uniaxial(2.0, Vector3::unit(2)).unwrap();
    assert_eq!(spec.well_count(), 2);
    assert_eq!(spec.phi(&Vector3::unit(2)), 0.0);
    assert_eq!(spec.phi(&-Vector3::unit(2)), 0.0);
    assert!((spec.phi(&Vector3::unit(0)) - 2.0).abs() < 1e-15);
    // off the sphere the extension stays nonnegative
    assert!(spec.phi(&Vector3::new(0.0, 0.0, 3.0)) >= 0.0);
    assert!((spec.phi(&Vector3::new(2.0, 0.0, 1.0)) - 8.0).abs() < 1e-14);
}

#[test]
fn cubic_density_and_wells() {
    let axes = [Vector3::unit(0), Vector3::unit(1), Vector3::unit(2)];
    let spec = AnisotropySpec::<f64>::cubic(1.0, 0.5, axes).unwrap();
    assert_eq!(spec.well_count(), 6);
    assert_eq!(spec.wells()[3], -Vector3::unit(0));
    for w in spec.wells() {
        assert!(spec.phi(w).abs() < 1e-15);
    }
    let d = Vector3::splat(1.0 / 3f64.sqrt());
    // k1·3·(1/9) + k2/27
    assert!((spec.phi(&d) - (1.0 / 3.0 + 0.5 / 27.0)).abs() < 1e-14);
    for z in fibonacci_sphere::<f64>(500) {
        assert!(spec.phi(&z) >= 0.0);
    }
}

#[test]
fn gradients_match_finite_differences() {
    let axes = [Vector3::unit(0), Vector3::unit(1), Vector3::unit(2)];
    let specs = vec![
        AnisotropySpec::uniaxial(3.0, Vector3::new(0.6, 0.0, 0.8)).unwrap(),
        AnisotropySpec::cubic(1.0, -0.4, axes).unwrap(),
        AnisotropySpec::well_product(0.7, vec![Vector3::unit(0), Vector3::unit(1), -Vector3::unit(0)]).unwrap(),
    ];
    for spec in &specs {
        for z in [Vector3::new(0.3, -0.5, 0.8), Vector3::new(1.1, 0.2, -0.4)] {
            let g = spec.phi_gradient(&z);
            assert!((g - fd_gradient(spec, &z)).norm() < 1e-6 * (1.0 + g.norm()));
        }
    }
}

#[test]
fn validation_rejects_bad_specs() {
    assert!(matches!(AnisotropySpec::uniaxial(-1.0, Vector3::unit(0)), Err(Error::Validation(_))));
    assert!(AnisotropySpec::uniaxial(1.0, Vector3::zero()).is_err());
    // wells that are not zeros of the density
    let res = AnisotropySpec::new(
        vec![Vector3::unit(0), Vector3::unit(1)],
        Density::Uniaxial { kappa: 1.0, axis: Vector3::unit(0) },
    );
    assert!(res.is_err());
    // a single well is not a multiwell density
    assert!(AnisotropySpec::well_product(1.0, vec![Vector3::unit(0)]).is_err());
    // negative cubic values on the sphere
    let axes = [Vector3::unit(0), Vector3::unit(1), Vector3::unit(2)];
    assert!(AnisotropySpec::cubic(-1.0, 0.0, axes).is_err());
}

#[test]
fn fibonacci_points_are_unit() {
    let pts = fibonacci_sphere::<f64>(100);
    assert_eq!(pts.len(), 100);
    assert!(pts.iter().all(|p| (p.norm() - 1.0).abs() < 1e-14));
}
