use magel::energy::*;
use magel::grid::*;
use magel::recovery::*;
use magel::tensor::*;

fn setup(n: usize) -> (MaterialLaw<f64>, AnisotropySpec<f64>, LimitState<f64>) {
    let law = MaterialLaw::default();
    let spec = AnisotropySpec::uniaxial(4.0, Vector3::unit(0)).unwrap();
    let grid = Grid::<f64>::unit_cube(n).unwrap();
    let m = LabelField::from_fn(grid, 2, |x| usize::from(x[0] >= 0.5)).unwrap();
    let u = VectorField::from_fn(grid, |x| x * 0.1);
    (law, spec, LimitState::new(u, m).unwrap())
}

#[test]
fn planar_interface_distance_is_exact() {
    let (_, _, limit) = setup(8);
    let grid = *limit.m.grid();
    let near = interface_distance(&limit.m);
    for c in 0..grid.len() {
        let (d, partner) = near.nearest[c].expect("every cell sees the plane");
        assert!((d - (grid.center(c)[0] - 0.5).abs()).abs() < 1e-12);
        assert_eq!(partner, 1 - limit.m.get(c));
    }
    let flat = LabelField::constant(grid, 0, 2).unwrap();
    assert!(interface_distance(&flat).nearest.iter().all(|x| x.is_none()));
}

#[test]
fn distance_around_an_inclusion() {
    let grid = Grid::<f64>::unit_cube(12).unwrap();
    let m = LabelField::from_fn(grid, 2, |x| usize::from((x - Vector3::splat(0.5)).abs_max() < 0.25)).unwrap();
    let near = interface_distance(&m);
    let h = 1.0 / 12.0;
    for c in 0..grid.len() {
        let x = grid.center(c) - Vector3::splat(0.5);
        let (d, _) = near.nearest[c].unwrap();
        // distance to the cube surface bounds from below; the face-center seeds add at most half a cell
        let inside = x.abs_max() < 0.25;
        let exact = if inside {
            0.25 - x.abs_max()
        } else {
            let q = Vector3::new((x[0].abs() - 0.25).max(0.0), (x[1].abs() - 0.25).max(0.0), (x[2].abs() - 0.25).max(0.0));
            q.norm()
        };
        assert!(d >= exact - 1e-12 && d <= exact + 0.5 * h * 3f64.sqrt(), "{d} vs {exact}");
    }
}

#[test]
fn constant_state_recovers_exactly() {
    let law = MaterialLaw::default();
    let spec = AnisotropySpec::uniaxial(4.0, Vector3::unit(0)).unwrap();
    let grid = Grid::<f64>::unit_cube(6).unwrap();
    let limit = LimitState::new(VectorField::zeros(grid), LabelField::constant(grid, 1, 2).unwrap()).unwrap();
    let state = build_recovery(&limit, 0.1, 0.5, &spec, &law).unwrap();
    assert!(state.mu.values().iter().all(|z| *z == -Vector3::unit(0)));
    assert_eq!(magnetic_diffuse(&state, &spec).unwrap().total(), 0.0);
}

#[test]
fn recovery_family_shrinks_layers() {
    let (law, spec, limit) = setup(16);
    let fam = RecoveryFamily::new(limit.clone(), vec![0.2, 0.1, 0.05], 0.5, &spec, &law).unwrap();
    assert_eq!(fam.states.len(), 3);
    let sharp = limit.m.to_vectors(spec.wells());
    let l1: Vec<f64> = fam
        .states
        .iter()
        .map(|s| integrate_values(&limit.u.grid().clone(), &s.mu.values().iter().zip(sharp.values()).map(|(a, b)| (*a - *b).norm()).collect::<Vec<_>>()).unwrap())
        .collect();
    assert!(l1[0] > l1[1] && l1[1] > l1[2]);
    for s in &fam.states {
        assert!(s.mu.values().iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        assert_eq!(s.u, limit.u);
    }
    assert!(RecoveryFamily::new(limit.clone(), vec![0.1, 0.2], 0.5, &spec, &law).is_err());
    assert!(RecoveryFamily::new(limit.clone(), vec![], 0.5, &spec, &law).is_err());
    assert!(RecoveryFamily::new(limit, vec![0.1], 1.5, &spec, &law).is_err());
}

#[test]
fn layer_volume_shrinks_for_small_eps() {
    let (law, spec, limit) = setup(32);
    let study = gamma_study(&limit, &[1.0 / 256.0, 1.0 / 1024.0], 0.5, &law, &spec, 0.0, &AppliedField::zero(), None).unwrap();
    let v: Vec<f64> = study.rows.iter().map(|r| r.layer_volume).collect();
    assert!(v[1] < v[0], "{v:?}");
    // layer width 2Θε^β
    assert!((v[0] - 0.5).abs() <= 2.0 / 32.0);
    assert!((v[1] - 0.25).abs() <= 2.0 / 32.0);
}

#[test]
fn gamma_study_rows() {
    let (law, spec, limit) = setup(16);
    let study = gamma_study(&limit, &[0.2, 0.1, 0.05], 0.5, &law, &spec, 0.0, &AppliedField::zero(), None).unwrap();
    assert_eq!(study.rows.len(), 3);
    assert!((study.sigma[0][1] - 4.0).abs() < 0.04);
    let ((i, j), area, cost) = study.interfaces[0];
    assert_eq!((i, j), (0, 1));
    assert!((area - 1.0).abs() < 1e-12);
    assert!((cost - 8.0).abs() < 0.08);
    let gaps: Vec<f64> = study.rows.iter().map(|r| r.elastic - r.elastic_limit).collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] > 0.0, "{gaps:?}");
    for r in &study.rows {
        assert_eq!(r.displacement_error, 0.0);
        assert!((r.magnetic_limit - study.sigma[0][1]).abs() < 1e-12);
        assert_eq!(r.magnetic(), r.anisotropy + r.exchange);
        // liminf side: the diffuse magnetic energy stays near the profile cost
        assert!(r.magnetic() > 0.9 * cost && r.magnetic() < 1.1 * cost);
    }
}
