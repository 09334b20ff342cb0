use magel::energy::*;
use magel::grid::*;
use magel::minimize::*;
use magel::recovery::build_recovery;
use magel::tensor::*;
use magel::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn uniaxial() -> AnisotropySpec<f64> {
    AnisotropySpec::uniaxial(4.0, Vector3::unit(0)).unwrap()
}

fn cubic() -> AnisotropySpec<f64> {
    AnisotropySpec::cubic(1.0, 0.0, [Vector3::unit(0), Vector3::unit(1), Vector3::unit(2)]).unwrap()
}

fn all_faces() -> Vec<Face> {
    vec![Face::X_LOW, Face::X_HIGH, Face::Y_LOW, Face::Y_HIGH, Face::Z_LOW, Face::Z_HIGH]
}

fn strain_field(m: &LabelField<f64>, wells: &[Vector3<f64>], law: &MaterialLaw<f64>) -> Vec<Matrix3<f64>> {
    m.labels().iter().map(|&l| spontaneous_strain(&wells[l], law).unwrap()).collect()
}

#[test]
fn compatible_eigenstrain_is_solved_exactly() {
    let law = MaterialLaw::default();
    let spec = uniaxial();
    let grid = Grid::<f64>::unit_cube(8).unwrap();
    let m = LabelField::constant(grid, 0, 2).unwrap();
    let l = spontaneous_strain(&Vector3::unit(0), &law).unwrap();
    let bc = BoundarySpec::new(vec![Face::X_LOW], Datum::Affine { a: l, c: Vector3::zero() }).unwrap();
    let res = solve_elastic_equilibrium(&m, spec.wells(), &bc, &law, &law, None, 1e-10, 5000).unwrap();
    assert!(res.energy <= 1e-10, "{}", res.energy);
    for c in 0..grid.len() {
        assert!((res.u.values()[c] - l * grid.center(c)).norm() < 1e-6);
    }
}

#[test]
fn cg_energy_decreases_and_is_galerkin_optimal() {
    let law = MaterialLaw::default();
    let spec = cubic();
    let grid = Grid::<f64>::unit_cube(8).unwrap();
    let m = LabelField::from_fn(grid, 6, |x| if x[0] + 0.3 * x[1] < 0.5 { 0 } else { 1 }).unwrap();
    let bc = BoundarySpec::clamped_x_low();
    let res = solve_elastic_equilibrium(&m, spec.wells(), &bc, &law, &law, None, 1e-8, 5000).unwrap();
    assert!(res.residual <= 1e-8);
    for w in res.history.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12));
    }
    let strains = strain_field(&m, spec.wells(), &law);
    let e0 = eigenstrain_energy(&res.u, &strains, &law).unwrap();
    // eigenstrain_energy uses the full gradient; the skew part drops out of Q_W
    let limit = LimitState::new(res.u.clone(), m.clone()).unwrap();
    assert!((elastic_limit(&limit, &law, spec.wells(), &law).unwrap() - e0).abs() < 1e-12);
    let mask = bc.mask(&grid);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let v: Vec<Vector3<f64>> = (0..grid.len())
            .map(|c| if mask[c] { Vector3::zero() } else { Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) })
            .collect();
        for t in [1e-4, 1e-2, -1e-2, 1.0] {
            let w = VectorField::from_values(grid, res.u.values().iter().zip(&v).map(|(a, b)| *a + *b * t).collect()).unwrap();
            assert!(eigenstrain_energy(&w, &strains, &law).unwrap() >= e0 - 1e-8 * e0);
        }
    }
    assert!(solve_elastic_equilibrium(&m, spec.wells(), &bc, &law, &law, None, 0.0, 10).is_err());
    assert!(matches!(
        solve_elastic_equilibrium(&m, spec.wells(), &bc, &law, &law, None, 1e-14, 2),
        Err(Error::Convergence { iterations: 2, .. })
    ));
}

#[test]
fn laminate_beats_the_single_phase() {
    let law = MaterialLaw::default();
    let spec = cubic();
    let grid = Grid::<f64>::unit_cube(10).unwrap();
    let bc = BoundarySpec::new(all_faces(), Datum::zero()).unwrap();
    let single = LabelField::constant(grid, 0, 6).unwrap();
    let twins = LabelField::from_fn(grid, 6, |x| ((x[0] + x[1]) * 5.0).floor() as usize % 2).unwrap();
    let e1 = solve_elastic_equilibrium(&single, spec.wells(), &bc, &law, &law, None, 1e-8, 5000).unwrap().energy;
    let e2 = solve_elastic_equilibrium(&twins, spec.wells(), &bc, &law, &law, None, 1e-8, 5000).unwrap().energy;
    assert!(e2 < e1, "{e2} vs {e1}");
}

#[test]
fn zeeman_dominance_and_huge_tension() {
    let law = MaterialLaw::default();
    let spec = uniaxial();
    let grid = Grid::<f64>::unit_cube(8).unwrap();
    let bc = BoundarySpec::clamped_x_low();
    let init = LimitState::new(VectorField::zeros(grid), LabelField::constant(grid, 0, 2).unwrap()).unwrap();
    let small = vec![vec![0.0, 0.01], vec![0.01, 0.0]];
    let f = AppliedField::Uniform(spec.wells()[1] * 10.0);
    let opts = AlternatingOptions::default();
    let res = minimize_limit_alternating(&init, &bc, &law, &spec, &small, 0.0, &f, None, &opts).unwrap();
    assert!(res.state.m.labels().iter().all(|&l| l == 1));
    for w in res.history.windows(2) {
        assert!(w[1].energy <= w[0].energy + 1e-12);
    }

    let checker = LabelField::from_fn(grid, 2, |x| ((x[0] * 8.0) as usize + (x[1] * 8.0) as usize + (x[2] * 8.0) as usize) % 2).unwrap();
    let init = LimitState::new(VectorField::zeros(grid), checker).unwrap();
    let huge = vec![vec![0.0, 1e6], vec![1e6, 0.0]];
    let res = minimize_limit_alternating(&init, &bc, &law, &spec, &huge, 0.0, &AppliedField::zero(), None, &opts).unwrap();
    assert_eq!(interface_area(&res.state.m, 0, 1), 0.0);
    assert!(minimize_limit_alternating(&init, &bc, &law, &spec, &huge, 1.0, &AppliedField::zero(), None, &opts).is_err());
}

#[test]
fn alternating_output_is_locally_optimal() {
    let law = MaterialLaw::default();
    let spec = uniaxial();
    let grid = Grid::<f64>::unit_cube(8).unwrap();
    let bc = BoundarySpec::clamped_x_low();
    let sigma = vec![vec![0.0, 0.05], vec![0.05, 0.0]];
    let f = AppliedField::Affine { a: Matrix3::from_rows([[3.0, 0.0, 0.0], [0.0; 3], [0.0; 3]]), c: Vector3::new(-1.5, 0.0, 0.0) };
    let init = LimitState::new(VectorField::zeros(grid), LabelField::constant(grid, 0, 2).unwrap()).unwrap();
    let res = minimize_limit_alternating(&init, &bc, &law, &spec, &sigma, 0.0, &f, None, &AlternatingOptions::default()).unwrap();
    assert_eq!(res.history.last().unwrap().flips, 0);
    let labels = res.state.m.labels();
    assert!(labels.contains(&0) && labels.contains(&1));
    for c in 0..grid.len() {
        let to = 1 - labels[c];
        assert!(local_flip_gain(&res.state, &law, &spec, &sigma, &f, c, to).unwrap() >= -1e-12);
    }
    let g = total_limit(&res.state, &law, &spec, &sigma, 0.0, &f, None).unwrap();
    assert!((g.total() - res.energy).abs() < 1e-10);
}

#[test]
fn diffuse_gradient_matches_finite_differences() {
    let law = MaterialLaw::default();
    let spec = uniaxial();
    let grid = Grid::<f64>::unit_cube(6).unwrap();
    let m = LabelField::from_fn(grid, 2, |x| usize::from(x[0] > 0.5)).unwrap();
    let limit = LimitState::new(VectorField::from_fn(grid, |x| Vector3::new(0.1 * x[1], 0.05 * x[0] * x[2], 0.0)), m).unwrap();
    let state = build_recovery(&limit, 0.1, 0.5, &spec, &law).unwrap();
    let f = AppliedField::Affine { a: Matrix3::from_rows([[0.0, 1.0, 0.0], [0.0; 3], [0.5, 0.0, 0.0]]), c: Vector3::new(0.3, 0.2, 0.0) };
    let g = diffuse_gradient(&state, &law, &spec, 0.0, &f, None).unwrap();
    let vol = grid.cell_volume();
    let total = |s: &DiffuseState<f64>| total_diffuse(s, &law, &spec, 0.0, &f, None).unwrap().total();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dir: Vec<Vector3<f64>> = (0..grid.len()).map(|_| Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let t = 1e-5;
    let shifted = |sign: f64| {
        let u = VectorField::from_values(grid, state.u.values().iter().zip(&dir).map(|(a, b)| *a + *b * (sign * t)).collect()).unwrap();
        DiffuseState::new(u, state.mu.clone(), state.eps, state.beta, &law).unwrap()
    };
    let fd = (total(&shifted(1.0)) - total(&shifted(-1.0))) / (2.0 * t);
    let an: f64 = g.u.iter().zip(&dir).map(|(a, b)| a.dot(b)).sum::<f64>() * vol;
    assert!((fd - an).abs() < 1e-5 * an.abs().max(1.0), "{fd} vs {an}");
}

#[test]
fn descent_decreases_and_keeps_constraints() {
    let law = MaterialLaw::default();
    let spec = uniaxial();
    let grid = Grid::<f64>::unit_cube(8).unwrap();
    let m = LabelField::from_fn(grid, 2, |x| usize::from(x[0] > 0.5)).unwrap();
    let limit = LimitState::new(VectorField::zeros(grid), m).unwrap();
    let init = build_recovery(&limit, 0.1, 0.5, &spec, &law).unwrap();
    let bc = BoundarySpec::clamped_x_low();
    let f = AppliedField::Uniform(Vector3::new(0.3, 0.2, 0.0));
    let opts = DescentOptions { steps: 15, ..DescentOptions::default() };
    let res = minimize_diffuse_descent(&init, &bc, &law, &spec, 0.0, &f, None, &opts).unwrap();
    for w in res.history.windows(2) {
        assert!(w[1] <= w[0]);
    }
    assert!(res.history.last().unwrap() < &res.history[0]);
    assert!(res.accepted_u + res.accepted_mu > 0);
    assert!(res.state.mu.values().iter().all(|z| (z.norm() - 1.0).abs() < 1e-14));
    assert!(build_deformation(&res.state.u, res.state.eps).unwrap().is_certified());
    let mask = bc.mask(&grid);
    assert!(res.state.u.values().iter().zip(&mask).all(|(v, &k)| !k || v.norm() == 0.0));
    assert!((res.breakdown.total() - res.history.last().unwrap()).abs() < 1e-12);
}
