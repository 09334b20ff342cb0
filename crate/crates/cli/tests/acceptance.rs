//! End-to-end acceptance checks, one line per criterion.

use std::f64::consts::PI;
use std::fs;
use std::process::ExitCode;
use std::time::Instant;

use magel::energy::*;
use magel::geodesy::*;
use magel::grid::*;
use magel::minimize::*;
use magel::recovery::*;
use magel::tensor::*;
use magel_cli::experiments::{run, GAMMA_HEADERS};
use magel_cli::{run_experiment, stray_check, Experiment, RawConfig, RunOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn verdict(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_matrix(rng: &mut ChaCha8Rng) -> Matrix3<f64> {
    let mut m = Matrix3::zero();
    for i in 0..3 {
        for j in 0..3 {
            m.0[i][j] = rng.gen_range(-1.0..1.0);
        }
    }
    m
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Minimal Σ κ sin²(θ_mid) Δt + (Δθ)²/Δt over θ from 0 to π on [−t, t],
/// by damped Newton on the tridiagonal Hessian.
fn angle_profile_cost(kappa: f64, t: f64, n: usize) -> f64 {
    let dt = 2.0 * t / n as f64;
    let mut th: Vec<f64> = (0..=n).map(|k| PI * k as f64 / n as f64).collect();
    let energy = |th: &[f64]| -> f64 {
        th.windows(2).map(|w| kappa * (0.5 * (w[0] + w[1])).sin().powi(2) * dt + (w[1] - w[0]).powi(2) / dt).sum()
    };
    let mut e = energy(&th);
    let mut shift = 1e-3;
    let m = n - 1;
    for _ in 0..500 {
        let mid: Vec<f64> = th.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let mut g = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m];
        for k in 1..n {
            let (a, b) = (mid[k - 1], mid[k]);
            g[k - 1] = 0.5 * kappa * dt * ((2.0 * a).sin() + (2.0 * b).sin()) + 2.0 * (2.0 * th[k] - th[k - 1] - th[k + 1]) / dt;
            diag[k - 1] = 0.5 * kappa * dt * ((2.0 * a).cos() + (2.0 * b).cos()) + 4.0 / dt;
            off[k - 1] = 0.5 * kappa * dt * (2.0 * b).cos() - 2.0 / dt;
        }
        if g.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-11 {
            break;
        }
        loop {
            let mut c = vec![0.0; m];
            let mut d = vec![0.0; m];
            let mut ok = true;
            for i in 0..m {
                let a = diag[i] + shift - if i > 0 { off[i - 1] * c[i - 1] } else { 0.0 };
                if a <= 0.0 {
                    ok = false;
                    break;
                }
                c[i] = off[i] / a;
                d[i] = (g[i] - if i > 0 { off[i - 1] * d[i - 1] } else { 0.0 }) / a;
            }
            if ok {
                for i in (0..m - 1).rev() {
                    d[i] -= c[i] * d[i + 1];
                }
                let mut trial = th.clone();
                for i in 0..m {
                    trial[i + 1] -= d[i];
                }
                let et = energy(&trial);
                if et <= e {
                    th = trial;
                    e = et;
                    shift = (shift * 0.3).max(1e-12);
                    break;
                }
            }
            shift *= 10.0;
            if shift > 1e12 {
                return e;
            }
        }
    }
    e
}

fn quadratic_form() -> Check {
    let t = Instant::now();
    let law = MaterialLaw::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut skew: f64 = 0.0;
    for _ in 0..20 {
        let b = random_matrix(&mut rng);
        let s = b.sym();
        let exact = s.frob_norm_squared() + 3.0 * b.trace().powi(2);
        let q = extract_elastic_form(&law, &b, 1e-3).map_err(|e| e.to_string())?;
        worst = worst.max((q - exact).abs() / exact);
        skew = skew.max(extract_elastic_form(&law, &b.skew(), 1e-3).map_err(|e| e.to_string())?.abs());
    }
    let secs = t.elapsed().as_secs_f64();
    verdict(worst <= 1e-4 && skew <= 1e-6 && secs < 1.0, format!("max rel err {worst:.2e}, skew {skew:.2e}, {secs:.3}s"))
}

fn geodesic() -> Check {
    let t = Instant::now();
    let spec = AnisotropySpec::uniaxial(1.0, Vector3::unit(0)).map_err(|e| e.to_string())?;
    let mut ds = Vec::new();
    for level in 2..=5 {
        ds.push(geodesic_distance(&spec, &Vector3::unit(0), &-Vector3::unit(0), level).map_err(|e| e.to_string())?);
    }
    let monotone = ds.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let d5 = ds[3];
    let fields = WellDistanceFields::new(&spec, 5).map_err(|e| e.to_string())?;
    let f1 = (0..8)
        .map(|k| {
            let a = k as f64 * PI / 4.0 + 0.1;
            (fields.value(0, &Vector3::new(0.0, a.cos(), a.sin())) - 1.0).abs()
        })
        .fold(0.0, f64::max);
    let secs = t.elapsed().as_secs_f64();
    verdict(
        monotone && (d5 - 2.0).abs() <= 0.02 && f1 <= 0.01 && secs < 30.0,
        format!("d(a,-a) by level {ds:.5?}, equator |f1-1| {f1:.2e}, {secs:.1}s"),
    )
}

fn stray() -> Check {
    let t = Instant::now();
    let s = stray_check(64, 2, 0.25).map_err(|e| e.to_string())?;
    let secs = t.elapsed().as_secs_f64();
    verdict(
        s.interior_error <= 0.05 && s.energy_error() <= 0.05 && s.identity_residual <= 0.02 && secs < 60.0,
        format!(
            "interior {:.2}%, energy {:.2}%, identity {:.2}%, {secs:.1}s",
            100.0 * s.interior_error,
            100.0 * s.energy_error(),
            100.0 * s.identity_residual
        ),
    )
}

struct Gamma {
    eps: Vec<f64>,
    elastic: Vec<f64>,
    elastic_limit: f64,
    magnetic_per_area: Vec<f64>,
    sigma_per_area: f64,
    mu_l1: Vec<f64>,
    displacement_error: Vec<f64>,
    beta: f64,
    secs: f64,
}

fn gamma_run() -> Result<Gamma, String> {
    let t = Instant::now();
    let cfg = RawConfig::default().resolve(Some(Experiment::GammaStudy)).map_err(|e| e.to_string())?;
    let out = run(&cfg, false).map_err(|e| e.to_string())?;
    let table = out.table;
    assert_eq!(table.headers, GAMMA_HEADERS);
    let col = |n: &str| table.column(n).expect("column");
    Ok(Gamma {
        eps: col("eps"),
        elastic: col("elastic"),
        elastic_limit: col("elastic_limit")[0],
        magnetic_per_area: col("magnetic_per_area"),
        sigma_per_area: col("sigma_per_area")[0],
        mu_l1: col("mu_l1"),
        displacement_error: col("displacement_error"),
        beta: cfg.beta,
        secs: t.elapsed().as_secs_f64(),
    })
}

fn elastic_gap(g: &Gamma) -> Check {
    let gaps: Vec<f64> = g.elastic.iter().map(|e| (e - g.elastic_limit).abs()).collect();
    let shown: Vec<String> = gaps.iter().map(|x| format!("{x:.3e}")).collect();
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let order = slope(&g.eps, &gaps);
    let k = g.elastic.len();
    let richardson = 2.0 * g.elastic[k - 1] - g.elastic[k - 2];
    let rich_gap = (richardson - g.elastic_limit).abs() / g.elastic_limit;
    verdict(
        decreasing && order >= 0.8 && rich_gap <= 0.02 && g.secs < 120.0,
        format!("gaps [{}], order {order:.3}, Richardson gap {:.3}%, {:.1}s", shown.join(", "), 100.0 * rich_gap, g.secs),
    )
}

fn magnetic_cost(g: &Gamma) -> Check {
    let kappa = 4.0;
    let spec = AnisotropySpec::uniaxial(kappa, Vector3::unit(0)).map_err(|e| e.to_string())?;
    let d = geodesic_distance(&spec, &Vector3::unit(0), &-Vector3::unit(0), 5).map_err(|e| e.to_string())?;
    let c0 = angle_profile_cost(kappa, 8.0, 1601) / d;
    let target = c0 * d;
    let k = g.magnetic_per_area.len();
    let (a, b) = (g.magnetic_per_area[k - 2], g.magnetic_per_area[k - 1]);
    let spread = (a - b).abs() / b;
    let off = (b - target).abs() / target;
    verdict(
        spread <= 0.05 && off <= 0.05,
        format!(
            "per area {:.4?}, c0 = {c0:.4}, c0*d = {target:.4}, last-two spread {:.2}%, ratio to sigma {:.4}",
            g.magnetic_per_area,
            100.0 * spread,
            b / g.sigma_per_area
        ),
    )
}

fn recovery_rates(g: &Gamma) -> Check {
    let disp = g.displacement_error.iter().fold(0.0, |a: f64, b| a.max(*b));
    let exponent = slope(&g.eps, &g.mu_l1);
    verdict(
        disp == 0.0 && exponent >= 0.8 * g.beta && exponent <= 1.2 * g.beta,
        format!("displacement error {disp:e}, L1 exponent {exponent:.3} (beta {})", g.beta),
    )
}

fn young_bound() -> Check {
    let law = MaterialLaw::default();
    let spec = AnisotropySpec::uniaxial(4.0, Vector3::unit(0)).map_err(|e| e.to_string())?;
    let fields = WellDistanceFields::new(&spec, 5).map_err(|e| e.to_string())?;
    let cfg = RawConfig::default().resolve(Some(Experiment::GammaStudy)).map_err(|e| e.to_string())?;
    let grid = cfg.grid().map_err(|e| e.to_string())?;
    let limit = LimitState::new(cfg.displacement(&grid), cfg.label_field(&grid, 2).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let fam = RecoveryFamily::new(limit, cfg.eps.clone(), cfg.beta, &spec, &law).map_err(|e| e.to_string())?;
    let mut states: Vec<DiffuseState<f64>> = fam.states;
    // a descent trajectory end point as well
    let small = Grid::unit_cube(8).map_err(|e| e.to_string())?;
    let lam = LabelField::from_fn(small, 2, |x| usize::from(x[0] > 0.5)).map_err(|e| e.to_string())?;
    let init = build_recovery(&LimitState::new(VectorField::zeros(small), lam).map_err(|e| e.to_string())?, 0.1, 0.5, &spec, &law)
        .map_err(|e| e.to_string())?;
    let opts = DescentOptions { steps: 20, ..DescentOptions::default() };
    let f = AppliedField::Uniform(Vector3::new(0.3, 0.2, 0.0));
    let des = minimize_diffuse_descent(&init, &BoundarySpec::clamped_x_low(), &law, &spec, 0.0, &f, None, &opts)
        .map_err(|e| e.to_string())?;
    states.push(des.state);
    let mut worst = f64::NEG_INFINITY;
    for s in &states {
        let rest = DiffuseState::new(VectorField::zeros(*s.mu.grid()), s.mu.clone(), s.eps, s.beta, &law).map_err(|e| e.to_string())?;
        let lub = lub_estimator(&s.mu, &fields).map_err(|e| e.to_string())?;
        let half = 0.5 * magnetic_diffuse(&rest, &spec).map_err(|e| e.to_string())?.total();
        worst = worst.max(lub - half);
    }
    verdict(worst <= 1e-9, format!("{} states, max(lub - E/2) = {worst:.3e}", states.len()))
}

fn injectivity() -> Check {
    let grid = Grid::unit_cube(16).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut det_min = f64::INFINITY;
    let mut expansion: f64 = 0.0;
    let mut all_certified = true;
    let mut lips = Vec::new();
    for _ in 0..10 {
        let target = rng.gen_range(0.5..4.0);
        let k: Vec<(Vector3<f64>, Vector3<f64>, f64)> = (0..4)
            .map(|_| {
                let w = Vector3::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
                let a = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                (w, a, rng.gen_range(0.0..6.3))
            })
            .collect();
        let raw = VectorField::from_fn(grid, |x| k.iter().fold(Vector3::zero(), |acc, (w, a, p)| acc + *a * (w.dot(&x) + p).sin()));
        let norm = gradient(&raw).values().iter().map(|g| g.operator_norm()).fold(0.0, f64::max);
        let u = raw.map(|v| *v * (target / norm));
        let lip = gradient(&u).values().iter().map(|g| g.operator_norm()).fold(0.0, f64::max);
        lips.push(lip);
        let probe = build_deformation(&u, 1.0).map_err(|e| e.to_string())?;
        let eps = 1.0 / (2.0 * probe.lipschitz());
        let d = build_deformation(&u, eps).map_err(|e| e.to_string())?;
        all_certified &= d.is_certified();
        det_min = d.jacobians().into_iter().fold(det_min, f64::min);
        for g in d.displacement_gradient().values() {
            let e = determinant_expansion(g, eps);
            expansion = expansion.max((e.polynomial(eps) - e.det).abs());
        }
    }
    let in_range = lips.iter().all(|l| (0.5 - 1e-12..=4.0 + 1e-12).contains(l));
    verdict(
        all_certified && det_min > 0.0 && expansion <= 1e-13 && in_range,
        format!("10 fields, |Du| in [{:.2}, {:.2}], min det {det_min:.3}, expansion residual {expansion:.1e}", lips.iter().cloned().fold(f64::INFINITY, f64::min), lips.iter().cloned().fold(0.0, f64::max)),
    )
}

fn equilibrium() -> Check {
    let t = Instant::now();
    let law = MaterialLaw::default();
    let spec = AnisotropySpec::uniaxial(4.0, Vector3::unit(0)).map_err(|e| e.to_string())?;
    let grid = Grid::unit_cube(32).map_err(|e| e.to_string())?;
    let l = spontaneous_strain(&Vector3::unit(0), &law).map_err(|e| e.to_string())?;
    let m = LabelField::constant(grid, 0, 2).map_err(|e| e.to_string())?;
    let bc = BoundarySpec::new(vec![Face::X_LOW], Datum::Affine { a: l, c: Vector3::zero() }).map_err(|e| e.to_string())?;
    let compat = solve_elastic_equilibrium(&m, spec.wells(), &bc, &law, &law, None, 1e-10, 20_000).map_err(|e| e.to_string())?;
    // incompatible: clamped at zero with a tilted two-phase split of cubic wells
    let cubic = AnisotropySpec::cubic(1.0, 0.0, [Vector3::unit(0), Vector3::unit(1), Vector3::unit(2)]).map_err(|e| e.to_string())?;
    let twins = LabelField::from_fn(grid, 6, |x| usize::from(x[0] + 0.4 * x[1] > 0.6)).map_err(|e| e.to_string())?;
    let clamp = BoundarySpec::clamped_x_low();
    let res = solve_elastic_equilibrium(&twins, cubic.wells(), &clamp, &law, &law, None, 1e-8, 20_000).map_err(|e| e.to_string())?;
    let strains: Vec<Matrix3<f64>> = twins.labels().iter().map(|&k| spontaneous_strain(&cubic.wells()[k], &law).unwrap()).collect();
    let e0 = eigenstrain_energy(&res.u, &strains, &law).map_err(|e| e.to_string())?;
    let mask = clamp.mask(&grid);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let v: Vec<Vector3<f64>> = (0..grid.len())
            .map(|c| if mask[c] { Vector3::zero() } else { Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) })
            .collect();
        for s in [1e-3, -1e-3, 1e-1] {
            let w = VectorField::from_values(grid, res.u.values().iter().zip(&v).map(|(a, b)| *a + *b * s).collect()).map_err(|e| e.to_string())?;
            let e = eigenstrain_energy(&w, &strains, &law).map_err(|e| e.to_string())?;
            worst = worst.max((e0 - e) / e0);
        }
    }
    let secs = t.elapsed().as_secs_f64();
    verdict(
        compat.energy <= 1e-10 && worst <= 1e-8 && secs < 30.0,
        format!("compatible energy {:.2e}, largest relative drop {worst:.2e}, {secs:.1}s", compat.energy),
    )
}

fn almost_minimizers() -> Check {
    let t = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let raw = RawConfig { steps: Some(300), perturbation: Some(0.1), output: Some(dir.path().to_path_buf()), ..RawConfig::default() };
    let cfg = raw.resolve(Some(Experiment::AlmostMinStudy)).map_err(|e| e.to_string())?;
    let ok = cfg.n == 16 && cfg.lambda == 0.0 && cfg.anisotropy().map_err(|e| e.to_string())?.well_count() == 2;
    let report = run_experiment(&cfg, RunOptions::default()).map_err(|e| e.to_string())?;
    let rel = report.table.column("relative_gap").expect("column");
    let secs = t.elapsed().as_secs_f64();
    verdict(
        ok && rel.iter().all(|r| *r <= 0.15) && rel[1] < rel[0] && secs < 300.0,
        format!("relative gaps {rel:.4?} at eps {:?}, {secs:.1}s", cfg.eps),
    )
}

fn reproducible() -> Check {
    let mut same = true;
    let mut details = Vec::new();
    for (kind, raw) in [
        (Experiment::MinimizeDiffuse, RawConfig { n: Some(8), steps: Some(15), seed: Some(42), ..RawConfig::default() }),
        (Experiment::GammaStudy, RawConfig { n: Some(12), eps: Some(vec![0.2, 0.1]), ..RawConfig::default() }),
    ] {
        let mut bytes = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let cfg = RawConfig { output: Some(dir.path().to_path_buf()), ..raw.clone() }.resolve(Some(kind)).map_err(|e| e.to_string())?;
            let report = run_experiment(&cfg, RunOptions { snapshots: false, threads: Some(3) }).map_err(|e| e.to_string())?;
            bytes.push(fs::read(report.results).map_err(|e| e.to_string())?);
        }
        same &= bytes[0] == bytes[1] && !bytes[0].is_empty();
        details.push(format!("{} {} bytes", kind.name(), bytes[0].len()));
    }
    verdict(same, details.join(", "))
}

fn main() -> ExitCode {
    let gamma = gamma_run();
    let with_gamma = |f: fn(&Gamma) -> Check| match &gamma {
        Ok(g) => f(g),
        Err(e) => Err(e.clone()),
    };
    let checks: Vec<(&str, Check)> = vec![
        ("elastic quadratic form", quadratic_form()),
        ("geodesic distance", geodesic()),
        ("stray field ball", stray()),
        ("elastic recovery gap", with_gamma(elastic_gap)),
        ("magnetic transition cost", with_gamma(magnetic_cost)),
        ("recovery convergence", with_gamma(recovery_rates)),
        ("Young bound", young_bound()),
        ("injectivity certificate", injectivity()),
        ("elastic equilibrium", equilibrium()),
        ("almost minimizers", almost_minimizers()),
        ("reproducibility", reproducible()),
    ];
    let mut failed = 0;
    for (k, (name, res)) in checks.iter().enumerate() {
        match res {
            Ok(d) => println!("[PASS] {:>2} {name}: {d}", k + 1),
            Err(d) => {
                failed += 1;
                println!("[FAIL] {:>2} {name}: {d}", k + 1)
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
