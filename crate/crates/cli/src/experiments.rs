use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use magel::energy::{total_limit, DiffuseState, LimitState};
use magel::geodesy::{geodesic_distance, great_circle_action, surface_tension_table};
use magel::grid::{Grid, VectorField, VtkData};
use magel::maxwell::{stray_energy, StraySolver};
use magel::minimize::{minimize_diffuse_descent, minimize_limit_alternating, AlternatingOptions, DescentOptions};
use magel::recovery::{build_recovery, gamma_study, RecoveryFamily};
use magel::tensor::Vector3;
use magel::Result;

use crate::config::{Experiment, ExperimentConfig};

/// CSV table: fixed headers and formatted rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Column `name` parsed back to numbers.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.headers.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k].parse().unwrap_or(f64::NAN)).collect())
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn int(x: usize) -> String {
    x.to_string()
}

/// A field snapshot to be written as `<name>.vtk`.
pub struct Snapshot {
    pub name: String,
    pub grid: Grid<f64>,
    pub vectors: Vec<(String, VectorField<f64>)>,
    pub labels: Option<Vec<usize>>,
}

impl Snapshot {
    pub fn data(&self) -> Vec<VtkData<'_, f64>> {
        let mut d: Vec<VtkData<'_, f64>> = self.vectors.iter().map(|(n, v)| VtkData::Vectors(n, v.values())).collect();
        if let Some(l) = &self.labels {
            d.push(VtkData::Labels("labels", l));
        }
        d
    }
}

pub struct Outcome {
    pub table: Table,
    pub snapshots: Vec<Snapshot>,
}

pub fn run(cfg: &ExperimentConfig, snapshots: bool) -> Result<Outcome> {
    match cfg.experiment {
        Experiment::GammaStudy => gamma(cfg, snapshots),
        Experiment::StrayCheck => Ok(Outcome { table: stray_table(cfg)?, snapshots: Vec::new() }),
        Experiment::Geodesic => Ok(Outcome { table: geodesic(cfg)?, snapshots: Vec::new() }),
        Experiment::MinimizeLimit => minimize_limit(cfg, snapshots),
        Experiment::MinimizeDiffuse => minimize_diffuse(cfg, snapshots),
        Experiment::AlmostMinStudy => Ok(Outcome { table: almost_min(cfg)?, snapshots: Vec::new() }),
    }
}

fn limit_state(cfg: &ExperimentConfig) -> Result<LimitState<f64>> {
    let grid = cfg.grid()?;
    let spec = cfg.anisotropy()?;
    LimitState::new(cfg.displacement(&grid), cfg.label_field(&grid, spec.well_count())?)
}

fn solver(cfg: &ExperimentConfig) -> Result<Option<StraySolver<f64>>> {
    if cfg.lambda > 0.0 {
        Ok(Some(StraySolver::new(&cfg.grid()?, cfg.padding)?))
    } else {
        Ok(None)
    }
}

pub const GAMMA_HEADERS: [&str; 21] = [
    "eps",
    "beta",
    "elastic",
    "anisotropy",
    "exchange",
    "magnetic",
    "stray",
    "zeeman",
    "total",
    "elastic_limit",
    "magnetic_limit",
    "stray_limit",
    "zeeman_limit",
    "total_limit",
    "elastic_gap",
    "interface_area",
    "magnetic_per_area",
    "profile_cost_per_area",
    "sigma_per_area",
    "mu_l1",
    "displacement_error",
];

fn gamma(cfg: &ExperimentConfig, snapshots: bool) -> Result<Outcome> {
    let law = cfg.law()?;
    let spec = cfg.anisotropy()?;
    let limit = limit_state(cfg)?;
    let solver = solver(cfg)?;
    let study = gamma_study(&limit, &cfg.eps, cfg.beta, &law, &spec, cfg.lambda, &cfg.field(), solver.as_ref())?;
    let area: f64 = study.interfaces.iter().map(|x| x.1).sum();
    let cost = study.interfaces.iter().map(|x| x.1 * x.2).sum::<f64>();
    let sigma = study.interfaces.iter().map(|((i, j), a, _)| study.sigma[*i][*j] * a).sum::<f64>();
    let per_area = |x: f64| if area > 0.0 { x / area } else { f64::NAN };
    let mut table = Table::new(&GAMMA_HEADERS);
    for r in &study.rows {
        let total = r.elastic + r.magnetic() + cfg.lambda * r.stray - r.zeeman;
        let total_limit = r.elastic_limit + r.magnetic_limit + cfg.lambda * r.stray_limit - r.zeeman_limit;
        table.push(vec![
            num(r.eps),
            num(cfg.beta),
            num(r.elastic),
            num(r.anisotropy),
            num(r.exchange),
            num(r.magnetic()),
            num(r.stray),
            num(r.zeeman),
            num(total),
            num(r.elastic_limit),
            num(r.magnetic_limit),
            num(r.stray_limit),
            num(r.zeeman_limit),
            num(total_limit),
            num((r.elastic - r.elastic_limit).abs()),
            num(area),
            num(per_area(r.magnetic())),
            num(per_area(cost)),
            num(per_area(sigma)),
            num(r.mu_l1),
            num(r.displacement_error),
        ]);
    }
    let mut snaps = Vec::new();
    if snapshots {
        let fam = RecoveryFamily::new(limit.clone(), cfg.eps.clone(), cfg.beta, &spec, &law)?;
        for (k, st) in fam.states.iter().enumerate() {
            snaps.push(Snapshot {
                name: format!("recovery_{k:02}"),
                grid: *st.mu.grid(),
                vectors: vec![("mu".into(), st.mu.clone()), ("u".into(), st.u.clone())],
                labels: Some(limit.m.labels().to_vec()),
            });
        }
    }
    Ok(Outcome { table, snapshots: snaps })
}

/// One `stray-check` measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrayCheck {
    pub n: usize,
    pub padding: usize,
    pub radius: f64,
    pub interior_error: f64,
    pub energy: f64,
    pub exact_energy: f64,
    pub identity_residual: f64,
}

impl StrayCheck {
    pub fn energy_error(&self) -> f64 {
        (self.energy - self.exact_energy).abs() / self.exact_energy
    }
}

/// Ball of radius `r` centered in the unit cube, magnetized along `e₁`, with
/// cell values weighted by the volume fraction from `4³` subsamples.
pub fn ball_magnetization(grid: &Grid<f64>, radius: f64) -> VectorField<f64> {
    let c = Vector3::splat(0.5);
    let h = grid.spacing();
    VectorField::from_fn(*grid, move |x| {
        let mut inside = 0usize;
        for a in 0..4 {
            for b in 0..4 {
                for d in 0..4 {
                    let o = Vector3::new(
                        (a as f64 - 1.5) / 4.0 * h[0],
                        (b as f64 - 1.5) / 4.0 * h[1],
                        (d as f64 - 1.5) / 4.0 * h[2],
                    );
                    if (x + o - c).norm() < radius {
                        inside += 1;
                    }
                }
            }
        }
        Vector3::unit(0) * (inside as f64 / 64.0)
    })
}

/// Uniformly magnetized ball: interior field against `−m/3` (cells farther
/// than two cells from the sphere), energy against `(4π/9)R³`.
pub fn stray_check(n: usize, padding: usize, radius: f64) -> Result<StrayCheck> {
    let grid = Grid::unit_cube(n)?;
    let solver = StraySolver::new(&grid, padding)?;
    let mu = ball_magnetization(&grid, radius);
    let zeta = solver.datum(None, &mu)?;
    let sol = solver.solve(&zeta)?;
    let e = stray_energy(&sol, &zeta)?;
    let c = Vector3::splat(0.5);
    let shell = 2.0 * grid.spacing()[0];
    let target = Vector3::new(-1.0 / 3.0, 0.0, 0.0);
    let pg = solver.padded_grid();
    let mut err: f64 = 0.0;
    for p in 0..pg.len() {
        if (pg.center(p) - c).norm() < radius - shell {
            err = err.max((sol.h.values()[p] - target).abs_max() * 3.0);
        }
    }
    Ok(StrayCheck {
        n,
        padding,
        radius,
        interior_error: err,
        energy: e.energy,
        exact_energy: 4.0 * std::f64::consts::PI / 9.0 * radius.powi(3),
        identity_residual: e.identity_residual,
    })
}

fn stray_table(cfg: &ExperimentConfig) -> Result<Table> {
    let s = stray_check(cfg.n, cfg.padding, cfg.radius)?;
    let mut t = Table::new(&["n", "padding", "radius", "interior_error", "energy", "exact_energy", "energy_error", "identity_residual"]);
    t.push(vec![
        int(s.n),
        int(s.padding),
        num(s.radius),
        num(s.interior_error),
        num(s.energy),
        num(s.exact_energy),
        num(s.energy_error()),
        num(s.identity_residual),
    ]);
    Ok(t)
}

fn geodesic(cfg: &ExperimentConfig) -> Result<Table> {
    let spec = cfg.anisotropy()?;
    let wells = spec.wells();
    let mut t = Table::new(&["i", "j", "level", "distance", "great_circle"]);
    for i in 0..wells.len() {
        for j in (i + 1)..wells.len() {
            let gc = if wells[i].dot(&wells[j]) > -1.0 + 1e-9 { great_circle_action(&spec, &wells[i], &wells[j], 4096) } else { f64::NAN };
            for level in 2..=cfg.level {
                let d = geodesic_distance(&spec, &wells[i], &wells[j], level)?;
                t.push(vec![int(i), int(j), int(level), num(d), num(gc)]);
            }
        }
    }
    Ok(t)
}

fn alternating(cfg: &ExperimentConfig) -> Result<(magel::minimize::AlternatingResult<f64>, Vec<Vec<f64>>)> {
    let law = cfg.law()?;
    let spec = cfg.anisotropy()?;
    let sigma = surface_tension_table(&spec, cfg.level)?;
    let solver = solver(cfg)?;
    let init = limit_state(cfg)?;
    let opts = AlternatingOptions { rounds: cfg.rounds, ..Default::default() };
    let res = minimize_limit_alternating(&init, &cfg.boundary()?, &law, &spec, &sigma, cfg.lambda, &cfg.field(), solver.as_ref(), &opts)?;
    Ok((res, sigma))
}

fn minimize_limit(cfg: &ExperimentConfig, snapshots: bool) -> Result<Outcome> {
    let (res, _) = alternating(cfg)?;
    let mut t = Table::new(&["round", "energy", "flips", "cg_iterations"]);
    for r in &res.history {
        t.push(vec![int(r.round), num(r.energy), int(r.flips), int(r.cg_iterations)]);
    }
    t.push(vec!["final".into(), num(res.energy), int(0), int(0)]);
    let snaps = if snapshots {
        vec![Snapshot {
            name: "limit_minimizer".into(),
            grid: *res.state.u.grid(),
            vectors: vec![("u".into(), res.state.u.clone())],
            labels: Some(res.state.m.labels().to_vec()),
        }]
    } else {
        Vec::new()
    };
    Ok(Outcome { table: t, snapshots: snaps })
}

/// Adds `p·r` with `r` uniform in `[−1, 1]³` to every `μ` and renormalizes.
pub fn perturb(state: &mut DiffuseState<f64>, amplitude: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for m in state.mu.values_mut() {
        let r = Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        *m = (*m + r * amplitude).normalized().unwrap_or(*m);
    }
}

fn descend(cfg: &ExperimentConfig, limit: &LimitState<f64>, eps: f64) -> Result<magel::minimize::DescentResult<f64>> {
    let law = cfg.law()?;
    let spec = cfg.anisotropy()?;
    let solver = solver(cfg)?;
    let mut st = build_recovery(limit, eps, cfg.beta, &spec, &law)?;
    perturb(&mut st, cfg.perturbation, cfg.seed);
    let opts = DescentOptions { steps: cfg.steps, step: cfg.step, ..Default::default() };
    minimize_diffuse_descent(&st, &cfg.boundary()?, &law, &spec, cfg.lambda, &cfg.field(), solver.as_ref(), &opts)
}

fn minimize_diffuse(cfg: &ExperimentConfig, snapshots: bool) -> Result<Outcome> {
    let limit = limit_state(cfg)?;
    let res = descend(cfg, &limit, cfg.eps[0])?;
    let mut t = Table::new(&["step", "energy"]);
    for (k, e) in res.history.iter().enumerate() {
        t.push(vec![int(k), num(*e)]);
    }
    let snaps = if snapshots {
        vec![Snapshot {
            name: "diffuse_descent".into(),
            grid: *res.state.u.grid(),
            vectors: vec![("mu".into(), res.state.mu.clone()), ("u".into(), res.state.u.clone())],
            labels: None,
        }]
    } else {
        Vec::new()
    };
    Ok(Outcome { table: t, snapshots: snaps })
}

pub const ALMOST_MIN_HEADERS: [&str; 8] =
    ["eps", "limit_energy", "diffuse_energy", "gap", "relative_gap", "steps", "accepted_u", "accepted_mu"];

fn almost_min(cfg: &ExperimentConfig) -> Result<Table> {
    let (res, sigma) = alternating(cfg)?;
    let law = cfg.law()?;
    let spec = cfg.anisotropy()?;
    let solver = solver(cfg)?;
    let g = total_limit(&res.state, &law, &spec, &sigma, cfg.lambda, &cfg.field(), solver.as_ref())?.total();
    let mut t = Table::new(&ALMOST_MIN_HEADERS);
    for &eps in &cfg.eps {
        let d = descend(cfg, &res.state, eps)?;
        let ge = d.breakdown.total();
        t.push(vec![
            num(eps),
            num(g),
            num(ge),
            num((ge - g).abs()),
            num((ge - g).abs() / g.abs().max(f64::MIN_POSITIVE)),
            int(d.history.len() - 1),
            int(d.accepted_u),
            int(d.accepted_mu),
        ]);
    }
    Ok(t)
}
