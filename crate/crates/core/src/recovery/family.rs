use rayon::prelude::*;

use super::distance::interface_distance;
use crate::energy::{
    elastic_diffuse, magnetic_diffuse, total_limit, zeeman_diffuse, AppliedField, DiffuseState, LimitState,
};
use crate::error::{validation, Result};
use crate::geodesy::{geodesic_path, surface_tension_table, GeodesicPath, TransitionProfile};
use crate::grid::{build_deformation, gradient, integrate_values, interface_area, VectorField};
use crate::maxwell::{stray_energy, StraySolver};
use crate::scalar::Real;
use crate::tensor::{AnisotropySpec, MaterialLaw};

const PATH_LEVEL: usize = 5;
const PROFILE_SAMPLES: usize = 257;

/// Geodesic paths between the well pairs meeting in a label field; profiles
/// for any `(ε, β)` are derived from them without recomputing the geodesics.
#[derive(Clone, Debug)]
pub struct ProfileSet<T> {
    spec: AnisotropySpec<T>,
    paths: Vec<((usize, usize), GeodesicPath<T>)>,
}

impl<T: Real> ProfileSet<T> {
    /// Paths for every unordered pair `(i, j)`, `i < j`, in `pairs`.
    pub fn new(spec: &AnisotropySpec<T>, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut keys: Vec<(usize, usize)> = pairs.iter().map(|&(i, j)| (i.min(j), i.max(j))).filter(|(i, j)| i != j).collect();
        keys.sort_unstable();
        keys.dedup();
        let paths = keys
            .into_iter()
            .map(|(i, j)| Ok(((i, j), geodesic_path(spec, &spec.wells()[i], &spec.wells()[j], PATH_LEVEL)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { spec: spec.clone(), paths })
    }

    /// Paths for the pairs adjacent somewhere in `m`.
    pub fn for_labels(spec: &AnisotropySpec<T>, m: &crate::grid::LabelField<T>) -> Result<Self> {
        let k = spec.well_count();
        let mut pairs = Vec::new();
        for i in 0..k {
            for j in (i + 1)..k {
                if interface_area(m, i, j) > T::zero() {
                    pairs.push((i, j));
                }
            }
        }
        Self::new(spec, &pairs)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.paths.iter().map(|(k, _)| *k).collect()
    }

    pub fn profiles(&self, eps: T, beta: T) -> Result<Vec<((usize, usize), TransitionProfile<T>)>> {
        self.paths
            .iter()
            .map(|(k, p)| Ok((*k, TransitionProfile::from_path(&self.spec, p, eps, beta, PROFILE_SAMPLES)?)))
            .collect()
    }

    /// Recovery state for `limit` at `(ε, β)`.
    pub fn recover(&self, limit: &LimitState<T>, eps: T, beta: T, law: &MaterialLaw<T>) -> Result<DiffuseState<T>> {
        let def = build_deformation(&limit.u, eps)?;
        def.require_certified()?;
        let profiles = self.profiles(eps, beta)?;
        let wells = self.spec.wells();
        let near = interface_distance(&limit.m);
        let labels = limit.m.labels();
        let mut mu = Vec::with_capacity(labels.len());
        for (c, &l) in labels.iter().enumerate() {
            let well = wells[l];
            let value = match near.nearest[c] {
                None => well,
                Some((d, partner)) => {
                    let key = (l.min(partner), l.max(partner));
                    let prof = match profiles.iter().find(|(k, _)| *k == key) {
                        Some((_, p)) => p,
                        None => return validation(format!("no transition profile for wells {} and {}", key.0, key.1)),
                    };
                    if d >= prof.half_width() {
                        well
                    } else {
                        let s = if l == key.0 { -d } else { d };
                        prof.evaluate(s)
                    }
                }
            };
            mu.push(value);
        }
        let mu = VectorField::from_values(*limit.u.grid(), mu)?;
        DiffuseState::new(limit.u.clone(), mu, eps, beta, law)
    }
}

/// Recovery state `(y_ε, μ_ε)` with `y_ε = id + εu` and `μ_ε` the wells with
/// optimal transition layers of half-width `Θε^β` at the interfaces.
pub fn build_recovery<T: Real>(
    limit: &LimitState<T>,
    eps: T,
    beta: T,
    spec: &AnisotropySpec<T>,
    law: &MaterialLaw<T>,
) -> Result<DiffuseState<T>> {
    ProfileSet::for_labels(spec, &limit.m)?.recover(limit, eps, beta, law)
}

/// A limit state with its recovery states along a decreasing ε schedule.
#[derive(Clone, Debug)]
pub struct RecoveryFamily<T> {
    pub base: LimitState<T>,
    pub schedule: Vec<T>,
    pub beta: T,
    pub states: Vec<DiffuseState<T>>,
}

impl<T: Real> RecoveryFamily<T> {
    pub fn new(
        base: LimitState<T>,
        schedule: Vec<T>,
        beta: T,
        spec: &AnisotropySpec<T>,
        law: &MaterialLaw<T>,
    ) -> Result<Self> {
        check_schedule(&schedule)?;
        law.check_beta(beta)?;
        let set = ProfileSet::for_labels(spec, &base.m)?;
        let states = schedule.iter().map(|&e| set.recover(&base, e, beta, law)).collect::<Result<Vec<_>>>()?;
        Ok(Self { base, schedule, beta, states })
    }
}

fn check_schedule<T: Real>(schedule: &[T]) -> Result<()> {
    if schedule.is_empty() {
        return validation("epsilon schedule is empty");
    }
    if schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return validation("epsilon schedule must be strictly decreasing");
    }
    if schedule.iter().any(|e| !(*e > T::zero())) {
        return validation("epsilon schedule must be positive");
    }
    Ok(())
}

/// One row of a convergence table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaRow<T> {
    pub eps: T,
    pub elastic: T,
    pub anisotropy: T,
    pub exchange: T,
    pub stray: T,
    pub zeeman: T,
    pub elastic_limit: T,
    pub magnetic_limit: T,
    pub stray_limit: T,
    pub zeeman_limit: T,
    /// `‖μ_ε − b_m‖_{L¹}`
    pub mu_l1: T,
    /// `‖(y_ε − id)/ε − u‖_{W^{1,2}}`
    pub displacement_error: T,
    /// Volume of cells where `μ_ε` differs from the well.
    pub layer_volume: T,
}

impl<T: Real> GammaRow<T> {
    pub fn magnetic(&self) -> T {
        self.anisotropy + self.exchange
    }
}

/// Convergence table with the tension table and per-pair interface data.
#[derive(Clone, Debug)]
pub struct GammaStudy<T> {
    pub beta: T,
    pub lambda: T,
    pub rows: Vec<GammaRow<T>>,
    pub sigma: Vec<Vec<T>>,
    /// `((i, j), face-count area, profile cost per unit area)`
    pub interfaces: Vec<((usize, usize), T, T)>,
}

/// Energies of the recovery family along `schedule` next to the limit energies.
#[allow(clippy::too_many_arguments)]
pub fn gamma_study<T: Real>(
    limit: &LimitState<T>,
    schedule: &[T],
    beta: T,
    law: &MaterialLaw<T>,
    spec: &AnisotropySpec<T>,
    lambda: T,
    f: &AppliedField<T>,
    solver: Option<&StraySolver<T>>,
) -> Result<GammaStudy<T>> {
    check_schedule(schedule)?;
    law.check_beta(beta)?;
    let sigma = surface_tension_table(spec, PATH_LEVEL)?;
    let lim = total_limit(limit, law, spec, &sigma, lambda, f, solver)?;
    let set = ProfileSet::for_labels(spec, &limit.m)?;
    let wells = spec.wells();
    let sharp = limit.m.to_vectors(wells);
    let grid = *limit.u.grid();
    let mut rows = Vec::with_capacity(schedule.len());
    for &eps in schedule {
        let state = set.recover(limit, eps, beta, law)?;
        let mag = magnetic_diffuse(&state, spec)?;
        let def = build_deformation(&state.u, eps)?;
        let stray = if lambda > T::zero() {
            let solver = solver.ok_or_else(|| crate::Error::Validation("a positive stray weight needs a stray-field solver".into()))?;
            let z = solver.datum(Some(&def), &state.mu)?;
            stray_energy(&solver.solve(&z)?, &z)?.energy
        } else {
            T::zero()
        };
        let diff: Vec<T> = state.mu.values().par_iter().zip(sharp.values()).map(|(a, b)| (*a - *b).norm()).collect();
        let layer: Vec<T> = diff.iter().map(|&d| if d > T::lit(1e-12) { T::one() } else { T::zero() }).collect();
        rows.push(GammaRow {
            eps,
            elastic: elastic_diffuse(&state, law)?,
            anisotropy: mag.anisotropy,
            exchange: mag.exchange,
            stray,
            zeeman: zeeman_diffuse(&state, f)?,
            elastic_limit: lim.elastic,
            magnetic_limit: lim.magnetic,
            stray_limit: lim.stray,
            zeeman_limit: lim.zeeman,
            mu_l1: integrate_values(&grid, &diff)?,
            displacement_error: w12_distance(def.displacement(), &limit.u)?,
            layer_volume: integrate_values(&grid, &layer)?,
        });
    }
    let probe = set.profiles(schedule[schedule.len() - 1], beta)?;
    let interfaces = probe.iter().map(|((i, j), p)| ((*i, *j), interface_area(&limit.m, *i, *j), p.cost())).collect();
    Ok(GammaStudy { beta, lambda, rows, sigma, interfaces })
}

/// `‖a − b‖_{W^{1,2}}` with the discrete gradient.
fn w12_distance<T: Real>(a: &VectorField<T>, b: &VectorField<T>) -> Result<T> {
    let d = VectorField::from_values(*a.grid(), a.values().iter().zip(b.values()).map(|(x, y)| *x - *y).collect())?;
    let g = gradient(&d);
    let dens: Vec<T> = d.values().iter().zip(g.values()).map(|(v, m)| v.norm_squared() + m.frob_norm_squared()).collect();
    Ok(integrate_values(a.grid(), &dens)?.sqrt())
}
