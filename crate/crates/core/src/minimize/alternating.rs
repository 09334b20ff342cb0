use super::elastic::solve_elastic_equilibrium;
use crate::energy::{total_limit, AppliedField, LimitState};
use crate::error::{validation, Result};
use crate::grid::{symmetric_gradient, BoundarySpec, LabelField, MatrixField, VectorField};
use crate::maxwell::StraySolver;
use crate::scalar::Real;
use crate::tensor::{spontaneous_strain, AnisotropySpec, Matrix3, MaterialLaw, StoredEnergy, Vector3};

/// Settings for [`minimize_limit_alternating`].
#[derive(Clone, Copy, Debug)]
pub struct AlternatingOptions<T> {
    pub rounds: usize,
    pub cg_tol: T,
    pub cg_max_iter: usize,
}

impl<T: Real> Default for AlternatingOptions<T> {
    fn default() -> Self {
        Self { rounds: 50, cg_tol: T::lit(1e-8), cg_max_iter: 20_000 }
    }
}

/// One completed equilibrium + sweep round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundRecord<T> {
    pub round: usize,
    pub energy: T,
    pub flips: usize,
    pub cg_iterations: usize,
}

#[derive(Clone, Debug)]
pub struct AlternatingResult<T> {
    pub state: LimitState<T>,
    pub energy: T,
    pub history: Vec<RoundRecord<T>>,
}

struct Local<'a, T: Real> {
    m: &'a LabelField<T>,
    eu: &'a MatrixField<T>,
    strains: &'a [Matrix3<T>],
    wells: &'a [Vector3<T>],
    sigma: &'a [Vec<T>],
    lambda: T,
    /// Frozen stray field on body cells.
    h: Option<&'a [Vector3<T>]>,
    f: &'a AppliedField<T>,
}

/// Change of `G` when cell `c` switches to label `to`, with `u` and the stray
/// field frozen: local elastic change, tension-weighted face terms, the stray
/// increment `λV(|δ|²/3 − 2h·δ)` and the Zeeman work.
fn flip_gain<T: Real, W: StoredEnergy<T> + ?Sized>(loc: &Local<'_, T>, w: &W, c: usize, to: usize) -> T {
    let grid = loc.m.grid();
    let from = loc.m.get(c);
    if from == to {
        return T::zero();
    }
    let vol = grid.cell_volume();
    let e = loc.eu.values()[c];
    let elastic = T::lit(0.5) * vol * (w.quadratic_form(&(e - loc.strains[to])) - w.quadratic_form(&(e - loc.strains[from])));
    let mut faces = T::zero();
    for axis in 0..3 {
        for dir in [-1, 1] {
            if let Some(nb) = grid.neighbor(c, axis, dir) {
                let l = loc.m.get(nb);
                faces = faces + (loc.sigma[to][l] - loc.sigma[from][l]) * grid.face_area(axis);
            }
        }
    }
    let delta = loc.wells[to] - loc.wells[from];
    let stray = match loc.h {
        Some(h) if loc.lambda > T::zero() => {
            loc.lambda * vol * (delta.norm_squared() / T::lit(3.0) - T::lit(2.0) * h[c].dot(&delta))
        }
        _ => T::zero(),
    };
    let zeeman = loc.f.at(&grid.center(c)).dot(&delta) * vol;
    elastic + faces + stray - zeeman
}

/// Change of `G` for a single-cell relabeling at fixed `u` (no stray term).
#[allow(clippy::too_many_arguments)]
pub fn local_flip_gain<T: Real>(
    state: &LimitState<T>,
    law: &MaterialLaw<T>,
    spec: &AnisotropySpec<T>,
    sigma: &[Vec<T>],
    f: &AppliedField<T>,
    c: usize,
    to: usize,
) -> Result<T> {
    let strains = spec.wells().iter().map(|b| spontaneous_strain(b, law)).collect::<Result<Vec<_>>>()?;
    let eu = symmetric_gradient(&state.u);
    let loc = Local { m: &state.m, eu: &eu, strains: &strains, wells: spec.wells(), sigma, lambda: T::zero(), h: None, f };
    Ok(flip_gain(&loc, law, c, to))
}

fn body_field<T: Real>(solver: &StraySolver<T>, m: &LabelField<T>, wells: &[Vector3<T>]) -> Result<Vec<Vector3<T>>> {
    let z = solver.datum(None, &m.to_vectors(wells))?;
    let sol = solver.solve(&z)?;
    Ok((0..m.grid().len()).map(|c| sol.h.values()[solver.padded_index(c)]).collect())
}

/// Alternates elastic equilibrium at fixed labels with one red-black sweep of
/// greedy single-cell relabelings. A round that raises `G` is undone and ends
/// the iteration; so does a sweep without flips.
#[allow(clippy::too_many_arguments)]
pub fn minimize_limit_alternating<T: Real>(
    init: &LimitState<T>,
    boundary: &BoundarySpec<T>,
    law: &MaterialLaw<T>,
    spec: &AnisotropySpec<T>,
    sigma: &[Vec<T>],
    lambda: T,
    f: &AppliedField<T>,
    solver: Option<&StraySolver<T>>,
    options: &AlternatingOptions<T>,
) -> Result<AlternatingResult<T>> {
    crate::energy::check_tension_table(sigma, spec.well_count())?;
    if lambda > T::zero() && solver.is_none() {
        return validation("a positive stray weight needs a stray-field solver");
    }
    let wells = spec.wells();
    let strains = wells.iter().map(|b| spontaneous_strain(b, law)).collect::<Result<Vec<_>>>()?;
    let grid = *init.m.grid();
    let order: Vec<usize> = (0..2)
        .flat_map(|color| {
            (0..grid.len()).filter(move |&c| {
                let cc = grid.coords(c);
                (cc[0] + cc[1] + cc[2]) % 2 == color
            })
        })
        .collect();
    let mut m = init.m.clone();
    let mut u: VectorField<T> = init.u.clone();
    let mut history = Vec::new();
    let mut best: Option<(LimitState<T>, T)> = None;
    for round in 0..options.rounds.max(1) {
        let eq = solve_elastic_equilibrium(&m, wells, boundary, law, law, Some(&u), options.cg_tol, options.cg_max_iter)?;
        u = eq.u;
        let state = LimitState::new(u.clone(), m.clone())?;
        let g = total_limit(&state, law, spec, sigma, lambda, f, solver)?.total();
        if let Some((prev, pg)) = &best {
            if g > *pg {
                let (s, e) = (prev.clone(), *pg);
                return Ok(AlternatingResult { state: s, energy: e, history });
            }
        }
        best = Some((state, g));
        let eu = symmetric_gradient(&u);
        let h = match solver {
            Some(s) if lambda > T::zero() => Some(body_field(s, &m, wells)?),
            _ => None,
        };
        let tiny = T::lit(1e-14) * grid.cell_volume();
        let mut flips = 0;
        for &c in &order {
            let loc = Local { m: &m, eu: &eu, strains: &strains, wells, sigma, lambda, h: h.as_deref(), f };
            let mut choice = None;
            let mut gain = -tiny;
            for to in 0..wells.len() {
                let d = flip_gain(&loc, law, c, to);
                if d < gain {
                    gain = d;
                    choice = Some(to);
                }
            }
            if let Some(to) = choice {
                m.set(c, to);
                flips += 1;
            }
        }
        history.push(RoundRecord { round, energy: g, flips, cg_iterations: eq.iterations });
        if flips == 0 {
            break;
        }
    }
    let (state, energy) = best.expect("at least one round");
    if history.last().is_some_and(|r| r.flips > 0) {
        // labels changed after the last equilibrium; re-equilibrate and keep if not worse
        let eq = solve_elastic_equilibrium(&m, wells, boundary, law, law, Some(&u), options.cg_tol, options.cg_max_iter)?;
        let cand = LimitState::new(eq.u, m)?;
        let g = total_limit(&cand, law, spec, sigma, lambda, f, solver)?.total();
        if g <= energy {
            return Ok(AlternatingResult { state: cand, energy: g, history });
        }
    }
    Ok(AlternatingResult { state, energy, history })
}
