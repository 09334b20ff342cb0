use rayon::prelude::*;

use crate::energy::{total_diffuse, AppliedField, DiffuseState, EnergyBreakdown};
use crate::error::{validation, Error, Result};
use crate::grid::{build_deformation, gradient, gradient_adjoint, BoundarySpec, MatrixField};
use crate::maxwell::StraySolver;
use crate::scalar::{KahanSum, Real};
use crate::tensor::{scaled_constants, AnisotropySpec, MaterialLaw, Matrix3, StoredEnergy, Vector3};

/// Settings for [`minimize_diffuse_descent`].
#[derive(Clone, Copy, Debug)]
pub struct DescentOptions<T> {
    pub steps: usize,
    /// Initial step for both blocks; adapted by doubling on success and
    /// halving on rejection.
    pub step: T,
    pub max_halvings: usize,
}

impl<T: Real> Default for DescentOptions<T> {
    fn default() -> Self {
        Self { steps: 200, step: T::lit(1e-3), max_halvings: 40 }
    }
}

#[derive(Clone, Debug)]
pub struct DescentResult<T> {
    pub state: DiffuseState<T>,
    pub breakdown: EnergyBreakdown<T>,
    /// Total energy before the first and after every step.
    pub history: Vec<T>,
    pub accepted_u: usize,
    pub accepted_mu: usize,
}

/// Gradient densities of `G_ε` (per unit cell volume) in the nodal values of
/// `u` and `μ`. The `μ` part is not projected to the sphere.
#[derive(Clone, Debug)]
pub struct DiffuseGradient<T> {
    pub u: Vec<Vector3<T>>,
    pub mu: Vec<Vector3<T>>,
}

/// Analytic gradient of the discrete diffuse total. The stray contribution is
/// linearized with the field frozen: `∂H/∂μ_c ≈ −2 h(y_c)`; its dependence on
/// `u` through the rasterized image is not differentiated.
pub fn diffuse_gradient<T: Real>(
    state: &DiffuseState<T>,
    law: &MaterialLaw<T>,
    spec: &AnisotropySpec<T>,
    lambda: T,
    f: &AppliedField<T>,
    solver: Option<&StraySolver<T>>,
) -> Result<DiffuseGradient<T>> {
    let def = build_deformation(&state.u, state.eps)?;
    def.require_certified()?;
    let grid = *state.u.grid();
    let eps = state.eps;
    let (ae, be) = scaled_constants(eps, law)?;
    let gamma = T::one() / ae - T::one() / be;
    let inv_eps2 = T::one() / (eps * eps);
    let wb = eps.powf(state.beta);
    let dmu = gradient(&state.mu);
    let stray_h: Option<Vec<Vector3<T>>> = match solver {
        Some(s) if lambda > T::zero() => {
            let z = s.datum(Some(&def), &state.mu)?;
            let sol = s.solve(&z)?;
            let pg = s.padded_grid();
            Some(
                (0..grid.len())
                    .map(|c| pg.locate(&def.position(c)).map_or(Vector3::zero(), |p| sol.h.values()[p]))
                    .collect(),
            )
        }
        _ => None,
    };
    let per_cell: Vec<(Matrix3<T>, Matrix3<T>, Vector3<T>, Vector3<T>)> = (0..grid.len())
        .into_par_iter()
        .map(|c| {
            let fm = def.gradient_at(c);
            let det = fm.det();
            let finv = match fm.inverse() {
                Some(x) if det > T::zero() => x,
                _ => return Err(Error::Numeric(format!("deformation gradient is singular at cell {c}"))),
            };
            let cof = fm.cofactor();
            let mu = state.mu.values()[c];
            let mm = Matrix3::outer(&mu, &mu);
            let linv = Matrix3::identity() * (T::one() / be) + mm * gamma;
            let p = law
                .piola(&(linv * fm))
                .ok_or_else(|| Error::Numeric(format!("stored energy is infinite at cell {c}")))?;
            // elastic
            let mut d_f = linv * p * inv_eps2;
            let s = p * fm.transpose();
            let mut d_mu = (s + s.transpose()).mul_vec(&mu) * (gamma * inv_eps2);
            // anisotropy
            let z = fm.tr_mul_vec(&mu);
            let phi = spec.phi(&z);
            let gphi = spec.phi_gradient(&z);
            d_f += (Matrix3::outer(&mu, &gphi) * det + cof * phi) * (T::one() / wb);
            d_mu += fm.mul_vec(&gphi) * (det / wb);
            // exchange
            let k = dmu.values()[c] * finv;
            let fit = finv.transpose();
            let d_m = k * fit * (T::lit(2.0) * det * wb);
            d_f += (k.transpose() * k * fit * (T::lit(-2.0) * det) + cof * k.frob_norm_squared()) * wb;
            // Zeeman
            let fy = f.at(&def.position(c));
            d_f -= cof * fy.dot(&mu);
            d_mu -= fy * det;
            let mut d_u_local = Vector3::zero();
            if let AppliedField::Affine { a, .. } = f {
                d_u_local -= a.tr_mul_vec(&mu) * (det * eps);
            }
            if let Some(h) = &stray_h {
                d_mu -= h[c] * (T::lit(2.0) * lambda);
            }
            Ok((d_f, d_m, d_mu, d_u_local))
        })
        .collect::<Result<_>>()?;
    let d_f = MatrixField::from_values(grid, per_cell.iter().map(|x| x.0).collect())?;
    let d_m = MatrixField::from_values(grid, per_cell.iter().map(|x| x.1).collect())?;
    // the adjoint pairs with plain cell sums; the densities above are per volume
    let gu: Vec<Vector3<T>> =
        gradient_adjoint(&d_f).into_values().into_iter().zip(&per_cell).map(|(g, x)| g * eps + x.3).collect();
    let gm: Vec<Vector3<T>> = gradient_adjoint(&d_m).into_values().into_iter().zip(&per_cell).map(|(g, x)| g + x.2).collect();
    Ok(DiffuseGradient { u: gu, mu: gm })
}

fn norm2<T: Real>(v: &[Vector3<T>]) -> T {
    let mut acc = KahanSum::new();
    v.iter().for_each(|x| acc.add(x.norm_squared()));
    acc.value()
}

/// Alternating projected gradient descent on `G_ε`: a displacement step with
/// clamped cells frozen, then a magnetization step renormalized to the sphere.
/// Each step backtracks until the total decreases; steps that lose the
/// injectivity certificate or invert a cell are rejected.
#[allow(clippy::too_many_arguments)]
pub fn minimize_diffuse_descent<T: Real>(
    init: &DiffuseState<T>,
    boundary: &BoundarySpec<T>,
    law: &MaterialLaw<T>,
    spec: &AnisotropySpec<T>,
    lambda: T,
    f: &AppliedField<T>,
    solver: Option<&StraySolver<T>>,
    options: &DescentOptions<T>,
) -> Result<DescentResult<T>> {
    if !(options.step > T::zero()) {
        return validation(format!("step size must be positive, got {}", options.step));
    }
    build_deformation(&init.u, init.eps)?.require_certified()?;
    let grid = *init.u.grid();
    let fixed = boundary.mask(&grid);
    let energy = |s: &DiffuseState<T>| -> Option<EnergyBreakdown<T>> {
        match total_diffuse(s, law, spec, lambda, f, solver) {
            Ok(b) if b.total().is_finite() => Some(b),
            _ => None,
        }
    };
    let mut state = init.clone();
    boundary.apply(&mut state.u)?;
    let mut current = energy(&state).ok_or_else(|| Error::Numeric("initial state has no finite energy".into()))?;
    let mut history = vec![current.total()];
    let (mut tu, mut tm) = (options.step, options.step);
    let (mut acc_u, mut acc_m) = (0, 0);
    for _ in 0..options.steps {
        let mut moved = false;
        // displacement block
        let g = diffuse_gradient(&state, law, spec, lambda, f, solver)?;
        let mut gu = g.u;
        gu.iter_mut().zip(&fixed).for_each(|(x, &c)| {
            if c {
                *x = Vector3::zero();
            }
        });
        if norm2(&gu) > T::zero() {
            let mut t = tu;
            for _ in 0..options.max_halvings {
                let mut trial = state.clone();
                trial.u.values_mut().iter_mut().zip(&gu).for_each(|(x, d)| *x -= *d * t);
                if let Some(e) = energy(&trial) {
                    if e.total() < current.total() {
                        state = trial;
                        current = e;
                        tu = t * T::lit(2.0);
                        acc_u += 1;
                        moved = true;
                        break;
                    }
                }
                t = t * T::lit(0.5);
            }
        }
        // magnetization block
        let g = diffuse_gradient(&state, law, spec, lambda, f, solver)?;
        let gm: Vec<Vector3<T>> = g.mu.iter().zip(state.mu.values()).map(|(d, m)| *d - *m * d.dot(m)).collect();
        if norm2(&gm) > T::zero() {
            let mut t = tm;
            for _ in 0..options.max_halvings {
                let mut trial = state.clone();
                trial.mu.values_mut().iter_mut().zip(&gm).for_each(|(x, d)| {
                    let y = *x - *d * t;
                    *x = y.normalized().unwrap_or(*x);
                });
                if let Some(e) = energy(&trial) {
                    if e.total() < current.total() {
                        state = trial;
                        current = e;
                        tm = t * T::lit(2.0);
                        acc_m += 1;
                        moved = true;
                        break;
                    }
                }
                t = t * T::lit(0.5);
            }
        }
        history.push(current.total());
        if !moved {
            break;
        }
    }
    Ok(DescentResult { state, breakdown: current, history, accepted_u: acc_u, accepted_mu: acc_m })
}
