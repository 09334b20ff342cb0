use rayon::prelude::*;

use super::state::{DiffuseState, LimitState};
use crate::error::{numeric, validation, Result};
use crate::geodesy::WellDistanceFields;
use crate::grid::{build_deformation, gradient, integrate_values, interface_area, symmetric_gradient, LabelField, VectorField};
use crate::maxwell::{stray_energy, StraySolver};
use crate::scalar::Real;
use crate::tensor::{spontaneous_strain, spontaneous_strain_scaled, AnisotropySpec, Matrix3, MaterialLaw, StoredEnergy, Vector3};

/// External field `f`.
#[derive(Clone, Debug, PartialEq)]
pub enum AppliedField<T> {
    Uniform(Vector3<T>),
    /// `f(x) = A x + c`
    Affine { a: Matrix3<T>, c: Vector3<T> },
}

impl<T: Real> AppliedField<T> {
    pub fn zero() -> Self {
        AppliedField::Uniform(Vector3::zero())
    }

    pub fn at(&self, x: &Vector3<T>) -> Vector3<T> {
        match self {
            AppliedField::Uniform(v) => *v,
            AppliedField::Affine { a, c } => *a * *x + *c,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            AppliedField::Uniform(v) => v.abs_max() == T::zero(),
            AppliedField::Affine { a, c } => a.frob_norm() == T::zero() && c.abs_max() == T::zero(),
        }
    }
}

/// Anisotropy and exchange contributions of the diffuse magnetic energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MagneticParts<T> {
    pub anisotropy: T,
    pub exchange: T,
}

impl<T: Real> MagneticParts<T> {
    pub fn total(&self) -> T {
        self.anisotropy + self.exchange
    }
}

/// Parts of a total energy `elastic + magnetic + λ·stray − zeeman`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBreakdown<T> {
    pub elastic: T,
    pub magnetic: T,
    pub stray: T,
    pub zeeman: T,
    pub lambda: T,
}

impl<T: Real> EnergyBreakdown<T> {
    pub fn total(&self) -> T {
        self.elastic + self.magnetic + self.lambda * self.stray - self.zeeman
    }
}

/// Per-cell `W(Λ_ε⁻¹(μ)(I + εDu))/ε²`; `+∞` where the determinant is not positive.
pub fn elastic_density<T: Real>(state: &DiffuseState<T>, law: &MaterialLaw<T>) -> Result<Vec<T>> {
    let def = build_deformation(&state.u, state.eps)?;
    def.require_certified()?;
    let eps2 = state.eps * state.eps;
    let grid = *state.u.grid();
    (0..grid.len())
        .into_par_iter()
        .map(|c| {
            let linv = spontaneous_strain_scaled(&state.mu.values()[c], state.eps, law, true)?;
            Ok(law.energy(&(linv * def.gradient_at(c))) / eps2)
        })
        .collect()
}

/// `ε⁻² ∫ W(Λ_ε⁻¹(μ)(I + εDu)) dx`. Returns `+∞` when some cell inverts.
pub fn elastic_diffuse<T: Real>(state: &DiffuseState<T>, law: &MaterialLaw<T>) -> Result<T> {
    let dens = elastic_density(state, law)?;
    if dens.iter().any(|w| w.is_infinite()) {
        return Ok(T::infinity());
    }
    integrate_values(state.u.grid(), &dens)
}

/// Diffuse magnetic energy pulled back to the reference box:
/// `ε^{-β} ∫ Φ(Fᵀμ) det F dx + ε^β ∫ |Dμ F⁻¹|² det F dx` with `F = I + εDu`.
pub fn magnetic_diffuse<T: Real>(state: &DiffuseState<T>, spec: &AnisotropySpec<T>) -> Result<MagneticParts<T>> {
    let def = build_deformation(&state.u, state.eps)?;
    def.require_certified()?;
    let dmu = gradient(&state.mu);
    let grid = *state.u.grid();
    let cells: Vec<(T, T)> = (0..grid.len())
        .into_par_iter()
        .map(|c| {
            let f = def.gradient_at(c);
            let det = f.det();
            let finv = f.inverse().filter(|_| det > T::zero());
            let finv = match finv {
                Some(m) => m,
                None => return numeric(format!("deformation gradient is singular at cell {c}")),
            };
            let mu = state.mu.values()[c];
            let phi = spec.phi(&f.tr_mul_vec(&mu));
            let ex = (dmu.values()[c] * finv).frob_norm_squared();
            Ok((phi * det, ex * det))
        })
        .collect::<Result<_>>()?;
    let (phi, ex): (Vec<T>, Vec<T>) = cells.into_iter().unzip();
    let w = state.eps.powf(state.beta);
    Ok(MagneticParts {
        anisotropy: integrate_values(&grid, &phi)? / w,
        exchange: integrate_values(&grid, &ex)? * w,
    })
}

/// `½ ∫ Q_W(Eu − Λ(b_m)) dx`.
pub fn elastic_limit<T: Real, W: StoredEnergy<T> + ?Sized>(
    state: &LimitState<T>,
    law: &MaterialLaw<T>,
    wells: &[Vector3<T>],
    w: &W,
) -> Result<T> {
    if wells.len() != state.m.wells() {
        return validation(format!("label field has {} wells, spec has {}", state.m.wells(), wells.len()));
    }
    let strains = wells.iter().map(|b| spontaneous_strain(b, law)).collect::<Result<Vec<_>>>()?;
    let eu = symmetric_gradient(&state.u);
    let dens: Vec<T> = eu
        .values()
        .par_iter()
        .zip(state.m.labels().par_iter())
        .map(|(e, &l)| T::lit(0.5) * w.quadratic_form(&(*e - strains[l])))
        .collect();
    integrate_values(state.u.grid(), &dens)
}

/// `½ Σ_{i≠j} σ_ij · area(∂{m=i} ∩ ∂{m=j})`.
pub fn magnetic_limit<T: Real>(m: &LabelField<T>, sigma: &[Vec<T>]) -> Result<T> {
    let n = m.wells();
    check_tension(sigma, n)?;
    let mut total = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            if sigma[i][j] != T::zero() {
                total = total + sigma[i][j] * interface_area(m, i, j);
            }
        }
    }
    Ok(total)
}

pub(crate) fn check_tension<T: Real>(sigma: &[Vec<T>], n: usize) -> Result<()> {
    if sigma.len() != n || sigma.iter().any(|r| r.len() != n) {
        return validation(format!("tension table must be {n}×{n}"));
    }
    for i in 0..n {
        if sigma[i][i] != T::zero() {
            return validation("tension table must have a zero diagonal");
        }
        for j in 0..n {
            if sigma[i][j] != sigma[j][i] || !(sigma[i][j] >= T::zero()) {
                return validation("tension table must be symmetric and nonnegative");
            }
        }
    }
    Ok(())
}

/// `∫ max_i |D(f_i∘μ)| dx`, with `D(f_i∘μ) = Dμᵀ ∇f_i(μ)` and `∇f_i` the
/// eikonal gradient of the well-distance field (length `√Φ`).
pub fn lub_estimator<T: Real>(mu: &VectorField<T>, fields: &WellDistanceFields<T>) -> Result<T> {
    let dmu = gradient(mu);
    let dens: Vec<T> = (0..mu.grid().len())
        .into_par_iter()
        .map(|c| {
            let z = mu.values()[c];
            let d = dmu.values()[c];
            (0..fields.well_count())
                .map(|i| d.tr_mul_vec(&fields.eikonal_gradient(i, &z)).norm())
                .fold(T::zero(), |a, b| a.max(b))
        })
        .collect();
    integrate_values(mu.grid(), &dens)
}

/// `∫ f·m` over the cells selected by `mask` (all cells when `None`).
pub fn zeeman_energy<T: Real>(m: &VectorField<T>, mask: Option<&[bool]>, f: &AppliedField<T>) -> Result<T> {
    let grid = m.grid();
    if let Some(mk) = mask {
        if mk.len() != grid.len() {
            return validation("mask length differs from the grid");
        }
    }
    let dens: Vec<T> = (0..grid.len())
        .map(|c| match mask {
            Some(mk) if !mk[c] => T::zero(),
            _ => f.at(&grid.center(c)).dot(&m.values()[c]),
        })
        .collect();
    integrate_values(grid, &dens)
}

/// Zeeman work on the deformed body, `∫ f(y)·μ det F dx`.
pub fn zeeman_diffuse<T: Real>(state: &DiffuseState<T>, f: &AppliedField<T>) -> Result<T> {
    if f.is_zero() {
        return Ok(T::zero());
    }
    let def = build_deformation(&state.u, state.eps)?;
    def.require_certified()?;
    let grid = *state.u.grid();
    let dens: Vec<T> = (0..grid.len())
        .map(|c| f.at(&def.position(c)).dot(&state.mu.values()[c]) * def.gradient_at(c).det())
        .collect();
    integrate_values(&grid, &dens)
}

/// `∫_Ω f·b_m dx`.
pub fn zeeman_limit<T: Real>(m: &LabelField<T>, wells: &[Vector3<T>], f: &AppliedField<T>) -> Result<T> {
    zeeman_energy(&m.to_vectors(wells), None, f)
}

fn stray_part<T: Real>(
    lambda: T,
    solver: Option<&StraySolver<T>>,
    zeta: impl FnOnce(&StraySolver<T>) -> Result<VectorField<T>>,
) -> Result<T> {
    if !(lambda >= T::zero()) {
        return validation(format!("stray weight lambda must be nonnegative, got {lambda}"));
    }
    if lambda == T::zero() {
        return Ok(T::zero());
    }
    let solver = match solver {
        Some(s) => s,
        None => return validation("a positive stray weight needs a stray-field solver"),
    };
    let z = zeta(solver)?;
    let sol = solver.solve(&z)?;
    Ok(stray_energy(&sol, &z)?.energy)
}

/// `G_ε = E_ε^e + E_ε^m + λH − F` for a diffuse state.
pub fn total_diffuse<T: Real>(
    state: &DiffuseState<T>,
    law: &MaterialLaw<T>,
    spec: &AnisotropySpec<T>,
    lambda: T,
    f: &AppliedField<T>,
    solver: Option<&StraySolver<T>>,
) -> Result<EnergyBreakdown<T>> {
    let stray = stray_part(lambda, solver, |s| {
        let def = build_deformation(&state.u, state.eps)?;
        s.datum(Some(&def), &state.mu)
    })?;
    Ok(EnergyBreakdown {
        elastic: elastic_diffuse(state, law)?,
        magnetic: magnetic_diffuse(state, spec)?.total(),
        stray,
        zeeman: zeeman_diffuse(state, f)?,
        lambda,
    })
}

/// `G = E^e + E^m + λH(id, m) − F(id, m)` for a limit state.
pub fn total_limit<T: Real>(
    state: &LimitState<T>,
    law: &MaterialLaw<T>,
    spec: &AnisotropySpec<T>,
    sigma: &[Vec<T>],
    lambda: T,
    f: &AppliedField<T>,
    solver: Option<&StraySolver<T>>,
) -> Result<EnergyBreakdown<T>> {
    let m = state.m.to_vectors(spec.wells());
    let stray = stray_part(lambda, solver, |s| s.datum(None, &m))?;
    Ok(EnergyBreakdown {
        elastic: elastic_limit(state, law, spec.wells(), law)?,
        magnetic: magnetic_limit(&state.m, sigma)?,
        stray,
        zeeman: zeeman_limit(&state.m, spec.wells(), f)?,
        lambda,
    })
}

