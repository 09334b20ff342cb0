use crate::error::{validation, Result};
use crate::grid::{LabelField, VectorField};
use crate::scalar::Real;
use crate::tensor::MaterialLaw;

/// Diffuse state in reference coordinates: displacement `u` with `y = id + εu`
/// and the pulled-back magnetization `μ = m∘y`.
#[derive(Clone, Debug)]
pub struct DiffuseState<T> {
    pub u: VectorField<T>,
    pub mu: VectorField<T>,
    pub eps: T,
    pub beta: T,
}

impl<T: Real> DiffuseState<T> {
    /// Checks shapes, `|μ| = 1` per cell and the β-regime of `law`.
    pub fn new(u: VectorField<T>, mu: VectorField<T>, eps: T, beta: T, law: &MaterialLaw<T>) -> Result<Self> {
        if u.grid() != mu.grid() {
            return validation("displacement and magnetization live on different grids");
        }
        if !(eps > T::zero()) || !eps.is_finite() {
            return validation(format!("scale eps must be positive, got {eps}"));
        }
        law.check_beta(beta)?;
        let tol = unit_tolerance::<T>();
        if let Some(c) = mu.values().iter().position(|m| !((m.norm() - T::one()).abs() <= tol)) {
            return validation(format!("magnetization is not unit length at cell {c}"));
        }
        if !u.is_finite() {
            return validation("displacement has nonfinite entries");
        }
        Ok(Self { u, mu, eps, beta })
    }
}

pub(crate) fn unit_tolerance<T: Real>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(64.0))
}

/// Limit state: displacement and well labels.
#[derive(Clone, Debug)]
pub struct LimitState<T> {
    pub u: VectorField<T>,
    pub m: LabelField<T>,
}

impl<T: Real> LimitState<T> {
    pub fn new(u: VectorField<T>, m: LabelField<T>) -> Result<Self> {
        if u.grid() != m.grid() {
            return validation("displacement and labels live on different grids");
        }
        if !u.is_finite() {
            return validation("displacement has nonfinite entries");
        }
        Ok(Self { u, m })
    }
}
