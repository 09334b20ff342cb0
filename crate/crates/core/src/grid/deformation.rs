use rayon::prelude::*;

use super::field::{MatrixField, VectorField};
use super::ops::gradient;
use crate::error::{domain, Result};
use crate::scalar::Real;
use crate::tensor::{Matrix3, Vector3};

/// The map `y = id + εu` on the reference grid with its injectivity certificate.
#[derive(Clone, Debug)]
pub struct Deformation<T> {
    eps: T,
    u: VectorField<T>,
    du: MatrixField<T>,
    lipschitz: T,
    certified: bool,
}

/// Builds `y = id + εu`. The certificate holds when `ε ≤ 1/(2L)` with
/// `L = max(‖Du‖_∞, 1)`, where `‖Du‖_∞` is the largest cellwise operator norm of
/// the discrete gradient, also bounded below by every nearest-neighbor difference
/// quotient so that grid-scale oscillations cannot hide from it.
pub fn build_deformation<T: Real>(u: &VectorField<T>, eps: T) -> Result<Deformation<T>> {
    if !(eps > T::zero()) || !eps.is_finite() {
        return domain(format!("scale eps must be positive and finite, got {eps}"));
    }
    if !u.is_finite() {
        return domain("displacement has nonfinite entries");
    }
    let du = gradient(u);
    let grid = *u.grid();
    let h = grid.spacing();
    let vals = u.values();
    let lip = (0..grid.len())
        .into_par_iter()
        .map(|c| {
            let mut l = du.values()[c].operator_norm();
            for k in 0..3 {
                if let Some(nb) = grid.neighbor(c, k, 1) {
                    l = l.max((vals[nb] - vals[c]).norm() / h[k]);
                }
            }
            l
        })
        .reduce(|| T::zero(), |a, b| a.max(b));
    let lipschitz = lip.max(T::one());
    let certified = eps <= T::one() / (T::lit(2.0) * lipschitz);
    Ok(Deformation { eps, u: u.clone(), du, lipschitz, certified })
}

impl<T: Real> Deformation<T> {
    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn displacement(&self) -> &VectorField<T> {
        &self.u
    }

    pub fn displacement_gradient(&self) -> &MatrixField<T> {
        &self.du
    }

    /// `L = max(‖Du‖_∞, 1)`.
    pub fn lipschitz(&self) -> T {
        self.lipschitz
    }

    /// `ε ≤ 1/(2L)`.
    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Error unless certified.
    pub fn require_certified(&self) -> Result<()> {
        if self.certified {
            Ok(())
        } else {
            let bound = T::one() / (T::lit(2.0) * self.lipschitz);
            Err(crate::Error::Uncertified { eps: self.eps.as_f64(), bound: bound.as_f64(), lipschitz: self.lipschitz.as_f64() })
        }
    }

    /// `y(x_c) = x_c + εu_c`.
    pub fn position(&self, c: usize) -> Vector3<T> {
        self.u.grid().center(c) + self.u.values()[c] * self.eps
    }

    pub fn positions(&self) -> VectorField<T> {
        VectorField::from_values(*self.u.grid(), (0..self.u.grid().len()).map(|c| self.position(c)).collect())
            .expect("shape")
    }

    /// `F_c = I + εDu_c`.
    pub fn gradient_at(&self, c: usize) -> Matrix3<T> {
        Matrix3::identity() + self.du.values()[c] * self.eps
    }

    /// Cellwise `det F`.
    pub fn jacobians(&self) -> Vec<T> {
        (0..self.u.grid().len()).map(|c| self.gradient_at(c).det()).collect()
    }
}

/// Homogeneous parts of `det(I + εG) = 1 + εP₁ + ε²P₂ + ε³P₃`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetExpansion<T> {
    pub p1: T,
    pub p2: T,
    pub p3: T,
    /// `det(I + εG)` computed directly.
    pub det: T,
}

impl<T: Real> DetExpansion<T> {
    /// `1 + εP₁ + ε²P₂ + ε³P₃`.
    pub fn polynomial(&self, eps: T) -> T {
        T::one() + eps * (self.p1 + eps * (self.p2 + eps * self.p3))
    }
}

pub fn determinant_expansion<T: Real>(g: &Matrix3<T>, eps: T) -> DetExpansion<T> {
    let tr = g.trace();
    let tr2 = (*g * *g).trace();
    DetExpansion {
        p1: tr,
        p2: T::lit(0.5) * (tr * tr - tr2),
        p3: g.det(),
        det: (Matrix3::identity() + *g * eps).det(),
    }
}
