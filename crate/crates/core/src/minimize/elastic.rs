use rayon::prelude::*;

use crate::error::{validation, Error, Result};
use crate::grid::{gradient, gradient_adjoint, BoundarySpec, LabelField, MatrixField, VectorField};
use crate::scalar::{KahanSum, Real};
use crate::tensor::{spontaneous_strain, MaterialLaw, Matrix3, StoredEnergy, Vector3};

const TIKHONOV: f64 = 1e-10;

/// Output of [`solve_elastic_equilibrium`].
#[derive(Clone, Debug)]
pub struct EquilibriumResult<T> {
    pub u: VectorField<T>,
    pub energy: T,
    pub iterations: usize,
    /// Final free-gradient norm relative to the initial one.
    pub residual: T,
    /// Energy after every iteration, starting with the initial guess.
    pub history: Vec<T>,
}

/// `½ ∫ Q_W(Eu − Λ(b_m)) dx` for given per-cell eigenstrains.
pub fn eigenstrain_energy<T: Real, W: StoredEnergy<T> + ?Sized>(u: &VectorField<T>, strains: &[Matrix3<T>], w: &W) -> Result<T> {
    let du = gradient(u);
    let vals: Vec<T> = du.values().par_iter().zip(strains).map(|(g, s)| w.quadratic_form(&(*g - *s))).collect();
    let mut acc = KahanSum::new();
    vals.iter().for_each(|&v| acc.add(v));
    Ok(T::lit(0.5) * acc.value() * u.grid().cell_volume())
}

fn stress<T: Real, W: StoredEnergy<T> + ?Sized>(g: &MatrixField<T>, strains: Option<&[Matrix3<T>]>, w: &W, scale: T) -> MatrixField<T> {
    let vals: Vec<Matrix3<T>> = g
        .values()
        .par_iter()
        .enumerate()
        .map(|(c, b)| {
            let b = match strains {
                Some(s) => *b - s[c],
                None => *b,
            };
            w.elasticity(&b) * scale
        })
        .collect();
    MatrixField::from_values(*g.grid(), vals).expect("shape")
}

fn dot<T: Real>(a: &[Vector3<T>], b: &[Vector3<T>]) -> T {
    let mut acc = KahanSum::new();
    a.iter().zip(b).for_each(|(x, y)| acc.add(x.dot(y)));
    acc.value()
}

/// Minimizes `½ ∫ Q_W(Eu − Λ(b_m))` over `u` with `u = d` on the clamped layer
/// by conjugate gradients on the reduced quadratic form.
#[allow(clippy::too_many_arguments)]
pub fn solve_elastic_equilibrium<T: Real, W: StoredEnergy<T> + ?Sized>(
    m: &LabelField<T>,
    wells: &[Vector3<T>],
    boundary: &BoundarySpec<T>,
    law: &MaterialLaw<T>,
    w: &W,
    init: Option<&VectorField<T>>,
    tol: T,
    max_iter: usize,
) -> Result<EquilibriumResult<T>> {
    if !(tol > T::zero()) {
        return validation(format!("tolerance must be positive, got {tol}"));
    }
    if wells.len() != m.wells() {
        return validation("label field and well list disagree");
    }
    let grid = *m.grid();
    let strain_of = wells.iter().map(|b| spontaneous_strain(b, law)).collect::<Result<Vec<_>>>()?;
    let strains: Vec<Matrix3<T>> = m.labels().iter().map(|&l| strain_of[l]).collect();
    let fixed = boundary.mask(&grid);
    let mut u = match init {
        Some(u0) if u0.grid() == &grid => u0.clone(),
        Some(_) => return validation("initial displacement lives on a different grid"),
        None => VectorField::zeros(grid),
    };
    boundary.apply(&mut u)?;
    let vol = grid.cell_volume();
    let shift = T::lit(TIKHONOV);
    let project = |v: &mut [Vector3<T>]| {
        v.iter_mut().zip(&fixed).for_each(|(x, &f)| {
            if f {
                *x = Vector3::zero();
            }
        })
    };
    // A p = P Dᵀ V C D P p + shift·p
    let apply = |p: &VectorField<T>| -> Vec<Vector3<T>> {
        let s = stress(&gradient(p), None, w, vol);
        let mut out = gradient_adjoint(&s).into_values();
        out.iter_mut().zip(p.values()).for_each(|(o, x)| *o += *x * shift);
        project(&mut out);
        out
    };
    let energy = |u: &VectorField<T>| eigenstrain_energy(u, &strains, w);
    let mut r: Vec<Vector3<T>> = gradient_adjoint(&stress(&gradient(&u), Some(&strains), w, vol)).into_values();
    r.iter_mut().for_each(|x| *x = -*x);
    project(&mut r);
    let r0 = dot(&r, &r).sqrt();
    let mut history = vec![energy(&u)?];
    if r0 == T::zero() {
        return Ok(EquilibriumResult { energy: history[0], u, iterations: 0, residual: T::zero(), history });
    }
    let mut p = VectorField::from_values(grid, r.clone())?;
    let mut rr = dot(&r, &r);
    let mut iterations = 0;
    let mut residual = T::one();
    while residual > tol {
        if iterations >= max_iter {
            return Err(Error::Convergence { iterations, residual: residual.as_f64() });
        }
        let ap = apply(&p);
        let pap = dot(p.values(), &ap);
        if !(pap > T::zero()) {
            break;
        }
        let alpha = rr / pap;
        u.values_mut().iter_mut().zip(p.values()).for_each(|(x, d)| *x += *d * alpha);
        r.iter_mut().zip(&ap).for_each(|(x, a)| *x -= *a * alpha);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        p.values_mut().iter_mut().zip(&r).for_each(|(d, x)| *d = *x + *d * beta);
        iterations += 1;
        residual = rr.sqrt() / r0;
        history.push(energy(&u)?);
    }
    let energy = *history.last().expect("nonempty");
    Ok(EquilibriumResult { u, energy, iterations, residual, history })
}
