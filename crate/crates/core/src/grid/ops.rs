use rayon::prelude::*;

use super::field::{Field, Grid, LabelField, MatrixField, ScalarField, VectorField};
use crate::error::{numeric, Result};
use crate::scalar::{KahanSum, Real};
use crate::tensor::{Matrix3, Vector3};

/// First-derivative stencil along one axis at position `i` of `n` cells, as
/// `(offset index, weight)` pairs; divide by `2h`. Centered in the interior,
/// one-sided second order at the two end cells.
#[inline]
pub fn axis_stencil(i: usize, n: usize) -> [(usize, f64); 3] {
    if i == 0 {
        [(0, -3.0), (1, 4.0), (2, -1.0)]
    } else if i + 1 == n {
        [(n - 3, 1.0), (n - 2, -4.0), (n - 1, 3.0)]
    } else {
        [(i - 1, -1.0), (i + 1, 1.0), (i, 0.0)]
    }
}

#[inline]
fn with_axis<T: Real>(grid: &Grid<T>, c: [usize; 3], axis: usize, v: usize) -> usize {
    let mut c = c;
    c[axis] = v;
    grid.index(c[0], c[1], c[2])
}

/// Gradient of a vector field: entry `(a, k)` is `∂_k u_a`.
pub fn gradient<T: Real>(u: &VectorField<T>) -> MatrixField<T> {
    let grid = *u.grid();
    let n = grid.dims();
    let inv2h = grid.spacing().map(|h| T::one() / (h + h));
    let vals = u.values();
    let out = (0..grid.len())
        .into_par_iter()
        .map(|c| {
            let cc = grid.coords(c);
            let mut g = Matrix3::zero();
            for k in 0..3 {
                let mut d = Vector3::zero();
                for (v, w) in axis_stencil(cc[k], n[k]) {
                    if w != 0.0 {
                        d += vals[with_axis(&grid, cc, k, v)] * T::lit(w);
                    }
                }
                for a in 0..3 {
                    g.0[a][k] = d[a] * inv2h[k];
                }
            }
            g
        })
        .collect();
    Field::from_values(grid, out).expect("shape")
}

/// Gradient of a scalar field.
pub fn scalar_gradient<T: Real>(s: &ScalarField<T>) -> VectorField<T> {
    let grid = *s.grid();
    let n = grid.dims();
    let inv2h = grid.spacing().map(|h| T::one() / (h + h));
    let vals = s.values();
    let out = (0..grid.len())
        .into_par_iter()
        .map(|c| {
            let cc = grid.coords(c);
            let mut g = Vector3::zero();
            for k in 0..3 {
                let mut d = T::zero();
                for (v, w) in axis_stencil(cc[k], n[k]) {
                    if w != 0.0 {
                        d = d + vals[with_axis(&grid, cc, k, v)] * T::lit(w);
                    }
                }
                g[k] = d * inv2h[k];
            }
            g
        })
        .collect();
    Field::from_values(grid, out).expect("shape")
}

/// Transpose of [`gradient`] with respect to the plain cell-sum pairing:
/// `Σ_c G_c : (D u)_c = Σ_c (Dᵀ G)_c · u_c`.
pub fn gradient_adjoint<T: Real>(g: &MatrixField<T>) -> VectorField<T> {
    let grid = *g.grid();
    let n = grid.dims();
    let inv2h = grid.spacing().map(|h| T::one() / (h + h));
    let mut out = vec![Vector3::zero(); grid.len()];
    for (c, gc) in g.values().iter().enumerate() {
        let cc = grid.coords(c);
        for k in 0..3 {
            let col = gc.col(k) * inv2h[k];
            for (v, w) in axis_stencil(cc[k], n[k]) {
                if w != 0.0 {
                    out[with_axis(&grid, cc, k, v)] += col * T::lit(w);
                }
            }
        }
    }
    Field::from_values(grid, out).expect("shape")
}

/// Symmetric part of the gradient, `Eu = sym Du`.
pub fn symmetric_gradient<T: Real>(u: &VectorField<T>) -> MatrixField<T> {
    gradient(u).map(|g| g.sym())
}

/// Midpoint rule with compensated summation in index order.
pub fn integrate<T: Real>(f: &ScalarField<T>) -> Result<T> {
    integrate_values(f.grid(), f.values())
}

/// [`integrate`] over raw per-cell values.
pub fn integrate_values<T: Real>(grid: &Grid<T>, values: &[T]) -> Result<T> {
    let mut acc = KahanSum::new();
    for (c, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return numeric(format!("nonfinite integrand {v} at cell {c}"));
        }
        acc.add(v);
    }
    Ok(acc.value() * grid.cell_volume())
}

/// Face-count area of the interface between labels `i` and `j`.
pub fn interface_area<T: Real>(m: &LabelField<T>, i: usize, j: usize) -> T {
    let grid = m.grid();
    let labels = m.labels();
    let mut total = T::zero();
    for axis in 0..3 {
        let mut count = 0usize;
        for c in 0..grid.len() {
            if let Some(nb) = grid.neighbor(c, axis, 1) {
                let (a, b) = (labels[c], labels[nb]);
                if (a == i && b == j) || (a == j && b == i) {
                    count += 1;
                }
            }
        }
        total = total + T::from_count(count) * grid.face_area(axis);
    }
    total
}
