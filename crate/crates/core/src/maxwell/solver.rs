use rayon::prelude::*;
use rustfft::num_complex::Complex;

use super::fft::{nice_size, Fft3};
use super::kernel::{field_kernel, potential_kernel};
use crate::error::{domain, numeric, validation, Result};
use crate::grid::{integrate_values, Deformation, Grid, ScalarField, VectorField};
use crate::scalar::{KahanSum, Real};
use crate::tensor::Vector3;

/// Free-space stray-field solver for one body grid and padding factor, with the
/// kernel transforms computed once. Sources are confined to the body box grown
/// by a margin of cells; targets cover the whole padded grid.
pub struct StraySolver<T: Real> {
    body: Grid<T>,
    padding: usize,
    padded: Grid<T>,
    offset: [usize; 3],
    source_lo: [usize; 3],
    source_dims: [usize; 3],
    fft: Fft3<T>,
    potential: [Vec<Complex<T>>; 3],
    // symmetric field kernels in the order xx, yy, zz, xy, xz, yz
    field: [Vec<Complex<T>>; 6],
}

const SYM: [[usize; 3]; 3] = [[0, 3, 4], [3, 1, 5], [4, 5, 2]];
const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

impl<T: Real> std::fmt::Debug for StraySolver<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StraySolver")
            .field("body", &self.body)
            .field("padding", &self.padding)
            .field("fft_dims", &self.fft_dims())
            .finish()
    }
}

/// Potential `v` (zero mean) and field `h = −∇v` on the padded grid.
#[derive(Clone, Debug)]
pub struct StraySolution<T> {
    pub v: ScalarField<T>,
    pub h: VectorField<T>,
}

/// `H = ∫|h|²` with the relative mismatch against `−∫ζ·h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrayEnergy<T> {
    pub energy: T,
    pub identity_residual: T,
}

impl<T: Real> StraySolver<T> {
    /// The padded grid has `padding·N` cells per axis with the body centered.
    /// The source margin defaults to `max(2, ⌈N/8⌉)` cells.
    pub fn new(body: &Grid<T>, padding: usize) -> Result<Self> {
        let margin = body.dims().iter().map(|&n| n.div_ceil(8)).max().unwrap_or(2).max(2);
        Self::with_margin(body, padding, margin)
    }

    pub fn with_margin(body: &Grid<T>, padding: usize, margin: usize) -> Result<Self> {
        if padding < 2 {
            return validation(format!("padding factor must be at least 2, got {padding}"));
        }
        let n = body.dims();
        let h = body.spacing();
        let offset = n.map(|x| (padding - 1) * x / 2);
        let pn = n.map(|x| padding * x);
        let lower = [0, 1, 2].map(|k| body.lower()[k] - T::from_count(offset[k]) * h[k]);
        let upper = [0, 1, 2].map(|k| lower[k] + T::from_count(pn[k]) * h[k]);
        let padded = Grid::new(lower, upper, pn)?;
        let source_lo = [0, 1, 2].map(|k| offset[k] - margin.min(offset[k]));
        let source_dims = [0, 1, 2].map(|k| (n[k] + offset[k] + margin).min(pn[k]) - source_lo[k]);
        let dims = [0, 1, 2].map(|k| nice_size(pn[k] + source_dims[k] - 1));
        let fft = Fft3::new(dims);
        let hf = h.map(|x| x.as_f64());
        // FFT slot -> cell offset (target minus source)
        let positive = [0, 1, 2].map(|k| (pn[k] - 1 - source_lo[k]) as i64);
        let offset_of = move |idx: usize| -> [i64; 3] {
            let i = idx % dims[0];
            let r = idx / dims[0];
            let c = [i, r % dims[1], r / dims[1]];
            [0, 1, 2].map(|a| if c[a] as i64 <= positive[a] { c[a] as i64 } else { c[a] as i64 - dims[a] as i64 })
        };
        let build = |f: &(dyn Fn([i64; 3]) -> f64 + Sync)| -> Vec<Complex<T>> {
            let mut k: Vec<Complex<T>> =
                (0..fft.len()).into_par_iter().map(|idx| Complex::new(T::lit(f(offset_of(idx))), T::zero())).collect();
            fft.forward(&mut k);
            k
        };
        let potential = [0usize, 1, 2].map(|j| build(&move |o| potential_kernel(j, o, hf)));
        let field = SYM_PAIRS.map(|(k, j)| build(&move |o| field_kernel(k, j, o, hf)));
        Ok(Self { body: *body, padding, padded, offset, source_lo, source_dims, fft, potential, field })
    }

    pub fn body_grid(&self) -> &Grid<T> {
        &self.body
    }

    pub fn padded_grid(&self) -> &Grid<T> {
        &self.padded
    }

    pub fn padding(&self) -> usize {
        self.padding
    }

    pub fn fft_dims(&self) -> [usize; 3] {
        self.fft.dims()
    }

    /// Padded index of body cell `c`.
    pub fn padded_index(&self, c: usize) -> usize {
        let cc = self.body.coords(c);
        self.padded.index(cc[0] + self.offset[0], cc[1] + self.offset[1], cc[2] + self.offset[2])
    }

    /// Body index of padded cell `p`, if it lies inside the body box.
    pub fn body_index(&self, p: usize) -> Option<usize> {
        let pc = self.padded.coords(p);
        let n = self.body.dims();
        let mut c = [0usize; 3];
        for k in 0..3 {
            let x = pc[k].checked_sub(self.offset[k])?;
            if x >= n[k] {
                return None;
            }
            c[k] = x;
        }
        Some(self.body.index(c[0], c[1], c[2]))
    }

    /// Datum `ζ = χ_{y(Ω)} m / det Dy` on the padded grid. Without a deformation
    /// (or for `y = id`) this is `χ_Ω μ`. Otherwise each reference cell deposits
    /// `μ / det F` into every padded cell whose center lies in the image
    /// parallelepiped `y(x_c) + F·cell`; overlaps are averaged.
    pub fn datum(&self, deformation: Option<&Deformation<T>>, mu: &VectorField<T>) -> Result<VectorField<T>> {
        if mu.grid() != &self.body {
            return validation("magnetization lives on a different grid than the solver");
        }
        let mut zeta = VectorField::zeros(self.padded);
        let def = match deformation {
            None => {
                for (c, m) in mu.values().iter().enumerate() {
                    zeta.values_mut()[self.padded_index(c)] = *m;
                }
                return Ok(zeta);
            }
            Some(d) => d,
        };
        if def.displacement().grid() != &self.body {
            return validation("deformation lives on a different grid than the solver");
        }
        def.require_certified()?;
        let h = self.body.spacing();
        let half = h.map(|x| x * T::lit(0.5));
        let mut count = vec![0u32; self.padded.len()];
        let plo = self.padded.lower();
        let pn = self.padded.dims();
        for (c, m) in mu.values().iter().enumerate() {
            let y = def.position(c);
            let f = def.gradient_at(c);
            let det = f.det();
            let finv = f.inverse().ok_or_else(|| crate::Error::Numeric("singular deformation gradient".into()))?;
            let value = *m * (T::one() / det);
            let mut lo = [0usize; 3];
            let mut hi = [0usize; 3];
            for k in 0..3 {
                let reach = (0..3).map(|a| f.0[k][a].abs() * half[a]).fold(T::zero(), |s, x| s + x);
                let a = ((y[k] - reach - plo[k]) / h[k] - T::lit(0.5)).floor();
                let b = ((y[k] + reach - plo[k]) / h[k] - T::lit(0.5)).ceil();
                if a < T::zero() || b >= T::from_count(pn[k]) {
                    return domain(format!("image of cell {c} leaves the padded grid"));
                }
                lo[k] = a.to_usize().unwrap_or(0);
                hi[k] = b.to_usize().unwrap_or(0);
            }
            for kk in lo[2]..=hi[2] {
                for jj in lo[1]..=hi[1] {
                    for ii in lo[0]..=hi[0] {
                        let p = self.padded.index(ii, jj, kk);
                        let local = finv * (self.padded.center(p) - y);
                        if (0..3).all(|a| local[a] >= -half[a] && local[a] < half[a]) {
                            zeta.values_mut()[p] += value;
                            count[p] += 1;
                        }
                    }
                }
            }
        }
        for (z, &n) in zeta.values_mut().iter_mut().zip(&count) {
            if n > 1 {
                *z = *z * (T::one() / T::from_count(n as usize));
            }
        }
        Ok(zeta)
    }

    /// Solves `Δv = div ζ` in free space and returns `v` (zero mean) and `h = −∇v`,
    /// the gradient taken analytically through the kernel at cell centers.
    pub fn solve(&self, zeta: &VectorField<T>) -> Result<StraySolution<T>> {
        if zeta.grid() != &self.padded {
            return validation("datum must live on the padded grid");
        }
        if !zeta.is_finite() {
            return numeric("nonfinite magnetization datum");
        }
        let dims = self.fft.dims();
        let len = self.fft.len();
        let slot = |c: [usize; 3]| c[0] + dims[0] * (c[1] + dims[1] * c[2]);
        let zero = Complex::new(T::zero(), T::zero());
        let mut spectra: Vec<Vec<Complex<T>>> = Vec::with_capacity(3);
        for j in 0..3 {
            let mut work = vec![zero; len];
            for (p, z) in zeta.values().iter().enumerate() {
                if z[j] == T::zero() {
                    continue;
                }
                let c = self.padded.coords(p);
                let mut s = [0usize; 3];
                for k in 0..3 {
                    match c[k].checked_sub(self.source_lo[k]) {
                        Some(x) if x < self.source_dims[k] => s[k] = x,
                        _ => return domain("magnetization datum extends beyond the source box"),
                    }
                }
                work[slot(s)] = Complex::new(z[j], T::zero());
            }
            self.fft.forward(&mut work);
            spectra.push(work);
        }
        let scale = T::one() / T::from_count(len);
        let convolve = |kernels: [&Vec<Complex<T>>; 3]| -> Vec<T> {
            let mut acc = vec![zero; len];
            acc.par_iter_mut().enumerate().for_each(|(i, a)| {
                *a = spectra[0][i] * kernels[0][i] + spectra[1][i] * kernels[1][i] + spectra[2][i] * kernels[2][i];
            });
            self.fft.inverse(&mut acc);
            (0..self.padded.len())
                .map(|p| {
                    let c = self.padded.coords(p);
                    let t = [0, 1, 2].map(|k| (c[k] + dims[k] - self.source_lo[k]) % dims[k]);
                    acc[slot(t)].re * scale
                })
                .collect()
        };
        let mut v = convolve([&self.potential[0], &self.potential[1], &self.potential[2]]);
        let mean = {
            let mut s = KahanSum::new();
            v.iter().for_each(|&x| s.add(x));
            s.value() / T::from_count(v.len())
        };
        v.iter_mut().for_each(|x| *x = *x - mean);
        let v = ScalarField::from_values(self.padded, v)?;
        let comps: Vec<Vec<T>> =
            (0..3).map(|k| convolve([&self.field[SYM[k][0]], &self.field[SYM[k][1]], &self.field[SYM[k][2]]])).collect();
        let h = VectorField::from_values(
            self.padded,
            (0..self.padded.len()).map(|p| Vector3::new(comps[0][p], comps[1][p], comps[2][p])).collect(),
        )?;
        Ok(StraySolution { v, h })
    }
}

/// Stray-field problem bundling a datum with its solution.
#[derive(Debug)]
pub struct StrayProblem<'a, T: Real> {
    pub solver: &'a StraySolver<T>,
    pub zeta: VectorField<T>,
    pub solution: Option<StraySolution<T>>,
}

impl<'a, T: Real> StrayProblem<'a, T> {
    pub fn new(solver: &'a StraySolver<T>, deformation: Option<&Deformation<T>>, mu: &VectorField<T>) -> Result<Self> {
        Ok(Self { solver, zeta: solver.datum(deformation, mu)?, solution: None })
    }

    pub fn solve(&mut self) -> Result<&StraySolution<T>> {
        let sol = self.solver.solve(&self.zeta)?;
        Ok(self.solution.insert(sol))
    }

    pub fn energy(&mut self) -> Result<StrayEnergy<T>> {
        if self.solution.is_none() {
            self.solve()?;
        }
        stray_energy(self.solution.as_ref().expect("solved"), &self.zeta)
    }
}

/// `ζ` on the padded grid for an optional deformation.
pub fn magnetization_datum<T: Real>(solver: &StraySolver<T>, deformation: Option<&Deformation<T>>, mu: &VectorField<T>) -> Result<VectorField<T>> {
    solver.datum(deformation, mu)
}

pub fn solve_stray_field<T: Real>(solver: &StraySolver<T>, zeta: &VectorField<T>) -> Result<StraySolution<T>> {
    solver.solve(zeta)
}

/// `∫|h|²` over the padded grid, checked against `−∫ζ·h`; a mismatch above 10%
/// signals under-resolution.
pub fn stray_energy<T: Real>(sol: &StraySolution<T>, zeta: &VectorField<T>) -> Result<StrayEnergy<T>> {
    let grid = sol.h.grid();
    let hh: Vec<T> = sol.h.values().iter().map(|h| h.norm_squared()).collect();
    let zh: Vec<T> = zeta.values().iter().zip(sol.h.values()).map(|(z, h)| -z.dot(h)).collect();
    let energy = integrate_values(grid, &hh)?;
    let work = integrate_values(grid, &zh)?;
    let scale = energy.abs().max(work.abs());
    let identity_residual = if scale > T::zero() { (energy - work).abs() / scale } else { T::zero() };
    if identity_residual > T::lit(0.1) {
        return numeric(format!("stray energy identity violated by {:.1}%", identity_residual.as_f64() * 100.0));
    }
    Ok(StrayEnergy { energy, identity_residual })
}
