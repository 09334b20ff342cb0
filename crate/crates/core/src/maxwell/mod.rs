//! Magnetostatic stray field: the Maxwell system reduced to a scalar potential,
//! `Δv = div ζ`, `h = −∇v`, solved in free space by zero-padded FFT convolution
//! with cell-integrated Newtonian kernels.

mod fft;
mod kernel;
mod solver;

pub use kernel::{field_kernel, potential_kernel};
pub use solver::{
    magnetization_datum, solve_stray_field, stray_energy, StrayEnergy, StrayProblem, StraySolution, StraySolver,
};
