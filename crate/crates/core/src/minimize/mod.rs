//! Minimizers: the linear-elastic equilibrium with eigenstrain, alternating
//! minimization of the limit total energy and projected descent on the
//! diffuse total energy.

mod alternating;
mod descent;
mod elastic;

pub use alternating::{local_flip_gain, minimize_limit_alternating, AlternatingOptions, AlternatingResult, RoundRecord};
pub use descent::{diffuse_gradient, minimize_diffuse_descent, DescentOptions, DescentResult, DiffuseGradient};
pub use elastic::{eigenstrain_energy, solve_elastic_equilibrium, EquilibriumResult};
