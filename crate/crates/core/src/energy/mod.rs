//! Energy functionals: the ε-scaled diffuse energies, their sharp-interface
//! limits, the least-upper-bound estimator, Zeeman work and the totals.

mod functionals;
mod state;

pub(crate) use functionals::check_tension as check_tension_table;

pub use functionals::{
    elastic_density, elastic_diffuse, elastic_limit, lub_estimator, magnetic_diffuse, magnetic_limit,
    total_diffuse, total_limit, zeeman_diffuse, zeeman_energy, zeeman_limit, AppliedField, EnergyBreakdown,
    MagneticParts,
};
pub use state::{DiffuseState, LimitState};
