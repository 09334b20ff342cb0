//! Recovery sequences: diffuse states built from a limit state by inserting
//! optimal transition layers at the interfaces, and the convergence study
//! comparing their energies with the limit functional.

mod distance;
mod family;

pub use distance::{interface_distance, InterfaceDistance};
pub use family::{build_recovery, gamma_study, GammaRow, GammaStudy, ProfileSet, RecoveryFamily};
