//! Tensor algebra, stored-energy densities, spontaneous strains and
//! anisotropy densities.

mod anisotropy;
mod law;
mod matrix;
mod vector;

pub use anisotropy::{fibonacci_sphere, AnisotropySpec, Density};
pub use law::{
    default_stored_energy, determinant_growth_hq, dist_so3, extract_elastic_form, reference_growth_gp,
    scaled_constants, spontaneous_strain, spontaneous_strain_scaled, MaterialLaw, StoredEnergy,
};
pub use matrix::Matrix3;
pub use vector::Vector3;
