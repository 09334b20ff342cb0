//! Magnetoelastic energies on structured grids: ε-scaled diffuse functionals,
//! their small-strain sharp-interface limit, stray and Zeeman fields, and the
//! constructions used to compare them.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix `f64`.

// `!(x > 0)` rejects NaN on purpose; index loops mirror the stencil notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod geodesy;
pub mod grid;
pub mod energy;
pub mod maxwell;
pub mod minimize;
pub mod recovery;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Vec3 = tensor::Vector3<f64>;
pub type Mat3 = tensor::Matrix3<f64>;
pub type Law = tensor::MaterialLaw<f64>;
pub type Anisotropy = tensor::AnisotropySpec<f64>;
pub type Grid3 = grid::Grid<f64>;
pub type Vectors = grid::VectorField<f64>;
pub type Scalars = grid::ScalarField<f64>;
pub type Labels = grid::LabelField<f64>;
