//! Cell-centered fields on a box, finite-difference operators, quadrature,
//! interface measurement, deformations and boundary data.

mod boundary;
mod deformation;
mod field;
mod ops;
mod vtk;

pub use boundary::{BoundarySpec, Datum, Face};
pub use deformation::{build_deformation, determinant_expansion, DetExpansion, Deformation};
pub use field::{Field, Grid, LabelField, MatrixField, ScalarField, VectorField};
pub use ops::{
    axis_stencil, gradient, gradient_adjoint, integrate, integrate_values, interface_area, scalar_gradient,
    symmetric_gradient,
};
pub use vtk::{write_vtk, VtkData};
