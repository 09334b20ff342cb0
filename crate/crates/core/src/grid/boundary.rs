use super::field::{Grid, VectorField};
use crate::error::{validation, Result};
use crate::scalar::Real;
use crate::tensor::{Matrix3, Vector3};

/// One face of the box: normal `axis` at the lower or upper end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Face {
    pub axis: usize,
    pub upper: bool,
}

impl Face {
    pub const X_LOW: Face = Face { axis: 0, upper: false };
    pub const X_HIGH: Face = Face { axis: 0, upper: true };
    pub const Y_LOW: Face = Face { axis: 1, upper: false };
    pub const Y_HIGH: Face = Face { axis: 1, upper: true };
    pub const Z_LOW: Face = Face { axis: 2, upper: false };
    pub const Z_HIGH: Face = Face { axis: 2, upper: true };

    pub fn name(&self) -> &'static str {
        match (self.axis, self.upper) {
            (0, false) => "x-", (0, true) => "x+",
            (1, false) => "y-", (1, true) => "y+",
            (_, false) => "z-", (_, true) => "z+",
        }
    }

    pub fn parse(s: &str) -> Option<Face> {
        Some(match s {
            "x-" => Face::X_LOW, "x+" => Face::X_HIGH,
            "y-" => Face::Y_LOW, "y+" => Face::Y_HIGH,
            "z-" => Face::Z_LOW, "z+" => Face::Z_HIGH,
            _ => return None,
        })
    }
}

/// Dirichlet datum `d`.
#[derive(Clone, Debug, PartialEq)]
pub enum Datum<T> {
    /// `d(x) = A x + c`.
    Affine { a: Matrix3<T>, c: Vector3<T> },
    /// Per-cell samples on the reference grid.
    Sampled(VectorField<T>),
}

impl<T: Real> Datum<T> {
    pub fn zero() -> Self {
        Datum::Affine { a: Matrix3::zero(), c: Vector3::zero() }
    }
}

/// Clamped faces `Δ` with datum `d`. The first cell layer adjacent to each face
/// carries the datum.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySpec<T> {
    faces: Vec<Face>,
    datum: Datum<T>,
}

impl<T: Real> BoundarySpec<T> {
    pub fn new(faces: Vec<Face>, datum: Datum<T>) -> Result<Self> {
        if faces.is_empty() {
            return validation("at least one clamped face is required");
        }
        if faces.iter().any(|f| f.axis > 2) {
            return validation("face axis must be 0, 1 or 2");
        }
        Ok(Self { faces, datum })
    }

    /// Clamped face `x₁ = 0` with zero datum.
    pub fn clamped_x_low() -> Self {
        Self { faces: vec![Face::X_LOW], datum: Datum::zero() }
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn datum(&self) -> &Datum<T> {
        &self.datum
    }

    /// Whether cell `c` lies in the clamped layer.
    pub fn is_clamped(&self, grid: &Grid<T>, c: usize) -> bool {
        let cc = grid.coords(c);
        let n = grid.dims();
        self.faces
            .iter()
            .any(|f| if f.upper { cc[f.axis] + 1 == n[f.axis] } else { cc[f.axis] == 0 })
    }

    pub fn mask(&self, grid: &Grid<T>) -> Vec<bool> {
        (0..grid.len()).map(|c| self.is_clamped(grid, c)).collect()
    }

    /// Datum value at the center of cell `c`.
    pub fn value(&self, grid: &Grid<T>, c: usize) -> Result<Vector3<T>> {
        match &self.datum {
            Datum::Affine { a, c: shift } => Ok(*a * grid.center(c) + *shift),
            Datum::Sampled(f) => {
                if f.grid() != grid {
                    return validation("sampled boundary datum lives on a different grid");
                }
                Ok(f.values()[c])
            }
        }
    }

    /// Overwrites the clamped cells of `u` with the datum.
    pub fn apply(&self, u: &mut VectorField<T>) -> Result<()> {
        let grid = *u.grid();
        for c in 0..grid.len() {
            if self.is_clamped(&grid, c) {
                u.values_mut()[c] = self.value(&grid, c)?;
            }
        }
        Ok(())
    }
}
