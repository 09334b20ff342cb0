use std::io::{self, Write};

use super::field::Grid;
use crate::scalar::Real;
use crate::tensor::Vector3;

/// A cell-data array for [`write_vtk`].
pub enum VtkData<'a, T> {
    Scalars(&'a str, &'a [T]),
    Vectors(&'a str, &'a [Vector3<T>]),
    Labels(&'a str, &'a [usize]),
}

/// Writes a legacy ASCII `STRUCTURED_POINTS` file with cell data.
pub fn write_vtk<T: Real, W: Write>(out: &mut W, grid: &Grid<T>, title: &str, data: &[VtkData<'_, T>]) -> io::Result<()> {
    let n = grid.dims();
    let h = grid.spacing();
    let lo = grid.lower();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET STRUCTURED_POINTS")?;
    writeln!(out, "DIMENSIONS {} {} {}", n[0] + 1, n[1] + 1, n[2] + 1)?;
    writeln!(out, "ORIGIN {} {} {}", lo[0], lo[1], lo[2])?;
    writeln!(out, "SPACING {} {} {}", h[0], h[1], h[2])?;
    writeln!(out, "CELL_DATA {}", grid.len())?;
    for d in data {
        match d {
            VtkData::Scalars(name, v) => {
                writeln!(out, "SCALARS {name} double 1")?;
                writeln!(out, "LOOKUP_TABLE default")?;
                for x in v.iter() {
                    writeln!(out, "{:e}", x.as_f64())?;
                }
            }
            VtkData::Vectors(name, v) => {
                writeln!(out, "VECTORS {name} double")?;
                for x in v.iter() {
                    writeln!(out, "{:e} {:e} {:e}", x[0].as_f64(), x[1].as_f64(), x[2].as_f64())?;
                }
            }
            VtkData::Labels(name, v) => {
                writeln!(out, "SCALARS {name} int 1")?;
                writeln!(out, "LOOKUP_TABLE default")?;
                for x in v.iter() {
                    writeln!(out, "{x}")?;
                }
            }
        }
    }
    Ok(())
}
