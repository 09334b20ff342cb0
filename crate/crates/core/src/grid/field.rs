use crate::error::{validation, Result};
use crate::scalar::Real;
use crate::tensor::{Matrix3, Vector3};

/// Uniform box grid with `n[k]` cells along axis `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid<T> {
    lower: [T; 3],
    upper: [T; 3],
    n: [usize; 3],
    h: [T; 3],
}

impl<T: Real> Grid<T> {
    pub fn new(lower: [T; 3], upper: [T; 3], n: [usize; 3]) -> Result<Self> {
        for k in 0..3 {
            if n[k] < 4 {
                return validation(format!("grid needs at least 4 cells per axis, axis {k} has {}", n[k]));
            }
            if !(upper[k] > lower[k]) || !lower[k].is_finite() || !upper[k].is_finite() {
                return validation(format!("empty or nonfinite box along axis {k}"));
            }
        }
        let h = [0, 1, 2].map(|k| (upper[k] - lower[k]) / T::from_count(n[k]));
        Ok(Self { lower, upper, n, h })
    }

    /// `N³` cells on the unit cube `(0,1)³`.
    pub fn unit_cube(n: usize) -> Result<Self> {
        Self::new([T::zero(); 3], [T::one(); 3], [n; 3])
    }

    pub fn lower(&self) -> [T; 3] {
        self.lower
    }

    pub fn upper(&self) -> [T; 3] {
        self.upper
    }

    pub fn dims(&self) -> [usize; 3] {
        self.n
    }

    pub fn spacing(&self) -> [T; 3] {
        self.h
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> T {
        self.h[0] * self.h[1] * self.h[2]
    }

    pub fn volume(&self) -> T {
        (0..3).map(|k| self.upper[k] - self.lower[k]).fold(T::one(), |a, b| a * b)
    }

    /// Area of a cell face normal to `axis`.
    pub fn face_area(&self, axis: usize) -> T {
        let (a, b) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        self.h[a] * self.h[b]
    }

    /// Linear index, `x` fastest.
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n[0] * (j + self.n[1] * k)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.n[0];
        let r = idx / self.n[0];
        [i, r % self.n[1], r / self.n[1]]
    }

    pub fn center(&self, idx: usize) -> Vector3<T> {
        let c = self.coords(idx);
        Vector3([0, 1, 2].map(|k| self.lower[k] + (T::from_count(c[k]) + T::lit(0.5)) * self.h[k]))
    }

    /// Cell containing the point, if inside the box.
    pub fn locate(&self, x: &Vector3<T>) -> Option<usize> {
        let mut c = [0usize; 3];
        for k in 0..3 {
            let s = ((x[k] - self.lower[k]) / self.h[k]).floor();
            if !(s >= T::zero()) || s >= T::from_count(self.n[k]) {
                return None;
            }
            c[k] = s.to_usize()?;
        }
        Some(self.index(c[0], c[1], c[2]))
    }

    /// Neighbor index along `axis` in direction `dir` (±1), if inside.
    #[inline]
    pub fn neighbor(&self, idx: usize, axis: usize, dir: i32) -> Option<usize> {
        let c = self.coords(idx);
        let stride = match axis {
            0 => 1,
            1 => self.n[0],
            _ => self.n[0] * self.n[1],
        };
        if dir > 0 {
            (c[axis] + 1 < self.n[axis]).then(|| idx + stride)
        } else {
            (c[axis] > 0).then(|| idx - stride)
        }
    }
}

/// Per-cell values over a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T, V> {
    grid: Grid<T>,
    values: Vec<V>,
}

pub type ScalarField<T> = Field<T, T>;
pub type VectorField<T> = Field<T, Vector3<T>>;
pub type MatrixField<T> = Field<T, Matrix3<T>>;

impl<T: Real, V: Clone + Send + Sync> Field<T, V> {
    pub fn from_values(grid: Grid<T>, values: Vec<V>) -> Result<Self> {
        if values.len() != grid.len() {
            return validation(format!("field has {} values for {} cells", values.len(), grid.len()));
        }
        Ok(Self { grid, values })
    }

    pub fn filled(grid: Grid<T>, v: V) -> Self {
        Self { grid, values: vec![v; grid.len()] }
    }

    /// Samples `f` at every cell center.
    pub fn from_fn(grid: Grid<T>, f: impl Fn(Vector3<T>) -> V + Sync + Send) -> Self {
        use rayon::prelude::*;
        let values = (0..grid.len()).into_par_iter().map(|c| f(grid.center(c))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [V] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<V> {
        self.values
    }

    pub fn map<W: Clone + Send + Sync>(&self, f: impl Fn(&V) -> W + Sync + Send) -> Field<T, W> {
        use rayon::prelude::*;
        Field { grid: self.grid, values: self.values.par_iter().map(f).collect() }
    }
}

impl<T: Real> VectorField<T> {
    pub fn zeros(grid: Grid<T>) -> Self {
        Self::filled(grid, Vector3::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Per-cell well labels, zero-based (`0..wells`).
#[derive(Clone, Debug, PartialEq)]
pub struct LabelField<T> {
    grid: Grid<T>,
    labels: Vec<usize>,
    wells: usize,
}

impl<T: Real> LabelField<T> {
    pub fn new(grid: Grid<T>, labels: Vec<usize>, wells: usize) -> Result<Self> {
        if labels.len() != grid.len() {
            return validation(format!("label field has {} entries for {} cells", labels.len(), grid.len()));
        }
        if let Some(bad) = labels.iter().find(|&&l| l >= wells) {
            return validation(format!("label {bad} out of range for {wells} wells"));
        }
        Ok(Self { grid, labels, wells })
    }

    pub fn constant(grid: Grid<T>, label: usize, wells: usize) -> Result<Self> {
        Self::new(grid, vec![label; grid.len()], wells)
    }

    pub fn from_fn(grid: Grid<T>, wells: usize, f: impl Fn(Vector3<T>) -> usize) -> Result<Self> {
        let labels = (0..grid.len()).map(|c| f(grid.center(c))).collect();
        Self::new(grid, labels, wells)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn wells(&self) -> usize {
        self.wells
    }

    pub fn get(&self, c: usize) -> usize {
        self.labels[c]
    }

    pub fn set(&mut self, c: usize, label: usize) {
        assert!(label < self.wells, "label out of range");
        self.labels[c] = label;
    }

    /// Maps labels to wells.
    pub fn to_vectors(&self, wells: &[Vector3<T>]) -> VectorField<T> {
        Field { grid: self.grid, values: self.labels.iter().map(|&l| wells[l]).collect() }
    }
}
