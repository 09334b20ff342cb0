use super::Vector3;
use crate::error::{validation, Result};
use crate::scalar::Real;

/// Analytic anisotropy densities on R³.
#[derive(Clone, Debug, PartialEq)]
pub enum Density<T> {
    /// `κ(|z|² − (a·z)²)`, which equals `κ(1 − (a·z)²)` on S² and stays
    /// nonnegative off the sphere.
    Uniaxial { kappa: T, axis: Vector3<T> },
    /// `κ₁(p₁p₂ + p₂p₃ + p₁p₃) + κ₂ p₁p₂p₃` with `p_k = (a_k·z)²`.
    Cubic { k1: T, k2: T, axes: [Vector3<T>; 3] },
    /// `κ Π_i |z − b_i|²` over the well set.
    WellProduct { kappa: T },
}

/// Well set `{b_1, …, b_M}` together with the density `Φ` vanishing on it.
#[derive(Clone, Debug, PartialEq)]
pub struct AnisotropySpec<T> {
    wells: Vec<Vector3<T>>,
    density: Density<T>,
}

impl<T: Real> AnisotropySpec<T> {
    /// Validates the well set and density: at least two unit wells, `Φ(b_i) = 0`
    /// and `Φ ≥ 0` on a quasi-uniform sample of S².
    pub fn new(wells: Vec<Vector3<T>>, density: Density<T>) -> Result<Self> {
        if wells.len() < 2 {
            return validation(format!("at least two wells are required, got {}", wells.len()));
        }
        let unit_tol = T::lit(1e-12).max(T::epsilon() * T::lit(16.0));
        for (i, w) in wells.iter().enumerate() {
            if (w.norm() - T::one()).abs() > unit_tol {
                return validation(format!("well {} is not a unit vector", i + 1));
            }
        }
        match &density {
            Density::Uniaxial { kappa, axis } => {
                check_kappa(*kappa)?;
                check_axis(axis, unit_tol)?;
            }
            Density::Cubic { k1, k2, axes } => {
                check_kappa(*k1)?;
                if !k2.is_finite() {
                    return validation("cubic kappa_2 must be finite");
                }
                for a in axes {
                    check_axis(a, unit_tol)?;
                }
                let ortho_tol = T::lit(1e-10).max(T::epsilon() * T::lit(16.0));
                for i in 0..3 {
                    for j in (i + 1)..3 {
                        if axes[i].dot(&axes[j]).abs() > ortho_tol {
                            return validation("cubic axes must be orthonormal");
                        }
                    }
                }
            }
            Density::WellProduct { kappa } => check_kappa(*kappa)?,
        }
        let spec = Self { wells, density };
        let zero_tol = T::lit(1e-10).max(T::epsilon() * T::lit(64.0));
        for (i, w) in spec.wells.iter().enumerate() {
            if spec.phi(w).abs() > zero_tol {
                return validation(format!("density does not vanish at well {}", i + 1));
            }
        }
        for z in fibonacci_sphere::<T>(2000) {
            if spec.phi(&z) < -zero_tol {
                return validation("density is negative somewhere on the sphere");
            }
        }
        Ok(spec)
    }

    /// Two wells `±axis` with the uniaxial density.
    pub fn uniaxial(kappa: T, axis: Vector3<T>) -> Result<Self> {
        let axis = axis.normalized().ok_or_else(|| crate::Error::Validation("zero easy axis".into()))?;
        Self::new(vec![axis, -axis], Density::Uniaxial { kappa, axis })
    }

    /// Six wells `a_1, a_2, a_3, −a_1, −a_2, −a_3` with the cubic density.
    pub fn cubic(k1: T, k2: T, axes: [Vector3<T>; 3]) -> Result<Self> {
        let wells = vec![axes[0], axes[1], axes[2], -axes[0], -axes[1], -axes[2]];
        Self::new(wells, Density::Cubic { k1, k2, axes })
    }

    /// Arbitrary wells with the product density.
    pub fn well_product(kappa: T, wells: Vec<Vector3<T>>) -> Result<Self> {
        Self::new(wells, Density::WellProduct { kappa })
    }

    pub fn wells(&self) -> &[Vector3<T>] {
        &self.wells
    }

    pub fn well_count(&self) -> usize {
        self.wells.len()
    }

    pub fn density(&self) -> &Density<T> {
        &self.density
    }

    /// `Φ(z)` for any `z ∈ R³`.
    pub fn phi(&self, z: &Vector3<T>) -> T {
        match &self.density {
            Density::Uniaxial { kappa, axis } => {
                let c = axis.dot(z);
                (*kappa * (z.norm_squared() - c * c)).max(T::zero())
            }
            Density::Cubic { k1, k2, axes } => {
                let p = axes.map(|a| {
                    let c = a.dot(z);
                    c * c
                });
                *k1 * (p[0] * p[1] + p[1] * p[2] + p[0] * p[2]) + *k2 * p[0] * p[1] * p[2]
            }
            Density::WellProduct { kappa } => {
                self.wells.iter().fold(*kappa, |acc, b| acc * (*z - *b).norm_squared())
            }
        }
    }

    /// `√Φ(z)`.
    pub fn sqrt_phi(&self, z: &Vector3<T>) -> T {
        self.phi(z).max(T::zero()).sqrt()
    }

    /// Euclidean gradient `∇Φ(z)` in R³.
    pub fn phi_gradient(&self, z: &Vector3<T>) -> Vector3<T> {
        let two = T::lit(2.0);
        match &self.density {
            Density::Uniaxial { kappa, axis } => (*z - *axis * axis.dot(z)) * (two * *kappa),
            Density::Cubic { k1, k2, axes } => {
                let c = axes.map(|a| a.dot(z));
                let p = c.map(|x| x * x);
                let dp = [
                    *k1 * (p[1] + p[2]) + *k2 * p[1] * p[2],
                    *k1 * (p[0] + p[2]) + *k2 * p[0] * p[2],
                    *k1 * (p[0] + p[1]) + *k2 * p[0] * p[1],
                ];
                let mut g = Vector3::zero();
                for k in 0..3 {
                    g += axes[k] * (dp[k] * two * c[k]);
                }
                g
            }
            Density::WellProduct { kappa } => {
                let factors: Vec<T> = self.wells.iter().map(|b| (*z - *b).norm_squared()).collect();
                let mut g = Vector3::zero();
                for (i, b) in self.wells.iter().enumerate() {
                    let others = factors
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .fold(*kappa, |acc, (_, &f)| acc * f);
                    g += (*z - *b) * (two * others);
                }
                g
            }
        }
    }

    /// Largest density scale, used to size step lengths.
    pub fn stiffness_scale(&self) -> T {
        match &self.density {
            Density::Uniaxial { kappa, .. } => *kappa,
            Density::Cubic { k1, k2, .. } => *k1 + k2.abs(),
            Density::WellProduct { kappa } => *kappa * T::lit(4.0).powi(self.wells.len() as i32 - 1),
        }
    }
}

fn check_kappa<T: Real>(k: T) -> Result<()> {
    if k >= T::zero() && k.is_finite() {
        Ok(())
    } else {
        validation(format!("anisotropy constant must be nonnegative, got {k}"))
    }
}

fn check_axis<T: Real>(a: &Vector3<T>, tol: T) -> Result<()> {
    if (a.norm() - T::one()).abs() <= tol {
        Ok(())
    } else {
        validation("easy axes must be unit vectors")
    }
}

/// Quasi-uniform points on S² (golden-angle spiral).
pub fn fibonacci_sphere<T: Real>(n: usize) -> Vec<Vector3<T>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            Vector3::from_f64([r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}
