use super::{Matrix3, Vector3};
use crate::error::{domain, numeric, validation, Result};
use crate::scalar::Real;

/// Stored-energy exponents and spontaneous-strain constants.
///
/// The shipped density is `W(A) = c_W (g_p(dist(A, SO(3))) + h_q(det A))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialLaw<T> {
    pub p: T,
    pub q: T,
    pub c_w: T,
    pub a: T,
    pub b: T,
}

impl<T: Real> MaterialLaw<T> {
    pub fn new(p: T, q: T, c_w: T, a: T, b: T) -> Result<Self> {
        if !(p > T::lit(2.0)) {
            return validation(format!("growth exponent p must exceed 2, got {p}"));
        }
        if !(q > T::one()) {
            return validation(format!("determinant exponent q must exceed 1, got {q}"));
        }
        if !(c_w > T::zero()) {
            return validation(format!("growth constant c_W must be positive, got {c_w}"));
        }
        if !(a.is_finite() && b.is_finite()) {
            return validation("strain constants a, b must be finite");
        }
        Ok(Self { p, q, c_w, a, b })
    }

    /// Upper end of the admissible exponent range, `min(2(q-1)/q, 1)`.
    pub fn beta_bound(&self) -> T {
        (T::lit(2.0) * (self.q - T::one()) / self.q).min(T::one())
    }

    /// Checks `0 < β < min(2(q-1)/q, 1)`.
    pub fn check_beta(&self, beta: T) -> Result<()> {
        let hi = self.beta_bound();
        if beta > T::zero() && beta < hi {
            Ok(())
        } else {
            validation(format!(
                "beta = {beta} violates the regime 0 < beta < min(2(q-1)/q, 1) = {hi} for q = {}",
                self.q
            ))
        }
    }

    /// `|Λ(z)| = √(a² + 2b²)`.
    pub fn strain_norm(&self) -> T {
        (self.a * self.a + T::lit(2.0) * self.b * self.b).sqrt()
    }
}

impl Default for MaterialLaw<f64> {
    fn default() -> Self {
        Self { p: 4.0, q: 2.0, c_w: 1.0, a: 0.3, b: -0.1 }
    }
}

impl MaterialLaw<f32> {
    pub fn default_f32() -> Self {
        Self { p: 4.0, q: 2.0, c_w: 1.0, a: 0.3, b: -0.1 }
    }
}

fn check_unit<T: Real>(z: &Vector3<T>) -> Result<()> {
    let tol = T::lit(1e-9).max(T::epsilon() * T::lit(64.0));
    if (z.norm() - T::one()).abs() <= tol {
        Ok(())
    } else {
        domain(format!("direction must be a unit vector, |z| = {}", z.norm()))
    }
}

/// `Λ(z) = a z⊗z + b (I − z⊗z)`.
pub fn spontaneous_strain<T: Real>(z: &Vector3<T>, law: &MaterialLaw<T>) -> Result<Matrix3<T>> {
    check_unit(z)?;
    Ok(strain_unchecked(z, law.a, law.b))
}

fn strain_unchecked<T: Real>(z: &Vector3<T>, a: T, b: T) -> Matrix3<T> {
    let zz = Matrix3::outer(z, z);
    zz * a + (Matrix3::identity() - zz) * b
}

/// `Λ_ε(z) = I + εΛ(z)` or its inverse `z⊗z / a_ε + (I − z⊗z) / b_ε`.
pub fn spontaneous_strain_scaled<T: Real>(
    z: &Vector3<T>,
    eps: T,
    law: &MaterialLaw<T>,
    inverse: bool,
) -> Result<Matrix3<T>> {
    check_unit(z)?;
    let (ae, be) = scaled_constants(eps, law)?;
    Ok(if inverse {
        strain_unchecked(z, T::one() / ae, T::one() / be)
    } else {
        strain_unchecked(z, ae, be)
    })
}

/// `(a_ε, b_ε) = (1 + εa, 1 + εb)`, both required positive.
pub fn scaled_constants<T: Real>(eps: T, law: &MaterialLaw<T>) -> Result<(T, T)> {
    if !(eps > T::zero()) {
        return domain(format!("scale eps must be positive, got {eps}"));
    }
    let ae = T::one() + eps * law.a;
    let be = T::one() + eps * law.b;
    if !(ae > T::zero() && be > T::zero()) {
        return domain(format!("a_eps = {ae}, b_eps = {be} must both be positive"));
    }
    Ok((ae, be))
}

/// Growth function `g_p`.
pub fn reference_growth_gp<T: Real>(t: T, p: T) -> Result<T> {
    if !(t >= T::zero()) {
        return domain(format!("g_p needs t >= 0, got {t}"));
    }
    Ok(gp(t, p))
}

#[inline]
pub(crate) fn gp<T: Real>(t: T, p: T) -> T {
    if t <= T::one() {
        T::lit(0.5) * t * t
    } else {
        t.powf(p) / p + T::lit(0.5) - T::one() / p
    }
}

/// `g_p'(t) / t`, continuous at `t = 0`.
#[inline]
fn gp_slope_over_t<T: Real>(t: T, p: T) -> T {
    if t <= T::one() {
        T::one()
    } else {
        t.powf(p - T::lit(2.0))
    }
}

/// Determinant penalty `h_q`.
pub fn determinant_growth_hq<T: Real>(t: T, q: T) -> Result<T> {
    if !(t > T::zero()) {
        return domain(format!("h_q needs t > 0, got {t}"));
    }
    Ok(hq(t, q))
}

#[inline]
pub(crate) fn hq<T: Real>(t: T, q: T) -> T {
    t.powf(q) / q + T::one() / t - (q + T::one()) / q
}

#[inline]
fn hq_prime<T: Real>(t: T, q: T) -> T {
    t.powf(q - T::one()) - T::one() / (t * t)
}

/// Distance from `A` to SO(3) in the Frobenius norm.
pub fn dist_so3<T: Real>(a: &Matrix3<T>) -> T {
    let mut s = a.singular_values();
    if a.det() < T::zero() {
        s[2] = -s[2];
    }
    s.iter().map(|&x| (x - T::one()) * (x - T::one())).sum::<T>().sqrt()
}

/// A frame-indifferent stored-energy density with its linearization at `I`.
pub trait StoredEnergy<T: Real>: Sync {
    /// `W(A)`, or `+∞` when `det A ≤ 0`.
    fn energy(&self, a: &Matrix3<T>) -> T;

    /// `Q_W(B)`, by default from second differences.
    fn quadratic_form(&self, b: &Matrix3<T>) -> T {
        extract_elastic_form(self, b, T::lit(1e-4)).unwrap_or(T::nan())
    }

    /// Elasticity tensor applied to `B`, `C_W B`, recovered by polarization of
    /// `Q_W` so that `C_W B : B = Q_W(B)`.
    fn elasticity(&self, b: &Matrix3<T>) -> Matrix3<T> {
        let mut c = Matrix3::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut e = Matrix3::zero();
                e.0[i][j] = T::one();
                c.0[i][j] = (self.quadratic_form(&(*b + e)) - self.quadratic_form(&(*b - e))) * T::lit(0.25);
            }
        }
        c
    }

    /// `∂W/∂A`, by default from central differences. `None` where `W` is infinite.
    fn piola(&self, a: &Matrix3<T>) -> Option<Matrix3<T>> {
        let h = T::lit(1e-6).max(T::epsilon().sqrt());
        let mut g = Matrix3::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut ap = *a;
                let mut am = *a;
                ap.0[i][j] = ap.0[i][j] + h;
                am.0[i][j] = am.0[i][j] - h;
                let d = (self.energy(&ap) - self.energy(&am)) / (h + h);
                if !d.is_finite() {
                    return None;
                }
                g.0[i][j] = d;
            }
        }
        Some(g)
    }
}

impl<T: Real> StoredEnergy<T> for MaterialLaw<T> {
    fn energy(&self, a: &Matrix3<T>) -> T {
        default_stored_energy(a, self)
    }

    /// Closed form `c_W (|sym B|² + (q+1)(tr B)²)`.
    fn quadratic_form(&self, b: &Matrix3<T>) -> T {
        let tr = b.trace();
        self.c_w * (b.sym().frob_norm_squared() + (self.q + T::one()) * tr * tr)
    }

    fn elasticity(&self, b: &Matrix3<T>) -> Matrix3<T> {
        (b.sym() + Matrix3::identity() * ((self.q + T::one()) * b.trace())) * self.c_w
    }

    fn piola(&self, a: &Matrix3<T>) -> Option<Matrix3<T>> {
        let det = a.det();
        if !(det > T::zero()) {
            return None;
        }
        let r = a.polar_rotation()?;
        let diff = *a - r;
        let d = diff.frob_norm();
        let dist_part = diff * gp_slope_over_t(d, self.p);
        let det_part = a.cofactor() * hq_prime(det, self.q);
        Some((dist_part + det_part) * self.c_w)
    }
}

/// `W(A) = c_W (g_p(dist(A, SO(3))) + h_q(det A))`, infinite for `det A ≤ 0`.
pub fn default_stored_energy<T: Real>(a: &Matrix3<T>, law: &MaterialLaw<T>) -> T {
    let det = a.det();
    if !(det > T::zero()) || !a.is_finite() {
        return T::infinity();
    }
    law.c_w * (gp(dist_so3(a), law.p) + hq(det, law.q))
}

/// `Q_W(B)` from the centered second difference
/// `(W(I+hB) + W(I−hB) − 2W(I))/h²`, refined once by Richardson extrapolation
/// with step `h/2`.
pub fn extract_elastic_form<T: Real, W: StoredEnergy<T> + ?Sized>(w: &W, b: &Matrix3<T>, h: T) -> Result<T> {
    if !(h >= T::lit(1e-5) && h <= T::lit(1e-2)) {
        return domain(format!("second-difference step must lie in [1e-5, 1e-2], got {h}"));
    }
    let second = |h: T| -> Result<T> {
        let id = Matrix3::identity();
        let wp = w.energy(&(id + *b * h));
        let wm = w.energy(&(id - *b * h));
        let w0 = w.energy(&id);
        let v = (wp + wm - T::lit(2.0) * w0) / (h * h);
        if v.is_finite() {
            Ok(v)
        } else {
            numeric("nonfinite stored energy in second difference")
        }
    };
    let coarse = second(h)?;
    let fine = second(h * T::lit(0.5))?;
    Ok((T::lit(4.0) * fine - coarse) / T::lit(3.0))
}
