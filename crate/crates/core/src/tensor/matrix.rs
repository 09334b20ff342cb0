use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use super::Vector3;
use crate::scalar::Real;

/// 3×3 matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Matrix3<T>(pub [[T; 3]; 3]);

impl<T: Real> Matrix3<T> {
    pub fn zero() -> Self {
        Self([[T::zero(); 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one(), T::one())
    }

    pub fn diag(a: T, b: T, c: T) -> Self {
        let z = T::zero();
        Self([[a, z, z], [z, b, z], [z, z, c]])
    }

    pub fn from_rows(rows: [[T; 3]; 3]) -> Self {
        Self(rows)
    }

    pub fn from_f64(rows: [[f64; 3]; 3]) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = T::lit(rows[i][j]);
            }
        }
        m
    }

    pub fn from_cols(c0: Vector3<T>, c1: Vector3<T>, c2: Vector3<T>) -> Self {
        Self([[c0[0], c1[0], c2[0]], [c0[1], c1[1], c2[1]], [c0[2], c1[2], c2[2]]])
    }

    /// `a ⊗ b`, i.e. entries `a_i b_j`.
    pub fn outer(a: &Vector3<T>, b: &Vector3<T>) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = a[i] * b[j];
            }
        }
        m
    }

    pub fn col(&self, j: usize) -> Vector3<T> {
        Vector3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn row(&self, i: usize) -> Vector3<T> {
        Vector3(self.0[i])
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Self([[m[0][0], m[1][0], m[2][0]], [m[0][1], m[1][1], m[2][1]], [m[0][2], m[1][2], m[2][2]]])
    }

    pub fn trace(&self) -> T {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> T {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Cofactor matrix, `cof A = det(A) A^{-T}` for invertible `A`.
    pub fn cofactor(&self) -> Self {
        let m = &self.0;
        Self([
            [
                m[1][1] * m[2][2] - m[1][2] * m[2][1],
                m[1][2] * m[2][0] - m[1][0] * m[2][2],
                m[1][0] * m[2][1] - m[1][1] * m[2][0],
            ],
            [
                m[0][2] * m[2][1] - m[0][1] * m[2][2],
                m[0][0] * m[2][2] - m[0][2] * m[2][0],
                m[0][1] * m[2][0] - m[0][0] * m[2][1],
            ],
            [
                m[0][1] * m[1][2] - m[0][2] * m[1][1],
                m[0][2] * m[1][0] - m[0][0] * m[1][2],
                m[0][0] * m[1][1] - m[0][1] * m[1][0],
            ],
        ])
    }

    /// Inverse by the adjugate formula; `None` when singular or nonfinite.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == T::zero() || !d.is_finite() {
            return None;
        }
        let inv = self.cofactor().transpose() * (T::one() / d);
        if inv.is_finite() {
            Some(inv)
        } else {
            None
        }
    }

    pub fn sym(&self) -> Self {
        (*self + self.transpose()) * T::lit(0.5)
    }

    pub fn skew(&self) -> Self {
        (*self - self.transpose()) * T::lit(0.5)
    }

    /// Frobenius inner product `A : B`.
    pub fn frob_dot(&self, o: &Self) -> T {
        let mut s = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                s = s + self.0[i][j] * o.0[i][j];
            }
        }
        s
    }

    pub fn frob_norm_squared(&self) -> T {
        self.frob_dot(self)
    }

    pub fn frob_norm(&self) -> T {
        self.frob_norm_squared().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    pub fn mul_vec(&self, v: &Vector3<T>) -> Vector3<T> {
        Vector3([self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v)])
    }

    /// `Aᵀ v` without forming the transpose.
    pub fn tr_mul_vec(&self, v: &Vector3<T>) -> Vector3<T> {
        Vector3([self.col(0).dot(v), self.col(1).dot(v), self.col(2).dot(v)])
    }

    /// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in descending order and the matching eigenvectors as
    /// columns. Only the upper triangle is read.
    pub fn symmetric_eigen(&self) -> ([T; 3], Self) {
        let mut a = self.sym().0;
        let mut v = Self::identity().0;
        let tiny = T::epsilon() * T::epsilon();
        for _sweep in 0..50 {
            let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
            let diag = a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2];
            if off <= tiny * diag || off == T::zero() {
                break;
            }
            for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..3 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..3 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap_or(std::cmp::Ordering::Equal));
        let vals = [a[idx[0]][idx[0]], a[idx[1]][idx[1]], a[idx[2]][idx[2]]];
        let mut vecs = Self::zero();
        for (c, &i) in idx.iter().enumerate() {
            for r in 0..3 {
                vecs.0[r][c] = v[r][i];
            }
        }
        (vals, Self(vecs.0))
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> [T; 3] {
        let (ev, _) = (self.transpose() * *self).symmetric_eigen();
        ev.map(|l| l.max(T::zero()).sqrt())
    }

    /// Spectral (operator) norm.
    pub fn operator_norm(&self) -> T {
        self.singular_values()[0]
    }

    /// Rotation factor `R` of the polar decomposition `A = R U` for `det A > 0`,
    /// by the scaled Newton iteration `R ← ½(γR + R^{-T}/γ)`.
    pub fn polar_rotation(&self) -> Option<Self> {
        if !(self.det() > T::zero()) {
            return None;
        }
        let mut r = *self;
        for _ in 0..100 {
            let inv_t = r.inverse()?.transpose();
            let g = (inv_t.frob_norm() / r.frob_norm()).sqrt();
            let next = (r * g + inv_t * (T::one() / g)) * T::lit(0.5);
            let delta = (next - r).frob_norm();
            r = next;
            if delta <= T::lit(4.0) * T::epsilon() {
                break;
            }
        }
        Some(r)
    }
}

impl<T> Index<(usize, usize)> for Matrix3<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.0[i][j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix3<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.0[i][j]
    }
}

impl<T: Real> Add for Matrix3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = m.0[i][j] + o.0[i][j];
            }
        }
        m
    }
}

impl<T: Real> Sub for Matrix3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = m.0[i][j] - o.0[i][j];
            }
        }
        m
    }
}

impl<T: Real> AddAssign for Matrix3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Matrix3<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Neg for Matrix3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self * (-T::one())
    }
}

impl<T: Real> Mul<T> for Matrix3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        let mut m = self;
        for row in m.0.iter_mut() {
            for x in row.iter_mut() {
                *x = *x * s;
            }
        }
        m
    }
}

impl<T: Real> Mul for Matrix3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut m = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][0] * o.0[0][j] + self.0[i][1] * o.0[1][j] + self.0[i][2] * o.0[2][j];
            }
        }
        m
    }
}

impl<T: Real> Mul<Vector3<T>> for Matrix3<T> {
    type Output = Vector3<T>;
    fn mul(self, v: Vector3<T>) -> Vector3<T> {
        self.mul_vec(&v)
    }
}
