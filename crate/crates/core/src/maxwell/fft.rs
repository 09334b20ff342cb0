use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

/// In-place 3D transform of an `L0 × L1 × L2` array stored `x` fastest.
pub(crate) struct Fft3<T: Real> {
    dims: [usize; 3],
    forward: [Arc<dyn Fft<T>>; 3],
    inverse: [Arc<dyn Fft<T>>; 3],
}

impl<T: Real> Fft3<T> {
    pub fn new(dims: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = dims.map(|n| planner.plan_fft_forward(n));
        let inverse = dims.map(|n| planner.plan_fft_inverse(n));
        Self { dims, forward, inverse }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn forward(&self, data: &mut [Complex<T>]) {
        self.run(data, &self.forward);
    }

    /// Unnormalized inverse.
    pub fn inverse(&self, data: &mut [Complex<T>]) {
        self.run(data, &self.inverse);
    }

    fn run(&self, data: &mut [Complex<T>], plans: &[Arc<dyn Fft<T>>; 3]) {
        let [n0, n1, n2] = self.dims;
        assert_eq!(data.len(), self.len());
        plans[0].process(data);
        let mut buf = vec![Complex::new(T::zero(), T::zero()); n0.max(n1).max(n2) * n0];
        // axis 1: per z-slab, gather columns so that y is contiguous
        for k in 0..n2 {
            let slab = &mut data[k * n0 * n1..(k + 1) * n0 * n1];
            let b = &mut buf[..n0 * n1];
            for j in 0..n1 {
                for i in 0..n0 {
                    b[i * n1 + j] = slab[j * n0 + i];
                }
            }
            plans[1].process(b);
            for j in 0..n1 {
                for i in 0..n0 {
                    slab[j * n0 + i] = b[i * n1 + j];
                }
            }
        }
        // axis 2: per y-row, gather so that z is contiguous
        for j in 0..n1 {
            let b = &mut buf[..n0 * n2];
            for k in 0..n2 {
                let base = (k * n1 + j) * n0;
                for i in 0..n0 {
                    b[i * n2 + k] = data[base + i];
                }
            }
            plans[2].process(b);
            for k in 0..n2 {
                let base = (k * n1 + j) * n0;
                for i in 0..n0 {
                    data[base + i] = b[i * n2 + k];
                }
            }
        }
    }
}

/// Smallest `2^a 3^b 5^c` not below `n`.
pub(crate) fn nice_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}
