use super::distance::{geodesic_path, GeodesicPath};
use crate::error::{domain, numeric, Result};
use crate::scalar::Real;
use crate::tensor::{AnisotropySpec, Vector3};

/// Layer half-width `Θ` in units of `ε^β`.
pub const LAYER_HALF_WIDTH: f64 = 4.0;
/// Fraction of the half-width over which the profile is blended into the well.
pub const MOLLIFIER_FRACTION: f64 = 0.05;
/// Mesh level used by [`optimal_profile`].
const PROFILE_LEVEL: usize = 5;
const DENSIFY: usize = 32;
const COST_SAMPLES: usize = 8000;

/// Equipartition transition between two wells, parametrized by the signed
/// normal coordinate `s` with `s = 0` at half the geodesic action.
#[derive(Clone, Debug)]
pub struct TransitionProfile<T> {
    eps: T,
    beta: T,
    width: T,
    from: Vector3<T>,
    to: Vector3<T>,
    /// Dense path nodes and their scaled coordinate `t = s / ε^β`.
    nodes: Vec<Vector3<T>>,
    node_t: Vec<T>,
    samples_s: Vec<T>,
    samples: Vec<Vector3<T>>,
    cost: T,
    distance: T,
}

/// Profile between wells `i` and `j` along the relaxed geodesic.
pub fn optimal_profile<T: Real>(spec: &AnisotropySpec<T>, i: usize, j: usize, eps: T, beta: T, n: usize) -> Result<TransitionProfile<T>> {
    if i == j || i >= spec.well_count() || j >= spec.well_count() {
        return domain(format!("profile needs two distinct wells, got {i} and {j}"));
    }
    let path = geodesic_path(spec, &spec.wells()[i], &spec.wells()[j], PROFILE_LEVEL)?;
    TransitionProfile::from_path(spec, &path, eps, beta, n)
}

fn smoothstep<T: Real>(x: T) -> T {
    let x = x.max(T::zero()).min(T::one());
    x * x * (T::lit(3.0) - T::lit(2.0) * x)
}

fn chord_slerp<T: Real>(a: &Vector3<T>, b: &Vector3<T>, t: T) -> Vector3<T> {
    (*a * (T::one() - t) + *b * t).normalized().unwrap_or(*a)
}

impl<T: Real> TransitionProfile<T> {
    /// Builds the profile from a precomputed path whose endpoints are the wells.
    pub fn from_path(spec: &AnisotropySpec<T>, path: &GeodesicPath<T>, eps: T, beta: T, n: usize) -> Result<Self> {
        if !(eps > T::zero()) {
            return domain(format!("scale eps must be positive, got {eps}"));
        }
        if !(beta > T::zero() && beta < T::one()) {
            return domain(format!("exponent beta must lie in (0, 1), got {beta}"));
        }
        if n < 2 {
            return domain("profile needs at least two samples");
        }
        let width = eps.powf(beta);
        let pts = &path.points;
        let mut nodes = Vec::with_capacity((pts.len() - 1) * DENSIFY + 1);
        nodes.push(pts[0]);
        for w in pts.windows(2) {
            for k in 1..=DENSIFY {
                nodes.push(chord_slerp(&w[0], &w[1], T::from_count(k) / T::from_count(DENSIFY)));
            }
        }
        let segs = nodes.len() - 1;
        let mut node_t = vec![T::zero(); nodes.len()];
        let mut action = vec![T::zero(); nodes.len()];
        let peak = nodes.iter().map(|p| spec.sqrt_phi(p)).fold(T::zero(), T::max);
        for k in 0..segs {
            let a = nodes[k];
            let b = nodes[k + 1];
            let len = (a - b).norm();
            let root = spec.sqrt_phi(&(a + b).normalized().unwrap_or(a));
            if len > T::zero() && root <= T::lit(1e-12) * peak {
                return numeric("density vanishes inside the transition path; the equipartition profile is not integrable");
            }
            let dt = if len > T::zero() { len / root } else { T::zero() };
            node_t[k + 1] = node_t[k] + dt;
            action[k + 1] = action[k] + root * len;
        }
        let half = action[segs] * T::lit(0.5);
        let k = action.iter().position(|&a| a >= half).unwrap_or(segs).max(1);
        let frac = if action[k] > action[k - 1] { (half - action[k - 1]) / (action[k] - action[k - 1]) } else { T::zero() };
        let t_half = node_t[k - 1] + frac * (node_t[k] - node_t[k - 1]);
        for t in node_t.iter_mut() {
            *t = *t - t_half;
        }
        let mut prof = Self {
            eps,
            beta,
            width,
            from: pts[0],
            to: pts[pts.len() - 1],
            nodes,
            node_t,
            samples_s: Vec::new(),
            samples: Vec::new(),
            cost: T::zero(),
            distance: path.value,
        };
        let theta = T::lit(LAYER_HALF_WIDTH);
        for k in 0..n {
            let t = -theta + T::lit(2.0) * theta * T::from_count(k) / T::from_count(n - 1);
            prof.samples_s.push(t * width);
            prof.samples.push(prof.evaluate_scaled(t));
        }
        let dt = T::lit(2.0) * theta / T::from_count(COST_SAMPLES);
        let mut cost = T::zero();
        let mut prev = prof.evaluate_scaled(-theta);
        for k in 1..=COST_SAMPLES {
            let next = prof.evaluate_scaled(-theta + dt * T::from_count(k));
            let mid = (prev + next).normalized().unwrap_or(prev);
            cost = cost + spec.phi(&mid) * dt + (next - prev).norm_squared() / dt;
            prev = next;
        }
        prof.cost = cost;
        Ok(prof)
    }

    fn evaluate_scaled(&self, t: T) -> Vector3<T> {
        let theta = T::lit(LAYER_HALF_WIDTH);
        if t <= -theta {
            return self.from;
        }
        if t >= theta {
            return self.to;
        }
        let raw = if t <= self.node_t[0] {
            self.from
        } else if t >= *self.node_t.last().unwrap() {
            self.to
        } else {
            let k = self.node_t.partition_point(|&x| x <= t).max(1) - 1;
            let span = self.node_t[k + 1] - self.node_t[k];
            let f = if span > T::zero() { (t - self.node_t[k]) / span } else { T::zero() };
            chord_slerp(&self.nodes[k], &self.nodes[k + 1], f)
        };
        let inner = theta * (T::one() - T::lit(MOLLIFIER_FRACTION));
        if t.abs() <= inner {
            return raw;
        }
        let chi = smoothstep((t.abs() - inner) / (theta - inner));
        let target = if t < T::zero() { self.from } else { self.to };
        (raw * (T::one() - chi) + target * chi).normalized().unwrap_or(target)
    }

    /// Profile value at signed normal distance `s`.
    pub fn evaluate(&self, s: T) -> Vector3<T> {
        self.evaluate_scaled(s / self.width)
    }

    /// `Θ ε^β`; beyond it the profile equals the wells.
    pub fn half_width(&self) -> T {
        T::lit(LAYER_HALF_WIDTH) * self.width
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    /// Sample positions `s_k`, uniform over `[−Θε^β, Θε^β]`.
    pub fn arclength(&self) -> &[T] {
        &self.samples_s
    }

    pub fn points(&self) -> &[Vector3<T>] {
        &self.samples
    }

    /// `∫ (ε^{−β} Φ(p) + ε^β |p'|²) ds` per unit interface area.
    pub fn cost(&self) -> T {
        self.cost
    }

    /// Geodesic action of the underlying path.
    pub fn distance(&self) -> T {
        self.distance
    }

    pub fn endpoints(&self) -> (Vector3<T>, Vector3<T>) {
        (self.from, self.to)
    }
}
