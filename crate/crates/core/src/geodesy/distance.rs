use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::mesh::SphereMesh;
use crate::error::{domain, validation, Result};
use crate::scalar::Real;
use crate::tensor::{AnisotropySpec, Vector3};

const RELAX_SWEEPS: usize = 200;
const RELAX_STOP: f64 = 1e-10;
const RELAX_STAGES: [usize; 4] = [16, 32, 64, 128];
const FINE_SUBDIVISION: usize = 8;

/// A relaxed path on S² with the action of its piecewise great-circle curve.
#[derive(Clone, Debug)]
pub struct GeodesicPath<T> {
    pub points: Vec<Vector3<T>>,
    pub value: T,
}

fn angle<T: Real>(a: &Vector3<T>, b: &Vector3<T>) -> T {
    let c = (*a - *b).norm() * T::lit(0.5);
    T::lit(2.0) * c.min(T::one()).asin()
}

fn slerp<T: Real>(a: &Vector3<T>, b: &Vector3<T>, t: T) -> Vector3<T> {
    let th = angle(a, b);
    if th < T::lit(1e-6) {
        return (*a * (T::one() - t) + *b * t).normalized().unwrap_or(*a);
    }
    let s = th.sin();
    (*a * (((T::one() - t) * th).sin() / s) + *b * ((t * th).sin() / s)).normalized().unwrap_or(*a)
}

/// Simpson action of one great-circle segment.
fn segment_cost<T: Real>(spec: &AnisotropySpec<T>, a: &Vector3<T>, b: &Vector3<T>) -> T {
    let th = angle(a, b);
    let mid = (*a + *b).normalized().unwrap_or(*a);
    th * (spec.sqrt_phi(a) + T::lit(4.0) * spec.sqrt_phi(&mid) + spec.sqrt_phi(b)) / T::lit(6.0)
}

fn discrete_action<T: Real>(spec: &AnisotropySpec<T>, pts: &[Vector3<T>]) -> T {
    pts.windows(2).map(|w| segment_cost(spec, &w[0], &w[1])).sum()
}

/// Action `∫ √Φ |γ'|` of the piecewise great-circle curve through `pts`,
/// integrated with refined Simpson quadrature.
pub fn path_action<T: Real>(spec: &AnisotropySpec<T>, pts: &[Vector3<T>]) -> T {
    let n = T::from_count(FINE_SUBDIVISION);
    let mut total = T::zero();
    for w in pts.windows(2) {
        let mut prev = w[0];
        for s in 1..=FINE_SUBDIVISION {
            let next = if s == FINE_SUBDIVISION { w[1] } else { slerp(&w[0], &w[1], T::from_count(s) / n) };
            total = total + segment_cost(spec, &prev, &next);
            prev = next;
        }
    }
    total
}

/// Action of the shorter great-circle arc between `z0` and `z1`.
pub fn great_circle_action<T: Real>(spec: &AnisotropySpec<T>, z0: &Vector3<T>, z1: &Vector3<T>, segments: usize) -> T {
    path_action(spec, &great_circle(z0, z1, segments))
}

fn great_circle<T: Real>(z0: &Vector3<T>, z1: &Vector3<T>, segments: usize) -> Vec<Vector3<T>> {
    (0..=segments).map(|k| slerp(z0, z1, T::from_count(k) / T::from_count(segments))).collect()
}

/// Resamples a polyline to `segments` pieces of equal arclength.
fn resample<T: Real>(pts: &[Vector3<T>], segments: usize) -> Vec<Vector3<T>> {
    let mut cum = vec![T::zero()];
    for w in pts.windows(2) {
        let l = *cum.last().unwrap() + angle(&w[0], &w[1]);
        cum.push(l);
    }
    let total = *cum.last().unwrap();
    if total == T::zero() {
        return vec![pts[0]; segments + 1];
    }
    let mut out = Vec::with_capacity(segments + 1);
    let mut k = 0;
    for s in 0..=segments {
        let target = total * T::from_count(s) / T::from_count(segments);
        while k + 2 < cum.len() && cum[k + 1] < target {
            k += 1;
        }
        let len = cum[k + 1] - cum[k];
        let t = if len > T::zero() { ((target - cum[k]) / len).max(T::zero()).min(T::one()) } else { T::zero() };
        out.push(slerp(&pts[k], &pts[k + 1], t));
    }
    out[0] = pts[0];
    out[segments] = pts[pts.len() - 1];
    out
}

fn tangent_basis<T: Real>(p: &Vector3<T>) -> (Vector3<T>, Vector3<T>) {
    let helper = if p[0].abs() < T::lit(0.9) { Vector3::unit(0) } else { Vector3::unit(1) };
    let t1 = (helper - *p * helper.dot(p)).normalized().expect("independent");
    let t2 = p.cross(&t1);
    (t1, t2)
}

/// Coarse-to-fine projected gradient descent of the discrete action with fixed
/// endpoints; nodes move normal to the path only, so the parametrization stays
/// close to uniform.
fn relax<T: Real>(spec: &AnisotropySpec<T>, pts: &[Vector3<T>]) -> Vec<Vector3<T>> {
    let mut pts = pts.to_vec();
    let delta = T::lit(1e-6).max(T::epsilon().sqrt() * T::lit(4.0));
    for &k in RELAX_STAGES.iter() {
        pts = resample(&pts, k);
        let seg = angle(&pts[0], &pts[k]).max(pts.windows(2).map(|w| angle(&w[0], &w[1])).sum::<T>()) / T::from_count(k);
        let tension = pts.iter().map(|p| spec.sqrt_phi(p)).fold(T::zero(), T::max).max(T::lit(1e-12));
        let mut step = T::lit(0.4) * seg / tension;
        let mut action = discrete_action(spec, &pts);
        for _ in 0..RELAX_SWEEPS {
            let mut grads = vec![Vector3::zero(); pts.len()];
            for i in 1..k {
                let local = |p: &Vector3<T>| segment_cost(spec, &pts[i - 1], p) + segment_cost(spec, p, &pts[i + 1]);
                let (t1, t2) = tangent_basis(&pts[i]);
                let mut g = Vector3::zero();
                for t in [t1, t2] {
                    let plus = (pts[i] + t * delta).normalized().unwrap();
                    let minus = (pts[i] - t * delta).normalized().unwrap();
                    g += t * ((local(&plus) - local(&minus)) / (delta + delta));
                }
                let along = pts[i + 1] - pts[i - 1];
                let along = (along - pts[i] * along.dot(&pts[i])).normalized();
                if let Some(a) = along {
                    g -= a * g.dot(&a);
                }
                grads[i] = g;
            }
            let mut accepted = false;
            for _ in 0..30 {
                let trial: Vec<Vector3<T>> = pts
                    .iter()
                    .zip(&grads)
                    .map(|(p, g)| (*p - *g * step).normalized().unwrap_or(*p))
                    .collect();
                let trial_action = discrete_action(spec, &trial);
                if trial_action < action {
                    let gain = action - trial_action;
                    pts = trial;
                    action = trial_action;
                    step = step * T::lit(1.2);
                    accepted = gain >= T::lit(RELAX_STOP);
                    break;
                }
                step = step * T::lit(0.5);
            }
            if !accepted {
                break;
            }
        }
    }
    pts
}

#[derive(PartialEq)]
struct Item<T> {
    d: T,
    v: usize,
}

impl<T: PartialOrd> Eq for Item<T> {}

impl<T: PartialOrd> PartialOrd for Item<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl<T: PartialOrd> Ord for Item<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        o.d.partial_cmp(&self.d).unwrap_or(Ordering::Equal).then_with(|| o.v.cmp(&self.v))
    }
}

/// Single-source shortest paths with edge weight `½(√Φ(a)+√Φ(b))·|a−b|`.
fn dijkstra<T: Real>(mesh: &SphereMesh<T>, spec: &AnisotropySpec<T>, seeds: &[(usize, T)]) -> (Vec<T>, Vec<usize>) {
    let nv = mesh.vertices().len();
    let root: Vec<T> = mesh.vertices().iter().map(|v| spec.sqrt_phi(v)).collect();
    let mut dist = vec![T::infinity(); nv];
    let mut pred = vec![usize::MAX; nv];
    let mut heap = BinaryHeap::new();
    for &(v, d) in seeds {
        if d < dist[v] {
            dist[v] = d;
            heap.push(Item { d, v });
        }
    }
    let half = T::lit(0.5);
    while let Some(Item { d, v }) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for (w, len) in mesh.graph_neighbors(v) {
            let nd = d + half * (root[v] + root[w]) * len;
            if nd < dist[w] {
                dist[w] = nd;
                pred[w] = v;
                heap.push(Item { d: nd, v: w });
            }
        }
    }
    (dist, pred)
}

fn check_unit<T: Real>(z: &Vector3<T>) -> Result<()> {
    if (z.norm() - T::one()).abs() <= T::lit(1e-9) {
        Ok(())
    } else {
        domain(format!("endpoint must be a unit vector, |z| = {}", z.norm()))
    }
}

fn lex_less<T: Real>(a: &Vector3<T>, b: &Vector3<T>) -> bool {
    for k in 0..3 {
        if a[k] != b[k] {
            return a[k] < b[k];
        }
    }
    false
}

/// Relaxed minimal path between `z0` and `z1`. Candidates are the great-circle
/// arc and the graph shortest paths on every mesh level from 2 up to `level`;
/// each is relaxed and the smallest action wins, so the value never increases
/// with the level and never exceeds the relaxed great-circle action.
pub fn geodesic_path<T: Real>(spec: &AnisotropySpec<T>, z0: &Vector3<T>, z1: &Vector3<T>, level: usize) -> Result<GeodesicPath<T>> {
    check_unit(z0)?;
    check_unit(z1)?;
    if level < 2 {
        return validation(format!("mesh level {level} is too coarse; at least 2 is required"));
    }
    if (*z0 - *z1).norm() <= T::lit(1e-15) {
        return Ok(GeodesicPath { points: vec![*z0, *z1], value: T::zero() });
    }
    if lex_less(z1, z0) {
        let mut p = geodesic_path(spec, z1, z0, level)?;
        p.points.reverse();
        return Ok(p);
    }
    let z0 = z0.normalized().expect("unit");
    let z1 = z1.normalized().expect("unit");
    let mut best: Option<GeodesicPath<T>> = None;
    let mut consider = |pts: Vec<Vector3<T>>| {
        let relaxed = relax(spec, &pts);
        let value = path_action(spec, &relaxed);
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(GeodesicPath { points: relaxed, value });
        }
    };
    if z0.dot(&z1) > T::lit(-1.0 + 1e-9) {
        consider(great_circle(&z0, &z1, RELAX_STAGES[0]));
    }
    let mut points: Vec<Vector3<T>> = spec.wells().to_vec();
    points.push(z0);
    points.push(z1);
    for lvl in 2..=level {
        let (mesh, ids) = SphereMesh::with_points(lvl, &points)?;
        let (src, dst) = (ids[ids.len() - 2], ids[ids.len() - 1]);
        let (_, pred) = dijkstra(&mesh, spec, &[(src, T::zero())]);
        let mut chain = vec![dst];
        while *chain.last().unwrap() != src {
            let p = pred[*chain.last().unwrap()];
            if p == usize::MAX {
                break;
            }
            chain.push(p);
        }
        chain.reverse();
        let mut pts: Vec<Vector3<T>> = chain.iter().map(|&v| mesh.vertices()[v]).collect();
        pts[0] = z0;
        *pts.last_mut().unwrap() = z1;
        consider(pts);
    }
    Ok(best.expect("at least one candidate"))
}

/// `d_Φ(z0, z1)` computed by [`geodesic_path`].
pub fn geodesic_distance<T: Real>(spec: &AnisotropySpec<T>, z0: &Vector3<T>, z1: &Vector3<T>, level: usize) -> Result<T> {
    geodesic_path(spec, z0, z1, level).map(|p| p.value)
}

/// `σ^{ij} = d_Φ(b_i, b_j)`.
pub fn surface_tension_table<T: Real>(spec: &AnisotropySpec<T>, level: usize) -> Result<Vec<Vec<T>>> {
    let m = spec.well_count();
    let w = spec.wells();
    let mut s = vec![vec![T::zero(); m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let d = geodesic_distance(spec, &w[i], &w[j], level)?;
            s[i][j] = d;
            s[j][i] = d;
        }
    }
    Ok(s)
}

/// `f_i = d_Φ(·, b_i)` at every vertex of `mesh` by single-source shortest
/// paths. If `b_i` is not a vertex, the vertices of its face are seeded with
/// their edge weights to `b_i`.
pub fn well_distance_field<T: Real>(spec: &AnisotropySpec<T>, i: usize, mesh: &SphereMesh<T>) -> Vec<T> {
    let b = spec.wells()[i];
    let seeds: Vec<(usize, T)> = match mesh.find_vertex(&b, T::lit(1e-9)) {
        Some(v) => vec![(v, T::zero())],
        None => {
            let (f, _) = mesh.locate(&b);
            mesh.faces()[f]
                .iter()
                .map(|&v| {
                    let p = mesh.vertices()[v];
                    (v, T::lit(0.5) * (spec.sqrt_phi(&p) + spec.sqrt_phi(&b)) * (p - b).norm())
                })
                .collect()
        }
    };
    dijkstra(mesh, spec, &seeds).0
}

/// All well-distance fields on one mesh containing the wells as vertices.
#[derive(Clone, Debug)]
pub struct WellDistanceFields<T> {
    spec: AnisotropySpec<T>,
    mesh: SphereMesh<T>,
    fields: Vec<Vec<T>>,
}

impl<T: Real> WellDistanceFields<T> {
    pub fn new(spec: &AnisotropySpec<T>, level: usize) -> Result<Self> {
        let (mesh, _) = SphereMesh::with_points(level, spec.wells())?;
        let fields = (0..spec.well_count()).map(|i| well_distance_field(spec, i, &mesh)).collect();
        Ok(Self { spec: spec.clone(), mesh, fields })
    }

    pub fn mesh(&self) -> &SphereMesh<T> {
        &self.mesh
    }

    pub fn spec(&self) -> &AnisotropySpec<T> {
        &self.spec
    }

    pub fn well_count(&self) -> usize {
        self.fields.len()
    }

    /// Per-vertex values of `f_i`.
    pub fn field(&self, i: usize) -> &[T] {
        &self.fields[i]
    }

    /// `f_i(z)` by linear interpolation on the mesh.
    pub fn value(&self, i: usize, z: &Vector3<T>) -> T {
        self.mesh.interpolate(&self.fields[i], z)
    }

    /// Tangential gradient of `f_i` at `z` with its length replaced by `√Φ(z)`,
    /// the eikonal value of the exact distance function.
    pub fn eikonal_gradient(&self, i: usize, z: &Vector3<T>) -> Vector3<T> {
        let g = self.mesh.interpolate_gradient(&self.fields[i], z);
        match g.normalized() {
            Some(dir) => dir * self.spec.sqrt_phi(z),
            None => Vector3::zero(),
        }
    }
}
