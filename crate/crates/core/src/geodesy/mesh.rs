use std::collections::HashMap;

use crate::error::{validation, Result};
use crate::scalar::Real;
use crate::tensor::Vector3;

/// Graph neighborhoods used for shortest paths reach this many rings, which
/// keeps the direction bias of the graph metric well below one percent.
const RING_DEPTH: usize = 3;
const BUCKETS: usize = 24;

/// Icosahedral subdivision of S² with optional inserted vertices.
#[derive(Clone, Debug)]
pub struct SphereMesh<T> {
    level: usize,
    vertices: Vec<Vector3<T>>,
    faces: Vec<[usize; 3]>,
    /// Unique 1-ring edges `(a, b, |v_a − v_b|)`.
    edges: Vec<(usize, usize, T)>,
    ring_offsets: Vec<usize>,
    ring_targets: Vec<usize>,
    ring_lengths: Vec<T>,
    buckets: Vec<Vec<usize>>,
}

impl<T: Real> SphereMesh<T> {
    /// Level-`level` icosphere (`20·4^level` faces).
    pub fn icosphere(level: usize) -> Result<Self> {
        Self::with_points(level, &[]).map(|(m, _)| m)
    }

    /// Icosphere with each extra unit point made a vertex: points closer than
    /// `1e-9` to an existing vertex snap it onto the point, others split their
    /// containing face. Returns the mesh and the vertex index of every point.
    pub fn with_points(level: usize, points: &[Vector3<T>]) -> Result<(Self, Vec<usize>)> {
        if level > 8 {
            return validation(format!("mesh level {level} is too fine"));
        }
        let (mut vertices, mut faces) = icosahedron::<T>();
        for _ in 0..level {
            let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
            let mut next = Vec::with_capacity(faces.len() * 4);
            for f in &faces {
                let mut mid = [0usize; 3];
                for e in 0..3 {
                    let (a, b) = (f[e], f[(e + 1) % 3]);
                    let key = (a.min(b), a.max(b));
                    mid[e] = *cache.entry(key).or_insert_with(|| {
                        let m = (vertices[a] + vertices[b]).normalized().expect("nonantipodal edge");
                        vertices.push(m);
                        vertices.len() - 1
                    });
                }
                next.push([f[0], mid[0], mid[2]]);
                next.push([f[1], mid[1], mid[0]]);
                next.push([f[2], mid[2], mid[1]]);
                next.push([mid[0], mid[1], mid[2]]);
            }
            faces = next;
        }
        let mut ids = Vec::with_capacity(points.len());
        let snap = T::lit(1e-9);
        for p in points {
            if ((p.norm() - T::one()).abs()) > T::lit(1e-9) {
                return validation("inserted points must be unit vectors");
            }
            let p = &p.normalized().expect("unit");
            if let Some(v) = vertices.iter().position(|v| (*v - *p).norm() < snap) {
                vertices[v] = *p;
                ids.push(v);
                continue;
            }
            let (f, _) = locate_brute(&vertices, &faces, p);
            let [a, b, c] = faces[f];
            vertices.push(*p);
            let v = vertices.len() - 1;
            faces[f] = [a, b, v];
            faces.push([b, c, v]);
            faces.push([c, a, v]);
            ids.push(v);
        }
        let mut mesh = SphereMesh {
            level,
            vertices,
            faces,
            edges: Vec::new(),
            ring_offsets: Vec::new(),
            ring_targets: Vec::new(),
            ring_lengths: Vec::new(),
            buckets: Vec::new(),
        };
        mesh.build_graph();
        mesh.build_buckets();
        Ok((mesh, ids))
    }

    fn build_graph(&mut self) {
        let nv = self.vertices.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for f in &self.faces {
            for e in 0..3 {
                let (a, b) = (f[e], f[(e + 1) % 3]);
                if !adj[a].contains(&b) {
                    adj[a].push(b);
                }
                if !adj[b].contains(&a) {
                    adj[b].push(a);
                }
            }
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
        }
        self.edges = adj
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
            .map(|(a, b)| (a, b, (self.vertices[a] - self.vertices[b]).norm()))
            .collect();
        let mut mark = vec![usize::MAX; nv];
        self.ring_offsets = Vec::with_capacity(nv + 1);
        self.ring_offsets.push(0);
        for s in 0..nv {
            mark[s] = s;
            let mut frontier = vec![s];
            let mut found = Vec::new();
            for _ in 0..RING_DEPTH {
                let mut next = Vec::new();
                for &v in &frontier {
                    for &w in &adj[v] {
                        if mark[w] != s {
                            mark[w] = s;
                            next.push(w);
                            found.push(w);
                        }
                    }
                }
                frontier = next;
            }
            found.sort_unstable();
            for w in found {
                self.ring_targets.push(w);
                self.ring_lengths.push((self.vertices[s] - self.vertices[w]).norm());
            }
            self.ring_offsets.push(self.ring_targets.len());
        }
    }

    fn bucket_of(p: &Vector3<T>) -> [usize; 3] {
        [0, 1, 2].map(|k| {
            let s = ((p[k].as_f64() + 1.05) / 2.1 * BUCKETS as f64).floor();
            (s.max(0.0) as usize).min(BUCKETS - 1)
        })
    }

    fn build_buckets(&mut self) {
        self.buckets = vec![Vec::new(); BUCKETS * BUCKETS * BUCKETS];
        for (fi, f) in self.faces.iter().enumerate() {
            let mut lo = [f64::INFINITY; 3];
            let mut hi = [f64::NEG_INFINITY; 3];
            let mut edge: f64 = 0.0;
            for e in 0..3 {
                let v = self.vertices[f[e]];
                edge = edge.max((v - self.vertices[f[(e + 1) % 3]]).norm().as_f64());
                for k in 0..3 {
                    lo[k] = lo[k].min(v[k].as_f64());
                    hi[k] = hi[k].max(v[k].as_f64());
                }
            }
            // The spherical patch bulges outward by at most edge²/8.
            let pad = edge * edge / 4.0 + 1e-9;
            let blo = Self::bucket_of(&Vector3::from_f64(lo.map(|x| x - pad)));
            let bhi = Self::bucket_of(&Vector3::from_f64(hi.map(|x| x + pad)));
            for i in blo[0]..=bhi[0] {
                for j in blo[1]..=bhi[1] {
                    for k in blo[2]..=bhi[2] {
                        self.buckets[i + BUCKETS * (j + BUCKETS * k)].push(fi);
                    }
                }
            }
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn vertices(&self) -> &[Vector3<T>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[(usize, usize, T)] {
        &self.edges
    }

    /// Mean 1-ring edge length.
    pub fn mean_edge_length(&self) -> T {
        let s: T = self.edges.iter().map(|e| e.2).sum();
        s / T::from_count(self.edges.len().max(1))
    }

    /// Shortest-path neighbors of `v` with Euclidean lengths.
    pub fn graph_neighbors(&self, v: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let r = self.ring_offsets[v]..self.ring_offsets[v + 1];
        self.ring_targets[r.clone()].iter().copied().zip(self.ring_lengths[r].iter().copied())
    }

    /// Vertex coinciding with `z` within `tol`.
    pub fn find_vertex(&self, z: &Vector3<T>, tol: T) -> Option<usize> {
        let (f, _) = self.locate(z);
        self.faces[f].iter().copied().find(|&v| (self.vertices[v] - *z).norm() <= tol).or_else(|| {
            self.vertices.iter().position(|v| (*v - *z).norm() <= tol)
        })
    }

    /// Face hit by the ray through `z` and its barycentric coordinates.
    pub fn locate(&self, z: &Vector3<T>) -> (usize, [T; 3]) {
        let b = Self::bucket_of(z);
        let mut best: Option<(usize, [T; 3], T)> = None;
        for &f in &self.buckets[b[0] + BUCKETS * (b[1] + BUCKETS * b[2])] {
            if let Some(bc) = ray_barycentric(&self.vertices, &self.faces[f], z) {
                let m = bc[0].min(bc[1]).min(bc[2]);
                if best.as_ref().is_none_or(|x| m > x.2) {
                    best = Some((f, bc, m));
                }
            }
        }
        match best {
            Some((f, bc, m)) if m >= T::lit(-1e-9) => (f, bc),
            _ => locate_brute(&self.vertices, &self.faces, z),
        }
    }

    /// Linear interpolation of per-vertex values at `z`.
    pub fn interpolate(&self, values: &[T], z: &Vector3<T>) -> T {
        let (f, bc) = self.locate(z);
        let [a, b, c] = self.faces[f];
        let w = bc.map(|x| x.max(T::zero()));
        let s = w[0] + w[1] + w[2];
        (w[0] * values[a] + w[1] * values[b] + w[2] * values[c]) / s
    }

    /// Gradient of the piecewise-linear interpolant at `z`, projected to the
    /// tangent plane of S² at `z`.
    pub fn interpolate_gradient(&self, values: &[T], z: &Vector3<T>) -> Vector3<T> {
        let (f, _) = self.locate(z);
        let [a, b, c] = self.faces[f];
        let (v0, v1, v2) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        let e1 = v1 - v0;
        let e2 = v2 - v0;
        let n = e1.cross(&e2);
        let nn = n.norm_squared();
        if nn == T::zero() {
            return Vector3::zero();
        }
        let g = (e2.cross(&n) * (values[b] - values[a]) + n.cross(&e1) * (values[c] - values[a])) * (T::one() / nn);
        g - *z * g.dot(z)
    }
}

/// Barycentric coordinates of the intersection of the ray through `z` with the
/// planar triangle, or `None` if the ray points away.
fn ray_barycentric<T: Real>(vs: &[Vector3<T>], f: &[usize; 3], z: &Vector3<T>) -> Option<[T; 3]> {
    let m = crate::tensor::Matrix3::from_cols(vs[f[0]], vs[f[1]], vs[f[2]]);
    let c = m.inverse()? * *z;
    let s = c[0] + c[1] + c[2];
    if s > T::zero() {
        Some([c[0] / s, c[1] / s, c[2] / s])
    } else {
        None
    }
}

fn locate_brute<T: Real>(vs: &[Vector3<T>], faces: &[[usize; 3]], z: &Vector3<T>) -> (usize, [T; 3]) {
    let mut best = (0usize, [T::zero(); 3], T::neg_infinity());
    for (fi, f) in faces.iter().enumerate() {
        if let Some(bc) = ray_barycentric(vs, f, z) {
            let m = bc[0].min(bc[1]).min(bc[2]);
            if m > best.2 {
                best = (fi, bc, m);
            }
        }
    }
    (best.0, best.1)
}

fn icosahedron<T: Real>() -> (Vec<Vector3<T>>, Vec<[usize; 3]>) {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0], [1.0, t, 0.0], [-1.0, -t, 0.0], [1.0, -t, 0.0],
        [0.0, -1.0, t], [0.0, 1.0, t], [0.0, -1.0, -t], [0.0, 1.0, -t],
        [t, 0.0, -1.0], [t, 0.0, 1.0], [-t, 0.0, -1.0], [-t, 0.0, 1.0],
    ];
    let verts = raw.iter().map(|v| Vector3::<T>::from_f64(*v).normalized().expect("nonzero")).collect();
    let faces = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    (verts, faces)
}
