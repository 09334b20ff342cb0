use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::grid::LabelField;
use crate::scalar::Real;
use crate::tensor::Vector3;

/// Distance from each cell center to the nearest interface face bounding its
/// own label region, with the label across that face.
#[derive(Clone, Debug)]
pub struct InterfaceDistance<T> {
    /// `None` for cells whose region has no interface.
    pub nearest: Vec<Option<(T, usize)>>,
}

struct Entry {
    dist: f64,
    cell: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then on cell index
        other.dist.total_cmp(&self.dist).then_with(|| other.cell.cmp(&self.cell))
    }
}

/// Nearest-seed propagation restricted to same-label regions. Seeds are the
/// centers of faces between differently labeled cells; each cell inherits the
/// seed of a 26-neighbor in its region when that is closer.
pub fn interface_distance<T: Real>(m: &LabelField<T>) -> InterfaceDistance<T> {
    let grid = m.grid();
    let labels = m.labels();
    let n = grid.dims();
    let h = grid.spacing();
    let mut seed: Vec<Option<(Vector3<T>, usize)>> = vec![None; grid.len()];
    let mut dist = vec![f64::INFINITY; grid.len()];
    let mut heap = BinaryHeap::new();
    for c in 0..grid.len() {
        let x = grid.center(c);
        for axis in 0..3 {
            for dir in [-1i32, 1] {
                if let Some(nb) = grid.neighbor(c, axis, dir) {
                    if labels[nb] != labels[c] {
                        let mut p = x;
                        p.0[axis] = p.0[axis] + T::lit(0.5 * dir as f64) * h[axis];
                        let d = (p - x).norm().as_f64();
                        if d < dist[c] {
                            dist[c] = d;
                            seed[c] = Some((p, labels[nb]));
                        }
                    }
                }
            }
        }
        if seed[c].is_some() {
            heap.push(Entry { dist: dist[c], cell: c });
        }
    }
    while let Some(Entry { dist: d, cell: c }) = heap.pop() {
        if d > dist[c] {
            continue;
        }
        let (p, partner) = seed[c].expect("seeded");
        let cc = grid.coords(c);
        for dk in -1i64..=1 {
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let q = [cc[0] as i64 + di, cc[1] as i64 + dj, cc[2] as i64 + dk];
                    if (0..3).any(|a| q[a] < 0 || q[a] >= n[a] as i64) {
                        continue;
                    }
                    let nb = grid.index(q[0] as usize, q[1] as usize, q[2] as usize);
                    if nb == c || labels[nb] != labels[c] {
                        continue;
                    }
                    let nd = (grid.center(nb) - p).norm().as_f64();
                    if nd < dist[nb] {
                        dist[nb] = nd;
                        seed[nb] = Some((p, partner));
                        heap.push(Entry { dist: nd, cell: nb });
                    }
                }
            }
        }
    }
    let nearest = seed.iter().zip(&dist).map(|(s, &d)| s.map(|(_, l)| (T::lit(d), l))).collect();
    InterfaceDistance { nearest }
}
