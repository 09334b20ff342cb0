use std::f64::consts::PI;

/// Offsets beyond this many cells (max-norm) use the point-dipole far field.
const NEAR_CELLS: i64 = 16;

/// `a · ln(b + r)` with the cancellation-free form for `b < 0`.
fn a_log(a: f64, b: f64, r: f64, rest2: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    a * log_b_plus_r(b, r, rest2)
}

/// `ln(b + r)` where `r² = b² + rest2`.
fn log_b_plus_r(b: f64, r: f64, rest2: f64) -> f64 {
    if b >= 0.0 {
        (b + r).ln()
    } else {
        (rest2 / (r - b)).ln()
    }
}

/// Antiderivative of `1/√(c² + y² + z²)` in `(y, z)`.
fn corner(y: f64, z: f64, c: f64) -> f64 {
    let r = (y * y + z * z + c * c).sqrt();
    let mut v = a_log(y, z, r, y * y + c * c) + a_log(z, y, r, z * z + c * c);
    if c != 0.0 && r > 0.0 {
        v -= c * (y * z / (c * r)).atan();
    }
    v
}

const CORNERS: [(usize, usize, f64); 4] = [(1, 1, 1.0), (0, 1, -1.0), (1, 0, -1.0), (0, 0, 1.0)];

/// Axis roles: `j` normal to the charged faces, `(a, b)` tangential.
fn tangential(j: usize) -> (usize, usize) {
    match j {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Face geometry relative to the target: tangential extents and the normal
/// distances of the `+` and `−` faces.
fn geometry(j: usize, o: [i64; 3], h: [f64; 3]) -> ([f64; 2], [f64; 2], f64, f64) {
    let (a, b) = tangential(j);
    let ya = -o[a] as f64 * h[a];
    let za = -o[b] as f64 * h[b];
    let xt = o[j] as f64 * h[j];
    (
        [ya - 0.5 * h[a], ya + 0.5 * h[a]],
        [za - 0.5 * h[b], za + 0.5 * h[b]],
        xt - 0.5 * h[j],
        xt + 0.5 * h[j],
    )
}

fn far(o: [i64; 3]) -> bool {
    o.iter().map(|x| x.abs()).max().unwrap_or(0) > NEAR_CELLS
}

/// Potential at cell offset `o` (target minus source, in cells) generated by a
/// unit magnetization along axis `j` filling one cell of size `h`:
/// `(1/4π)(∫_{face+} 1/r − ∫_{face−} 1/r)`.
pub fn potential_kernel(j: usize, o: [i64; 3], h: [f64; 3]) -> f64 {
    if far(o) {
        let r = [0, 1, 2].map(|k| o[k] as f64 * h[k]);
        let d2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
        return h[0] * h[1] * h[2] * r[j] / (4.0 * PI * d2 * d2.sqrt());
    }
    let (y, z, cp, cm) = geometry(j, o, h);
    let rect = |c: f64| CORNERS.iter().map(|&(p, q, s)| s * corner(y[p], z[q], c)).sum::<f64>();
    (rect(cp) - rect(cm)) / (4.0 * PI)
}

/// Component `k` of `h = −∇v` at the target cell center for the same source:
/// the exact gradient of [`potential_kernel`] in the target position.
pub fn field_kernel(k: usize, j: usize, o: [i64; 3], h: [f64; 3]) -> f64 {
    if far(o) {
        let r = [0, 1, 2].map(|a| o[a] as f64 * h[a]);
        let d2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
        let d = d2.sqrt();
        let delta = if k == j { 1.0 } else { 0.0 };
        return h[0] * h[1] * h[2] * (3.0 * r[k] * r[j] / d2 - delta) / (4.0 * PI * d2 * d);
    }
    let (a, b) = tangential(j);
    let (y, z, cp, cm) = geometry(j, o, h);
    // derivative of the corner function in the target coordinate `t_k`
    let d_corner = |yy: f64, zz: f64, c: f64| -> f64 {
        let r = (yy * yy + zz * zz + c * c).sqrt();
        if k == j {
            -(yy * zz / (c * r)).atan()
        } else if k == a {
            -log_b_plus_r(zz, r, yy * yy + c * c)
        } else {
            debug_assert_eq!(k, b);
            -log_b_plus_r(yy, r, zz * zz + c * c)
        }
    };
    let rect = |c: f64| CORNERS.iter().map(|&(p, q, s)| s * d_corner(y[p], z[q], c)).sum::<f64>();
    -(rect(cp) - rect(cm)) / (4.0 * PI)
}
