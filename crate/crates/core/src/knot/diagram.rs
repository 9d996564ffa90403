//! From a closed curve on `S^3` to a planar diagram.
//!
//! The loop is rescaled onto the unit sphere and stereographically projected
//! from a pole into `R^3`. The resulting closed polyline is then projected
//! orthographically along a view direction; transverse intersections of
//! non-adjacent segments become crossings, with the segment nearer to the
//! viewer on top.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pd::{Crossing, PDCode};
use crate::error::KnotError;

pub type Point3 = [f64; 3];

/// Smallest allowed distance between the pole and the (unit-sphere) curve.
pub const POLE_MIN_DISTANCE: f64 = 0.05;

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn unit4(a: &[f64; 4]) -> [f64; 4] {
    let n = dot4(a, a).sqrt();
    a.map(|x| x / n)
}

/// Orthonormal basis of the hyperplane orthogonal to `pole`.
fn complement_basis(pole: &[f64; 4]) -> [[f64; 4]; 3] {
    let mut basis: Vec<[f64; 4]> = vec![*pole];
    for k in 0..4 {
        let mut e = [0.0; 4];
        e[k] = 1.0;
        for b in &basis {
            let d = dot4(&e, b);
            for i in 0..4 {
                e[i] -= d * b[i];
            }
        }
        let n = dot4(&e, &e).sqrt();
        if n > 1e-6 {
            basis.push(e.map(|x| x / n));
        }
        if basis.len() == 4 {
            break;
        }
    }
    [basis[1], basis[2], basis[3]]
}

fn min_pole_distance(points: &[[f64; 4]], pole: &[f64; 4]) -> f64 {
    points
        .iter()
        .map(|p| {
            let u = unit4(p);
            (0..4).map(|i| (u[i] - pole[i]).powi(2)).sum::<f64>().sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Stereographic projection from `pole` of the loop, rescaled to `S^3`.
pub fn stereographic_project(
    points: &[[f64; 4]],
    pole: &[f64; 4],
) -> Result<Vec<Point3>, KnotError> {
    let pole = unit4(pole);
    let d = min_pole_distance(points, &pole);
    if d <= POLE_MIN_DISTANCE {
        return Err(KnotError::PoleTooClose { distance: d });
    }
    let basis = complement_basis(&pole);
    Ok(points
        .iter()
        .map(|p| {
            let u = unit4(p);
            let s = 1.0 - dot4(&u, &pole);
            [
                dot4(&u, &basis[0]) / s,
                dot4(&u, &basis[1]) / s,
                dot4(&u, &basis[2]) / s,
            ]
        })
        .collect())
}

/// Picks the random pole farthest from the curve among `tries` candidates.
pub fn auto_pole(points: &[[f64; 4]], seed: u64, tries: usize) -> [f64; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = ([0.0, 0.0, 0.0, 1.0], f64::NEG_INFINITY);
    for _ in 0..tries.max(1) {
        let p = random_unit4(&mut rng);
        let d = min_pole_distance(points, &p);
        if d > best.1 {
            best = (p, d);
        }
    }
    best.0
}

pub fn random_unit4(rng: &mut ChaCha8Rng) -> [f64; 4] {
    loop {
        let p: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = dot4(&p, &p).sqrt();
        if n > 1e-3 && n <= 1.0 {
            return p.map(|x| x / n);
        }
    }
}

pub fn random_unit3(rng: &mut ChaCha8Rng) -> Point3 {
    loop {
        let p: Point3 = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            return p.map(|x| x / n);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramOptions {
    /// Minimum planar distance between two crossings, relative to the
    /// diagram's bounding box.
    pub tol_cross: f64,
    /// Minimum |sin| of the angle between crossing segments.
    pub min_sin_angle: f64,
    /// Minimum depth gap at a crossing, relative to the bounding box.
    pub min_depth_gap: f64,
    pub max_retries: usize,
    pub seed: u64,
}

impl Default for DiagramOptions {
    fn default() -> Self {
        DiagramOptions {
            tol_cross: 1e-9,
            min_sin_angle: 1e-6,
            min_depth_gap: 1e-9,
            max_retries: 16,
            seed: 11,
        }
    }
}

/// Geometry of one crossing in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingSite {
    pub position: [f64; 2],
    /// Curve parameters (segment index + fraction) of the two passages.
    pub over_param: f64,
    pub under_param: f64,
    pub sign: i8,
}

/// A planar diagram together with the picture it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagram {
    pub pd: PDCode,
    pub direction: Point3,
    pub plane: Vec<[f64; 2]>,
    pub sites: Vec<CrossingSite>,
}

fn cross3(a: &Point3, b: &Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: &Point3, b: &Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn unit3(a: &Point3) -> Point3 {
    let n = dot3(a, a).sqrt();
    a.map(|x| x / n)
}

/// Right-handed frame `(u, v, d)`: plane coordinates `(p·u, p·v)`, depth `p·d`
/// increasing towards the viewer.
fn view_frame(d: &Point3) -> (Point3, Point3) {
    let helper = if d[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let u = unit3(&cross3(&helper, d));
    let v = cross3(d, &u);
    (u, v)
}

struct RawCrossing {
    i: usize,
    s: f64,
    j: usize,
    u: f64,
    pos: [f64; 2],
    sin: f64,
    depth_i: f64,
    depth_j: f64,
}

fn segment_intersection(
    a0: [f64; 2],
    a1: [f64; 2],
    b0: [f64; 2],
    b1: [f64; 2],
) -> Option<(f64, f64, f64)> {
    let r = [a1[0] - a0[0], a1[1] - a0[1]];
    let q = [b1[0] - b0[0], b1[1] - b0[1]];
    let den = r[0] * q[1] - r[1] * q[0];
    if den == 0.0 {
        return None;
    }
    let w = [b0[0] - a0[0], b0[1] - a0[1]];
    let s = (w[0] * q[1] - w[1] * q[0]) / den;
    let u = (w[0] * r[1] - w[1] * r[0]) / den;
    if !(0.0..1.0).contains(&s) || !(0.0..1.0).contains(&u) {
        return None;
    }
    let sin = den / ((r[0] * r[0] + r[1] * r[1]).sqrt() * (q[0] * q[0] + q[1] * q[1]).sqrt());
    Some((s, u, sin))
}

/// All segment intersections, or `None` when the projection is not generic.
fn find_crossings(
    plane: &[[f64; 2]],
    depth: &[f64],
    opts: &DiagramOptions,
    scale: f64,
) -> Option<Vec<RawCrossing>> {
    let n = plane.len();
    // sweep over segments sorted by their left end
    let mut segs: Vec<(f64, f64, usize)> = (0..n)
        .map(|i| {
            let a = plane[i];
            let b = plane[(i + 1) % n];
            (a[0].min(b[0]), a[0].max(b[0]), i)
        })
        .collect();
    segs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::new();
    let end_tol = 1e-12;
    for k in 0..segs.len() {
        let (_, hi_k, i) = segs[k];
        for &(lo_m, _, j) in &segs[k + 1..] {
            if lo_m > hi_k {
                break;
            }
            let (i, j) = (i.min(j), i.max(j));
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let a0 = plane[i];
            let a1 = plane[(i + 1) % n];
            let b0 = plane[j];
            let b1 = plane[(j + 1) % n];
            let ymin_a = a0[1].min(a1[1]);
            let ymax_a = a0[1].max(a1[1]);
            if b0[1].max(b1[1]) < ymin_a || b0[1].min(b1[1]) > ymax_a {
                continue;
            }
            if let Some((s, u, sin)) = segment_intersection(a0, a1, b0, b1) {
                // passages through a vertex are not generic
                if s < end_tol || s > 1.0 - end_tol || u < end_tol || u > 1.0 - end_tol {
                    return None;
                }
                let pos = [a0[0] + s * (a1[0] - a0[0]), a0[1] + s * (a1[1] - a0[1])];
                let di = depth[i] + s * (depth[(i + 1) % n] - depth[i]);
                let dj = depth[j] + u * (depth[(j + 1) % n] - depth[j]);
                out.push(RawCrossing {
                    i,
                    s,
                    j,
                    u,
                    pos,
                    sin,
                    depth_i: di,
                    depth_j: dj,
                });
            }
        }
    }
    for c in &out {
        if c.sin.abs() < opts.min_sin_angle || (c.depth_i - c.depth_j).abs() < opts.min_depth_gap * scale {
            return None;
        }
    }
    // distinct crossing positions
    let mut by_x: Vec<&RawCrossing> = out.iter().collect();
    by_x.sort_by(|a, b| a.pos[0].total_cmp(&b.pos[0]));
    let tol = opts.tol_cross * scale;
    for (k, a) in by_x.iter().enumerate() {
        for b in &by_x[k + 1..] {
            if b.pos[0] - a.pos[0] > tol {
                break;
            }
            if (b.pos[1] - a.pos[1]).abs() <= tol {
                return None;
            }
        }
    }
    Some(out)
}

/// Builds the PD code from crossings on a closed polyline with `n` segments.
fn build_pd(raw: &[RawCrossing], plane: &[[f64; 2]]) -> (PDCode, Vec<CrossingSite>) {
    let n = plane.len();
    if raw.is_empty() {
        return (PDCode::unknot(), Vec::new());
    }
    let dir = |seg: usize| {
        let a = plane[seg];
        let b = plane[(seg + 1) % n];
        [b[0] - a[0], b[1] - a[1]]
    };
    // passages: (curve parameter, crossing index, is_over)
    let mut passages: Vec<(f64, usize, bool)> = Vec::with_capacity(2 * raw.len());
    let mut sites = Vec::with_capacity(raw.len());
    for (k, c) in raw.iter().enumerate() {
        let pi = c.i as f64 + c.s;
        let pj = c.j as f64 + c.u;
        let i_over = c.depth_i > c.depth_j;
        let (over_seg, under_seg) = if i_over { (c.i, c.j) } else { (c.j, c.i) };
        let o = dir(over_seg);
        let u = dir(under_seg);
        let sign: i8 = if o[0] * u[1] - o[1] * u[0] > 0.0 { 1 } else { -1 };
        passages.push((pi, k, i_over));
        passages.push((pj, k, !i_over));
        sites.push(CrossingSite {
            position: c.pos,
            over_param: if i_over { pi } else { pj },
            under_param: if i_over { pj } else { pi },
            sign,
        });
    }
    passages.sort_by(|a, b| a.0.total_cmp(&b.0));
    let m = passages.len();
    // edge k (label k+1) runs from passage k to passage k+1
    let mut incoming = vec![[0usize; 2]; raw.len()];
    let mut outgoing = vec![[0usize; 2]; raw.len()];
    for (k, &(_, c, over)) in passages.iter().enumerate() {
        let into = if k == 0 { m } else { k };
        let out_of = k + 1;
        let slot = usize::from(over);
        incoming[c][slot] = into;
        outgoing[c][slot] = out_of;
    }
    let crossings = (0..raw.len())
        .map(|c| {
            let sign = sites[c].sign;
            let (a, cc) = (incoming[c][0], outgoing[c][0]);
            let (oi, oo) = (incoming[c][1], outgoing[c][1]);
            // positive: over runs d -> b
            let labels = if sign > 0 { [a, oo, cc, oi] } else { [a, oi, cc, oo] };
            Crossing::new(labels, sign)
        })
        .collect();
    (PDCode::new(crossings), sites)
}

/// Orthographic diagram of a closed 3D polyline viewed along `direction`.
/// Non-generic directions are perturbed and retried.
pub fn extract_diagram(
    polyline: &[Point3],
    direction: &Point3,
    opts: &DiagramOptions,
) -> Result<Diagram, KnotError> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut d = unit3(direction);
    for _ in 0..=opts.max_retries {
        let (u, v) = view_frame(&d);
        let plane: Vec<[f64; 2]> = polyline.iter().map(|p| [dot3(p, &u), dot3(p, &v)]).collect();
        let depth: Vec<f64> = polyline.iter().map(|p| dot3(p, &d)).collect();
        let scale = bounding_scale(&plane);
        if let Some(raw) = find_crossings(&plane, &depth, opts, scale) {
            let (pd, sites) = build_pd(&raw, &plane);
            pd.validate()?;
            return Ok(Diagram {
                pd,
                direction: d,
                plane,
                sites,
            });
        }
        let jitter = random_unit3(&mut rng);
        d = unit3(&[d[0] + 1e-3 * jitter[0], d[1] + 1e-3 * jitter[1], d[2] + 1e-3 * jitter[2]]);
    }
    Err(KnotError::NotGeneric(opts.max_retries + 1))
}

fn bounding_scale(plane: &[[f64; 2]]) -> f64 {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in plane {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE)
}
