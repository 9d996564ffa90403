//! Tracing the link `f^{-1}(0) ∩ S^3_ε` of a germ `R^4 -> R^2`.
//!
//! The curve is the zero set of `G(x) = (f1(x), f2(x), |x|^2 - ε^2)`. Its
//! oriented tangent is the 4D cross product of the three gradient rows, and a
//! minimum-norm Gauss-Newton iteration pulls predicted points back onto it.
//! A loop closes when the continuation crosses the hyperplane through the
//! seed normal to the seed tangent; the crossing point is then solved for
//! exactly and compared with the seed.

use nalgebra::{Matrix3, Matrix3x4, Matrix4, SymmetricEigen, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::TraceError;
use crate::polymap::PolyMap;

pub type Point4 = [f64; 4];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    pub eps: f64,
    pub rng_seed: u64,
    /// Step bounds as fractions of `eps`.
    pub h_min_factor: f64,
    pub h_max_factor: f64,
    pub max_steps: usize,
    /// Random sphere samples used to look for seeds.
    pub seed_samples: usize,
    /// How many of the best samples are polished into seeds.
    pub seed_candidates: usize,
    /// Largest accepted turn of the tangent in a single step (radians).
    pub max_turn: f64,
    /// Cosine threshold between tangents for closure.
    pub closure_alignment: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            eps: 0.1,
            rng_seed: 7,
            h_min_factor: 1e-6,
            h_max_factor: 0.05,
            max_steps: 200_000,
            seed_samples: 4000,
            seed_candidates: 48,
            max_turn: 0.15,
            closure_alignment: 0.9,
        }
    }
}

impl TraceOptions {
    pub fn with_eps(eps: f64) -> Self {
        TraceOptions {
            eps,
            ..TraceOptions::default()
        }
    }

    fn h_min(&self) -> f64 {
        self.h_min_factor * self.eps
    }

    fn h_max(&self) -> f64 {
        self.h_max_factor * self.eps
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// `|f(x)|`
    pub map: f64,
    /// `||x| - ε|`
    pub sphere: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// Tangent is the cofactor vector of `[∇f1; ∇f2; x]`, i.e.
    /// `det[∇f1; ∇f2; x; t] > 0`.
    CofactorPositive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracedLoop {
    pub points: Vec<Point4>,
    #[serde(skip)]
    pub residuals: Vec<Residual>,
    /// `φ_f(x) = f/|f|` where defined; on the link it never is, so these
    /// are `None` unless a point drifted off the zero set.
    #[serde(skip)]
    pub phases: Vec<Option<[f64; 2]>>,
    pub residual_max: f64,
    pub sphere_residual_max: f64,
    pub closure_gap: f64,
    pub min_singular_value: f64,
    pub orientation: Orientation,
}

impl TracedLoop {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Polygonal length of the closed loop.
    pub fn length(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| dist(&self.points[i], &self.points[(i + 1) % n]))
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracedLink {
    pub germ: Option<String>,
    pub eps: f64,
    pub loops: Vec<TracedLoop>,
    pub min_singular_value: f64,
}

fn dist(a: &Point4, b: &Point4) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm(a: &Point4) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `(f1, f2, |x|^2 - ε^2)` and its 3×4 Jacobian.
fn system(map: &PolyMap, x: &Point4, eps: f64) -> (Vector3<f64>, Matrix3x4<f64>) {
    let (f1, f2) = map.eval(x);
    let j = map.jac(x);
    let g = Vector3::new(f1, f2, norm(x).powi(2) - eps * eps);
    let mut m = Matrix3x4::zeros();
    for c in 0..4 {
        m[(0, c)] = j[0][c];
        m[(1, c)] = j[1][c];
        m[(2, c)] = 2.0 * x[c];
    }
    (g, m)
}

/// Smallest singular value of a 3×4 matrix.
fn sigma_min(m: &Matrix3x4<f64>) -> f64 {
    let gram: Matrix3<f64> = m * m.transpose();
    let e = SymmetricEigen::new(gram);
    e.eigenvalues.min().max(0.0).sqrt()
}

/// Minimum-norm solution of `m d = -g` via the Gram matrix, with a
/// pseudo-inverse cutoff for rank-deficient rows.
fn min_norm_step(m: &Matrix3x4<f64>, g: &Vector3<f64>) -> Vector4<f64> {
    let gram: Matrix3<f64> = m * m.transpose();
    let e = SymmetricEigen::new(gram);
    let lmax = e.eigenvalues.max();
    let cutoff = lmax * 1e-24;
    let mut y = Vector3::zeros();
    for k in 0..3 {
        let l = e.eigenvalues[k];
        if l > cutoff {
            let v = e.eigenvectors.column(k);
            y += v * (v.dot(g) / l);
        }
    }
    -(m.transpose() * y)
}

/// Oriented unit tangent: cofactor expansion of `det[m; t]` along `t`.
fn tangent(m: &Matrix3x4<f64>) -> Option<Vector4<f64>> {
    let mut t = Vector4::zeros();
    for i in 0..4 {
        let cols: Vec<usize> = (0..4).filter(|&c| c != i).collect();
        let minor = Matrix3::from_fn(|r, c| m[(r, cols[c])]);
        let sign = if (i + 3) % 2 == 0 { 1.0 } else { -1.0 };
        t[i] = sign * minor.determinant();
    }
    let n = t.norm();
    (n > 0.0 && n.is_finite()).then(|| t / n)
}

fn to_point(v: &Vector4<f64>) -> Point4 {
    [v[0], v[1], v[2], v[3]]
}

fn to_vec(p: &Point4) -> Vector4<f64> {
    Vector4::new(p[0], p[1], p[2], p[3])
}

fn residual(map: &PolyMap, x: &Point4, eps: f64) -> Residual {
    let (a, b) = map.eval(x);
    Residual {
        map: a.hypot(b),
        sphere: (norm(x) - eps).abs(),
    }
}

struct Correction {
    point: Point4,
    iterations: usize,
}

/// Gauss-Newton back onto the curve. Fails on divergence, slow contraction,
/// or when the first correction exceeds `max_first`.
fn correct(map: &PolyMap, start: Point4, eps: f64, max_first: f64) -> Option<Correction> {
    let mut x = to_vec(&start);
    let mut prev = f64::INFINITY;
    let tol = 1e-14 * eps;
    for it in 1..=12 {
        let (g, m) = system(map, &to_point(&x), eps);
        let d = min_norm_step(&m, &g);
        let dn = d.norm();
        if !dn.is_finite() {
            return None;
        }
        if it == 1 {
            if dn > max_first {
                return None;
            }
        } else if dn > 0.5 * prev && dn > 64.0 * tol {
            return None;
        }
        x += d;
        prev = dn;
        if dn <= tol {
            let mut p = to_point(&x);
            let r = norm(&p);
            for c in p.iter_mut() {
                *c *= eps / r;
            }
            return Some(Correction {
                point: p,
                iterations: it,
            });
        }
    }
    None
}

/// Residual thresholds a point must meet to be emitted.
const SEED_MAP_TOL: f64 = 1e-10;
const SEED_SPHERE_TOL: f64 = 1e-12;

fn random_sphere_point(rng: &mut ChaCha8Rng, eps: f64) -> Point4 {
    loop {
        let p: Point4 = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = norm(&p);
        if n > 1e-3 && n <= 1.0 {
            return p.map(|c| c * eps / n);
        }
    }
}

/// Polished points of the link found from random sphere samples, best first.
fn seed_points(map: &PolyMap, opts: &TraceOptions) -> Vec<Point4> {
    let eps = opts.eps;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let mut samples: Vec<(f64, Point4)> = (0..opts.seed_samples)
        .map(|_| {
            let p = random_sphere_point(&mut rng, eps);
            let (a, b) = map.eval(&p);
            (a.hypot(b), p)
        })
        .collect();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    samples
        .into_iter()
        .take(opts.seed_candidates)
        .filter_map(|(_, p)| {
            let c = correct(map, p, eps, f64::INFINITY)?;
            let r = residual(map, &c.point, eps);
            (r.map < SEED_MAP_TOL && r.sphere < SEED_SPHERE_TOL).then_some(c.point)
        })
        .collect()
}

/// A point of `f^{-1}(0) ∩ S^3_ε`, or `None` if sampling finds none.
pub fn find_seed(map: &PolyMap, eps: f64, rng_seed: u64) -> Option<Point4> {
    if map.nvars() != 4 || eps <= 0.0 {
        return None;
    }
    let opts = TraceOptions {
        eps,
        rng_seed,
        ..TraceOptions::default()
    };
    seed_points(map, &opts).into_iter().next()
}

/// Relative distance at which the hyperplane landing point is the seed.
const CLOSURE_TOL: f64 = 1e-8;

/// Solves `G(x) = 0` together with `(x - seed)·t_seed = 0` by Newton's method.
fn solve_on_hyperplane(
    map: &PolyMap,
    start: Point4,
    seed: &Vector4<f64>,
    normal: &Vector4<f64>,
    eps: f64,
) -> Option<Point4> {
    let mut x = to_vec(&start);
    for _ in 0..30 {
        let (g, m) = system(map, &to_point(&x), eps);
        let a = Matrix4::from_fn(|r, c| if r < 3 { m[(r, c)] } else { normal[c] });
        let rhs = Vector4::new(g[0], g[1], g[2], (x - seed).dot(normal));
        let d = a.lu().solve(&rhs)?;
        x -= d;
        if d.norm() <= 1e-15 * eps {
            return Some(to_point(&x));
        }
    }
    Some(to_point(&x))
}

fn finish_loop(map: &PolyMap, points: Vec<Point4>, closure_gap: f64, eps: f64) -> TracedLoop {
    let residuals: Vec<Residual> = points.iter().map(|p| residual(map, p, eps)).collect();
    let phases = points
        .iter()
        .map(|p| {
            let (a, b) = map.eval(p);
            let m = a.hypot(b);
            (m > 1e-8).then(|| [a / m, b / m])
        })
        .collect();
    let min_sv = points
        .iter()
        .map(|p| sigma_min(&system(map, p, eps).1))
        .fold(f64::INFINITY, f64::min);
    TracedLoop {
        residual_max: residuals.iter().map(|r| r.map).fold(0.0, f64::max),
        sphere_residual_max: residuals.iter().map(|r| r.sphere).fold(0.0, f64::max),
        points,
        residuals,
        phases,
        closure_gap,
        min_singular_value: min_sv,
        orientation: Orientation::CofactorPositive,
    }
}

/// Follows the component through `seed` until it closes up.
pub fn trace_loop(map: &PolyMap, seed: Point4, opts: &TraceOptions) -> Result<TracedLoop, TraceError> {
    let eps = opts.eps;
    let (h_min, h_max) = (opts.h_min(), opts.h_max());
    let cos_turn = opts.max_turn.cos();
    let seed_v = to_vec(&seed);
    let (_, m0) = system(map, &seed, eps);
    let s0 = sigma_min(&m0);
    let t_seed = match tangent(&m0) {
        Some(t) if s0 > 1e-14 => t,
        _ => {
            return Err(TraceError::Singular {
                point: seed,
                sigma_min: s0,
            })
        }
    };

    let mut points = vec![seed];
    let mut x = seed;
    let mut t = t_seed;
    let mut h = 0.2 * h_max;
    let mut easy = 0;
    let mut travelled = 0.0;

    for _ in 0..opts.max_steps {
        let pred = to_point(&(to_vec(&x) + t * h));
        let accepted = correct(map, pred, eps, 0.3 * h).and_then(|c| {
            let (_, m) = system(map, &c.point, eps);
            let tn = tangent(&m)?;
            (tn.dot(&t) >= cos_turn).then_some((c, tn))
        });
        let Some((c, tn)) = accepted else {
            h *= 0.5;
            easy = 0;
            if h < h_min {
                let (_, m) = system(map, &x, eps);
                return Err(TraceError::StepCollapse {
                    point: x,
                    h_min,
                    sigma_min: sigma_min(&m),
                });
            }
            continue;
        };

        let step = dist(&x, &c.point);
        let before = (to_vec(&x) - seed_v).dot(&t_seed);
        let after = (to_vec(&c.point) - seed_v).dot(&t_seed);
        travelled += step;
        if travelled > 4.0 * h_max
            && before < 0.0
            && after >= 0.0
            && dist(&c.point, &seed) < 2.0 * h_max
            && tn.dot(&t_seed) > opts.closure_alignment
        {
            // a neighbouring strand also crosses the hyperplane near the seed
            if let Some(landing) = solve_on_hyperplane(map, x, &seed_v, &t_seed, eps) {
                let gap = dist(&landing, &seed);
                if gap <= CLOSURE_TOL * eps {
                    return Ok(finish_loop(map, points, gap, eps));
                }
            }
        }

        points.push(c.point);
        x = c.point;
        t = tn;
        if c.iterations <= 3 {
            easy += 1;
            if easy >= 2 {
                h = (h * 1.5).min(h_max);
                easy = 0;
            }
        } else {
            easy = 0;
        }
    }
    Err(TraceError::MaxSteps(opts.max_steps))
}

/// Whether `s` lies on the traced loop: a nearby loop point must land on `s`
/// when pulled onto the normal hyperplane of `s`.
fn on_loop(map: &PolyMap, l: &TracedLoop, s: &Point4, radius: f64, eps: f64) -> bool {
    let (_, m) = system(map, s, eps);
    let t = match tangent(&m) {
        Some(t) if sigma_min(&m) > 1e-14 => t,
        // no tangent to anchor on: fall back to proximity
        _ => return l.points.iter().any(|p| dist(p, s) < radius),
    };
    let sv = to_vec(s);
    l.points.iter().filter(|p| dist(p, s) < radius).any(|p| {
        solve_on_hyperplane(map, *p, &sv, &t, eps)
            .is_some_and(|q| dist(&q, s) <= CLOSURE_TOL * eps)
    })
}

/// Traces every component found from the seed samples.
pub fn trace_link(map: &PolyMap, opts: &TraceOptions) -> Result<TracedLink, TraceError> {
    if map.nvars() != 4 {
        return Err(TraceError::NotFourVariables(map.nvars()));
    }
    if !(opts.eps > 0.0 && opts.eps.is_finite()) {
        return Err(TraceError::InvalidRadius(opts.eps));
    }
    let seeds = seed_points(map, opts);
    if seeds.is_empty() {
        return Err(TraceError::NoSeed { eps: opts.eps });
    }
    let dedup = 3.0 * opts.h_max();
    let mut loops: Vec<TracedLoop> = Vec::new();
    for s in seeds {
        let known = loops.iter().any(|l| on_loop(map, l, &s, dedup, opts.eps));
        if known {
            continue;
        }
        loops.push(trace_loop(map, s, opts)?);
    }
    let min_sv = loops
        .iter()
        .map(|l| l.min_singular_value)
        .fold(f64::INFINITY, f64::min);
    Ok(TracedLink {
        germ: map.name().map(str::to_string),
        eps: opts.eps,
        loops,
        min_singular_value: min_sv,
    })
}

/// Smallest singular value of the 3×4 Jacobian of `(f, |x|^2 - ε^2)` over
/// the loop's points.
pub fn check_transversality(map: &PolyMap, lp: &TracedLoop, eps: f64) -> f64 {
    lp.points
        .iter()
        .map(|p| sigma_min(&system(map, p, eps).1))
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymap::catalog::lookup;
    use crate::polymap::{parse_polymap, ParseMode};

    #[test]
    fn seed_on_trivial_plane() {
        let m = lookup("trivial_plane").unwrap();
        let s = find_seed(&m, 0.1, 1).unwrap();
        assert!(s[0].abs() < 1e-10 && s[1].abs() < 1e-10);
        assert!((s[2].hypot(s[3]) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn empty_link_has_no_seed() {
        let m = parse_polymap(
            "x1^2 + x2^2 + x3^2 + x4^2 ; 0",
            ParseMode::Real { nvars: Some(4) },
        )
        .unwrap();
        assert!(find_seed(&m, 0.1, 3).is_none());
        assert_eq!(
            trace_link(&m, &TraceOptions::with_eps(0.1)).unwrap_err(),
            TraceError::NoSeed { eps: 0.1 }
        );
    }

    #[test]
    fn trivial_plane_traces_great_circle() {
        let m = lookup("trivial_plane").unwrap();
        let link = trace_link(&m, &TraceOptions::with_eps(0.1)).unwrap();
        assert_eq!(link.loops.len(), 1);
        let lp = &link.loops[0];
        assert!(lp.closure_gap < 1e-9, "gap {}", lp.closure_gap);
        // circumference 2π·0.1
        assert!((lp.length() - 2.0 * std::f64::consts::PI * 0.1).abs() < 1e-3);
        let s = check_transversality(&m, lp, 0.1);
        assert!((s - 0.2).abs() < 1e-9, "sigma {s}");
    }

    #[test]
    fn tangent_is_orthogonal_to_rows() {
        let m = Matrix3x4::new(1.0, 2.0, 0.5, -1.0, 0.0, 1.0, 3.0, 2.0, -2.0, 0.3, 0.1, 1.0);
        let t = tangent(&m).unwrap();
        assert!((m * t).norm() < 1e-14);
        let full = Matrix4::from_fn(|r, c| if r < 3 { m[(r, c)] } else { t[c] });
        assert!(full.determinant() > 0.0);
    }

    #[test]
    fn wrong_dimension_rejected() {
        let m = lookup("trivial_plane").unwrap().suspend(2).unwrap();
        assert_eq!(
            trace_link(&m, &TraceOptions::default()).unwrap_err(),
            TraceError::NotFourVariables(6)
        );
    }
}
