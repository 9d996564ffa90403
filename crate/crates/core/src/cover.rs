//! Pointwise verification that the link of `F = f + z^r` is the `r`-fold
//! cyclic cover of `S^3_ε` branched along the link of `f`.
//!
//! Over a base point `x` with `f(x) ≠ 0` the fiber of `L_F → S^3` is the set
//! of `z` with `z^r = -f(x)`:
//!
//! ```text
//! z_k = |f(x)|^{1/r} · e^{i(θ + 2πk)/r},   θ = arg(-f(x)) ∈ [0, 2π)
//! ```
//!
//! and over the link of `f` it is the single point `z = 0`. The phase map is
//! `φ_f = f/|f|`, `σ = arg(-φ_f(x))`, and `φ'(x, z_k) = e^{i(σ + 2πk)/r}`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CoverError;
use crate::polymap::PolyMap;
use crate::trace::TracedLink;

pub type Point4 = [f64; 4];

/// `|f|` at or below this is treated as on the link.
pub const DELTA_PHASE: f64 = 1e-8;
/// Bound on `|φ_f(P(w)) + φ'(w)^r|`.
pub const DIAGRAM_TOL: f64 = 1e-10;
/// Bound on `|F(x, z)|` over the fiber.
pub const EQUATION_TOL: f64 = 1e-10;
/// Bound on the `p ∘ q` and `q ∘ p` roundtrips.
pub const ROUNDTRIP_TOL: f64 = 1e-12;

fn f_complex(map: &PolyMap, x: &Point4) -> Complex64 {
    let (a, b) = map.eval(x);
    Complex64::new(a, b)
}

/// Argument in `[0, 2π)`.
pub fn arg0(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    let a = if a < 0.0 { a + TAU } else { a };
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// `φ_f(x) = f(x)/|f(x)|`.
pub fn phase(map: &PolyMap, x: &Point4) -> Result<Complex64, CoverError> {
    let f = f_complex(map, x);
    let m = f.norm();
    if m <= DELTA_PHASE {
        return Err(CoverError::OnLink { modulus: m });
    }
    Ok(f / m)
}

/// One point `(x, z)` of the suspension link over `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuspensionSample {
    pub base: Point4,
    #[serde(with = "complex_pair")]
    pub z: Complex64,
    pub k: u32,
    /// `arg(-f(x))`; absent on the link.
    pub theta: Option<f64>,
    /// `arg(-φ_f(x))`; absent on the link.
    pub sigma: Option<f64>,
    pub r: u32,
}

impl SuspensionSample {
    pub fn point6(&self) -> [f64; 6] {
        let [a, b, c, d] = self.base;
        [a, b, c, d, self.z.re, self.z.im]
    }
}

mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

fn check_order(r: u32) -> Result<(), CoverError> {
    if r < 2 {
        return Err(CoverError::Order(r));
    }
    Ok(())
}

/// The fiber over `x`: `r` samples off the link, one with `z = 0` on it.
pub fn suspension_fiber(map: &PolyMap, r: u32, x: &Point4) -> Result<Vec<SuspensionSample>, CoverError> {
    check_order(r)?;
    let f = f_complex(map, x);
    let m = f.norm();
    if m <= DELTA_PHASE {
        return Ok(vec![SuspensionSample {
            base: *x,
            z: Complex64::new(0.0, 0.0),
            k: 0,
            theta: None,
            sigma: None,
            r,
        }]);
    }
    let theta = arg0(-f);
    let sigma = arg0(-(f / m));
    let rho = m.powf(1.0 / r as f64);
    Ok((0..r)
        .map(|k| SuspensionSample {
            base: *x,
            z: Complex64::from_polar(rho, (theta + TAU * k as f64) / r as f64),
            k,
            theta: Some(theta),
            sigma: Some(sigma),
            r,
        })
        .collect())
}

/// `φ'(x, z_k) = e^{i(σ + 2πk)/r}`.
pub fn phi_prime(map: &PolyMap, r: u32, s: &SuspensionSample) -> Result<Complex64, CoverError> {
    check_order(r)?;
    let ph = phase(map, &s.base).map_err(|_| CoverError::OnBranchLocus {
        modulus: f_complex(map, &s.base).norm(),
    })?;
    let sigma = arg0(-ph);
    Ok(Complex64::from_polar(1.0, (sigma + TAU * s.k as f64) / r as f64))
}

/// Sheet index of `z` over a base point with `θ = arg(-f)`.
pub fn recover_k(z: Complex64, theta: f64, r: u32) -> u32 {
    let k = ((r as f64 * arg0(z) - theta) / TAU).round() as i64;
    k.rem_euclid(r as i64) as u32
}

/// `p(w) = (base(w), φ'(w))`.
pub fn p_map(map: &PolyMap, r: u32, s: &SuspensionSample) -> Result<(Point4, Complex64), CoverError> {
    Ok((s.base, phi_prime(map, r, s)?))
}

/// Reconstructs the fiber point from `(x, u)` with `u = e^{i(σ + 2πk)/r}`.
pub fn q_map(map: &PolyMap, r: u32, x: &Point4, u: Complex64) -> Result<SuspensionSample, CoverError> {
    check_order(r)?;
    let f = f_complex(map, x);
    let m = f.norm();
    if m <= DELTA_PHASE {
        return Err(CoverError::OnBranchLocus { modulus: m });
    }
    let theta = arg0(-f);
    let z = u * m.powf(1.0 / r as f64);
    Ok(SuspensionSample {
        base: *x,
        z,
        k: recover_k(z, theta, r),
        theta: Some(theta),
        sigma: Some(arg0(-(f / m))),
        r,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverReport {
    pub germ: Option<String>,
    pub r: u32,
    pub eps: f64,
    pub samples: usize,
    pub on_link_points: usize,
    pub max_diagram_residual: f64,
    pub max_equation_residual: f64,
    /// Largest `|z_k - |f|^{1/r} e^{i(θ+2πk)/r}|` after recomputing `z_k`
    /// from `F` directly.
    pub max_root_residual: f64,
    /// Fiber size over off-link samples.
    pub fiber_histogram: BTreeMap<usize, usize>,
    /// Fiber size over traced on-link points.
    pub on_link_histogram: BTreeMap<usize, usize>,
    pub max_roundtrip_error: f64,
    pub deck_failures: usize,
    /// Largest `|f(x)|^{1/r}` over the sampled points of `L_F`.
    pub polydisc_max: f64,
    pub eps_polydisc: f64,
    pub polydisc_ok: bool,
    /// Whether `polydisc_max` is also below the base radius `ε`.
    pub polydisc_within_base_radius: bool,
    pub passed: bool,
}

struct FiberCheck {
    size: usize,
    diagram: f64,
    equation: f64,
    root: f64,
    roundtrip: f64,
    deck_ok: bool,
    max_abs_z: f64,
}

fn check_fiber(map: &PolyMap, suspended: &PolyMap, r: u32, x: &Point4) -> Result<FiberCheck, CoverError> {
    let fiber = suspension_fiber(map, r, x)?;
    let mut out = FiberCheck {
        size: fiber.len(),
        diagram: 0.0,
        equation: 0.0,
        root: 0.0,
        roundtrip: 0.0,
        deck_ok: true,
        max_abs_z: 0.0,
    };
    for s in &fiber {
        let (a, b) = suspended.eval(&s.point6());
        out.equation = out.equation.max(a.hypot(b));
        out.max_abs_z = out.max_abs_z.max(s.z.norm());
    }
    if fiber.len() == 1 {
        return Ok(out);
    }
    let ph = phase(map, x)?;
    let theta = fiber[0].theta.expect("off-link sample has θ");
    let rho = f_complex(map, x).norm().powf(1.0 / r as f64);
    let rot = Complex64::from_polar(1.0, TAU / r as f64);
    let mut hit = vec![false; r as usize];
    for s in &fiber {
        let u = phi_prime(map, r, s)?;
        out.diagram = out.diagram.max((ph + u.powu(r)).norm());
        // z from the defining equation -z^r = f, independently of θ
        let zr = -f_complex(map, x);
        let zk = zr.powf(1.0 / r as f64) * Complex64::from_polar(1.0, TAU * recover_k(s.z, theta, r) as f64 / r as f64);
        let nearest = (0..r)
            .map(|j| (zk * rot.powu(j) - s.z).norm())
            .fold(f64::INFINITY, f64::min);
        out.root = out.root.max(nearest / rho.max(f64::MIN_POSITIVE));
        // p then q returns the sample
        let (base, u) = p_map(map, r, s)?;
        let back = q_map(map, r, &base, u)?;
        let mut err = (back.z - s.z).norm();
        if back.k != s.k {
            err = f64::INFINITY;
        }
        // q then p returns the pair
        let (_, u2) = p_map(map, r, &back)?;
        err = err.max((u2 - u).norm());
        out.roundtrip = out.roundtrip.max(err);
        // deck transformation shifts the sheet index by one
        let moved = s.z * rot;
        let k2 = recover_k(moved, theta, r);
        if k2 != (s.k + 1) % r {
            out.deck_ok = false;
        }
        hit[k2 as usize] = true;
    }
    if !hit.iter().all(|&h| h) {
        out.deck_ok = false;
    }
    Ok(out)
}

fn random_sphere_point(rng: &mut ChaCha8Rng, eps: f64) -> Point4 {
    loop {
        let p: Point4 = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return p.map(|c| c * eps / n);
        }
    }
}

/// Checks the covering off and on the traced link.
pub fn verify_cover(
    map: &PolyMap,
    r: u32,
    link: &TracedLink,
    n_samples: usize,
    seed: u64,
) -> Result<CoverReport, CoverError> {
    check_order(r)?;
    if let (Some(a), Some(b)) = (&link.germ, map.name()) {
        if a != b {
            return Err(CoverError::Mismatch(format!("link traced for {a}, map is {b}")));
        }
    }
    let on_link: Vec<Point4> = link.loops.iter().flat_map(|l| l.points.iter().copied()).collect();
    for p in &on_link {
        let radius = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        let m = f_complex(map, p).norm();
        if (radius - link.eps).abs() > 1e-9 * link.eps || m > DELTA_PHASE {
            return Err(CoverError::Mismatch(format!(
                "traced point off the link of this map at radius {}: |f| = {m:e}, |x| = {radius}",
                link.eps
            )));
        }
    }
    let suspended = map.suspend(r).map_err(|e| CoverError::Mismatch(e.to_string()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut base = Vec::with_capacity(n_samples);
    while base.len() < n_samples {
        let x = random_sphere_point(&mut rng, link.eps);
        if f_complex(map, &x).norm() > DELTA_PHASE {
            base.push(x);
        }
    }
    let off: Vec<FiberCheck> = base
        .par_iter()
        .map(|x| check_fiber(map, &suspended, r, x))
        .collect::<Result<_, _>>()?;
    let on: Vec<FiberCheck> = on_link
        .par_iter()
        .map(|x| check_fiber(map, &suspended, r, x))
        .collect::<Result<_, _>>()?;

    let mut fiber_histogram = BTreeMap::new();
    let mut on_link_histogram = BTreeMap::new();
    for c in &off {
        *fiber_histogram.entry(c.size).or_insert(0) += 1;
    }
    for c in &on {
        *on_link_histogram.entry(c.size).or_insert(0) += 1;
    }
    let all = off.iter().chain(&on);
    let fold = |g: fn(&FiberCheck) -> f64| all.clone().map(g).fold(0.0, f64::max);
    let max_diagram_residual = fold(|c| c.diagram);
    let max_equation_residual = fold(|c| c.equation);
    let max_root_residual = fold(|c| c.root);
    let max_roundtrip_error = fold(|c| c.roundtrip);
    let polydisc_max = fold(|c| c.max_abs_z);
    let deck_failures = off.iter().filter(|c| !c.deck_ok).count();
    let eps_polydisc = 2.0 * polydisc_max;
    let polydisc_ok = polydisc_max < eps_polydisc || polydisc_max == 0.0;
    let sizes_ok = fiber_histogram.keys().all(|&k| k == r as usize)
        && on_link_histogram.keys().all(|&k| k == 1);
    let passed = sizes_ok
        && max_diagram_residual < DIAGRAM_TOL
        && max_equation_residual < EQUATION_TOL
        && max_roundtrip_error < ROUNDTRIP_TOL
        && deck_failures == 0
        && polydisc_ok;
    Ok(CoverReport {
        germ: map.name().map(str::to_string),
        r,
        eps: link.eps,
        samples: off.len(),
        on_link_points: on.len(),
        max_diagram_residual,
        max_equation_residual,
        max_root_residual,
        fiber_histogram,
        on_link_histogram,
        max_roundtrip_error,
        deck_failures,
        polydisc_max,
        eps_polydisc,
        polydisc_ok,
        polydisc_within_base_radius: polydisc_max < link.eps,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;
    use crate::trace::{trace_link, TraceOptions};
    use crate::{parse_polymap, ParseMode};

    /// Constant-valued stand-in: `f = (x1, x2)` evaluated where we choose.
    fn plane() -> PolyMap {
        lookup("trivial_plane").unwrap()
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn phase_values() {
        let m = plane();
        assert!(close(phase(&m, &[0.6, 0.0, 0.0, 0.0]).unwrap(), Complex64::new(1.0, 0.0)));
        assert!(close(phase(&m, &[0.0, 0.5, 0.0, 0.0]).unwrap(), Complex64::new(0.0, 1.0)));
        assert!(matches!(phase(&m, &[0.0, 0.0, 0.1, 0.0]), Err(CoverError::OnLink { .. })));
    }

    #[test]
    fn cube_roots_of_unity() {
        let f = suspension_fiber(&plane(), 3, &[-1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.len(), 3);
        for (k, s) in f.iter().enumerate() {
            assert!(close(s.z, Complex64::from_polar(1.0, TAU * k as f64 / 3.0)));
            assert_eq!(s.k, k as u32);
        }
    }

    #[test]
    fn cube_roots_of_8i() {
        let f = suspension_fiber(&plane(), 3, &[0.0, -8.0, 0.0, 0.0]).unwrap();
        for (k, s) in f.iter().enumerate() {
            let want = Complex64::from_polar(2.0, std::f64::consts::PI / 6.0 + TAU * k as f64 / 3.0);
            assert!(close(s.z, want), "{k}: {} vs {want}", s.z);
        }
    }

    #[test]
    fn on_link_fiber_is_a_point() {
        let f = suspension_fiber(&plane(), 4, &[0.0, 0.0, 0.3, 0.1]).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].z, Complex64::new(0.0, 0.0));
        assert!(matches!(phi_prime(&plane(), 4, &f[0]), Err(CoverError::OnBranchLocus { .. })));
    }

    #[test]
    fn phi_prime_values() {
        let m = plane();
        let x = [-0.3, 0.0, 0.0, 0.0];
        for r in 2..6 {
            let f = suspension_fiber(&m, r, &x).unwrap();
            assert!(close(phi_prime(&m, r, &f[0]).unwrap(), Complex64::new(1.0, 0.0)));
        }
        let f = suspension_fiber(&m, 4, &x).unwrap();
        assert!(close(phi_prime(&m, 4, &f[1]).unwrap(), Complex64::new(0.0, 1.0)));
    }

    #[test]
    fn diagram_commutes_pointwise() {
        let m = lookup("rudolph_g").unwrap();
        let x = [0.03, -0.05, 0.07, 0.02];
        for r in 2..=5 {
            for s in suspension_fiber(&m, r, &x).unwrap() {
                let u = phi_prime(&m, r, &s).unwrap();
                assert!((phase(&m, &x).unwrap() + u.powu(r)).norm() < 1e-12);
                let z_unit = s.z / s.z.norm();
                assert!((z_unit - u).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sheet_index_survives_the_branch_cut() {
        // θ just below 2π: z_0 sits just below the positive real axis
        let m = parse_polymap("x1 ; x2", ParseMode::Real { nvars: Some(4) }).unwrap();
        let x = [-1.0, 1e-13, 0.0, 0.0];
        for r in 2..=5 {
            for s in suspension_fiber(&m, r, &x).unwrap() {
                assert_eq!(recover_k(s.z, s.theta.unwrap(), r), s.k);
            }
        }
    }

    #[test]
    fn trivial_plane_cover() {
        let m = plane();
        let link = trace_link(&m, &TraceOptions::with_eps(0.1)).unwrap();
        for r in [2, 3] {
            let rep = verify_cover(&m, r, &link, 1000, 3).unwrap();
            assert!(rep.passed, "{rep:?}");
            assert_eq!(rep.fiber_histogram, BTreeMap::from([(r as usize, 1000)]));
            assert_eq!(rep.on_link_histogram.keys().copied().collect::<Vec<_>>(), vec![1]);
        }
    }

    #[test]
    fn mismatched_link_is_rejected() {
        let link = trace_link(&plane(), &TraceOptions::with_eps(0.1)).unwrap();
        let g = lookup("rudolph_g").unwrap();
        assert!(matches!(verify_cover(&g, 2, &link, 10, 1), Err(CoverError::Mismatch(_))));
        let mut anon = link.clone();
        anon.germ = None;
        assert!(matches!(verify_cover(&g, 2, &anon, 10, 1), Err(CoverError::Mismatch(_))));
        assert!(matches!(verify_cover(&plane(), 1, &link, 10, 1), Err(CoverError::Order(1))));
    }
}
