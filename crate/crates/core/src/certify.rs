//! Interval certificates that a germ's Jacobian has rank two away from the
//! origin, and a sampling refuter for the opposite claim.
//!
//! A box is rank-2 certified when the enclosure of some 2×2 minor of the
//! Jacobian excludes zero. Minors are enclosed three ways, cheapest first:
//! products of interval partials, the natural form of the exact minor
//! polynomial, and its mean-value form about the box centre. Rank deficiency
//! is only ever claimed from exact rational arithmetic.

use std::time::Instant;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::CertifyError;
use crate::interval::Interval;
use crate::poly::{LoweredPoly, Poly};
use crate::polymap::PolyMap;

/// Axis-aligned box `lo <= x <= hi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Number of bisections that produced this box from the root cover.
    #[serde(default)]
    pub splits: u32,
}

impl IntervalBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Option<Self> {
        let ok = lo.len() == hi.len()
            && !lo.is_empty()
            && lo.iter().zip(&hi).all(|(a, b)| a <= b && (b - a).is_finite());
        ok.then_some(IntervalBox { lo, hi, splits: 0 })
    }

    pub fn cube(n: usize, half: f64) -> Self {
        IntervalBox {
            lo: vec![-half; n],
            hi: vec![half; n],
            splits: 0,
        }
    }

    pub fn point(x: &[f64]) -> Self {
        IntervalBox {
            lo: x.to_vec(),
            hi: x.to_vec(),
            splits: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn intervals(&self) -> Vec<Interval> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| Interval::new(a, b))
            .collect()
    }

    pub fn mid(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn max_width(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).fold(0.0, f64::max)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, v)| self.lo[i] <= *v && *v <= self.hi[i])
    }

    /// Smallest and largest Euclidean norm over the box.
    pub fn norm_range(&self) -> (f64, f64) {
        let mut lo2 = 0.0;
        let mut hi2 = 0.0;
        for (&a, &b) in self.lo.iter().zip(&self.hi) {
            let near = if a > 0.0 {
                a
            } else if b < 0.0 {
                -b
            } else {
                0.0
            };
            lo2 += near * near;
            hi2 += a.abs().max(b.abs()).powi(2);
        }
        (lo2.sqrt(), hi2.sqrt())
    }

    /// Halves the widest coordinate (lowest index on ties).
    pub fn bisect(&self) -> (IntervalBox, IntervalBox) {
        let mut k = 0;
        let mut w = f64::NEG_INFINITY;
        for i in 0..self.dim() {
            if self.hi[i] - self.lo[i] > w {
                w = self.hi[i] - self.lo[i];
                k = i;
            }
        }
        let m = 0.5 * (self.lo[k] + self.hi[k]);
        let mut a = self.clone();
        let mut b = self.clone();
        a.hi[k] = m;
        b.lo[k] = m;
        a.splits += 1;
        b.splits += 1;
        (a, b)
    }

    fn canonical_cmp(&self, o: &Self) -> std::cmp::Ordering {
        for (a, b) in self.lo.iter().zip(&o.lo) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Equal => {}
                ord => return ord,
            }
        }
        for (a, b) in self.hi.iter().zip(&o.hi) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Equal => {}
                ord => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Rank2Certified,
    DeficiencyCertified,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxCertificate {
    #[serde(rename = "box")]
    pub bx: IntervalBox,
    pub verdict: Verdict,
    /// Column pair of the minor that excluded zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minor: Option<(usize, usize)>,
    /// Interval Jacobian whose minors all contain zero, for deficiency.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<[Vec<Interval>; 2]>,
    /// Rational point (as exact doubles) where every minor vanishes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deficient_point: Option<Vec<f64>>,
}

struct Minor {
    cols: (usize, usize),
    exact: Poly,
    lowered: LoweredPoly,
    gradient: Vec<LoweredPoly>,
}

/// Precomputed minors and partials of one map; reusable across boxes.
pub struct Certifier<'a> {
    map: &'a PolyMap,
    minors: Vec<Minor>,
    rank_le_one: bool,
}

impl<'a> Certifier<'a> {
    pub fn new(map: &'a PolyMap) -> Self {
        let n = map.nvars();
        let mut minors = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let exact = map
                    .partial(0, i)
                    .mul(map.partial(1, j))
                    .sub(&map.partial(0, j).mul(map.partial(1, i)));
                if exact.is_zero() {
                    continue;
                }
                let gradient = (0..n).map(|k| exact.derivative(k).lower()).collect();
                minors.push(Minor {
                    cols: (i, j),
                    lowered: exact.lower(),
                    exact,
                    gradient,
                });
            }
        }
        let rank_le_one = minors.is_empty();
        Certifier {
            map,
            minors,
            rank_le_one,
        }
    }

    /// Whether every 2×2 minor is the zero polynomial.
    pub fn rank_at_most_one(&self) -> bool {
        self.rank_le_one
    }

    fn interval_jacobian(&self, x: &[Interval]) -> [Vec<Interval>; 2] {
        let n = self.map.nvars();
        [0, 1].map(|r| {
            (0..n)
                .map(|c| self.map.lowered_partial(r, c).eval_interval(x))
                .collect()
        })
    }

    fn minor_enclosure(&self, m: &Minor, x: &[Interval], centre: &[f64]) -> Interval {
        let natural = m.lowered.eval_interval(x);
        if !natural.contains_zero() {
            return natural;
        }
        let c: Vec<Interval> = centre.iter().map(|&v| Interval::point(v)).collect();
        let mut mv = m.lowered.eval_interval(&c);
        for (k, g) in m.gradient.iter().enumerate() {
            let dx = x[k].sub(c[k]);
            if dx.is_point() && dx.lo == 0.0 {
                continue;
            }
            mv = mv.add(g.eval_interval(x).mul(dx));
        }
        natural.intersect(mv).unwrap_or(natural)
    }

    /// Exact check that all minors vanish at a point given by doubles.
    pub fn deficient_at(&self, x: &[f64]) -> bool {
        if self.rank_le_one {
            return true;
        }
        let q: Vec<BigRational> = x
            .iter()
            .map(|&v| BigRational::from_float(v).expect("finite coordinate"))
            .collect();
        self.minors.iter().all(|m| m.exact.eval_rational(&q).is_zero())
    }

    /// Point of the box, off the origin, at which an exact deficiency test is
    /// worth trying: coordinates whose range contains 0 are set to 0.
    fn snap_candidate(&self, bx: &IntervalBox) -> Option<Vec<f64>> {
        let mid = bx.mid();
        let p: Vec<f64> = (0..bx.dim())
            .map(|i| if bx.lo[i] <= 0.0 && 0.0 <= bx.hi[i] { 0.0 } else { mid[i] })
            .collect();
        if p.iter().all(|&v| v == 0.0) {
            return None;
        }
        let pi: Vec<Interval> = p.iter().map(|&v| Interval::point(v)).collect();
        self.minors
            .iter()
            .all(|m| m.lowered.eval_interval(&pi).contains_zero())
            .then_some(p)
    }

    pub fn certify(&self, bx: &IntervalBox) -> BoxCertificate {
        let x = bx.intervals();
        let jac = self.interval_jacobian(&x);
        let mut cert = BoxCertificate {
            bx: bx.clone(),
            verdict: Verdict::Undecided,
            minor: None,
            witness: None,
            deficient_point: None,
        };
        if self.rank_le_one {
            cert.verdict = Verdict::DeficiencyCertified;
            cert.witness = Some(jac);
            return cert;
        }
        let n = self.map.nvars();
        for i in 0..n {
            for j in i + 1..n {
                let d = jac[0][i].mul(jac[1][j]).sub(jac[0][j].mul(jac[1][i]));
                if !d.contains_zero() {
                    cert.verdict = Verdict::Rank2Certified;
                    cert.minor = Some((i, j));
                    return cert;
                }
            }
        }
        // try the minor largest at the centre first
        let centre = bx.mid();
        let mut order: Vec<(f64, usize)> = self
            .minors
            .iter()
            .enumerate()
            .map(|(k, m)| (m.lowered.eval(&centre).abs(), k))
            .collect();
        order.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for (_, k) in order {
            let m = &self.minors[k];
            if !self.minor_enclosure(m, &x, &centre).contains_zero() {
                cert.verdict = Verdict::Rank2Certified;
                cert.minor = Some(m.cols);
                return cert;
            }
        }
        if let Some(p) = self.snap_candidate(bx) {
            if self.deficient_at(&p) {
                cert.verdict = Verdict::DeficiencyCertified;
                cert.witness = Some(jac);
                cert.deficient_point = Some(p);
            }
        }
        cert
    }
}

fn check_dim(map: &PolyMap, bx: &IntervalBox) -> Result<(), CertifyError> {
    if bx.dim() != map.nvars() {
        return Err(CertifyError::DimensionMismatch {
            expected: map.nvars(),
            got: bx.dim(),
        });
    }
    Ok(())
}

/// Enclosure of `f` over a box.
pub fn interval_evaluate(map: &PolyMap, bx: &IntervalBox) -> Result<(Interval, Interval), CertifyError> {
    check_dim(map, bx)?;
    let x = bx.intervals();
    let [a, b] = map.lowered();
    Ok((a.eval_interval(&x), b.eval_interval(&x)))
}

pub fn certify_rank2(map: &PolyMap, bx: &IntervalBox) -> Result<BoxCertificate, CertifyError> {
    check_dim(map, bx)?;
    Ok(Certifier::new(map).certify(bx))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsolationReport {
    pub germ: Option<String>,
    pub annulus: [f64; 2],
    pub nvars: usize,
    pub max_depth: u32,
    /// Deepest level reached; one level halves every coordinate.
    pub depth_reached: u32,
    pub fraction_certified: f64,
    pub fraction_undecided: f64,
    pub boxes_examined: usize,
    pub boxes_certified: usize,
    pub undecided: Vec<IntervalBox>,
    pub deficiency: Vec<BoxCertificate>,
    pub witnesses: Vec<Vec<f64>>,
    pub refuted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl IsolationReport {
    pub fn fully_certified(&self) -> bool {
        !self.refuted && self.undecided.is_empty()
    }
}

/// Covers `{ε_in <= |x| <= ε_out}` by bisecting `[-ε_out, ε_out]^n`, level by
/// level. A box at depth `d` has been bisected `n·d` times; undecided boxes
/// at depth `max_depth` are reported. Stops at the first certified
/// rank deficiency.
pub fn certify_isolated(
    map: &PolyMap,
    eps_in: f64,
    eps_out: f64,
    max_depth: u32,
) -> Result<IsolationReport, CertifyError> {
    certify_isolated_with(
        map,
        eps_in,
        eps_out,
        &CertifyOptions {
            max_depth,
            target_fraction: None,
        },
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub max_depth: u32,
    /// Stop refining once this certified fraction is guaranteed; the boxes
    /// still queued are reported as undecided.
    pub target_fraction: Option<f64>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            max_depth: 12,
            target_fraction: None,
        }
    }
}

/// [`certify_isolated`] with an optional early stop.
pub fn certify_isolated_with(
    map: &PolyMap,
    eps_in: f64,
    eps_out: f64,
    opts: &CertifyOptions,
) -> Result<IsolationReport, CertifyError> {
    let max_depth = opts.max_depth;
    if !(eps_in > 0.0 && eps_in < eps_out && eps_out.is_finite()) {
        return Err(CertifyError::InvalidAnnulus {
            inner: eps_in,
            outer: eps_out,
        });
    }
    let start = Instant::now();
    let n = map.nvars();
    let certifier = Certifier::new(map);
    let max_splits = max_depth * n as u32;
    let root = IntervalBox::cube(n, eps_out);
    let total = root.volume();
    let mut level = vec![root];
    let mut certified_volume = 0.0;
    let mut discarded_volume = 0.0;
    let mut examined = 0;
    let mut certified = 0;
    let mut undecided = Vec::new();
    let mut deficiency = Vec::new();
    let mut deepest = 0;

    while !level.is_empty() {
        examined += level.len();
        deepest = deepest.max(level[0].splits.div_ceil(n as u32));
        let certs: Vec<Option<BoxCertificate>> = level
            .par_iter()
            .map(|bx| {
                let (near, far) = bx.norm_range();
                if far < eps_in || near > eps_out {
                    None
                } else {
                    Some(certifier.certify(bx))
                }
            })
            .collect();
        let mut next = Vec::new();
        for (bx, cert) in level.into_iter().zip(certs) {
            let Some(cert) = cert else {
                discarded_volume += bx.volume();
                continue;
            };
            match cert.verdict {
                Verdict::Rank2Certified => {
                    certified += 1;
                    certified_volume += bx.volume();
                }
                Verdict::DeficiencyCertified => deficiency.push(cert),
                Verdict::Undecided if bx.splits >= max_splits => undecided.push(bx),
                Verdict::Undecided => {
                    let (a, b) = bx.bisect();
                    next.push(a);
                    next.push(b);
                }
            }
        }
        if !deficiency.is_empty() {
            undecided.extend(next);
            break;
        }
        if let Some(target) = opts.target_fraction {
            // later discards only shrink the denominator
            if certified_volume / (total - discarded_volume) >= target {
                undecided.extend(next);
                break;
            }
        }
        level = next;
    }

    undecided.sort_by(|a, b| a.canonical_cmp(b));
    deficiency.sort_by(|a, b| a.bx.canonical_cmp(&b.bx));
    let kept = total - discarded_volume;
    let fraction_certified = if kept > 0.0 { certified_volume / kept } else { 1.0 };
    let witnesses = deficiency
        .iter()
        .filter_map(|c| c.deficient_point.clone().or_else(|| Some(off_origin_point(&c.bx))))
        .collect();
    Ok(IsolationReport {
        germ: map.name().map(str::to_string),
        annulus: [eps_in, eps_out],
        nvars: n,
        max_depth,
        depth_reached: deepest,
        fraction_certified,
        fraction_undecided: 1.0 - fraction_certified,
        boxes_examined: examined,
        boxes_certified: certified,
        refuted: !deficiency.is_empty(),
        undecided,
        deficiency,
        witnesses,
        wall_ms: Some(start.elapsed().as_millis() as u64),
    })
}

/// Corner of the box farthest from the origin.
fn off_origin_point(bx: &IntervalBox) -> Vec<f64> {
    (0..bx.dim())
        .map(|i| if bx.hi[i].abs() >= bx.lo[i].abs() { bx.hi[i] } else { bx.lo[i] })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefuteOptions {
    pub samples: usize,
    pub seed: u64,
    /// Restrict samples to `ε_in <= |x| <= ε_out`.
    pub annulus: Option<[f64; 2]>,
    /// Relative smallest singular value below which a point is a witness.
    pub threshold: f64,
    /// Number of best samples refined by local search.
    pub candidates: usize,
}

impl Default for RefuteOptions {
    fn default() -> Self {
        RefuteOptions {
            samples: 100_000,
            seed: 7,
            annulus: None,
            threshold: 1e-12,
            candidates: 32,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<f64>,
    /// `σ_min / σ_max` of the Jacobian at `point`.
    pub sigma_ratio: f64,
    /// Every minor vanishes exactly at `point`.
    pub certified: bool,
}

/// `σ_min / σ_max` of the 2×n Jacobian, via `σ_min σ_max = sqrt(Σ minors²)`.
pub fn sigma_ratio(map: &PolyMap, x: &[f64]) -> f64 {
    let [r1, r2] = map.jac(x);
    let a: f64 = r1.iter().map(|v| v * v).sum();
    let b: f64 = r2.iter().map(|v| v * v).sum();
    let mut det = 0.0;
    for i in 0..r1.len() {
        for j in i + 1..r1.len() {
            let m = r1[i] * r2[j] - r1[j] * r2[i];
            det += m * m;
        }
    }
    let tr = a + b;
    if tr == 0.0 {
        return 0.0;
    }
    let disc = ((a - b).powi(2) + 4.0 * (tr * tr / 4.0 - (a - b).powi(2) / 4.0 - det)).max(0.0);
    let lmax = 0.5 * (tr + disc.sqrt());
    let lmin = det / lmax;
    (lmin / lmax).max(0.0).sqrt()
}

fn admissible(x: &[f64], region: &IntervalBox, annulus: Option<[f64; 2]>) -> bool {
    if !region.contains(x) {
        return false;
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    match annulus {
        Some([a, b]) => a <= r && r <= b,
        None => r > 0.0,
    }
}

/// Ratio evaluations allowed per local search.
const DESCENT_BUDGET: usize = 20_000;

/// Shrinking random search for a local minimum of the singular value ratio.
fn descend(map: &PolyMap, x0: Vec<f64>, region: &IntervalBox, annulus: Option<[f64; 2]>, rng: &mut ChaCha8Rng, floor: f64) -> (Vec<f64>, f64) {
    let mut x = x0;
    let mut best = sigma_ratio(map, &x);
    let mut step = 0.05 * region.max_width();
    let n = x.len();
    let mut fails = 0;
    let mut budget = DESCENT_BUDGET;
    while step > 1e-15 * region.max_width() && best > floor && budget > 0 {
        let mut improved = false;
        for _ in 0..4 * n {
            budget = budget.saturating_sub(1);
            let y: Vec<f64> = x.iter().map(|v| v + step * rng.random_range(-1.0..1.0)).collect();
            if !admissible(&y, region, annulus) {
                continue;
            }
            let s = sigma_ratio(map, &y);
            if s < best {
                best = s;
                x = y;
                improved = true;
                break;
            }
        }
        if improved {
            fails = 0;
            step *= 1.5;
        } else {
            fails += 1;
            step *= 0.5;
            if fails > 60 {
                break;
            }
        }
    }
    (x, best)
}

/// Tries to certify deficiency near `x` by zeroing its smallest coordinates.
fn snap_exact(certifier: &Certifier, x: &[f64], region: &IntervalBox, annulus: Option<[f64; 2]>) -> Option<Vec<f64>> {
    if certifier.deficient_at(x) {
        return Some(x.to_vec());
    }
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()));
    let mut y = x.to_vec();
    for &i in idx.iter().take(x.len() - 1) {
        y[i] = 0.0;
        if admissible(&y, region, annulus) && certifier.deficient_at(&y) {
            return Some(y);
        }
    }
    None
}

/// Searches `region` for a point away from the origin where the Jacobian is
/// numerically rank-deficient, then tries to certify it exactly.
pub fn refute_isolated(map: &PolyMap, region: &IntervalBox, opts: &RefuteOptions) -> Result<Option<Witness>, CertifyError> {
    check_dim(map, region)?;
    let certifier = Certifier::new(map);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = region.dim();
    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    for _ in 0..opts.samples {
        let x: Vec<f64> = (0..n)
            .map(|i| {
                if region.lo[i] == region.hi[i] {
                    region.lo[i]
                } else {
                    rng.random_range(region.lo[i]..=region.hi[i])
                }
            })
            .collect();
        if !admissible(&x, region, opts.annulus) {
            continue;
        }
        let s = sigma_ratio(map, &x);
        if s <= opts.threshold {
            let exact = snap_exact(&certifier, &x, region, opts.annulus);
            return Ok(Some(Witness {
                certified: exact.is_some(),
                point: exact.unwrap_or(x),
                sigma_ratio: s,
            }));
        }
        if best.len() < opts.candidates || s < best.last().map_or(f64::INFINITY, |b| b.0) {
            let at = best.partition_point(|b| b.0 <= s);
            best.insert(at, (s, x));
            best.truncate(opts.candidates);
        }
    }
    for (_, x) in best {
        let (y, s) = descend(map, x, region, opts.annulus, &mut rng, opts.threshold);
        let exact = snap_exact(&certifier, &y, region, opts.annulus);
        if s <= opts.threshold || exact.is_some() {
            return Ok(Some(Witness {
                certified: exact.is_some(),
                sigma_ratio: exact.as_ref().map_or(s, |p| sigma_ratio(map, p)),
                point: exact.unwrap_or(y),
            }));
        }
    }
    Ok(None)
}

/// Smallest singular value ratio found by the refuter's search, whether or
/// not it falls below the witness threshold.
pub fn min_sigma_ratio(map: &PolyMap, region: &IntervalBox, opts: &RefuteOptions) -> f64 {
    let probe = RefuteOptions {
        threshold: 0.0,
        ..opts.clone()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(probe.seed);
    let n = region.dim();
    let mut best: Vec<(f64, Vec<f64>)> = Vec::new();
    for _ in 0..probe.samples {
        let x: Vec<f64> = (0..n).map(|i| rng.random_range(region.lo[i]..=region.hi[i])).collect();
        if !admissible(&x, region, probe.annulus) {
            continue;
        }
        let s = sigma_ratio(map, &x);
        let at = best.partition_point(|b| b.0 <= s);
        if at < probe.candidates {
            best.insert(at, (s, x));
            best.truncate(probe.candidates);
        }
    }
    best.into_iter()
        .map(|(_, x)| descend(map, x, region, probe.annulus, &mut rng, 0.0).1)
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;
    use crate::parse_polymap;
    use crate::ParseMode;

    fn real(src: &str) -> PolyMap {
        parse_polymap(src, ParseMode::Real { nvars: Some(4) }).unwrap()
    }

    #[test]
    fn even_power_and_monotone_enclosures() {
        let m = real("x1^2 ; x1*x2 + x3");
        let bx = IntervalBox::new(vec![-1.0, 0.0, 0.0, 0.0], vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let (a, _) = interval_evaluate(&m, &bx).unwrap();
        assert_eq!((a.lo, a.hi), (0.0, 1.0));
        let m = real("x1 + x2 ; x1*x2");
        let bx = IntervalBox::new(vec![0.0; 4], vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let (a, b) = interval_evaluate(&m, &bx).unwrap();
        assert_eq!((a.lo, a.hi, b.lo, b.hi), (0.0, 2.0, 0.0, 1.0));
    }

    #[test]
    fn point_box_encloses_value() {
        let m = lookup("rudolph_g").unwrap();
        let x = [0.03, -0.07, 0.011, 0.05];
        let (a, b) = interval_evaluate(&m, &IntervalBox::point(&x)).unwrap();
        let (fa, fb) = m.eval(&x);
        assert!(a.contains(fa) && b.contains(fb));
        assert!(a.width() <= 1e-15 * (1.0 + fa.abs()));
    }

    #[test]
    fn dimension_is_checked() {
        let m = lookup("trivial_plane").unwrap();
        assert!(matches!(
            certify_rank2(&m, &IntervalBox::cube(3, 1.0)),
            Err(CertifyError::DimensionMismatch { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn near_identity_jacobian_is_rank_two() {
        let m = real("x1 ; x2");
        let c = certify_rank2(&m, &IntervalBox::cube(4, 0.1)).unwrap();
        assert_eq!(c.verdict, Verdict::Rank2Certified);
        let m = real("x1 + 1/20*x1^2 ; x2 + 1/20*x2^2");
        let c = certify_rank2(&m, &IntervalBox::cube(4, 1.0)).unwrap();
        assert_eq!(c.verdict, Verdict::Rank2Certified);
    }

    #[test]
    fn identical_components_are_deficient() {
        let m = real("x1 ; x1");
        let c = certify_rank2(&m, &IntervalBox::cube(4, 0.3)).unwrap();
        assert_eq!(c.verdict, Verdict::DeficiencyCertified);
        let w = c.witness.unwrap();
        for i in 0..4 {
            for j in i + 1..4 {
                assert!(w[0][i].mul(w[1][j]).sub(w[0][j].mul(w[1][i])).contains_zero());
            }
        }
    }

    #[test]
    fn suspension_z_block_is_rank_two_off_the_axis() {
        for r in 2..=4 {
            let m = lookup("trivial_plane").unwrap().suspend(r).unwrap();
            let mut lo = vec![-0.1; 6];
            let mut hi = vec![0.1; 6];
            lo[4] = 0.2;
            hi[4] = 0.3;
            let c = certify_rank2(&m, &IntervalBox::new(lo, hi).unwrap()).unwrap();
            assert_eq!(c.verdict, Verdict::Rank2Certified);
        }
    }

    #[test]
    fn trivial_plane_certifies_at_depth_zero() {
        let m = lookup("trivial_plane").unwrap();
        let rep = certify_isolated(&m, 0.05, 0.2, 0).unwrap();
        assert_eq!(rep.fraction_certified, 1.0);
        assert_eq!(rep.depth_reached, 0);
        assert!(rep.fully_certified());
    }

    #[test]
    fn non_isolated_map_is_refuted() {
        let m = real("x1 ; x1");
        let rep = certify_isolated(&m, 0.05, 0.2, 4).unwrap();
        assert!(rep.refuted);
        assert!(!rep.witnesses.is_empty());
        let w = refute_isolated(&m, &IntervalBox::cube(4, 0.2), &RefuteOptions::default())
            .unwrap()
            .unwrap();
        assert!(w.certified);
        assert!(w.point.iter().any(|v| *v != 0.0));
    }

    #[test]
    fn zero_row_is_refuted() {
        let m = real("x1^2 + x2^2 + x3^2 + x4^2 ; 0*x1");
        let w = refute_isolated(&m, &IntervalBox::cube(4, 0.2), &RefuteOptions::default()).unwrap();
        assert!(w.unwrap().certified);
    }

    #[test]
    fn bad_annulus() {
        let m = lookup("trivial_plane").unwrap();
        assert!(certify_isolated(&m, 0.2, 0.1, 3).is_err());
        assert!(certify_isolated(&m, 0.0, 0.1, 3).is_err());
    }

    #[test]
    fn invalid_boxes_are_rejected() {
        assert!(IntervalBox::new(vec![1.0], vec![0.0]).is_none());
        assert!(IntervalBox::new(vec![0.0], vec![f64::INFINITY]).is_none());
        assert!(IntervalBox::new(vec![], vec![]).is_none());
    }
}
