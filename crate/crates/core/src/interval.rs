//! Closed real intervals with outward rounding.
//!
//! Every arithmetic result is computed in round-to-nearest and then widened by
//! one ulp on each side, so the returned interval always contains the exact
//! real result.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Lower bound for the exact sum `a + b`.
fn sum_down(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if e < 0.0 || !s.is_finite() { s.next_down() } else { s }
}

/// Upper bound for the exact sum `a + b`.
fn sum_up(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if e > 0.0 || !s.is_finite() { s.next_up() } else { s }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Rounded product `a * b` and the sign of its rounding error.
fn product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    // subnormal products lose the fma error term; treat them as inexact
    if p != 0.0 && p.abs() < f64::MIN_POSITIVE * 4.0 {
        return (p, f64::NAN);
    }
    if p == 0.0 && a != 0.0 && b != 0.0 {
        return (p, f64::NAN);
    }
    (p, a.mul_add(b, -p))
}

fn product_down(a: f64, b: f64) -> f64 {
    let (p, e) = product(a, b);
    if e < 0.0 || e.is_nan() || !p.is_finite() { p.next_down() } else { p }
}

fn product_up(a: f64, b: f64) -> f64 {
    let (p, e) = product(a, b);
    if e > 0.0 || e.is_nan() || !p.is_finite() { p.next_up() } else { p }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "invalid interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// `[c - r, c + r]`, rounded outward.
    pub fn centered(c: f64, r: f64) -> Self {
        Interval::new(sum_down(c, -r), sum_up(c, r))
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn intersect(&self, other: Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn add(self, o: Interval) -> Interval {
        if self.is_point() && o.is_point() && self.lo == 0.0 {
            return o;
        }
        if o.is_point() && o.lo == 0.0 {
            return self;
        }
        Interval::new(sum_down(self.lo, o.lo), sum_up(self.hi, o.hi))
    }

    pub fn neg(self) -> Interval {
        Interval::new(-self.hi, -self.lo)
    }

    pub fn sub(self, o: Interval) -> Interval {
        self.add(o.neg())
    }

    pub fn mul(self, o: Interval) -> Interval {
        if (self.is_point() && self.lo == 0.0) || (o.is_point() && o.lo == 0.0) {
            return Interval::point(0.0);
        }
        if self.is_point() && self.lo == 1.0 {
            return o;
        }
        if o.is_point() && o.lo == 1.0 {
            return self;
        }
        let pairs = [
            (self.lo, o.lo),
            (self.lo, o.hi),
            (self.hi, o.lo),
            (self.hi, o.hi),
        ];
        let lo = pairs.iter().map(|&(a, b)| product_down(a, b)).fold(f64::INFINITY, f64::min);
        let hi = pairs.iter().map(|&(a, b)| product_up(a, b)).fold(f64::NEG_INFINITY, f64::max);
        Interval::new(lo, hi)
    }

    pub fn scale(self, c: f64) -> Interval {
        self.mul(Interval::point(c))
    }

    /// Integer power with the tight even-power rule: `[a,b]^{2k}` with
    /// `a < 0 < b` encloses to `[0, max(a^{2k}, b^{2k})]`.
    pub fn powi(self, e: u32) -> Interval {
        if e == 0 {
            return Interval::point(1.0);
        }
        if e == 1 {
            return self;
        }
        let even = e % 2 == 0;
        if self.lo >= 0.0 {
            pow_nonneg(self.lo, self.hi, e)
        } else if self.hi <= 0.0 {
            let p = pow_nonneg(-self.hi, -self.lo, e);
            if even {
                p
            } else {
                p.neg()
            }
        } else if even {
            let m = pow_nonneg(0.0, self.mag(), e);
            Interval::new(0.0, m.hi)
        } else {
            let neg = pow_nonneg(0.0, -self.lo, e);
            let pos = pow_nonneg(0.0, self.hi, e);
            Interval::new(-neg.hi, pos.hi)
        }
    }

    pub fn hull(self, o: Interval) -> Interval {
        Interval::new(self.lo.min(o.lo), self.hi.max(o.hi))
    }
}

fn pow_nonneg(lo: f64, hi: f64, e: u32) -> Interval {
    // repeated multiplication of a non-negative interval is monotone
    let base = Interval::new(lo, hi);
    let mut acc = base;
    for _ in 1..e {
        acc = acc.mul(base);
    }
    Interval::new(acc.lo.max(0.0), acc.hi)
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn even_power_of_straddling_interval() {
        let x = Interval::new(-1.0, 1.0);
        let s = x.powi(2);
        assert_eq!(s.lo, 0.0);
        assert!(s.hi >= 1.0 && s.hi < 1.0 + 1e-15);
    }

    #[test]
    fn odd_power_keeps_sign() {
        let x = Interval::new(-2.0, 1.0);
        let c = x.powi(3);
        assert!(c.lo <= -8.0 && c.hi >= 1.0);
        assert!(c.lo > -8.0 - 1e-12 && c.hi < 1.0 + 1e-12);
    }

    #[test]
    fn product_of_unit_boxes() {
        let a = Interval::new(0.0, 1.0);
        let s = a.add(a);
        let p = a.mul(a);
        assert!(s.contains(0.0) && s.contains(2.0) && s.hi < 2.0 + 1e-15);
        assert!(p.contains(0.0) && p.contains(1.0) && p.hi < 1.0 + 1e-15);
    }

    proptest! {
        #[test]
        fn arithmetic_encloses_samples(
            a in -10.0f64..10.0, wa in 0.0f64..3.0, b in -10.0f64..10.0, wb in 0.0f64..3.0,
            ta in 0.0f64..=1.0, tb in 0.0f64..=1.0, e in 0u32..7
        ) {
            let x = Interval::new(a, a + wa);
            let y = Interval::new(b, b + wb);
            let px = a + ta * wa;
            let py = b + tb * wb;
            prop_assert!(x.add(y).contains(px + py));
            prop_assert!(x.sub(y).contains(px - py));
            prop_assert!(x.mul(y).contains(px * py));
            prop_assert!(x.powi(e).contains(px.powi(e as i32)));
        }
    }
}
