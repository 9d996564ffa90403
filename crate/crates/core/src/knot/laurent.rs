use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Integer Laurent polynomial in one variable `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i32, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        LaurentPoly::monomial(1, 0)
    }

    pub fn monomial(c: i64, e: i32) -> Self {
        let mut p = LaurentPoly::zero();
        p.add_term(e, BigInt::from(c));
        p
    }

    /// `Σ coeffs[k] t^k` from ascending integer coefficients.
    pub fn from_coeffs(coeffs: &[i64]) -> Self {
        let mut p = LaurentPoly::zero();
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term(k as i32, BigInt::from(c));
        }
        p
    }

    pub fn from_pairs<I: IntoIterator<Item = (i32, BigInt)>>(pairs: I) -> Self {
        let mut p = LaurentPoly::zero();
        for (e, c) in pairs {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: i32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigInt)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    /// Span `max_exp - min_exp`; zero for monomials and the zero polynomial.
    pub fn span(&self) -> u32 {
        match (self.min_exp(), self.max_exp()) {
            (Some(a), Some(b)) => (b - a) as u32,
            _ => 0,
        }
    }

    pub fn coeff(&self, e: i32) -> BigInt {
        self.coeffs.get(&e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.coeffs {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = LaurentPoly::zero();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &o.coeffs {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }

    pub fn shift(&self, k: i32) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// `p(1/t)`.
    pub fn reflect(&self) -> Self {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Representative of `p` up to units `±t^k`: lowest exponent zero and
    /// positive leading coefficient.
    pub fn normalized(&self) -> Self {
        let Some(lo) = self.min_exp() else {
            return LaurentPoly::zero();
        };
        let p = self.shift(-lo);
        let lead_negative = p.coeffs.values().next_back().is_some_and(|c| c.is_negative());
        if lead_negative {
            p.neg()
        } else {
            p
        }
    }

    pub fn is_normalized(&self) -> bool {
        *self == self.normalized()
    }

    pub fn eval_int(&self, t: i64) -> Option<BigInt> {
        let mut acc = BigInt::zero();
        for (e, c) in &self.coeffs {
            if *e < 0 && t.abs() != 1 {
                return None;
            }
            let v = if *e >= 0 {
                num_traits::pow(BigInt::from(t), *e as usize)
            } else {
                num_traits::pow(BigInt::from(t), e.unsigned_abs() as usize)
            };
            acc += c * v;
        }
        Some(acc)
    }

    /// Whether `Δ(1) = ±1`, as for the Alexander polynomial of a knot.
    pub fn unit_at_one(&self) -> bool {
        let s: BigInt = self.coeffs.values().sum();
        s.magnitude().is_one()
    }

    pub fn eval_complex(&self, t: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(e, c)| t.powi(*e) * c.to_f64().unwrap_or(f64::NAN))
            .sum()
    }

    /// Dense ascending coefficients of a polynomial with `min_exp >= 0`.
    pub(crate) fn dense(&self) -> Vec<BigInt> {
        let Some(hi) = self.max_exp() else {
            return Vec::new();
        };
        assert!(self.min_exp().unwrap_or(0) >= 0, "negative exponent in dense form");
        (0..=hi).map(|e| self.coeff(e)).collect()
    }

    /// Exact quotient `self / d` in `Z[t, 1/t]`. Panics when `d` does not
    /// divide `self`.
    pub fn exact_div(&self, d: &Self) -> Self {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        let (sa, sd) = (self.min_exp().unwrap(), d.min_exp().unwrap());
        let mut a = self.shift(-sa).dense();
        let b = d.shift(-sd).dense();
        let lb = b.last().unwrap().clone();
        if a.len() < b.len() {
            panic!("inexact Laurent division");
        }
        let mut q = vec![BigInt::zero(); a.len() - b.len() + 1];
        for k in (0..q.len()).rev() {
            let top = a[k + b.len() - 1].clone();
            if top.is_zero() {
                continue;
            }
            let (qk, rem) = top.div_rem(&lb);
            assert!(rem.is_zero(), "inexact Laurent division");
            for (i, bi) in b.iter().enumerate() {
                a[k + i] -= &qk * bi;
            }
            q[k] = qk;
        }
        assert!(a.iter().all(Zero::is_zero), "inexact Laurent division");
        LaurentPoly::from_pairs(
            q.into_iter()
                .enumerate()
                .map(|(k, c)| (k as i32 + sa - sd, c)),
        )
    }

    /// `[[exponent, coefficient], ...]` in ascending order.
    pub fn to_pairs(&self) -> Vec<(i32, BigInt)> {
        self.coeffs.iter().map(|(e, c)| (*e, c.clone())).collect()
    }
}

impl super::bareiss::Domain for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn one() -> Self {
        LaurentPoly::one()
    }
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Self {
        LaurentPoly::mul(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        LaurentPoly::sub(self, o)
    }
    fn neg(&self) -> Self {
        LaurentPoly::neg(self)
    }
    fn exact_div(&self, d: &Self) -> Self {
        LaurentPoly::exact_div(self, d)
    }
}

impl fmt::Display for LaurentPoly {
    /// Highest power first: `t^2 - 3t + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.coeffs.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if *e == 0 || !a.is_one() {
                write!(f, "{a}")?;
            }
            match *e {
                0 => {}
                1 => write!(f, "t")?,
                e => write!(f, "t^{e}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(i32, i64)> = self
            .coeffs
            .iter()
            .map(|(e, c)| (*e, c.to_i64().expect("coefficient fits in i64")))
            .collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: Vec<(i32, i64)> = Vec::deserialize(d)?;
        Ok(LaurentPoly::from_pairs(
            pairs.into_iter().map(|(e, c)| (e, BigInt::from(c))),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display() {
        assert_eq!(LaurentPoly::from_coeffs(&[1, -3, 1]).to_string(), "t^2 - 3t + 1");
        assert_eq!(LaurentPoly::from_coeffs(&[2, -3, 2]).to_string(), "2t^2 - 3t + 2");
        assert_eq!(LaurentPoly::one().to_string(), "1");
        assert_eq!(LaurentPoly::monomial(-1, -2).to_string(), "-t^-2");
    }

    #[test]
    fn normalization_removes_units() {
        let p = LaurentPoly::from_coeffs(&[1, -3, 1]);
        let q = p.shift(-5).neg();
        assert_eq!(q.normalized(), p);
        assert!(p.is_normalized());
    }

    #[test]
    fn exact_division_roundtrip() {
        let a = LaurentPoly::from_coeffs(&[1, -3, 1]);
        let b = LaurentPoly::from_coeffs(&[2, 0, -1, 4]).shift(-2);
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div(&b), a);
        assert_eq!(prod.exact_div(&a), b);
    }

    #[test]
    #[should_panic(expected = "inexact")]
    fn inexact_division_panics() {
        let a = LaurentPoly::from_coeffs(&[1, 1]);
        let b = LaurentPoly::from_coeffs(&[0, 2]);
        let _ = a.exact_div(&b);
    }

    #[test]
    fn evaluation() {
        let p = LaurentPoly::from_coeffs(&[1, -3, 1]);
        assert_eq!(p.eval_int(1), Some(BigInt::from(-1)));
        let v = p.eval_complex(Complex64::new(0.0, 1.0));
        assert!((v - Complex64::new(0.0, -3.0)).norm() < 1e-12);
    }

    #[test]
    fn json_pairs() {
        let p = LaurentPoly::from_coeffs(&[1, -3, 1]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[0,1],[1,-3],[2,1]]");
        let back: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
