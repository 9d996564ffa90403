//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose ordering is
//! graded lexicographic. Iterating a polynomial therefore always visits terms
//! in the same order, which keeps printing, equality and the lowered float
//! evaluation deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::interval::Interval;

/// Exponent vector of a monomial, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(e: Vec<u32>) -> Self {
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in `nvars` real variables `x1..xn` over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn from_int(nvars: usize, c: i64) -> Self {
        Poly::constant(nvars, BigRational::from_integer(BigInt::from(c)))
    }

    /// The variable `x_{i+1}` (zero-based index `i`).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut p = Poly::zero(nvars);
        p.terms
            .insert(Monomial::var(nvars, i), BigRational::one());
        p
    }

    /// Builds a polynomial from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, BigRational)>,
    {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length mismatch");
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&Monomial::one(self.nvars))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Largest exponent of each variable over all terms.
    pub fn max_exponents(&self) -> Vec<u32> {
        let mut out = vec![0; self.nvars];
        for m in self.terms.keys() {
            for (o, &e) in out.iter_mut().zip(&m.0) {
                *o = (*o).max(e);
            }
        }
        out
    }

    /// Highest variable index (zero-based) that actually occurs.
    pub fn highest_var(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter_map(|m| m.0.iter().rposition(|&e| e > 0))
            .max()
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::constant(self.nvars, BigRational::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Partial derivative with respect to variable `i` (zero-based).
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[i] -= 1;
            out.add_term(dm, c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Re-embeds the polynomial into a ring with `nvars` variables, keeping
    /// the first variables in place. Panics if a used variable would be lost.
    pub fn with_nvars(&self, nvars: usize) -> Poly {
        if let Some(h) = self.highest_var() {
            assert!(h < nvars, "cannot drop variable x{}", h + 1);
        }
        Poly {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut e = m.0.clone();
                    e.resize(nvars, 0);
                    (Monomial(e), c.clone())
                })
                .collect(),
        }
    }

    /// Composition: variable `i` is replaced by `targets[i]`. All targets must
    /// live in the same ring; the result lives there too.
    pub fn compose(&self, targets: &[Poly]) -> Poly {
        assert_eq!(targets.len(), self.nvars);
        let m = targets.first().map(|t| t.nvars).unwrap_or(0);
        assert!(targets.iter().all(|t| t.nvars == m));
        let maxe = self.max_exponents();
        // powers[i][k] = targets[i]^k
        let powers: Vec<Vec<Poly>> = targets
            .iter()
            .zip(&maxe)
            .map(|(t, &e)| {
                let mut v = vec![Poly::constant(m, BigRational::one())];
                for k in 1..=e as usize {
                    let next = v[k - 1].mul(t);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Poly::zero(m);
        for (mono, c) in &self.terms {
            let mut term = Poly::constant(m, c.clone());
            for (i, &e) in mono.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&powers[i][e as usize]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    pub fn eval_rational(&self, x: &[BigRational]) -> BigRational {
        assert_eq!(x.len(), self.nvars);
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &e) in x.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(xi.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Lowered float form used for fast evaluation.
    pub fn lower(&self) -> LoweredPoly {
        LoweredPoly::new(self)
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &BigRational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    /// Leading (highest graded-lex) term first, e.g. `x1^2*x3 - 3/2*x2 + x1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let a = c.abs();
            let mut first = true;
            if !a.is_one() || m.is_constant() {
                write_rational(f, &a)?;
                first = false;
            }
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                write!(f, "x{}", i + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Float lowering of a [`Poly`]: coefficient enclosures plus exponents, in
/// canonical term order.
#[derive(Clone, Debug)]
pub struct LoweredPoly {
    nvars: usize,
    coeffs: Vec<f64>,
    coeff_enclosures: Vec<Interval>,
    exponents: Vec<Vec<u32>>,
    max_exp: Vec<u32>,
}

fn rational_enclosure(q: &BigRational) -> (f64, Interval) {
    let c = q.to_f64().unwrap_or(f64::NAN);
    let exact = BigRational::from_float(c).is_some_and(|back| &back == q);
    let enc = if exact {
        Interval::point(c)
    } else {
        Interval::new(c.next_down(), c.next_up())
    };
    (c, enc)
}

impl LoweredPoly {
    fn new(p: &Poly) -> Self {
        let mut coeffs = Vec::with_capacity(p.len());
        let mut coeff_enclosures = Vec::with_capacity(p.len());
        let mut exponents = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let (f, enc) = rational_enclosure(c);
            coeffs.push(f);
            coeff_enclosures.push(enc);
            exponents.push(m.exponents().to_vec());
        }
        LoweredPoly {
            nvars: p.nvars(),
            coeffs,
            coeff_enclosures,
            exponents,
            max_exp: p.max_exponents(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        let mut acc = 0.0;
        for (c, e) in self.coeffs.iter().zip(&self.exponents) {
            let mut t = *c;
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= xi.powi(k as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Sound enclosure of the polynomial's range over a box.
    pub fn eval_interval(&self, x: &[Interval]) -> Interval {
        debug_assert_eq!(x.len(), self.nvars);
        let powers: Vec<Vec<Interval>> = x
            .iter()
            .zip(&self.max_exp)
            .map(|(xi, &m)| (0..=m).map(|k| xi.powi(k)).collect())
            .collect();
        let mut acc = Interval::point(0.0);
        for (c, e) in self.coeff_enclosures.iter().zip(&self.exponents) {
            let mut t = *c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(powers[i][k as usize]);
                }
            }
            acc = acc.add(t);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn grlex_orders_by_degree_then_lex() {
        let a = Monomial(vec![2, 0]);
        let b = Monomial(vec![0, 3]);
        let c = Monomial(vec![1, 1]);
        assert!(a < b);
        assert!(c < a);
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.add(&y).sub(&x);
        assert_eq!(p, y);
        assert!(x.sub(&x).is_zero());
    }

    #[test]
    fn binomial_square() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let s = x.add(&y).pow(2);
        let expected = x.mul(&x).add(&x.mul(&y).scale(&q(2, 1))).add(&y.mul(&y));
        assert_eq!(s, expected);
    }

    #[test]
    fn derivative_of_monomial() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.pow(3).mul(&y).scale(&q(1, 2));
        let dx = p.derivative(0);
        assert_eq!(dx, x.pow(2).mul(&y).scale(&q(3, 2)));
        assert!(p.derivative(1).derivative(1).is_zero());
    }

    #[test]
    fn display_is_leading_first() {
        let x = Poly::var(3, 0);
        let z = Poly::var(3, 2);
        let p = x.pow(2).mul(&z).sub(&x.scale(&q(3, 2)));
        assert_eq!(p.to_string(), "x1^2*x3 - 3/2*x1");
        assert_eq!(Poly::zero(2).to_string(), "0");
        assert_eq!(x.neg().to_string(), "-x1");
    }

    #[test]
    fn compose_matches_pointwise() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.mul(&y).add(&x.pow(2));
        // (x, y) -> (x + y, x - y)
        let c = p.compose(&[x.add(&y), x.sub(&y)]);
        let pt = [q(1, 3), q(-2, 5)];
        let img = [&pt[0] + &pt[1], &pt[0] - &pt[1]];
        assert_eq!(c.eval_rational(&pt), p.eval_rational(&img));
    }

    #[test]
    fn lowered_enclosure_of_inexact_coefficient() {
        let p = Poly::constant(1, q(1, 3));
        let l = p.lower();
        let iv = l.eval_interval(&[Interval::point(0.0)]);
        assert!(iv.lo < 1.0 / 3.0 + 1e-300 && iv.hi > 1.0 / 3.0 - 1e-300);
        assert!(iv.lo < iv.hi);
    }
}
