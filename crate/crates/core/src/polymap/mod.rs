//! Polynomial map germs `(R^n, 0) -> (R^2, 0)`.
//!
//! A [`PolyMap`] holds the two exact components together with their exact
//! partial derivatives and the lowered float forms used by the numerical
//! stages. Everything is built once and never mutated.

pub mod catalog;
pub mod parser;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::PolyMapError;
use crate::poly::{LoweredPoly, Poly};

pub use parser::{parse_polymap, ParseMode};

/// A complex-valued polynomial written as a pair of real polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexPoly {
    pub re: Poly,
    pub im: Poly,
}

impl ComplexPoly {
    pub fn real(re: Poly) -> Self {
        let n = re.nvars();
        ComplexPoly {
            re,
            im: Poly::zero(n),
        }
    }

    pub fn imaginary_unit(nvars: usize) -> Self {
        ComplexPoly {
            re: Poly::zero(nvars),
            im: Poly::from_int(nvars, 1),
        }
    }

    /// `x_{i+1} + i x_{j+1}`.
    pub fn complex_var(nvars: usize, i: usize, j: usize) -> Self {
        ComplexPoly {
            re: Poly::var(nvars, i),
            im: Poly::var(nvars, j),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexPoly {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        ComplexPoly {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn neg(&self) -> Self {
        ComplexPoly {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn conj(&self) -> Self {
        ComplexPoly {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        ComplexPoly {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        ComplexPoly {
            re: self.re.scale(c),
            im: self.im.scale(c),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let n = self.re.nvars();
        let mut base = self.clone();
        let mut acc = ComplexPoly::real(Poly::from_int(n, 1));
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

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

/// A polynomial map germ with exactly two components.
#[derive(Clone, Debug)]
pub struct PolyMap {
    nvars: usize,
    components: [Poly; 2],
    name: Option<String>,
    lowered: [LoweredPoly; 2],
    partials: [Vec<Poly>; 2],
    lowered_partials: [Vec<LoweredPoly>; 2],
}

impl PartialEq for PolyMap {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.components == other.components
    }
}

impl PolyMap {
    /// Builds a germ, rejecting components with a constant term.
    pub fn new(components: [Poly; 2], name: Option<String>) -> Result<Self, PolyMapError> {
        let nvars = components[0].nvars();
        if components[1].nvars() != nvars {
            return Err(PolyMapError::DimensionMismatch {
                expected: nvars,
                got: components[1].nvars(),
            });
        }
        for (k, c) in components.iter().enumerate() {
            if !c.constant_term().is_zero() {
                return Err(PolyMapError::ConstantTerm { component: k + 1 });
            }
        }
        let partials = [
            (0..nvars).map(|i| components[0].derivative(i)).collect::<Vec<_>>(),
            (0..nvars).map(|i| components[1].derivative(i)).collect::<Vec<_>>(),
        ];
        let lowered_partials = [
            partials[0].iter().map(Poly::lower).collect(),
            partials[1].iter().map(Poly::lower).collect(),
        ];
        Ok(PolyMap {
            nvars,
            lowered: [components[0].lower(), components[1].lower()],
            components,
            name,
            partials,
            lowered_partials,
        })
    }

    pub fn from_complex(c: ComplexPoly, name: Option<String>) -> Result<Self, PolyMapError> {
        PolyMap::new([c.re, c.im], name)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn components(&self) -> &[Poly; 2] {
        &self.components
    }

    /// Exact partial derivative of component `row` with respect to `x_{col+1}`.
    pub fn partial(&self, row: usize, col: usize) -> &Poly {
        &self.partials[row][col]
    }

    pub fn lowered(&self) -> &[LoweredPoly; 2] {
        &self.lowered
    }

    pub fn lowered_partial(&self, row: usize, col: usize) -> &LoweredPoly {
        &self.lowered_partials[row][col]
    }

    fn check_dim(&self, got: usize) -> Result<(), PolyMapError> {
        if got != self.nvars {
            return Err(PolyMapError::DimensionMismatch {
                expected: self.nvars,
                got,
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<(f64, f64), PolyMapError> {
        self.check_dim(x.len())?;
        Ok(self.eval(x))
    }

    /// Unchecked evaluation for hot loops; `x.len()` must equal `nvars`.
    pub fn eval(&self, x: &[f64]) -> (f64, f64) {
        (self.lowered[0].eval(x), self.lowered[1].eval(x))
    }

    pub fn evaluate_exact(&self, x: &[BigRational]) -> Result<(BigRational, BigRational), PolyMapError> {
        self.check_dim(x.len())?;
        Ok((
            self.components[0].eval_rational(x),
            self.components[1].eval_rational(x),
        ))
    }

    pub fn jacobian(&self, x: &[f64]) -> Result<[Vec<f64>; 2], PolyMapError> {
        self.check_dim(x.len())?;
        Ok(self.jac(x))
    }

    /// Unchecked Jacobian, rows are the two components.
    pub fn jac(&self, x: &[f64]) -> [Vec<f64>; 2] {
        [
            self.lowered_partials[0].iter().map(|p| p.eval(x)).collect(),
            self.lowered_partials[1].iter().map(|p| p.eval(x)).collect(),
        ]
    }

    pub fn substitute(&self, s: &Substitution) -> Result<PolyMap, PolyMapError> {
        self.check_dim(s.targets.len())?;
        let c0 = self.components[0].compose(&s.targets);
        let c1 = self.components[1].compose(&s.targets);
        PolyMap::new([c0, c1], None)
    }

    /// The suspension `f + z^r` on `n + 2` variables, `z = x_{n+1} + i x_{n+2}`.
    pub fn suspend(&self, r: u32) -> Result<PolyMap, PolyMapError> {
        if r < 2 {
            return Err(PolyMapError::SuspensionOrder(r));
        }
        let n = self.nvars + 2;
        let z = ComplexPoly::complex_var(n, n - 2, n - 1).pow(r);
        let c0 = self.components[0].with_nvars(n).add(&z.re);
        let c1 = self.components[1].with_nvars(n).add(&z.im);
        let name = self.name.as_ref().map(|s| format!("{s}+z^{r}"));
        PolyMap::new([c0, c1], name)
    }

    /// Source text in the real-mode grammar, `p1 ; p2`.
    pub fn to_source(&self) -> String {
        format!("{} ; {}", self.components[0], self.components[1])
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_source())
    }
}

/// Replacement of every variable of an `n`-variable map by a polynomial in
/// `m` fresh variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    targets: Vec<Poly>,
}

impl Substitution {
    pub fn new(targets: Vec<Poly>) -> Result<Self, PolyMapError> {
        if let Some(first) = targets.first() {
            let m = first.nvars();
            if let Some(bad) = targets.iter().find(|t| t.nvars() != m) {
                return Err(PolyMapError::DimensionMismatch {
                    expected: m,
                    got: bad.nvars(),
                });
            }
        }
        Ok(Substitution { targets })
    }

    pub fn identity(n: usize) -> Self {
        Substitution {
            targets: (0..n).map(|i| Poly::var(n, i)).collect(),
        }
    }

    /// `(x_i, x_j) -> (x_i^2 - x_j^2, 2 x_i x_j)`, i.e. `w -> w^2` on the
    /// complex coordinate `w = x_i + i x_j`; other variables are fixed.
    pub fn complex_square(n: usize, i: usize, j: usize) -> Self {
        let mut s = Substitution::identity(n);
        let w = ComplexPoly::complex_var(n, i, j).pow(2);
        s.targets[i] = w.re;
        s.targets[j] = w.im;
        s
    }

    pub fn targets(&self) -> &[Poly] {
        &self.targets
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.targets.iter().map(|t| t.lower().eval(x)).collect()
    }
}

pub(crate) fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::catalog::lookup;
    use super::*;

    fn trivial() -> PolyMap {
        lookup("trivial_plane").unwrap()
    }

    #[test]
    fn evaluate_trivial_plane() {
        let v = trivial().evaluate(&[0.3, -0.4, 0.5, 0.7]).unwrap();
        assert_eq!(v, (0.3, -0.4));
    }

    #[test]
    fn evaluate_rudolph_f() {
        let f = lookup("rudolph_f").unwrap();
        assert_eq!(f.evaluate(&[0.0; 4]).unwrap(), (0.0, 0.0));
        assert_eq!(f.evaluate(&[1.0, 0.0, 0.0, 0.0]).unwrap(), (-2.0, 0.0));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = trivial().evaluate(&[1.0, 2.0]).unwrap_err();
        assert_eq!(err, PolyMapError::DimensionMismatch { expected: 4, got: 2 });
        assert!(trivial().jacobian(&[1.0]).is_err());
    }

    #[test]
    fn jacobian_of_linear_map() {
        let j = trivial().jacobian(&[0.2, 0.1, -0.3, 0.9]).unwrap();
        assert_eq!(j[0], vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(j[1], vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn suspension_of_trivial_plane() {
        let s = trivial().suspend(2).unwrap();
        let x = |i| Poly::var(6, i);
        let expect0 = x(0).add(&x(4).pow(2)).sub(&x(5).pow(2));
        let expect1 = x(1).add(&x(4).mul(&x(5)).scale(&rational(2, 1)));
        assert_eq!(s.components()[0], expect0);
        assert_eq!(s.components()[1], expect1);
    }

    #[test]
    fn suspension_z_block() {
        let s = trivial().suspend(2).unwrap();
        let (a, b) = (0.3, -0.7);
        let j = s.jacobian(&[0.1, 0.2, 0.3, 0.4, a, b]).unwrap();
        assert_eq!(&j[0][4..], &[2.0 * a, -2.0 * b]);
        assert_eq!(&j[1][4..], &[2.0 * b, 2.0 * a]);
    }

    #[test]
    fn suspension_order_must_be_two_or_more() {
        assert_eq!(
            trivial().suspend(1).unwrap_err(),
            PolyMapError::SuspensionOrder(1)
        );
    }

    #[test]
    fn identity_substitution_is_noop() {
        let f = lookup("rudolph_f").unwrap();
        let g = f.substitute(&Substitution::identity(4)).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn rudolph_g_is_rudolph_f_of_z1_squared() {
        let f = lookup("rudolph_f").unwrap();
        let g = lookup("rudolph_g").unwrap();
        let direct = f.substitute(&Substitution::complex_square(4, 0, 1)).unwrap();
        assert_eq!(direct, g);
        // pointwise: g(x) = f(x1^2 - x2^2, 2 x1 x2, x3, x4)
        let x = [0.11, -0.07, 0.05, 0.02];
        let y = [x[0] * x[0] - x[1] * x[1], 2.0 * x[0] * x[1], x[2], x[3]];
        let (g0, g1) = g.eval(&x);
        let (f0, f1) = f.eval(&y);
        assert!((g0 - f0).abs() < 1e-15 && (g1 - f1).abs() < 1e-15);
    }

    #[test]
    fn perron_g_is_perron_f_of_z2_squared() {
        let f = lookup("perron_f").unwrap();
        let g = lookup("perron_g").unwrap();
        let direct = f.substitute(&Substitution::complex_square(4, 2, 3)).unwrap();
        assert_eq!(direct, g);
    }
}
