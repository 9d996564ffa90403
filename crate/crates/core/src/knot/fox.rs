//! Order of the first homology of the `r`-fold cyclic branched cover,
//! `∏_{j=1}^{r-1} |Δ(ζ^j)|` with `ζ = e^{2πi/r}`.
//!
//! The product equals `|Res(Δ, 1 + t + ... + t^{r-1})|`, which is computed
//! exactly as a Sylvester determinant; the float product is kept as an
//! independent cross-check.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::bareiss::determinant;
use super::laurent::LaurentPoly;

/// `|H_1|` of a cyclic branched cover: finite or infinite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FoxOrder {
    Finite(BigInt),
    Infinite,
}

impl FoxOrder {
    pub fn finite(&self) -> Option<&BigInt> {
        match self {
            FoxOrder::Finite(n) => Some(n),
            FoxOrder::Infinite => None,
        }
    }
}

impl fmt::Display for FoxOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoxOrder::Finite(n) => write!(f, "{n}"),
            FoxOrder::Infinite => write!(f, "infinite"),
        }
    }
}

impl Serialize for FoxOrder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            FoxOrder::Finite(n) => match n.to_u64() {
                Some(v) => s.serialize_u64(v),
                None => s.serialize_str(&n.to_string()),
            },
            FoxOrder::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for FoxOrder {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(FoxOrder::Finite(BigInt::from(v))),
            Raw::Text(t) if t == "infinite" => Ok(FoxOrder::Infinite),
            Raw::Text(t) => t
                .parse()
                .map(FoxOrder::Finite)
                .map_err(serde::de::Error::custom),
        }
    }
}

/// Sylvester matrix of two dense ascending-coefficient polynomials.
fn sylvester(a: &[BigInt], b: &[BigInt]) -> Vec<Vec<BigInt>> {
    let (m, n) = (a.len() - 1, b.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for k in 0..n {
        let mut row = vec![BigInt::zero(); size];
        for (i, c) in a.iter().rev().enumerate() {
            row[k + i] = c.clone();
        }
        rows.push(row);
    }
    for k in 0..m {
        let mut row = vec![BigInt::zero(); size];
        for (i, c) in b.iter().rev().enumerate() {
            row[k + i] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Integer resultant of two polynomials (ascending coefficients, nonzero
/// leading terms).
pub fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    if a.len() == 1 {
        return num_traits::pow(a[0].clone(), b.len() - 1);
    }
    if b.len() == 1 {
        return num_traits::pow(b[0].clone(), a.len() - 1);
    }
    determinant(sylvester(a, b))
}

/// Exact `|H_1|` of the `r`-fold cyclic branched cover, `r >= 2`.
pub fn fox_order(delta: &LaurentPoly, r: u32) -> FoxOrder {
    assert!(r >= 2, "cover order must be at least 2");
    let d = delta.normalized().dense();
    if d.is_empty() {
        return FoxOrder::Infinite;
    }
    let phi: Vec<BigInt> = vec![BigInt::from(1); r as usize];
    let res = resultant(&d, &phi).abs();
    if res.is_zero() {
        FoxOrder::Infinite
    } else {
        FoxOrder::Finite(res)
    }
}

/// Float product `∏_{j=1}^{r-1} |Δ(e^{2πij/r})|`.
pub fn fox_order_float(delta: &LaurentPoly, r: u32) -> f64 {
    (1..r)
        .map(|j| {
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / r as f64);
            delta.eval_complex(z).norm()
        })
        .product()
}

/// Cover homology with both evaluation routes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverHomology {
    pub r: u32,
    pub order: FoxOrder,
    pub float_product: f64,
    pub agree: bool,
}

/// Relative agreement required between the exact and float routes.
pub const FOX_REL_TOL: f64 = 1e-6;

pub fn cover_homology(delta: &LaurentPoly, r: u32) -> CoverHomology {
    let order = fox_order(delta, r);
    let fl = fox_order_float(delta, r);
    let agree = match &order {
        FoxOrder::Finite(n) => {
            let exact = n.to_f64().unwrap_or(f64::INFINITY);
            ((fl - exact) / exact).abs() < FOX_REL_TOL
        }
        // a root of unity is a root of Δ: the product must vanish numerically
        FoxOrder::Infinite => fl < 1e-9 * (1.0 + delta_l1(delta)).powi(r as i32),
    };
    CoverHomology {
        r,
        order,
        float_product: fl,
        agree,
    }
}

fn delta_l1(delta: &LaurentPoly) -> f64 {
    delta
        .terms()
        .map(|(_, c)| c.to_f64().unwrap_or(f64::INFINITY).abs())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lucas(n: u32) -> i64 {
        let (mut a, mut b) = (2i64, 1i64);
        for _ in 0..n {
            let c = a + b;
            a = b;
            b = c;
        }
        a
    }

    #[test]
    fn trivial_polynomial() {
        for r in 2..8 {
            assert_eq!(fox_order(&LaurentPoly::one(), r), FoxOrder::Finite(1.into()));
        }
    }

    #[test]
    fn figure_eight_ladder_matches_lucas_closed_form() {
        let d = LaurentPoly::from_coeffs(&[1, -3, 1]);
        for r in 2..=6 {
            let expect = (2 - lucas(2 * r)).abs();
            assert_eq!(fox_order(&d, r), FoxOrder::Finite(expect.into()), "r = {r}");
        }
        assert_eq!(fox_order(&d, 3), FoxOrder::Finite(16.into()));
    }

    #[test]
    fn trefoil_six_fold_cover_is_infinite() {
        let d = LaurentPoly::from_coeffs(&[1, -1, 1]);
        assert_eq!(fox_order(&d, 6), FoxOrder::Infinite);
        let h = cover_homology(&d, 6);
        assert!(h.agree, "float product {}", h.float_product);
        // 2-fold cover of the trefoil is the lens space L(3,1)
        assert_eq!(fox_order(&d, 2), FoxOrder::Finite(3.into()));
    }

    #[test]
    fn resultant_of_linear_factors() {
        // Res(t - 2, t - 5) = 2 - 5 up to sign convention
        let a = [BigInt::from(-2), BigInt::from(1)];
        let b = [BigInt::from(-5), BigInt::from(1)];
        assert_eq!(resultant(&a, &b).abs(), BigInt::from(3));
    }

    #[test]
    fn json_encoding() {
        let v = serde_json::to_string(&vec![FoxOrder::Finite(16.into()), FoxOrder::Infinite]).unwrap();
        assert_eq!(v, r#"[16,"infinite"]"#);
        let back: Vec<FoxOrder> = serde_json::from_str(&v).unwrap();
        assert_eq!(back[0], FoxOrder::Finite(16.into()));
        assert_eq!(back[1], FoxOrder::Infinite);
    }
}
