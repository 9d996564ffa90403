//! Built-in germs, all expanded into real coordinates `x1..x4`.
//!
//! | name             | germ                                                          |
//! |------------------|---------------------------------------------------------------|
//! | `trivial_plane`  | `(x1, x2)`                                                    |
//! | `rudolph_f`      | `z2^3 - 3(x1^2+x2^2)(1 + i x2) z2 - 2 x1`                     |
//! | `rudolph_f_alt`  | same, ending in `- 2 z1`                                      |
//! | `rudolph_g`      | `rudolph_f(z1^2, z2)`                                         |
//! | `rudolph_g_alt`  | `rudolph_f_alt(z1^2, z2)`                                     |
//! | `perron_f`       | `(x3 p^2 + x1(8x1^2 - 2p^2), s x4 x1 + x2(8x1^2 - p^2))`, `p = |x|^2` |
//! | `perron_f_alt`   | same with `p^2 = |x|^2`                                       |
//! | `perron_g`       | `perron_f(x1, x2, x3^2 - x4^2, 2 x3 x4)`                      |
//! | `perron_g_alt`   | `perron_f_alt(x1, x2, x3^2 - x4^2, 2 x3 x4)`                  |
//! | `brieskorn(p,q)` | `z1^p + z2^q`                                                 |
//!
//! `s` stands for the square root of two. Coefficients are exact rationals, so
//! it is stored as a Pell convergent `p/q` with `|p/q - sqrt(2)| < 1e-24`,
//! which is below double precision and leaves the float lowering identical
//! to `std::f64::consts::SQRT_2`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::parser::{parse_polymap, ParseMode};
use super::{ComplexPoly, PolyMap, Substitution};
use crate::error::PolyMapError;
use crate::poly::Poly;

pub const NAMES: &[&str] = &[
    "trivial_plane",
    "rudolph_f",
    "rudolph_f_alt",
    "rudolph_g",
    "rudolph_g_alt",
    "perron_f",
    "perron_f_alt",
    "perron_g",
    "perron_g_alt",
    "brieskorn(2,3)",
];

const RUDOLPH: &str = "z2^3 - 3*(x1^2+x2^2)*(1+i*x2)*z2 - 2*x1";
const RUDOLPH_ALT: &str = "z2^3 - 3*(x1^2+x2^2)*(1+i*x2)*z2 - 2*z1";

/// Pell convergent of the square root of two with denominator above 1e12.
pub fn sqrt2_convergent() -> BigRational {
    let (mut p, mut q) = (BigInt::from(3), BigInt::from(2));
    while q < BigInt::from(1_000_000_000_000i64) {
        let np = &p * 3 + &q * 4;
        let nq = &p * 2 + &q * 3;
        p = np;
        q = nq;
    }
    BigRational::new(p, q)
}

fn rudolph(alt: bool) -> PolyMap {
    parse_polymap(if alt { RUDOLPH_ALT } else { RUDOLPH }, ParseMode::Complex)
        .expect("built-in source parses")
}

/// Perron's map. `verbatim` reads `rho = |x|^2`; otherwise `rho^2 = |x|^2`.
fn perron(verbatim: bool) -> PolyMap {
    let x = |i| Poly::var(4, i);
    let norm2 = (0..4).fold(Poly::zero(4), |acc, i| acc.add(&x(i).pow(2)));
    let rho_sq = if verbatim { norm2.pow(2) } else { norm2 };
    let eight_x1_sq = x(0).pow(2).scale(&super::rational(8, 1));
    let c0 = x(2)
        .mul(&rho_sq)
        .add(&x(0).mul(&eight_x1_sq.sub(&rho_sq.scale(&super::rational(2, 1)))));
    let c1 = x(3)
        .mul(&x(0))
        .scale(&sqrt2_convergent())
        .add(&x(1).mul(&eight_x1_sq.sub(&rho_sq)));
    PolyMap::new([c0, c1], None).expect("Perron's map vanishes at the origin")
}

/// `Re`/`Im` of `z1^p + z2^q`.
pub fn brieskorn(p: u32, q: u32) -> PolyMap {
    let z1 = ComplexPoly::complex_var(4, 0, 1).pow(p);
    let z2 = ComplexPoly::complex_var(4, 2, 3).pow(q);
    PolyMap::from_complex(z1.add(&z2), Some(format!("brieskorn({p},{q})")))
        .expect("p, q >= 1 gives no constant term")
}

fn parse_brieskorn(name: &str) -> Option<(u32, u32)> {
    let inner = name.strip_prefix("brieskorn(")?.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    let p: u32 = a.trim().parse().ok()?;
    let q: u32 = b.trim().parse().ok()?;
    (p >= 1 && q >= 1 && p <= 32 && q <= 32).then_some((p, q))
}

/// Looks a germ up by catalog name.
pub fn lookup(name: &str) -> Result<PolyMap, PolyMapError> {
    let named = |m: PolyMap| m.with_name(name);
    let z1_sq = || Substitution::complex_square(4, 0, 1);
    let z2_sq = || Substitution::complex_square(4, 2, 3);
    let m = match name {
        "trivial_plane" => named(
            PolyMap::new([Poly::var(4, 0), Poly::var(4, 1)], None).expect("linear germ"),
        ),
        "rudolph_f" => named(rudolph(false)),
        "rudolph_f_alt" => named(rudolph(true)),
        "rudolph_g" => named(rudolph(false).substitute(&z1_sq())?),
        "rudolph_g_alt" => named(rudolph(true).substitute(&z1_sq())?),
        "perron_f" => named(perron(true)),
        "perron_f_alt" => named(perron(false)),
        "perron_g" => named(perron(true).substitute(&z2_sq())?),
        "perron_g_alt" => named(perron(false).substitute(&z2_sq())?),
        other => match parse_brieskorn(other) {
            Some((p, q)) => brieskorn(p, q),
            None => return Err(PolyMapError::UnknownGerm(name.to_string())),
        },
    };
    Ok(m)
}

/// Every listed catalog entry.
pub fn entries() -> Vec<PolyMap> {
    NAMES
        .iter()
        .map(|n| lookup(n).expect("catalog names resolve"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{ToPrimitive, Zero};

    #[test]
    fn every_entry_vanishes_at_origin() {
        for m in entries() {
            let zero = vec![BigRational::zero(); m.nvars()];
            let (a, b) = m.evaluate_exact(&zero).unwrap();
            assert!(a.is_zero() && b.is_zero(), "{:?}", m.name());
        }
    }

    #[test]
    fn sqrt2_is_accurate() {
        let s = sqrt2_convergent();
        let err = (&s * &s - BigRational::from_integer(2.into())).to_f64().unwrap().abs();
        assert!(err < 1e-23);
        assert_eq!(s.to_f64().unwrap(), std::f64::consts::SQRT_2);
    }

    #[test]
    fn unknown_germ() {
        assert_eq!(
            lookup("missing_germ").unwrap_err(),
            PolyMapError::UnknownGerm("missing_germ".into())
        );
        assert!(lookup("brieskorn(0,3)").is_err());
    }

    #[test]
    fn perron_readings_differ_in_degree() {
        let v = lookup("perron_f").unwrap();
        let a = lookup("perron_f_alt").unwrap();
        assert_eq!(v.components()[0].total_degree(), Some(5));
        assert_eq!(a.components()[0].total_degree(), Some(3));
    }

    #[test]
    fn brieskorn_matches_complex_formula() {
        let b = lookup("brieskorn(2,3)").unwrap();
        let x = [0.2, -0.1, 0.3, 0.05];
        let z1 = num_complex::Complex64::new(x[0], x[1]);
        let z2 = num_complex::Complex64::new(x[2], x[3]);
        let v = z1.powi(2) + z2.powi(3);
        let (re, im) = b.eval(&x);
        assert!((re - v.re).abs() < 1e-15 && (im - v.im).abs() < 1e-15);
    }

    #[test]
    fn rudolph_alt_differs_only_in_linear_term() {
        let f = lookup("rudolph_f").unwrap();
        let a = lookup("rudolph_f_alt").unwrap();
        let d = a.components()[1].sub(&f.components()[1]);
        assert_eq!(d, Poly::var(4, 1).scale(&crate::polymap::rational(-2, 1)));
    }
}
