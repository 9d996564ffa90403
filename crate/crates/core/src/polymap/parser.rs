//! Recursive-descent parser for polynomial map sources.
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*        ('/' only by a nonzero constant)
//! unary  := ('+'|'-') unary | power
//! power  := base ('^' uint)?
//! base   := number | var | 'i' | '(' expr ')' | fn '(' expr ')'
//! fn     := 'Re' | 'Im' | 'conj'
//! ```
//!
//! Real mode reads `expr ; expr` over `x1..xn`. Complex mode reads a single
//! expression that may use `z1 = x1 + i x2`, `z2 = x3 + i x4`, `i`, `conj`,
//! `Re` and `Im`; its real and imaginary parts become the two components.
//! Numbers may be integers, decimals (read exactly) or `a/b`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{ComplexPoly, PolyMap};
use crate::error::PolyMapError;
use crate::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseMode {
    /// `expr ; expr` in `nvars` real variables (inferred when `None`).
    Real { nvars: Option<usize> },
    /// One mixed complex expression in `z1, z2` (4 real variables).
    Complex,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Sym(char),
    End,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, PolyMapError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let start = i;
            let mut int = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                int.push(chars[i]);
                i += 1;
            }
            let mut frac = String::new();
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    frac.push(chars[i]);
                    i += 1;
                }
            }
            let digits = format!("{int}{frac}");
            let numer: BigInt = digits.parse().map_err(|_| PolyMapError::Syntax {
                pos: start,
                msg: "malformed number".into(),
            })?;
            let denom = num_traits::pow(BigInt::from(10), frac.len());
            out.push((Tok::Num(BigRational::new(numer, denom)), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                i += 1;
            }
            out.push((Tok::Ident(s), start));
        } else if "+-*/^();".contains(c) {
            out.push((Tok::Sym(c), i));
            i += 1;
        } else {
            return Err(PolyMapError::Syntax {
                pos: i,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    nvars: usize,
    complex: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, PolyMapError> {
        Err(PolyMapError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), PolyMapError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.syntax(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self) -> Result<ComplexPoly, PolyMapError> {
        let mut acc = match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                self.term()?.neg()
            }
            Tok::Sym('+') => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Sym('-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ComplexPoly, PolyMapError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Tok::Sym('/') => {
                    self.bump();
                    let pos = self.pos();
                    let d = self.unary()?;
                    let c = as_real_constant(&d).ok_or(PolyMapError::Syntax {
                        pos,
                        msg: "division only by a constant".into(),
                    })?;
                    if c.is_zero() {
                        return Err(PolyMapError::Syntax {
                            pos,
                            msg: "division by zero".into(),
                        });
                    }
                    acc = acc.scale(&c.recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<ComplexPoly, PolyMapError> {
        match self.peek() {
            Tok::Sym('-') => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Tok::Sym('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<ComplexPoly, PolyMapError> {
        let base = self.base()?;
        if *self.peek() == Tok::Sym('^') {
            self.bump();
            let (tok, pos) = self.bump();
            let e = match tok {
                Tok::Num(q) if q.is_integer() => q
                    .to_integer()
                    .try_into()
                    .ok()
                    .filter(|&e: &u32| e <= 64)
                    .ok_or(PolyMapError::Syntax {
                        pos,
                        msg: "exponent must be an integer in 0..=64".into(),
                    })?,
                _ => {
                    return Err(PolyMapError::Syntax {
                        pos,
                        msg: "expected a non-negative integer exponent".into(),
                    })
                }
            };
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<ComplexPoly, PolyMapError> {
        let (tok, pos) = self.bump();
        let n = self.nvars;
        match tok {
            Tok::Num(q) => Ok(ComplexPoly::real(Poly::constant(n, q))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name, pos),
            Tok::End => Err(PolyMapError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
            Tok::Sym(c) => Err(PolyMapError::Syntax {
                pos,
                msg: format!("unexpected `{c}`"),
            }),
        }
    }

    fn ident(&mut self, name: String, pos: usize) -> Result<ComplexPoly, PolyMapError> {
        let n = self.nvars;
        let unknown = || PolyMapError::UnknownVariable {
            name: name.clone(),
            pos,
        };
        if self.complex {
            match name.as_str() {
                "i" => return Ok(ComplexPoly::imaginary_unit(n)),
                "z1" => return Ok(ComplexPoly::complex_var(n, 0, 1)),
                "z2" => return Ok(ComplexPoly::complex_var(n, 2, 3)),
                "Re" | "Im" | "conj" => {
                    self.expect('(')?;
                    let e = self.expr()?;
                    self.expect(')')?;
                    return Ok(match name.as_str() {
                        "Re" => ComplexPoly::real(e.re),
                        "Im" => ComplexPoly::real(e.im),
                        _ => e.conj(),
                    });
                }
                _ => {}
            }
        }
        if let Some(idx) = name.strip_prefix('x') {
            if let Ok(k) = idx.parse::<usize>() {
                if (1..=n).contains(&k) && !idx.starts_with('0') {
                    return Ok(ComplexPoly::real(Poly::var(n, k - 1)));
                }
            }
        }
        Err(unknown())
    }
}

fn as_real_constant(p: &ComplexPoly) -> Option<BigRational> {
    if !p.im.is_zero() {
        return None;
    }
    match p.re.total_degree() {
        None => Some(BigRational::zero()),
        Some(0) => Some(p.re.constant_term()),
        _ => None,
    }
}

/// Highest `x<k>` index mentioned in the source, used to infer `nvars`.
fn infer_nvars(toks: &[(Tok, usize)]) -> usize {
    toks.iter()
        .filter_map(|(t, _)| match t {
            Tok::Ident(s) => s.strip_prefix('x').and_then(|k| k.parse::<usize>().ok()),
            _ => None,
        })
        .max()
        .unwrap_or(1)
        .max(1)
}

/// Parses a germ source into a [`PolyMap`].
pub fn parse_polymap(source: &str, mode: ParseMode) -> Result<PolyMap, PolyMapError> {
    let toks = lex(source)?;
    let (nvars, complex) = match mode {
        ParseMode::Real { nvars } => (nvars.unwrap_or_else(|| infer_nvars(&toks)), false),
        ParseMode::Complex => (4, true),
    };
    let mut p = Parser {
        toks,
        at: 0,
        nvars,
        complex,
    };
    let (c0, c1) = if complex {
        let e = p.expr()?;
        (e.re, e.im)
    } else {
        let a = p.expr()?;
        p.expect(';')?;
        let b = p.expr()?;
        for (k, c) in [&a, &b].into_iter().enumerate() {
            if !c.is_real() {
                return Err(PolyMapError::Syntax {
                    pos: 0,
                    msg: format!("component {} is not real", k + 1),
                });
            }
        }
        (a.re, b.re)
    };
    if *p.peek() != Tok::End {
        return p.syntax("trailing input");
    }
    PolyMap::new([c0, c1], None)
}

/// Parses a single real expression (no `;`).
pub fn parse_poly(source: &str, nvars: usize) -> Result<Poly, PolyMapError> {
    let toks = lex(source)?;
    let mut p = Parser {
        toks,
        at: 0,
        nvars,
        complex: false,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax("trailing input");
    }
    Ok(e.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polymap::rational;

    fn real4(src: &str) -> Result<PolyMap, PolyMapError> {
        parse_polymap(src, ParseMode::Real { nvars: Some(4) })
    }

    #[test]
    fn identity_like_germ() {
        let m = real4("x1 ; x2").unwrap();
        assert_eq!(m.nvars(), 4);
        assert_eq!(m.components()[0], Poly::var(4, 0));
        assert_eq!(m.components()[1], Poly::var(4, 1));
    }

    #[test]
    fn constant_term_is_rejected() {
        assert_eq!(
            real4("x1 + 1 ; x2").unwrap_err(),
            PolyMapError::ConstantTerm { component: 1 }
        );
        // a constant that cancels is fine
        assert!(real4("x1 + 1 - 1 ; x2").is_ok());
    }

    #[test]
    fn unknown_variables() {
        assert!(matches!(
            real4("x5 ; x1").unwrap_err(),
            PolyMapError::UnknownVariable { ref name, pos: 0 } if name == "x5"
        ));
        assert!(matches!(
            real4("x1 ; z1").unwrap_err(),
            PolyMapError::UnknownVariable { .. }
        ));
        assert!(matches!(
            real4("x1 ; x0").unwrap_err(),
            PolyMapError::UnknownVariable { .. }
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match real4("x1 + * x2 ; x1").unwrap_err() {
            PolyMapError::Syntax { pos, .. } => assert_eq!(pos, 5),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(real4("x1 ; x2 )"), Err(PolyMapError::Syntax { .. })));
        assert!(matches!(real4("x1"), Err(PolyMapError::Syntax { .. })));
        assert!(matches!(real4("x1/x2 ; x1"), Err(PolyMapError::Syntax { .. })));
    }

    #[test]
    fn decimals_and_fractions_are_exact() {
        let m = real4("0.25*x1 + 3/4*x2 ; x1").unwrap();
        let expect = Poly::var(4, 0)
            .scale(&rational(1, 4))
            .add(&Poly::var(4, 1).scale(&rational(3, 4)));
        assert_eq!(m.components()[0], expect);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let m = real4("-x1^2 ; x1*-x2").unwrap();
        assert_eq!(m.components()[0], Poly::var(4, 0).pow(2).neg());
        assert_eq!(m.components()[1], Poly::var(4, 0).mul(&Poly::var(4, 1)).neg());
    }

    #[test]
    fn complex_front_end_lowers_exactly() {
        // z1 * conj(z1) = x1^2 + x2^2, purely real
        let m = parse_polymap("z1*conj(z1) + i*Re(z2^2)", ParseMode::Complex).unwrap();
        let x = |k| Poly::var(4, k);
        assert_eq!(m.components()[0], x(0).pow(2).add(&x(1).pow(2)));
        assert_eq!(m.components()[1], x(2).pow(2).sub(&x(3).pow(2)));
    }

    #[test]
    fn rudolph_source_in_complex_mode() {
        let m = parse_polymap(
            "z2^3 - 3*(x1^2+x2^2)*(1+i*x2)*z2 - 2*x1",
            ParseMode::Complex,
        )
        .unwrap();
        // independent float evaluation of the complex formula
        let x = [0.3, -0.2, 0.15, 0.4];
        let z2 = num_complex::Complex64::new(x[2], x[3]);
        let r = x[0] * x[0] + x[1] * x[1];
        let v = z2.powi(3) - 3.0 * r * num_complex::Complex64::new(1.0, x[1]) * z2 - 2.0 * x[0];
        let (a, b) = m.eval(&x);
        assert!((a - v.re).abs() < 1e-14 && (b - v.im).abs() < 1e-14);
    }

    #[test]
    fn inferred_variable_count() {
        let m = parse_polymap("x1*x6 ; x2", ParseMode::Real { nvars: None }).unwrap();
        assert_eq!(m.nvars(), 6);
    }

    #[test]
    fn printed_form_reparses() {
        let m = real4("(x1 - 2/3*x2)^3 - x3*x4 ; -x2^2 + 5*x1*x3").unwrap();
        let again = real4(&m.to_source()).unwrap();
        assert_eq!(m, again);
    }
}
