//! Fraction-free (Bareiss) determinants over integral domains.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// The ring operations Bareiss elimination needs. `exact_div` is only ever
/// called when the division is exact.
pub trait Domain: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn mul(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn exact_div(&self, d: &Self) -> Self;
}

impl Domain for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exact_div(&self, d: &Self) -> Self {
        debug_assert!(Zero::is_zero(&(self % d)));
        self / d
    }
}

/// Determinant of a square matrix given as rows.
pub fn determinant<T: Domain>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n), "matrix must be square");
    if n == 0 {
        return T::one();
    }
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.exact_div(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        d.neg()
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::laurent::LaurentPoly;

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    /// Permutation expansion, independent of elimination.
    fn leibniz(m: &[Vec<i64>]) -> i64 {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = m.len();
        perms(n)
            .into_iter()
            .map(|p| {
                let inv = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| p[i] > p[j])
                    .count();
                let s = if inv % 2 == 0 { 1 } else { -1 };
                s * (0..n).map(|i| m[i][p[i]]).product::<i64>()
            })
            .sum()
    }

    #[test]
    fn integer_matrices_match_leibniz() {
        let cases: Vec<Vec<Vec<i64>>> = vec![
            vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]],
            vec![vec![0, 1, 2], vec![3, 0, 1], vec![4, 5, 0]],
            vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]],
            vec![
                vec![3, 1, 4, 1],
                vec![5, 9, 2, 6],
                vec![5, 3, 5, 8],
                vec![9, 7, 9, 3],
            ],
        ];
        for c in cases {
            let rows: Vec<&[i64]> = c.iter().map(|r| r.as_slice()).collect();
            assert_eq!(determinant(ints(&rows)), BigInt::from(leibniz(&c)));
        }
    }

    #[test]
    fn polynomial_matrix() {
        // det [[1-t, t], [-1, 1-t]] = (1-t)^2 + t = t^2 - t + 1
        let a = LaurentPoly::from_coeffs(&[1, -1]);
        let t = LaurentPoly::monomial(1, 1);
        let m = vec![vec![a.clone(), t], vec![LaurentPoly::monomial(-1, 0), a]];
        assert_eq!(determinant(m), LaurentPoly::from_coeffs(&[1, -1, 1]));
    }

    #[test]
    fn empty_matrix_is_one() {
        assert_eq!(determinant::<BigInt>(vec![]), BigInt::from(1));
    }
}
