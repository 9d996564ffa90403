//! Alexander polynomial from a PD code via the Fox Jacobian of the
//! Wirtinger presentation.
//!
//! Wirtinger generators are the over-arcs: edges glued together wherever
//! they pass over a crossing. Each crossing contributes one relation; its
//! Fox derivatives abelianised at `t` give the row
//!
//! * positive: over `1 - t`, incoming under `t`, outgoing under `-1`
//! * negative: over `1 - t`, incoming under `-1`, outgoing under `t`
//!
//! Deleting one row and one column and taking the determinant yields the
//! polynomial up to a unit `±t^k`.

use super::bareiss::determinant;
use super::laurent::LaurentPoly;
use super::pd::PDCode;
use crate::error::KnotError;

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let n = parent[y];
        parent[y] = r;
        y = n;
    }
    r
}

/// Over-arc index of every edge label (index 0 unused) and the arc count.
fn wirtinger_arcs(pd: &PDCode) -> (Vec<usize>, usize) {
    let m = pd.edge_count();
    let mut parent: Vec<usize> = (0..=m).collect();
    for c in &pd.crossings {
        let (a, b) = c.over();
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let mut index = vec![usize::MAX; m + 1];
    let mut count = 0;
    let mut arc_of = vec![0; m + 1];
    for e in 1..=m {
        let r = find(&mut parent, e);
        if index[r] == usize::MAX {
            index[r] = count;
            count += 1;
        }
        arc_of[e] = index[r];
    }
    (arc_of, count)
}

/// The crossings × arcs Alexander matrix.
pub fn alexander_matrix(pd: &PDCode) -> Vec<Vec<LaurentPoly>> {
    let (arc_of, arcs) = wirtinger_arcs(pd);
    let one_minus_t = LaurentPoly::from_coeffs(&[1, -1]);
    let t = LaurentPoly::monomial(1, 1);
    let minus_one = LaurentPoly::monomial(-1, 0);
    pd.crossings
        .iter()
        .map(|c| {
            let mut row = vec![LaurentPoly::zero(); arcs];
            let over = arc_of[c.over().0];
            let inc = arc_of[c.incoming_under()];
            let out = arc_of[c.outgoing_under()];
            let (v_in, v_out) = if c.sign > 0 {
                (&t, &minus_one)
            } else {
                (&minus_one, &t)
            };
            row[over] = row[over].add(&one_minus_t);
            row[inc] = row[inc].add(v_in);
            row[out] = row[out].add(v_out);
            row
        })
        .collect()
}

/// Normalized Alexander polynomial of a connected diagram.
pub fn alexander(pd: &PDCode) -> Result<LaurentPoly, KnotError> {
    pd.validate()?;
    let pieces = pd.diagram_pieces();
    if pieces > 1 {
        return Err(KnotError::Disconnected(pieces));
    }
    if pd.crossings.is_empty() {
        return Ok(LaurentPoly::one());
    }
    let m = alexander_matrix(pd);
    let n = m.len();
    let minor: Vec<Vec<LaurentPoly>> = m
        .into_iter()
        .take(n - 1)
        .map(|row| row.into_iter().take(n - 1).collect())
        .collect();
    Ok(determinant(minor).normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::pd::{fixtures, Crossing};

    #[test]
    fn unknot_is_one() {
        assert_eq!(alexander(&PDCode::unknot()).unwrap(), LaurentPoly::one());
        assert_eq!(alexander(&PDCode::default()).unwrap(), LaurentPoly::one());
    }

    #[test]
    fn trefoil() {
        assert_eq!(
            alexander(&fixtures::trefoil()).unwrap(),
            LaurentPoly::from_coeffs(&[1, -1, 1])
        );
    }

    #[test]
    fn figure_eight() {
        assert_eq!(
            alexander(&fixtures::figure_eight()).unwrap(),
            LaurentPoly::from_coeffs(&[1, -3, 1])
        );
    }

    #[test]
    fn curls_are_unknotted() {
        // under 1 -> 2, over 2 -> 1, in both handednesses
        for (labels, sign) in [([1, 1, 2, 2], 1), ([1, 2, 2, 1], -1)] {
            let pd = PDCode::new(vec![Crossing::new(labels, sign)]);
            pd.validate().unwrap();
            assert_eq!(alexander(&pd).unwrap(), LaurentPoly::one());
        }
    }

    #[test]
    fn split_diagram_is_rejected() {
        let mut pd = fixtures::trefoil();
        pd.free_loops = 1;
        assert_eq!(alexander(&pd).unwrap_err(), KnotError::Disconnected(2));
    }
}
