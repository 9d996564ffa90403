//! Planar-diagram (PD) codes.
//!
//! Edges of the diagram are the pieces of the oriented curve between
//! consecutive crossing passages, labelled `1..=2n` along the orientation.
//! A crossing is `[a, b, c, d]`, read counterclockwise starting from the
//! incoming under-edge `a`; `c` is the outgoing under-edge and `b`, `d` are
//! the over-edges. The sign is `+1` for a right-handed crossing (the over
//! strand runs from `d` to `b`) and `-1` otherwise.

use serde::{Deserialize, Serialize};

use crate::error::KnotError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub labels: [usize; 4],
    pub sign: i8,
}

impl Crossing {
    pub fn new(labels: [usize; 4], sign: i8) -> Self {
        Crossing { labels, sign }
    }

    pub fn incoming_under(&self) -> usize {
        self.labels[0]
    }

    pub fn outgoing_under(&self) -> usize {
        self.labels[2]
    }

    /// `(incoming, outgoing)` over-edges.
    pub fn over(&self) -> (usize, usize) {
        if self.sign > 0 {
            (self.labels[3], self.labels[1])
        } else {
            (self.labels[1], self.labels[3])
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PDCode {
    pub crossings: Vec<Crossing>,
    /// Closed components that meet no crossing (drawn as bare circles).
    #[serde(default)]
    pub free_loops: usize,
}

impl PDCode {
    pub fn new(crossings: Vec<Crossing>) -> Self {
        PDCode {
            crossings,
            free_loops: 0,
        }
    }

    /// Diagram of a single circle with no crossings.
    pub fn unknot() -> Self {
        PDCode {
            crossings: Vec::new(),
            free_loops: 1,
        }
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn edge_count(&self) -> usize {
        2 * self.crossings.len()
    }

    /// Checks labels are `1..=2n`, each used exactly twice, each edge is
    /// entered once and left once, and signs are `±1`.
    pub fn validate(&self) -> Result<(), KnotError> {
        let m = self.edge_count();
        let mut seen = vec![0u8; m + 1];
        let mut heads = vec![0u8; m + 1];
        let mut tails = vec![0u8; m + 1];
        for (k, c) in self.crossings.iter().enumerate() {
            if c.sign != 1 && c.sign != -1 {
                return Err(KnotError::Malformed(format!("crossing {k} has sign {}", c.sign)));
            }
            for &l in &c.labels {
                if l == 0 || l > m {
                    return Err(KnotError::Malformed(format!("label {l} out of range 1..={m}")));
                }
                seen[l] += 1;
            }
            let (oi, oo) = c.over();
            heads[c.incoming_under()] += 1;
            heads[oi] += 1;
            tails[c.outgoing_under()] += 1;
            tails[oo] += 1;
        }
        for l in 1..=m {
            if seen[l] != 2 {
                return Err(KnotError::Malformed(format!("label {l} used {} times", seen[l])));
            }
            if heads[l] != 1 || tails[l] != 1 {
                return Err(KnotError::Malformed(format!(
                    "edge {l} is not entered and left exactly once"
                )));
            }
        }
        Ok(())
    }

    /// Successor of every edge along the orientation (index 0 unused).
    fn successors(&self) -> Vec<usize> {
        let mut next = vec![0; self.edge_count() + 1];
        for c in &self.crossings {
            next[c.incoming_under()] = c.outgoing_under();
            let (oi, oo) = c.over();
            next[oi] = oo;
        }
        next
    }

    /// Components of the link, as lists of edge labels.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let m = self.edge_count();
        let next = self.successors();
        let mut done = vec![false; m + 1];
        let mut out = Vec::new();
        for start in 1..=m {
            if done[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut e = start;
            while !done[e] {
                done[e] = true;
                comp.push(e);
                e = next[e];
            }
            out.push(comp);
        }
        out
    }

    /// Number of link components, counting free loops.
    pub fn link_components(&self) -> usize {
        self.components().len() + self.free_loops
    }

    /// Number of connected pieces of the diagram as a planar picture.
    pub fn diagram_pieces(&self) -> usize {
        let comps = self.components();
        let mut owner = vec![0; self.edge_count() + 1];
        for (k, c) in comps.iter().enumerate() {
            for &e in c {
                owner[e] = k;
            }
        }
        let mut parent: Vec<usize> = (0..comps.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for c in &self.crossings {
            let a = find(&mut parent, owner[c.labels[0]]);
            let b = find(&mut parent, owner[c.labels[1]]);
            parent[a] = b;
        }
        let roots = (0..comps.len())
            .filter(|&k| find(&mut parent, k) == k)
            .count();
        roots + self.free_loops
    }

    /// Writhe: sum of crossing signs.
    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|c| c.sign as i64).sum()
    }
}

/// Standard diagrams used as fixtures.
pub mod fixtures {
    use super::*;

    /// Right-handed trefoil (all crossings positive).
    pub fn trefoil() -> PDCode {
        PDCode::new(vec![
            Crossing::new([1, 5, 2, 4], 1),
            Crossing::new([3, 1, 4, 6], 1),
            Crossing::new([5, 3, 6, 2], 1),
        ])
    }

    /// The standard alternating 4-crossing figure-eight diagram.
    pub fn figure_eight() -> PDCode {
        PDCode::new(vec![
            Crossing::new([4, 2, 5, 1], 1),
            Crossing::new([8, 6, 1, 5], 1),
            Crossing::new([6, 3, 7, 4], -1),
            Crossing::new([2, 7, 3, 8], -1),
        ])
    }
}
