//! Diagrams, Alexander polynomials and cyclic-cover homology of traced loops.

pub mod alexander;
pub mod bareiss;
pub mod diagram;
pub mod fox;
pub mod laurent;
pub mod pd;
pub mod svg;

use serde::{Deserialize, Serialize};

use crate::error::KnotError;
pub use alexander::alexander;
pub use diagram::{auto_pole, extract_diagram, random_unit3, stereographic_project, Diagram, DiagramOptions};
pub use fox::{cover_homology, fox_order, fox_order_float, CoverHomology, FoxOrder};
pub use laurent::LaurentPoly;
pub use pd::{Crossing, PDCode};

/// Prime knots with at most five crossings whose Alexander polynomial is
/// not shared by another knot in that range.
const TABLE: &[(&str, &[i64])] = &[
    ("trefoil (3₁)", &[1, -1, 1]),
    ("figure-eight (4₁)", &[1, -3, 1]),
    ("cinquefoil (5₁)", &[1, -1, 1, -1, 1]),
    ("three-twist (5₂)", &[2, -3, 2]),
];

/// What the Alexander polynomial alone says about a knot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Identification {
    /// `Δ = 1`; the knot is not certified to be trivial.
    DeltaTrivial,
    /// `Δ` matches a tabulated knot; the knot is Alexander-consistent with it.
    Consistent { name: String },
    Unknown { delta: String },
}

impl Identification {
    pub fn label(&self) -> String {
        match self {
            Identification::DeltaTrivial => "Δ-trivial (unknot not certified)".into(),
            Identification::Consistent { name } => name.clone(),
            Identification::Unknown { delta } => format!("unknown({delta})"),
        }
    }

    /// The label with its qualifier spelled out.
    pub fn statement(&self) -> String {
        match self {
            Identification::Consistent { name } => format!("Alexander-consistent with {name}"),
            other => other.label(),
        }
    }
}

pub fn identify(delta: &LaurentPoly) -> Identification {
    let d = delta.normalized();
    if d == LaurentPoly::one() {
        return Identification::DeltaTrivial;
    }
    for (name, coeffs) in TABLE {
        if d == LaurentPoly::from_coeffs(coeffs) {
            return Identification::Consistent {
                name: (*name).to_string(),
            };
        }
    }
    Identification::Unknown {
        delta: d.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotOptions {
    /// Projection pole on the unit sphere; chosen automatically when absent.
    pub pole: Option<[f64; 4]>,
    /// View direction in `R^3`; chosen at random when absent.
    pub direction: Option<[f64; 3]>,
    pub seed: u64,
    pub diagram: DiagramOptions,
    /// Cover orders for which `|H_1|` is reported.
    pub cover_orders: Vec<u32>,
}

impl Default for KnotOptions {
    fn default() -> Self {
        KnotOptions {
            pole: None,
            direction: None,
            seed: 7,
            diagram: DiagramOptions::default(),
            cover_orders: (2..=6).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnotReport {
    pub pole: [f64; 4],
    pub diagram: Diagram,
    pub crossings: usize,
    pub writhe: i64,
    pub alexander: LaurentPoly,
    pub identification: Identification,
    pub covers: Vec<CoverHomology>,
}

/// Full knot analysis of one closed loop on a 3-sphere centred at 0.
pub fn analyze_loop(points: &[[f64; 4]], opts: &KnotOptions) -> Result<KnotReport, KnotError> {
    use rand::SeedableRng;
    let pole = opts
        .pole
        .unwrap_or_else(|| auto_pole(points, opts.seed, 64));
    let curve = stereographic_project(points, &pole)?;
    let direction = opts.direction.unwrap_or_else(|| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
        diagram::random_unit3(&mut rng)
    });
    let diagram = extract_diagram(&curve, &direction, &opts.diagram)?;
    let delta = alexander(&diagram.pd)?;
    Ok(KnotReport {
        pole,
        crossings: diagram.pd.crossing_count(),
        writhe: diagram.pd.writhe(),
        identification: identify(&delta),
        covers: opts
            .cover_orders
            .iter()
            .map(|&r| cover_homology(&delta, r))
            .collect(),
        alexander: delta,
        diagram,
    })
}
