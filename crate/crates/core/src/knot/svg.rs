//! SVG rendering of a planar diagram with gaps at the under-passages.

use std::fmt::Write;

use super::diagram::Diagram;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 24.0;

/// Renders the diagram as a standalone SVG document.
pub fn render(d: &Diagram) -> String {
    let n = d.plane.len();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &d.plane {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-300);
    let s = (SIZE - 2.0 * MARGIN) / span;
    let map = |p: [f64; 2]| [MARGIN + (p[0] - lo[0]) * s, SIZE - MARGIN - (p[1] - lo[1]) * s];
    let total_len: f64 = (0..n)
        .map(|i| {
            let a = map(d.plane[i]);
            let b = map(d.plane[(i + 1) % n]);
            (b[0] - a[0]).hypot(b[1] - a[1])
        })
        .sum();
    // gap half-width as a fraction of the curve parameter range
    let gap = 8.0 / total_len.max(1.0) * n as f64;
    let mut cuts: Vec<f64> = d.sites.iter().map(|c| c.under_param).collect();
    cuts.sort_by(f64::total_cmp);

    let in_gap = |t: f64| {
        cuts.iter().any(|&c| {
            let dt = (t - c).abs();
            dt.min(n as f64 - dt) < gap
        })
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let samples = 8;
    let mut path = String::new();
    let mut pen_down = false;
    for i in 0..=n {
        for k in 0..samples {
            let t = i as f64 + k as f64 / samples as f64;
            if t > n as f64 {
                break;
            }
            let a = d.plane[i % n];
            let b = d.plane[(i + 1) % n];
            let f = k as f64 / samples as f64;
            let p = map([a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]);
            if in_gap(t) {
                pen_down = false;
                continue;
            }
            let _ = write!(path, "{}{:.2},{:.2} ", if pen_down { "L" } else { "M" }, p[0], p[1]);
            pen_down = true;
        }
    }
    let _ = writeln!(
        out,
        r#"<path d="{}" fill="none" stroke="black" stroke-width="2" stroke-linejoin="round"/>"#,
        path.trim_end()
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knot::diagram::{extract_diagram, DiagramOptions};
    use std::f64::consts::TAU;

    #[test]
    fn trefoil_svg_is_well_formed() {
        let curve: Vec<[f64; 3]> = (0..300)
            .map(|k| {
                let t = TAU * k as f64 / 300.0;
                [t.sin() + 2.0 * (2.0 * t).sin(), t.cos() - 2.0 * (2.0 * t).cos(), -(3.0 * t).sin()]
            })
            .collect();
        let d = extract_diagram(&curve, &[0.0, 0.0, 1.0], &DiagramOptions::default()).unwrap();
        let svg = render(&d);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        // three under-passages give at least three breaks in the stroke
        assert!(svg.matches('M').count() >= 3);
    }
}
