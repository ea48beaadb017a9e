//! Deterministic SVG pictures of fronts.

use std::fmt::Write as _;

use crate::front::{FrontDiagram, Knot};
use crate::morse::CriticalPair;

const SAMPLES_PER_PIECE: usize = 12;

struct View {
    width: f64,
    height: f64,
    margin: f64,
    z_lo: f64,
    z_hi: f64,
}

impl View {
    fn x(&self, q: f64) -> f64 {
        self.margin + q * (self.width - 2.0 * self.margin)
    }

    fn y(&self, z: f64) -> f64 {
        let t = (z - self.z_lo) / (self.z_hi - self.z_lo);
        self.height - self.margin - t * (self.height - 2.0 * self.margin)
    }
}

fn piece_points(a: &Knot, b: &Knot, out: &mut Vec<(f64, f64)>) {
    for s in 1..=SAMPLES_PER_PIECE {
        let q = a.q + (b.q - a.q) * s as f64 / SAMPLES_PER_PIECE as f64;
        out.push((q, crate::front::hermite(a, b, q).0));
    }
}

/// Strand 0 and strand 1 as stroke classes `strand0`/`strand1`, with markers of class
/// `cusp`, `crossing` and (when `pairs` is given) `critical`.
pub fn render_svg(d: &FrontDiagram, width: u32, pairs: Option<&[CriticalPair]>) -> String {
    let (mut z_lo, mut z_hi) = (0.0f64, 0.0f64);
    for a in &d.arcs {
        for k in &a.knots {
            z_lo = z_lo.min(k.z);
            z_hi = z_hi.max(k.z);
        }
    }
    let pad = 0.05 * (z_hi - z_lo).max(1e-9);
    let w = width.max(16) as f64;
    let view = View { width: w, height: (w / 2.0).round(), margin: 10.0, z_lo: z_lo - pad, z_hi: z_hi + pad };
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        view.width, view.height, view.width, view.height
    )
    .unwrap();
    s.push_str(
        "<style>.strand0{stroke:#1f5fa8;fill:none;stroke-width:1.5}.strand1{stroke:#b0302a;fill:none;stroke-width:1.5}\
         .cusp{fill:#000}.crossing{fill:none;stroke:#555}.critical{fill:#2a8a3a}</style>\n",
    );
    writeln!(s, r##"<rect x="0" y="0" width="{}" height="{}" fill="#fff"/>"##, view.width, view.height).unwrap();
    for a in &d.arcs {
        let mut pts = vec![(a.knots[0].q, a.knots[0].z)];
        for w in a.knots.windows(2) {
            piece_points(&w[0], &w[1], &mut pts);
        }
        let mut path = String::new();
        for (i, (q, z)) in pts.iter().enumerate() {
            let _ = write!(path, "{}{:.2} {:.2}", if i == 0 { "M" } else { " L" }, view.x(*q), view.y(*z));
        }
        writeln!(s, r#"<path class="strand{}" data-arc="{}" d="{}"/>"#, a.strand, a.id, path).unwrap();
    }
    for c in &d.cusps {
        writeln!(s, r#"<circle class="cusp" cx="{:.2}" cy="{:.2}" r="2"/>"#, view.x(c.q), view.y(c.z)).unwrap();
    }
    for (q, z) in d.strand_crossings(4096) {
        writeln!(s, r#"<circle class="crossing" cx="{:.2}" cy="{:.2}" r="3"/>"#, view.x(q), view.y(z)).unwrap();
    }
    if let Some(pairs) = pairs {
        for p in pairs {
            let z1 = d.arcs[p.arc1].eval(p.q).0;
            writeln!(
                s,
                r#"<rect class="critical" x="{:.2}" y="{:.2}" width="4" height="4" data-index="{}"/>"#,
                view.x(p.q) - 2.0,
                view.y(z1) - 2.0,
                p.shifted_index
            )
            .unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::build_front;
    use crate::notation::parse_link_expr;

    fn svg(e: &str) -> String {
        render_svg(&build_front(&parse_link_expr(e).unwrap()).unwrap(), 800, None)
    }

    #[test]
    fn marker_counts() {
        let zero = svg("(0)");
        assert_eq!(zero.matches(r#"class="cusp""#).count(), 0);
        assert_eq!(zero.matches(r#"class="crossing""#).count(), 0);
        let s = svg("(4,3,2)");
        assert_eq!(s.matches(r#"class="crossing""#).count(), 6);
        assert_eq!(s.matches(r#"class="cusp""#).count(), 6);
    }

    #[test]
    fn byte_stable() {
        assert_eq!(svg("(2,2,4,1,2)"), svg("(2,2,4,1,2)"));
    }
}
