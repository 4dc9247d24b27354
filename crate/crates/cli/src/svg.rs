//! SVG 1.1 drawings of the `k = 3` triangle: the lattice, a labeling with
//! its monochromatic cells, and a Voronoi-type partition.

use std::fmt::Write;

use serde::Serialize;
use sperner_core::geometry::VoronoiSpec;
use sperner_core::labeling::Labeling;
use sperner_core::lattice::SimplexLattice;

const SIDE: f64 = 400.0;
const MARGIN: f64 = 20.0;
const ROW: f64 = 0.866_025_403_784_438_6;
const COLORS: [&str; 3] = ["#d62728", "#1f77b4", "#ffbf00"];
const MONO_FILL: &str = "#2ca02c";
const NONMONO_FILL: &str = "#c7c7c7";

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RenderSummary {
    pub vertices: usize,
    pub up_triangles: usize,
    pub down_triangles: usize,
    pub mono: usize,
    pub nonmono: usize,
    pub voronoi_parts: usize,
}

/// Screen position of the barycentric point `x`: vertex 1 on top, vertex 2
/// bottom left, vertex 3 bottom right.
fn pos(x: [f64; 3]) -> (f64, f64) {
    (
        MARGIN + SIDE * (x[2] + x[0] / 2.0),
        MARGIN + SIDE * (1.0 - x[0]) * ROW,
    )
}

fn lattice_pos(a: [u32; 3], q: u32) -> (f64, f64) {
    let q = f64::from(q.max(1));
    pos(a.map(|c| f64::from(c) / q))
}

fn points(ps: &[(f64, f64)]) -> String {
    ps.iter()
        .map(|(x, y)| format!("{x:.3},{y:.3}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn header(out: &mut String) {
    let w = SIDE + 2.0 * MARGIN;
    let h = SIDE * ROW + 2.0 * MARGIN;
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.0} {h:.0}\">"
    );
}

fn base_triples(q: u32) -> Vec<[u32; 3]> {
    SimplexLattice::new(3, q)
        .map(|l| {
            l.iter()
                .map(|p| [p.coords()[0], p.coords()[1], p.coords()[2]])
                .collect()
        })
        .unwrap_or_default()
}

/// Draws `V(3,q)` with its up- and down-triangles. With a labeling, vertices
/// take their color and up-triangles are filled green when monochromatic and
/// gray otherwise.
pub fn render_lattice(q: u32, labeling: Option<&Labeling>) -> (String, RenderSummary) {
    let mut out = String::new();
    let mut summary = RenderSummary::default();
    header(&mut out);
    let ranked = labeling.map(|l| (l, l.lattice()));
    let color_of = |a: [u32; 3]| -> Option<u32> {
        ranked
            .as_ref()
            .map(|(l, lattice)| l.colors()[lattice.rank(&a)])
    };

    out.push_str("<g id=\"down-triangles\">\n");
    if q >= 2 {
        for b in base_triples(q - 2) {
            let vs = [
                [b[0] + 1, b[1] + 1, b[2]],
                [b[0] + 1, b[1], b[2] + 1],
                [b[0], b[1] + 1, b[2] + 1],
            ];
            let ps: Vec<_> = vs.iter().map(|&a| lattice_pos(a, q)).collect();
            let _ = writeln!(
                out,
                "<polygon class=\"down\" points=\"{}\" fill=\"#ffffff\" stroke=\"#555555\" stroke-width=\"1\"/>",
                points(&ps)
            );
            summary.down_triangles += 1;
        }
    }
    out.push_str("</g>\n<g id=\"up-triangles\">\n");
    if q >= 1 {
        for b in base_triples(q - 1) {
            let vs = [
                [b[0] + 1, b[1], b[2]],
                [b[0], b[1] + 1, b[2]],
                [b[0], b[1], b[2] + 1],
            ];
            let ps: Vec<_> = vs.iter().map(|&a| lattice_pos(a, q)).collect();
            let (class, fill) = match labeling {
                None => ("up", "#f5f5f5"),
                Some(_) => {
                    let c = vs.map(color_of);
                    if c[0] == c[1] && c[1] == c[2] {
                        summary.mono += 1;
                        ("up mono", MONO_FILL)
                    } else {
                        summary.nonmono += 1;
                        ("up nonmono", NONMONO_FILL)
                    }
                }
            };
            let _ = writeln!(
                out,
                "<polygon class=\"{class}\" points=\"{}\" fill=\"{fill}\" stroke=\"#555555\" stroke-width=\"1\"/>",
                points(&ps)
            );
            summary.up_triangles += 1;
        }
    }
    out.push_str("</g>\n<g id=\"vertices\">\n");
    let radius = (SIDE / f64::from(q.max(1)) / 8.0).clamp(1.5, 8.0);
    for a in base_triples(q) {
        let (x, y) = lattice_pos(a, q);
        let fill = match color_of(a) {
            Some(c) => COLORS[c as usize - 1],
            None => "#333333",
        };
        let _ = writeln!(
            out,
            "<circle class=\"vertex\" cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{radius:.3}\" fill=\"{fill}\" stroke=\"#000000\" stroke-width=\"0.5\"><title>{} {} {}</title></circle>",
            a[0], a[1], a[2]
        );
        summary.vertices += 1;
    }
    out.push_str("</g>\n</svg>\n");
    (out, summary)
}

/// Draws the three parts of the Voronoi-type partition with base point `z`
/// and the segments of its separating set.
pub fn render_voronoi(spec: &VoronoiSpec) -> (String, RenderSummary) {
    let z = spec.z().coords();
    let z = [z[0], z[1], z[2]];
    // where the boundary between parts i and j meets the edge x_l = 0
    let edge_point = |i: usize, j: usize| {
        let mut x = [0.0; 3];
        x[i] = (1.0 + z[i] - z[j]) / 2.0;
        x[j] = (1.0 - z[i] + z[j]) / 2.0;
        x
    };
    let mut out = String::new();
    header(&mut out);
    out.push_str("<g id=\"parts\">\n");
    for i in 0..3 {
        let (j, l) = ((i + 1) % 3, (i + 2) % 3);
        let mut corner = [0.0; 3];
        corner[i] = 1.0;
        let ps = [
            pos(corner),
            pos(edge_point(i, j)),
            pos(z),
            pos(edge_point(i, l)),
        ];
        let _ = writeln!(
            out,
            "<polygon class=\"part part-{}\" points=\"{}\" fill=\"{}\" fill-opacity=\"0.6\" stroke=\"none\"/>",
            i + 1,
            points(&ps),
            COLORS[i]
        );
    }
    out.push_str("</g>\n<g id=\"separating-set\">\n");
    for (i, j) in [(0, 1), (1, 2), (0, 2)] {
        let (a, b) = (pos(z), pos(edge_point(i, j)));
        let _ = writeln!(
            out,
            "<line class=\"separating\" x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"#000000\" stroke-width=\"2\"/>",
            a.0, a.1, b.0, b.1
        );
    }
    let corners = [
        pos([1.0, 0.0, 0.0]),
        pos([0.0, 1.0, 0.0]),
        pos([0.0, 0.0, 1.0]),
    ];
    let _ = writeln!(
        out,
        "</g>\n<polygon class=\"simplex\" points=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>",
        points(&corners)
    );
    out.push_str("</svg>\n");
    let summary = RenderSummary {
        voronoi_parts: 3,
        ..RenderSummary::default()
    };
    (out, summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sperner_core::labeling::first_choice;

    #[test]
    fn first_choice_drawing_counts() {
        let l = first_choice(3, 5).unwrap();
        let (svg, s) = render_lattice(5, Some(&l));
        assert_eq!((s.vertices, s.up_triangles, s.down_triangles), (21, 15, 10));
        assert_eq!((s.mono, s.nonmono), (10, 5));
        assert_eq!(svg.matches("<circle").count(), 21);
        assert_eq!(svg.matches("class=\"up mono\"").count(), 10);
    }

    #[test]
    fn unlabeled_lattice() {
        let (_, s) = render_lattice(1, None);
        assert_eq!((s.vertices, s.up_triangles, s.down_triangles), (3, 1, 0));
    }

    #[test]
    fn voronoi_edge_points_lie_on_the_boundary() {
        let (svg, s) = render_voronoi(&VoronoiSpec::barycenter(3));
        assert_eq!(s.voronoi_parts, 3);
        assert_eq!(svg.matches("class=\"separating\"").count(), 3);
    }
}
