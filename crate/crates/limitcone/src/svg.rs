//! Static SVG rendering of a projectivized cone in the barycentric triangle.
//!
//! The simplex maps to an equilateral triangle of side 1000 units. Output is
//! deterministic: the same bundle renders to byte-identical files. Points
//! are clamped only at drawing time, never in the data.

use std::fmt::Write;

use crate::report::ReportBundle;

const SIDE: f64 = 1000.0;
const H: f64 = 866.025_403_784_438_6; // SIDE * sqrt(3)/2

fn chart(bary: &[f64; 3]) -> (f64, f64) {
    let x = (bary[1] + bary[2] / 2.0) * SIDE;
    let y = bary[2] * H;
    (x, H - y) // svg y grows downward
}

fn fmt(v: f64) -> String {
    let c = v.clamp(-2000.0, 3000.0);
    format!("{c:.3}")
}

/// Renders the hull, vertex labels and a deterministic subsample of cloud
/// points (azimuthal facets solid, non-azimuthal dashed).
pub fn render(bundle: &ReportBundle, cloud: &[[f64; 3]]) -> String {
    let mut s = String::new();
    s.push_str(r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="-90 -50 1180 1010" font-family="monospace" font-size="16">"#);
    s.push('\n');
    // chamber triangle with labelled corners
    let corners = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let cpts: Vec<(f64, f64)> = corners.iter().map(chart).collect();
    let _ = writeln!(
        s,
        r##"<polygon points="{},{} {},{} {},{}" fill="none" stroke="#333" stroke-width="1.5"/>"##,
        fmt(cpts[0].0),
        fmt(cpts[0].1),
        fmt(cpts[1].0),
        fmt(cpts[1].1),
        fmt(cpts[2].0),
        fmt(cpts[2].1)
    );
    let labels = ["[1:0:0]", "[0:1:0]", "[0:0:1]"];
    let offsets = [(-85.0, 20.0), (12.0, 20.0), (-35.0, -12.0)];
    for k in 0..3 {
        let _ = writeln!(
            s,
            r##"<text x="{}" y="{}" fill="#333">{}</text>"##,
            fmt(cpts[k].0 + offsets[k].0),
            fmt(cpts[k].1 + offsets[k].1),
            labels[k]
        );
    }
    // cloud dots (deterministic subsample)
    if !cloud.is_empty() {
        let step = cloud.len().div_ceil(4000);
        for p in cloud.iter().step_by(step) {
            let (x, y) = chart(p);
            let _ = writeln!(s, r##"<circle cx="{}" cy="{}" r="1" fill="#999" fill-opacity="0.55"/>"##, fmt(x), fmt(y));
        }
    }
    // hull vertices and facets
    let verts: Vec<[f64; 3]> = bundle
        .hull
        .vertices
        .iter()
        .map(|v| {
            let mut b = [0.0f64; 3];
            for k in 0..3 {
                b[k] = v.bary[k]
                    .to_scalar()
                    .map(|sc| sc.to_f64())
                    .unwrap_or(0.0);
            }
            b
        })
        .collect();
    for f in &bundle.hull.facets {
        let (x0, y0) = chart(&verts[f.v0]);
        let (x1, y1) = chart(&verts[f.v1]);
        let style = if f.azimuthal {
            r##"stroke="#1b7837" stroke-width="2""##
        } else {
            r##"stroke="#c0392b" stroke-width="2" stroke-dasharray="8,5""##
        };
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" {}/>"#,
            fmt(x0),
            fmt(y0),
            fmt(x1),
            fmt(y1),
            style
        );
    }
    let label_step = if verts.is_empty() { 1 } else { verts.len().div_ceil(48) };
    for (i, v) in verts.iter().enumerate() {
        let (x, y) = chart(v);
        let _ = writeln!(s, r##"<circle cx="{}" cy="{}" r="3" fill="#1b4f72"/>"##, fmt(x), fmt(y));
        if i % label_step == 0 {
            let _ = writeln!(
                s,
                r##"<text x="{}" y="{}" fill="#1b4f72" font-size="12">{}</text>"##,
                fmt(x + 6.0),
                fmt(y - 6.0),
                bundle.hull.vertices[i].curve_id
            );
        }
    }
    let _ = writeln!(
        s,
        r##"<text x="-80" y="-28" fill="#333">{} — {}</text>"##,
        bundle.scenario, bundle.hull.verdict
    );
    s.push_str("</svg>\n");
    s
}
