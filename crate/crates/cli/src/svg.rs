//! Plain-text SVG of a region: unit circle, eigenvalues, chords, boundary.

use std::fmt::Write;

use rankrange_core::region::boundary_samples;
use rankrange_core::{Complex64, EigenSystem64, OmegaRegion64};

const SCALE: f64 = 200.0;
const BOUNDARY_SAMPLES: usize = 256;

/// Maps the complex plane to SVG user units (y grows downwards).
fn px(z: Complex64) -> (f64, f64) {
    (z.re * SCALE, -z.im * SCALE)
}

pub fn render(es: &EigenSystem64, region: &OmegaRegion64) -> String {
    let half = 1.2 * SCALE;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.1} {:.1} {:.1} {:.1}" width="480" height="480">"#,
        -half,
        -half,
        2.0 * half,
        2.0 * half
    );
    let _ = writeln!(
        out,
        "<title>rank-{} region, N = {}</title>",
        region.k,
        es.dim()
    );
    let _ = writeln!(
        out,
        r##"<circle cx="0" cy="0" r="{SCALE:.1}" fill="none" stroke="#444" stroke-width="1"/>"##
    );

    match boundary_samples(region, BOUNDARY_SAMPLES) {
        Ok(points) => {
            let list: Vec<String> = points
                .iter()
                .map(|&z| {
                    let (x, y) = px(z);
                    format!("{x:.4},{y:.4}")
                })
                .collect();
            let _ = writeln!(
                out,
                r##"<polygon class="region" points="{}" fill="#4a90d9" fill-opacity="0.35" stroke="#1f5fa8" stroke-width="1.5"/>"##,
                list.join(" ")
            );
        }
        Err(_) => {
            let _ = writeln!(out, "<!-- empty region -->");
        }
    }

    for c in region.half_planes() {
        let (x1, y1) = px(c.endpoint_a);
        let (x2, y2) = px(c.endpoint_b);
        let _ = writeln!(
            out,
            r##"<line class="chord" x1="{x1:.4}" y1="{y1:.4}" x2="{x2:.4}" y2="{y2:.4}" stroke="#999" stroke-width="0.8"/>"##
        );
    }
    for (j, z) in es.eigenvalues().into_iter().enumerate() {
        let (x, y) = px(z);
        let _ = writeln!(
            out,
            r##"<circle class="eigenvalue" cx="{x:.4}" cy="{y:.4}" r="3.5" fill="#c0392b"><title>{}</title></circle>"##,
            j + 1
        );
    }
    out.push_str("</svg>\n");
    out
}
