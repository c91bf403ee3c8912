//! SVG 1.1 drawings of a coding's geometry.
//!
//! The left panel shows the plane of the torus: the unit square, the
//! fundamental domain and the kernel points. The right panel shows the
//! hexagon Π in (future, past) coordinates. Coordinates are printed with a
//! fixed number of decimals, so the output depends only on the input.

use std::fmt::Write;

use torcode::coding::TorusPoint;
use torcode::qfield::QuadExt;

use crate::commands::PlotData;

const PANEL: f64 = 360.0;
const MARGIN: f64 = 30.0;
const CAPTION: f64 = 60.0;

/// Affine map from a data bounding box into one panel, y pointing up.
struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
    left: f64,
}

impl Frame {
    fn fit(points: &[(f64, f64)], left: f64) -> Frame {
        let (mut lo_x, mut lo_y, mut hi_x, mut hi_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for &(x, y) in points {
            lo_x = lo_x.min(x);
            lo_y = lo_y.min(y);
            hi_x = hi_x.max(x);
            hi_y = hi_y.max(y);
        }
        let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-9);
        let scale = PANEL / span;
        // centre the box in the panel
        let x0 = lo_x - (span - (hi_x - lo_x)) / 2.0;
        let y0 = lo_y - (span - (hi_y - lo_y)) / 2.0;
        Frame {
            x0,
            y0,
            scale,
            left,
        }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            self.left + MARGIN + (x - self.x0) * self.scale,
            MARGIN + PANEL - (y - self.y0) * self.scale,
        )
    }

    fn path(&self, pts: &[(f64, f64)]) -> String {
        pts.iter()
            .map(|&p| {
                let (x, y) = self.map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn approx(v: &[(QuadExt, QuadExt)]) -> Vec<(f64, f64)> {
    v.iter().map(|(x, y)| (x.to_f64(), y.to_f64())).collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn render(data: &PlotData) -> String {
    let omega = approx(&data.domain.vertices);
    let hex = approx(&data.hexagon);
    let points = data
        .kernel
        .elements
        .clone()
        .unwrap_or_else(|| data.kernel.generators.clone());
    let dots: Vec<((f64, f64), String)> = points
        .iter()
        .map(|p| {
            let t = TorusPoint::from_rational(p, &data.spec.d());
            ((t.x.to_f64(), t.y.to_f64()), p.to_string())
        })
        .collect();

    let square = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let mut all: Vec<(f64, f64)> = omega.clone();
    all.extend(square);
    all.extend(dots.iter().map(|d| d.0));
    let left = Frame::fit(&all, 0.0);
    let right = Frame::fit(&hex, PANEL + 2.0 * MARGIN);

    let width = 2.0 * (PANEL + 2.0 * MARGIN);
    let height = PANEL + 2.0 * MARGIN + CAPTION;
    let spec = &data.spec;
    let area = data.domain.area.to_string();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#
    );
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(
        s,
        "<title>{}</title>",
        escape(&format!(
            "coding of {} with parameter ({}, {})",
            spec.matrix, spec.point.p, spec.point.q
        ))
    );
    let _ = writeln!(
        s,
        "<metadata>{}</metadata>",
        escape(&format!(
            "matrix={}; p={}; q={}; K={}; area={}; xi={}; eta={}",
            spec.matrix,
            spec.point.p,
            spec.point.q,
            spec.multiplicity,
            area,
            spec.point.xi,
            spec.point.eta
        ))
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#
    );

    let _ = writeln!(s, r#"<g id="torus">"#);
    let _ = writeln!(
        s,
        r##"<polygon id="unit-square" points="{}" fill="none" stroke="#888888" stroke-dasharray="4,3"/>"##,
        left.path(&square)
    );
    let _ = writeln!(
        s,
        r##"<polygon id="domain" points="{}" fill="#4a90d9" fill-opacity="0.25" stroke="#1f5fa8" stroke-width="1.5"/>"##,
        left.path(&omega)
    );
    for (p, label) in &dots {
        let (x, y) = left.map(*p);
        let _ = writeln!(
            s,
            r##"<circle cx="{x:.3}" cy="{y:.3}" r="3.5" fill="#c0392b"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-family="monospace" font-size="11">({})</text>"#,
            x + 5.0,
            y - 5.0,
            escape(label)
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g id="hexagon">"#);
    let _ = writeln!(
        s,
        r##"<polygon id="pi" points="{}" fill="#f5b041" fill-opacity="0.25" stroke="#b9770e" stroke-width="1.5"/>"##,
        right.path(&hex)
    );
    let _ = writeln!(s, "</g>");

    let base = PANEL + 2.0 * MARGIN + 20.0;
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN:.0}" y="{base:.0}" font-family="sans-serif" font-size="13">{}</text>"#,
        escape(&format!(
            "fundamental domain, area = {area} = K (K = {})",
            spec.multiplicity
        ))
    );
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN:.0}" y="{:.0}" font-family="sans-serif" font-size="13">{}</text>"#,
        base + 20.0,
        escape(&format!("kernel: {} point(s)", data.kernel.order))
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.0}" y="{base:.0}" font-family="sans-serif" font-size="13">hexagon Π (future, past coordinates)</text>"#,
        PANEL + 3.0 * MARGIN
    );
    s.push_str("</svg>\n");
    s
}
