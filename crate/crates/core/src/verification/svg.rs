//! Standalone SVG renderings of ratio fields and needle profiles.

use std::fmt::Write;

use crate::geometry::{BoundingBox, Point2};

const SIZE: f64 = 480.0;
const PAD: f64 = 40.0;

fn header(title: &str) -> String {
    let w = SIZE + 2.0 * PAD;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        h = w + 30.0
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{PAD}" y="24" font-family="sans-serif" font-size="14">{}</text>"#, escape(title));
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Blue → red color for `u ∈ [0, 1]`.
fn color(u: f64) -> String {
    let u = u.clamp(0.0, 1.0);
    let r = (255.0 * u) as u8;
    let b = (255.0 * (1.0 - u)) as u8;
    let g = (255.0 * (1.0 - (2.0 * u - 1.0).abs()) * 0.6) as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

/// Scatter heatmap of `log10(value)` at the given points.
pub fn heatmap(points: &[(Point2, f64)], title: &str) -> String {
    let mut s = header(title);
    if points.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let bb = BoundingBox::from_points(points.iter().map(|p| p.0)).expect("points are non-empty");
    let span = bb.width().max(bb.height()).max(f64::MIN_POSITIVE);
    let logs: Vec<f64> = points.iter().map(|p| p.1.max(f64::MIN_POSITIVE).log10()).collect();
    let lo = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let range = (hi - lo).max(1e-12);
    let top = PAD + 10.0;
    for ((p, _), l) in points.iter().zip(&logs) {
        let cx = PAD + (p.x - bb.min.x) / span * SIZE;
        let cy = top + SIZE - (p.y - bb.min.y) / span * SIZE;
        let _ = writeln!(s, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="4" fill="{}"/>"#, color((l - lo) / range));
    }
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="{y}" font-family="sans-serif" font-size="12">log10 range [{lo:.3}, {hi:.3}]</text>"#,
        y = top + SIZE + 24.0
    );
    s.push_str("</svg>\n");
    s
}

/// `|P|` (solid) against `c·envelope` (dashed) on a log scale, ordered by coordinate.
pub fn profile(samples: &[(f64, f64, f64)], constant: f64, title: &str) -> String {
    let mut s = header(title);
    let mut pts: Vec<(f64, f64, f64)> = samples.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let floor = 1e-16;
    let (x0, x1) = (pts[0].0, pts[pts.len() - 1].0);
    let ys = pts.iter().flat_map(|p| [p.1.max(floor).log10(), (constant * p.2).max(floor).log10()]);
    let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    let (xr, yr) = ((x1 - x0).max(1e-12), (hi - lo).max(1e-12));
    let top = PAD + 10.0;
    let map = |x: f64, y: f64| (PAD + (x - x0) / xr * SIZE, top + SIZE - (y.max(floor).log10() - lo) / yr * SIZE);
    let line = |f: &dyn Fn(&(f64, f64, f64)) -> f64| {
        pts.iter()
            .map(|p| {
                let (a, b) = map(p.0, f(p));
                format!("{a:.2},{b:.2}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(s, r#"<polyline fill="none" stroke="black" stroke-width="1" points="{}"/>"#, line(&|p| p.1));
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="red" stroke-dasharray="4 3" stroke-width="1" points="{}"/>"#,
        line(&|p| constant * p.2)
    );
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="{y}" font-family="sans-serif" font-size="12">coordinate [{x0:.3}, {x1:.3}], log10 [{lo:.2}, {hi:.2}], c = {constant:.3}</text>"#,
        y = top + SIZE + 24.0
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_points() {
        let s = heatmap(&[(Point2::new(0.0, 0.0), 1.0), (Point2::new(1.0, 1.0), 10.0)], "n = 4");
        assert!(s.starts_with("<svg"));
        assert_eq!(s.matches("<circle").count(), 2);
        let p = profile(&[(0.0, 1.0, 1.0), (1.0, 0.1, 0.2)], 2.0, "radial");
        assert_eq!(p.matches("<polyline").count(), 2);
    }
}
