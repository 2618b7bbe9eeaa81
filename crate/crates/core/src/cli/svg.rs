use std::fmt::Write;

use crate::clustering::ElbowCurve;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

/// SSE-versus-k line plot; the knee, when given, is drawn as a red marker.
pub fn elbow_svg(curve: &ElbowCurve, knee: Option<usize>) -> String {
    let e = &curve.entries;
    let k_lo = e.first().map_or(0, |x| x.0) as f64;
    let k_hi = e.last().map_or(1, |x| x.0) as f64;
    let s_hi = e.iter().map(|x| x.1).fold(0.0, f64::max);
    let x_span = if k_hi > k_lo { k_hi - k_lo } else { 1.0 };
    let y_span = if s_hi > 0.0 { s_hi } else { 1.0 };
    let px = |k: f64| MARGIN + (k - k_lo) / x_span * (WIDTH - 2.0 * MARGIN);
    let py = |s: f64| HEIGHT - MARGIN - s / y_span * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN);
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.1},{y1:.1} L{x0:.1},{y0:.1} L{x1:.1},{y0:.1}" stroke="black" fill="none"/>"#
    );
    for (k, _) in e {
        let x = px(*k as f64);
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{:.1}" font-size="12" text-anchor="middle">{k}</text>"#,
            y0 + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">k</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.1}" font-size="13" transform="rotate(-90 14 {:.1})" text-anchor="middle">SSE</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{s_hi:.3e}</text>"#,
        x0 - 4.0,
        y1 + 4.0
    );

    let points: Vec<String> = e
        .iter()
        .map(|(k, s)| format!("{:.1},{:.1}", px(*k as f64), py(*s)))
        .collect();
    let _ = writeln!(
        svg,
        r#"<polyline points="{}" stroke="steelblue" stroke-width="2" fill="none"/>"#,
        points.join(" ")
    );
    for (k, s) in e {
        let fill = if Some(*k) == knee { "crimson" } else { "steelblue" };
        let r = if Some(*k) == knee { 6 } else { 3 };
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.1}" cy="{:.1}" r="{r}" fill="{fill}"/>"#,
            px(*k as f64),
            py(*s)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marks_the_knee() {
        let c = ElbowCurve {
            entries: vec![(1, 100.0), (2, 10.0), (3, 9.0)],
        };
        let svg = elbow_svg(&c, Some(2));
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("crimson").count(), 1);
        assert_eq!(svg, elbow_svg(&c, Some(2)));
    }
}
