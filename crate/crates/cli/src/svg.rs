//! Minimal SVG rendering for persistence diagrams and ROC curves.

use std::fmt::Write as _;

use topcap_core::{EvalReport, PersistenceDiagramF64};

const SIZE: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

struct Frame {
    out: String,
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn new(title: &str, x_label: &str, y_label: &str, x_max: f64, y_max: f64) -> Self {
        let total = SIZE + 2.0 * MARGIN;
        let mut out = String::new();
        let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#);
        let _ = writeln!(out, r#"<rect x="0" y="0" width="{total}" height="{total}" fill="white"/>"#);
        let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, total / 2.0, escape(title));
        let (x0, y0, x1, y1) = (MARGIN, MARGIN + SIZE, MARGIN + SIZE, MARGIN);
        let _ = writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#);
        let _ = writeln!(out, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#);
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{x_label}</text>"#, total / 2.0, total - 12.0);
        let _ = writeln!(
            out,
            r#"<text x="14" y="{}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {})">{y_label}</text>"#,
            total / 2.0,
            total / 2.0
        );
        let _ = writeln!(out, r#"<text x="{x0}" y="{}" text-anchor="middle" font-size="10">0</text>"#, y0 + 14.0);
        let _ = writeln!(out, r#"<text x="{x1}" y="{}" text-anchor="middle" font-size="10">{x_max:.3}</text>"#, y0 + 14.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end" font-size="10">{y_max:.3}</text>"#, x0 - 4.0, y1 + 4.0);
        Frame { out, x_max, y_max }
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + SIZE * v / self.x_max
    }

    fn y(&self, v: f64) -> f64 {
        MARGIN + SIZE - SIZE * v / self.y_max
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Birth against lifetime, one circle per finite point, with a dashed
/// `lifetime = birth` guide. Points that never die are triangles pinned to
/// the top margin.
pub fn diagram_svg(diagram: &PersistenceDiagramF64, title: &str) -> String {
    let finite: Vec<(f64, f64)> = diagram.points.iter().filter(|p| p.1.is_finite()).map(|&(b, d)| (b, d - b)).collect();
    let top = diagram
        .points
        .iter()
        .map(|p| p.0)
        .chain(finite.iter().map(|p| p.1))
        .fold(0.0, f64::max);
    let range = if top > 0.0 { top * 1.05 } else { 1.0 };
    let mut frame = Frame::new(title, "birth", "lifetime", range, range);
    let guide = format!(
        r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="gray" stroke-dasharray="4 4"/>"#,
        frame.x(0.0),
        frame.y(0.0),
        frame.x(range),
        frame.y(range)
    );
    frame.out.push_str(&guide);
    frame.out.push('\n');
    for &(b, l) in &finite {
        let (cx, cy) = (frame.x(b), frame.y(l));
        let _ = writeln!(frame.out, r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="3" fill="#1f77b4" fill-opacity="0.7"/>"##);
    }
    for p in diagram.points.iter().filter(|p| !p.1.is_finite()) {
        let (cx, cy) = (frame.x(p.0), MARGIN / 2.0 + 8.0);
        let _ = writeln!(
            frame.out,
            r##"<polygon points="{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}" fill="#d62728"/>"##,
            cx,
            cy - 5.0,
            cx - 5.0,
            cy + 4.0,
            cx + 5.0,
            cy + 4.0
        );
    }
    frame.finish()
}

/// All models' ROC curves on one chart, with the chance diagonal.
pub fn roc_svg(reports: &[EvalReport]) -> String {
    let mut frame = Frame::new("ROC", "false positive rate", "true positive rate", 1.0, 1.0);
    let chance = format!(
        r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="gray" stroke-dasharray="4 4"/>"#,
        frame.x(0.0),
        frame.y(0.0),
        frame.x(1.0),
        frame.y(1.0)
    );
    frame.out.push_str(&chance);
    frame.out.push('\n');
    for (i, report) in reports.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = report.roc.iter().map(|&(f, t)| format!("{:.3},{:.3}", frame.x(f), frame.y(t))).collect();
        let _ = writeln!(frame.out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, points.join(" "));
        let y = MARGIN + SIZE - 20.0 - 16.0 * i as f64;
        let _ = writeln!(
            frame.out,
            r#"<text x="{}" y="{y}" text-anchor="end" font-size="11" fill="{color}">{} (AUC {:.3})</text>"#,
            MARGIN + SIZE - 8.0,
            report.model,
            report.auc
        );
    }
    frame.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use topcap_core::PersistenceDiagram;

    #[test]
    fn one_circle_per_finite_point() {
        let d = PersistenceDiagram::new(1, vec![(0.1, 0.5), (0.2, 0.9), (0.3, 0.4)]);
        let svg = diagram_svg(&d, "three");
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("stroke-dasharray"));
    }

    #[test]
    fn empty_diagram_has_axes_only() {
        let svg = diagram_svg(&PersistenceDiagram::new(1, vec![]), "empty");
        assert_eq!(svg.matches("<circle").count(), 0);
        assert_eq!(svg.matches("<polygon").count(), 0);
        assert!(svg.matches("<line").count() >= 2);
    }

    #[test]
    fn essential_point_is_a_triangle_in_the_margin() {
        let svg = diagram_svg(&PersistenceDiagram::new(0, vec![(0.0, 0.5), (0.0, f64::INFINITY)]), "d0");
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("<polygon").count(), 1);
        let polygon = svg.lines().find(|l| l.starts_with("<polygon")).unwrap();
        let first_y: f64 = polygon.split('"').nth(1).unwrap().split(' ').next().unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert!(first_y < MARGIN);
    }
}
