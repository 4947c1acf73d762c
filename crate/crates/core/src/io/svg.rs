//! Static SVG plots of a profile and its comparison curves.

use crate::profile::ProfileCurve;
use std::fmt::Write;

const PANEL_W: f64 = 440.0;
const PANEL_H: f64 = 340.0;
const MARGIN: f64 = 48.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// A named polyline drawn over the profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Overlay {
    pub label: String,
    pub points: Vec<[f64; 2]>,
}

struct Panel {
    x0: f64,
    xmax: f64,
    ymax: f64,
}

impl Panel {
    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let x = self.x0 + MARGIN + (PANEL_W - 1.5 * MARGIN) * p[0] / self.xmax;
        let y = PANEL_H - MARGIN - (PANEL_H - 1.5 * MARGIN) * p[1] / self.ymax;
        (x, y)
    }

    fn polyline(&self, out: &mut String, pts: &[[f64; 2]], color: &str, dashed: bool) {
        let coords: Vec<String> = pts
            .iter()
            .filter(|p| p[1].is_finite() && p[1] <= self.ymax * 1.05)
            .map(|p| {
                let (x, y) = self.map(*p);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let dash = if dashed { " stroke-dasharray=\"5,4\"" } else { "" };
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"{dash} points=\"{}\"/>",
            coords.join(" ")
        );
    }

    fn axes(&self, out: &mut String, title: &str) {
        let (x0, y0) = self.map([0.0, 0.0]);
        let (x1, _) = self.map([self.xmax, 0.0]);
        let (_, y1) = self.map([0.0, self.ymax]);
        let _ = writeln!(
            out,
            "<path d=\"M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}\" stroke=\"#333\" fill=\"none\"/>"
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let (tx, _) = self.map([f * self.xmax, 0.0]);
            let (_, ty) = self.map([0.0, f * self.ymax]);
            let _ = writeln!(
                out,
                "<text x=\"{tx:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"middle\">{:.3}</text>",
                y0 + 14.0,
                f * self.xmax
            );
            let _ = writeln!(
                out,
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"end\">{:.3}</text>",
                x0 - 4.0,
                ty + 3.0,
                f * self.ymax
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"16\" font-size=\"13\" text-anchor=\"middle\">{title}</text>",
            self.x0 + PANEL_W / 2.0
        );
    }
}

/// Two panels: `I(v)` with overlays, and `ψ(v)`.
pub fn profile_svg(profile: &ProfileCurve, overlays: &[Overlay]) -> String {
    let pts: Vec<[f64; 2]> = profile.samples.iter().map(|s| [s.v, s.value]).collect();
    let psi: Vec<[f64; 2]> = profile.samples.iter().map(|s| [s.v, profile.psi(s.value)]).collect();
    let xmax = profile
        .total_volume
        .unwrap_or_else(|| pts.iter().map(|p| p[0]).fold(0.0, f64::max))
        .max(1e-300);
    let top = |p: &[[f64; 2]]| p.iter().map(|q| q[1]).fold(0.0, f64::max).max(1e-300) * 1.1;
    let left = Panel {
        x0: 0.0,
        xmax,
        ymax: top(&pts),
    };
    let right = Panel {
        x0: PANEL_W,
        xmax,
        ymax: top(&psi),
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\">",
        2.0 * PANEL_W,
        PANEL_H
    );
    let _ = writeln!(out, "<!-- seed={} -->", profile.seed);
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    left.axes(&mut out, "I(v)");
    right.axes(&mut out, "psi(v)");
    for (i, o) in overlays.iter().enumerate() {
        let color = COLORS[(i + 1) % COLORS.len()];
        left.polyline(&mut out, &o.points, color, true);
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" fill=\"{color}\">{}</text>",
            MARGIN + 8.0,
            40.0 + 12.0 * i as f64,
            escape(&o.label)
        );
    }
    left.polyline(&mut out, &pts, COLORS[0], false);
    right.polyline(&mut out, &psi, COLORS[0], false);
    for p in &pts {
        let (x, y) = left.map(*p);
        let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2\" fill=\"{}\"/>", COLORS[0]);
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
