//! Self-contained SVG plots in the unit disk.

use std::fmt::Write as _;

use num_complex::Complex64;

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub struct DiskPlot {
    body: String,
    title: String,
}

impl DiskPlot {
    pub fn new(title: &str) -> Self {
        let mut body = String::new();
        let _ = writeln!(body, r##"<circle cx="0" cy="0" r="1" fill="#f7f7f7" stroke="#000" stroke-width="0.006"/>"##);
        let _ =
            writeln!(body, r##"<path d="M -1 0 L 1 0 M 0 -1 L 0 1" stroke="#bbb" stroke-width="0.003" fill="none"/>"##);
        Self { body, title: escape(title) }
    }

    pub fn curve(&mut self, points: &[Complex64], closed: bool, color: &str) {
        let coords: Vec<String> = points.iter().map(|z| format!("{:.6},{:.6}", z.re, z.im)).collect();
        let tag = if closed { "polygon" } else { "polyline" };
        let _ = writeln!(
            self.body,
            r#"<{tag} points="{}" fill="none" stroke="{color}" stroke-width="0.008" stroke-linejoin="round"/>"#,
            coords.join(" ")
        );
    }

    pub fn marker(&mut self, z: Complex64, color: &str, label: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{:.6}" cy="{:.6}" r="0.03" fill="{color}"><title>{label}</title></circle>"#,
            z.re,
            z.im,
            label = escape(label)
        );
    }

    pub fn finish(self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="480" height="480" viewBox="-1.15 -1.15 2.3 2.3">"#
        );
        let _ = writeln!(out, "<title>{}</title>", self.title);
        let _ = writeln!(out, r#"<rect x="-1.15" y="-1.15" width="2.3" height="2.3" fill="white"/>"#);
        // y grows upward in the complex plane
        let _ = writeln!(out, r#"<g transform="scale(1,-1)">"#);
        out.push_str(&self.body);
        out.push_str("</g>\n</svg>\n");
        out
    }
}
