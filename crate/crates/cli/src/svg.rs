//! Bare-bones SVG: axes, one bar per bin, an overlay curve.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 48.0;

pub struct BarPlot<'a> {
    pub title: &'a str,
    pub x_max: f64,
    pub bin_width: f64,
    /// Bar heights (densities), one per bin starting at 0.
    pub heights: &'a [f64],
    /// Overlay sampled on a fine grid.
    pub overlay: &'a dyn Fn(f64) -> f64,
}

impl BarPlot<'_> {
    pub fn render(&self) -> String {
        let curve: Vec<(f64, f64)> = (0..=200)
            .map(|i| {
                let x = self.x_max * i as f64 / 200.0;
                (x, (self.overlay)(x))
            })
            .collect();
        let y_max = self
            .heights
            .iter()
            .copied()
            .chain(curve.iter().map(|p| p.1))
            .filter(|v| v.is_finite())
            .fold(0.0f64, f64::max)
            .max(1e-12)
            * 1.05;
        let sx = |x: f64| PAD + (W - 2.0 * PAD) * x / self.x_max;
        let sy = |y: f64| H - PAD - (H - 2.0 * PAD) * (y / y_max).clamp(0.0, 1.0);

        let mut s = String::new();
        let _ =
            writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
            W / 2.0,
            escape(self.title)
        );
        for (i, h) in self.heights.iter().enumerate() {
            let x0 = sx(i as f64 * self.bin_width);
            let x1 = sx(((i + 1) as f64 * self.bin_width).min(self.x_max));
            let y = sy(*h);
            let _ = writeln!(
                s,
                r##"<rect x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="#9ab" stroke="#678" stroke-width="0.3"/>"##,
                (x1 - x0).max(0.0),
                H - PAD - y
            );
        }
        let pts: Vec<String> = curve.iter().map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y))).collect();
        let _ = writeln!(s, r##"<polyline points="{}" fill="none" stroke="#c33" stroke-width="1.5"/>"##, pts.join(" "));
        let _ = writeln!(s, r#"<line x1="{PAD}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, H - PAD, W - PAD, H - PAD);
        let _ = writeln!(s, r#"<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{}" stroke="black"/>"#, H - PAD);
        for k in 0..=5 {
            let xv = self.x_max * k as f64 / 5.0;
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
                sx(xv),
                H - PAD + 16.0,
                trim(xv)
            );
            let yv = y_max * k as f64 / 5.0;
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
                PAD - 6.0,
                sy(yv) + 4.0,
                trim(yv)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn trim(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
