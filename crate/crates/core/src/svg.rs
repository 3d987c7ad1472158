//! Standalone SVG heatmaps of piecewise-constant functions.

use std::fmt::Write as _;
use std::path::Path;

use crate::density::PiecewisePolyDensity;
use crate::error::{Error, Result};
use crate::geom::{ConvexPolygon, Point2};
use crate::output::write_atomic;

pub const WIDTH: f64 = 1024.0;
pub const HEIGHT: f64 = 640.0;
/// Strip below the plot reserved for the legend.
const LEGEND_HEIGHT: f64 = 80.0;
const MARGIN: f64 = 0.05;
const RAMP_STEPS: usize = 64;

/// Ramp endpoints; every channel increases, so lightness is monotone.
const DARK: [f64; 3] = [20.0, 30.0, 80.0];
const LIGHT: [f64; 3] = [250.0, 240.0, 200.0];

#[derive(Clone, Debug, PartialEq)]
pub struct SvgHeatmap {
    pub cells: Vec<(ConvexPolygon, f64)>,
    pub value_range: (f64, f64),
    pub title: Option<String>,
}

impl SvgHeatmap {
    /// Value range taken from the cells.
    pub fn new(cells: Vec<(ConvexPolygon, f64)>) -> Self {
        let lo = cells.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let hi = cells.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        Self {
            cells,
            value_range: (lo, hi),
            title: None,
        }
    }

    pub fn from_density(f: &PiecewisePolyDensity) -> Self {
        Self::new(
            f.cells()
                .iter()
                .map(|c| (c.polygon.clone(), c.value))
                .collect(),
        )
    }

    pub fn with_title(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }

    pub fn render(&self) -> Result<String> {
        if self.cells.is_empty() {
            return Err(Error::EmptyHeatmap);
        }
        let (lo, hi) = self.value_range;
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (p, _) in &self.cells {
            let b = p.bbox();
            min = Point2::new(min.x.min(b.min.x), min.y.min(b.min.y));
            max = Point2::new(max.x.max(b.max.x), max.y.max(b.max.y));
        }
        let plot_h = HEIGHT - LEGEND_HEIGHT;
        let w = (max.x - min.x).max(1e-12);
        let h = (max.y - min.y).max(1e-12);
        let scale = ((1.0 - 2.0 * MARGIN) * WIDTH / w).min((1.0 - 2.0 * MARGIN) * plot_h / h);
        let ox = 0.5 * (WIDTH - scale * w);
        let oy = 0.5 * (plot_h - scale * h);
        let to_px = |p: Point2| (ox + scale * (p.x - min.x), oy + scale * (max.y - p.y));

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(
            s,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        if let Some(title) = &self.title {
            let _ = writeln!(
                s,
                r#"<text x="12" y="22" font-family="sans-serif" font-size="16">{}</text>"#,
                escape(title)
            );
        }
        let _ = writeln!(s, r#"<g stroke="none">"#);
        for (poly, v) in &self.cells {
            let mut d = String::new();
            for (k, p) in poly.vertices().iter().enumerate() {
                let (x, y) = to_px(*p);
                let _ = write!(d, "{}{x:.3} {y:.3} ", if k == 0 { "M" } else { "L" });
            }
            d.push('Z');
            let _ = writeln!(
                s,
                r#"<path d="{d}" fill="{}"/>"#,
                color(position(*v, lo, hi))
            );
        }
        let _ = writeln!(s, "</g>");

        let bar_w = 0.6 * WIDTH;
        let bar_x = 0.5 * (WIDTH - bar_w);
        let bar_y = plot_h + 12.0;
        let step = bar_w / RAMP_STEPS as f64;
        let _ = writeln!(s, r#"<g stroke="none">"#);
        for k in 0..RAMP_STEPS {
            let u = (k as f64 + 0.5) / RAMP_STEPS as f64;
            let _ = writeln!(
                s,
                r#"<rect x="{:.3}" y="{bar_y:.3}" width="{:.3}" height="20" fill="{}"/>"#,
                bar_x + k as f64 * step,
                step + 0.5,
                color(u)
            );
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="14" text-anchor="middle">{lo:.6} – {hi:.6}</text>"#,
            0.5 * WIDTH,
            bar_y + 44.0
        );
        s.push_str("</svg>\n");
        Ok(s)
    }
}

/// Position of `v` on the ramp; the midpoint for a degenerate range.
fn position(v: f64, lo: f64, hi: f64) -> f64 {
    if hi - lo <= 0.0 || !(hi - lo).is_finite() {
        0.5
    } else {
        ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
    }
}

fn color(u: f64) -> String {
    let c = |k: usize| (DARK[k] + u * (LIGHT[k] - DARK[k])).round() as u8;
    format!("#{:02x}{:02x}{:02x}", c(0), c(1), c(2))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Renders `h` and writes it atomically; nothing is written on error.
pub fn emit_svg(h: &SvgHeatmap, path: &Path) -> Result<()> {
    let svg = h.render()?;
    write_atomic(path, svg.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{tent_left_domain, tent_region, tent_right_domain};

    #[test]
    fn single_cell() {
        let svg = SvgHeatmap::new(vec![(tent_region(), 1.0)])
            .render()
            .unwrap();
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains("1.000000 – 1.000000"));
    }

    #[test]
    fn endpoints_get_ramp_ends() {
        let svg = SvgHeatmap::new(vec![(tent_left_domain(), 0.0), (tent_right_domain(), 1.0)])
            .render()
            .unwrap();
        assert!(svg.contains(&format!(r#"fill="{}"/>"#, color(0.0))));
        assert!(svg.contains(&format!(r#"fill="{}"/>"#, color(1.0))));
        assert_ne!(color(0.0), color(1.0));
    }

    #[test]
    fn empty_is_an_error_and_writes_nothing() {
        let p = std::env::temp_dir().join(format!("pfo2d-empty-{}.svg", std::process::id()));
        assert_eq!(
            emit_svg(&SvgHeatmap::new(vec![]), &p),
            Err(Error::EmptyHeatmap)
        );
        assert!(!p.exists());
    }

    #[test]
    fn rendering_is_deterministic() {
        let h = SvgHeatmap::new(vec![(tent_left_domain(), 0.25), (tent_right_domain(), 3.0)])
            .with_title("a < b");
        assert_eq!(h.render().unwrap(), h.render().unwrap());
        assert!(h.render().unwrap().contains("a &lt; b"));
    }
}
