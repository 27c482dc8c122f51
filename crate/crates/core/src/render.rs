//! SVG rendering of significance maps as concentric colored rings.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{CellState, Mode};
use crate::io::Convention;
use crate::sizermap::SizerMap;

/// Angular label style.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelType {
    /// N, NE, E, ...
    Directions,
    /// 24-hour clock face, 0h at the top.
    Hours,
    #[default]
    Radians,
    Degrees,
}

impl LabelType {
    /// Numeric codes 1 to 4.
    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            1 => Ok(LabelType::Directions),
            2 => Ok(LabelType::Hours),
            3 => Ok(LabelType::Radians),
            4 => Ok(LabelType::Degrees),
            _ => Err(Error::contract(format!("label type must be 1..=4, got {code}"))),
        }
    }

    pub fn code(self) -> u8 {
        match self {
            LabelType::Directions => 1,
            LabelType::Hours => 2,
            LabelType::Radians => 3,
            LabelType::Degrees => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Palette {
    #[default]
    Default,
    Grayscale,
}

impl Palette {
    pub fn color(self, state: CellState) -> &'static str {
        match (self, state) {
            (Palette::Default, CellState::Increasing) => "#0000ff",
            (Palette::Default, CellState::Decreasing) => "#ff0000",
            (Palette::Default, CellState::Flat) => "#a020f0",
            (Palette::Default, CellState::Sparse) => "#bebebe",
            (Palette::Grayscale, CellState::Increasing) => "#000000",
            (Palette::Grayscale, CellState::Decreasing) => "#555555",
            (Palette::Grayscale, CellState::Flat) => "#999999",
            (Palette::Grayscale, CellState::Sparse) => "#dddddd",
        }
    }
}

/// How ring radii follow the concentration values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RadialScale {
    /// Equal-width rings in grid order.
    #[default]
    Index,
    Log,
    /// Radius proportional to the concentration.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub label_type: LabelType,
    pub palette: Palette,
    pub radial_scale: RadialScale,
    pub display_convention: Convention,
    /// Width and height in pixels.
    pub size: u32,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            label_type: LabelType::Radians,
            palette: Palette::Default,
            radial_scale: RadialScale::Index,
            display_convention: Convention::Math,
            size: 640,
        }
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Ring boundary radii, `nu.len() + 1` values increasing from `inner` to
/// `outer`.
fn ring_radii(nu: &[f64], scale: RadialScale, inner: f64, outer: f64) -> Vec<f64> {
    let k = nu.len();
    let pos: Vec<f64> = match scale {
        RadialScale::Log if nu.iter().all(|&v| v > 0.0) => nu.iter().map(|v| v.ln()).collect(),
        RadialScale::Linear => nu.to_vec(),
        _ => (0..k).map(|i| i as f64).collect(),
    };
    if k == 1 {
        return vec![inner, outer];
    }
    let mut edges = Vec::with_capacity(k + 1);
    edges.push(pos[0] - (pos[1] - pos[0]) / 2.0);
    for w in pos.windows(2) {
        edges.push((w[0] + w[1]) / 2.0);
    }
    edges.push(pos[k - 1] + (pos[k - 1] - pos[k - 2]) / 2.0);
    if scale == RadialScale::Linear {
        edges[0] = edges[0].max(0.0);
    }
    let (lo, hi) = (edges[0], edges[k]);
    edges
        .iter()
        .map(|e| inner + (outer - inner) * (e - lo) / (hi - lo))
        .collect()
}

struct Canvas {
    center: f64,
}

impl Canvas {
    /// Screen point at `radius` along `bearing` (clockwise from the top).
    fn point(&self, radius: f64, bearing: f64) -> (f64, f64) {
        (
            self.center + radius * bearing.sin(),
            self.center - radius * bearing.cos(),
        )
    }

    fn sector(&self, r_in: f64, r_out: f64, from: f64, to: f64) -> String {
        let (x0, y0) = self.point(r_out, from);
        let (x1, y1) = self.point(r_out, to);
        let (x2, y2) = self.point(r_in, to);
        let (x3, y3) = self.point(r_in, from);
        let large = if to - from > PI { 1 } else { 0 };
        format!(
            "M{} {}A{} {} 0 {large} 1 {} {}L{} {}A{} {} 0 {large} 0 {} {}Z",
            num(x0),
            num(y0),
            num(r_out),
            num(r_out),
            num(x1),
            num(y1),
            num(x2),
            num(y2),
            num(r_in),
            num(r_in),
            num(x3),
            num(y3)
        )
    }
}

fn angle_labels(label_type: LabelType, convention: Convention) -> Vec<(f64, String)> {
    // (bearing, text)
    let math_or_bearing = |v: f64| match convention {
        Convention::Compass => v,
        Convention::Math => PI / 2.0 - v,
    };
    match label_type {
        LabelType::Directions => ["N", "NE", "E", "SE", "S", "SW", "W", "NW"]
            .iter()
            .enumerate()
            .map(|(i, s)| (TAU * i as f64 / 8.0, s.to_string()))
            .collect(),
        LabelType::Hours => (0..8)
            .map(|i| (TAU * i as f64 / 8.0, format!("{}h", 3 * i)))
            .collect(),
        LabelType::Radians => ["0", "π/4", "π/2", "3π/4", "π", "5π/4", "3π/2", "7π/4"]
            .iter()
            .enumerate()
            .map(|(i, s)| (math_or_bearing(TAU * i as f64 / 8.0), s.to_string()))
            .collect(),
        LabelType::Degrees => (0..8)
            .map(|i| (math_or_bearing(TAU * i as f64 / 8.0), format!("{}°", 45 * i)))
            .collect(),
    }
}

fn tick_indices(k: usize) -> Vec<usize> {
    if k <= 5 {
        return (0..k).collect();
    }
    let mut idx: Vec<usize> = (0..4).map(|i| i * (k - 1) / 3).collect();
    idx.dedup();
    idx
}

fn tick_text(nu: f64) -> String {
    if nu >= 10.0 {
        format!("{}", nu.round())
    } else {
        format!("{}", (nu * 10.0).round() / 10.0)
    }
}

/// Renders a map. Ring `k` shows `map.cells[k]`, smallest concentration
/// innermost.
pub fn render_svg(map: &SizerMap, spec: &RenderSpec) -> String {
    let states: Vec<Vec<CellState>> = (0..map.cells.len()).map(|k| map.states(k)).collect();
    let nu: Vec<f64> = map.grid.nu_grid().iter().map(|v| v.value()).collect();
    render_states(&states, &nu, Some(map.mode), spec)
}

/// Renders rings of states directly. Every ring must have the same length.
pub fn render_states(states: &[Vec<CellState>], nu: &[f64], mode: Option<Mode>, spec: &RenderSpec) -> String {
    assert_eq!(states.len(), nu.len(), "one ring per concentration");
    let size = spec.size.max(100) as f64;
    let canvas = Canvas { center: size / 2.0 };
    let outer = 0.37 * size;
    let inner = 0.06 * size;
    let radii = ring_radii(nu, spec.radial_scale, inner, outer);

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{s}" height="{s}" viewBox="0 0 {s} {s}" font-family="sans-serif">"#,
        s = num(size)
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    if let Some(mode) = mode {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="{}" text-anchor="middle">{mode}</text>"#,
            num(size / 2.0),
            num(0.04 * size),
            num(0.03 * size)
        );
    }

    for (k, ring) in states.iter().enumerate() {
        let n = ring.len();
        let half = PI / n as f64;
        let _ = writeln!(svg, r#"<g class="ring" data-nu="{}">"#, nu[k]);
        // emit sectors in increasing display angle
        let order: Vec<usize> = match spec.display_convention {
            Convention::Math => (0..n).collect(),
            Convention::Compass => (0..n).map(|i| (n + n / 4 - i) % n).collect(),
        };
        for j in order {
            let theta = TAU * j as f64 / n as f64;
            let bearing = PI / 2.0 - theta;
            let state = ring[j];
            let _ = writeln!(
                svg,
                r#"<path class="cell" data-state="{}" fill="{c}" stroke="{c}" stroke-width="0.5" d="{}"/>"#,
                state.token(),
                canvas.sector(radii[k], radii[k + 1], bearing - half, bearing + half),
                c = spec.palette.color(state)
            );
        }
        let _ = writeln!(svg, "</g>");
    }

    // radial axis with concentration ticks, along the positive x direction
    let _ = writeln!(svg, r##"<g class="nu-axis" stroke="#000000" stroke-width="1">"##);
    let (ax, ay) = canvas.point(inner, PI / 2.0);
    let (bx, by) = canvas.point(outer, PI / 2.0);
    let _ = writeln!(svg, r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, num(ax), num(ay), num(bx), num(by));
    let _ = writeln!(svg, "</g>");
    let font = 0.022 * size;
    let _ = writeln!(
        svg,
        r##"<g class="nu-ticks" font-size="{}" text-anchor="middle" fill="#000000" stroke="#ffffff" stroke-width="3" paint-order="stroke">"##,
        num(font)
    );
    for k in tick_indices(nu.len()) {
        let r = (radii[k] + radii[k + 1]) / 2.0;
        let (x, y) = canvas.point(r, PI / 2.0);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}">{}</text>"#,
            num(x),
            num(y + 0.35 * font),
            escape(&tick_text(nu[k]))
        );
    }
    let (x, y) = canvas.point(outer + 0.5 * font, PI / 2.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="start">ν</text>"#, num(x), num(y + 0.35 * font));
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(
        svg,
        r##"<g class="angle-labels" font-size="{}" text-anchor="middle" fill="#000000">"##,
        num(1.2 * font)
    );
    for (bearing, text) in angle_labels(spec.label_type, spec.display_convention) {
        let (x, y) = canvas.point(outer + 2.2 * font, bearing);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}">{}</text>"#,
            num(x),
            num(y + 0.4 * font),
            escape(&text)
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g class="legend" font-size="{}">"#, num(font));
    let states_in_order = [
        CellState::Increasing,
        CellState::Decreasing,
        CellState::Flat,
        CellState::Sparse,
    ];
    for (i, state) in states_in_order.iter().enumerate() {
        let x = 0.03 * size + i as f64 * 0.24 * size;
        let y = 0.98 * size;
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            num(x),
            num(y - font),
            num(font),
            num(font),
            spec.palette.color(*state),
            num(x + 1.4 * font),
            num(y - 0.1 * font),
            state.token()
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(map: &SizerMap, spec: &RenderSpec, path: impl AsRef<std::path::Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_svg(map, spec)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeMap, BTreeSet};

    fn cell_attrs(svg: &str, attr: &str) -> Vec<String> {
        svg.lines()
            .filter(|l| l.contains(r#"class="cell""#))
            .map(|l| {
                let start = l.find(&format!("{attr}=\"")).unwrap() + attr.len() + 2;
                let end = start + l[start..].find('"').unwrap();
                l[start..end].to_string()
            })
            .collect()
    }

    fn mixed_rings() -> Vec<Vec<CellState>> {
        use CellState::*;
        vec![
            vec![Increasing, Increasing, Flat, Decreasing, Decreasing, Sparse, Flat, Increasing, Flat, Flat],
            vec![Flat, Decreasing, Increasing, Increasing, Sparse, Sparse, Flat, Decreasing, Flat, Flat],
        ]
    }

    #[test]
    fn all_flat_has_single_fill() {
        let rings = vec![vec![CellState::Flat; 12]; 3];
        let svg = render_states(&rings, &[1.0, 2.0, 3.0], None, &RenderSpec::default());
        let fills: BTreeSet<String> = cell_attrs(&svg, "fill").into_iter().collect();
        assert_eq!(fills.len(), 1);
        assert!(fills.contains(Palette::Default.color(CellState::Flat)));
    }

    #[test]
    fn two_rings_four_sectors_give_eight_paths() {
        let rings = vec![vec![CellState::Flat; 4]; 2];
        let svg = render_states(&rings, &[1.0, 10.0], Some(Mode::Density), &RenderSpec::default());
        assert_eq!(svg.matches(r#"class="cell""#).count(), 8);
        assert_eq!(svg.matches(r#"class="ring""#).count(), 2);
        assert!(svg.contains(">10</text>"));
    }

    #[test]
    fn flipping_display_mirrors_order_and_keeps_counts() {
        let rings = mixed_rings();
        let math = render_states(&rings, &[1.0, 5.0], None, &RenderSpec::default());
        let compass = render_states(
            &rings,
            &[1.0, 5.0],
            None,
            &RenderSpec {
                display_convention: Convention::Compass,
                ..Default::default()
            },
        );
        let count = |svg: &str| {
            let mut m = BTreeMap::new();
            for s in cell_attrs(svg, "data-state") {
                *m.entry(s).or_insert(0) += 1;
            }
            m
        };
        assert_eq!(count(&math), count(&compass));
        let a = cell_attrs(&math, "data-state");
        let b = cell_attrs(&compass, "data-state");
        assert_ne!(a, b);
        // compass order visits the math order backwards, starting at the top
        let n = 10;
        for ring in 0..2 {
            for i in 0..n {
                let j = (n + n / 4 - i) % n;
                assert_eq!(b[ring * n + i], a[ring * n + j]);
            }
        }
        // the sectors themselves sit at the same place
        let da: BTreeSet<String> = cell_attrs(&math, "d").into_iter().collect();
        let db: BTreeSet<String> = cell_attrs(&compass, "d").into_iter().collect();
        assert_eq!(da, db);
    }

    #[test]
    fn output_is_deterministic() {
        let rings = mixed_rings();
        let spec = RenderSpec {
            label_type: LabelType::Directions,
            palette: Palette::Grayscale,
            radial_scale: RadialScale::Log,
            display_convention: Convention::Compass,
            size: 500,
        };
        assert_eq!(
            render_states(&rings, &[2.0, 7.0], None, &spec),
            render_states(&rings, &[2.0, 7.0], None, &spec)
        );
    }

    #[test]
    fn label_types() {
        assert!(LabelType::from_code(0).is_err());
        assert!(LabelType::from_code(5).is_err());
        let rings = vec![vec![CellState::Flat; 8]];
        let render = |code: u8| {
            render_states(
                &rings,
                &[1.0],
                None,
                &RenderSpec {
                    label_type: LabelType::from_code(code).unwrap(),
                    ..Default::default()
                },
            )
        };
        assert!(render(1).contains(">NE</text>"));
        assert!(render(2).contains(">21h</text>"));
        assert!(render(3).contains(">3π/2</text>"));
        assert!(render(4).contains(">315°</text>"));
        assert_eq!(LabelType::from_code(3).unwrap().code(), 3);
    }

    #[test]
    fn grayscale_palette_is_distinct() {
        let colors: BTreeSet<&str> = [
            CellState::Increasing,
            CellState::Decreasing,
            CellState::Flat,
            CellState::Sparse,
        ]
        .iter()
        .map(|&s| Palette::Grayscale.color(s))
        .collect();
        assert_eq!(colors.len(), 4);
        assert_eq!(Palette::Grayscale.color(CellState::Increasing), "#000000");
    }

    #[test]
    fn radii_are_increasing_for_every_scale() {
        let nu = [0.0, 1.0, 3.0, 10.0, 60.0];
        for scale in [RadialScale::Index, RadialScale::Log, RadialScale::Linear] {
            let r = ring_radii(&nu, scale, 10.0, 100.0);
            assert_eq!(r.len(), 6);
            assert_eq!(r[0], 10.0);
            assert!((r[5] - 100.0).abs() < 1e-9);
            assert!(r.windows(2).all(|w| w[1] > w[0]), "{scale:?} {r:?}");
        }
        let r = ring_radii(&[1.0, 2.0, 3.0], RadialScale::Index, 0.0, 30.0);
        assert_eq!(r, vec![0.0, 10.0, 20.0, 30.0]);
    }

    #[test]
    fn math_labels_put_zero_at_east() {
        let labels = angle_labels(LabelType::Radians, Convention::Math);
        assert_eq!(labels[0].1, "0");
        assert!((labels[0].0 - PI / 2.0).abs() < 1e-12);
        let compass = angle_labels(LabelType::Degrees, Convention::Compass);
        assert_eq!(compass[2], (PI / 2.0, "90°".to_string()));
    }
}
