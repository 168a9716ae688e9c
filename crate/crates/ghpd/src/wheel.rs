//! Steering-wheel plots: a hub colored by the predicted class, one spoke per
//! class whose length is that class's membership value (0, gamma, or 1), and
//! an outer rim marking full membership.
//!
//! Rendering is a pure function of the spec: fixed 6-decimal coordinates, no
//! timestamps, byte-identical output for identical inputs.

use crate::credible::{Phi, Region};
use crate::error::{Error, Result};
use crate::io::PhiRecord;
use std::collections::HashSet;
use std::fmt::Write as _;

/// Hub radius as a fraction of the rim radius.
const HUB_RATIO: f64 = 0.25;
/// Rim radius as a fraction of the canvas size in [`render_svg`].
const RIM_FRACTION: f64 = 0.44;
const MIN_CANVAS: u32 = 32;

/// Colors fixed for well-known class names.
const NAMED_COLORS: &[(&str, &str)] = &[
    ("red", "#ff0000"),
    ("green", "#008000"),
    ("blue", "#0000ff"),
    ("Spanish", "#ff0000"),
    ("French", "#008000"),
    ("German", "#0000ff"),
    ("Italian", "#000000"),
    ("British", "#ffa500"),
    ("American", "#800080"),
];

/// Default assignment cycle for everything else, in label input order.
const COLOR_CYCLE: [&str; 8] = [
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf", "#999999",
];

/// Label-to-color assignment; within one plot the mapping is a bijection.
#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    colors: Vec<(String, String)>,
}

impl Palette {
    /// Deterministic default palette: named labels keep their fixed colors,
    /// the rest walk the 8-color cycle (then evenly spaced hues) in input
    /// order.
    pub fn default_for<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let mut colors = Vec::with_capacity(labels.len());
        let mut cycle = 0usize;
        for label in labels {
            let label = label.as_ref();
            let color = match NAMED_COLORS.iter().find(|(name, _)| *name == label) {
                Some((_, c)) => (*c).to_string(),
                None => {
                    let c = if cycle < COLOR_CYCLE.len() {
                        COLOR_CYCLE[cycle].to_string()
                    } else {
                        golden_angle_color(cycle)
                    };
                    cycle += 1;
                    c
                }
            };
            colors.push((label.to_string(), color));
        }
        let palette = Self { colors };
        palette.check_bijection()?;
        Ok(palette)
    }

    /// Overrides (or adds) the color for one label.
    pub fn set<S: Into<String>>(mut self, label: S, color: S) -> Result<Self> {
        let label = label.into();
        let color = color.into();
        match self.colors.iter_mut().find(|(l, _)| *l == label) {
            Some(entry) => entry.1 = color,
            None => self.colors.push((label, color)),
        }
        self.check_bijection()?;
        Ok(self)
    }

    pub fn color(&self, label: &str) -> Option<&str> {
        self.colors
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, c)| c.as_str())
    }

    fn check_bijection(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for (_, color) in &self.colors {
            if !seen.insert(color.as_str()) {
                return Err(Error::DuplicateColor {
                    color: color.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Evenly spread hues for palettes somewhat past the fixed cycle; beyond
/// that, a multiplicative bijection on 24 bits keeps colors distinct for
/// any realistic label count.
fn golden_angle_color(index: usize) -> String {
    if index < 48 {
        let hue = (index as f64 * 137.508) % 360.0;
        let (r, g, b) = hsl_to_rgb(hue, 0.65, 0.45);
        format!("#{r:02x}{g:02x}{b:02x}")
    } else {
        // odd multiplier, invertible mod 2^24
        let mixed = (index as u32).wrapping_mul(2_654_435_761) & 0x00ff_ffff;
        format!("#{mixed:06x}")
    }
}

fn hsl_to_rgb(h: f64, s: f64, l: f64) -> (u8, u8, u8) {
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r1, g1, b1) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    (
        ((r1 + m) * 255.0).round() as u8,
        ((g1 + m) * 255.0).round() as u8,
        ((b1 + m) * 255.0).round() as u8,
    )
}

/// One spoke: the class it stands for, its membership value as a length, and
/// its color. Zero-length spokes stay in the spec and are skipped only at
/// render time.
#[derive(Debug, Clone, PartialEq)]
pub struct Spoke {
    pub label: String,
    pub length: f64,
    pub color: String,
    pub boundary: bool,
}

/// A renderable wheel: hub class/color, all spokes in label input order, and
/// the source credible set for the embedded metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct WheelSpec {
    pub hub_label: String,
    pub hub_color: String,
    pub spokes: Vec<Spoke>,
    /// Wheel radius in display units (pixels) when placed on a panel.
    pub rim_radius: f64,
    pub gamma: f64,
    record: PhiRecord,
}

impl WheelSpec {
    pub fn record(&self) -> &PhiRecord {
        &self.record
    }

    pub fn with_rim_radius(mut self, radius: f64) -> Self {
        self.rim_radius = radius;
        self
    }
}

/// Builds the wheel for a prediction: hub colored by the predicted class,
/// one spoke per label with length equal to its membership value, at equal
/// angular spacing clockwise from 12 o'clock in label input order.
pub fn build_wheel(predicted: &str, phi: &Phi, palette: &Palette) -> Result<WheelSpec> {
    if !phi.labels().iter().any(|l| l == predicted) {
        return Err(Error::UnknownLabel(predicted.to_string()));
    }
    let hub_color = palette
        .color(predicted)
        .ok_or_else(|| Error::MissingColor(predicted.to_string()))?
        .to_string();
    let mut spokes = Vec::with_capacity(phi.labels().len());
    for ((label, &value), &region) in phi
        .labels()
        .iter()
        .zip(phi.values())
        .zip(phi.regions())
    {
        let color = palette
            .color(label)
            .ok_or_else(|| Error::MissingColor(label.clone()))?
            .to_string();
        spokes.push(Spoke {
            label: label.clone(),
            length: value,
            color,
            boundary: region == Region::Boundary,
        });
    }
    Ok(WheelSpec {
        hub_label: predicted.to_string(),
        hub_color,
        spokes,
        rim_radius: 20.0,
        gamma: phi.gamma(),
        record: PhiRecord::from_phi(phi),
    })
}

/// Rendering switches; the defaults match the plain style.
#[derive(Debug, Clone, Copy, Default)]
pub struct RenderOptions {
    /// Draw boundary spokes with a dashed stroke instead of encoding gamma
    /// by length alone.
    pub dashed_boundary: bool,
}

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

/// Emits rim, spokes (zero-length ones skipped), and hub around a center.
fn wheel_body(
    out: &mut String,
    spec: &WheelSpec,
    cx: f64,
    cy: f64,
    rim: f64,
    opts: RenderOptions,
) {
    let hub = HUB_RATIO * rim;
    let spoke_width = (rim / 7.0).max(1.0);
    let rim_width = (rim / 24.0).max(0.75);
    let _ = writeln!(
        out,
        r##"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="#333333" stroke-width="{}"/>"##,
        fmt6(cx),
        fmt6(cy),
        fmt6(rim),
        fmt6(rim_width)
    );
    let n = spec.spokes.len() as f64;
    for (k, spoke) in spec.spokes.iter().enumerate() {
        if spoke.length <= 0.0 {
            continue;
        }
        let angle = -std::f64::consts::FRAC_PI_2 + std::f64::consts::TAU * k as f64 / n;
        let (dx, dy) = (angle.cos(), angle.sin());
        let r1 = hub + spoke.length * (rim - hub);
        let dash = if opts.dashed_boundary && spoke.boundary {
            r#" stroke-dasharray="4 3""#
        } else {
            ""
        };
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="{}" stroke-linecap="round"{}/>"#,
            fmt6(cx + hub * dx),
            fmt6(cy + hub * dy),
            fmt6(cx + r1 * dx),
            fmt6(cy + r1 * dy),
            spoke.color,
            fmt6(spoke_width),
            dash
        );
    }
    let _ = writeln!(
        out,
        r#"<circle cx="{}" cy="{}" r="{}" fill="{}"/>"#,
        fmt6(cx),
        fmt6(cy),
        fmt6(hub),
        spec.hub_color
    );
}

/// One wheel on its own square canvas, with the credible-set document
/// embedded as an XML comment.
pub fn render_svg(spec: &WheelSpec, size_px: u32) -> Result<String> {
    render_svg_with(spec, size_px, RenderOptions::default())
}

pub fn render_svg_with(spec: &WheelSpec, size_px: u32, opts: RenderOptions) -> Result<String> {
    if size_px < MIN_CANVAS {
        return Err(Error::CanvasTooSmall {
            size: size_px,
            min: MIN_CANVAS,
        });
    }
    let size = size_px as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size_px}" height="{size_px}" viewBox="0 0 {size_px} {size_px}">"#
    );
    let _ = writeln!(out, "<!-- phi {} -->", spec.record.to_json());
    wheel_body(&mut out, spec, size / 2.0, size / 2.0, RIM_FRACTION * size, opts);
    out.push_str("</svg>\n");
    Ok(out)
}

/// Extracts the membership document embedded by [`render_svg`].
pub fn extract_phi_record(svg: &str) -> Result<PhiRecord> {
    let start = svg
        .find("<!-- phi ")
        .ok_or_else(|| Error::InvalidDocument("no embedded phi metadata".into()))?
        + "<!-- phi ".len();
    let end = svg[start..]
        .find(" -->")
        .ok_or_else(|| Error::InvalidDocument("unterminated phi metadata".into()))?;
    PhiRecord::from_json(&svg[start..start + end])
}

/// Data-coordinate window for a panel of wheels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewBounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl ViewBounds {
    /// Tight bounds around the points, padded by `margin` times the range on
    /// each side (unit padding when a range collapses).
    pub fn around(points: &[(f64, f64)], margin: f64) -> Self {
        let mut b = Self {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        for &(x, y) in points {
            b.x_min = b.x_min.min(x);
            b.x_max = b.x_max.max(x);
            b.y_min = b.y_min.min(y);
            b.y_max = b.y_max.max(y);
        }
        let pad = |lo: &mut f64, hi: &mut f64| {
            let range = *hi - *lo;
            if range <= 0.0 {
                *lo -= 1.0;
                *hi += 1.0;
            } else {
                *lo -= margin * range;
                *hi += margin * range;
            }
        };
        pad(&mut b.x_min, &mut b.x_max);
        pad(&mut b.y_min, &mut b.y_max);
        b
    }
}

/// A scatter of wheels at data coordinates. The y axis points up in data
/// space; later points draw on top of earlier ones.
pub fn render_panel(
    points: &[(f64, f64, WheelSpec)],
    bounds: &ViewBounds,
    width_px: u32,
    height_px: u32,
) -> Result<String> {
    if points.is_empty() {
        return Err(Error::EmptyPanel);
    }
    if width_px < MIN_CANVAS || height_px < MIN_CANVAS {
        return Err(Error::CanvasTooSmall {
            size: width_px.min(height_px),
            min: MIN_CANVAS,
        });
    }
    let pad = 10.0;
    let w = width_px as f64;
    let h = height_px as f64;
    let x_range = bounds.x_max - bounds.x_min;
    let y_range = bounds.y_max - bounds.y_min;
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        let px = if x_range > 0.0 {
            pad + (x - bounds.x_min) / x_range * (w - 2.0 * pad)
        } else {
            w / 2.0
        };
        let py = if y_range > 0.0 {
            h - pad - (y - bounds.y_min) / y_range * (h - 2.0 * pad)
        } else {
            h / 2.0
        };
        (px, py)
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width_px}" height="{height_px}" viewBox="0 0 {width_px} {height_px}">"#
    );
    for (x, y, spec) in points {
        let (px, py) = to_px(*x, *y);
        let _ = writeln!(out, r#"<g class="wheel">"#);
        wheel_body(&mut out, spec, px, py, spec.rim_radius, RenderOptions::default());
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}
