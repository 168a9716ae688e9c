//! Browser bindings for the interactive demo page in `www/`.
//!
//! Three operations are exposed: an editable-posterior wheel explorer, a
//! standard-normal HPD interval explorer, and the seeded three-class
//! simulation panel. Each binding is a thin wrapper over a native function
//! so the logic stays testable without a wasm target.

use ghpd::credible::{fair_ghpd, Region};
use ghpd::grid::{boundary_mass, grid_ghpd, interior_intervals, standard_normal_density};
use ghpd::io::{to_json_string, PhiRecord};
use ghpd::posterior::{CredibleLevel, DiscretePosterior};
use ghpd::simulate::{simulate, SimulationSpec};
use ghpd::wheel::{build_wheel, render_panel, render_svg, Palette, ViewBounds};
use ghpd::{fit_qda, GridPosterior, Result};
use serde_json::json;
use std::fmt::Write as _;
use wasm_bindgen::prelude::*;

/// Parses one `label, weight` pair per line (comma or whitespace separated).
fn posterior_from_lines(rows: &str) -> Result<DiscretePosterior> {
    let mut labels = Vec::new();
    let mut weights = Vec::new();
    for line in rows.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (label, weight) = match line.split_once(',') {
            Some((l, w)) => (l, w),
            None => line.split_once(char::is_whitespace).ok_or_else(|| {
                ghpd::Error::InvalidDocument(format!("expected \"label, weight\", got {line:?}"))
            })?,
        };
        labels.push(label.trim().to_string());
        weights.push(weight.trim().parse::<f64>().map_err(|e| {
            ghpd::Error::InvalidDocument(format!("bad weight {:?}: {e}", weight.trim()))
        })?);
    }
    DiscretePosterior::from_weights(labels, weights)
}

fn wheel_svg_impl(rows: &str, alpha: f64, size_px: u32) -> Result<String> {
    let post = posterior_from_lines(rows)?;
    let level = CredibleLevel::new(alpha)?;
    let phi = fair_ghpd(&post, level)?;
    let palette = Palette::default_for(post.labels())?;
    let mut argmax = 0;
    for i in 1..post.len() {
        if post.prob(i) > post.prob(argmax) {
            argmax = i;
        }
    }
    let wheel = build_wheel(post.label(argmax), &phi, &palette)?;
    render_svg(&wheel, size_px)
}

fn wheel_summary_impl(rows: &str, alpha: f64) -> Result<String> {
    let post = posterior_from_lines(rows)?;
    let phi = fair_ghpd(&post, CredibleLevel::new(alpha)?)?;
    Ok(PhiRecord::from_phi(&phi).to_json())
}

// wide enough that the truncated tail stays inside the normalization gate
const CURVE_LO: f64 = -5.5;
const CURVE_HI: f64 = 5.5;
const CURVE_STEP: f64 = 0.0025;

fn normal_grid() -> Result<GridPosterior> {
    GridPosterior::from_fn(CURVE_LO, CURVE_HI, CURVE_STEP, standard_normal_density)
}

fn normal_hpd_json_impl(alpha: f64) -> Result<String> {
    let grid = normal_grid()?;
    let phi = grid_ghpd(&grid, CredibleLevel::new(alpha)?)?;
    let intervals: Vec<Vec<f64>> = interior_intervals(&grid, &phi)
        .into_iter()
        .map(|(a, b)| vec![a, b])
        .collect();
    Ok(to_json_string(&json!({
        "alpha": alpha,
        "kappa": phi.kappa() / grid.step(),
        "gamma": phi.gamma(),
        "intervals": intervals,
        "boundary_mass": boundary_mass(&grid, &phi),
    })))
}

/// Density curve with the included region shaded; no axes, just the curve,
/// the baseline, and the threshold line.
fn normal_hpd_svg_impl(alpha: f64, width: u32, height: u32) -> Result<String> {
    let grid = normal_grid()?;
    let phi = grid_ghpd(&grid, CredibleLevel::new(alpha)?)?;
    let w = width as f64;
    let h = height as f64;
    let pad = 12.0;
    let y_max = standard_normal_density(0.0) * 1.08;
    let to_px = |x: f64, d: f64| -> (f64, f64) {
        (
            pad + (x - CURVE_LO) / (CURVE_HI - CURVE_LO) * (w - 2.0 * pad),
            h - pad - (d / y_max) * (h - 2.0 * pad),
        )
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    // shaded membership region (interior runs of cells)
    for (a, b) in interior_intervals(&grid, &phi) {
        let mut path = String::new();
        let (x0, y0) = to_px(a, 0.0);
        let _ = write!(path, "M {x0:.2} {y0:.2}");
        let mut x = a;
        while x < b {
            let (px, py) = to_px(x, standard_normal_density(x));
            let _ = write!(path, " L {px:.2} {py:.2}");
            x += (b - a) / 160.0;
        }
        let (px, py) = to_px(b, standard_normal_density(b));
        let _ = write!(path, " L {px:.2} {py:.2}");
        let (x1, y1) = to_px(b, 0.0);
        let _ = write!(path, " L {x1:.2} {y1:.2} Z");
        let _ = writeln!(out, r##"<path d="{path}" fill="#9ecae1" stroke="none"/>"##);
    }
    // density curve, decimated to keep the page light
    let stride = (grid.len() / 400).max(1);
    let mut curve = String::new();
    for i in (0..grid.len()).step_by(stride) {
        let (px, py) = to_px(grid.midpoint(i), grid.density()[i]);
        let _ = write!(curve, "{px:.2},{py:.2} ");
    }
    let _ = writeln!(
        out,
        r##"<polyline points="{}" fill="none" stroke="#08519c" stroke-width="1.5"/>"##,
        curve.trim_end()
    );
    // threshold line at the density separating in from out
    let kappa_density = phi.kappa() / grid.step();
    let (_, ky) = to_px(0.0, kappa_density);
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{ky:.2}" x2="{:.2}" y2="{ky:.2}" stroke="#de2d26" stroke-width="1" stroke-dasharray="5 4"/>"##,
        pad,
        w - pad
    );
    let (_, base) = to_px(0.0, 0.0);
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{base:.2}" x2="{:.2}" y2="{base:.2}" stroke="#636363" stroke-width="1"/>"##,
        pad,
        w - pad
    );
    out.push_str("</svg>\n");
    Ok(out)
}

fn simulation_panel_impl(seed: u32, alpha: f64, per_class: u32, size: u32) -> Result<String> {
    let level = CredibleLevel::new(alpha)?;
    let data = simulate(&SimulationSpec::three_class(per_class as usize, seed as u64))?;
    let model = fit_qda(&data)?;
    let palette = Palette::default_for(&model.class_labels())?;
    let mut wheels = Vec::with_capacity(data.n());
    for i in 0..data.n() {
        let x = data.row(i);
        let (predicted, phi) = model.classify_with_uncertainty(x, level)?;
        let wheel = build_wheel(&predicted, &phi, &palette)?
            .with_rim_radius((size as f64 / 40.0).clamp(8.0, 24.0));
        wheels.push((x[0], x[1], wheel));
    }
    let coords: Vec<(f64, f64)> = wheels.iter().map(|(x, y, _)| (*x, *y)).collect();
    let bounds = ViewBounds::around(&coords, 0.08);
    render_panel(&wheels, &bounds, size, size)
}

fn certainty_counts_impl(seed: u32, alpha: f64, per_class: u32) -> Result<String> {
    let level = CredibleLevel::new(alpha)?;
    let data = simulate(&SimulationSpec::three_class(per_class as usize, seed as u64))?;
    let model = fit_qda(&data)?;
    let mut single = 0u32;
    let mut multi = 0u32;
    for i in 0..data.n() {
        let (_, phi) = model.classify_with_uncertainty(data.row(i), level)?;
        let spokes = phi
            .regions()
            .iter()
            .filter(|&&r| r != Region::Exterior)
            .count();
        if spokes <= 1 {
            single += 1;
        } else {
            multi += 1;
        }
    }
    Ok(to_json_string(&json!({
        "single_spoke": single,
        "multi_spoke": multi,
    })))
}

fn js_err(e: ghpd::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Steering wheel for a hand-entered posterior (`label, weight` lines).
#[wasm_bindgen]
pub fn posterior_wheel_svg(
    rows: &str,
    alpha: f64,
    size_px: u32,
) -> std::result::Result<String, JsValue> {
    wheel_svg_impl(rows, alpha, size_px).map_err(js_err)
}

/// The credible-set document for the same input, as JSON.
#[wasm_bindgen]
pub fn posterior_summary_json(rows: &str, alpha: f64) -> std::result::Result<String, JsValue> {
    wheel_summary_impl(rows, alpha).map_err(js_err)
}

/// Standard-normal density with the level-`1 - alpha` region shaded.
#[wasm_bindgen]
pub fn normal_hpd_svg(alpha: f64, width: u32, height: u32) -> std::result::Result<String, JsValue> {
    normal_hpd_svg_impl(alpha, width, height).map_err(js_err)
}

/// Interval endpoints, threshold, and boundary mass for the same grid.
#[wasm_bindgen]
pub fn normal_hpd_json(alpha: f64) -> std::result::Result<String, JsValue> {
    normal_hpd_json_impl(alpha).map_err(js_err)
}

/// Seeded three-class benchmark, classified, as a panel of wheels.
#[wasm_bindgen]
pub fn simulation_panel_svg(
    seed: u32,
    alpha: f64,
    per_class: u32,
    size: u32,
) -> std::result::Result<String, JsValue> {
    simulation_panel_impl(seed, alpha, per_class, size).map_err(js_err)
}

/// Counts of certain (single-spoke) vs uncertain wheels in the panel.
#[wasm_bindgen]
pub fn simulation_certainty_json(
    seed: u32,
    alpha: f64,
    per_class: u32,
) -> std::result::Result<String, JsValue> {
    certainty_counts_impl(seed, alpha, per_class).map_err(js_err)
}
