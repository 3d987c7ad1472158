//! WebAssembly bindings for the browser demo in `www/`.
//!
//! The functions are plain Rust underneath (`*_impl`), so they are tested
//! natively; the `#[wasm_bindgen]` wrappers only convert errors.

use pfo2d::density::{build_ulam, ulam_fixed};
use pfo2d::maps::{certify, make_tent2d, power, NormConvention};
use pfo2d::svg::SvgHeatmap;
use wasm_bindgen::prelude::*;

/// Upper limits keeping a single call interactive in the browser.
pub const MAX_RESOLUTION: usize = 96;
pub const MAX_POWER: usize = 5;

fn check(t: f64, n: usize) -> Result<(), String> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(format!("t = {t} is outside (0, 1]"));
    }
    if !(1..=MAX_POWER).contains(&n) {
        return Err(format!("power = {n} is outside 1..={MAX_POWER}"));
    }
    Ok(())
}

pub fn density_svg_impl(t: f64, resolution: usize, n: usize) -> Result<String, String> {
    check(t, n)?;
    if !(4..=MAX_RESOLUTION).contains(&resolution) {
        return Err(format!(
            "resolution = {resolution} is outside 4..={MAX_RESOLUTION}"
        ));
    }
    let m = power(&make_tent2d(t).map_err(|e| e.to_string())?, n).map_err(|e| e.to_string())?;
    let op = build_ulam(&m, resolution).map_err(|e| e.to_string())?;
    let fp = ulam_fixed(&op, 1e-9, 20_000);
    let h = fp.value.to_density(&op.grid).map_err(|e| e.to_string())?;
    let title = format!(
        "Ulam invariant density, t = {t}, N = {resolution}, {} iterations{}",
        fp.iterations,
        if fp.converged { "" } else { " (not converged)" }
    );
    SvgHeatmap::from_density(&h)
        .with_title(title)
        .render()
        .map_err(|e| e.to_string())
}

pub fn partition_svg_impl(t: f64, n: usize) -> Result<String, String> {
    check(t, n)?;
    let m = power(&make_tent2d(t).map_err(|e| e.to_string())?, n).map_err(|e| e.to_string())?;
    let cells = m
        .branches()
        .iter()
        .enumerate()
        .map(|(i, b)| (b.domain.clone(), i as f64))
        .collect();
    SvgHeatmap::new(cells)
        .with_title(format!(
            "domains of the {} branches of the iterate {n}, t = {t} (shaded by index)",
            m.branches().len()
        ))
        .render()
        .map_err(|e| e.to_string())
}

pub fn certificate_json_impl(t: f64, n: usize) -> Result<String, String> {
    check(t, n)?;
    let m = power(&make_tent2d(t).map_err(|e| e.to_string())?, n).map_err(|e| e.to_string())?;
    let certs = NormConvention::ALL
        .into_iter()
        .map(|c| certify(&m, c))
        .collect::<pfo2d::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    serde_json::to_string_pretty(&certs).map_err(|e| e.to_string())
}

/// SVG heatmap of the Ulam invariant density of `Λ_tⁿ`.
#[wasm_bindgen]
pub fn density_svg(t: f64, resolution: usize, n: usize) -> Result<String, JsError> {
    density_svg_impl(t, resolution, n).map_err(|e| JsError::new(&e))
}

/// SVG of the smoothness partition of `Λ_tⁿ`.
#[wasm_bindgen]
pub fn partition_svg(t: f64, n: usize) -> Result<String, JsError> {
    partition_svg_impl(t, n).map_err(|e| JsError::new(&e))
}

/// JSON array of certificates of `Λ_tⁿ`, one per norm convention.
#[wasm_bindgen]
pub fn certificate_json(t: f64, n: usize) -> Result<String, JsError> {
    certificate_json_impl(t, n).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_at_t1_is_flat() {
        let svg = density_svg_impl(1.0, 8, 1).unwrap();
        assert!(svg.contains("1.000000 – 1.000000"));
    }

    #[test]
    fn partition_has_one_path_per_branch() {
        let svg = partition_svg_impl(0.9, 3).unwrap();
        assert_eq!(svg.matches("<path").count(), 8);
    }

    #[test]
    fn certificates_parse() {
        let v: serde_json::Value =
            serde_json::from_str(&certificate_json_impl(0.95, 3).unwrap()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 3);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(density_svg_impl(1.2, 8, 1).is_err());
        assert!(density_svg_impl(1.0, 1000, 1).is_err());
        assert!(partition_svg_impl(0.9, 0).is_err());
    }
}
