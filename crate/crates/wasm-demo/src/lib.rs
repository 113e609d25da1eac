//! Browser bindings. Every export is an ordinary Rust function returning
//! `Result<String, String>`, so the same code is tested natively.

use std::fmt::Write as _;
use std::sync::Arc;

use sierpinski_core::completion::truncate;
use sierpinski_core::euclid::{address_to_point, render, EuclideanGasket, Point2, RenderFormat};
use sierpinski_core::metric::address_distance;
use sierpinski_core::universal::{blowup_experiment, final_morphism, Coalgebra};
use sierpinski_core::Address;
use wasm_bindgen::prelude::*;

/// Deepest render the page offers; 3^9 paths is already ~1.5 MB of SVG.
pub const MAX_DEMO_DEPTH: u32 = 9;

/// SVG of the depth-`depth` approximation.
#[wasm_bindgen]
pub fn render_svg(depth: u32, fill: &str) -> Result<String, String> {
    if depth > MAX_DEMO_DEPTH {
        return Err(format!(
            "depth {depth} exceeds the demo cap {MAX_DEMO_DEPTH}"
        ));
    }
    render(depth as usize, RenderFormat::Svg, fill).map_err(|e| e.to_string())
}

/// Canonical address (to `depth` letters) of the gasket point nearest the
/// clicked position `(x, y)` in plane coordinates.
#[wasm_bindgen]
pub fn address_of_point(x: f64, y: f64, depth: u32) -> Result<String, String> {
    let gasket = EuclideanGasket::default();
    let p = Point2::new(x, y);
    if !gasket.contains(&p) {
        return Err(format!("({x:.4}, {y:.4}) is outside the triangle"));
    }
    let f = final_morphism(Arc::new(gasket), p);
    let addr = truncate(&f, depth as usize).map_err(|e| e.to_string())?;
    Ok(addr.canonicalize().to_string())
}

/// `"k/2^e = decimal"` for two addresses, plus their plane distance.
#[wasm_bindgen]
pub fn distance(x: &str, y: &str) -> Result<String, String> {
    let a: Address = x
        .trim()
        .parse()
        .map_err(|e: sierpinski_core::Error| e.to_string())?;
    let b: Address = y
        .trim()
        .parse()
        .map_err(|e: sierpinski_core::Error| e.to_string())?;
    let euclid = address_to_point(&a).dist(address_to_point(&b));
    Ok(format!(
        "d_G = {}   (Euclidean {euclid:.6})",
        address_distance(&a, &b).describe()
    ))
}

/// Plane coordinates `"x,y"` of an address, for marking it on the drawing.
#[wasm_bindgen]
pub fn point_of_address(addr: &str) -> Result<String, String> {
    let a: Address = addr
        .trim()
        .parse()
        .map_err(|e: sierpinski_core::Error| e.to_string())?;
    let p = address_to_point(&a);
    Ok(format!("{},{}", p.x, p.y))
}

/// Blow-up table as CSV: `n,d_C,d_S_lo,d_S_hi,ratio`.
#[wasm_bindgen]
pub fn blowup_csv(j: u32, depth: u32) -> Result<String, String> {
    let rows = blowup_experiment(j, depth as usize).map_err(|e| e.to_string())?;
    let mut csv = String::from("n,d_C,d_S_lo,d_S_hi,ratio\n");
    for r in rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r.n,
            r.d_c,
            r.d_s.lo().to_decimal_string(),
            r.d_s.hi().to_decimal_string(),
            r.ratio
        );
    }
    Ok(csv)
}
