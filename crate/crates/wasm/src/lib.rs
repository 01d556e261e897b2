//! Browser bindings for the demo page in `www/`.

use wasm_bindgen::prelude::*;

use sadic::cf::{self, SimplexPoint};
use sadic::coincidence;
use sadic::fractal;
use sadic::geometry::{ones, right_eigenvector_approx};
use sadic::raster::{self, RenderOptions};
use sadic::DirectiveSequence;

fn js(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn parse(spec: &str) -> Result<DirectiveSequence, JsError> {
    DirectiveSequence::parse(spec).map_err(js)
}

/// RGBA pixels of the Rauzy cloud of `spec`; `translates < 0` draws none.
#[wasm_bindgen]
pub fn render_rgba(
    spec: &str,
    depth: usize,
    min_len: usize,
    width: usize,
    height: usize,
    translates: i32,
) -> Result<Vec<u8>, JsError> {
    let seq = parse(spec)?;
    let u_depth = 60.min(seq.known_len().unwrap_or(usize::MAX));
    let u = right_eigenvector_approx(&seq, u_depth).map_err(js)?.u;
    let cloud = fractal::rauzy_cloud(&seq, depth, min_len, &u, &ones(3)).map_err(js)?;
    let opts = RenderOptions {
        width,
        height,
        extent: None,
        translates: (translates >= 0).then(|| fractal::lattice_translates(translates as i64)),
    };
    Ok(raster::render(&cloud, &opts).map_err(js)?.to_rgba())
}

/// First `n` Brun digits of `(x1, x2)` as a string.
#[wasm_bindgen]
pub fn brun_digits(x1: f64, x2: f64, n: usize) -> Result<String, JsError> {
    let p = SimplexPoint::new(x1, x2);
    if !p.in_simplex(0.0) {
        return Err(JsError::new("point outside 0 <= x1 <= x2 <= 1"));
    }
    Ok(cf::brun_expand(p, n).digit_string())
}

/// Coincidence witness as JSON (`null` if none within `max_l`).
/// `kind` is `strong`, `negative-strong` or `finiteness`.
#[wasm_bindgen]
pub fn coincidence_json(spec: &str, kind: &str, max_l: usize) -> Result<String, JsError> {
    let seq = parse(spec)?;
    let wit = match kind {
        "strong" => coincidence::strong_coincidence(&seq, max_l),
        "negative-strong" => coincidence::negative_strong_coincidence(&seq, max_l),
        "finiteness" => coincidence::finiteness_witness(&seq, max_l, 2.0),
        other => return Err(JsError::new(&format!("unknown kind {other:?}"))),
    }
    .map_err(js)?;
    serde_json::to_string_pretty(&wit).map_err(js)
}
