//! Browser bindings for the witness: Wigner heatmaps, `Δ` curves and `ε_max`.

use wasm_bindgen::prelude::*;
use wigwitness::sweep::Family;
use wigwitness::{fock::wigner_at, Complex64, Criterion, EpsSearch, LossyFamily, MapFamily, StateSpec};

fn js<E: std::fmt::Display>(e: E) -> JsError {
    JsError::new(&e.to_string())
}

fn lossy_family(family: &str, param: f64) -> Result<LossyFamily, JsError> {
    let spec: StateSpec = family.parse::<Family>().map_err(js)?.state(param).map_err(js)?;
    LossyFamily::with_default_dim(spec).map_err(js)
}

/// `W(x + iy)` of the lossy state on an `n × n` grid spanning
/// `[−extent, extent]²`, row-major with `y` decreasing down the rows.
#[wasm_bindgen]
pub fn wigner_grid(family: &str, param: f64, eps: f64, n: usize, extent: f64) -> Result<Vec<f64>, JsError> {
    if n < 2 || !(extent > 0.0) {
        return Err(JsError::new("need n >= 2 and extent > 0"));
    }
    let rho = lossy_family(family, param)?.lossy_state(eps).map_err(js)?;
    let step = 2.0 * extent / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for row in 0..n {
        let y = extent - row as f64 * step;
        for col in 0..n {
            let x = -extent + col as f64 * step;
            out.push(wigner_at(&rho, Complex64::new(x, y)));
        }
    }
    Ok(out)
}

/// `Δ` at `ε = k/(points−1)` for `k = 0..points`. The second criterion uses
/// the family's natural map (none, displacement or squeezing).
#[wasm_bindgen]
pub fn delta_curve(family: &str, param: f64, criterion: u8, points: usize) -> Result<Vec<f64>, JsError> {
    if points < 2 {
        return Err(JsError::new("need at least two points"));
    }
    let fam = lossy_family(family, param)?;
    let crit = Criterion::from_number(criterion).map_err(js)?;
    let maps = MapFamily::default_for(fam.spec());
    (0..points)
        .map(|k| {
            let eps = k as f64 / (points - 1) as f64;
            fam.witness(eps, crit, maps).map(|r| r.delta).map_err(js)
        })
        .collect()
}

/// Largest loss that still certifies the state, or `undefined` when none does.
/// The coarse scan uses a `0.01` grid to stay interactive.
#[wasm_bindgen]
pub fn eps_max(family: &str, param: f64, criterion: u8) -> Result<Option<f64>, JsError> {
    let fam = lossy_family(family, param)?;
    let crit = Criterion::from_number(criterion).map_err(js)?;
    let maps = MapFamily::default_for(fam.spec());
    let search = EpsSearch {
        grid_step: 0.01,
        ..EpsSearch::default()
    };
    let res = wigwitness::eps_max(&fam, crit, maps, search).map_err(js)?;
    Ok(res.eps_max)
}
