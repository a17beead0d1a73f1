//! Browser bindings for a small interactive demo: phase-space pictures of
//! propagated packets, the dilation index map and dispersive decay curves.

pub mod demo;

use wasm_bindgen::prelude::*;

fn js(e: tfmeta::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Heatmap {
    inner: demo::Grid2,
}

#[wasm_bindgen]
impl Heatmap {
    #[wasm_bindgen(getter)]
    pub fn cols(&self) -> usize {
        self.inner.cols
    }

    #[wasm_bindgen(getter)]
    pub fn rows(&self) -> usize {
        self.inner.rows
    }

    /// `[x_min, x_max, y_min, y_max]`.
    #[wasm_bindgen(getter)]
    pub fn extent(&self) -> Vec<f64> {
        let (x, y) = (self.inner.x_range, self.inner.y_range);
        vec![x.0, x.1, y.0, y.1]
    }

    #[wasm_bindgen(getter)]
    pub fn data(&self) -> Vec<f64> {
        self.inner.data.clone()
    }
}

#[wasm_bindgen]
pub struct DecayCurve {
    inner: demo::Curve,
}

#[wasm_bindgen]
impl DecayCurve {
    #[wasm_bindgen(getter)]
    pub fn times(&self) -> Vec<f64> {
        self.inner.times.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn measured(&self) -> Vec<f64> {
        self.inner.measured.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn predicted(&self) -> Vec<f64> {
        self.inner.predicted.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn slope(&self) -> f64 {
        self.inner.slope
    }

    #[wasm_bindgen(getter, js_name = profileSlope)]
    pub fn profile_slope(&self) -> f64 {
        self.inner.profile_slope
    }
}

#[wasm_bindgen]
pub fn spectrogram(kind: &str, t: f64, sigma: f64, chirp: f64, center: f64, frequency: f64) -> Result<Heatmap, JsError> {
    let packet = demo::Packet { sigma, chirp, center, frequency };
    demo::spectrogram(kind, t, packet).map(|inner| Heatmap { inner }).map_err(js)
}

#[wasm_bindgen(js_name = muMap)]
pub fn mu_map(res: usize, large: bool) -> Result<Heatmap, JsError> {
    demo::mu_map(res, large).map(|inner| Heatmap { inner }).map_err(js)
}

#[wasm_bindgen(js_name = indexSummary)]
pub fn index_summary(ip: f64, iq: f64) -> Result<String, JsError> {
    demo::index_summary(ip, iq, 24).map_err(js)
}

#[wasm_bindgen(js_name = dispersiveCurve)]
pub fn dispersive_curve(kind: &str, width: f64, r: &str, times: Vec<f64>) -> Result<DecayCurve, JsError> {
    demo::dispersive_curve(kind, width, r, times).map(|inner| DecayCurve { inner }).map_err(js)
}
