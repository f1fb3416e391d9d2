//! WebAssembly bindings for the browser demo in `www/`.
//!
//! The `render_*` functions do the work and return grayscale images; the
//! `#[wasm_bindgen]` wrappers turn them into RGBA buffers for a canvas.

use std::f64::consts::PI;

use fracfield::analysis::frwvd_1d;
use fracfield::field::{circular_shift, conjugate_flip, encode_object, ComplexField, ObjectKind, SamplingGrid};
use fracfield::propagation::{detector_grid, map_order, propagate_frft, OpticalConfig};
use fracfield::retrieval::FrftOperator;
use fracfield::scene::{natural_scene, square_aperture};
use fracfield::Complex64;
use wasm_bindgen::prelude::*;

/// Row-major grayscale image in `[0, 1]` with the numbers shown next to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub width: usize,
    pub height: usize,
    pub gray: Vec<f64>,
    pub order: f64,
    pub scale: f64,
    /// Relative change against the unperturbed case, where meaningful.
    pub change: f64,
}

impl Rendered {
    fn rgba(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.gray.len() * 4);
        for &g in &self.gray {
            let v = (g.clamp(0.0, 1.0) * 255.0).round() as u8;
            out.extend_from_slice(&[v, v, v, 255]);
        }
        out
    }
}

fn to_display(v: &[f64], log: bool) -> Vec<f64> {
    let peak = v.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return vec![0.0; v.len()];
    }
    v.iter()
        .map(|x| {
            let r = x / peak;
            if log {
                (1.0 + 1e3 * r).log10() / 1001f64.log10()
            } else {
                r
            }
        })
        .collect()
}

fn err(e: fracfield::Error) -> String {
    e.to_string()
}

/// Intensity a distance `distance_mm` behind a square aperture, on the
/// FrFT detector grid.
pub fn render_diffraction(n: usize, wavelength_nm: f64, distance_mm: f64, window_mm: f64, aperture_mm: f64, log: bool) -> Result<Rendered, String> {
    let pitch = window_mm * 1e-3 / n as f64;
    let img = square_aperture(n, pitch, aperture_mm * 1e-3).map_err(err)?;
    let cfg = OpticalConfig::new(wavelength_nm * 1e-9, distance_mm * 1e-3, *img.grid()).map_err(err)?;
    let (field, os) = propagate_frft(&cfg, &encode_object(&img, ObjectKind::Amplitude)).map_err(err)?;
    let det = detector_grid(&cfg).map_err(err)?;
    Ok(Rendered {
        width: n,
        height: n,
        gray: to_display(&field.intensity(), log),
        order: os.p,
        scale: det.pitch() / pitch,
        change: 0.0,
    })
}

/// `|F^p|` of the test scene after an optional circular shift and conjugate
/// flip; `change` is the relative distance to the unperturbed magnitude.
pub fn render_frft_magnitude(n: usize, order: f64, shift: isize, flip: bool) -> Result<Rendered, String> {
    let img = natural_scene(n, 7, 1.0).map_err(err)?;
    let obj = encode_object(&img, ObjectKind::Amplitude);
    let mut moved = circular_shift(&obj, shift, shift);
    if flip {
        moved = conjugate_flip(&moved);
    }
    let op = FrftOperator::from_order(order, *obj.grid()).map_err(err)?;
    let base = op.measure(&obj).map_err(err)?;
    let mag = op.measure(&moved).map_err(err)?;
    let num: f64 = base.iter().zip(&mag).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = base.iter().map(|a| a * a).sum();
    Ok(Rendered {
        width: n,
        height: n,
        gray: to_display(&mag, true),
        order,
        scale: 1.0,
        change: (num / den).sqrt(),
    })
}

/// Fractional Wigner–Ville map of a windowed linear chirp `exp(iπ c x²)`.
/// Rows are frequency (top is positive), columns are position.
pub fn render_fractional_wvd(n: usize, alpha: f64, chirp_rate: f64) -> Result<Rendered, String> {
    let g = SamplingGrid::line(n, 1.0 / (n as f64).sqrt()).map_err(err)?;
    let f = ComplexField::from_fn(g, |x, _| Complex64::from_polar((-0.05 * PI * x * x).exp(), PI * chirp_rate * x * x));
    let map = frwvd_1d(&f, alpha).map_err(err)?;
    let w = map.real().expect("fractional WVD is real");
    let peak = w.iter().copied().fold(0.0, f64::max);
    let mut gray = vec![0.0; n * n];
    for (i, row) in w.chunks(n).enumerate() {
        for (k, v) in row.iter().enumerate() {
            gray[(n - 1 - k) * n + i] = if peak > 0.0 { (v / peak).max(0.0) } else { 0.0 };
        }
    }
    Ok(Rendered {
        width: n,
        height: n,
        gray,
        order: alpha / (PI / 2.0),
        scale: map.prefactor,
        change: 0.0,
    })
}

/// Image handed to JavaScript.
#[wasm_bindgen]
pub struct Frame {
    inner: Rendered,
}

#[wasm_bindgen]
impl Frame {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.inner.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.inner.height
    }

    #[wasm_bindgen(getter)]
    pub fn order(&self) -> f64 {
        self.inner.order
    }

    #[wasm_bindgen(getter)]
    pub fn scale(&self) -> f64 {
        self.inner.scale
    }

    #[wasm_bindgen(getter)]
    pub fn change(&self) -> f64 {
        self.inner.change
    }

    pub fn rgba(&self) -> Vec<u8> {
        self.inner.rgba()
    }
}

fn frame(r: Result<Rendered, String>) -> Result<Frame, JsError> {
    r.map(|inner| Frame { inner }).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn diffraction_pattern(n: usize, wavelength_nm: f64, distance_mm: f64, window_mm: f64, aperture_mm: f64, log: bool) -> Result<Frame, JsError> {
    frame(render_diffraction(n, wavelength_nm, distance_mm, window_mm, aperture_mm, log))
}

#[wasm_bindgen]
pub fn frft_magnitude(n: usize, order: f64, shift: i32, flip: bool) -> Result<Frame, JsError> {
    frame(render_frft_magnitude(n, order, shift as isize, flip))
}

#[wasm_bindgen]
pub fn fractional_wvd(n: usize, alpha: f64, chirp_rate: f64) -> Result<Frame, JsError> {
    frame(render_fractional_wvd(n, alpha, chirp_rate))
}

/// Order `p` and scale `s2` for a propagation distance, without rendering.
#[wasm_bindgen]
pub fn order_for_distance(n: usize, wavelength_nm: f64, distance_mm: f64, window_mm: f64) -> Result<Vec<f64>, JsError> {
    let grid = SamplingGrid::square(n, window_mm * 1e-3 / n as f64).map_err(|e| JsError::new(&e.to_string()))?;
    let cfg = OpticalConfig::new(wavelength_nm * 1e-9, distance_mm * 1e-3, grid).map_err(|e| JsError::new(&e.to_string()))?;
    let os = map_order(&cfg);
    Ok(vec![os.p, os.s2])
}
