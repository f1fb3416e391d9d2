use num_complex::Complex64;
use std::f64::consts::PI;

use super::OpticalConfig;
use crate::fft::{for_each_col, for_each_row, CenteredFft};
use crate::field::ComplexField;
use crate::Result;

/// Output pitch of the single-FFT propagator, `λd/(NΔx′)`.
pub fn sft_pitch(cfg: &OpticalConfig) -> f64 {
    cfg.wavelength() * cfg.distance() / cfg.grid().window()
}

/// Applies `f` along every axis of a 1D or 2D buffer.
pub(crate) fn each_axis(data: &mut [Complex64], n: usize, dims: usize, f: impl Fn(&mut [Complex64]) + Sync + Send + Copy) {
    if dims == 1 {
        f(data);
    } else {
        for_each_row(data, n, f);
        for_each_col(data, n, n, f);
    }
}

/// Multiplies every sample by `g(x)·g(y)` (just `g(x)` in 1D), where `g` is
/// tabulated per axis index.
pub(crate) fn scale_separable(data: &mut [Complex64], axis: &[Complex64], dims: usize) {
    let n = axis.len();
    for (k, v) in data.iter_mut().enumerate() {
        *v *= if dims == 1 { axis[k] } else { axis[k / n] * axis[k % n] };
    }
}

/// `1/sqrt(iλd)` per axis.
pub(crate) fn axis_prefactor(cfg: &OpticalConfig) -> Complex64 {
    Complex64::new(0.0, cfg.wavelength() * cfg.distance()).sqrt().inv()
}

/// Fresnel integral evaluated with one centered DFT. The output grid has
/// pitch [`sft_pitch`].
pub fn propagate_sft(cfg: &OpticalConfig, field: &ComplexField) -> Result<ComplexField> {
    cfg.check_field(field)?;
    let g = cfg.grid();
    let (n, dims) = (g.n(), g.dims());
    let ld = cfg.wavelength() * cfg.distance();
    let out_pitch = sft_pitch(cfg);
    let chirp_in: Vec<Complex64> = g.coords().iter().map(|x| Complex64::from_polar(1.0, PI * x * x / ld)).collect();
    let dft_scale = (n as f64).sqrt() * g.pitch();
    let pre = axis_prefactor(cfg) * dft_scale;
    let chirp_out: Vec<Complex64> = (0..n)
        .map(|i| {
            let x = crate::fft::centered_index(i, n) as f64 * out_pitch;
            pre * Complex64::from_polar(1.0, PI * x * x / ld)
        })
        .collect();
    let mut data = field.data().to_vec();
    scale_separable(&mut data, &chirp_in, dims);
    let fft = CenteredFft::new(n);
    each_axis(&mut data, n, dims, |v| fft.forward(v));
    scale_separable(&mut data, &chirp_out, dims);
    let carrier = cfg.carrier();
    data.iter_mut().for_each(|v| *v *= carrier);
    ComplexField::from_parts_unchecked(*g, data).with_pitch(out_pitch)
}

/// Fresnel propagation as multiplication of the spectrum by
/// `exp(i2πd/λ)·exp(−iπλd f²)`, `f = k/(NΔx′)`. Pitch is preserved.
pub fn propagate_tf(cfg: &OpticalConfig, field: &ComplexField) -> Result<ComplexField> {
    cfg.check_field(field)?;
    let g = cfg.grid();
    let (n, dims) = (g.n(), g.dims());
    let ld = cfg.wavelength() * cfg.distance();
    let h: Vec<Complex64> = (0..n)
        .map(|k| {
            let f = crate::fft::centered_index(k, n) as f64 / g.window();
            Complex64::from_polar(1.0, -PI * ld * f * f)
        })
        .collect();
    let fft = CenteredFft::new(n);
    let mut data = field.data().to_vec();
    each_axis(&mut data, n, dims, |v| fft.forward(v));
    scale_separable(&mut data, &h, dims);
    each_axis(&mut data, n, dims, |v| fft.inverse(v));
    let carrier = cfg.carrier();
    data.iter_mut().for_each(|v| *v *= carrier);
    Ok(ComplexField::from_parts_unchecked(*g, data))
}
