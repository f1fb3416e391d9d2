use num_complex::Complex64;
use std::f64::consts::PI;

use super::{map_order, OpticalConfig, OrderScale};
use crate::dfrft::{apply_2d_in_place, FrftPlan};
use crate::field::{ComplexField, Measurement, MeasurementMeta};
use crate::Result;

/// Fresnel propagation as a scaled fractional Fourier transform.
///
/// The field is transformed with order `p` on the normalized grid and
/// multiplied by `e^{i2πd/λ}/(1 + i tan α) · exp(iπ tan α (u_x² + u_y²))`
/// (square root of the constant in 1D), with `u` the normalized output
/// coordinate. The output grid has pitch `s2·Δx′`.
pub fn propagate_frft(cfg: &OpticalConfig, field: &ComplexField) -> Result<(ComplexField, OrderScale)> {
    cfg.check_field(field)?;
    let os = map_order(cfg);
    let g = cfg.grid();
    let (n, dims) = (g.n(), g.dims());
    let plan = FrftPlan::normalized(os.p, n)?;
    let mut data = field.data().to_vec();
    if dims == 1 {
        plan.apply_in_place(&mut data);
    } else {
        apply_2d_in_place(&plan, &plan, &mut data);
    }
    let axis_const = Complex64::new(1.0, os.tan_alpha).sqrt().inv();
    let axis: Vec<Complex64> = (0..n)
        .map(|i| {
            let u = crate::fft::centered_index(i, n) as f64 / (n as f64).sqrt();
            axis_const * Complex64::from_polar(1.0, PI * os.tan_alpha * u * u)
        })
        .collect();
    super::fresnel::scale_separable(&mut data, &axis, dims);
    let carrier = cfg.carrier();
    data.iter_mut().for_each(|v| *v *= carrier);
    let out = ComplexField::from_parts_unchecked(*g, data).with_pitch(os.s2 * g.pitch())?;
    Ok((out, os))
}

/// Detected amplitude `|F^p O|·cos α` (`sqrt(cos α)` in 1D) on the detector grid.
pub fn forward_measurement(cfg: &OpticalConfig, object: &ComplexField) -> Result<Measurement> {
    cfg.check_field(object)?;
    let os = map_order(cfg);
    let g = cfg.grid();
    let plan = FrftPlan::normalized(os.p, g.n())?;
    let mut data = object.data().to_vec();
    if g.dims() == 1 {
        plan.apply_in_place(&mut data);
    } else {
        apply_2d_in_place(&plan, &plan, &mut data);
    }
    let k = os.magnitude_scale(g.dims());
    let meta = MeasurementMeta {
        wavelength: Some(cfg.wavelength()),
        distance: Some(cfg.distance()),
        order: os.p,
        scale: os.s2,
    };
    Measurement::new(data.iter().map(|v| v.norm() * k).collect(), g.with_pitch(os.s2 * g.pitch())?, meta)
}
