use num_complex::Complex64;

use crate::fft::{centered_index, for_each_row, transpose, CenteredFft};
use crate::field::{ComplexField, Measurement};
use crate::{Error, Result};

/// Spectral oversampling before linear interpolation.
const OVERSAMPLE: usize = 32;

/// Band-limited interpolant of one line, evaluated by linear interpolation
/// on a spectrally refined grid.
pub(crate) struct Oversampled {
    buf: Vec<Complex64>,
}

impl Oversampled {
    pub(crate) fn new(x: &[Complex64], coarse: &CenteredFft, fine: &CenteredFft) -> Self {
        let n = x.len();
        let nf = fine.len();
        let mut spec = x.to_vec();
        coarse.forward(&mut spec);
        let mut buf = vec![Complex64::new(0.0, 0.0); nf];
        let off = nf / 2 - n / 2;
        buf[off..off + n].copy_from_slice(&spec);
        fine.inverse(&mut buf);
        let s = ((nf / n) as f64).sqrt();
        buf.iter_mut().for_each(|v| *v *= s);
        Self { buf }
    }

    pub(crate) fn planned(n: usize) -> (CenteredFft, CenteredFft) {
        (CenteredFft::new(n), CenteredFft::new(n * OVERSAMPLE))
    }

    /// Value at centered position `t` in input-pitch units; zero outside the window.
    pub(crate) fn at(&self, t: f64) -> Complex64 {
        let nf = self.buf.len();
        let t = t * OVERSAMPLE as f64;
        let lo = centered_index(0, nf) as f64;
        let hi = centered_index(nf - 1, nf) as f64;
        if !(t >= lo && t <= hi) {
            return Complex64::new(0.0, 0.0);
        }
        let j = (t - lo).floor() as usize;
        let frac = t - lo - j as f64;
        if j + 1 >= nf {
            self.buf[j]
        } else {
            self.buf[j] * (1.0 - frac) + self.buf[j + 1] * frac
        }
    }
}

/// Evaluates the band-limited interpolant of `x` at `k·factor`, `k` centered.
fn resample_line(x: &mut [Complex64], factor: f64, coarse: &CenteredFft, fine: &CenteredFft) {
    let n = x.len();
    let os = Oversampled::new(x, coarse, fine);
    for (k, v) in x.iter_mut().enumerate() {
        *v = os.at(centered_index(k, n) as f64 * factor);
    }
}

fn check_factor(factor: f64) -> Result<()> {
    if !(factor.is_finite() && factor >= 1.0) {
        return Err(Error::param(format!("resampling factor must be at least 1, got {factor}")));
    }
    Ok(())
}

fn resample_complex(data: &mut [Complex64], n: usize, dims: usize, factor: f64) {
    let (coarse, fine) = Oversampled::planned(n);
    let line = |v: &mut [Complex64]| resample_line(v, factor, &coarse, &fine);
    if dims == 1 {
        line(data);
    } else {
        for_each_row(data, n, line);
        let mut t = transpose(data, n, n);
        for_each_row(&mut t, n, line);
        data.copy_from_slice(&transpose(&t, n, n));
    }
}

/// Band-limited rate conversion to pitch `factor × pitch` over a window
/// enlarged by the same factor. `factor < 1` is rejected.
pub fn resample_field(field: &ComplexField, factor: f64) -> Result<ComplexField> {
    check_factor(factor)?;
    let g = field.grid();
    let mut data = field.data().to_vec();
    resample_complex(&mut data, g.n(), g.dims(), factor);
    ComplexField::from_parts_unchecked(*g, data).with_pitch(g.pitch() * factor)
}

/// Real-valued version for intensities on an `n` (1D) or `n × n` (2D) grid.
pub fn resample_real(data: &[f64], n: usize, dims: usize, factor: f64) -> Result<Vec<f64>> {
    check_factor(factor)?;
    if data.len() != n.pow(dims as u32) {
        return Err(Error::dim("resample input length does not match the grid"));
    }
    let mut c: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    resample_complex(&mut c, n, dims, factor);
    Ok(c.into_iter().map(|v| v.re).collect())
}

/// Resamples the detected intensity and takes the square root of its
/// nonnegative part.
pub fn resample_measurement(m: &Measurement, factor: f64) -> Result<Measurement> {
    let g = m.detector_grid();
    let i = resample_real(&m.intensity(), g.n(), g.dims(), factor)?;
    let mut meta = *m.meta();
    meta.scale *= factor;
    Measurement::new(i.into_iter().map(|v| v.max(0.0).sqrt()).collect(), g.with_pitch(g.pitch() * factor)?, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SamplingGrid;
    use std::f64::consts::PI;

    #[test]
    fn unit_factor_is_identity() {
        let g = SamplingGrid::square(16, 0.5).unwrap();
        let f = ComplexField::from_fn(g, |x, y| Complex64::new(x.sin() + y, y.cos() * x));
        let r = resample_field(&f, 1.0).unwrap();
        let e = r.data().iter().zip(f.data()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(e <= 1e-12, "{e}");
        assert_eq!(r.grid(), f.grid());
    }

    #[test]
    fn rejects_downsampling() {
        let g = SamplingGrid::line(8, 1.0).unwrap();
        assert!(resample_field(&ComplexField::zeros(g), 0.9).is_err());
        assert!(resample_real(&[0.0; 8], 8, 1, f64::NAN).is_err());
    }

    #[test]
    fn sinusoid_at_double_pitch() {
        let n = 64;
        // 15 cycles across the window: below half the Nyquist rate
        let f = |x: f64| (2.0 * PI * 15.0 * x / n as f64).cos() + 0.5 * (2.0 * PI * 7.0 * x / n as f64).sin();
        let data: Vec<f64> = (0..n).map(|i| f(centered_index(i, n) as f64)).collect();
        let out = resample_real(&data, n, 1, 2.0).unwrap();
        let mut worst: f64 = 0.0;
        for (k, v) in out.iter().enumerate() {
            let t = centered_index(k, n) as f64 * 2.0;
            if t >= -((n / 2) as f64) && t < (n / 2) as f64 {
                worst = worst.max((v - f(t)).abs());
            } else {
                assert_eq!(*v, 0.0);
            }
        }
        assert!(worst <= 1e-3, "{worst}");
    }

    #[test]
    fn gaussian_energy_preserved() {
        let n = 128;
        let g = SamplingGrid::square(n, 1.0).unwrap();
        let f = ComplexField::from_fn(g, |x, y| Complex64::new((-(x * x + y * y) / (2.0 * 36.0)).exp(), 0.0));
        let r = resample_field(&f, 1.7).unwrap();
        // analytic: ∫∫ exp(-(x²+y²)/σ²) = πσ², σ² = 36
        let analytic = PI * 36.0;
        assert!((r.energy() / analytic - 1.0).abs() < 1e-2, "{}", r.energy() / analytic);
        assert!((f.energy() / analytic - 1.0).abs() < 1e-2);
    }
}
