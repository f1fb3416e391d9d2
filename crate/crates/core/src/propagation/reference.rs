use num_complex::Complex64;
use std::f64::consts::PI;

use super::fresnel::axis_prefactor;
use super::{detector_grid, OpticalConfig};
use crate::fft::{centered_index, for_each_row_indexed, transpose, Interpolator};
use crate::field::{ComplexField, SamplingGrid};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ReferenceOptions {
    /// Output grid; defaults to the FrFT detector grid (pitch `s2·Δx′`).
    pub destination: Option<SamplingGrid>,
    /// Source refinement factor; chosen from the kernel bandwidth when absent.
    pub refine: Option<usize>,
    /// Evaluate the full 2D double sum instead of the separable form. Cost
    /// grows with the fourth power of the grid size.
    pub direct: bool,
}

/// Sub-samples per source pitch so that the kernel phase advances by at most
/// a quarter cycle between refined samples anywhere in the output window.
fn refine_factor(cfg: &OpticalConfig, dst: &SamplingGrid) -> usize {
    let xmax = cfg.grid().window() / 2.0 + dst.window() / 2.0;
    let need = (4.0 * cfg.grid().pitch() * xmax / (cfg.wavelength() * cfg.distance())).ceil() as usize;
    need.next_power_of_two().clamp(4, 256)
}

/// Rows of the 1D quadrature operator `R = K_fine · U_q`, `dst.n() × n`.
fn axis_operator(cfg: &OpticalConfig, dst: &SamplingGrid, q: usize) -> Vec<Complex64> {
    let g = cfg.grid();
    let n = g.n();
    let ld = cfg.wavelength() * cfg.distance();
    let h = g.pitch() / q as f64;
    let weight = axis_prefactor(cfg) * h;
    let interp = Interpolator::new(n, q);
    let fine: Vec<f64> = (0..n * q).map(|j| centered_index(j, n * q) as f64 * h).collect();
    let mut r = vec![Complex64::new(0.0, 0.0); dst.n() * n];
    for_each_row_indexed(&mut r, n, |i, row| {
        let x = dst.coord(i);
        let k: Vec<Complex64> = fine.iter().map(|xi| weight * Complex64::from_polar(1.0, PI * (x - xi) * (x - xi) / ld)).collect();
        row.copy_from_slice(&interp.transpose(&k));
    });
    r
}

/// `out[i] = Σ_j m[i, j] v[j]` for every row `v` of `vs`, returned row-major.
fn apply_rows(m: &[Complex64], m_rows: usize, vs: &[Complex64], n: usize) -> Vec<Complex64> {
    let count = vs.len() / n;
    let mut out = vec![Complex64::new(0.0, 0.0); count * m_rows];
    for_each_row_indexed(&mut out, m_rows, |k, o| {
        let v = &vs[k * n..(k + 1) * n];
        for (i, oi) in o.iter_mut().enumerate() {
            *oi = m[i * n..(i + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum();
        }
    });
    out
}

/// Trapezium-rule evaluation of the Fresnel diffraction integral.
///
/// The source is taken as the band-limited interpolant of its samples and
/// integrated on a grid refined so that the quadratic-phase kernel is
/// resolved. The integral is separable, so the 2D result is `R·U·Rᵀ` with the
/// 1D operator `R`.
pub fn propagate_reference(cfg: &OpticalConfig, field: &ComplexField, opts: ReferenceOptions) -> Result<ComplexField> {
    cfg.check_field(field)?;
    let g = cfg.grid();
    let dst = match opts.destination {
        Some(d) => d,
        None => detector_grid(cfg)?,
    };
    if dst.dims() != g.dims() {
        return Err(Error::dim("destination grid dimensionality differs from the source"));
    }
    let q = match opts.refine {
        Some(0) => return Err(Error::param("refinement factor must be at least 1")),
        Some(q) => q,
        None => refine_factor(cfg, &dst),
    };
    let n = g.n();
    let nd = dst.n();
    let carrier = cfg.carrier();
    let mut data = if g.dims() == 1 {
        let r = axis_operator(cfg, &dst, q);
        apply_rows(&r, nd, field.data(), n)
    } else if opts.direct {
        direct_2d(cfg, &dst, field, q)
    } else {
        let r = axis_operator(cfg, &dst, q);
        // rows: T = U·Rᵀ (n × nd); columns: out = R·T
        let t = apply_rows(&r, nd, field.data(), n);
        let tt = transpose(&t, n, nd);
        let out_t = apply_rows(&r, nd, &tt, n);
        transpose(&out_t, nd, nd)
    };
    data.iter_mut().for_each(|v| *v *= carrier);
    Ok(ComplexField::from_parts_unchecked(dst, data))
}

fn direct_2d(cfg: &OpticalConfig, dst: &SamplingGrid, field: &ComplexField, q: usize) -> Vec<Complex64> {
    let g = cfg.grid();
    let n = g.n();
    let nf = n * q;
    let interp = Interpolator::new(n, q);
    // refine rows, then columns
    let rows: Vec<Complex64> = field.data().chunks(n).flat_map(|r| interp.apply(r)).collect();
    let cols = transpose(&rows, n, nf);
    let fine_t: Vec<Complex64> = cols.chunks(n).flat_map(|c| interp.apply(c)).collect();
    let fine = transpose(&fine_t, nf, nf);

    let ld = cfg.wavelength() * cfg.distance();
    let h = g.pitch() / q as f64;
    let w = axis_prefactor(cfg) * h;
    let w2 = w * w;
    let xi: Vec<f64> = (0..nf).map(|j| centered_index(j, nf) as f64 * h).collect();
    let nd = dst.n();
    let mut out = vec![Complex64::new(0.0, 0.0); nd * nd];
    for_each_row_indexed(&mut out, nd, |r, orow| {
        let y = dst.coord(r);
        for (c, o) in orow.iter_mut().enumerate() {
            let x = dst.coord(c);
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, &eta) in xi.iter().enumerate() {
                for (b, &xb) in xi.iter().enumerate() {
                    let phase = PI * ((x - xb) * (x - xb) + (y - eta) * (y - eta)) / ld;
                    acc += fine[a * nf + b] * Complex64::from_polar(1.0, phase);
                }
            }
            *o = acc * w2;
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: &[Complex64], b: &[Complex64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        (num / b.iter().map(|y| y.norm_sqr()).sum::<f64>()).sqrt()
    }

    #[test]
    fn refine_factor_desk() {
        let cfg = OpticalConfig::new(500e-9, 1e-3, SamplingGrid::square(512, 1000e-6 / 512.0).unwrap()).unwrap();
        assert_eq!(refine_factor(&cfg, &detector_grid(&cfg).unwrap()), 16);
        let far = cfg.with_distance(0.05).unwrap();
        assert_eq!(refine_factor(&far, &detector_grid(&far).unwrap()), 4);
    }

    #[test]
    fn zero_field() {
        let cfg = OpticalConfig::new(500e-9, 1e-3, SamplingGrid::square(16, 1e-5).unwrap()).unwrap();
        let out = propagate_reference(&cfg, &ComplexField::zeros(*cfg.grid()), ReferenceOptions::default()).unwrap();
        assert!(out.data().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn separable_matches_direct_double_sum() {
        let cfg = OpticalConfig::new(500e-9, 2e-3, SamplingGrid::square(12, 4e-6).unwrap()).unwrap();
        let f = ComplexField::from_fn(*cfg.grid(), |x, y| Complex64::new(1.0 + (x * 3e4).sin(), (y * 5e4).cos() * 0.5));
        let dst = SamplingGrid::square(10, 6e-6).unwrap();
        let base = ReferenceOptions {
            destination: Some(dst),
            refine: Some(4),
            direct: false,
        };
        let sep = propagate_reference(&cfg, &f, base).unwrap();
        let dir = propagate_reference(&cfg, &f, ReferenceOptions { direct: true, ..base }).unwrap();
        assert!(rel(sep.data(), dir.data()) < 1e-10);
        assert_eq!(sep.grid(), &dst);
    }

    #[test]
    fn one_dimensional_rows_match_two_dimensional_separable_source() {
        let g1 = SamplingGrid::line(32, 5e-6).unwrap();
        let g2 = SamplingGrid::square(32, 5e-6).unwrap();
        let c1 = OpticalConfig::new(600e-9, 3e-3, g1).unwrap();
        let c2 = OpticalConfig::new(600e-9, 3e-3, g2).unwrap();
        let f = |x: f64| Complex64::new((-(x / 2e-5).powi(2)).exp(), 0.0);
        let a = ComplexField::from_fn(g1, |x, _| f(x));
        let b = ComplexField::from_fn(g2, |x, y| f(x) * f(y));
        let o1 = propagate_reference(&c1, &a, ReferenceOptions::default()).unwrap();
        let o2 = propagate_reference(&c2, &b, ReferenceOptions::default()).unwrap();
        let c = c1.carrier();
        let n = 32;
        let expect: Vec<Complex64> = (0..n * n).map(|k| o1.data()[k / n] * o1.data()[k % n] / c).collect();
        assert!(rel(o2.data(), &expect) < 1e-12);
    }
}
