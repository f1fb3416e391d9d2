//! Near-field (Fresnel) diffraction: a quadrature reference, the single-FFT
//! and transfer-function propagators, and the FrFT measurement model.

mod compare;
mod fresnel;
mod frft;
mod reference;
pub(crate) mod resample;

pub use compare::{compare_models, comparison_csv, Comparison, ComparisonRow, Model};
pub use fresnel::{propagate_sft, propagate_tf, sft_pitch};
pub use frft::{forward_measurement, propagate_frft};
pub use reference::{propagate_reference, ReferenceOptions};
pub use resample::{resample_field, resample_measurement, resample_real};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::field::{ComplexField, SamplingGrid};
use crate::{Error, Result};

/// Wavelength, distance and source sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpticalConfig {
    wavelength: f64,
    distance: f64,
    grid: SamplingGrid,
}

impl OpticalConfig {
    pub fn new(wavelength: f64, distance: f64, grid: SamplingGrid) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::param(format!("wavelength must be positive, got {wavelength}")));
        }
        if !(distance.is_finite() && distance > 0.0) {
            return Err(Error::param(format!("distance must be positive, got {distance}")));
        }
        Ok(Self {
            wavelength,
            distance,
            grid,
        })
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn with_distance(&self, distance: f64) -> Result<Self> {
        Self::new(self.wavelength, distance, self.grid)
    }

    /// `λd N / L²`, the tangent of the FrFT angle.
    pub fn tan_alpha(&self) -> f64 {
        self.wavelength * self.distance * self.grid.n() as f64 / (self.grid.window() * self.grid.window())
    }

    /// `exp(i2πd/λ)`, with the phase reduced before exponentiation.
    pub fn carrier(&self) -> Complex64 {
        let cycles = self.distance / self.wavelength;
        Complex64::from_polar(1.0, 2.0 * PI * (cycles - cycles.floor()))
    }

    pub(crate) fn check_field(&self, field: &ComplexField) -> Result<()> {
        self.grid.check_same(field.grid(), "field vs optical grid")?;
        let (a, b) = (self.grid.pitch(), field.grid().pitch());
        if (a - b).abs() > 1e-9 * a {
            return Err(Error::dim(format!("field pitch {b} vs optical pitch {a}")));
        }
        Ok(())
    }
}

/// Fractional order and detector scale factor of a propagation distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderScale {
    pub p: f64,
    pub s2: f64,
    pub alpha: f64,
    pub tan_alpha: f64,
}

impl OrderScale {
    /// `|F^p|` to detected-field magnitude: `cos α` in 2D, `sqrt(cos α)` in 1D.
    pub fn magnitude_scale(&self, dims: usize) -> f64 {
        self.alpha.cos().powf(dims as f64 / 2.0)
    }
}

/// `tan α = λdN/L²`, `p = 2α/π`, `s2 = sqrt(1 + tan²α)`.
pub fn map_order(cfg: &OpticalConfig) -> OrderScale {
    let t = cfg.tan_alpha();
    let alpha = t.atan();
    OrderScale {
        p: alpha / (PI / 2.0),
        s2: (1.0 + t * t).sqrt(),
        alpha,
        tan_alpha: t,
    }
}

/// Detector grid of the FrFT model: pitch `s2·Δx′`.
pub fn detector_grid(cfg: &OpticalConfig) -> Result<SamplingGrid> {
    cfg.grid.with_pitch(map_order(cfg).s2 * cfg.grid.pitch())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xray(d: f64) -> OpticalConfig {
        OpticalConfig::new(0.248e-9, d, SamplingGrid::square(256, 51.2e-6 / 256.0).unwrap()).unwrap()
    }

    #[test]
    fn xray_orders() {
        let r = |a: f64, b: f64| (a - b).abs() / b;
        let o = map_order(&xray(0.1));
        assert!(r(o.p, 0.7507) < 1e-3 && r(o.s2, 2.6198) < 1e-3, "{o:?}");
        let o = map_order(&xray(0.25));
        assert!(r(o.p, 0.8958) < 1e-3 && r(o.s2, 6.1357) < 1e-3, "{o:?}");
        let o = map_order(&xray(10.0));
        assert!(r(o.p, 1.0) < 1e-2 && r(o.s2, 242.15) < 1e-3, "{o:?}");
        let g = detector_grid(&xray(10.0)).unwrap();
        assert!(r(g.pitch(), 48.43e-6) < 1e-3);
        assert!(r(g.window(), 12.40e-3) < 1e-3);
    }

    #[test]
    fn short_distance_limit() {
        let o = map_order(&xray(1e-12));
        assert!(o.p < 1e-9 && (o.s2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_distance() {
        let mut last = map_order(&xray(1e-6));
        for k in 1..60 {
            let o = map_order(&xray(1e-6 * 1.5f64.powi(k)));
            assert!(o.p > last.p && o.s2 > last.s2 && o.p < 1.0 && o.p > 0.0);
            last = o;
        }
    }

    #[test]
    fn config_validation() {
        let g = SamplingGrid::line(8, 1.0).unwrap();
        assert!(OpticalConfig::new(0.0, 1.0, g).is_err());
        assert!(OpticalConfig::new(1.0, -1.0, g).is_err());
        assert!(OpticalConfig::new(1.0, f64::NAN, g).is_err());
    }

    #[test]
    fn carrier_phase_reduction() {
        let g = SamplingGrid::line(8, 1.0).unwrap();
        let c = OpticalConfig::new(500e-9, 0.05 + 125e-9, g).unwrap().carrier();
        assert!((c - Complex64::new(0.0, 1.0)).norm() < 1e-6);
    }
}
