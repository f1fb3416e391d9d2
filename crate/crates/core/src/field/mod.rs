//! Sampling grids, complex fields, images and measurements.

mod metrics;
mod noise;

pub use metrics::{mse, psnr, ssim, FidelityScore};
pub use noise::{add_noise, NoiseModel};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::fft::{centered_index, position};
use crate::{Error, Result};

/// Centered sample lattice, `n` samples per axis at spacing `pitch` (meters,
/// or dimensionless for normalized transforms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingGrid {
    n: usize,
    pitch: f64,
    dims: usize,
}

impl SamplingGrid {
    pub fn new(n: usize, pitch: f64, dims: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::param(format!("grid needs at least 2 samples, got {n}")));
        }
        if !(pitch.is_finite() && pitch > 0.0) {
            return Err(Error::param(format!("grid pitch must be positive, got {pitch}")));
        }
        if !(dims == 1 || dims == 2) {
            return Err(Error::param(format!("grid must be 1D or 2D, got {dims}D")));
        }
        Ok(Self { n, pitch, dims })
    }

    pub fn line(n: usize, pitch: f64) -> Result<Self> {
        Self::new(n, pitch, 1)
    }

    pub fn square(n: usize, pitch: f64) -> Result<Self> {
        Self::new(n, pitch, 2)
    }

    /// Grid with the dimensionless pitch `1/sqrt(n)` used by the FrFT.
    pub fn normalized(n: usize, dims: usize) -> Result<Self> {
        Self::new(n, 1.0 / (n as f64).sqrt(), dims)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Physical window `n * pitch`.
    pub fn window(&self) -> f64 {
        self.n as f64 * self.pitch
    }

    /// Total number of samples (`n` or `n²`).
    pub fn len(&self) -> usize {
        self.n.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn with_pitch(&self, pitch: f64) -> Result<Self> {
        Self::new(self.n, pitch, self.dims)
    }

    /// Coordinate of array position `i` along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        centered_index(i, self.n) as f64 * self.pitch
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    pub(crate) fn check_same(&self, other: &SamplingGrid, what: &str) -> Result<()> {
        if self.n != other.n || self.dims != other.dims {
            return Err(Error::dim(format!(
                "{what}: {}D grid of {} samples vs {}D grid of {}",
                self.dims, self.n, other.dims, other.n
            )));
        }
        Ok(())
    }
}

/// Complex samples on a [`SamplingGrid`], row-major for 2D.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: SamplingGrid,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: SamplingGrid, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::dim(format!(
                "field has {} samples, grid expects {}",
                data.len(),
                grid.len()
            )));
        }
        if data.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("field sample".into()));
        }
        Ok(Self { grid, data })
    }

    pub fn zeros(grid: SamplingGrid) -> Self {
        Self {
            grid,
            data: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Builds a field by evaluating `f(x, y)` at the sample coordinates
    /// (`y = 0` for 1D grids).
    pub fn from_fn(grid: SamplingGrid, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let xs = grid.coords();
        let data = if grid.dims() == 1 {
            xs.iter().map(|&x| f(x, 0.0)).collect()
        } else {
            xs.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).map(|(x, y)| f(x, y)).collect()
        };
        Self { grid, data }
    }

    pub(crate) fn from_parts_unchecked(grid: SamplingGrid, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), grid.len());
        Self { grid, data }
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    /// Same samples, different grid spacing.
    pub fn with_pitch(mut self, pitch: f64) -> Result<Self> {
        self.grid = self.grid.with_pitch(pitch)?;
        Ok(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Sum of |u|² times the sample area, i.e. the Riemann sum of the energy.
    pub fn energy(&self) -> f64 {
        self.norm_sqr() * self.grid.pitch().powi(self.grid.dims() as i32)
    }

    pub fn magnitude(&self) -> Vec<f64> {
        self.data.iter().map(|v| v.norm()).collect()
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.data.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn scale(mut self, s: Complex64) -> Self {
        self.data.iter_mut().for_each(|v| *v *= s);
        self
    }

    /// `⟨self, other⟩ = Σ conj(self) · other`.
    pub fn inner(&self, other: &ComplexField) -> Result<Complex64> {
        self.grid.check_same(&other.grid, "inner product")?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum())
    }
}

/// Real image with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealImage {
    grid: SamplingGrid,
    data: Vec<f64>,
}

impl RealImage {
    /// Builds an image, clamping every value into `[0, 1]`.
    pub fn new(grid: SamplingGrid, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::dim(format!(
                "image has {} samples, grid expects {}",
                data.len(),
                grid.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("image sample".into()));
        }
        Ok(Self {
            grid,
            data: data.into_iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        })
    }

    pub fn constant(grid: SamplingGrid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.len()])
    }

    /// Rescales arbitrary finite values linearly onto `[0, 1]`.
    pub fn normalized(grid: SamplingGrid, data: &[f64]) -> Result<Self> {
        let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        let scaled = if span > 0.0 {
            data.iter().map(|v| (v - lo) / span).collect()
        } else {
            vec![0.0; data.len()]
        };
        Self::new(grid, scaled)
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// How a grayscale image becomes a complex object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectKind {
    /// `u = img + 0i`.
    Amplitude,
    /// `u = exp(iπ·img)`, phase excursion `[0, π]`.
    Phase,
}

impl std::str::FromStr for ObjectKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "amplitude" => Ok(ObjectKind::Amplitude),
            "phase" => Ok(ObjectKind::Phase),
            other => Err(Error::param(format!("unknown object kind `{other}`"))),
        }
    }
}

pub fn encode_object(img: &RealImage, kind: ObjectKind) -> ComplexField {
    let data = match kind {
        ObjectKind::Amplitude => img.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        ObjectKind::Phase => img.data.iter().map(|&v| Complex64::from_polar(1.0, PI * v)).collect(),
    };
    ComplexField::from_parts_unchecked(img.grid, data)
}

pub fn decode_object(field: &ComplexField, kind: ObjectKind) -> RealImage {
    let data = match kind {
        ObjectKind::Amplitude => field.data.iter().map(|v| v.norm().clamp(0.0, 1.0)).collect(),
        ObjectKind::Phase => field
            .data
            .iter()
            .map(|v| {
                // arg ∈ (-π, π]; negative phases snap to the nearer end of [0, π]
                let t = v.arg() / PI;
                if t >= 0.0 {
                    t
                } else if t > -0.5 {
                    0.0
                } else {
                    1.0
                }
            })
            .collect(),
    };
    RealImage {
        grid: field.grid,
        data,
    }
}

fn wrap(m: isize, n: usize) -> usize {
    m.rem_euclid(n as isize) as usize
}

/// Cyclic shift by `dx` columns and `dy` rows (`dy` ignored in 1D).
pub fn circular_shift(field: &ComplexField, dx: isize, dy: isize) -> ComplexField {
    let n = field.grid.n();
    let src = &field.data;
    let data = if field.grid.dims() == 1 {
        (0..n).map(|i| src[wrap(i as isize - dx, n)]).collect()
    } else {
        let mut out = Vec::with_capacity(n * n);
        for r in 0..n {
            let sr = wrap(r as isize - dy, n);
            for c in 0..n {
                out.push(src[sr * n + wrap(c as isize - dx, n)]);
            }
        }
        out
    };
    ComplexField::from_parts_unchecked(field.grid, data)
}

/// Array position holding centered index `-m` (the index `-n/2` maps to itself).
fn mirror(i: usize, n: usize) -> usize {
    let m = -centered_index(i, n);
    position(m, n).unwrap_or(i)
}

/// `u[m] → conj(u[-m])` on the centered lattice.
pub fn conjugate_flip(field: &ComplexField) -> ComplexField {
    let n = field.grid.n();
    let src = &field.data;
    let data = if field.grid.dims() == 1 {
        (0..n).map(|i| src[mirror(i, n)].conj()).collect()
    } else {
        (0..n * n).map(|k| src[mirror(k / n, n) * n + mirror(k % n, n)].conj()).collect()
    };
    ComplexField::from_parts_unchecked(field.grid, data)
}

/// Parity flip `u[m] → u[-m]` without conjugation.
pub fn parity_flip(data: &mut [Complex64]) {
    let n = data.len();
    let src = data.to_vec();
    for (i, v) in data.iter_mut().enumerate() {
        *v = src[mirror(i, n)];
    }
}

/// Provenance of a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementMeta {
    /// Wavelength in meters; absent for order-only measurements.
    pub wavelength: Option<f64>,
    /// Propagation distance in meters; absent for order-only measurements.
    pub distance: Option<f64>,
    pub order: f64,
    /// Detector pitch over source pitch.
    pub scale: f64,
}

/// Detected amplitude (square root of intensity) on the detector grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    amplitude: Vec<f64>,
    grid: SamplingGrid,
    meta: MeasurementMeta,
}

impl Measurement {
    pub fn new(amplitude: Vec<f64>, grid: SamplingGrid, meta: MeasurementMeta) -> Result<Self> {
        if amplitude.len() != grid.len() {
            return Err(Error::dim(format!(
                "measurement has {} samples, grid expects {}",
                amplitude.len(),
                grid.len()
            )));
        }
        if amplitude.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::param("measurement amplitudes must be finite and nonnegative"));
        }
        if !(meta.scale.is_finite() && meta.scale > 0.0) {
            return Err(Error::param(format!("scale factor must be positive, got {}", meta.scale)));
        }
        Ok(Self { amplitude, grid, meta })
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.amplitude.iter().map(|a| a * a).collect()
    }

    pub fn detector_grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn meta(&self) -> &MeasurementMeta {
        &self.meta
    }

    pub fn max_amplitude(&self) -> f64 {
        self.amplitude.iter().copied().fold(0.0, f64::max)
    }

    /// Pitch of the source plane the measurement was generated from.
    pub fn source_pitch(&self) -> f64 {
        self.grid.pitch() / self.meta.scale
    }
}
