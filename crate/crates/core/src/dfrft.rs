//! Discrete fractional Fourier transform.
//!
//! The transform of order `p` (angle `α = pπ/2`) has kernel
//!
//! ```text
//! K(u, x) = A · exp(iπ (cot α · x² − 2 csc α · u x + cot α · u²)),   A = sqrt(1 − i cot α)
//! ```
//!
//! and is computed as pre-chirp, linear chirp convolution, post-chirp. That
//! factorisation is only well sampled for `0.5 ≤ |p| ≤ 1.5`, so other orders
//! are reached by composing with a centered DFT. A core stage applied
//! directly to the input runs on a 2× band-limited interpolation and
//! decimates the result; a core stage that follows a DFT works on the DFT
//! samples as they are.
//!
//! With pitch `1/√n` and `p = 1` the transform is the unitary centered DFT.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::fft::{centered_index, for_each_col, for_each_row, CenteredFft, Interpolator};
use crate::field::{parity_flip, ComplexField};
use crate::{Error, Result};

const SNAP: f64 = 1e-12;

/// Reduces `p` modulo 4 into `(-2, 2]`, snapping to integers within `1e-12`.
pub fn reduce_order(p: f64) -> f64 {
    let mut r = p.rem_euclid(4.0);
    for k in 0..=4 {
        if (r - k as f64).abs() < SNAP {
            r = k as f64;
        }
    }
    if r > 2.0 {
        r -= 4.0;
    }
    r
}

/// Public description of one stage of a plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StageKind {
    Identity,
    ParityFlip,
    Dft,
    Idft,
    Core { order: f64, interpolated: bool },
}

/// Pre-chirp, linear chirp convolution and post-chirp for one core order,
/// optionally on a 2× interpolated grid.
#[derive(Clone)]
struct ChirpCore {
    order: f64,
    interp: Option<Interpolator>,
    amp: Complex64,
    chirp: Vec<Complex64>,
    kernel: Vec<Complex64>,
    kernel_adj: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl ChirpCore {
    fn new(order: f64, n: usize, pitch: f64, interpolate: bool) -> Self {
        let alpha = order * FRAC_PI_2;
        let (s, c) = alpha.sin_cos();
        let cot = c / s;
        let csc = 1.0 / s;
        let (len, h, interp) = if interpolate {
            (2 * n, pitch / 2.0, Some(Interpolator::new(n, 2)))
        } else {
            (n, pitch, None)
        };
        let a = Complex64::new(1.0, -cot).sqrt();
        let chirp = (0..len)
            .map(|i| {
                let t = centered_index(i, len) as f64 * h;
                Complex64::from_polar(1.0, std::f64::consts::PI * (cot - csc) * t * t)
            })
            .collect();
        let m = (2 * len - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(m);
        let inv = planner.plan_fft_inverse(m);
        let mut kernel = vec![Complex64::new(0.0, 0.0); m];
        for k in -(len as isize - 1)..=(len as isize - 1) {
            let t = k as f64 * h;
            kernel[k.rem_euclid(m as isize) as usize] = Complex64::from_polar(1.0, std::f64::consts::PI * csc * t * t);
        }
        let mut kernel_adj: Vec<Complex64> = kernel.iter().map(|v| v.conj()).collect();
        fwd.process(&mut kernel);
        fwd.process(&mut kernel_adj);
        let scale = 1.0 / m as f64;
        kernel.iter_mut().chain(kernel_adj.iter_mut()).for_each(|v| *v *= scale);
        Self {
            order,
            interp,
            amp: a * h,
            chirp,
            kernel,
            kernel_adj,
            fwd,
            inv,
        }
    }

    fn convolve(&self, v: &mut [Complex64], spectrum: &[Complex64]) {
        let mut buf = vec![Complex64::new(0.0, 0.0); spectrum.len()];
        buf[..v.len()].copy_from_slice(v);
        self.fwd.process(&mut buf);
        buf.iter_mut().zip(spectrum).for_each(|(b, k)| *b *= k);
        self.inv.process(&mut buf);
        v.copy_from_slice(&buf[..v.len()]);
    }

    fn apply(&self, x: &mut [Complex64]) {
        let mut v = match &self.interp {
            Some(it) => it.apply(x),
            None => x.to_vec(),
        };
        v.iter_mut().zip(&self.chirp).for_each(|(a, c)| *a *= c);
        self.convolve(&mut v, &self.kernel);
        v.iter_mut().zip(&self.chirp).for_each(|(a, c)| *a *= c * self.amp);
        match self.interp {
            Some(_) => x.iter_mut().zip(v.iter().step_by(2)).for_each(|(a, b)| *a = *b),
            None => x.copy_from_slice(&v),
        }
    }

    fn adjoint(&self, y: &mut [Complex64]) {
        let mut v = match self.interp {
            Some(_) => {
                let mut z = vec![Complex64::new(0.0, 0.0); 2 * y.len()];
                z.iter_mut().step_by(2).zip(y.iter()).for_each(|(a, b)| *a = *b);
                z
            }
            None => y.to_vec(),
        };
        v.iter_mut().zip(&self.chirp).for_each(|(a, c)| *a *= c.conj());
        self.convolve(&mut v, &self.kernel_adj);
        let amp = self.amp.conj();
        v.iter_mut().zip(&self.chirp).for_each(|(a, c)| *a *= c.conj() * amp);
        match &self.interp {
            Some(it) => y.copy_from_slice(&it.adjoint(&v)),
            None => y.copy_from_slice(&v),
        }
    }
}

#[derive(Clone)]
enum Stage {
    Identity,
    ParityFlip,
    Fft { inverse: bool, fft: CenteredFft },
    /// Sampled Fourier kernel at a pitch other than `1/√n`.
    ChirpZ { inverse: bool, core: Box<ChirpCore> },
    Core(Box<ChirpCore>),
}

impl Stage {
    fn kind(&self) -> StageKind {
        match self {
            Stage::Identity => StageKind::Identity,
            Stage::ParityFlip => StageKind::ParityFlip,
            Stage::Fft { inverse, .. } | Stage::ChirpZ { inverse, .. } => {
                if *inverse {
                    StageKind::Idft
                } else {
                    StageKind::Dft
                }
            }
            Stage::Core(c) => StageKind::Core {
                order: c.order,
                interpolated: c.interp.is_some(),
            },
        }
    }

    fn apply(&self, x: &mut [Complex64]) {
        match self {
            Stage::Identity => {}
            Stage::ParityFlip => parity_flip(x),
            Stage::Fft { inverse: false, fft } => fft.forward(x),
            Stage::Fft { inverse: true, fft } => fft.inverse(x),
            Stage::ChirpZ { core, .. } | Stage::Core(core) => core.apply(x),
        }
    }

    fn adjoint(&self, x: &mut [Complex64]) {
        match self {
            Stage::Identity => {}
            Stage::ParityFlip => parity_flip(x),
            Stage::Fft { inverse: false, fft } => fft.inverse(x),
            Stage::Fft { inverse: true, fft } => fft.forward(x),
            Stage::ChirpZ { core, .. } | Stage::Core(core) => core.adjoint(x),
        }
    }
}

/// Precomputed transform of one order, length and pitch.
#[derive(Clone)]
pub struct FrftPlan {
    order: f64,
    n: usize,
    pitch: f64,
    stages: Vec<Stage>,
}

impl std::fmt::Debug for FrftPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FrftPlan")
            .field("order", &self.order)
            .field("n", &self.n)
            .field("pitch", &self.pitch)
            .field("stages", &self.stages())
            .finish()
    }
}

impl FrftPlan {
    pub fn new(p: f64, n: usize, pitch: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::NonFinite(format!("transform order {p}")));
        }
        if n < 2 {
            return Err(Error::param(format!("transform length must be at least 2, got {n}")));
        }
        if !(pitch.is_finite() && pitch > 0.0) {
            return Err(Error::param(format!("transform pitch must be positive, got {pitch}")));
        }
        let order = reduce_order(p);
        let normalized = ((pitch * pitch * n as f64) - 1.0).abs() < SNAP;
        let fourier = |inverse: bool| {
            if normalized {
                Stage::Fft {
                    inverse,
                    fft: CenteredFft::new(n),
                }
            } else {
                let o = if inverse { -1.0 } else { 1.0 };
                Stage::ChirpZ {
                    inverse,
                    core: Box::new(ChirpCore::new(o, n, pitch, false)),
                }
            }
        };
        let core = |o: f64, interpolate: bool| Stage::Core(Box::new(ChirpCore::new(o, n, pitch, interpolate)));
        let a = order.abs();
        let stages = if order == 0.0 {
            vec![Stage::Identity]
        } else if order == 2.0 {
            vec![Stage::ParityFlip]
        } else if order == 1.0 {
            vec![fourier(false)]
        } else if order == -1.0 {
            vec![fourier(true)]
        } else if (0.5..=1.5).contains(&a) {
            vec![core(order, true)]
        } else if order > 0.0 {
            // (0, 0.5) or (1.5, 2): one Fourier step brings the core into range
            vec![fourier(false), core(order - 1.0, false)]
        } else {
            vec![fourier(true), core(order + 1.0, false)]
        };
        Ok(Self { order, n, pitch, stages })
    }

    /// Plan on the normalized pitch `1/√n`.
    pub fn normalized(p: f64, n: usize) -> Result<Self> {
        Self::new(p, n, 1.0 / (n as f64).sqrt())
    }

    /// Reduced order in `(-2, 2]`.
    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.order * FRAC_PI_2
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn stages(&self) -> Vec<StageKind> {
        self.stages.iter().map(Stage::kind).collect()
    }

    /// Plan of order `-p`, the (approximate) inverse.
    pub fn inverse_plan(&self) -> Self {
        Self::new(-self.order, self.n, self.pitch).expect("valid plan parameters")
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::dim(format!("plan length {} vs input length {len}", self.n)));
        }
        Ok(())
    }

    /// In-place transform; `x.len()` must equal the plan length.
    pub fn apply_in_place(&self, x: &mut [Complex64]) {
        assert_eq!(x.len(), self.n, "input length does not match plan");
        self.stages.iter().for_each(|s| s.apply(x));
    }

    /// In-place adjoint; `x.len()` must equal the plan length.
    pub fn adjoint_in_place(&self, x: &mut [Complex64]) {
        assert_eq!(x.len(), self.n, "input length does not match plan");
        self.stages.iter().rev().for_each(|s| s.adjoint(x));
    }

    pub fn apply_1d(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(x.len())?;
        let mut y = x.to_vec();
        self.apply_in_place(&mut y);
        Ok(y)
    }

    pub fn adjoint_1d(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(y.len())?;
        let mut x = y.to_vec();
        self.adjoint_in_place(&mut x);
        Ok(x)
    }

    /// Applies the order `-p` transform.
    pub fn inverse_1d(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        self.inverse_plan().apply_1d(y)
    }

    /// Dense `n × n` matrix of the operator, built column by column.
    pub fn materialize(&self) -> Vec<Complex64> {
        let n = self.n;
        let mut m = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            self.apply_in_place(&mut e);
            for i in 0..n {
                m[i * n + j] = e[i];
            }
        }
        m
    }
}

fn check_2d(px: &FrftPlan, py: &FrftPlan, field: &ComplexField) -> Result<()> {
    let g = field.grid();
    if g.dims() != 2 {
        return Err(Error::dim("2D transform needs a 2D field"));
    }
    px.check_len(g.n())?;
    py.check_len(g.n())
}

/// Rows with `px`, then columns with `py`, in place on a row-major `n × n` buffer.
pub fn apply_2d_in_place(px: &FrftPlan, py: &FrftPlan, data: &mut [Complex64]) {
    let n = px.n;
    for_each_row(data, n, |r| px.apply_in_place(r));
    for_each_col(data, n, n, |c| py.apply_in_place(c));
}

pub fn adjoint_2d_in_place(px: &FrftPlan, py: &FrftPlan, data: &mut [Complex64]) {
    let n = px.n;
    for_each_col(data, n, n, |c| py.adjoint_in_place(c));
    for_each_row(data, n, |r| px.adjoint_in_place(r));
}

/// Separable 2D transform; the output keeps the input grid.
pub fn apply_2d(px: &FrftPlan, py: &FrftPlan, field: &ComplexField) -> Result<ComplexField> {
    check_2d(px, py, field)?;
    let mut data = field.data().to_vec();
    apply_2d_in_place(px, py, &mut data);
    Ok(ComplexField::from_parts_unchecked(*field.grid(), data))
}

pub fn adjoint_2d(px: &FrftPlan, py: &FrftPlan, field: &ComplexField) -> Result<ComplexField> {
    check_2d(px, py, field)?;
    let mut data = field.data().to_vec();
    adjoint_2d_in_place(px, py, &mut data);
    Ok(ComplexField::from_parts_unchecked(*field.grid(), data))
}

pub fn inverse_2d(px: &FrftPlan, py: &FrftPlan, field: &ComplexField) -> Result<ComplexField> {
    apply_2d(&px.inverse_plan(), &py.inverse_plan(), field)
}

/// Riemann-sum discretisation of the continuous kernel, for verification.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl KernelMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.n + col]
    }

    /// Row-major entries.
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.n {
            return Err(Error::dim(format!("kernel size {} vs input length {}", self.n, x.len())));
        }
        Ok(self.data.chunks(self.n).map(|row| row.iter().zip(x).map(|(k, v)| k * v).sum()).collect())
    }

    /// `self · other`.
    pub fn compose(&self, other: &KernelMatrix) -> KernelMatrix {
        let n = self.n;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        KernelMatrix { n, data }
    }

    pub fn adjoint(&self) -> KernelMatrix {
        let n = self.n;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        KernelMatrix { n, data }
    }
}

/// `K[m, m'] = A · exp(iπ(cot α (m'Δx)² − 2 csc α (mΔx)(m'Δx) + cot α (mΔx)²)) · Δx`.
///
/// Orders congruent to 0 or 2 have Dirac kernels and are refused.
pub fn kernel_oracle(p: f64, n: usize, pitch: f64) -> Result<KernelMatrix> {
    if !p.is_finite() {
        return Err(Error::NonFinite(format!("transform order {p}")));
    }
    let order = reduce_order(p);
    if order == 0.0 || order == 2.0 {
        return Err(Error::param(format!("order {p} has a Dirac kernel; use identity or parity flip")));
    }
    if n < 2 || !(pitch.is_finite() && pitch > 0.0) {
        return Err(Error::param("kernel needs n >= 2 and a positive pitch"));
    }
    let alpha = order * FRAC_PI_2;
    let (s, c) = alpha.sin_cos();
    let (cot, csc) = (c / s, 1.0 / s);
    let a = Complex64::new(1.0, -cot).sqrt() * pitch;
    let t: Vec<f64> = (0..n).map(|i| centered_index(i, n) as f64 * pitch).collect();
    let mut data = Vec::with_capacity(n * n);
    for &u in &t {
        for &x in &t {
            let phase = std::f64::consts::PI * (cot * x * x - 2.0 * csc * u * x + cot * u * u);
            data.push(a * Complex64::from_polar(1.0, phase));
        }
    }
    Ok(KernelMatrix { n, data })
}
