//! Single-shot fractional Fourier phase retrieval.
//!
//! All solvers minimise the amplitude loss `½‖|A x| − b‖²` for the operator
//! `A = κ·F^p` (same order on both axes) and a measured amplitude `b`.

mod ambiguity;
mod gap;
mod wf;

pub use ambiguity::{ambiguity_demo, AmbiguityReport, AmbiguityRow, AmbiguityRun, AmbiguityRuns};
pub use gap::{gap_tv, total_variation, tv_denoise, tv_denoise_field, tv_denoise_real};
pub use wf::wirtinger_flow;


use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dfrft::{adjoint_2d_in_place, apply_2d_in_place, FrftPlan};
use crate::field::{decode_object, psnr, ComplexField, Measurement, MeasurementMeta, ObjectKind, RealImage, SamplingGrid};
use crate::propagation::{map_order, OpticalConfig};
use crate::{Error, Result};

/// Linear map on fields of one grid, with its adjoint and an approximate
/// inverse.
pub trait LinearOperator {
    fn grid(&self) -> &SamplingGrid;
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64>;
    fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64>;
    fn approx_inverse(&self, y: &[Complex64]) -> Vec<Complex64>;
}

/// `κ·F^p` along every axis of the grid.
#[derive(Debug, Clone)]
pub struct FrftOperator {
    grid: SamplingGrid,
    plan: FrftPlan,
    inverse: FrftPlan,
    kappa: f64,
}

impl FrftOperator {
    /// Operator of the Fresnel measurement model, `κ = cos α` (2D).
    pub fn from_config(cfg: &OpticalConfig) -> Result<Self> {
        let os = map_order(cfg);
        let g = *cfg.grid();
        Self::with_scale(os.p, g, os.magnitude_scale(g.dims()))
    }

    /// Bare `F^p` (`κ = 1`) on a grid.
    pub fn from_order(p: f64, grid: SamplingGrid) -> Result<Self> {
        Self::with_scale(p, grid, 1.0)
    }

    /// Operator matching a measurement's provenance: physical measurements
    /// carry the `cos α` scale, order-only ones do not.
    pub fn for_measurement(m: &Measurement) -> Result<Self> {
        let meta = m.meta();
        let g = m.detector_grid().with_pitch(m.source_pitch())?;
        let kappa = match (meta.wavelength, meta.distance) {
            (Some(_), Some(_)) => (meta.order * std::f64::consts::FRAC_PI_2).cos().powf(g.dims() as f64 / 2.0),
            _ => 1.0,
        };
        Self::with_scale(meta.order, g, kappa)
    }

    pub fn with_scale(p: f64, grid: SamplingGrid, kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::param(format!("operator scale must be positive, got {kappa}")));
        }
        let plan = FrftPlan::normalized(p, grid.n())?;
        let inverse = plan.inverse_plan();
        Ok(Self {
            grid,
            plan,
            inverse,
            kappa,
        })
    }

    pub fn order(&self) -> f64 {
        self.plan.order()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    fn run(&self, plan: &FrftPlan, x: &[Complex64], adjoint: bool, scale: f64) -> Vec<Complex64> {
        assert_eq!(x.len(), self.grid.len(), "operator input length");
        let mut v = x.to_vec();
        match (self.grid.dims(), adjoint) {
            (1, false) => plan.apply_in_place(&mut v),
            (1, true) => plan.adjoint_in_place(&mut v),
            (_, false) => apply_2d_in_place(plan, plan, &mut v),
            (_, true) => adjoint_2d_in_place(plan, plan, &mut v),
        }
        v.iter_mut().for_each(|z| *z *= scale);
        v
    }

    /// Measured amplitude `|A x|` of a field.
    pub fn measure(&self, x: &ComplexField) -> Result<Vec<f64>> {
        self.check(x.grid().len())?;
        Ok(self.apply(x.data()).iter().map(|z| z.norm()).collect())
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.grid.len() {
            return Err(Error::dim(format!("operator expects {} samples, got {len}", self.grid.len())));
        }
        Ok(())
    }
}

impl LinearOperator for FrftOperator {
    fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.run(&self.plan, x, false, self.kappa)
    }

    fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.run(&self.plan, y, true, self.kappa)
    }

    fn approx_inverse(&self, y: &[Complex64]) -> Vec<Complex64> {
        self.run(&self.inverse, y, false, 1.0 / self.kappa)
    }
}

/// Largest singular value by power iteration on `AᴴA`.
pub fn operator_norm(op: &dyn LinearOperator, iters: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<Complex64> = (0..op.grid().len())
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let mut sigma2 = 0.0;
    for _ in 0..iters {
        let nv = norm(&v);
        v.iter_mut().for_each(|z| *z /= nv);
        v = op.adjoint(&op.apply(&v));
        sigma2 = norm(&v);
    }
    sigma2.sqrt()
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Projection applied after every update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    /// No projection: a general complex object.
    None,
    /// Real and nonnegative.
    Amplitude,
    /// Unit modulus.
    Phase,
}

impl Constraint {
    pub fn for_kind(kind: ObjectKind) -> Self {
        match kind {
            ObjectKind::Amplitude => Constraint::Amplitude,
            ObjectKind::Phase => Constraint::Phase,
        }
    }

    pub fn project(self, x: &mut [Complex64]) {
        match self {
            Constraint::None => {}
            Constraint::Amplitude => x.iter_mut().for_each(|z| *z = Complex64::new(z.re.max(0.0), 0.0)),
            Constraint::Phase => x.iter_mut().for_each(|z| {
                let r = z.norm();
                *z = if r > 0.0 { *z / r } else { Complex64::new(1.0, 0.0) };
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    Random { seed: u64 },
    /// Leading eigenvector of `Aᴴ diag(b²) A`.
    Spectral,
    Provided(ComplexField),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Gradient step; `None` uses `0.9/‖A‖²`.
    pub step: Option<f64>,
    pub tv_weight: f64,
    pub tv_inner_iters: usize,
    pub init: Init,
    /// Stop when the relative loss change falls below this.
    pub tolerance: f64,
    /// Modulus guard, relative to `max b`.
    pub eps_phase: f64,
    pub constraint: Constraint,
    pub loss: Loss,
}

/// Data term minimised by gradient descent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loss {
    /// `½‖|A x| − b‖²`.
    #[default]
    Amplitude,
    /// `¼‖|A x|² − b²‖²`, the classic intensity fit.
    Intensity,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 1000,
            step: None,
            tv_weight: 0.02,
            tv_inner_iters: 20,
            init: Init::Random { seed: 0 },
            tolerance: 1e-12,
            eps_phase: 1e-12,
            constraint: Constraint::None,
            loss: Loss::Amplitude,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::param("max_iters must be at least 1"));
        }
        if let Some(mu) = self.step {
            if !(mu.is_finite() && mu > 0.0) {
                return Err(Error::param(format!("step must be positive, got {mu}")));
            }
        }
        if !(self.tv_weight.is_finite() && self.tv_weight >= 0.0) {
            return Err(Error::param(format!("tv weight must be nonnegative, got {}", self.tv_weight)));
        }
        if !(self.tolerance >= 0.0 && self.eps_phase > 0.0) {
            return Err(Error::param("tolerance must be nonnegative and eps_phase positive"));
        }
        Ok(())
    }
}

/// Ground truth for fidelity traces.
#[derive(Debug, Clone, PartialEq)]
pub struct Truth {
    pub image: RealImage,
    pub kind: ObjectKind,
}

impl Truth {
    /// PSNR of an estimate: amplitude objects on `|x|`, phase objects on the
    /// decoded phase after global-phase alignment.
    pub fn psnr(&self, x: &[Complex64]) -> f64 {
        let g = *self.image.grid();
        let field = ComplexField::from_parts_unchecked(g, x.to_vec());
        let est = match self.kind {
            ObjectKind::Amplitude => decode_object(&field, ObjectKind::Amplitude),
            ObjectKind::Phase => {
                let target = crate::field::encode_object(&self.image, ObjectKind::Phase);
                let c: Complex64 = x.iter().zip(target.data()).map(|(a, b)| a.conj() * b).sum();
                let rot = if c.norm() > 0.0 { c / c.norm() } else { Complex64::new(1.0, 0.0) };
                decode_object(&field.scale(rot), ObjectKind::Phase)
            }
        };
        psnr(&self.image, &est).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub estimate: ComplexField,
    /// Loss of the iterate entering each iteration.
    pub loss_trace: Vec<f64>,
    pub psnr_trace: Option<Vec<f64>>,
    pub iterations_run: usize,
    pub converged: bool,
    pub status: SolveStatus,
}

impl SolveReport {
    pub fn final_psnr(&self) -> Option<f64> {
        self.psnr_trace.as_ref().and_then(|t| t.last().copied())
    }
}

/// CSV with header `iter,loss,psnr_db`; the PSNR column is present only
/// when the report has one.
pub fn trace_csv(report: &SolveReport) -> String {
    let mut s = String::new();
    match &report.psnr_trace {
        Some(p) => {
            s.push_str("iter,loss,psnr_db\n");
            for (i, (l, q)) in report.loss_trace.iter().zip(p).enumerate() {
                s.push_str(&format!("{i},{l:.5e},{q:.5e}\n"));
            }
        }
        None => {
            s.push_str("iter,loss\n");
            for (i, l) in report.loss_trace.iter().enumerate() {
                s.push_str(&format!("{i},{l:.5e}\n"));
            }
        }
    }
    s
}

/// `½‖|A x| − b‖²` and its Wirtinger gradient `Aᴴ((|z| − b) ⊙ z/max(|z|, eps))`,
/// `z = A x`, where `eps = eps_phase·max b`. The gradient is `∂/∂Re x + i ∂/∂Im x`.
pub fn amplitude_loss_grad(op: &dyn LinearOperator, x: &[Complex64], b: &[f64], eps_phase: f64) -> Result<(f64, Vec<Complex64>)> {
    let len = op.grid().len();
    if x.len() != len || b.len() != len {
        return Err(Error::dim(format!("loss needs {len} samples, got x: {}, b: {}", x.len(), b.len())));
    }
    let eps = eps_phase * b.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let z = op.apply(x);
    let mut loss = 0.0;
    let r: Vec<Complex64> = z
        .iter()
        .zip(b)
        .map(|(zi, bi)| {
            let a = zi.norm();
            loss += 0.5 * (a - bi) * (a - bi);
            *zi * ((a - bi) / a.max(eps))
        })
        .collect();
    Ok((loss, op.adjoint(&r)))
}

/// `¼‖|A x|² − b²‖²` and gradient `Aᴴ((|z|² − b²) ⊙ z)`.
pub fn intensity_loss_grad(op: &dyn LinearOperator, x: &[Complex64], b: &[f64]) -> Result<(f64, Vec<Complex64>)> {
    let len = op.grid().len();
    if x.len() != len || b.len() != len {
        return Err(Error::dim(format!("loss needs {len} samples, got x: {}, b: {}", x.len(), b.len())));
    }
    let z = op.apply(x);
    let mut loss = 0.0;
    let r: Vec<Complex64> = z
        .iter()
        .zip(b)
        .map(|(zi, bi)| {
            let e = zi.norm_sqr() - bi * bi;
            loss += 0.25 * e * e;
            zi * e
        })
        .collect();
    Ok((loss, op.adjoint(&r)))
}

/// Amplitude `|F^p O|` without physical scaling or metadata beyond the order.
pub fn order_measurement(p: f64, object: &ComplexField) -> Result<Measurement> {
    let op = FrftOperator::from_order(p, *object.grid())?;
    let meta = MeasurementMeta {
        wavelength: None,
        distance: None,
        order: p,
        scale: 1.0,
    };
    Measurement::new(op.measure(object)?, *object.grid(), meta)
}

pub(crate) fn resolve_operator(m: &Measurement, cfg: Option<&OpticalConfig>) -> Result<FrftOperator> {
    match cfg {
        None => FrftOperator::for_measurement(m),
        Some(c) => {
            let os = map_order(c);
            if (os.p - m.meta().order).abs() > 1e-9 || c.grid().len() != m.amplitude().len() {
                return Err(Error::param(format!(
                    "configuration (order {}, {} samples) does not match the measurement (order {}, {} samples)",
                    os.p,
                    c.grid().len(),
                    m.meta().order,
                    m.amplitude().len()
                )));
            }
            FrftOperator::from_config(c)
        }
    }
}

#[cfg(test)]
fn amplitude_loss(op: &dyn LinearOperator, x: &[Complex64], b: &[f64]) -> f64 {
    op.apply(x).iter().zip(b).map(|(z, bi)| 0.5 * (z.norm() - bi).powi(2)).sum()
}

pub(crate) fn initial_estimate(op: &dyn LinearOperator, b: &[f64], s: &SolverConfig) -> Result<Vec<Complex64>> {
    let len = op.grid().len();
    let mut x = match &s.init {
        Init::Provided(f) => {
            if f.grid().len() != len {
                return Err(Error::dim("initial estimate does not match the operator grid"));
            }
            return Ok(f.data().to_vec());
        }
        Init::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            match s.constraint {
                Constraint::Amplitude => (0..len).map(|_| Complex64::new(rng.random::<f64>(), 0.0)).collect(),
                Constraint::Phase => (0..len)
                    .map(|_| Complex64::from_polar(1.0, std::f64::consts::PI * rng.random::<f64>()))
                    .collect(),
                Constraint::None => (0..len).map(|_| Complex64::new(rng.random::<f64>(), rng.random::<f64>())).collect(),
            }
        }
        Init::Spectral => {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let mut v: Vec<Complex64> = (0..len).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            for _ in 0..50 {
                let nv = norm(&v);
                v.iter_mut().for_each(|z| *z /= nv);
                let mut z = op.apply(&v);
                z.iter_mut().zip(b).for_each(|(zi, bi)| *zi *= bi * bi);
                v = op.adjoint(&z);
            }
            // gauge: make the largest-magnitude entry real and positive
            if let Some(big) = v.iter().copied().max_by(|a, c| a.norm().total_cmp(&c.norm())) {
                if big.norm() > 0.0 {
                    let rot = big.conj() / big.norm();
                    v.iter_mut().for_each(|z| *z *= rot);
                }
            }
            s.constraint.project(&mut v);
            v
        }
    };
    if s.constraint != Constraint::Phase {
        let ax = norm(&op.apply(&x));
        let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if ax > 0.0 {
            x.iter_mut().for_each(|z| *z *= nb / ax);
        }
    }
    Ok(x)
}

pub(crate) fn check_measurement(op: &dyn LinearOperator, m: &Measurement) -> Result<()> {
    if m.amplitude().len() != op.grid().len() {
        return Err(Error::dim("measurement does not match the operator grid"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn random(len: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect()
    }

    fn fd_check(n: usize, p: f64, dims: usize, seed: u64) -> f64 {
        let g = SamplingGrid::normalized(n, dims).unwrap();
        let op = FrftOperator::with_scale(p, g, 0.8).unwrap();
        let len = g.len();
        let truth = random(len, seed);
        let b: Vec<f64> = op.apply(&truth).iter().map(|z| z.norm()).collect();
        let x = random(len, seed + 1);
        let (_, grad) = amplitude_loss_grad(&op, &x, &b, 1e-12).unwrap();
        let mut worst: f64 = 0.0;
        let real_dir: Vec<Complex64> = random(len, seed + 2).iter().map(|z| Complex64::new(z.re, 0.0)).collect();
        let imag_dir: Vec<Complex64> = random(len, seed + 3).iter().map(|z| Complex64::new(0.0, z.re)).collect();
        for dir in [real_dir, imag_dir] {
            let h = 1e-6;
            let plus: Vec<Complex64> = x.iter().zip(&dir).map(|(a, d)| a + d * h).collect();
            let minus: Vec<Complex64> = x.iter().zip(&dir).map(|(a, d)| a - d * h).collect();
            let fd = (amplitude_loss(&op, &plus, &b) - amplitude_loss(&op, &minus, &b)) / (2.0 * h);
            let an: f64 = grad.iter().zip(&dir).map(|(g, d)| (g.conj() * d).re).sum();
            worst = worst.max((fd - an).abs() / an.abs().max(1e-12));
        }
        worst
    }

    #[test]
    fn intensity_gradient_matches_finite_differences() {
        let g = SamplingGrid::normalized(16, 1).unwrap();
        let op = FrftOperator::from_order(0.7, g).unwrap();
        let b: Vec<f64> = op.apply(&random(16, 1)).iter().map(|z| z.norm()).collect();
        let (x, dir) = (random(16, 2), random(16, 3));
        let (_, grad) = intensity_loss_grad(&op, &x, &b).unwrap();
        let f = |t: f64| {
            let y: Vec<Complex64> = x.iter().zip(&dir).map(|(a, d)| a + d * t).collect();
            intensity_loss_grad(&op, &y, &b).unwrap().0
        };
        let fd = (f(1e-6) - f(-1e-6)) / 2e-6;
        let an: f64 = grad.iter().zip(&dir).map(|(g, d)| (g.conj() * d).re).sum();
        assert!((fd - an).abs() <= 1e-5 * an.abs());
    }

    #[test]
    fn physical_operator_scale() {
        let g = SamplingGrid::square(16, 1000e-6 / 16.0).unwrap();
        let c = OpticalConfig::new(500e-9, 20e-3, g).unwrap();
        let os = map_order(&c);
        let op = FrftOperator::from_config(&c).unwrap();
        assert!((op.kappa() - os.alpha.cos()).abs() < 1e-15);
        let obj = ComplexField::from_fn(g, |x, y| Complex64::new((x * 1e4).cos() + (y * 3e3).sin(), 0.0));
        let m = crate::propagation::forward_measurement(&c, &obj).unwrap();
        let again = FrftOperator::for_measurement(&m).unwrap();
        assert!((again.kappa() - op.kappa()).abs() < 1e-12);
        let b = op.measure(&obj).unwrap();
        assert!(b.iter().zip(m.amplitude()).all(|(a, c)| (a - c).abs() < 1e-12));
        assert!(resolve_operator(&m, Some(&c)).is_ok());
        assert!(resolve_operator(&m, Some(&c.with_distance(30e-3).unwrap())).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for n in [16, 32] {
            for p in [0.3, 0.5, 0.8, 1.0] {
                let e = fd_check(n, p, 1, n as u64);
                assert!(e <= 1e-5, "n = {n}, p = {p}: {e}");
            }
        }
        assert!(fd_check(16, 0.5, 2, 99) <= 1e-5);
    }

    #[test]
    fn loss_zero_at_consistent_point() {
        let g = SamplingGrid::normalized(16, 2).unwrap();
        let op = FrftOperator::from_order(0.6, g).unwrap();
        let x = random(g.len(), 4);
        let b: Vec<f64> = op.apply(&x).iter().map(|z| z.norm()).collect();
        let (loss, grad) = amplitude_loss_grad(&op, &x, &b, 1e-12).unwrap();
        assert!(loss < 1e-25);
        assert!(norm(&grad) < 1e-10 * norm(&x));
    }

    #[test]
    fn zero_measurement_gives_normal_operator() {
        let g = SamplingGrid::normalized(16, 1).unwrap();
        let op = FrftOperator::from_order(0.4, g).unwrap();
        let x = random(16, 5);
        let (loss, grad) = amplitude_loss_grad(&op, &x, &[0.0; 16], 1e-12).unwrap();
        let z = op.apply(&x);
        assert!((loss - 0.5 * norm(&z).powi(2)).abs() < 1e-12);
        let expect = op.adjoint(&z);
        assert!(grad.iter().zip(&expect).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn shape_errors() {
        let g = SamplingGrid::normalized(8, 1).unwrap();
        let op = FrftOperator::from_order(0.4, g).unwrap();
        assert!(amplitude_loss_grad(&op, &random(7, 1), &[0.0; 8], 1e-12).is_err());
        assert!(amplitude_loss_grad(&op, &random(8, 1), &[0.0; 9], 1e-12).is_err());
    }

    #[test]
    fn operator_norm_matches_materialized_maximum() {
        let g = SamplingGrid::normalized(16, 1).unwrap();
        let op = FrftOperator::from_order(1.0, g).unwrap();
        assert!((operator_norm(&op, 50) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn trace_csv_columns() {
        let g = SamplingGrid::normalized(4, 1).unwrap();
        let mut r = SolveReport {
            estimate: ComplexField::zeros(g),
            loss_trace: vec![1.0, 0.5],
            psnr_trace: Some(vec![10.0, 12.5]),
            iterations_run: 2,
            converged: false,
            status: SolveStatus::MaxIterations,
        };
        assert_eq!(trace_csv(&r), "iter,loss,psnr_db\n0,1.00000e0,1.00000e1\n1,5.00000e-1,1.25000e1\n");
        r.psnr_trace = None;
        assert_eq!(trace_csv(&r), "iter,loss\n0,1.00000e0\n1,5.00000e-1\n");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn operator_adjoint_identity(p in -2.0f64..2.0, seed in 0u64..50) {
            let g = SamplingGrid::normalized(12, 2).unwrap();
            let op = FrftOperator::with_scale(p, g, 0.7).unwrap();
            let (x, y) = (random(g.len(), seed), random(g.len(), seed + 7));
            let lhs: Complex64 = op.apply(&x).iter().zip(&y).map(|(a, b)| a.conj() * b).sum();
            let rhs: Complex64 = x.iter().zip(op.adjoint(&y)).map(|(a, b)| a.conj() * b).sum();
            prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm());
        }

        #[test]
        fn projections_are_idempotent(seed in 0u64..50) {
            for c in [Constraint::None, Constraint::Amplitude, Constraint::Phase] {
                let mut x = random(20, seed);
                c.project(&mut x);
                let once = x.clone();
                c.project(&mut x);
                prop_assert!(x.iter().zip(&once).all(|(a, b)| (a - b).norm() <= 1e-15));
            }
        }
    }
}
