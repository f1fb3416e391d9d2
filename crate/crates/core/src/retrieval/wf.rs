use num_complex::Complex64;

use super::{
    amplitude_loss_grad, check_measurement, initial_estimate, intensity_loss_grad, operator_norm, resolve_operator, LinearOperator,
    Loss, SolveReport, SolveStatus, SolverConfig, Truth,
};
use crate::field::{ComplexField, Measurement};
use crate::propagation::OpticalConfig;
use crate::Result;

/// Fixed-step gradient descent `x ← P(x − μ·grad)` on the measurement loss.
///
/// With `cfg` the operator carries the physical `cos α` scale; without it the
/// measurement metadata decides. Non-finite losses end the run with
/// [`SolveStatus::Diverged`].
pub fn wirtinger_flow(m: &Measurement, cfg: Option<&OpticalConfig>, s: &SolverConfig, truth: Option<&Truth>) -> Result<SolveReport> {
    s.validate()?;
    let op = resolve_operator(m, cfg)?;
    check_measurement(&op, m)?;
    let b = m.amplitude();
    let mut x = initial_estimate(&op, b, s)?;
    s.constraint.project(&mut x);
    let mu = s.step.unwrap_or_else(|| {
        let l = operator_norm(&op, 50).powi(2);
        match s.loss {
            Loss::Amplitude => 0.9 / l,
            Loss::Intensity => 0.1 / (l * l * b.iter().fold(0.0f64, |a, v| a.max(v * v)).max(f64::MIN_POSITIVE)),
        }
    });

    let mut losses = Vec::with_capacity(s.max_iters);
    let mut psnrs = truth.map(|_| Vec::with_capacity(s.max_iters));
    let mut status = SolveStatus::MaxIterations;
    for _ in 0..s.max_iters {
        let (loss, grad) = match s.loss {
            Loss::Amplitude => amplitude_loss_grad(&op, &x, b, s.eps_phase)?,
            Loss::Intensity => intensity_loss_grad(&op, &x, b)?,
        };
        if !loss.is_finite() || grad.iter().any(|g| !(g.re.is_finite() && g.im.is_finite())) {
            status = SolveStatus::Diverged;
            break;
        }
        let prev = losses.last().copied();
        losses.push(loss);
        if let (Some(ps), Some(t)) = (psnrs.as_mut(), truth) {
            ps.push(t.psnr(&x));
        }
        if loss == 0.0 || prev.is_some_and(|q: f64| (q - loss).abs() <= s.tolerance * q) {
            status = SolveStatus::Converged;
            break;
        }
        x.iter_mut().zip(&grad).for_each(|(xi, g)| *xi -= g * mu);
        s.constraint.project(&mut x);
    }
    Ok(finish(op.grid(), x, losses, psnrs, status))
}

pub(crate) fn finish(
    grid: &crate::field::SamplingGrid,
    x: Vec<Complex64>,
    loss_trace: Vec<f64>,
    psnr_trace: Option<Vec<f64>>,
    status: SolveStatus,
) -> SolveReport {
    SolveReport {
        estimate: ComplexField::from_parts_unchecked(*grid, x),
        iterations_run: loss_trace.len(),
        loss_trace,
        psnr_trace,
        converged: status == SolveStatus::Converged,
        status,
    }
}
