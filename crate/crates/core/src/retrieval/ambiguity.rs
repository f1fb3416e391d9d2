use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{order_measurement, wirtinger_flow, Constraint, FrftOperator, Init, SolveReport, SolverConfig, Truth};
use crate::field::{circular_shift, conjugate_flip, encode_object, ComplexField};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbiguityRow {
    pub p: f64,
    /// `‖|F^p O| − |F^p shift(O)|‖ / ‖|F^p O|‖`.
    pub shift_distance: f64,
    /// Same for the conjugate flip.
    pub flip_distance: f64,
}

/// Reconstructions started from perturbed copies of the truth.
#[derive(Debug, Clone)]
pub struct AmbiguityRuns {
    pub truth: Truth,
    pub solver: SolverConfig,
    pub noise_sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct AmbiguityRun {
    pub p: f64,
    /// `"shift"` or `"flip"`.
    pub init: &'static str,
    pub report: SolveReport,
}

#[derive(Debug, Clone, Default)]
pub struct AmbiguityReport {
    pub rows: Vec<AmbiguityRow>,
    pub runs: Vec<AmbiguityRun>,
}

impl AmbiguityReport {
    /// `p,shift_distance,flip_distance`.
    pub fn distances_csv(&self) -> String {
        let mut s = String::from("p,shift_distance,flip_distance\n");
        for r in &self.rows {
            s.push_str(&format!("{},{:.5e},{:.5e}\n", r.p, r.shift_distance, r.flip_distance));
        }
        s
    }

    /// `p,init,iter,psnr_db`.
    pub fn traces_csv(&self) -> String {
        let mut s = String::from("p,init,iter,psnr_db\n");
        for run in &self.runs {
            for (i, q) in run.report.psnr_trace.iter().flatten().enumerate() {
                s.push_str(&format!("{},{},{i},{q:.5e}\n", run.p, run.init));
            }
        }
        s
    }
}

fn rel_distance(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = a.iter().map(|x| x * x).sum();
    (num / den).sqrt()
}

/// Sensitivity of `|F^p O|` to a circular shift by `shift = (dx, dy)` and to
/// conjugate inversion, per order. With `runs`, Wirtinger flow is also started
/// from noisy shifted and flipped copies of the truth.
pub fn ambiguity_demo(object: &ComplexField, p_list: &[f64], shift: (isize, isize), runs: Option<&AmbiguityRuns>) -> Result<AmbiguityReport> {
    let g = *object.grid();
    let shifted = circular_shift(object, shift.0, shift.1);
    let flipped = conjugate_flip(object);
    let mut report = AmbiguityReport::default();
    for &p in p_list {
        let op = FrftOperator::from_order(p, g)?;
        let base = op.measure(object)?;
        report.rows.push(AmbiguityRow {
            p,
            shift_distance: rel_distance(&base, &op.measure(&shifted)?),
            flip_distance: rel_distance(&base, &op.measure(&flipped)?),
        });
    }
    let Some(cfg) = runs else {
        return Ok(report);
    };
    if cfg.truth.image.grid().len() != g.len() {
        return Err(Error::dim("truth image does not match the object grid"));
    }
    let noise = Normal::new(0.0, cfg.noise_sigma).map_err(|e| Error::param(e.to_string()))?;
    let truth = encode_object(&cfg.truth.image, cfg.truth.kind);
    let starts = [
        ("shift", circular_shift(&truth, shift.0, shift.1)),
        ("flip", conjugate_flip(&truth)),
    ];
    let complex_noise = cfg.solver.constraint != Constraint::Amplitude;
    for &p in p_list {
        let m = order_measurement(p, object)?;
        for (k, (name, start)) in starts.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(k as u64));
            let data = start
                .data()
                .iter()
                .map(|z| {
                    let im = if complex_noise { noise.sample(&mut rng) } else { 0.0 };
                    z + Complex64::new(noise.sample(&mut rng), im)
                })
                .collect();
            let s = SolverConfig {
                init: Init::Provided(ComplexField::new(g, data)?),
                ..cfg.solver.clone()
            };
            report.runs.push(AmbiguityRun {
                p,
                init: name,
                report: wirtinger_flow(&m, None, &s, Some(&cfg.truth))?,
            });
        }
    }
    Ok(report)
}
