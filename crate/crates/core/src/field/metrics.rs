use serde::{Deserialize, Serialize};

use super::RealImage;
use crate::{Error, Result};

/// Image fidelity against a reference, peak value 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityScore {
    pub psnr: f64,
    pub ssim: f64,
    pub mse: f64,
}

impl FidelityScore {
    pub fn compute(reference: &RealImage, test: &RealImage) -> Result<Self> {
        Ok(Self {
            psnr: psnr(reference, test)?,
            ssim: ssim(reference, test)?,
            mse: mse(reference, test)?,
        })
    }
}

pub fn mse(reference: &RealImage, test: &RealImage) -> Result<f64> {
    reference.grid().check_same(test.grid(), "mse")?;
    let n = reference.data().len() as f64;
    Ok(reference.data().iter().zip(test.data()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n)
}

/// `10·log10(1/mse)`; `f64::INFINITY` when the images are identical.
pub fn psnr(reference: &RealImage, test: &RealImage) -> Result<f64> {
    let e = mse(reference, test)?;
    Ok(if e == 0.0 { f64::INFINITY } else { -10.0 * e.log10() })
}

const WIN: usize = 11;
const SIGMA: f64 = 1.5;
const C1: f64 = 0.01 * 0.01;
const C2: f64 = 0.03 * 0.03;

fn gaussian_window() -> [f64; WIN] {
    let mut w = [0.0; WIN];
    let c = (WIN / 2) as f64;
    for (i, v) in w.iter_mut().enumerate() {
        let t = i as f64 - c;
        *v = (-t * t / (2.0 * SIGMA * SIGMA)).exp();
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= s);
    w
}

/// Valid-mode separable filtering of a `rows × cols` image.
fn filter_valid(img: &[f64], rows: usize, cols: usize, w: &[f64]) -> Vec<f64> {
    let k = w.len();
    let (oc, or) = (cols + 1 - k, rows + 1 - k);
    let mut tmp = vec![0.0; rows * oc];
    for r in 0..rows {
        for c in 0..oc {
            tmp[r * oc + c] = (0..k).map(|j| w[j] * img[r * cols + c + j]).sum();
        }
    }
    let mut out = vec![0.0; or * oc];
    for r in 0..or {
        for c in 0..oc {
            out[r * oc + c] = (0..k).map(|j| w[j] * tmp[(r + j) * oc + c]).sum();
        }
    }
    out
}

/// Mean structural similarity (11×11 Gaussian window, σ = 1.5, K1 = 0.01,
/// K2 = 0.03, dynamic range 1), averaged over windows fully inside the
/// image. 1D images use a 1D window.
pub fn ssim(reference: &RealImage, test: &RealImage) -> Result<f64> {
    let g = reference.grid();
    g.check_same(test.grid(), "ssim")?;
    if g.n() < WIN {
        return Err(Error::dim(format!("ssim needs at least {WIN} samples per axis, got {}", g.n())));
    }
    let (rows, cols) = if g.dims() == 2 { (g.n(), g.n()) } else { (1, g.n()) };
    let w = gaussian_window();
    let filt = |v: &[f64]| {
        if rows == 1 {
            let oc = cols + 1 - WIN;
            (0..oc).map(|c| (0..WIN).map(|j| w[j] * v[c + j]).sum()).collect::<Vec<f64>>()
        } else {
            filter_valid(v, rows, cols, &w)
        }
    };
    let x = reference.data();
    let y = test.data();
    let xx: Vec<f64> = x.iter().map(|a| a * a).collect();
    let yy: Vec<f64> = y.iter().map(|a| a * a).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
    let (mx, my, sxx, syy, sxy) = (filt(x), filt(y), filt(&xx), filt(&yy), filt(&xy));
    let total: f64 = (0..mx.len())
        .map(|i| {
            let (a, b) = (mx[i], my[i]);
            let vx = sxx[i] - a * a;
            let vy = syy[i] - b * b;
            let cov = sxy[i] - a * b;
            ((2.0 * a * b + C1) * (2.0 * cov + C2)) / ((a * a + b * b + C1) * (vx + vy + C2))
        })
        .sum();
    Ok((total / mx.len() as f64).clamp(-1.0, 1.0))
}
