//! Centered, unitary discrete Fourier transforms and the band-limited
//! interpolation built on them.
//!
//! Sample `i` of a length-`n` buffer sits at centered index `i - n/2`. The
//! centered DFT is `X[k] = n^{-1/2} Σ_m x[m] exp(-2πi k m / n)` over centered
//! `k` and `m`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Forward and inverse unitary centered DFT of one length.
#[derive(Clone)]
pub struct CenteredFft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CenteredFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CenteredFft").field("n", &self.n).finish()
    }
}

impl CenteredFft {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.run(buf, &self.forward);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.run(buf, &self.inverse);
    }

    fn run(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        assert_eq!(buf.len(), self.n, "buffer length does not match FFT length");
        let c = self.n / 2;
        buf.rotate_left(c);
        fft.process(buf);
        buf.rotate_right(c);
        let s = 1.0 / (self.n as f64).sqrt();
        buf.iter_mut().for_each(|v| *v *= s);
    }
}

/// Centered index of array position `i` for a length-`n` axis.
#[inline]
pub fn centered_index(i: usize, n: usize) -> isize {
    i as isize - (n / 2) as isize
}

/// Array position of centered index `m`, if it lies on the axis.
#[inline]
pub fn position(m: isize, n: usize) -> Option<usize> {
    let p = m + (n / 2) as isize;
    (p >= 0 && (p as usize) < n).then_some(p as usize)
}

/// Band-limited interpolation by an integer factor.
///
/// The centered spectrum of `x` is zero-padded to `factor * n` bins and
/// transformed back; the result is scaled so that every `factor`-th output
/// sample reproduces the input.
#[derive(Debug, Clone)]
pub struct Interpolator {
    factor: usize,
    coarse: CenteredFft,
    fine: CenteredFft,
}

impl Interpolator {
    pub fn new(n: usize, factor: usize) -> Self {
        assert!(factor >= 1);
        Self {
            factor,
            coarse: CenteredFft::new(n),
            fine: CenteredFft::new(n * factor),
        }
    }

    pub fn factor(&self) -> usize {
        self.factor
    }

    pub fn input_len(&self) -> usize {
        self.coarse.len()
    }

    pub fn output_len(&self) -> usize {
        self.fine.len()
    }

    fn offset(&self) -> usize {
        self.fine.len() / 2 - self.coarse.len() / 2
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut spec = x.to_vec();
        self.coarse.forward(&mut spec);
        let mut out = vec![Complex64::new(0.0, 0.0); self.fine.len()];
        let off = self.offset();
        out[off..off + spec.len()].copy_from_slice(&spec);
        self.fine.inverse(&mut out);
        let s = (self.factor as f64).sqrt();
        out.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Conjugate transpose of [`Interpolator::apply`].
    pub fn adjoint(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut spec = y.to_vec();
        self.fine.forward(&mut spec);
        let off = self.offset();
        let mut out = spec[off..off + self.coarse.len()].to_vec();
        self.coarse.inverse(&mut out);
        let s = (self.factor as f64).sqrt();
        out.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Plain transpose (no conjugation) of [`Interpolator::apply`]. The
    /// centered DFT matrices are symmetric, so this is the adjoint with the
    /// two transforms swapped.
    pub fn transpose(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut spec = y.to_vec();
        self.fine.inverse(&mut spec);
        let off = self.offset();
        let mut out = spec[off..off + self.coarse.len()].to_vec();
        self.coarse.forward(&mut out);
        let s = (self.factor as f64).sqrt();
        out.iter_mut().for_each(|v| *v *= s);
        out
    }
}

/// Applies `f` to every row of a row-major `rows x cols` buffer.
pub fn for_each_row<F>(data: &mut [Complex64], cols: usize, f: F)
where
    F: Fn(&mut [Complex64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(cols).for_each(f);
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(cols).for_each(f);
}

/// Like [`for_each_row`], passing the row index as well.
pub fn for_each_row_indexed<T, F>(data: &mut [T], cols: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(cols).enumerate().for_each(|(i, r)| f(i, r));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(cols).enumerate().for_each(|(i, r)| f(i, r));
}

/// Transposes a row-major `rows x cols` buffer.
pub fn transpose<T: Copy + Default>(data: &[T], rows: usize, cols: usize) -> Vec<T> {
    let mut out = vec![T::default(); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

/// Applies `f` to every column of a row-major `rows x cols` buffer.
pub fn for_each_col<F>(data: &mut [Complex64], rows: usize, cols: usize, f: F)
where
    F: Fn(&mut [Complex64]) + Sync + Send,
{
    let mut t = transpose(data, rows, cols);
    for_each_row(&mut t, rows, f);
    let back = transpose(&t, cols, rows);
    data.copy_from_slice(&back);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|ki| {
                let k = centered_index(ki, n) as f64;
                x.iter().enumerate().fold(Complex64::new(0.0, 0.0), |acc, (mi, &v)| {
                    let m = centered_index(mi, n) as f64;
                    acc + v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * k * m / n as f64)
                }) / (n as f64).sqrt()
            })
            .collect()
    }

    #[test]
    fn centered_dft_matches_definition_even_and_odd() {
        for n in [8usize, 9, 16] {
            let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64 * 0.3 - 1.0, (i * i) as f64 * 0.01)).collect();
            let mut y = x.clone();
            CenteredFft::new(n).forward(&mut y);
            let r = naive_dft(&x);
            for (a, b) in y.iter().zip(&r) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn interpolation_adjoint_and_transpose_identities() {
        let n = 16;
        let it = Interpolator::new(n, 2);
        let x: Vec<Complex64> = (0..n).map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 0.2).cos())).collect();
        let y = it.apply(&x);
        let w: Vec<Complex64> = (0..2 * n).map(|i| Complex64::new((i as f64).cos(), (i as f64 * 1.3).sin())).collect();
        let lhs: Complex64 = y.iter().zip(&w).map(|(a, b)| a * b.conj()).sum();
        let rhs: Complex64 = x.iter().zip(it.adjoint(&w)).map(|(a, b)| a * b.conj()).sum();
        assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
        let t = it.transpose(&w);
        let rhs_t: Complex64 = x.iter().zip(&t).map(|(a, b)| a * b).sum();
        let lhs_t: Complex64 = y.iter().zip(&w).map(|(a, b)| a * b).sum();
        assert!((lhs_t - rhs_t).norm() < 1e-12 * lhs_t.norm().max(1.0));
    }

    #[test]
    fn interpolation_is_exact_for_band_limited_input() {
        let n = 32;
        let it = Interpolator::new(n, 4);
        let f = |t: f64| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 3.0 * t / n as f64);
        let x: Vec<Complex64> = (0..n).map(|i| f(centered_index(i, n) as f64)).collect();
        let y = it.apply(&x);
        for (j, v) in y.iter().enumerate() {
            let t = centered_index(j, 4 * n) as f64 / 4.0;
            assert!((v - f(t)).norm() < 1e-12);
        }
    }
}
