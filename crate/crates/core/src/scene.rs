//! Procedural grayscale test scenes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{RealImage, SamplingGrid};
use crate::Result;

/// Smooth natural-looking scene: a sum of Gaussian blobs of mixed sign and
/// width over a gray floor, rescaled to `[0, 1]`.
pub fn natural_scene(n: usize, seed: u64, pitch: f64) -> Result<RealImage> {
    let grid = SamplingGrid::square(n, pitch)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blobs = 12 + n / 16;
    let params: Vec<[f64; 4]> = (0..blobs).map(|_| rng.random::<[f64; 4]>()).collect();
    let mut img = vec![0.2; n * n];
    for [cx, cy, s, a] in params {
        let w = 0.03 + 0.12 * s;
        let inv = 1.0 / (2.0 * w * w);
        for r in 0..n {
            let dy = r as f64 / n as f64 - cy;
            for c in 0..n {
                let dx = c as f64 / n as f64 - cx;
                img[r * n + c] += (a - 0.3) * (-(dx * dx + dy * dy) * inv).exp();
            }
        }
    }
    RealImage::normalized(grid, &img)
}

/// Centered square aperture of full width `width` (same units as `pitch`).
pub fn square_aperture(n: usize, pitch: f64, width: f64) -> Result<RealImage> {
    let grid = SamplingGrid::square(n, pitch)?;
    let half = width / 2.0 * (1.0 + 1e-12);
    let inside = |i: usize| grid.coord(i).abs() <= half;
    let data = (0..n * n).map(|k| if inside(k / n) && inside(k % n) { 1.0 } else { 0.0 }).collect();
    RealImage::new(grid, data)
}
