use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};

use super::Measurement;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum NoiseModel {
    /// Additive white noise on the intensity, standard deviation `sigma`.
    Gaussian { sigma: f64 },
    /// Photon counting: intensity scaled so its maximum is `peak` counts.
    Poisson { peak: f64 },
}

/// Perturbs the detected intensity and returns `sqrt(max(I, 0))`.
pub fn add_noise(m: &Measurement, model: NoiseModel, seed: u64) -> Result<Measurement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let intensity = m.intensity();
    let noisy: Vec<f64> = match model {
        NoiseModel::Gaussian { sigma } => {
            if !(sigma.is_finite() && sigma >= 0.0) {
                return Err(Error::param(format!("noise sigma must be nonnegative, got {sigma}")));
            }
            if sigma == 0.0 {
                return Ok(m.clone());
            }
            let dist = Normal::new(0.0, sigma).map_err(|e| Error::param(e.to_string()))?;
            intensity.iter().map(|&i| i + dist.sample(&mut rng)).collect()
        }
        NoiseModel::Poisson { peak } => {
            if !(peak.is_finite() && peak > 0.0) {
                return Err(Error::param(format!("photon peak must be positive, got {peak}")));
            }
            let imax = intensity.iter().copied().fold(0.0, f64::max);
            if imax == 0.0 {
                return Ok(m.clone());
            }
            let gain = peak / imax;
            intensity
                .iter()
                .map(|&i| {
                    let lam = i * gain;
                    if lam <= 0.0 {
                        0.0
                    } else {
                        let counts: f64 = Poisson::new(lam).map(|d| d.sample(&mut rng)).unwrap_or(0.0);
                        counts / gain
                    }
                })
                .collect()
        }
    };
    let amplitude = noisy.into_iter().map(|v| v.max(0.0).sqrt()).collect();
    Measurement::new(amplitude, *m.detector_grid(), *m.meta())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{MeasurementMeta, SamplingGrid};

    fn flat(n: usize) -> Measurement {
        let g = SamplingGrid::square(n, 1.0).unwrap();
        let meta = MeasurementMeta {
            wavelength: None,
            distance: None,
            order: 0.5,
            scale: 1.0,
        };
        Measurement::new(vec![1.0; n * n], g, meta).unwrap()
    }

    #[test]
    fn zero_sigma_is_identity() {
        let m = flat(8);
        assert_eq!(add_noise(&m, NoiseModel::Gaussian { sigma: 0.0 }, 1).unwrap(), m);
    }

    #[test]
    fn deterministic_under_seed() {
        let m = flat(8);
        for model in [NoiseModel::Gaussian { sigma: 0.05 }, NoiseModel::Poisson { peak: 100.0 }] {
            assert_eq!(add_noise(&m, model, 7).unwrap(), add_noise(&m, model, 7).unwrap());
            assert_ne!(add_noise(&m, model, 7).unwrap(), add_noise(&m, model, 8).unwrap());
        }
    }

    #[test]
    fn gaussian_mean_within_three_sigma() {
        let n = 64;
        let sigma = 0.01;
        let m = add_noise(&flat(n), NoiseModel::Gaussian { sigma }, 3).unwrap();
        let count = (n * n) as f64;
        let mean = m.intensity().iter().sum::<f64>() / count;
        assert!((mean - 1.0).abs() <= 3.0 * sigma / count.sqrt(), "{mean}");
    }

    #[test]
    fn poisson_counts_are_quantized() {
        let m = add_noise(&flat(8), NoiseModel::Poisson { peak: 50.0 }, 2).unwrap();
        for i in m.intensity() {
            let c = i * 50.0;
            assert!((c - c.round()).abs() < 1e-9);
        }
    }
}
