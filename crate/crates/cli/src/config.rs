//! Flat `key = value` experiment configuration (a TOML subset).

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Every key is optional; commands fill in their own defaults.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Meters.
    pub wavelength: Option<f64>,
    /// Meters.
    pub distance: Option<f64>,
    /// Samples per axis.
    pub n: Option<usize>,
    /// Source window side `L` in meters; the pitch is `L/n`.
    pub window: Option<f64>,
    pub dims: Option<usize>,
    /// Order-only measurement instead of a physical distance.
    pub order: Option<f64>,
    /// `aperture`, `scene` or a `.pgm`/`.npy` path.
    pub object: Option<String>,
    pub object_kind: Option<String>,
    pub aperture_width: Option<f64>,
    pub scene_seed: Option<u64>,
    pub model: Option<String>,
    pub distances: Option<Vec<f64>>,
    pub keep_images: Option<bool>,

    pub solver: Option<String>,
    pub max_iters: Option<usize>,
    pub step: Option<f64>,
    pub tv_weight: Option<f64>,
    pub tv_inner_iters: Option<usize>,
    pub tolerance: Option<f64>,
    pub init: Option<String>,
    pub constraint: Option<String>,
    /// `gaussian` or `poisson`.
    pub noise: Option<String>,
    /// Gaussian sigma or Poisson peak count.
    pub noise_level: Option<f64>,

    pub orders: Option<Vec<f64>>,
    pub shift: Option<isize>,
    pub runs: Option<bool>,
    pub run_noise: Option<f64>,

    pub signal: Option<String>,
    pub alpha: Option<f64>,

    pub output_dir: Option<String>,
    pub seed: Option<u64>,

    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn parse(text: &str, base_dir: &Path) -> CliResult<Self> {
        let mut c: Self = toml::from_str(text).map_err(|e| CliError::config(format!("config: {e}")))?;
        c.base_dir = base_dir.to_path_buf();
        Ok(c)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Resolves a path relative to the config file and checks it exists.
    pub fn existing_path(&self, p: &str) -> CliResult<PathBuf> {
        let path = Path::new(p);
        let full = if path.is_absolute() { path.to_path_buf() } else { self.base_dir.join(path) };
        if !full.exists() {
            return Err(CliError::config(format!("referenced file {} does not exist", full.display())));
        }
        Ok(full)
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength.unwrap_or(500e-9)
    }

    pub fn window(&self) -> f64 {
        self.window.unwrap_or(1000e-6)
    }

    pub fn dims(&self) -> usize {
        self.dims.unwrap_or(2)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn output_dir(&self) -> PathBuf {
        match &self.output_dir {
            Some(p) if Path::new(p).is_absolute() => PathBuf::from(p),
            Some(p) => self.base_dir.join(p),
            None => PathBuf::from("out"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_keys() {
        let c = ExperimentConfig::parse("wavelength = 5e-7\nn = 64\ndistances = [1e-3, 5e-3]\nobject = \"scene\"\n", Path::new("/tmp")).unwrap();
        assert_eq!(c.n, Some(64));
        assert_eq!(c.distances.as_deref(), Some(&[1e-3, 5e-3][..]));
        assert_eq!(c.wavelength(), 5e-7);
        assert_eq!(c.window(), 1000e-6);
    }

    #[test]
    fn unknown_key_is_a_config_error() {
        let e = ExperimentConfig::parse("wavelenght = 1.0\n", Path::new(".")).unwrap_err();
        assert_eq!(e.code(), 2);
    }

    #[test]
    fn missing_file_is_a_config_error() {
        let c = ExperimentConfig::default();
        assert_eq!(c.existing_path("/definitely/not/here.pgm").unwrap_err().code(), 2);
    }
}
