//! Forward-model export: `bundle.json`, `object.npy` and `measurement.npy`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use fracfield::field::{ComplexField, Measurement, MeasurementMeta, ObjectKind, SamplingGrid};
use fracfield::io::{load_array, save_array, NdArray};
use fracfield::retrieval::FrftOperator;

use crate::error::{CliError, CliResult};

pub const FORMAT: &str = "fracfield-forward/1";

/// Operator description: the measurement is `kappa·|F^order object|`, the
/// same order on every axis of the normalized `n`-point grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleMeta {
    pub format: String,
    pub order: f64,
    pub kappa: f64,
    /// Detector pitch over source pitch.
    pub s2: f64,
    pub n: usize,
    pub dims: usize,
    pub pitch: f64,
    pub detector_pitch: f64,
    pub wavelength: Option<f64>,
    pub distance: Option<f64>,
    pub object_kind: ObjectKind,
    pub object_file: String,
    pub measurement_file: String,
}

pub fn write_bundle(dir: &Path, object: &ComplexField, m: &Measurement, kind: ObjectKind) -> CliResult<BundleMeta> {
    fs::create_dir_all(dir)?;
    let g = object.grid();
    let op = FrftOperator::for_measurement(m)?;
    let meta = m.meta();
    let bm = BundleMeta {
        format: FORMAT.to_string(),
        order: meta.order,
        kappa: op.kappa(),
        s2: meta.scale,
        n: g.n(),
        dims: g.dims(),
        pitch: g.pitch(),
        detector_pitch: m.detector_grid().pitch(),
        wavelength: meta.wavelength,
        distance: meta.distance,
        object_kind: kind,
        object_file: "object.npy".into(),
        measurement_file: "measurement.npy".into(),
    };
    let shape = vec![g.n(); g.dims()];
    save_array(dir.join(&bm.object_file), &NdArray::from_field(object))?;
    save_array(dir.join(&bm.measurement_file), &NdArray::real(shape, m.amplitude().to_vec())?)?;
    let mut json = serde_json::to_string_pretty(&bm)?;
    json.push('\n');
    fs::write(dir.join("bundle.json"), json)?;
    Ok(bm)
}

pub fn load_bundle(dir: &Path) -> CliResult<(BundleMeta, ComplexField, Measurement)> {
    let bm: BundleMeta = serde_json::from_str(&fs::read_to_string(dir.join("bundle.json"))?)?;
    if bm.format != FORMAT {
        return Err(CliError::config(format!("unsupported bundle format `{}`", bm.format)));
    }
    let grid = SamplingGrid::new(bm.n, bm.pitch, bm.dims)?;
    let object = ComplexField::new(grid, load_array(dir.join(&bm.object_file))?.into_complex()?)?;
    let meta = MeasurementMeta {
        wavelength: bm.wavelength,
        distance: bm.distance,
        order: bm.order,
        scale: bm.s2,
    };
    let amp = load_array(dir.join(&bm.measurement_file))?.into_real()?;
    let m = Measurement::new(amp, grid.with_pitch(bm.detector_pitch)?, meta)?;
    Ok((bm, object, m))
}
