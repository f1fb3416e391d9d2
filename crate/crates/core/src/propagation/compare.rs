use serde::{Deserialize, Serialize};

use super::{
    map_order, propagate_frft, propagate_reference, propagate_sft, propagate_tf, resample_real, sft_pitch, OpticalConfig,
    OrderScale, ReferenceOptions,
};
use crate::field::ComplexField;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Reference,
    Frft,
    Sft,
    Tf,
}

impl Model {
    pub const FAST: [Model; 3] = [Model::Frft, Model::Sft, Model::Tf];

    pub fn name(self) -> &'static str {
        match self {
            Model::Reference => "reference",
            Model::Frft => "frft",
            Model::Sft => "sft",
            Model::Tf => "tf",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "reference" | "ref" => Ok(Model::Reference),
            "frft" => Ok(Model::Frft),
            "sft" => Ok(Model::Sft),
            "tf" => Ok(Model::Tf),
            other => Err(crate::Error::param(format!("unknown model `{other}`"))),
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub distance: f64,
    pub model: Model,
    pub psnr_db: f64,
}

/// Intensities of every model on the common detector grid, each divided by
/// the reference peak.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceImages {
    pub distance: f64,
    pub order_scale: OrderScale,
    pub images: Vec<(Model, Vec<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub images: Vec<DistanceImages>,
}

impl Comparison {
    pub fn psnr(&self, distance: f64, model: Model) -> Option<f64> {
        self.rows.iter().find(|r| r.distance == distance && r.model == model).map(|r| r.psnr_db)
    }
}

/// Detector indices whose position, in units of the model's native pitch,
/// lies inside its output window.
fn overlap_mask(n: usize, factor: f64) -> Vec<bool> {
    (0..n)
        .map(|i| (crate::fft::centered_index(i, n) as f64 * factor).abs() <= (n / 2) as f64 - 1.0)
        .collect()
}

/// PSNR (peak 1) of `test` against `reference`, both already divided by the
/// reference peak, over the masked pixels.
fn masked_psnr(test: &[f64], reference: &[f64], mask: &[bool], dims: usize) -> f64 {
    let n = mask.len();
    let (mut sum, mut count) = (0.0, 0usize);
    for (k, (t, r)) in test.iter().zip(reference).enumerate() {
        let inside = if dims == 1 { mask[k] } else { mask[k / n] && mask[k % n] };
        if inside {
            sum += (t - r) * (t - r);
            count += 1;
        }
    }
    let mse = sum / count.max(1) as f64;
    if mse == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * mse.log10()
    }
}

/// Runs the three fast propagators and the quadrature reference for every
/// distance and scores each fast model's intensity against the reference on
/// the FrFT detector grid. Baseline intensities are resampled to that grid;
/// a baseline is scored only where its own output window covers the detector.
pub fn compare_models(base: &OpticalConfig, aperture: &ComplexField, distances: &[f64], keep_images: bool) -> Result<Comparison> {
    let mut rows = Vec::new();
    let mut images = Vec::new();
    let g = base.grid();
    let (n, dims) = (g.n(), g.dims());
    for &d in distances {
        let cfg = base.with_distance(d)?;
        let (frft, os) = propagate_frft(&cfg, aperture)?;
        let reference = propagate_reference(&cfg, aperture, ReferenceOptions::default())?;
        let r_int = reference.intensity();
        let peak = r_int.iter().copied().fold(0.0, f64::max);
        let norm = |v: Vec<f64>| v.into_iter().map(|x| x / peak).collect::<Vec<f64>>();
        let r_n = norm(r_int);

        let mut per_model = Vec::new();
        let full = vec![true; n];
        let f_n = norm(frft.intensity());
        rows.push(ComparisonRow {
            distance: d,
            model: Model::Frft,
            psnr_db: masked_psnr(&f_n, &r_n, &full, dims),
        });
        per_model.push((Model::Frft, f_n));

        let sft_factor = os.s2 * g.pitch() / sft_pitch(&cfg);
        let sft = propagate_sft(&cfg, aperture)?;
        let s_n = norm(resample_real(&sft.intensity(), n, dims, sft_factor)?);
        rows.push(ComparisonRow {
            distance: d,
            model: Model::Sft,
            psnr_db: masked_psnr(&s_n, &r_n, &overlap_mask(n, sft_factor), dims),
        });
        per_model.push((Model::Sft, s_n));

        let tf = propagate_tf(&cfg, aperture)?;
        let t_n = norm(resample_real(&tf.intensity(), n, dims, os.s2)?);
        rows.push(ComparisonRow {
            distance: d,
            model: Model::Tf,
            psnr_db: masked_psnr(&t_n, &r_n, &overlap_mask(n, os.s2), dims),
        });
        per_model.push((Model::Tf, t_n));

        if keep_images {
            per_model.insert(0, (Model::Reference, r_n));
            images.push(DistanceImages {
                distance: d,
                order_scale: map_order(&cfg),
                images: per_model,
            });
        }
    }
    Ok(Comparison { rows, images })
}

/// CSV with header `distance_m,model,psnr_db`, six significant digits.
pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut s = String::from("distance_m,model,psnr_db\n");
    for r in rows {
        s.push_str(&format!("{:.5e},{},{:.5e}\n", r.distance, r.model, r.psnr_db));
    }
    s
}
