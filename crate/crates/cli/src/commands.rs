use std::f64::consts::PI;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use fracfield::analysis::{frwvd_1d, space_frequency_rep, wvd_1d};
use fracfield::field::{
    add_noise, decode_object, encode_object, ComplexField, FidelityScore, Measurement, NoiseModel, ObjectKind, RealImage, SamplingGrid,
};
use fracfield::io::{load_array, load_image, save_array, save_image, write_pgm, ArrayData, NdArray, PgmDepth};
use fracfield::propagation::{
    compare_models, comparison_csv, detector_grid, forward_measurement, map_order, propagate_frft, propagate_reference,
    propagate_sft, propagate_tf, sft_pitch, Model, OpticalConfig, ReferenceOptions,
};
use fracfield::retrieval::{
    ambiguity_demo, gap_tv, order_measurement, trace_csv, wirtinger_flow, AmbiguityRuns, Constraint, FrftOperator, Init, SolveStatus,
    SolverConfig, Truth,
};
use fracfield::scene::{natural_scene, square_aperture};
use fracfield::Complex64;

use crate::bundle::write_bundle;
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub order: Option<f64>,
    pub distance: Option<f64>,
}

/// Merged settings for one command.
#[derive(Debug, Clone)]
pub struct Context {
    pub cfg: ExperimentConfig,
    pub out: PathBuf,
}

impl Context {
    pub fn new(mut cfg: ExperimentConfig, ov: &Overrides) -> CliResult<Self> {
        if ov.seed.is_some() {
            cfg.seed = ov.seed;
        }
        if ov.order.is_some() {
            cfg.order = ov.order;
        }
        if ov.distance.is_some() {
            cfg.distance = ov.distance;
        }
        let out = ov.out.clone().unwrap_or_else(|| cfg.output_dir());
        fs::create_dir_all(&out)?;
        Ok(Self { cfg, out })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn optical(&self, default_n: usize, distance: f64) -> CliResult<OpticalConfig> {
        let n = self.cfg.n.unwrap_or(default_n);
        let grid = SamplingGrid::new(n, self.cfg.window() / n as f64, self.cfg.dims())?;
        Ok(OpticalConfig::new(self.cfg.wavelength(), distance, grid)?)
    }

    fn kind(&self) -> CliResult<ObjectKind> {
        Ok(self.cfg.object_kind.as_deref().unwrap_or("amplitude").parse()?)
    }

    /// Object image on the configured grid; file objects fix `n`.
    fn object_image(&self, default_object: &str, default_n: usize) -> CliResult<RealImage> {
        let spec = self.cfg.object.as_deref().unwrap_or(default_object);
        let n = self.cfg.n.unwrap_or(default_n);
        let window = self.cfg.window();
        match spec {
            "aperture" => {
                let pitch = window / n as f64;
                let img = square_aperture(n, pitch, self.cfg.aperture_width.unwrap_or(window / 2.0))?;
                if self.cfg.dims() == 1 {
                    let row = img.data()[(n / 2) * n..(n / 2 + 1) * n].to_vec();
                    return Ok(RealImage::new(SamplingGrid::line(n, pitch)?, row)?);
                }
                Ok(img)
            }
            "scene" => {
                if self.cfg.dims() != 2 {
                    return Err(CliError::config("the scene object is two-dimensional"));
                }
                Ok(natural_scene(n, self.cfg.scene_seed.unwrap_or(7), window / n as f64)?)
            }
            path => {
                let full = self.cfg.existing_path(path)?;
                let img = if full.extension().is_some_and(|e| e == "npy") {
                    let a = load_array(&full)?;
                    let shape = a.shape().to_vec();
                    if shape.len() != 2 || shape[0] != shape[1] {
                        return Err(CliError::config(format!("{} is not a square 2D array", full.display())));
                    }
                    let g = SamplingGrid::square(shape[0], window / shape[0] as f64)?;
                    RealImage::new(g, a.into_real()?)?
                } else {
                    let probe = load_image(&full, 1.0)?;
                    let m = probe.grid().n();
                    RealImage::new(SamplingGrid::square(m, window / m as f64)?, probe.data().to_vec())?
                };
                if let Some(want) = self.cfg.n {
                    if want != img.grid().n() {
                        return Err(CliError::config(format!("config n = {want} but {} has n = {}", full.display(), img.grid().n())));
                    }
                }
                Ok(img)
            }
        }
    }

    fn write(&self, name: &str, text: &str) -> CliResult<()> {
        fs::write(self.path(name), text)?;
        Ok(())
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, &s)
    }

    fn write_pgm(&self, name: &str, data: &[f64], n: usize, dims: usize, depth: PgmDepth) -> CliResult<()> {
        let rows = if dims == 1 { 1 } else { n };
        let file = fs::File::create(self.path(name))?;
        write_pgm(BufWriter::new(file), data, n, rows, depth)?;
        Ok(())
    }
}

fn over_peak(v: &[f64]) -> Vec<f64> {
    let peak = v.iter().copied().fold(0.0, f64::max);
    v.iter().map(|x| if peak > 0.0 { x / peak } else { 0.0 }).collect()
}

#[derive(Serialize)]
struct PropagateMeta {
    model: Model,
    wavelength: f64,
    distance: f64,
    n: usize,
    dims: usize,
    source_pitch: f64,
    detector_pitch: f64,
    p: f64,
    s2: f64,
    alpha: f64,
    tan_alpha: f64,
    peak_intensity: f64,
}

pub fn propagate(ctx: &Context, model: Option<Model>) -> CliResult<String> {
    let model = match (model, ctx.cfg.model.as_deref()) {
        (Some(m), _) => m,
        (None, Some(s)) => s.parse()?,
        (None, None) => Model::Frft,
    };
    let img = ctx.object_image("aperture", 512)?;
    let cfg = ctx.optical(img.grid().n(), ctx.cfg.distance.unwrap_or(10e-3))?;
    let obj = encode_object(&img, ctx.kind()?).with_pitch(cfg.grid().pitch())?;
    let os = map_order(&cfg);
    let field = match model {
        Model::Frft => propagate_frft(&cfg, &obj)?.0,
        Model::Sft => propagate_sft(&cfg, &obj)?,
        Model::Tf => propagate_tf(&cfg, &obj)?,
        Model::Reference => propagate_reference(&cfg, &obj, ReferenceOptions::default())?,
    };
    let g = *field.grid();
    let detector_pitch = match model {
        Model::Sft => sft_pitch(&cfg),
        Model::Tf => cfg.grid().pitch(),
        _ => detector_grid(&cfg)?.pitch(),
    };
    let intensity = field.intensity();
    let shape = vec![g.n(); g.dims()];
    save_array(ctx.path("field.npy"), &NdArray::from_field(&field))?;
    save_array(ctx.path("intensity.npy"), &NdArray::real(shape, intensity.clone())?)?;
    ctx.write_pgm("intensity.pgm", &over_peak(&intensity), g.n(), g.dims(), PgmDepth::Sixteen)?;
    let meta = PropagateMeta {
        model,
        wavelength: cfg.wavelength(),
        distance: cfg.distance(),
        n: g.n(),
        dims: g.dims(),
        source_pitch: cfg.grid().pitch(),
        detector_pitch,
        p: os.p,
        s2: os.s2,
        alpha: os.alpha,
        tan_alpha: os.tan_alpha,
        peak_intensity: intensity.iter().copied().fold(0.0, f64::max),
    };
    ctx.write_json("metadata.json", &meta)?;
    Ok(format!("{model}: d = {} m, p = {:.6}, s2 = {:.6}, detector pitch {:.6e} m", cfg.distance(), os.p, os.s2, detector_pitch))
}

#[derive(Serialize)]
struct CompareMeta {
    wavelength: f64,
    n: usize,
    window: f64,
    distances: Vec<f64>,
    orders: Vec<f64>,
    scales: Vec<f64>,
}

pub fn compare(ctx: &Context) -> CliResult<String> {
    let img = ctx.object_image("aperture", 512)?;
    let distances = ctx.cfg.distances.clone().unwrap_or_else(|| vec![1e-3, 5e-3, 10e-3, 20e-3, 50e-3]);
    if distances.is_empty() {
        return Err(CliError::config("distances must not be empty"));
    }
    let base = ctx.optical(img.grid().n(), distances[0])?;
    let obj = encode_object(&img, ctx.kind()?).with_pitch(base.grid().pitch())?;
    let keep = ctx.cfg.keep_images.unwrap_or(true);
    let cmp = compare_models(&base, &obj, &distances, keep)?;
    if cmp.rows.iter().any(|r| r.psnr_db.is_nan()) {
        return Err(CliError::numeric("comparison produced a NaN PSNR"));
    }
    ctx.write("compare.csv", &comparison_csv(&cmp.rows))?;
    let g = base.grid();
    if keep {
        fs::create_dir_all(ctx.path("images"))?;
        for d in &cmp.images {
            for (model, data) in &d.images {
                let name = format!("images/{}_{:.0}um.pgm", model, d.distance * 1e6);
                ctx.write_pgm(&name, data, g.n(), g.dims(), PgmDepth::Eight)?;
            }
        }
    }
    let orders: Vec<_> = distances.iter().map(|&d| base.with_distance(d).map(|c| map_order(&c))).collect::<Result<_, _>>()?;
    ctx.write_json(
        "metadata.json",
        &CompareMeta {
            wavelength: base.wavelength(),
            n: g.n(),
            window: g.window(),
            distances: distances.clone(),
            orders: orders.iter().map(|o| o.p).collect(),
            scales: orders.iter().map(|o| o.s2).collect(),
        },
    )?;
    let mut summary = String::new();
    for r in &cmp.rows {
        summary.push_str(&format!("d = {:>8.3} mm  {:<4} {:>8.2} dB\n", r.distance * 1e3, r.model, r.psnr_db));
    }
    Ok(summary.trim_end().to_string())
}

/// Measurement of an object: order-only when an order is configured or no
/// distance is given, physical otherwise.
fn measure(ctx: &Context, obj: &ComplexField) -> CliResult<Measurement> {
    let m = match (ctx.cfg.order, ctx.cfg.distance) {
        (Some(p), _) => order_measurement(p, obj)?,
        (None, Some(d)) => {
            let cfg = ctx.optical(obj.grid().n(), d)?;
            forward_measurement(&cfg, &obj.clone().with_pitch(cfg.grid().pitch())?)?
        }
        (None, None) => order_measurement(0.5, obj)?,
    };
    let model = match (ctx.cfg.noise.as_deref(), ctx.cfg.noise_level) {
        (None, _) => return Ok(m),
        (Some("gaussian"), Some(sigma)) => NoiseModel::Gaussian { sigma },
        (Some("poisson"), Some(peak)) => NoiseModel::Poisson { peak },
        (Some(other), _) => return Err(CliError::config(format!("noise `{other}` needs a noise_level (gaussian or poisson)"))),
    };
    Ok(add_noise(&m, model, ctx.cfg.seed())?)
}

fn solver_config(ctx: &Context, default_iters: usize, kind: ObjectKind) -> CliResult<SolverConfig> {
    let c = &ctx.cfg;
    let init = match c.init.as_deref().unwrap_or("random") {
        "random" => Init::Random { seed: c.seed() },
        "spectral" => Init::Spectral,
        other => return Err(CliError::config(format!("unknown init `{other}` (random, spectral)"))),
    };
    let constraint = match c.constraint.as_deref() {
        None => Constraint::for_kind(kind),
        Some("none") => Constraint::None,
        Some("amplitude") => Constraint::Amplitude,
        Some("phase") => Constraint::Phase,
        Some(other) => return Err(CliError::config(format!("unknown constraint `{other}`"))),
    };
    let d = SolverConfig::default();
    let s = SolverConfig {
        max_iters: c.max_iters.unwrap_or(default_iters),
        step: c.step,
        tv_weight: c.tv_weight.unwrap_or(d.tv_weight),
        tv_inner_iters: c.tv_inner_iters.unwrap_or(d.tv_inner_iters),
        init,
        tolerance: c.tolerance.unwrap_or(d.tolerance),
        constraint,
        ..d
    };
    s.validate()?;
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Wf,
    GapTv,
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::Wf => "wf",
            SolverKind::GapTv => "gap-tv",
        })
    }
}

impl std::str::FromStr for SolverKind {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "wf" => Ok(SolverKind::Wf),
            "gap-tv" | "gaptv" => Ok(SolverKind::GapTv),
            other => Err(CliError::config(format!("unknown solver `{other}` (wf, gap-tv)"))),
        }
    }
}

/// Below this final PSNR with the data fitted, a run is reported as stagnated.
const STAGNATION_DB: f64 = 15.0;

#[derive(Serialize)]
struct RetrieveMeta {
    solver: SolverKind,
    order: f64,
    kappa: f64,
    n: usize,
    status: SolveStatus,
    iterations_run: usize,
    converged: bool,
    initial_loss: f64,
    final_loss: f64,
    final_psnr_db: Option<f64>,
    final_ssim: Option<f64>,
    stagnated: Option<bool>,
}

/// `truth`: `Some(None)` scores against the configured object, `Some(path)`
/// against an image file.
pub fn retrieve(ctx: &Context, solver: Option<SolverKind>, truth: Option<Option<PathBuf>>) -> CliResult<String> {
    let solver = match (solver, ctx.cfg.solver.as_deref()) {
        (Some(s), _) => s,
        (None, Some(s)) => s.parse()?,
        (None, None) => SolverKind::Wf,
    };
    let kind = ctx.kind()?;
    let img = ctx.object_image("scene", 64)?;
    let obj = encode_object(&img, kind);
    let m = measure(ctx, &obj)?;
    let truth = match truth {
        None => None,
        Some(None) => Some(Truth { image: img.clone(), kind }),
        Some(Some(p)) => {
            let full = ctx.cfg.existing_path(&p.to_string_lossy())?;
            let t = load_image(&full, img.grid().pitch())?;
            if t.grid().len() != img.grid().len() {
                return Err(CliError::config("truth image size differs from the object"));
            }
            Some(Truth { image: t, kind })
        }
    };
    let iters = if solver == SolverKind::Wf { 5000 } else { 500 };
    let s = solver_config(ctx, iters, kind)?;
    let report = match solver {
        SolverKind::Wf => wirtinger_flow(&m, None, &s, truth.as_ref())?,
        SolverKind::GapTv => gap_tv(&m, None, &s, truth.as_ref())?,
    };
    let est = report.estimate.clone().with_pitch(img.grid().pitch())?;
    save_array(ctx.path("estimate.npy"), &NdArray::from_field(&est))?;
    save_image(ctx.path("estimate.pgm"), &decode_object(&est, kind), PgmDepth::Sixteen)?;
    save_array(ctx.path("measurement.npy"), &NdArray::real(vec![img.grid().n(); 2], m.amplitude().to_vec())?)?;
    ctx.write("trace.csv", &trace_csv(&report))?;

    let final_psnr = report.final_psnr();
    let final_ssim = match &truth {
        Some(t) => Some(FidelityScore::compute(&t.image, &decode_object(&est, kind))?.ssim),
        None => None,
    };
    let meta = RetrieveMeta {
        solver,
        order: m.meta().order,
        kappa: FrftOperator::for_measurement(&m)?.kappa(),
        n: img.grid().n(),
        status: report.status,
        iterations_run: report.iterations_run,
        converged: report.converged,
        initial_loss: report.loss_trace.first().copied().unwrap_or(f64::NAN),
        final_loss: report.loss_trace.last().copied().unwrap_or(f64::NAN),
        final_psnr_db: final_psnr,
        final_ssim,
        stagnated: final_psnr.map(|q| q < STAGNATION_DB),
    };
    ctx.write_json("report.json", &meta)?;
    if report.status == SolveStatus::Diverged {
        return Err(CliError::numeric(format!("solver diverged after {} iterations", report.iterations_run)));
    }
    let mut line = format!(
        "{} p = {}: {} iterations, loss {:.3e} -> {:.3e}",
        solver, meta.order, meta.iterations_run, meta.initial_loss, meta.final_loss
    );
    if let Some(q) = final_psnr {
        line.push_str(&format!(", PSNR {q:.2} dB"));
        if q < STAGNATION_DB {
            line.push_str(" (stagnation)");
        }
    }
    Ok(line)
}

#[derive(Serialize)]
struct AmbiguityMeta {
    n: usize,
    shift: isize,
    orders: Vec<f64>,
    runs: bool,
}

pub fn ambiguity(ctx: &Context) -> CliResult<String> {
    let kind = ctx.kind()?;
    let img = ctx.object_image("scene", 256)?;
    let n = img.grid().n();
    let obj = encode_object(&img, kind);
    let orders = ctx.cfg.orders.clone().unwrap_or_else(|| vec![1.0, 0.5]);
    let shift = ctx.cfg.shift.unwrap_or(n as isize / 4);
    let runs = if ctx.cfg.runs.unwrap_or(false) {
        Some(AmbiguityRuns {
            truth: Truth { image: img.clone(), kind },
            solver: solver_config(ctx, 500, kind)?,
            noise_sigma: ctx.cfg.run_noise.unwrap_or(0.1),
            seed: ctx.cfg.seed(),
        })
    } else {
        None
    };
    let report = ambiguity_demo(&obj, &orders, (shift, shift), runs.as_ref())?;
    ctx.write("distances.csv", &report.distances_csv())?;
    if runs.is_some() {
        ctx.write("traces.csv", &report.traces_csv())?;
    }
    ctx.write_json(
        "metadata.json",
        &AmbiguityMeta {
            n,
            shift,
            orders,
            runs: runs.is_some(),
        },
    )?;
    let mut s = String::new();
    for r in &report.rows {
        s.push_str(&format!("p = {:<6} shift {:.3e}  flip {:.3e}\n", r.p, r.shift_distance, r.flip_distance));
    }
    for r in &report.runs {
        s.push_str(&format!("p = {:<6} {:<5} start: final PSNR {:.2} dB\n", r.p, r.init, r.report.final_psnr().unwrap_or(f64::NAN)));
    }
    Ok(s.trim_end().to_string())
}

/// Gaussian-windowed linear chirp used when no signal file is given.
fn demo_chirp(n: usize) -> CliResult<ComplexField> {
    let g = SamplingGrid::line(n, 1.0 / (n as f64).sqrt())?;
    Ok(ComplexField::from_fn(g, |x, _| Complex64::from_polar((-0.05 * PI * x * x).exp(), 0.4 * PI * x * x)))
}

pub fn wvd(ctx: &Context, signal: Option<PathBuf>, alpha: Option<f64>) -> CliResult<String> {
    let source = signal.map(|p| p.to_string_lossy().into_owned()).or_else(|| ctx.cfg.signal.clone());
    let f = match source.as_deref() {
        None | Some("chirp") => demo_chirp(ctx.cfg.n.unwrap_or(256))?,
        Some(p) => {
            let a = load_array(ctx.cfg.existing_path(p)?)?;
            if a.shape().len() != 1 {
                return Err(CliError::config("signal array must be one-dimensional"));
            }
            let n = a.shape()[0];
            let data = match a.data() {
                ArrayData::Real(v) => v.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
                ArrayData::Complex(v) => v.clone(),
            };
            ComplexField::new(SamplingGrid::line(n, 1.0 / (n as f64).sqrt())?, data)?
        }
    };
    let alpha = alpha.or(ctx.cfg.alpha).unwrap_or(PI / 4.0);
    wvd_1d(&f)?.save(&ctx.out, "wvd")?;
    frwvd_1d(&f, alpha)?.save(&ctx.out, "frwvd")?;
    space_frequency_rep(&f, alpha)?.save(&ctx.out, "sfr")?;
    Ok(format!("n = {}, alpha = {alpha}: wrote wvd, frwvd and sfr maps", f.grid().n()))
}

pub fn export_forward(ctx: &Context) -> CliResult<String> {
    let kind = ctx.kind()?;
    let img = ctx.object_image("scene", 64)?;
    let obj = encode_object(&img, kind);
    let m = measure(ctx, &obj)?;
    let obj = obj.with_pitch(m.source_pitch())?;
    let bm = write_bundle(&ctx.out, &obj, &m, kind)?;
    Ok(format!("bundle: order {}, kappa {}, n {}", bm.order, bm.kappa, bm.n))
}

pub fn scene(ctx: &Context, n: usize) -> CliResult<String> {
    let img = natural_scene(n, ctx.cfg.scene_seed.or(ctx.cfg.seed).unwrap_or(7), 1.0)?;
    let name = format!("scene{n}.pgm");
    save_image(ctx.path(&name), &img, PgmDepth::Eight)?;
    Ok(format!("wrote {}", Path::new(&ctx.out).join(name).display()))
}
