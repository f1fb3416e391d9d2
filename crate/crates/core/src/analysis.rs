//! Space-frequency maps of 1D signals.
//!
//! Discrete Wigner–Ville distribution on the integer-lag lattice
//! `r[m] = f[n+m]·f*[n−m]` (lag `2mΔx`), normalised so that every row sums to
//! `|f[n]|²`. Its frequency axis has pitch `1/(2NΔx)`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::dfrft::FrftPlan;
use crate::fft::{centered_index, position, CenteredFft};
use crate::field::{ComplexField, SamplingGrid};
use crate::io::{save_array, write_pgm, NdArray, PgmDepth};
use crate::propagation::resample::Oversampled;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum MapValues {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

/// Row-major map, one row per `x` sample and one column per `u` sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceFrequencyMap {
    pub values: MapValues,
    pub x_axis: SamplingGrid,
    pub u_axis: SamplingGrid,
    pub alpha: f64,
    /// Continuous-convention constant not folded into `values`.
    pub prefactor: f64,
}

impl SpaceFrequencyMap {
    pub fn shape(&self) -> (usize, usize) {
        (self.x_axis.n(), self.u_axis.n())
    }

    pub fn magnitude(&self) -> Vec<f64> {
        match &self.values {
            MapValues::Real(v) => v.iter().map(|x| x.abs()).collect(),
            MapValues::Complex(v) => v.iter().map(|x| x.norm()).collect(),
        }
    }

    pub fn real(&self) -> Option<&[f64]> {
        match &self.values {
            MapValues::Real(v) => Some(v),
            MapValues::Complex(_) => None,
        }
    }

    pub fn to_array(&self) -> NdArray {
        let (r, c) = self.shape();
        let shape = vec![r, c];
        match &self.values {
            MapValues::Real(v) => NdArray::real(shape, v.clone()),
            MapValues::Complex(v) => NdArray::complex(shape, v.clone()),
        }
        .expect("map shape matches its axes")
    }

    /// `axis,index,value` for both axes.
    pub fn axes_csv(&self) -> String {
        let mut s = String::from("axis,index,value\n");
        for (name, g) in [("x", &self.x_axis), ("u", &self.u_axis)] {
            for (i, v) in g.coords().iter().enumerate() {
                s.push_str(&format!("{name},{i},{v:.9e}\n"));
            }
        }
        s
    }

    /// Writes `<stem>.npy`, `<stem>.pgm` (magnitude over its maximum) and
    /// `<stem>_axes.csv` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>, stem: &str) -> Result<()> {
        let dir = dir.as_ref();
        save_array(dir.join(format!("{stem}.npy")), &self.to_array())?;
        let mag = self.magnitude();
        let peak = mag.iter().copied().fold(0.0, f64::max);
        let img: Vec<f64> = mag.iter().map(|v| if peak > 0.0 { v / peak } else { 0.0 }).collect();
        let (r, c) = self.shape();
        let file = fs::File::create(dir.join(format!("{stem}.pgm")))?;
        write_pgm(std::io::BufWriter::new(file), &img, c, r, PgmDepth::Eight)?;
        fs::write(dir.join(format!("{stem}_axes.csv")), self.axes_csv())?;
        Ok(())
    }
}

fn check_line(signal: &ComplexField) -> Result<SamplingGrid> {
    let g = *signal.grid();
    if g.dims() != 1 {
        return Err(Error::dim("space-frequency maps take 1D signals"));
    }
    Ok(g)
}

fn wvd_complex(f: &[Complex64]) -> Vec<Complex64> {
    let n = f.len();
    let fft = CenteredFft::new(n);
    let scale = 1.0 / (n as f64).sqrt();
    let mut out = Vec::with_capacity(n * n);
    let mut r = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        r.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let reach = i.min(n - 1 - i);
        for m in 0..=reach {
            let v = f[i + m] * f[i - m].conj();
            r[position(m as isize, n).unwrap()] = v;
            if let Some(q) = position(-(m as isize), n) {
                r[q] = v.conj();
            }
        }
        fft.forward(&mut r);
        out.extend(r.iter().map(|v| v * scale));
    }
    out
}

/// Classical discrete Wigner–Ville distribution.
pub fn wvd_1d(signal: &ComplexField) -> Result<SpaceFrequencyMap> {
    let g = check_line(signal)?;
    let n = g.n();
    let w = wvd_complex(signal.data());
    Ok(SpaceFrequencyMap {
        values: MapValues::Real(w.iter().map(|v| v.re).collect()),
        x_axis: g,
        u_axis: SamplingGrid::line(n, 1.0 / (2.0 * n as f64 * g.pitch()))?,
        alpha: FRAC_PI_2,
        prefactor: 1.0,
    })
}

fn is_multiple_of_pi(alpha: f64) -> bool {
    let r = alpha.rem_euclid(PI);
    r < 1e-12 || PI - r < 1e-12
}

/// Fractional Wigner–Ville distribution `W(x, u csc α − x cot α)`, sampled
/// on the classical map's axes by band-limited interpolation along the
/// frequency axis. `prefactor` holds `|csc α|/(2π)`.
pub fn frwvd_1d(signal: &ComplexField, alpha: f64) -> Result<SpaceFrequencyMap> {
    if !alpha.is_finite() || is_multiple_of_pi(alpha) {
        return Err(Error::param(format!("fractional WVD needs α ≢ 0 (mod π), got {alpha}")));
    }
    let mut map = wvd_1d(signal)?;
    map.alpha = alpha;
    map.prefactor = 1.0 / (2.0 * PI * alpha.sin().abs());
    if (alpha - FRAC_PI_2).rem_euclid(2.0 * PI) < 1e-15 {
        return Ok(map);
    }
    let n = map.x_axis.n();
    let (csc, cot) = (1.0 / alpha.sin(), alpha.cos() / alpha.sin());
    let dw = map.u_axis.pitch();
    let MapValues::Real(w) = &map.values else { unreachable!() };
    let (coarse, fine) = Oversampled::planned(n);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let x = map.x_axis.coord(i);
        let row: Vec<Complex64> = w[i * n..(i + 1) * n].iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let os = Oversampled::new(&row, &coarse, &fine);
        for k in 0..n {
            let u = centered_index(k, n) as f64 * dw;
            out.push(os.at((u * csc - x * cot) / dw).re);
        }
    }
    map.values = MapValues::Real(out);
    Ok(map)
}

/// `T_α(x, w) = F_α(w sin α + x cos α)`: the order-`2α/π` transform of the
/// signal read along rotated lines. Both axes share the signal pitch.
pub fn space_frequency_rep(signal: &ComplexField, alpha: f64) -> Result<SpaceFrequencyMap> {
    let g = check_line(signal)?;
    if !alpha.is_finite() {
        return Err(Error::param("alpha must be finite"));
    }
    let n = g.n();
    let plan = FrftPlan::new(alpha / FRAC_PI_2, n, g.pitch())?;
    let fa = plan.apply_1d(signal.data())?;
    let snap = |v: f64| if v.abs() < 1e-12 { 0.0 } else { v };
    let (s, c) = (snap(alpha.sin()), snap(alpha.cos()));
    let (coarse, fine) = Oversampled::planned(n);
    let os = Oversampled::new(&fa, &coarse, &fine);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let x = centered_index(i, n) as f64;
        for k in 0..n {
            let w = centered_index(k, n) as f64;
            let t = w * s + x * c;
            let exact = t.fract() == 0.0;
            out.push(match (exact, position(t as isize, n)) {
                (true, Some(j)) => fa[j],
                _ => os.at(t),
            });
        }
    }
    Ok(SpaceFrequencyMap {
        values: MapValues::Complex(out),
        x_axis: g,
        u_axis: g,
        alpha,
        prefactor: 1.0,
    })
}
