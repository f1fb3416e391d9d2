use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::FormatError;
use crate::field::{RealImage, SamplingGrid};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmDepth {
    Eight,
    Sixteen,
}

impl PgmDepth {
    fn maxval(self) -> u32 {
        match self {
            PgmDepth::Eight => 255,
            PgmDepth::Sixteen => 65535,
        }
    }
}

/// Writes `width × height` values, clamped to `[0, 1]`, as binary PGM.
pub fn write_pgm<W: Write>(mut w: W, data: &[f64], width: usize, height: usize, depth: PgmDepth) -> Result<()> {
    if data.len() != width * height {
        return Err(Error::dim(format!("{width}×{height} image needs {} values, got {}", width * height, data.len())));
    }
    let maxval = depth.maxval();
    write!(w, "P5\n{width} {height}\n{maxval}\n")?;
    let q = |v: f64| (v.clamp(0.0, 1.0) * maxval as f64).round() as u32;
    match depth {
        PgmDepth::Eight => w.write_all(&data.iter().map(|&v| q(v) as u8).collect::<Vec<_>>())?,
        PgmDepth::Sixteen => {
            for &v in data {
                w.write_all(&(q(v) as u16).to_be_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn malformed(msg: &str) -> Error {
    FormatError::MalformedHeader(msg.into()).into()
}

/// Next whitespace-delimited header token, skipping `#` comments.
fn token(bytes: &[u8], pos: &mut usize) -> Result<String> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
        } else {
            break;
        }
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(malformed("unexpected end of header"));
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

/// Returns `(values in [0, 1], width, height)`.
pub fn read_pgm<R: Read>(mut r: R) -> Result<(Vec<f64>, usize, usize)> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(FormatError::BadMagic.into());
    }
    let mut pos = 2;
    let num = |s: String| s.parse::<usize>().map_err(|_| malformed("non-numeric header field"));
    let width = num(token(&bytes, &mut pos)?)?;
    let height = num(token(&bytes, &mut pos)?)?;
    let maxval = num(token(&bytes, &mut pos)?)?;
    if maxval == 0 || maxval > 65535 {
        return Err(malformed("maxval out of range"));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let bpp = if maxval < 256 { 1 } else { 2 };
    let expected = width * height * bpp;
    let raster = bytes.get(pos..).unwrap_or(&[]);
    if raster.len() < expected {
        return Err(FormatError::Truncated {
            expected,
            found: raster.len(),
        }
        .into());
    }
    let m = maxval as f64;
    let data = if bpp == 1 {
        raster[..expected].iter().map(|&b| b as f64 / m).collect()
    } else {
        raster[..expected].chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]]) as f64 / m).collect()
    };
    Ok((data, width, height))
}

pub fn save_image(path: impl AsRef<Path>, img: &RealImage, depth: PgmDepth) -> Result<()> {
    let g = img.grid();
    let (w, h) = if g.dims() == 2 { (g.n(), g.n()) } else { (g.n(), 1) };
    write_pgm(BufWriter::new(File::create(path)?), img.data(), w, h, depth)
}

/// Loads a square PGM as a 2D image with the given pixel pitch.
pub fn load_image(path: impl AsRef<Path>, pitch: f64) -> Result<RealImage> {
    let (data, w, h) = read_pgm(BufReader::new(File::open(path)?))?;
    if w != h {
        return Err(Error::dim(format!("images must be square, got {w}×{h}")));
    }
    RealImage::new(SamplingGrid::square(w, pitch)?, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_both_depths() {
        let data: Vec<f64> = (0..12).map(|k| k as f64 / 11.0).collect();
        for (depth, tol) in [(PgmDepth::Eight, 0.5 / 255.0), (PgmDepth::Sixteen, 0.5 / 65535.0)] {
            let mut buf = Vec::new();
            write_pgm(&mut buf, &data, 4, 3, depth).unwrap();
            let (back, w, h) = read_pgm(buf.as_slice()).unwrap();
            assert_eq!((w, h), (4, 3));
            for (a, b) in data.iter().zip(&back) {
                assert!((a - b).abs() <= tol + 1e-15);
            }
        }
    }

    #[test]
    fn header_comments_and_errors() {
        let mut f = b"P5\n# comment\n2 1\n255\n".to_vec();
        f.extend([0u8, 255]);
        assert_eq!(read_pgm(f.as_slice()).unwrap().0, vec![0.0, 1.0]);
        assert!(matches!(read_pgm(&b"P2\n1 1\n255\n0"[..]), Err(Error::Format(FormatError::BadMagic))));
        assert!(matches!(read_pgm(&b"P5\n2 2\n255\n\x00"[..]), Err(Error::Format(FormatError::Truncated { .. }))));
    }

    #[test]
    fn image_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.pgm");
        let g = SamplingGrid::square(4, 1e-6).unwrap();
        let img = RealImage::new(g, (0..16).map(|k| k as f64 / 15.0).collect()).unwrap();
        save_image(&p, &img, PgmDepth::Sixteen).unwrap();
        let back = load_image(&p, 1e-6).unwrap();
        assert!(img.data().iter().zip(back.data()).all(|(a, b)| (a - b).abs() < 1e-5));
    }
}
