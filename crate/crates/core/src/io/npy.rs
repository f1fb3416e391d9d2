use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::FormatError;
use crate::field::ComplexField;
use crate::{Error, Result};

const MAGIC: &[u8; 6] = b"\x93NUMPY";

#[derive(Debug, Clone, PartialEq)]
pub enum ArrayData {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
}

impl ArrayData {
    fn len(&self) -> usize {
        match self {
            ArrayData::Real(v) => v.len(),
            ArrayData::Complex(v) => v.len(),
        }
    }

    fn descr(&self) -> &'static str {
        match self {
            ArrayData::Real(_) => "<f8",
            ArrayData::Complex(_) => "<c16",
        }
    }
}

/// C-ordered n-dimensional array of `f64` or `Complex64`.
#[derive(Debug, Clone, PartialEq)]
pub struct NdArray {
    shape: Vec<usize>,
    data: ArrayData,
}

impl NdArray {
    pub fn new(shape: Vec<usize>, data: ArrayData) -> Result<Self> {
        let count: usize = shape.iter().product();
        if count != data.len() {
            return Err(Error::dim(format!("shape {shape:?} holds {count} values, got {}", data.len())));
        }
        Ok(Self { shape, data })
    }

    pub fn real(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        Self::new(shape, ArrayData::Real(data))
    }

    pub fn complex(shape: Vec<usize>, data: Vec<Complex64>) -> Result<Self> {
        Self::new(shape, ArrayData::Complex(data))
    }

    /// Shape `[n]` or `[n, n]` following the field's grid.
    pub fn from_field(field: &ComplexField) -> Self {
        let g = field.grid();
        Self {
            shape: vec![g.n(); g.dims()],
            data: ArrayData::Complex(field.data().to_vec()),
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &ArrayData {
        &self.data
    }

    pub fn into_real(self) -> Result<Vec<f64>> {
        match self.data {
            ArrayData::Real(v) => Ok(v),
            ArrayData::Complex(_) => Err(FormatError::DtypeMismatch {
                expected: "<f8".into(),
                found: "<c16".into(),
            }
            .into()),
        }
    }

    pub fn into_complex(self) -> Result<Vec<Complex64>> {
        match self.data {
            ArrayData::Complex(v) => Ok(v),
            ArrayData::Real(_) => Err(FormatError::DtypeMismatch {
                expected: "<c16".into(),
                found: "<f8".into(),
            }
            .into()),
        }
    }
}

fn header_text(a: &NdArray) -> String {
    let shape = match a.shape.as_slice() {
        [n] => format!("({n},)"),
        s => format!("({})", s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")),
    };
    let mut h = format!("{{'descr': '{}', 'fortran_order': False, 'shape': {shape}, }}", a.data.descr());
    // magic(6) + version(2) + length(2) + header + '\n' is padded to 64 bytes
    let unpadded = 10 + h.len() + 1;
    h.push_str(&" ".repeat((64 - unpadded % 64) % 64));
    h.push('\n');
    h
}

pub fn write_npy<W: Write>(mut w: W, a: &NdArray) -> Result<()> {
    let header = header_text(a);
    let len = u16::try_from(header.len()).map_err(|_| Error::param("array header too long"))?;
    w.write_all(MAGIC)?;
    w.write_all(&[1, 0])?;
    w.write_all(&len.to_le_bytes())?;
    w.write_all(header.as_bytes())?;
    match &a.data {
        ArrayData::Real(v) => {
            for x in v {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        ArrayData::Complex(v) => {
            for z in v {
                w.write_all(&z.re.to_le_bytes())?;
                w.write_all(&z.im.to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn malformed(msg: impl Into<String>) -> Error {
    FormatError::MalformedHeader(msg.into()).into()
}

/// Value text following `'key':` in a header dict.
fn dict_value<'a>(header: &'a str, key: &str) -> Result<&'a str> {
    let pat = format!("'{key}'");
    let at = header.find(&pat).ok_or_else(|| malformed(format!("missing key {key}")))?;
    let rest = header[at + pat.len()..].trim_start();
    rest.strip_prefix(':').map(str::trim_start).ok_or_else(|| malformed(format!("no value for {key}")))
}

struct Header {
    descr: String,
    shape: Vec<usize>,
}

fn parse_header(text: &str) -> Result<Header> {
    let text = text.trim();
    if !(text.starts_with('{') && text.ends_with('}')) {
        return Err(malformed("header is not a dict"));
    }
    let descr_v = dict_value(text, "descr")?;
    let quote = descr_v.chars().next().filter(|c| *c == '\'' || *c == '"').ok_or_else(|| malformed("descr is not a string"))?;
    let descr_end = descr_v[1..].find(quote).ok_or_else(|| malformed("unterminated descr"))?;
    let descr = descr_v[1..1 + descr_end].to_string();

    let fo = dict_value(text, "fortran_order")?;
    if fo.starts_with("True") {
        return Err(malformed("fortran_order arrays are not supported"));
    } else if !fo.starts_with("False") {
        return Err(malformed("fortran_order is not a boolean"));
    }

    let sv = dict_value(text, "shape")?;
    let inner = sv.strip_prefix('(').ok_or_else(|| malformed("shape is not a tuple"))?;
    let close = inner.find(')').ok_or_else(|| malformed("unterminated shape"))?;
    let shape = inner[..close]
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| malformed(format!("bad shape entry `{s}`"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Header { descr, shape })
}

pub fn read_npy<R: Read>(mut r: R) -> Result<NdArray> {
    let mut magic = [0u8; 6];
    read_exact_or(&mut r, &mut magic, FormatError::BadMagic)?;
    if &magic != MAGIC {
        return Err(FormatError::BadMagic.into());
    }
    let mut ver = [0u8; 2];
    read_exact_or(&mut r, &mut ver, malformed_fe("missing version"))?;
    let hlen = match ver {
        [1, 0] => {
            let mut b = [0u8; 2];
            read_exact_or(&mut r, &mut b, malformed_fe("missing header length"))?;
            u16::from_le_bytes(b) as usize
        }
        [a, b] => return Err(FormatError::UnsupportedVersion(a, b).into()),
    };
    let mut hbytes = vec![0u8; hlen];
    read_exact_or(&mut r, &mut hbytes, malformed_fe("header shorter than declared"))?;
    let text = std::str::from_utf8(&hbytes).map_err(|_| malformed("header is not text"))?;
    let header = parse_header(text)?;
    let count: usize = header.shape.iter().product();
    let width = match header.descr.as_str() {
        "<f8" => 8,
        "<c16" => 16,
        other => {
            return Err(FormatError::DtypeMismatch {
                expected: "<f8 or <c16".into(),
                found: other.into(),
            }
            .into())
        }
    };
    let expected = count * width;
    let mut payload = Vec::with_capacity(expected);
    r.take(expected as u64).read_to_end(&mut payload)?;
    if payload.len() < expected {
        return Err(FormatError::Truncated {
            expected,
            found: payload.len(),
        }
        .into());
    }
    let f = |c: &[u8]| f64::from_le_bytes(c.try_into().expect("8-byte chunk"));
    let data = if width == 8 {
        ArrayData::Real(payload.chunks_exact(8).map(f).collect())
    } else {
        ArrayData::Complex(payload.chunks_exact(16).map(|c| Complex64::new(f(&c[..8]), f(&c[8..]))).collect())
    };
    NdArray::new(header.shape, data)
}

fn malformed_fe(msg: &str) -> FormatError {
    FormatError::MalformedHeader(msg.into())
}

fn read_exact_or<R: Read>(r: &mut R, buf: &mut [u8], short: FormatError) -> Result<()> {
    match r.read_exact(buf) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => Err(short.into()),
        Err(e) => Err(e.into()),
    }
}

pub fn save_array(path: impl AsRef<Path>, a: &NdArray) -> Result<()> {
    write_npy(BufWriter::new(File::create(path)?), a)
}

pub fn load_array(path: impl AsRef<Path>) -> Result<NdArray> {
    read_npy(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bytes(a: &NdArray) -> Vec<u8> {
        let mut v = Vec::new();
        write_npy(&mut v, a).unwrap();
        v
    }

    fn format_err(r: Result<NdArray>) -> FormatError {
        match r {
            Err(Error::Format(e)) => e,
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn header_layout_matches_reference_bytes() {
        // bytes numpy writes for np.zeros((2, 2), complex)
        let a = NdArray::complex(vec![2, 2], vec![Complex64::new(0.0, 0.0); 4]).unwrap();
        let b = bytes(&a);
        assert_eq!(&b[..8], b"\x93NUMPY\x01\x00");
        let hlen = u16::from_le_bytes([b[8], b[9]]) as usize;
        assert_eq!((10 + hlen) % 64, 0);
        let h = std::str::from_utf8(&b[10..10 + hlen]).unwrap();
        assert!(h.starts_with("{'descr': '<c16', 'fortran_order': False, 'shape': (2, 2), }"));
        assert!(h.ends_with('\n'));
        assert_eq!(b.len(), 10 + hlen + 64);
        let one = bytes(&NdArray::real(vec![3], vec![1.0, 2.0, 3.0]).unwrap());
        assert!(std::str::from_utf8(&one[10..one.len() - 24]).unwrap().contains("'shape': (3,), }"));
    }

    #[test]
    fn complex_2x2_round_trip_bit_exact() {
        let v = vec![
            Complex64::new(1.5, -0.0),
            Complex64::new(f64::MIN_POSITIVE, 1e300),
            Complex64::new(-3.25, 0.1),
            Complex64::new(f64::NAN, f64::INFINITY),
        ];
        let a = NdArray::complex(vec![2, 2], v.clone()).unwrap();
        let back = read_npy(bytes(&a).as_slice()).unwrap();
        assert_eq!(back.shape(), &[2, 2]);
        let w = back.into_complex().unwrap();
        for (x, y) in v.iter().zip(&w) {
            assert_eq!(x.re.to_bits(), y.re.to_bits());
            assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn large_field_file_round_trip_preserves_norm() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.npy");
        let n = 256;
        let v: Vec<Complex64> = (0..n * n).map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos())).collect();
        let a = NdArray::complex(vec![n, n], v.clone()).unwrap();
        save_array(&path, &a).unwrap();
        let back = load_array(&path).unwrap();
        assert_eq!(back, a);
        let norm = |x: &[Complex64]| x.iter().map(|z| z.norm_sqr()).sum::<f64>();
        assert_eq!(norm(&back.into_complex().unwrap()), norm(&v));
    }

    #[test]
    fn distinct_errors() {
        let good = bytes(&NdArray::real(vec![2], vec![1.0, 2.0]).unwrap());

        let mut bad = good.clone();
        bad[1] = b'X';
        assert_eq!(format_err(read_npy(bad.as_slice())), FormatError::BadMagic);

        let mut v2 = good.clone();
        v2[6] = 3;
        assert_eq!(format_err(read_npy(v2.as_slice())), FormatError::UnsupportedVersion(3, 0));

        let cut = &good[..good.len() - 3];
        assert_eq!(
            format_err(read_npy(cut)),
            FormatError::Truncated {
                expected: 16,
                found: 13
            }
        );

        let mut hdr = good.clone();
        let at = hdr.windows(5).position(|w| w == b"shape").unwrap();
        hdr[at] = b'x';
        assert!(matches!(format_err(read_npy(hdr.as_slice())), FormatError::MalformedHeader(_)));

        let mut dt = good.clone();
        let at = dt.windows(3).position(|w| w == b"<f8").unwrap();
        dt[at + 1] = b'i';
        assert!(matches!(format_err(read_npy(dt.as_slice())), FormatError::DtypeMismatch { .. }));

        let real = read_npy(good.as_slice()).unwrap();
        assert!(matches!(real.into_complex(), Err(Error::Format(FormatError::DtypeMismatch { .. }))));
        assert!(matches!(read_npy(&b"\x93NU"[..]), Err(Error::Format(FormatError::BadMagic))));
    }

    proptest! {
        #[test]
        fn real_round_trip_bit_exact(v in proptest::collection::vec(any::<f64>(), 0..200)) {
            let a = NdArray::real(vec![v.len()], v.clone()).unwrap();
            let back = read_npy(bytes(&a).as_slice()).unwrap().into_real().unwrap();
            prop_assert_eq!(back.iter().map(|x| x.to_bits()).collect::<Vec<_>>(), v.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
        }
    }
}
