//! Fractional Fourier transform optics.
//!
//! The crate is organised around a single measurement model: near-field
//! (Fresnel) diffraction written as a scaled fractional Fourier transform.
//!
//! * [`field`] holds sampling grids, complex fields, images and fidelity metrics.
//! * [`dfrft`] is the fast discrete fractional Fourier transform, its adjoint and
//!   a dense kernel used as a verification oracle.
//! * [`propagation`] implements the quadrature reference, the single-FFT and
//!   transfer-function Fresnel propagators, and the FrFT measurement model.
//! * [`retrieval`] recovers objects from one FrFT magnitude image.
//! * [`analysis`] computes Wigner–Ville and fractional space-frequency maps.
//! * [`io`] reads and writes NPY arrays and PGM images.

pub mod analysis;
pub mod dfrft;
mod error;
pub mod fft;
pub mod field;
pub mod io;
pub mod propagation;
pub mod retrieval;
pub mod scene;

pub use error::{Error, Result};
pub use num_complex::Complex64;
