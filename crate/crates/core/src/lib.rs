//! PT-symmetry breaking in transverse-field Ising chains with one- and
//! two-site exceptional perturbations.
//!
//! * [`model`] builds the real `2^N x 2^N` Hamiltonians.
//! * [`eig`] computes full complex spectra of dense real matrices.
//! * [`pt`] detects complex spectra, bisects thresholds, and runs sweeps.
//! * [`analytic`] is the closed-form `h_z = 0` reduction used as an oracle.
//! * [`poly`] holds characteristic-polynomial utilities shared by the oracle.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below are the double-precision instantiations used by the
//! command-line driver.

pub mod analytic;
pub mod eig;
pub mod error;
pub mod matrix;
pub mod model;
pub mod poly;
pub mod pt;
pub mod scalar;

pub use num_complex::Complex;

pub use error::{Error, Result};
pub use matrix::RealMatrix;
pub use model::{Boundary, PauliKind, PerturbationSpec, SiteClass, SpinChainConfig};
pub use scalar::Scalar;

pub type RealMatrix64 = RealMatrix<f64>;
pub type SpinChain64 = SpinChainConfig<f64>;
pub type Perturbation64 = PerturbationSpec<f64>;
pub type Spectrum64 = eig::Spectrum<f64>;
pub type ThresholdResult64 = pt::ThresholdResult<f64>;
pub type FlowTable64 = pt::FlowTable<f64>;
pub type PhaseGrid64 = pt::PhaseGrid<f64>;
pub type FieldResponseFit64 = pt::FieldResponseFit<f64>;
pub type Complex64 = Complex<f64>;

pub type RealMatrix32 = RealMatrix<f32>;
pub type Spectrum32 = eig::Spectrum<f32>;
