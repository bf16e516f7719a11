//! PT-symmetry analysis on top of full spectra.
//!
//! A spectrum counts as broken when some eigenvalue has an imaginary part
//! above `snap_tol · ρ`, with `ρ` the spectral radius. The relative snap
//! separates genuine conjugate pairs from rounding noise: eigenvalues that
//! sit on exceptional points (the flat levels of a bulk single-site
//! perturbation, for instance) are defective, and double-precision QR
//! resolves them only to about `sqrt(ε)`, leaving imaginary parts of order
//! `1e-8 … 1e-6` even where the exact spectrum is real.

mod field;
mod sweep;
mod threshold;

pub use field::{field_category, fit_field_response, FieldCategory, FieldResponseFit};
pub use sweep::{flow_sweep, phase_grid_gamma_hz, phase_grid_single_site, FlowTable, PhaseGrid};
pub use threshold::{find_threshold, ThresholdResult, ThresholdSearch};

use num_complex::Complex;

use crate::eig::{self, Spectrum};
use crate::error::{Error, Result};
use crate::model::{build_scaled, PerturbationSpec, SpinChainConfig};
use crate::scalar::Scalar;

/// Default relative snap tolerance for [`max_imag`].
pub const DEFAULT_SNAP_TOL: f64 = 5e-6;

/// Default number of coarse scan points before bisection.
pub const DEFAULT_SCAN_POINTS: usize = 64;

/// Outcome of a threshold search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Threshold<T> {
    Found(T),
    /// Spectrum stays real up to the largest strength examined.
    NoThreshold,
}

impl<T: Scalar> Threshold<T> {
    pub fn value(&self) -> Option<T> {
        match *self {
            Threshold::Found(g) => Some(g),
            Threshold::NoThreshold => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Threshold::Found(_))
    }
}

/// Largest imaginary part of a list of eigenvalues, with
/// `|Im λ| ≤ snap_tol · ρ` treated as exactly zero. Never negative.
pub fn max_imag_of<T: Scalar>(eigenvalues: &[Complex<T>], snap_tol: T) -> T {
    let radius = eigenvalues.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let cutoff = snap_tol * radius;
    eigenvalues
        .iter()
        .map(|z| z.im)
        .filter(|&im| im > cutoff)
        .fold(T::zero(), T::max)
}

/// [`max_imag_of`] on a [`Spectrum`].
pub fn max_imag<T: Scalar>(s: &Spectrum<T>, snap_tol: T) -> T {
    max_imag_of(&s.eigenvalues, snap_tol)
}

/// Spectrum at strength `gamma` along `pert` (single-site strengths scaled).
pub fn spectrum_at<T: Scalar>(
    config: &SpinChainConfig<T>,
    pert: &PerturbationSpec<T>,
    gamma: T,
) -> Result<Spectrum<T>> {
    let h = build_scaled(config, pert, gamma)?;
    eig::eigenvalues(&h).map_err(|e| Error::AtGamma {
        gamma: gamma.to_f64_lossy(),
        source: Box::new(e),
    })
}

/// Whether the spectrum at `gamma` contains a complex-conjugate pair.
pub fn is_broken<T: Scalar>(
    config: &SpinChainConfig<T>,
    pert: &PerturbationSpec<T>,
    gamma: T,
    snap_tol: T,
) -> Result<bool> {
    check_snap(snap_tol)?;
    if gamma < T::zero() {
        return Err(Error::InvalidArgument(format!(
            "gamma must be non-negative, got {gamma}"
        )));
    }
    let s = spectrum_at(config, pert, gamma)?;
    Ok(max_imag(&s, snap_tol) > T::zero())
}

pub(crate) fn check_snap<T: Scalar>(snap_tol: T) -> Result<()> {
    if snap_tol < T::zero() || !snap_tol.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "snap tolerance must be finite and >= 0, got {snap_tol}"
        )));
    }
    Ok(())
}

pub(crate) fn check_grid<T: Scalar>(name: &str, grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} grid is empty")));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "{name} grid has non-finite values"
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!(
            "{name} grid must be strictly ascending"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PerturbationSpec;

    #[test]
    fn max_imag_basics() {
        let real = [Complex::new(1.0, 0.0), Complex::new(-2.0, 0.0)];
        assert_eq!(max_imag_of(&real, 1e-7), 0.0);
        let pair = [
            Complex::new(1.0, 0.3),
            Complex::new(1.0, -0.3),
            Complex::new(-0.5, 0.0),
        ];
        assert_eq!(max_imag_of(&pair, 1e-7), 0.3);
        let noisy = [Complex::new(2.0, 1e-9), Complex::new(2.0, -1e-9)];
        assert_eq!(max_imag_of(&noisy, 1e-7), 0.0);
        assert_eq!(max_imag_of(&noisy, 0.0), 1e-9);
        assert_eq!(max_imag_of::<f64>(&[], 1e-7), 0.0);
    }

    #[test]
    fn adjacent_pair_breaks_immediately() {
        let c = SpinChainConfig::open(7, 1.0, 0.0).unwrap();
        let s = spectrum_at(&c, &PerturbationSpec::TwoSitePlus { p: 2, q: 1 }, 0.1).unwrap();
        assert!(max_imag(&s, DEFAULT_SNAP_TOL) > 0.0);
    }

    #[test]
    fn edge_pair_below_and_above_quarter() {
        let c = SpinChainConfig::open(5, 1.0, 0.0).unwrap();
        let pert = PerturbationSpec::TwoSitePlus { p: 1, q: 5 };
        assert!(!is_broken(&c, &pert, 0.2, DEFAULT_SNAP_TOL).unwrap());
        assert!(is_broken(&c, &pert, 0.3, DEFAULT_SNAP_TOL).unwrap());
    }

    #[test]
    fn unperturbed_never_breaks() {
        let c = SpinChainConfig::open(5, 1.0, 0.4).unwrap();
        for &g in &[0.0, 0.5, 3.0] {
            assert!(!is_broken(&c, &PerturbationSpec::None, g, DEFAULT_SNAP_TOL).unwrap());
        }
    }

    #[test]
    fn argument_checks() {
        let c = SpinChainConfig::open(3, 1.0, 0.0).unwrap();
        assert!(is_broken(&c, &PerturbationSpec::None, -0.1, 1e-5).is_err());
        assert!(is_broken(&c, &PerturbationSpec::None, 0.1, -1.0).is_err());
        assert!(check_grid::<f64>("g", &[]).is_err());
        assert!(check_grid("g", &[0.0, 0.0]).is_err());
        assert!(check_grid("g", &[0.0, 0.1]).is_ok());
    }
}
