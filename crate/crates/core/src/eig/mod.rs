//! Dense eigenvalues of real nonsymmetric matrices:
//! balance, Householder Hessenberg reduction, Francis double-shift QR.

mod balance;
mod hessenberg;
mod schur;

use num_complex::Complex;

pub use balance::{balance, Scaling};
pub use hessenberg::hessenberg;
pub use schur::EXCEPTIONAL_SHIFT_EVERY;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::scalar::Scalar;

/// Iteration budget per eigenvalue; the solver gives up after
/// `DEFAULT_MAX_ITER_PER_EIG * dim` QR sweeps in total.
pub const DEFAULT_MAX_ITER_PER_EIG: usize = 30;

/// Full complex spectrum of a real matrix (with multiplicity).
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<Complex<T>>,
    /// Power-sum consistency check, scaled by the input's ∞-norm:
    /// `max(|Σλ − tr A| / ‖A‖, |Σλ² − tr A²| / ‖A‖²)`.
    pub max_residual: T,
    /// Total QR sweeps.
    pub iterations: usize,
}

impl<T: Scalar> Spectrum<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn spectral_radius(&self) -> T {
        self.eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), T::max)
    }

    /// Largest imaginary part, without any snapping.
    pub fn max_imag_raw(&self) -> T {
        self.eigenvalues
            .iter()
            .map(|z| z.im)
            .fold(T::zero(), T::max)
    }

    /// Eigenvalues ordered by real part, then imaginary part.
    pub fn sorted(&self) -> Vec<Complex<T>> {
        let mut v = self.eigenvalues.clone();
        sort_complex(&mut v);
        v
    }

    /// Eigenvalue with the smallest real part.
    pub fn min_real(&self) -> Option<Complex<T>> {
        self.eigenvalues
            .iter()
            .copied()
            .min_by(|a, b| a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal))
    }

    /// Largest distance between a non-real eigenvalue and its matched
    /// conjugate, pairing greedily after sorting. Eigenvalues with
    /// `|Im| ≤ real_tol` count as real and are ignored.
    pub fn conjugate_pairing_error(&self, real_tol: T) -> T {
        let mut upper: Vec<_> = self
            .eigenvalues
            .iter()
            .filter(|z| z.im > real_tol)
            .copied()
            .collect();
        let mut lower: Vec<_> = self
            .eigenvalues
            .iter()
            .filter(|z| z.im < -real_tol)
            .map(|z| z.conj())
            .collect();
        if upper.len() != lower.len() {
            return T::infinity();
        }
        sort_complex(&mut upper);
        sort_complex(&mut lower);
        upper
            .iter()
            .zip(&lower)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }
}

pub fn sort_complex<T: Scalar>(v: &mut [Complex<T>]) {
    v.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Eigenvalues of an upper Hessenberg matrix from its real Schur form.
///
/// A subdiagonal `h[i+1, i]` is deflated when
/// `|h[i+1, i]| ≤ tol · (|h[i, i]| + |h[i+1, i+1]|)`. Ad hoc shifts are
/// used every [`EXCEPTIONAL_SHIFT_EVERY`] iterations without deflation.
pub fn real_schur_eigenvalues<T: Scalar>(
    h: &RealMatrix<T>,
    max_iter_per_eig: usize,
    tol: T,
) -> Result<Spectrum<T>> {
    h.check_finite()?;
    if let Some((row, col)) = h.first_below_subdiagonal() {
        return Err(Error::NotHessenberg { row, col });
    }
    let mut work = h.clone();
    let out = schur::hqr_in_place(&mut work, max_iter_per_eig, tol)?;
    let max_residual = power_sum_residual(h, &out.eigenvalues);
    Ok(Spectrum {
        eigenvalues: out.eigenvalues,
        max_residual,
        iterations: out.iterations,
    })
}

/// Full spectrum: balance, reduce to Hessenberg, then QR.
pub fn eigenvalues<T: Scalar>(m: &RealMatrix<T>) -> Result<Spectrum<T>> {
    let (mut work, _) = balance(m)?;
    hessenberg::reduce_in_place(&mut work);
    let out = schur::hqr_in_place(&mut work, DEFAULT_MAX_ITER_PER_EIG, T::epsilon())?;
    let max_residual = power_sum_residual(m, &out.eigenvalues);
    Ok(Spectrum {
        eigenvalues: out.eigenvalues,
        max_residual,
        iterations: out.iterations,
    })
}

fn power_sum_residual<T: Scalar>(m: &RealMatrix<T>, eig: &[Complex<T>]) -> T {
    let n = m.dim();
    let mut scale = m.norm_inf();
    if scale == T::zero() {
        scale = T::one();
    }
    let p1: Complex<T> = eig.iter().copied().sum();
    let p2: Complex<T> = eig.iter().map(|z| z * z).sum();
    let tr1 = m.trace();
    let mut tr2 = T::zero();
    for i in 0..n {
        for j in 0..n {
            tr2 += m[(i, j)] * m[(j, i)];
        }
    }
    let r1 = (p1 - Complex::new(tr1, T::zero())).norm() / scale;
    let r2 = (p2 - Complex::new(tr2, T::zero())).norm() / (scale * scale);
    r1.max(r2)
}
