//! Characteristic polynomials and polynomial roots.
//!
//! These avoid the QR path entirely, which is what makes them usable as an
//! independent check on [`crate::eig`]. Faddeev–LeVerrier is unstable for
//! large dimensions; keep it to small matrices.

use num_complex::Complex;

use crate::matrix::RealMatrix;
use crate::scalar::Scalar;

const ABERTH_MAX_ITER: usize = 2000;

/// Monic characteristic polynomial `det(λI − A)`, coefficients
/// lowest-degree first (`coeffs[n] = 1`).
pub fn charpoly<T: Scalar>(a: &RealMatrix<T>) -> Vec<T> {
    let n = a.dim();
    let mut coeffs = vec![T::zero(); n + 1];
    coeffs[n] = T::one();
    let mut m = RealMatrix::zeros(n);
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1}·I
        let mut next = a.matmul(&m);
        for i in 0..n {
            next[(i, i)] += coeffs[n - k + 1];
        }
        let am = a.matmul(&next);
        coeffs[n - k] = -am.trace() / T::from_usize_lossy(k);
        m = next;
    }
    coeffs
}

/// Horner evaluation at a complex point.
pub fn eval<T: Scalar>(coeffs: &[T], z: Complex<T>) -> Complex<T> {
    coeffs
        .iter()
        .rev()
        .fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * z + c)
}

fn eval_with_derivative<T: Scalar>(coeffs: &[T], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let zero = Complex::new(T::zero(), T::zero());
    let mut p = zero;
    let mut dp = zero;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots (with multiplicity) by Aberth–Ehrlich iteration.
///
/// `coeffs` is lowest-degree first; the leading coefficient must be nonzero.
pub fn roots<T: Scalar>(coeffs: &[T]) -> Vec<Complex<T>> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.len() > 1 && *coeffs.last().unwrap() == T::zero() {
        coeffs.pop();
    }
    let deg = coeffs.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let monic: Vec<T> = coeffs.iter().map(|&c| c / lead).collect();

    // Roots at the origin are exact; strip them.
    let zeros_at_origin = monic.iter().take_while(|&&c| c == T::zero()).count();
    let reduced = &monic[zeros_at_origin..];
    let rdeg = reduced.len() - 1;
    let mut out = vec![Complex::new(T::zero(), T::zero()); zeros_at_origin];
    if rdeg == 0 {
        return out;
    }

    let radius = reduced[..rdeg]
        .iter()
        .enumerate()
        .map(|(i, c)| c.abs().powf(T::one() / T::from_usize_lossy(rdeg - i)))
        .fold(T::zero(), T::max)
        .max(T::lit(1e-3));
    let centre = -reduced[rdeg - 1] / T::from_usize_lossy(rdeg);
    let two_pi = T::lit(std::f64::consts::TAU);
    let mut z: Vec<Complex<T>> = (0..rdeg)
        .map(|k| {
            let theta = two_pi * T::from_usize_lossy(k) / T::from_usize_lossy(rdeg) + T::lit(0.4);
            Complex::new(centre, T::zero()) + Complex::from_polar(radius, theta)
        })
        .collect();

    let tiny = T::epsilon() * T::lit(4.0);
    for _ in 0..ABERTH_MAX_ITER {
        let mut worst = T::zero();
        for k in 0..rdeg {
            let (p, dp) = eval_with_derivative(reduced, z[k]);
            if p.norm() == T::zero() {
                continue;
            }
            let ratio = p / dp;
            let mut sum = Complex::new(T::zero(), T::zero());
            for j in 0..rdeg {
                if j != k {
                    let d = z[k] - z[j];
                    if d.norm() > T::zero() {
                        sum += Complex::new(T::one(), T::zero()) / d;
                    }
                }
            }
            let denom = Complex::new(T::one(), T::zero()) - ratio * sum;
            let step = if denom.norm() > T::zero() {
                ratio / denom
            } else {
                ratio
            };
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                worst = worst.max(step.norm() / (T::one() + z[k].norm()));
            }
        }
        if worst <= tiny {
            break;
        }
    }
    out.extend(z);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn charpoly_of_companion_like_matrix() {
        // [[2,1],[1,3]] -> λ² − 5λ + 5
        let a = RealMatrix::<f64>::from_rows(&[[2.0, 1.0], [1.0, 3.0]]).unwrap();
        let c = charpoly(&a);
        assert!((c[0] - 5.0).abs() < 1e-12);
        assert!((c[1] + 5.0).abs() < 1e-12);
        assert_eq!(c[2], 1.0);
    }

    #[test]
    fn roots_of_known_cubic() {
        // (x − 1)(x + 2)(x − 3) = x³ − 2x² − 5x + 6
        let mut r = roots(&[6.0, -5.0, -2.0, 1.0]);
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (got, want) in r.iter().zip([-2.0, 1.0, 3.0]) {
            assert!((got - Complex::new(want, 0.0)).norm() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn roots_with_conjugate_pair_and_origin() {
        // x(x² + 4)
        let r = roots(&[0.0, 4.0, 0.0, 1.0]);
        assert_eq!(r.len(), 3);
        assert!(r
            .iter()
            .any(|z| (z - Complex::new(0.0, 2.0)).norm() < 1e-12));
        assert!(r
            .iter()
            .any(|z| (z - Complex::new(0.0, -2.0)).norm() < 1e-12));
        assert!(r.iter().any(|z| z.norm() < 1e-12));
    }

    #[test]
    fn eval_matches_direct() {
        let c = [1.0, -3.0, 0.5];
        let z = Complex::new(0.3, -1.2);
        let direct = Complex::new(1.0, 0.0) - z * 3.0 + z * z * 0.5;
        assert!((eval(&c, z) - direct).norm() < 1e-14);
    }
}
