//! Francis implicit double-shift QR on an upper Hessenberg matrix,
//! eigenvalues only.
//!
//! The iteration follows the classic `hqr` structure: the active window
//! `[l, nn]` is found by scanning up from the bottom for a negligible
//! subdiagonal, converged 1x1 and 2x2 blocks are split off, and each sweep
//! chases a 3x3 Householder bulge down the window. Schur vectors are not
//! accumulated, so only rows and columns inside the window are touched.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::scalar::Scalar;

/// Ad hoc shift cadence, in iterations without deflation.
pub const EXCEPTIONAL_SHIFT_EVERY: usize = 10;

/// Eigenvalues of `[[a, b], [c, d]]`, conjugate pair first-plus-then-minus.
pub(crate) fn eig22<T: Scalar>(a: T, b: T, c: T, d: T) -> (Complex<T>, Complex<T>) {
    let s = a.abs() + b.abs() + c.abs() + d.abs();
    if s == T::zero() {
        return (
            Complex::new(T::zero(), T::zero()),
            Complex::new(T::zero(), T::zero()),
        );
    }
    let (a, b, c, d) = (a / s, b / s, c / s, d / s);
    let half = T::lit(0.5);
    let p = half * (a - d);
    let bc = b * c;
    let disc = p * p + bc;
    if disc >= T::zero() {
        let r = disc.sqrt();
        let z = p + r.copysign(p);
        let (l1, l2) = if z == T::zero() {
            (d, d)
        } else {
            (d + z, d - bc / z)
        };
        (
            Complex::new(l1 * s, T::zero()),
            Complex::new(l2 * s, T::zero()),
        )
    } else {
        let re = (d + p) * s;
        let im = (-disc).sqrt() * s;
        (Complex::new(re, im), Complex::new(re, -im))
    }
}

pub(crate) struct HqrOutput<T> {
    pub eigenvalues: Vec<Complex<T>>,
    pub iterations: usize,
}

/// Destroys `h`. `tol` is the relative deflation threshold.
pub(crate) fn hqr_in_place<T: Scalar>(
    h: &mut RealMatrix<T>,
    max_iter_per_eig: usize,
    tol: T,
) -> Result<HqrOutput<T>> {
    let n = h.dim();
    let zero = T::zero();
    let mut eig = vec![Complex::new(zero, zero); n];
    let mut done = vec![false; n];
    if n == 0 {
        return Ok(HqrOutput {
            eigenvalues: eig,
            iterations: 0,
        });
    }

    let mut norm = zero;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            norm += h[(i, j)].abs();
        }
    }
    let cap = max_iter_per_eig.saturating_mul(n);
    let mut exshift = zero;
    let mut total = 0usize;
    let mut its = 0usize;
    let mut nn = n as isize - 1;

    let store = |eig: &mut Vec<Complex<T>>, done: &mut Vec<bool>, i: usize, v: Complex<T>| {
        eig[i] = v;
        done[i] = true;
    };

    while nn >= 0 {
        let bottom = nn as usize;

        let mut l = bottom;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == zero {
                s = norm;
            }
            if h[(l, l - 1)].abs() <= tol * s {
                h[(l, l - 1)] = zero;
                break;
            }
            l -= 1;
        }

        let mut x = h[(bottom, bottom)];
        if l == bottom {
            store(&mut eig, &mut done, bottom, Complex::new(x + exshift, zero));
            nn -= 1;
            its = 0;
            continue;
        }

        let mut y = h[(bottom - 1, bottom - 1)];
        let mut w = h[(bottom, bottom - 1)] * h[(bottom - 1, bottom)];
        if l == bottom - 1 {
            let (e1, e2) = eig22(y, h[(bottom - 1, bottom)], h[(bottom, bottom - 1)], x);
            let shift = Complex::new(exshift, zero);
            store(&mut eig, &mut done, bottom - 1, e1 + shift);
            store(&mut eig, &mut done, bottom, e2 + shift);
            nn -= 2;
            its = 0;
            continue;
        }

        if total >= cap {
            let partial = eig
                .iter()
                .zip(&done)
                .filter(|(_, &d)| d)
                .map(|(e, _)| (e.re.to_f64_lossy(), e.im.to_f64_lossy()))
                .collect();
            return Err(Error::NoConvergence {
                iterations: total,
                dim: n,
                partial,
            });
        }

        if its > 0 && its.is_multiple_of(EXCEPTIONAL_SHIFT_EVERY) {
            exshift += x;
            for i in 0..=bottom {
                h[(i, i)] -= x;
            }
            let s = h[(bottom, bottom - 1)].abs() + h[(bottom - 1, bottom - 2)].abs();
            x = T::lit(0.75) * s;
            y = x;
            w = T::lit(-0.4375) * s * s;
        }
        its += 1;
        total += 1;

        francis_sweep(h, l, bottom, x, y, w);
    }

    Ok(HqrOutput {
        eigenvalues: eig,
        iterations: total,
    })
}

/// One implicit double-shift step on the window `[l, bottom]` with shifts
/// encoded by `x`, `y`, `w` (trace and determinant of the trailing 2x2).
fn francis_sweep<T: Scalar>(h: &mut RealMatrix<T>, l: usize, bottom: usize, x: T, y: T, w: T) {
    let zero = T::zero();
    let eps = T::epsilon();
    let n = h.dim();

    // Start the bulge at the lowest m where two consecutive subdiagonals
    // are small enough that the first column of the shifted product decouples.
    let mut m = bottom - 2;
    let (mut p, mut q, mut r);
    loop {
        let z = h[(m, m)];
        let r0 = x - z;
        let s0 = y - z;
        p = (r0 * s0 - w) / h[(m + 1, m)] + h[(m, m + 1)];
        q = h[(m + 1, m + 1)] - z - r0 - s0;
        r = h[(m + 2, m + 1)];
        let s = p.abs() + q.abs() + r.abs();
        if s != zero {
            p /= s;
            q /= s;
            r /= s;
        }
        if m == l {
            break;
        }
        let u = h[(m, m - 1)].abs() * (q.abs() + r.abs());
        let v = p.abs() * (h[(m - 1, m - 1)].abs() + z.abs() + h[(m + 1, m + 1)].abs());
        if u <= eps * v {
            break;
        }
        m -= 1;
    }

    for i in m + 2..=bottom {
        h[(i, i - 2)] = zero;
        if i != m + 2 {
            h[(i, i - 3)] = zero;
        }
    }

    for k in m..bottom {
        let notlast = k != bottom - 1;
        let mut scale = T::one();
        if k != m {
            p = h[(k, k - 1)];
            q = h[(k + 1, k - 1)];
            r = if notlast { h[(k + 2, k - 1)] } else { zero };
            scale = p.abs() + q.abs() + r.abs();
            if scale == zero {
                continue;
            }
            p /= scale;
            q /= scale;
            r /= scale;
        }
        let s = (p * p + q * q + r * r).sqrt().copysign(p);
        if s == zero {
            continue;
        }
        if k != m {
            h[(k, k - 1)] = -s * scale;
        } else if l != m {
            h[(k, k - 1)] = -h[(k, k - 1)];
        }
        p += s;
        let hx = p / s;
        let hy = q / s;
        let hz = r / s;
        let q = q / p;
        let r = r / p;

        // Row update on columns k..=bottom.
        {
            let data = h.as_mut_slice();
            let (head, tail) = data.split_at_mut((k + 1) * n);
            let row0 = &mut head[k * n + k..k * n + bottom + 1];
            if notlast {
                let (r1, r2) = tail.split_at_mut(n);
                let row1 = &mut r1[k..=bottom];
                let row2 = &mut r2[k..=bottom];
                for ((a0, a1), a2) in row0.iter_mut().zip(row1.iter_mut()).zip(row2.iter_mut()) {
                    let t = *a0 + q * *a1 + r * *a2;
                    *a0 -= t * hx;
                    *a1 -= t * hy;
                    *a2 -= t * hz;
                }
            } else {
                let row1 = &mut tail[k..=bottom];
                for (a0, a1) in row0.iter_mut().zip(row1.iter_mut()) {
                    let t = *a0 + q * *a1;
                    *a0 -= t * hx;
                    *a1 -= t * hy;
                }
            }
        }

        // Column update on rows l..=min(bottom, k+3).
        let imax = bottom.min(k + 3);
        for i in l..=imax {
            let row = &mut h.row_mut(i)[k..];
            if notlast {
                let t = hx * row[0] + hy * row[1] + hz * row[2];
                row[0] -= t;
                row[1] -= t * q;
                row[2] -= t * r;
            } else {
                let t = hx * row[0] + hy * row[1];
                row[0] -= t;
                row[1] -= t * q;
            }
        }
    }
}
