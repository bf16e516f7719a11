//! Householder reduction to upper Hessenberg form.

use crate::matrix::RealMatrix;
use crate::scalar::Scalar;

/// Orthogonally similar upper Hessenberg matrix; entries below the first
/// subdiagonal are exactly zero.
pub fn hessenberg<T: Scalar>(m: &RealMatrix<T>) -> RealMatrix<T> {
    let mut a = m.clone();
    reduce_in_place(&mut a);
    a
}

pub(crate) fn reduce_in_place<T: Scalar>(a: &mut RealMatrix<T>) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    let mut v = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        // x = a[k+1.., k]
        let mut scale = T::zero();
        for i in 0..len {
            scale = scale.max(a[(k + 1 + i, k)].abs());
        }
        let tail_zero = (1..len).all(|i| a[(k + 1 + i, k)] == T::zero());
        if scale == T::zero() || tail_zero {
            continue;
        }
        let mut sq = T::zero();
        for i in 0..len {
            let x = a[(k + 1 + i, k)] / scale;
            v[i] = x;
            sq += x * x;
        }
        let x0 = v[0];
        let norm = sq.sqrt();
        let beta = if x0 >= T::zero() { -norm } else { norm };
        let tau = (beta - x0) / beta;
        let v0 = x0 - beta;
        v[0] = T::one();
        for vi in v.iter_mut().take(len).skip(1) {
            *vi /= v0;
        }
        let v = &v[..len];

        // Left: rows k+1.., columns k+1..
        let wj = &mut w[..n - k - 1];
        wj.iter_mut().for_each(|x| *x = T::zero());
        for (i, &vi) in v.iter().enumerate() {
            let row = &a.row(k + 1 + i)[k + 1..];
            for (acc, &x) in wj.iter_mut().zip(row) {
                *acc += vi * x;
            }
        }
        for (i, &vi) in v.iter().enumerate() {
            let f = tau * vi;
            let row = &mut a.row_mut(k + 1 + i)[k + 1..];
            for (x, &acc) in row.iter_mut().zip(wj.iter()) {
                *x -= f * acc;
            }
        }
        a[(k + 1, k)] = beta * scale;
        for i in 1..len {
            a[(k + 1 + i, k)] = T::zero();
        }

        // Right: every row, columns k+1..
        for r in 0..n {
            let row = &mut a.row_mut(r)[k + 1..];
            let s: T = row.iter().zip(v).map(|(&x, &vi)| x * vi).sum();
            if s == T::zero() {
                continue;
            }
            let f = tau * s;
            for (x, &vi) in row.iter_mut().zip(v) {
                *x -= f * vi;
            }
        }
    }
}
