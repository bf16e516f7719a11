//! Diagonal similarity balancing.

use crate::error::Result;
use crate::matrix::RealMatrix;
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 100;

/// Diagonal `D` with `balanced = D⁻¹ · original · D`.
#[derive(Clone, Debug, PartialEq)]
pub struct Scaling<T> {
    pub factors: Vec<T>,
    pub sweeps: usize,
}

impl<T: Scalar> Scaling<T> {
    pub fn is_trivial(&self) -> bool {
        self.factors.iter().all(|&f| f == T::one())
    }

    /// Undo the similarity: returns `D · m · D⁻¹`.
    pub fn unbalance(&self, m: &RealMatrix<T>) -> RealMatrix<T> {
        let n = m.dim();
        let mut out = m.clone();
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = m[(i, j)] * self.factors[i] / self.factors[j];
            }
        }
        out
    }
}

/// Scale rows and columns so each index has matching off-diagonal row and
/// column 1-norms.
///
/// Each update multiplies column `i` by `f = sqrt(r/c)` and divides row `i`
/// by `f`, making both norms equal to `sqrt(r·c)`. Indices with a zero row
/// or column norm are left alone; sweeps stop once no index would shrink
/// its combined norm by more than 5%.
pub fn balance<T: Scalar>(m: &RealMatrix<T>) -> Result<(RealMatrix<T>, Scaling<T>)> {
    m.check_finite()?;
    let n = m.dim();
    let mut a = m.clone();
    let mut factors = vec![T::one(); n];
    let threshold = T::lit(0.95);
    let mut sweeps = 0;
    loop {
        let mut changed = false;
        for i in 0..n {
            let mut c = T::zero();
            let mut r = T::zero();
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let f = (r / c).sqrt();
            if !f.is_normal() {
                continue;
            }
            if c * f + r / f < threshold * (c + r) {
                changed = true;
                factors[i] *= f;
                let inv = T::one() / f;
                for x in a.row_mut(i) {
                    *x *= inv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        sweeps += 1;
        if !changed || sweeps >= MAX_SWEEPS {
            break;
        }
    }
    Ok((a, Scaling { factors, sweeps }))
}
