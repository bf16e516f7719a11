use num_complex::Complex;
use rayon::prelude::*;

use super::{check_grid, check_snap, max_imag, max_imag_of, spectrum_at};
use crate::eig;
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, PerturbationSpec, SpinChainConfig};
use crate::scalar::Scalar;

/// Full spectra along a strength grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowTable<T> {
    pub gamma_grid: Vec<T>,
    /// One row per grid point, sorted by real part then imaginary part.
    pub rows: Vec<Vec<Complex<T>>>,
    pub solver_iterations: usize,
}

impl<T: Scalar> FlowTable<T> {
    /// Snapped maximum imaginary part of each row.
    pub fn max_imag_per_row(&self, snap_tol: T) -> Vec<T> {
        self.rows.iter().map(|r| max_imag_of(r, snap_tol)).collect()
    }

    /// Index of the first broken row.
    pub fn first_broken(&self, snap_tol: T) -> Option<usize> {
        self.rows
            .iter()
            .position(|r| max_imag_of(r, snap_tol) > T::zero())
    }

    /// Whether the lowest-real-part eigenvalue of every row is real (within
    /// `snap_tol` relative to the row's spectral radius).
    pub fn min_real_stays_real(&self, snap_tol: T) -> bool {
        self.rows.iter().all(|r| {
            let radius = r.iter().map(|z| z.norm()).fold(T::zero(), T::max);
            r.first().is_none_or(|z| z.im.abs() <= snap_tol * radius)
        })
    }

    /// Number of eigenvalues that stay put across the whole grid.
    ///
    /// Levels of the first row are grouped into clusters within `abs_tol`.
    /// A cluster of multiplicity `m` contributes `min(m, c)` where `c` is
    /// the smallest count of eigenvalues within `abs_tol` of it over all
    /// rows.
    pub fn flat_count(&self, abs_tol: T) -> usize {
        let Some(first) = self.rows.first() else {
            return 0;
        };
        let mut clusters: Vec<(Complex<T>, usize)> = Vec::new();
        for &z in first {
            match clusters
                .iter_mut()
                .find(|(c, _)| (*c - z).norm() <= abs_tol)
            {
                Some((_, m)) => *m += 1,
                None => clusters.push((z, 1)),
            }
        }
        clusters
            .iter()
            .map(|&(c, m)| {
                self.rows
                    .iter()
                    .map(|r| r.iter().filter(|z| (**z - c).norm() <= abs_tol).count())
                    .fold(m, usize::min)
            })
            .sum()
    }
}

/// Spectra of `H(γ)` for every `γ` in the grid, computed in parallel.
pub fn flow_sweep<T: Scalar>(
    config: &SpinChainConfig<T>,
    pert: &PerturbationSpec<T>,
    gamma_grid: &[T],
) -> Result<FlowTable<T>> {
    config.validate()?;
    pert.validate(config)?;
    check_grid("gamma", gamma_grid)?;
    if gamma_grid[0] < T::zero() {
        return Err(Error::InvalidArgument(
            "gamma grid must be non-negative".into(),
        ));
    }
    let results: Vec<Result<(Vec<Complex<T>>, usize)>> = gamma_grid
        .par_iter()
        .map(|&g| spectrum_at(config, pert, g).map(|s| (s.sorted(), s.iterations)))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut solver_iterations = 0;
    for r in results {
        let (row, it) = r?;
        rows.push(row);
        solver_iterations += it;
    }
    Ok(FlowTable {
        gamma_grid: gamma_grid.to_vec(),
        rows,
        solver_iterations,
    })
}

/// Snapped `max Im λ` over a rectangular grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseGrid<T> {
    pub x_axis: Vec<T>,
    pub y_axis: Vec<T>,
    /// `max_im[i][j]` at `(x_axis[j], y_axis[i])`.
    pub max_im: Vec<Vec<T>>,
    pub solver_iterations: usize,
}

impl<T: Scalar> PhaseGrid<T> {
    pub fn get(&self, row: usize, col: usize) -> T {
        self.max_im[row][col]
    }

    pub fn is_broken(&self, row: usize, col: usize) -> bool {
        self.max_im[row][col] > T::zero()
    }
}

fn grid_map<T, F>(x_axis: &[T], y_axis: &[T], cell: F) -> Result<PhaseGrid<T>>
where
    T: Scalar,
    F: Fn(T, T) -> Result<(T, usize)> + Sync,
{
    let nx = x_axis.len();
    let cells: Vec<Result<(T, usize)>> = (0..nx * y_axis.len())
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / nx, idx % nx);
            let (x, y) = (x_axis[j], y_axis[i]);
            cell(x, y).map_err(|e| Error::GridCell {
                row: i,
                col: j,
                x: x.to_f64_lossy(),
                y: y.to_f64_lossy(),
                source: Box::new(e),
            })
        })
        .collect();
    let mut max_im = vec![Vec::with_capacity(nx); y_axis.len()];
    let mut solver_iterations = 0;
    for (idx, c) in cells.into_iter().enumerate() {
        let (v, it) = c?;
        max_im[idx / nx].push(v);
        solver_iterations += it;
    }
    Ok(PhaseGrid {
        x_axis: x_axis.to_vec(),
        y_axis: y_axis.to_vec(),
        max_im,
        solver_iterations,
    })
}

/// `max Im λ` of `γ₊σ⁺_p + γ₋σ⁻_p` with `γ₊` along columns and `γ₋` along
/// rows.
pub fn phase_grid_single_site<T: Scalar>(
    config: &SpinChainConfig<T>,
    p: usize,
    gamma_plus_grid: &[T],
    gamma_minus_grid: &[T],
    snap_tol: T,
) -> Result<PhaseGrid<T>> {
    config.validate()?;
    config.check_site(p)?;
    check_snap(snap_tol)?;
    check_grid("gamma_plus", gamma_plus_grid)?;
    check_grid("gamma_minus", gamma_minus_grid)?;
    grid_map(gamma_plus_grid, gamma_minus_grid, |gp, gm| {
        let pert = PerturbationSpec::SingleSite {
            p,
            gamma_plus: gp,
            gamma_minus: gm,
        };
        let h = build_hamiltonian(config, &pert, T::one())?;
        let s = eig::eigenvalues(&h)?;
        Ok((max_imag(&s, snap_tol), s.iterations))
    })
}

/// `max Im λ` over strength (columns) and transverse field (rows).
pub fn phase_grid_gamma_hz<T: Scalar>(
    config: &SpinChainConfig<T>,
    pert: &PerturbationSpec<T>,
    gamma_grid: &[T],
    hz_grid: &[T],
    snap_tol: T,
) -> Result<PhaseGrid<T>> {
    config.validate()?;
    pert.validate(config)?;
    check_snap(snap_tol)?;
    check_grid("gamma", gamma_grid)?;
    check_grid("hz", hz_grid)?;
    grid_map(gamma_grid, hz_grid, |g, hz| {
        let c = config.with_field(hz);
        let s = spectrum_at(&c, pert, g)?;
        Ok((max_imag(&s, snap_tol), s.iterations))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt::DEFAULT_SNAP_TOL;

    #[test]
    fn flow_rows_are_sorted_and_deterministic() {
        let c = SpinChainConfig::open(4, 1.0, 0.2).unwrap();
        let pert = PerturbationSpec::TwoSitePlus { p: 1, q: 4 };
        let grid = [0.0, 0.1, 0.2, 0.4];
        let a = flow_sweep(&c, &pert, &grid).unwrap();
        let b = flow_sweep(&c, &pert, &grid).unwrap();
        assert_eq!(a, b);
        for row in &a.rows {
            assert_eq!(row.len(), 16);
            assert!(row.windows(2).all(|w| w[0].re <= w[1].re));
        }
        assert_eq!(
            a.first_broken(DEFAULT_SNAP_TOL),
            a.first_broken(DEFAULT_SNAP_TOL)
        );
    }

    #[test]
    fn flow_rejects_bad_grid() {
        let c = SpinChainConfig::open(3, 1.0, 0.0).unwrap();
        let p = PerturbationSpec::sigma_plus(1);
        assert!(flow_sweep(&c, &p, &[]).is_err());
        assert!(flow_sweep(&c, &p, &[0.2, 0.1]).is_err());
        assert!(flow_sweep(&c, &p, &[-0.1, 0.1]).is_err());
    }

    #[test]
    fn flat_count_on_synthetic_table() {
        let z = |re: f64, im: f64| Complex::new(re, im);
        let t = FlowTable {
            gamma_grid: vec![0.0, 1.0],
            rows: vec![
                vec![z(-1.0, 0.0), z(0.0, 0.0), z(0.0, 0.0), z(1.0, 0.0)],
                vec![z(-2.0, 0.0), z(0.0, 0.0), z(0.0, 0.0), z(2.0, 0.0)],
            ],
            solver_iterations: 0,
        };
        assert_eq!(t.flat_count(1e-9), 2);
    }

    #[test]
    fn phase_grid_layout() {
        let c = SpinChainConfig::open(3, 1.0, 0.0).unwrap();
        let gp = [0.0, 0.5, 1.0];
        let gm = [0.0, 0.25];
        let g = phase_grid_single_site(&c, 2, &gp, &gm, DEFAULT_SNAP_TOL).unwrap();
        assert_eq!(g.max_im.len(), 2);
        assert!(g.max_im.iter().all(|r| r.len() == 3));
        assert_eq!(g.get(0, 0), 0.0);
        assert!(g.max_im.iter().flatten().all(|&v| v >= 0.0));
        assert!(phase_grid_single_site(&c, 4, &gp, &gm, DEFAULT_SNAP_TOL).is_err());
    }
}
