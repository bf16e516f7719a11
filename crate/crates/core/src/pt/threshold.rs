use rayon::prelude::*;

use super::{check_snap, max_imag, spectrum_at, Threshold, DEFAULT_SCAN_POINTS, DEFAULT_SNAP_TOL};
use crate::error::{Error, Result};
use crate::model::{classify_sites, PerturbationSpec, SiteClass, SpinChainConfig};
use crate::scalar::Scalar;

/// Parameters of [`find_threshold`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdSearch<T> {
    /// Largest strength examined.
    pub gamma_max: T,
    /// Final bracket width.
    pub tol: T,
    /// Relative snap tolerance, see [`super::max_imag`].
    pub snap_tol: T,
    /// Coarse scan points on `(0, gamma_max]`.
    pub scan_points: usize,
    /// Keep scanning past the first broken point and flag a return to an
    /// unbroken spectrum.
    pub detect_reentrance: bool,
}

impl<T: Scalar> ThresholdSearch<T> {
    /// Defaults scaled to the chain: `gamma_max = 2E`, `tol = 1e-3·E`, with
    /// `E = J`, falling back to `|h_z|` and then 1.
    pub fn for_chain(config: &SpinChainConfig<T>) -> Self {
        let energy = if config.coupling_j > T::zero() {
            config.coupling_j
        } else if config.field_hz != T::zero() {
            config.field_hz.abs()
        } else {
            T::one()
        };
        Self {
            gamma_max: T::lit(2.0) * energy,
            tol: T::lit(1e-3) * energy,
            snap_tol: T::lit(DEFAULT_SNAP_TOL),
            scan_points: DEFAULT_SCAN_POINTS,
            detect_reentrance: false,
        }
    }

    pub fn with_gamma_max(self, gamma_max: T) -> Self {
        Self { gamma_max, ..self }
    }

    pub fn with_tol(self, tol: T) -> Self {
        Self { tol, ..self }
    }

    pub fn with_snap_tol(self, snap_tol: T) -> Self {
        Self { snap_tol, ..self }
    }

    pub fn with_scan_points(self, scan_points: usize) -> Self {
        Self {
            scan_points,
            ..self
        }
    }

    pub fn with_reentrance(self, detect_reentrance: bool) -> Self {
        Self {
            detect_reentrance,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma_max <= T::zero() || !self.gamma_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "gamma_max must be finite and > 0, got {}",
                self.gamma_max
            )));
        }
        if self.tol <= T::zero() || !self.tol.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "tol must be finite and > 0, got {}",
                self.tol
            )));
        }
        if self.scan_points == 0 {
            return Err(Error::InvalidArgument("scan_points must be >= 1".into()));
        }
        check_snap(self.snap_tol)
    }
}

/// Result of [`find_threshold`].
#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdResult<T> {
    pub gamma_pt: Threshold<T>,
    /// Final unbroken/broken bracket. For [`Threshold::NoThreshold`] this is
    /// `(0, gamma_max)`, the range found unbroken.
    pub bracket: (T, T),
    /// `None` for the unperturbed chain.
    pub classification: Option<SiteClass>,
    /// Number of spectra computed.
    pub evaluations: usize,
    /// QR iterations summed over all spectra.
    pub solver_iterations: usize,
    /// An unbroken scan point was seen beyond the first breaking.
    pub reentrant: bool,
}

struct Probe<'a, T> {
    config: &'a SpinChainConfig<T>,
    pert: &'a PerturbationSpec<T>,
    snap_tol: T,
    evaluations: usize,
    iterations: usize,
}

impl<T: Scalar> Probe<'_, T> {
    fn broken(&mut self, gamma: T) -> Result<bool> {
        let s = spectrum_at(self.config, self.pert, gamma)?;
        self.evaluations += 1;
        self.iterations += s.iterations;
        Ok(max_imag(&s, self.snap_tol) > T::zero())
    }

    /// Evaluates a batch in parallel; results stay in input order.
    fn broken_batch(&mut self, gammas: &[T]) -> Result<Vec<bool>> {
        let (config, pert, snap) = (self.config, self.pert, self.snap_tol);
        let results: Vec<Result<(bool, usize)>> = gammas
            .par_iter()
            .map(|&g| {
                let s = spectrum_at(config, pert, g)?;
                Ok((max_imag(&s, snap) > T::zero(), s.iterations))
            })
            .collect();
        let mut out = Vec::with_capacity(gammas.len());
        for r in results {
            let (b, it) = r?;
            self.evaluations += 1;
            self.iterations += it;
            out.push(b);
        }
        Ok(out)
    }
}

/// Smallest strength at which the spectrum along `pert` stops being real.
///
/// If `gamma_max` is unbroken the answer is [`Threshold::NoThreshold`].
/// Otherwise `(0, gamma_max]` is scanned upward on `scan_points` equal
/// steps until the first broken point, and the bracketing step is bisected
/// down to `tol`. A threshold below the first scan step is still found,
/// since `γ = 0` is always unbroken. Breaking windows narrower than one
/// scan step can be missed.
pub fn find_threshold<T: Scalar>(
    config: &SpinChainConfig<T>,
    pert: &PerturbationSpec<T>,
    search: &ThresholdSearch<T>,
) -> Result<ThresholdResult<T>> {
    search.validate()?;
    config.validate()?;
    pert.validate(config)?;
    let classification = match pert {
        PerturbationSpec::None => None,
        _ => Some(classify_sites(config, pert)?),
    };
    let mut probe = Probe {
        config,
        pert,
        snap_tol: search.snap_tol,
        evaluations: 0,
        iterations: 0,
    };
    let gmax = search.gamma_max;

    if !probe.broken(gmax)? {
        return Ok(ThresholdResult {
            gamma_pt: Threshold::NoThreshold,
            bracket: (T::zero(), gmax),
            classification,
            evaluations: probe.evaluations,
            solver_iterations: probe.iterations,
            reentrant: false,
        });
    }

    let n = search.scan_points;
    let step = gmax / T::from_usize_lossy(n);
    let at = |k: usize| {
        if k == n {
            gmax
        } else {
            step * T::from_usize_lossy(k)
        }
    };
    let batch = rayon::current_num_threads().max(1);

    // Scan points 1..n-1; point n is gamma_max, already known broken.
    let mut first = n;
    let mut k = 1;
    'scan: while k < n {
        let end = (k + batch).min(n);
        let gammas: Vec<T> = (k..end).map(at).collect();
        let flags = probe.broken_batch(&gammas)?;
        for (offset, b) in flags.into_iter().enumerate() {
            if b {
                first = k + offset;
                break 'scan;
            }
        }
        k = end;
    }

    let mut reentrant = false;
    if search.detect_reentrance {
        let mut k = first + 1;
        'tail: while k < n {
            let end = (k + batch).min(n);
            let gammas: Vec<T> = (k..end).map(at).collect();
            if probe.broken_batch(&gammas)?.into_iter().any(|b| !b) {
                reentrant = true;
                break 'tail;
            }
            k = end;
        }
    }

    let mut lo = at(first - 1);
    let mut hi = at(first);
    let half = T::lit(0.5);
    while hi - lo > search.tol {
        let mid = half * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let broken = probe.broken(mid).map_err(|e| Error::Bisection {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
            source: Box::new(e),
        })?;
        if broken {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    Ok(ThresholdResult {
        gamma_pt: Threshold::Found(half * (lo + hi)),
        bracket: (lo, hi),
        classification,
        evaluations: probe.evaluations,
        solver_iterations: probe.iterations,
        reentrant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn search(c: &SpinChainConfig<f64>) -> ThresholdSearch<f64> {
        ThresholdSearch::for_chain(c)
    }

    #[test]
    fn defaults_follow_coupling() {
        let c = SpinChainConfig::open(4, 2.0, 0.0).unwrap();
        let s = search(&c);
        assert_eq!(s.gamma_max, 4.0);
        assert!((s.tol - 2e-3).abs() < 1e-15);
        let free = SpinChainConfig::open(4, 0.0, 0.5).unwrap();
        assert_eq!(search(&free).gamma_max, 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let c = SpinChainConfig::open(4, 1.0, 0.0).unwrap();
        let p = PerturbationSpec::sigma_plus(1);
        for bad in [
            search(&c).with_tol(0.0),
            search(&c).with_gamma_max(-1.0),
            search(&c).with_scan_points(0),
            search(&c).with_snap_tol(f64::NAN),
        ] {
            assert!(find_threshold(&c, &p, &bad).is_err());
        }
    }

    #[test]
    fn edge_sigma_plus_quarter() {
        let c = SpinChainConfig::open(5, 1.0, 0.0).unwrap();
        let r = find_threshold(&c, &PerturbationSpec::sigma_plus(1), &search(&c)).unwrap();
        let g = r.gamma_pt.value().unwrap();
        assert!((g - 0.25).abs() <= 1e-3, "{g}");
        assert!(r.bracket.1 - r.bracket.0 <= 1e-3);
        assert_eq!(r.classification, Some(SiteClass::SingleEdge));
        assert!(r.evaluations > 0 && r.solver_iterations > 0);
    }

    #[test]
    fn adjacent_is_zero() {
        let c = SpinChainConfig::open(4, 1.0, 0.0).unwrap();
        let s = search(&c);
        let r = find_threshold(&c, &PerturbationSpec::TwoSitePlus { p: 2, q: 3 }, &s).unwrap();
        assert!(r.gamma_pt.value().unwrap() <= s.tol);
    }

    #[test]
    fn hermitian_has_no_threshold() {
        let c = SpinChainConfig::open(4, 1.0, 0.0).unwrap();
        let r = find_threshold(
            &c,
            &PerturbationSpec::TwoSitePlus { p: 2, q: 2 },
            &search(&c),
        )
        .unwrap();
        assert_eq!(r.gamma_pt, Threshold::NoThreshold);
        assert_eq!(r.classification, Some(SiteClass::Hermitian));
        assert_eq!(r.evaluations, 1);
        let r = find_threshold(&c, &PerturbationSpec::None, &search(&c)).unwrap();
        assert_eq!(r.gamma_pt, Threshold::NoThreshold);
        assert_eq!(r.classification, None);
    }
}
