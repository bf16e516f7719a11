use std::fmt;

use super::threshold::{find_threshold, ThresholdResult, ThresholdSearch};
use crate::error::{Error, Result};
use crate::model::{classify_sites, PerturbationSpec, SiteClass, SpinChainConfig};
use crate::scalar::Scalar;

/// Location class for the field response, finer than [`SiteClass`] in
/// separating one-edge from both-edge pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldCategory {
    Hermitian,
    Adjacent,
    BothEdge,
    OneEdge,
    Bulk,
    SingleEdge,
    SingleBulk,
}

impl FieldCategory {
    pub fn name(&self) -> &'static str {
        match self {
            FieldCategory::Hermitian => "hermitian",
            FieldCategory::Adjacent => "adjacent",
            FieldCategory::BothEdge => "both_edge",
            FieldCategory::OneEdge => "one_edge",
            FieldCategory::Bulk => "bulk",
            FieldCategory::SingleEdge => "single_edge",
            FieldCategory::SingleBulk => "single_bulk",
        }
    }

    /// Whether the `h_z = 0` threshold lies on the small-field line. It does
    /// not where the threshold jumps at `h_z = 0⁺`.
    pub fn zero_field_on_line(&self) -> bool {
        matches!(
            self,
            FieldCategory::Adjacent | FieldCategory::BothEdge | FieldCategory::SingleEdge
        )
    }
}

impl fmt::Display for FieldCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn field_category<T: Scalar>(
    config: &SpinChainConfig<T>,
    pert: &PerturbationSpec<T>,
) -> Result<FieldCategory> {
    let class = classify_sites(config, pert)?;
    Ok(match class {
        SiteClass::Hermitian => FieldCategory::Hermitian,
        SiteClass::Adjacent => FieldCategory::Adjacent,
        SiteClass::BulkPair => FieldCategory::Bulk,
        SiteClass::SingleEdge => FieldCategory::SingleEdge,
        SiteClass::SingleBulk => FieldCategory::SingleBulk,
        SiteClass::EdgeInvolved => {
            let (p, q) = pert.sites().expect("two-site perturbation");
            if config.is_edge(p) && config.is_edge(q) {
                FieldCategory::BothEdge
            } else {
                FieldCategory::OneEdge
            }
        }
    })
}

/// Least-squares line `γ_PT(h_z) ≈ slope·h_z + intercept`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldResponseFit<T> {
    pub slope: T,
    pub intercept: T,
    /// Root-mean-square deviation of the fitted points from the line.
    pub residual: T,
    pub classification: SiteClass,
    pub category: FieldCategory,
    pub hz_samples: Vec<T>,
    /// One per sample, in sample order.
    pub thresholds: Vec<ThresholdResult<T>>,
    /// Threshold at exactly `h_z = 0`.
    pub zero_field: ThresholdResult<T>,
    /// Whether the `h_z = 0` point entered the fit.
    pub zero_field_in_fit: bool,
}

/// Thresholds at each `h_z` sample (and at `h_z = 0`), with a straight-line
/// fit. `search` gives the threshold settings for a given `h_z`.
///
/// The `h_z = 0` point is included only for categories whose threshold is
/// continuous there (see [`FieldCategory::zero_field_on_line`]).
pub fn fit_field_response<T, F>(
    config: &SpinChainConfig<T>,
    pert: &PerturbationSpec<T>,
    hz_samples: &[T],
    search: F,
) -> Result<FieldResponseFit<T>>
where
    T: Scalar,
    F: Fn(T) -> ThresholdSearch<T>,
{
    config.validate()?;
    let classification = classify_sites(config, pert)?;
    let category = field_category(config, pert)?;
    if hz_samples.is_empty() {
        return Err(Error::InvalidArgument("no h_z samples".into()));
    }
    if let Some(bad) = hz_samples
        .iter()
        .find(|h| **h <= T::zero() || !h.is_finite())
    {
        return Err(Error::InvalidArgument(format!(
            "h_z samples must be finite and > 0, got {bad}"
        )));
    }

    let run = |hz: T| -> Result<ThresholdResult<T>> {
        let c = config.with_field(hz);
        let wrap = |e| Error::FieldSample {
            hz: hz.to_f64_lossy(),
            source: Box::new(e),
        };
        let r = find_threshold(&c, pert, &search(hz)).map_err(wrap)?;
        if !r.gamma_pt.is_found() {
            return Err(wrap(Error::Unsupported(format!(
                "no threshold below gamma_max = {}",
                r.bracket.1
            ))));
        }
        Ok(r)
    };

    let zero_field = run(T::zero())?;
    let thresholds = hz_samples
        .iter()
        .map(|&h| run(h))
        .collect::<Result<Vec<_>>>()?;

    let zero_field_in_fit = category.zero_field_on_line();
    let mut points: Vec<(T, T)> = hz_samples
        .iter()
        .zip(&thresholds)
        .map(|(&h, r)| (h, r.gamma_pt.value().unwrap()))
        .collect();
    if zero_field_in_fit {
        points.insert(0, (T::zero(), zero_field.gamma_pt.value().unwrap()));
    }
    if points.len() < 2 {
        return Err(Error::InvalidArgument(
            "a line fit needs at least two points".into(),
        ));
    }
    let (slope, intercept, residual) = least_squares(&points)?;

    Ok(FieldResponseFit {
        slope,
        intercept,
        residual,
        classification,
        category,
        hz_samples: hz_samples.to_vec(),
        thresholds,
        zero_field,
        zero_field_in_fit,
    })
}

fn least_squares<T: Scalar>(points: &[(T, T)]) -> Result<(T, T, T)> {
    let n = T::from_usize_lossy(points.len());
    let mx = points.iter().map(|p| p.0).sum::<T>() / n;
    let my = points.iter().map(|p| p.1).sum::<T>() / n;
    let sxx: T = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: T = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= T::zero() || !sxx.is_finite() {
        return Err(Error::InvalidArgument(
            "h_z samples must not all coincide".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: T = points
        .iter()
        .map(|&(x, y)| {
            let d = y - (slope * x + intercept);
            d * d
        })
        .sum();
    Ok((slope, intercept, (ss / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_exact_line() {
        let pts = [(0.0f64, 1.0f64), (1.0, 3.0), (2.0, 5.0)];
        let (s, i, r) = least_squares(&pts).unwrap();
        assert!((s - 2.0).abs() < 1e-14);
        assert!((i - 1.0).abs() < 1e-14);
        assert!(r < 1e-14);
        assert!(least_squares(&[(1.0, 0.0), (1.0, 2.0)]).is_err());
    }

    #[test]
    fn categories() {
        let c = SpinChainConfig::open(7, 1.0, 0.0).unwrap();
        let cat = |p, q| field_category(&c, &PerturbationSpec::TwoSitePlus { p, q }).unwrap();
        assert_eq!(cat(3, 4), FieldCategory::Adjacent);
        assert_eq!(cat(1, 7), FieldCategory::BothEdge);
        assert_eq!(cat(1, 4), FieldCategory::OneEdge);
        assert_eq!(cat(3, 5), FieldCategory::Bulk);
        assert_eq!(cat(2, 2), FieldCategory::Hermitian);
        let single = field_category(&c, &PerturbationSpec::sigma_plus(4)).unwrap();
        assert_eq!(single, FieldCategory::SingleBulk);
        assert!(!single.zero_field_on_line());
    }

    #[test]
    fn rejects_bad_samples() {
        let c = SpinChainConfig::open(4, 1.0, 0.0).unwrap();
        let p = PerturbationSpec::TwoSitePlus { p: 1, q: 4 };
        let s = |_| ThresholdSearch::for_chain(&c);
        assert!(fit_field_response(&c, &p, &[], s).is_err());
        assert!(fit_field_response(&c, &p, &[0.0, 0.1], s).is_err());
    }
}
