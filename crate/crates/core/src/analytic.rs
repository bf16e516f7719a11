//! Closed-form `h_z = 0` reduction.
//!
//! With no transverse field every `σˣ_m` away from the perturbed sites is
//! conserved, so the chain splits into sectors labelled by the `σˣ`
//! projections (`±1`) of the perturbed sites' neighbours. A single perturbed
//! site then sees the 2x2 problem
//!
//! `H_p = h_x σˣ + b·iσʸ`, with `h_x = −(J/4)·Σ neighbours + c·γ`, `b = d·γ`,
//!
//! where `(c, d)` are the `σˣ` and `iσʸ` weights of the local term per unit
//! `γ` (`σ⁺ = (σˣ + iσʸ)/2` gives `c = d = 1/2`). Its eigenvalues
//! `±sqrt(h_x² − b²)` turn complex once `|h_x| < |b|`; the chain's threshold
//! is the smallest such `γ` over all sectors. Two adjacent perturbed sites
//! couple through their shared bond and need the 4x4 block instead.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::model::{PerturbationSpec, SpinChainConfig};
use crate::poly;
use crate::pt::Threshold;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReducedKind {
    TwoByTwo,
    FourByFour,
}

/// Effective single-site problem `h_x σˣ + (γ/2) iσʸ` for a `γσ⁺` term.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedProblem<T> {
    pub h_x: T,
    pub gamma: T,
    pub kind: ReducedKind,
    /// `σˣ` projections of the sites bonded to the perturbed site.
    pub neighbor_pattern: Vec<i8>,
}

impl<T: Scalar> ReducedProblem<T> {
    /// Sector of a `γσ⁺_p` perturbation: one neighbour at a chain end,
    /// two in the bulk.
    pub fn sigma_plus_site(coupling_j: T, gamma: T, neighbor_pattern: &[i8]) -> Result<Self> {
        if !(1..=2).contains(&neighbor_pattern.len()) {
            return Err(Error::InvalidArgument(format!(
                "a site has one or two neighbours, got a pattern of length {}",
                neighbor_pattern.len()
            )));
        }
        if neighbor_pattern.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument(
                "neighbour projections must be +1 or -1".into(),
            ));
        }
        Ok(Self {
            h_x: effective_field(coupling_j, gamma, neighbor_pattern),
            gamma,
            kind: ReducedKind::TwoByTwo,
            neighbor_pattern: neighbor_pattern.to_vec(),
        })
    }

    /// `h_x σˣ + (γ/2) iσʸ` in the `σᶻ` basis.
    pub fn matrix(&self) -> RealMatrix<T> {
        let half = self.gamma / T::lit(2.0);
        RealMatrix::from_row_major(
            2,
            vec![T::zero(), self.h_x + half, self.h_x - half, T::zero()],
        )
        .expect("2x2 buffer")
    }
}

/// `h_x = −(J/4)·Σ pattern + γ/2`.
pub fn effective_field<T: Scalar>(coupling_j: T, gamma: T, neighbor_pattern: &[i8]) -> T {
    let sum: i32 = neighbor_pattern.iter().map(|&s| s as i32).sum();
    -coupling_j / T::lit(4.0) * T::from_i32(sum).unwrap() + gamma / T::lit(2.0)
}

/// `±sqrt(h_x² − γ²/4)`: real pair when `|h_x| ≥ γ/2`, otherwise an
/// imaginary conjugate pair. The first entry has the non-negative real or
/// imaginary part.
pub fn reduced_eigenvalues<T: Scalar>(r: &ReducedProblem<T>) -> Result<[Complex<T>; 2]> {
    if r.kind != ReducedKind::TwoByTwo {
        return Err(Error::Unsupported(
            "closed-form eigenvalues exist only for the 2x2 reduction".into(),
        ));
    }
    let half = r.gamma / T::lit(2.0);
    let disc = r.h_x * r.h_x - half * half;
    let root = if disc >= T::zero() {
        Complex::new(disc.sqrt(), T::zero())
    } else {
        Complex::new(T::zero(), (-disc).sqrt())
    };
    Ok([root, -root])
}

/// Local non-Hermitian term on one site, per unit `γ`, as
/// `sigma_x · σˣ + i_sigma_y · iσʸ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SiteResponse<T> {
    pub sigma_x: T,
    pub i_sigma_y: T,
}

impl<T: Scalar> SiteResponse<T> {
    pub fn plus() -> Self {
        let h = T::lit(0.5);
        Self {
            sigma_x: h,
            i_sigma_y: h,
        }
    }

    pub fn minus() -> Self {
        let h = T::lit(0.5);
        Self {
            sigma_x: h,
            i_sigma_y: -h,
        }
    }

    pub fn from_strengths(gamma_plus: T, gamma_minus: T) -> Self {
        let h = T::lit(0.5);
        Self {
            sigma_x: h * (gamma_plus + gamma_minus),
            i_sigma_y: h * (gamma_plus - gamma_minus),
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            sigma_x: self.sigma_x + o.sigma_x,
            i_sigma_y: self.i_sigma_y + o.i_sigma_y,
        }
    }

    fn neg(self) -> Self {
        Self {
            sigma_x: -self.sigma_x,
            i_sigma_y: -self.i_sigma_y,
        }
    }

    /// Sits at an exceptional point whenever the interaction field vanishes.
    fn is_exceptional(&self) -> bool {
        self.sigma_x.abs() == self.i_sigma_y.abs() && self.sigma_x != T::zero()
    }
}

/// Smallest `γ > 0` at which `|γ·c − s| < γ·|d|` with `s = J·Σ/4`, i.e. the
/// sector's 2x2 block first has complex eigenvalues. `None` if it never does.
///
/// `f(γ) = |γc − s| − γ|d|` is convex and piecewise linear with `f(0) = |s|`,
/// so the broken set is an interval; its left end is found by testing the
/// pieces between the kink and the roots.
pub fn sector_breaking_strength<T: Scalar>(
    coupling_j: T,
    neighbor_sum: i32,
    resp: SiteResponse<T>,
) -> Option<T> {
    let c = resp.sigma_x;
    let d = resp.i_sigma_y.abs();
    let s = coupling_j / T::lit(4.0) * T::from_i32(neighbor_sum).unwrap();
    let f = |g: T| (g * c - s).abs() - g * d;
    if s == T::zero() {
        return (c.abs() < d).then(T::zero);
    }
    let mut knots = vec![T::zero()];
    for denom in [c - d, c + d] {
        if denom != T::zero() {
            let g = s / denom;
            if g > T::zero() && g.is_finite() {
                knots.push(g);
            }
        }
    }
    if c != T::zero() {
        let g = s / c;
        if g > T::zero() {
            knots.push(g);
        }
    }
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup();
    let last = *knots.last().unwrap();
    knots.push(last * T::lit(2.0) + T::one());
    for w in knots.windows(2) {
        let mid = (w[0] + w[1]) / T::lit(2.0);
        if f(mid) < T::zero() {
            return Some(w[0]);
        }
    }
    None
}

/// All `±1` assignments to `k` neighbours.
fn patterns(k: usize) -> impl Iterator<Item = Vec<i8>> {
    (0..1u32 << k).map(move |bits| {
        (0..k)
            .map(|i| if bits >> i & 1 == 0 { 1 } else { -1 })
            .collect()
    })
}

/// Threshold of a single perturbed site: minimum over neighbour sectors.
pub fn site_threshold<T: Scalar>(
    config: &SpinChainConfig<T>,
    site: usize,
    resp: SiteResponse<T>,
) -> Option<T> {
    let k = config.neighbors(site).len();
    patterns(k)
        .filter_map(|pat| {
            let sum = pat.iter().map(|&s| s as i32).sum();
            sector_breaking_strength(config.coupling_j, sum, resp)
        })
        .fold(None, |acc: Option<T>, g| Some(acc.map_or(g, |a| a.min(g))))
}

/// Per-site local terms of a perturbation; coincident sites are merged.
pub fn site_responses<T: Scalar>(pert: &PerturbationSpec<T>) -> Vec<(usize, SiteResponse<T>)> {
    let (p, rp, q, rq) = match *pert {
        PerturbationSpec::None => return Vec::new(),
        PerturbationSpec::SingleSite {
            p,
            gamma_plus,
            gamma_minus,
        } => return vec![(p, SiteResponse::from_strengths(gamma_plus, gamma_minus))],
        PerturbationSpec::TwoSitePlus { p, q } => {
            (p, SiteResponse::plus(), q, SiteResponse::minus())
        }
        PerturbationSpec::TwoSiteMinus { p, q } => {
            (p, SiteResponse::plus(), q, SiteResponse::minus().neg())
        }
        PerturbationSpec::TwoSiteDoublePlus { p, q } => {
            (p, SiteResponse::plus(), q, SiteResponse::plus())
        }
    };
    if p == q {
        vec![(p, rp.add(rq))]
    } else {
        vec![(p, rp), (q, rq)]
    }
}

/// Closed-form zero-field threshold.
///
/// Adjacent two-site perturbations break immediately (see
/// [`adjacent_block_spectrum`]); every other case is the minimum over the
/// perturbed sites of [`site_threshold`]. For `γσ⁺` this reproduces
/// `J/4` at a chain end and `J/2` in the bulk.
pub fn analytic_threshold_h0<T: Scalar>(
    config: &SpinChainConfig<T>,
    pert: &PerturbationSpec<T>,
) -> Result<Threshold<T>> {
    config.validate()?;
    pert.validate(config)?;
    if config.field_hz != T::zero() {
        return Err(Error::Unsupported(format!(
            "the analytic reduction needs h_z = 0, got h_z = {}",
            config.field_hz
        )));
    }
    if let Some((p, q)) = pert.sites() {
        if p != q && config.are_neighbors(p, q) {
            return Ok(Threshold::Found(T::zero()));
        }
    }
    let best = site_responses(pert)
        .into_iter()
        .filter_map(|(site, resp)| site_threshold(config, site, resp))
        .fold(None, |acc: Option<T>, g| Some(acc.map_or(g, |a| a.min(g))));
    Ok(match best {
        Some(g) => Threshold::Found(g),
        None => Threshold::NoThreshold,
    })
}

/// Number of eigenvalues pinned at an exceptional point for all `γ`
/// (γ-independent "flat" levels) under a single-site perturbation at
/// `h_z = 0`: two per product state whose neighbours of the perturbed site
/// cancel the interaction field.
pub fn flat_band_count<T: Scalar>(
    config: &SpinChainConfig<T>,
    pert: &PerturbationSpec<T>,
) -> Result<usize> {
    config.validate()?;
    pert.validate(config)?;
    if config.field_hz != T::zero() {
        return Err(Error::Unsupported(
            "flat bands are an h_z = 0 property".into(),
        ));
    }
    let responses = site_responses(pert);
    let [(site, resp)] = responses.as_slice() else {
        return Err(Error::Unsupported(
            "flat-band counting needs a single perturbed site".into(),
        ));
    };
    if !resp.is_exceptional() {
        return Ok(0);
    }
    let k = config.neighbors(*site).len();
    let cancelling = patterns(k)
        .filter(|pat| pat.iter().map(|&s| s as i32).sum::<i32>() == 0)
        .count();
    let spectators = config.n_sites - 1 - k;
    Ok(2 * cancelling * (1usize << spectators))
}

/// Outer-neighbour sector of the two-site block (`None` = chain end).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockPattern {
    pub left: Option<i8>,
    pub right: Option<i8>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatternSpectrum<T> {
    pub pattern: BlockPattern,
    pub eigenvalues: [Complex<T>; 4],
}

/// `−(J/4)σˣ⊗σˣ − (J/4)(s_l σˣ⊗1 + s_r 1⊗σˣ) + γ(σ⁺⊗1 + 1⊗σ⁻)`, first
/// factor the left site, in the `σᶻ` basis.
pub fn adjacent_block_matrix<T: Scalar>(
    coupling_j: T,
    gamma: T,
    pattern: BlockPattern,
) -> RealMatrix<T> {
    let mut m = RealMatrix::zeros(4);
    let quarter = coupling_j / T::lit(4.0);
    // index = 2·left_bit + right_bit, bit 0 = spin up
    for b in 0..4usize {
        m[(b, b ^ 0b11)] -= quarter;
        if let Some(s) = pattern.left {
            m[(b, b ^ 0b10)] -= quarter * T::from_i8(s).unwrap();
        }
        if let Some(s) = pattern.right {
            m[(b, b ^ 0b01)] -= quarter * T::from_i8(s).unwrap();
        }
        if b & 0b10 == 0 {
            m[(b, b | 0b10)] += gamma;
        }
        if b & 0b01 != 0 {
            m[(b, b & !0b01)] += gamma;
        }
    }
    m
}

/// Sector-resolved spectra of the adjacent-pair block, computed from the
/// characteristic quartic. Covers both bulk (two outer neighbours) and chain
/// ends (a missing neighbour).
pub fn adjacent_block_spectrum<T: Scalar>(coupling_j: T, gamma: T) -> Vec<PatternSpectrum<T>> {
    let sides = [None, Some(1i8), Some(-1i8)];
    let mut out = Vec::with_capacity(9);
    for &left in &sides {
        for &right in &sides {
            let pattern = BlockPattern { left, right };
            let m = adjacent_block_matrix(coupling_j, gamma, pattern);
            let r = poly::roots(&poly::charpoly(&m));
            let mut eigenvalues = [Complex::new(T::zero(), T::zero()); 4];
            eigenvalues.copy_from_slice(&r[..4]);
            out.push(PatternSpectrum {
                pattern,
                eigenvalues,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Boundary;

    fn chain(n: usize, boundary: Boundary) -> SpinChainConfig<f64> {
        SpinChainConfig::new(n, 1.0, 0.0, boundary).unwrap()
    }

    fn found(t: Threshold<f64>) -> f64 {
        match t {
            Threshold::Found(g) => g,
            Threshold::NoThreshold => panic!("expected a threshold"),
        }
    }

    #[test]
    fn exceptional_point_when_field_matches() {
        let r = ReducedProblem {
            h_x: 0.3,
            gamma: 0.6,
            kind: ReducedKind::TwoByTwo,
            neighbor_pattern: vec![1],
        };
        let [a, b] = reduced_eigenvalues(&r).unwrap();
        assert_eq!(a, Complex::new(0.0, 0.0));
        assert!(b.norm() == 0.0);
    }

    #[test]
    fn zero_field_gives_imaginary_pair() {
        let r = ReducedProblem {
            h_x: 0.0,
            gamma: 0.8,
            kind: ReducedKind::TwoByTwo,
            neighbor_pattern: vec![1, -1],
        };
        let [a, b] = reduced_eigenvalues(&r).unwrap();
        assert!((a - Complex::new(0.0, 0.4)).norm() < 1e-15);
        assert!((b - Complex::new(0.0, -0.4)).norm() < 1e-15);
    }

    #[test]
    fn anti_aligned_neighbours_pin_the_ep() {
        for &g in &[0.01, 0.3, 1.0, 5.0] {
            let r = ReducedProblem::sigma_plus_site(1.0, g, &[1, -1]).unwrap();
            assert_eq!(r.h_x, g / 2.0);
            let [a, b] = reduced_eigenvalues(&r).unwrap();
            assert_eq!(a.norm(), 0.0);
            assert_eq!(b.norm(), 0.0);
        }
    }

    #[test]
    fn bad_patterns_rejected() {
        assert!(ReducedProblem::sigma_plus_site(1.0, 0.1, &[]).is_err());
        assert!(ReducedProblem::sigma_plus_site(1.0, 0.1, &[1, 1, 1]).is_err());
        assert!(ReducedProblem::sigma_plus_site(1.0, 0.1, &[2]).is_err());
        let four = ReducedProblem {
            h_x: 0.0,
            gamma: 0.1,
            kind: ReducedKind::FourByFour,
            neighbor_pattern: vec![1, 1],
        };
        assert!(reduced_eigenvalues(&four).is_err());
    }

    #[test]
    fn single_site_table() {
        let c = chain(9, Boundary::Open);
        assert!(
            (found(analytic_threshold_h0(&c, &PerturbationSpec::sigma_plus(1)).unwrap()) - 0.25)
                .abs()
                < 1e-15
        );
        assert!(
            (found(analytic_threshold_h0(&c, &PerturbationSpec::sigma_plus(5)).unwrap()) - 0.5)
                .abs()
                < 1e-15
        );
        // σ⁻ instead of σ⁺
        let minus = PerturbationSpec::SingleSite {
            p: 9,
            gamma_plus: 0.0,
            gamma_minus: 1.0,
        };
        assert!((found(analytic_threshold_h0(&c, &minus).unwrap()) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ring_two_site_table() {
        let ring = chain(9, Boundary::Periodic);
        let tp = |p, q| PerturbationSpec::TwoSitePlus { p, q };
        assert_eq!(found(analytic_threshold_h0(&ring, &tp(2, 3)).unwrap()), 0.0);
        assert_eq!(found(analytic_threshold_h0(&ring, &tp(9, 1)).unwrap()), 0.0);
        assert!((found(analytic_threshold_h0(&ring, &tp(2, 7)).unwrap()) - 0.5).abs() < 1e-15);
        assert_eq!(
            analytic_threshold_h0(&ring, &tp(4, 4)).unwrap(),
            Threshold::NoThreshold
        );
    }

    #[test]
    fn open_two_site_table() {
        let c = chain(7, Boundary::Open);
        let tp = |p, q| PerturbationSpec::TwoSitePlus { p, q };
        assert!((found(analytic_threshold_h0(&c, &tp(1, 7)).unwrap()) - 0.25).abs() < 1e-15);
        assert!((found(analytic_threshold_h0(&c, &tp(6, 1)).unwrap()) - 0.25).abs() < 1e-15);
        assert!((found(analytic_threshold_h0(&c, &tp(4, 6)).unwrap()) - 0.5).abs() < 1e-15);
        assert_eq!(found(analytic_threshold_h0(&c, &tp(3, 4)).unwrap()), 0.0);
        let minus = |p, q| PerturbationSpec::TwoSiteMinus { p, q };
        assert_eq!(found(analytic_threshold_h0(&c, &minus(3, 3)).unwrap()), 0.0);
        assert!((found(analytic_threshold_h0(&c, &minus(1, 1)).unwrap()) - 0.25).abs() < 1e-15);
        assert!((found(analytic_threshold_h0(&c, &minus(5, 2)).unwrap()) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hermitian_and_unperturbed_have_no_threshold() {
        let c = chain(5, Boundary::Open);
        assert_eq!(
            analytic_threshold_h0(&c, &PerturbationSpec::None).unwrap(),
            Threshold::NoThreshold
        );
        let herm = PerturbationSpec::SingleSite {
            p: 3,
            gamma_plus: 1.0,
            gamma_minus: 1.0,
        };
        assert_eq!(
            analytic_threshold_h0(&c, &herm).unwrap(),
            Threshold::NoThreshold
        );
    }

    #[test]
    fn nonzero_field_is_unsupported() {
        let c = SpinChainConfig::open(5, 1.0, 0.1).unwrap();
        assert!(matches!(
            analytic_threshold_h0(&c, &PerturbationSpec::sigma_plus(1)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn sector_strength_matches_brute_force_scan() {
        // Fine scan of |γc − s| < γ|d| as an independent check.
        let responses = [
            SiteResponse::<f64>::plus(),
            SiteResponse::minus(),
            SiteResponse::from_strengths(1.0, -1.0),
            SiteResponse::from_strengths(0.3, 0.9),
            SiteResponse::from_strengths(1.0, 1.0),
            SiteResponse::from_strengths(-0.7, 0.2),
        ];
        for resp in responses {
            for sum in -2..=2 {
                let analytic = sector_breaking_strength(1.0, sum, resp);
                let s = sum as f64 / 4.0;
                let scan = (1..=40_000)
                    .map(|i| i as f64 * 1e-4)
                    .find(|&g| (g * resp.sigma_x - s).abs() < g * resp.i_sigma_y.abs() - 1e-12);
                match (analytic, scan) {
                    (Some(a), Some(b)) => {
                        assert!((a - b).abs() <= 2e-4, "{resp:?} {sum}: {a} vs {b}")
                    }
                    (None, None) => {}
                    (Some(a), None) => assert!(a > 3.99, "{resp:?} {sum}: analytic {a}, scan none"),
                    (None, Some(b)) => panic!("{resp:?} {sum}: scan found {b}"),
                }
            }
        }
    }

    #[test]
    fn flat_band_counts() {
        let c = chain(8, Boundary::Open);
        assert_eq!(
            flat_band_count(&c, &PerturbationSpec::sigma_plus(3)).unwrap(),
            128
        );
        assert_eq!(
            flat_band_count(&c, &PerturbationSpec::sigma_plus(1)).unwrap(),
            0
        );
        let herm = PerturbationSpec::SingleSite {
            p: 3,
            gamma_plus: 1.0,
            gamma_minus: 1.0,
        };
        assert_eq!(flat_band_count(&c, &herm).unwrap(), 0);
        assert!(flat_band_count(&c, &PerturbationSpec::TwoSitePlus { p: 2, q: 5 }).is_err());
    }

    #[test]
    fn isolated_block_at_zero_gamma() {
        let m = adjacent_block_matrix(
            1.0,
            0.0,
            BlockPattern {
                left: None,
                right: None,
            },
        );
        let mut r = poly::roots(&poly::charpoly(&m));
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (z, want) in r.iter().zip([-0.25, -0.25, 0.25, 0.25]) {
            assert!((z - Complex::new(want, 0.0)).norm() < 1e-7, "{r:?}");
        }
    }

    #[test]
    fn adjacent_block_breaks_for_small_gamma() {
        for &g in &[0.01f64, 0.05, 0.2] {
            let spectra = adjacent_block_spectrum(1.0, g);
            let worst = spectra
                .iter()
                .flat_map(|s| s.eigenvalues.iter())
                .map(|z| z.im.abs())
                .fold(0.0, f64::max);
            assert!(worst > 1e-3 * g, "gamma {g}: max |Im| = {worst}");
        }
    }
}
