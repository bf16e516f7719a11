//! Spin-chain configurations, exceptional perturbations, and construction of
//! the dense `2^N x 2^N` real Hamiltonian.
//!
//! Basis ordering: the computational index `b` of a basis state has site 1 as
//! its most-significant bit and site `N` as its least-significant bit; bit
//! value 0 is the `σᶻ = +1` state. Every operator in this module
//! (`σˣ`, `σᶻ`, `σ⁺`, `σ⁻`, `iσʸ`) is real in this basis, so Hamiltonians are
//! stored as [`RealMatrix`]. Sites are 1-indexed throughout the public API.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::scalar::Scalar;

/// Largest chain handled by the dense builders (`4096 x 4096`, ~134 MB in f64).
pub const MAX_SITES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    Open,
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        })
    }
}

/// Transverse-field Ising chain
/// `H₀ = -(J/4) Σ σˣᵢ σˣᵢ₊₁ - (h_z/2) Σ σᶻᵢ`,
/// with the `σˣ_N σˣ_1` bond present only for [`Boundary::Periodic`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinChainConfig<T> {
    pub n_sites: usize,
    pub coupling_j: T,
    pub field_hz: T,
    pub boundary: Boundary,
}

impl<T: Scalar> SpinChainConfig<T> {
    pub fn new(n_sites: usize, coupling_j: T, field_hz: T, boundary: Boundary) -> Result<Self> {
        let c = Self {
            n_sites,
            coupling_j,
            field_hz,
            boundary,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn open(n_sites: usize, coupling_j: T, field_hz: T) -> Result<Self> {
        Self::new(n_sites, coupling_j, field_hz, Boundary::Open)
    }

    pub fn periodic(n_sites: usize, coupling_j: T, field_hz: T) -> Result<Self> {
        Self::new(n_sites, coupling_j, field_hz, Boundary::Periodic)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites == 0 {
            return Err(Error::InvalidConfig("n_sites must be at least 1".into()));
        }
        if self.n_sites > MAX_SITES {
            return Err(Error::InvalidConfig(format!(
                "n_sites = {} exceeds the dense limit of {MAX_SITES}",
                self.n_sites
            )));
        }
        if self.boundary == Boundary::Periodic && self.n_sites < 3 {
            return Err(Error::InvalidConfig(
                "periodic boundary needs at least 3 sites".into(),
            ));
        }
        if !self.coupling_j.is_finite() || self.coupling_j < T::zero() {
            return Err(Error::InvalidConfig(format!(
                "coupling J must be finite and >= 0, got {}",
                self.coupling_j
            )));
        }
        if !self.field_hz.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "field h_z must be finite, got {}",
                self.field_hz
            )));
        }
        Ok(())
    }

    /// Hilbert-space dimension `2^N`.
    pub fn dim(&self) -> usize {
        1usize << self.n_sites
    }

    pub fn with_field(self, field_hz: T) -> Self {
        Self { field_hz, ..self }
    }

    pub fn with_coupling(self, coupling_j: T) -> Self {
        Self { coupling_j, ..self }
    }

    pub fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n_sites {
            return Err(Error::SiteOutOfRange {
                site,
                n_sites: self.n_sites,
            });
        }
        Ok(())
    }

    /// Whether two distinct sites share a bond under the active boundary.
    pub fn are_neighbors(&self, a: usize, b: usize) -> bool {
        let d = a.abs_diff(b);
        d == 1 || (self.boundary == Boundary::Periodic && d == self.n_sites - 1 && d > 0)
    }

    /// Sites bonded to `site`, in ascending order and without repeats.
    pub fn neighbors(&self, site: usize) -> Vec<usize> {
        let n = self.n_sites;
        let mut out = Vec::with_capacity(2);
        match self.boundary {
            Boundary::Open => {
                if site > 1 {
                    out.push(site - 1);
                }
                if site < n {
                    out.push(site + 1);
                }
            }
            Boundary::Periodic => {
                out.push(if site == 1 { n } else { site - 1 });
                out.push(if site == n { 1 } else { site + 1 });
                out.sort_unstable();
                out.dedup();
            }
        }
        out
    }

    /// Chain end under open boundary; a ring has no edge sites.
    pub fn is_edge(&self, site: usize) -> bool {
        self.boundary == Boundary::Open && (site == 1 || site == self.n_sites)
    }

    /// Bonds `(i, j)` of the chain, 1-indexed.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n_sites;
        let mut b: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic {
            b.push((n, 1));
        }
        b
    }

    /// Bit mask of `site` in the computational index.
    #[inline]
    pub fn site_mask(&self, site: usize) -> usize {
        1usize << (self.n_sites - site)
    }
}

/// Exceptional (or Hermitian-baseline) perturbation families.
///
/// The two-site variants take their overall strength `γ` at build time. The
/// single-site variant stores its own `(γ₊, γ₋)`; see [`build_hamiltonian`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PerturbationSpec<T> {
    /// `γ(σ⁺_p + σ⁻_q)`
    TwoSitePlus { p: usize, q: usize },
    /// `γ(σ⁺_p - σ⁻_q)`; anti-Hermitian `iγσʸ_p` when `p = q`.
    TwoSiteMinus { p: usize, q: usize },
    /// `γ(σ⁺_p + σ⁺_q)`
    TwoSiteDoublePlus { p: usize, q: usize },
    /// `γ₊σ⁺_p + γ₋σ⁻_p`
    SingleSite {
        p: usize,
        gamma_plus: T,
        gamma_minus: T,
    },
    /// Hermitian baseline `H₀`.
    None,
}

impl<T: Scalar> PerturbationSpec<T> {
    /// One-sided `γσ⁺_p` direction, to be scaled by [`build_scaled`].
    pub fn sigma_plus(p: usize) -> Self {
        PerturbationSpec::SingleSite {
            p,
            gamma_plus: T::one(),
            gamma_minus: T::zero(),
        }
    }

    /// `(p, q)` for the two-site families.
    pub fn sites(&self) -> Option<(usize, usize)> {
        match *self {
            PerturbationSpec::TwoSitePlus { p, q }
            | PerturbationSpec::TwoSiteMinus { p, q }
            | PerturbationSpec::TwoSiteDoublePlus { p, q } => Some((p, q)),
            _ => None,
        }
    }

    pub fn validate(&self, config: &SpinChainConfig<T>) -> Result<()> {
        match *self {
            PerturbationSpec::TwoSitePlus { p, q }
            | PerturbationSpec::TwoSiteMinus { p, q }
            | PerturbationSpec::TwoSiteDoublePlus { p, q } => {
                config.check_site(p)?;
                config.check_site(q)
            }
            PerturbationSpec::SingleSite {
                p,
                gamma_plus,
                gamma_minus,
            } => {
                config.check_site(p)?;
                if !gamma_plus.is_finite() || !gamma_minus.is_finite() {
                    return Err(Error::InvalidArgument(
                        "single-site strengths must be finite".into(),
                    ));
                }
                Ok(())
            }
            PerturbationSpec::None => Ok(()),
        }
    }

    /// Single-site strengths multiplied by `factor`; other variants unchanged.
    pub fn scale_strengths(&self, factor: T) -> Self {
        match *self {
            PerturbationSpec::SingleSite {
                p,
                gamma_plus,
                gamma_minus,
            } => PerturbationSpec::SingleSite {
                p,
                gamma_plus: gamma_plus * factor,
                gamma_minus: gamma_minus * factor,
            },
            other => other,
        }
    }

    /// Short machine-friendly name.
    pub fn kind_name(&self) -> &'static str {
        match self {
            PerturbationSpec::TwoSitePlus { .. } => "two_site_plus",
            PerturbationSpec::TwoSiteMinus { .. } => "two_site_minus",
            PerturbationSpec::TwoSiteDoublePlus { .. } => "two_site_double_plus",
            PerturbationSpec::SingleSite { .. } => "single_site",
            PerturbationSpec::None => "none",
        }
    }
}

/// Geometric category of a perturbation's location.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SiteClass {
    /// `Γ⁺_pp = γσˣ_p`.
    Hermitian,
    /// The two sites share a bond.
    Adjacent,
    /// Non-adjacent, at least one site at a chain end (open boundary only).
    EdgeInvolved,
    /// Non-adjacent, both interior.
    BulkPair,
    /// Single-site term at a chain end.
    SingleEdge,
    /// Single-site term in the interior (every site of a ring).
    SingleBulk,
}

impl SiteClass {
    pub fn name(&self) -> &'static str {
        match self {
            SiteClass::Hermitian => "hermitian",
            SiteClass::Adjacent => "adjacent",
            SiteClass::EdgeInvolved => "edge",
            SiteClass::BulkPair => "bulk",
            SiteClass::SingleEdge => "single_edge",
            SiteClass::SingleBulk => "single_bulk",
        }
    }

    pub const ALL: [SiteClass; 6] = [
        SiteClass::Hermitian,
        SiteClass::Adjacent,
        SiteClass::EdgeInvolved,
        SiteClass::BulkPair,
        SiteClass::SingleEdge,
        SiteClass::SingleBulk,
    ];
}

impl fmt::Display for SiteClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PauliKind {
    X,
    Z,
    Plus,
    Minus,
}

/// Single-site operator embedded in the `2^N` space (identity elsewhere).
pub fn pauli_operator<T: Scalar>(
    config: &SpinChainConfig<T>,
    site: usize,
    kind: PauliKind,
) -> Result<RealMatrix<T>> {
    config.validate()?;
    config.check_site(site)?;
    let mut m = RealMatrix::zeros(config.dim());
    add_site_term(&mut m, config, site, kind, T::one());
    Ok(m)
}

/// `m += coeff * op_site`, written entry by entry.
fn add_site_term<T: Scalar>(
    m: &mut RealMatrix<T>,
    config: &SpinChainConfig<T>,
    site: usize,
    kind: PauliKind,
    coeff: T,
) {
    let mask = config.site_mask(site);
    for b in 0..config.dim() {
        let up = b & mask == 0;
        match kind {
            PauliKind::X => m[(b, b ^ mask)] += coeff,
            PauliKind::Z => m[(b, b)] += if up { coeff } else { -coeff },
            // σ⁺ |↓⟩ = |↑⟩
            PauliKind::Plus => {
                if up {
                    m[(b, b | mask)] += coeff;
                }
            }
            PauliKind::Minus => {
                if !up {
                    m[(b, b & !mask)] += coeff;
                }
            }
        }
    }
}

/// Hermitian Ising chain `H₀(J, h_z)`; symmetric by construction.
pub fn build_h0<T: Scalar>(config: &SpinChainConfig<T>) -> Result<RealMatrix<T>> {
    config.validate()?;
    let dim = config.dim();
    let mut m = RealMatrix::zeros(dim);
    let bond = -config.coupling_j / T::lit(4.0);
    if bond != T::zero() {
        for (i, j) in config.bonds() {
            let flip = config.site_mask(i) | config.site_mask(j);
            for b in 0..dim {
                m[(b, b ^ flip)] += bond;
            }
        }
    }
    let half_h = config.field_hz / T::lit(2.0);
    if half_h != T::zero() {
        for b in 0..dim {
            // Σᵢ σᶻᵢ = N - 2·popcount(b)
            let up = config.n_sites as i64 - 2 * b.count_ones() as i64;
            m[(b, b)] -= half_h * T::from_i64(up).unwrap();
        }
    }
    Ok(m)
}

/// `H₀ + Γ` for the given family at overall strength `gamma`.
///
/// For [`PerturbationSpec::SingleSite`] the stored `(γ₊, γ₋)` are the
/// strengths and `gamma` must be exactly 1; sweeps rescale the spec instead
/// (see [`build_scaled`]).
pub fn build_hamiltonian<T: Scalar>(
    config: &SpinChainConfig<T>,
    pert: &PerturbationSpec<T>,
    gamma: T,
) -> Result<RealMatrix<T>> {
    pert.validate(config)?;
    if !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "gamma must be finite, got {gamma}"
        )));
    }
    let mut m = build_h0(config)?;
    match *pert {
        PerturbationSpec::TwoSitePlus { p, q } => {
            add_site_term(&mut m, config, p, PauliKind::Plus, gamma);
            add_site_term(&mut m, config, q, PauliKind::Minus, gamma);
        }
        PerturbationSpec::TwoSiteMinus { p, q } => {
            add_site_term(&mut m, config, p, PauliKind::Plus, gamma);
            add_site_term(&mut m, config, q, PauliKind::Minus, -gamma);
        }
        PerturbationSpec::TwoSiteDoublePlus { p, q } => {
            add_site_term(&mut m, config, p, PauliKind::Plus, gamma);
            add_site_term(&mut m, config, q, PauliKind::Plus, gamma);
        }
        PerturbationSpec::SingleSite {
            p,
            gamma_plus,
            gamma_minus,
        } => {
            if gamma != T::one() {
                return Err(Error::InvalidArgument(format!(
                    "single-site perturbations carry their own strengths; gamma must be 1, got {gamma}"
                )));
            }
            add_site_term(&mut m, config, p, PauliKind::Plus, gamma_plus);
            add_site_term(&mut m, config, p, PauliKind::Minus, gamma_minus);
        }
        PerturbationSpec::None => {}
    }
    Ok(m)
}

/// Hamiltonian at strength `gamma` along the ray defined by `pert`.
///
/// Two-site families use `gamma` directly; a single-site spec has
/// `(γ₊, γ₋)` multiplied by `gamma`.
pub fn build_scaled<T: Scalar>(
    config: &SpinChainConfig<T>,
    pert: &PerturbationSpec<T>,
    gamma: T,
) -> Result<RealMatrix<T>> {
    match pert {
        PerturbationSpec::SingleSite { .. } => {
            build_hamiltonian(config, &pert.scale_strengths(gamma), T::one())
        }
        _ => build_hamiltonian(config, pert, gamma),
    }
}

/// Category of the perturbation's location.
pub fn classify_sites<T: Scalar>(
    config: &SpinChainConfig<T>,
    pert: &PerturbationSpec<T>,
) -> Result<SiteClass> {
    config.validate()?;
    pert.validate(config)?;
    let single = |p: usize| {
        if config.is_edge(p) {
            SiteClass::SingleEdge
        } else {
            SiteClass::SingleBulk
        }
    };
    let class = match *pert {
        PerturbationSpec::None => {
            return Err(Error::InvalidArgument(
                "the unperturbed chain has no site class".into(),
            ))
        }
        PerturbationSpec::SingleSite { p, .. } => single(p),
        PerturbationSpec::TwoSitePlus { p, q } if p == q => SiteClass::Hermitian,
        PerturbationSpec::TwoSiteMinus { p, q } | PerturbationSpec::TwoSiteDoublePlus { p, q }
            if p == q =>
        {
            single(p)
        }
        PerturbationSpec::TwoSitePlus { p, q }
        | PerturbationSpec::TwoSiteMinus { p, q }
        | PerturbationSpec::TwoSiteDoublePlus { p, q } => {
            if config.are_neighbors(p, q) {
                SiteClass::Adjacent
            } else if config.is_edge(p) || config.is_edge(q) {
                SiteClass::EdgeInvolved
            } else {
                SiteClass::BulkPair
            }
        }
    };
    Ok(class)
}
