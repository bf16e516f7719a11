//! Oracle suite: closed-form zero-field thresholds against bisection on the
//! full spectrum.

use anyhow::{Context, Result};
use ptchain::analytic::analytic_threshold_h0;
use ptchain::model::classify_sites;
use ptchain::pt::{find_threshold, Threshold, ThresholdResult, ThresholdSearch};
use ptchain::{Perturbation64, SiteClass, SpinChain64};
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct OracleCase {
    pub group: &'static str,
    pub chain: SpinChain64,
    pub pert: Perturbation64,
}

#[derive(Clone, Debug)]
pub struct OracleRow {
    pub case: OracleCase,
    pub class: Option<SiteClass>,
    pub analytic: Threshold<f64>,
    pub numeric: ThresholdResult<f64>,
    pub tol: f64,
    pub pass: bool,
}

impl OracleRow {
    pub fn difference(&self) -> Option<f64> {
        match (self.analytic, self.numeric.gamma_pt) {
            (Threshold::Found(a), Threshold::Found(b)) => Some((a - b).abs()),
            _ => None,
        }
    }
}

fn case(group: &'static str, chain: SpinChain64, pert: Perturbation64) -> OracleCase {
    OracleCase { group, chain, pert }
}

fn lowering(p: usize) -> Perturbation64 {
    Perturbation64::SingleSite {
        p,
        gamma_plus: 0.0,
        gamma_minus: 1.0,
    }
}

/// Every supported perturbation on one chain: all `Γ⁺` pairs, diagonal
/// `Γ⁻`, and `σ⁺`, `σ⁻` on each site.
pub fn chain_cases(chain: &SpinChain64) -> Vec<OracleCase> {
    let n = chain.n_sites;
    let mut v = Vec::new();
    for p in 1..=n {
        for q in 1..=n {
            v.push(case("pairs", *chain, Perturbation64::TwoSitePlus { p, q }));
        }
    }
    for p in 1..=n {
        v.push(case(
            "minus_diagonal",
            *chain,
            Perturbation64::TwoSiteMinus { p, q: p },
        ));
        v.push(case("single_plus", *chain, Perturbation64::sigma_plus(p)));
        v.push(case("single_minus", *chain, lowering(p)));
    }
    v
}

/// One perturbation per site class available at length `n`.
pub fn class_representatives(n: usize) -> Vec<Perturbation64> {
    let mut v = vec![
        Perturbation64::TwoSitePlus { p: 2, q: 2 },
        Perturbation64::TwoSitePlus { p: 1, q: 2 },
        Perturbation64::TwoSitePlus { p: 1, q: n },
    ];
    if n >= 5 {
        v.push(Perturbation64::TwoSitePlus { p: 2, q: 4 });
    }
    v.push(Perturbation64::sigma_plus(1));
    v.push(Perturbation64::sigma_plus(2));
    v
}

/// The fixed zero-field table: all pairs on an open 7-site chain, one
/// representative per class for open chains of 4 to 10 sites, all pairs
/// on an 8-site ring, and single-site and diagonal `Γ⁻` cases at 6 and 8
/// sites.
pub fn full_cases() -> Vec<OracleCase> {
    let open = |n| SpinChain64::open(n, 1.0, 0.0).unwrap();
    let mut v = Vec::new();
    for p in 1..=7 {
        for q in 1..=7 {
            v.push(case(
                "open7_pairs",
                open(7),
                Perturbation64::TwoSitePlus { p, q },
            ));
        }
    }
    for n in 4..=10 {
        for pert in class_representatives(n) {
            v.push(case("length_scan", open(n), pert));
        }
    }
    let ring = SpinChain64::periodic(8, 1.0, 0.0).unwrap();
    for p in 1..=8 {
        for q in 1..=8 {
            if p != q {
                v.push(case(
                    "ring8_pairs",
                    ring,
                    Perturbation64::TwoSitePlus { p, q },
                ));
            }
        }
    }
    for n in [6, 8] {
        for p in 1..=n {
            v.push(case("single_site", open(n), Perturbation64::sigma_plus(p)));
            v.push(case("single_site", open(n), lowering(p)));
            v.push(case(
                "minus_diagonal",
                open(n),
                Perturbation64::TwoSiteMinus { p, q: p },
            ));
        }
    }
    v
}

/// Runs every case; rows come back in case order.
pub fn run_cases<F>(cases: &[OracleCase], search: F) -> Result<Vec<OracleRow>>
where
    F: Fn(&SpinChain64) -> ThresholdSearch<f64> + Sync,
{
    cases
        .par_iter()
        .map(|c| {
            let ctx = || {
                format!(
                    "{} on N={} {}",
                    c.pert.kind_name(),
                    c.chain.n_sites,
                    c.chain.boundary
                )
            };
            let s = search(&c.chain);
            let analytic = analytic_threshold_h0(&c.chain, &c.pert).with_context(ctx)?;
            let numeric = find_threshold(&c.chain, &c.pert, &s).with_context(ctx)?;
            let class = classify_sites(&c.chain, &c.pert).ok();
            let pass = match (analytic, numeric.gamma_pt) {
                (Threshold::NoThreshold, Threshold::NoThreshold) => true,
                (Threshold::Found(a), Threshold::Found(b)) => (a - b).abs() <= s.tol,
                _ => false,
            };
            Ok(OracleRow {
                case: c.clone(),
                class,
                analytic,
                numeric,
                tol: s.tol,
                pass,
            })
        })
        .collect()
}
