mod common;

use common::real_parts;
use proptest::prelude::*;
use ptchain::eig;
use ptchain::model::{build_h0, build_hamiltonian, classify_sites, pauli_operator};
use ptchain::{Boundary, PauliKind, Perturbation64, SiteClass, SpinChain64};

fn h0_spectrum(n: usize, j: f64, hz: f64) -> Vec<f64> {
    let c = SpinChain64::open(n, j, hz).unwrap();
    let s = eig::eigenvalues(&build_h0(&c).unwrap()).unwrap();
    real_parts(&s.eigenvalues, 1e-12)
}

fn assert_close(got: &[f64], want: &[f64], tol: f64) {
    assert_eq!(got.len(), want.len());
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
    }
}

/// `−(J/4) Σ_bonds s_i s_j` over all sign patterns, sorted.
fn brute_force_levels(c: &SpinChain64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..c.dim())
        .map(|b| {
            let s = |site: usize| {
                if b & c.site_mask(site) == 0 {
                    1.0
                } else {
                    -1.0
                }
            };
            -c.coupling_j / 4.0 * c.bonds().iter().map(|&(i, j)| s(i) * s(j)).sum::<f64>()
        })
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

#[test]
fn two_site_bond() {
    assert_close(
        &h0_spectrum(2, 1.0, 0.0),
        &[-0.25, -0.25, 0.25, 0.25],
        1e-12,
    );
}

#[test]
fn three_site_levels() {
    assert_close(
        &h0_spectrum(3, 1.0, 0.0),
        &[-0.5, -0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5],
        1e-12,
    );
}

#[test]
fn free_spins_in_field() {
    assert_close(&h0_spectrum(2, 0.0, 1.0), &[-1.0, 0.0, 0.0, 1.0], 1e-12);
}

#[test]
fn seven_site_bands() {
    let levels = h0_spectrum(7, 1.0, 0.0);
    assert_eq!(levels.len(), 128);
    let mut distinct: Vec<f64> = Vec::new();
    for &e in &levels {
        if distinct.last().is_none_or(|&d| (e - d).abs() > 1e-9) {
            distinct.push(e);
        }
    }
    assert_eq!(distinct.len(), 7, "{distinct:?}");
    for (a, b) in levels.iter().zip(levels.iter().rev()) {
        assert!((a + b).abs() < 1e-12);
    }
}

#[test]
fn commuting_limit_matches_enumeration() {
    for n in 2..=8 {
        for boundary in [Boundary::Open, Boundary::Periodic] {
            let Ok(c) = SpinChain64::new(n, 1.3, 0.0, boundary) else {
                continue;
            };
            let s = eig::eigenvalues(&build_h0(&c).unwrap()).unwrap();
            assert_close(
                &real_parts(&s.eigenvalues, 1e-12),
                &brute_force_levels(&c),
                1e-11,
            );
        }
    }
}

#[test]
fn edge_pair_below_threshold_is_real() {
    let c = SpinChain64::open(7, 1.0, 0.0).unwrap();
    let h = build_hamiltonian(&c, &Perturbation64::TwoSitePlus { p: 1, q: 7 }, 0.2).unwrap();
    let s = eig::eigenvalues(&h).unwrap();
    assert!(
        s.eigenvalues.iter().all(|z| z.im.abs() < 1e-6),
        "{}",
        s.max_imag_raw()
    );
}

#[test]
fn anti_hermitian_diagonal_term() {
    let c = SpinChain64::open(3, 1.0, 0.0).unwrap();
    let h = build_hamiltonian(&c, &Perturbation64::TwoSiteMinus { p: 2, q: 2 }, 0.6).unwrap();
    let mut diff = h.clone();
    diff.add_scaled(-1.0, &build_h0(&c).unwrap());
    assert!(diff.is_antisymmetric());
    assert!(diff.max_abs_diff(&ptchain::RealMatrix64::zeros(8)) > 0.0);
}

#[test]
fn classification_examples() {
    let open = SpinChain64::open(7, 1.0, 0.0).unwrap();
    let ring = SpinChain64::periodic(7, 1.0, 0.0).unwrap();
    let plus = |p, q| Perturbation64::TwoSitePlus { p, q };
    assert_eq!(
        classify_sites(&open, &plus(1, 7)).unwrap(),
        SiteClass::EdgeInvolved
    );
    assert_eq!(
        classify_sites(&open, &plus(6, 4)).unwrap(),
        SiteClass::BulkPair
    );
    assert_eq!(
        classify_sites(&ring, &plus(1, 7)).unwrap(),
        SiteClass::Adjacent
    );
    for p in 1..=7 {
        for q in 1..=7 {
            assert_ne!(
                classify_sites(&ring, &plus(p, q)).unwrap(),
                SiteClass::EdgeInvolved
            );
        }
    }
    assert!(classify_sites(&open, &Perturbation64::None).is_err());
}

#[test]
fn pauli_examples() {
    let one = SpinChain64::open(1, 1.0, 0.0).unwrap();
    let plus = pauli_operator(&one, 1, PauliKind::Plus).unwrap();
    assert_eq!(plus.as_slice(), &[0.0, 1.0, 0.0, 0.0]);
    let minus = pauli_operator(&one, 1, PauliKind::Minus).unwrap();
    assert_eq!(minus.as_slice(), &[0.0, 0.0, 1.0, 0.0]);
    let two = SpinChain64::open(2, 1.0, 0.0).unwrap();
    let z = pauli_operator(&two, 2, PauliKind::Z).unwrap();
    assert_eq!(z, ptchain::RealMatrix64::diagonal(&[1.0, -1.0, 1.0, -1.0]));
    assert!(pauli_operator(&two, 3, PauliKind::X).is_err());
}

fn chain_and_pert() -> impl Strategy<Value = (SpinChain64, Perturbation64, f64)> {
    (3usize..=6, 0.0f64..2.0, -1.0f64..1.0, any::<bool>()).prop_flat_map(|(n, j, hz, ring)| {
        let boundary = if ring {
            Boundary::Periodic
        } else {
            Boundary::Open
        };
        let c = SpinChain64::new(n, j, hz, boundary).unwrap();
        let pert =
            (0u8..4, 1..=n, 1..=n, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(kind, p, q, a, b)| {
                match kind {
                    0 => Perturbation64::TwoSitePlus { p, q },
                    1 => Perturbation64::TwoSiteMinus { p, q },
                    2 => Perturbation64::TwoSiteDoublePlus { p, q },
                    _ => Perturbation64::SingleSite {
                        p,
                        gamma_plus: a,
                        gamma_minus: b,
                    },
                }
            });
        (Just(c), pert, 0.0f64..1.5)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn x_is_plus_plus_minus((c, _, _) in chain_and_pert(), site in 1usize..=3) {
        let x = pauli_operator(&c, site, PauliKind::X).unwrap();
        let mut pm = pauli_operator(&c, site, PauliKind::Plus).unwrap();
        pm.add_scaled(1.0, &pauli_operator(&c, site, PauliKind::Minus).unwrap());
        prop_assert_eq!(x, pm);
    }

    #[test]
    fn spectra_pair_up((c, pert, g) in chain_and_pert()) {
        let g = if matches!(pert, Perturbation64::SingleSite { .. }) { 1.0 } else { g };
        let h = build_hamiltonian(&c, &pert, g).unwrap();
        prop_assert_eq!(h.dim(), 1 << c.n_sites);
        let s = eig::eigenvalues(&h).unwrap();
        prop_assert!(s.conjugate_pairing_error(0.0) <= 1e-8 * h.norm_inf().max(1.0));
    }

    #[test]
    fn unperturbed_is_h0((c, _, g) in chain_and_pert()) {
        let h = build_hamiltonian(&c, &Perturbation64::None, g).unwrap();
        prop_assert!(h.is_symmetric());
        prop_assert_eq!(h, build_h0(&c).unwrap());
    }

    #[test]
    fn diagonal_plus_is_symmetric((c, _, g) in chain_and_pert(), p in 1usize..=3) {
        let h = build_hamiltonian(&c, &Perturbation64::TwoSitePlus { p, q: p }, g).unwrap();
        prop_assert!(h.is_symmetric());
    }

    #[test]
    fn single_site_decomposition((c, _, _) in chain_and_pert(), a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let pert = Perturbation64::SingleSite { p: 2, gamma_plus: a, gamma_minus: b };
        let h = build_hamiltonian(&c, &pert, 1.0).unwrap();
        let mut want = build_h0(&c).unwrap();
        want.add_scaled(a, &pauli_operator(&c, 2, PauliKind::Plus).unwrap());
        want.add_scaled(b, &pauli_operator(&c, 2, PauliKind::Minus).unwrap());
        prop_assert!(h.max_abs_diff(&want) <= 1e-15);
    }

    #[test]
    fn particle_hole_at_zero_field(n in 2usize..=7, j in 0.1f64..3.0) {
        let levels = h0_spectrum(n, j, 0.0);
        for (a, b) in levels.iter().zip(levels.iter().rev()) {
            prop_assert!((a + b).abs() <= 1e-11 * j);
        }
    }
}
