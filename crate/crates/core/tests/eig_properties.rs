mod common;

use common::{matrix_from, multiset_distance};
use proptest::prelude::*;
use ptchain::eig::{self, balance, hessenberg, real_schur_eigenvalues, DEFAULT_MAX_ITER_PER_EIG};
use ptchain::poly::{charpoly, roots};
use ptchain::{Complex64, RealMatrix64};

fn square(max_dim: usize) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (2..=max_dim).prop_flat_map(|n| (Just(n), prop::collection::vec(-1.0f64..1.0, n * n)))
}

fn product(eigs: &[Complex64]) -> Complex64 {
    eigs.iter().fold(Complex64::new(1.0, 0.0), |acc, z| acc * z)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_identity((n, e) in square(32)) {
        let m = matrix_from(n, &e);
        let s = eig::eigenvalues(&m).unwrap();
        prop_assert_eq!(s.len(), n);
        let sum: Complex64 = s.eigenvalues.iter().sum();
        let tol = 1e-8 * n as f64 * m.norm_inf();
        prop_assert!((sum.re - m.trace()).abs() <= tol);
        prop_assert!(sum.im.abs() <= tol);
    }

    #[test]
    fn conjugate_pairing((n, e) in square(32)) {
        let m = matrix_from(n, &e);
        let s = eig::eigenvalues(&m).unwrap();
        prop_assert!(s.conjugate_pairing_error(0.0) <= 1e-8 * m.norm_inf());
    }

    #[test]
    fn determinant_identity((n, e) in square(24)) {
        let m = matrix_from(n, &e);
        let s = eig::eigenvalues(&m).unwrap();
        let det = m.determinant();
        let prod = product(&s.eigenvalues);
        prop_assert!((prod - det).norm() <= 1e-6 * det.abs().max(1e-300), "{prod} vs {det}");
    }

    #[test]
    fn matches_charpoly_roots((n, e) in square(8)) {
        let m = matrix_from(n, &e);
        let s = eig::eigenvalues(&m).unwrap();
        let oracle = roots(&charpoly(&m));
        let scale = m.norm_inf().max(1.0);
        prop_assert!(multiset_distance(&s.eigenvalues, &oracle) <= 1e-7 * scale);
    }

    #[test]
    fn similarity_invariance((n, e) in square(16), p in prop::collection::vec(-0.1f64..0.1, 256)) {
        let m = matrix_from(n, &e);
        let mut pm = RealMatrix64::identity(n);
        for i in 0..n {
            for j in 0..n {
                pm[(i, j)] += p[i * 16 + j];
            }
        }
        let pinv = pm.inverse().unwrap();
        let t = pm.matmul(&m).matmul(&pinv);
        let a = eig::eigenvalues(&m).unwrap();
        let b = eig::eigenvalues(&t).unwrap();
        prop_assert!(multiset_distance(&a.eigenvalues, &b.eigenvalues) <= 1e-7 * m.norm_inf().max(1.0));
    }

    #[test]
    fn hessenberg_preserves_charpoly((n, e) in square(7)) {
        let m = matrix_from(n, &e);
        let h = hessenberg(&m);
        prop_assert!(h.is_upper_hessenberg());
        let (c0, c1) = (charpoly(&m), charpoly(&h));
        let scale = c0.iter().map(|c| c.abs()).fold(1.0, f64::max);
        for (a, b) in c0.iter().zip(&c1) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn balancing_preserves_spectrum((n, e) in square(10), s in prop::collection::vec(-6i32..6, 10)) {
        // Badly scaled similarity D·M·D⁻¹ with D = diag(10^s).
        let mut m = matrix_from(n, &e);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] *= 10f64.powi(s[i] - s[j]);
            }
        }
        let (b, sc) = balance(&m).unwrap();
        prop_assert!(b.norm_inf() <= m.norm_inf() * (1.0 + 1e-12));
        prop_assert_eq!(sc.factors.len(), n);
        let orig = eig::eigenvalues(&matrix_from(n, &e)).unwrap();
        let got = eig::eigenvalues(&m).unwrap();
        let scale = matrix_from(n, &e).norm_inf().max(1.0);
        prop_assert!(multiset_distance(&orig.eigenvalues, &got.eigenvalues) <= 1e-8 * scale);
    }
}

#[test]
fn six_by_six_against_oracle() {
    let e: Vec<f64> = (0..36)
        .map(|k| ((k as f64 * 12.9898).sin() * 43758.5453).fract())
        .collect();
    let m = matrix_from(6, &e);
    let s = eig::eigenvalues(&m).unwrap();
    let oracle = roots(&charpoly(&m));
    for z in &s.eigenvalues {
        let d = oracle
            .iter()
            .map(|w| (z - w).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(d <= 1e-8 * z.norm().max(1.0), "{z}: {d}");
    }
}

#[test]
fn jordan_block_is_double_zero() {
    let h = RealMatrix64::from_rows(&[[0.0, 0.7], [0.0, 0.0]]).unwrap();
    let s = real_schur_eigenvalues(&h, DEFAULT_MAX_ITER_PER_EIG, f64::EPSILON).unwrap();
    assert!(s.eigenvalues.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn reduced_pt_block() {
    // [[0, h+γ/2], [h−γ/2, 0]] has eigenvalues ±sqrt(h² − γ²/4).
    for &(h, g) in &[(0.5, 0.4), (0.2, 1.0), (0.3, 0.6)] {
        let m = RealMatrix64::from_rows(&[[0.0, h + g / 2.0], [h - g / 2.0, 0.0]]).unwrap();
        let s = eig::eigenvalues(&m).unwrap();
        let d: f64 = h * h - g * g / 4.0;
        let want = if d >= 0.0 {
            [
                Complex64::new(d.sqrt(), 0.0),
                Complex64::new(-d.sqrt(), 0.0),
            ]
        } else {
            [
                Complex64::new(0.0, (-d).sqrt()),
                Complex64::new(0.0, -(-d).sqrt()),
            ]
        };
        assert!(
            multiset_distance(&s.eigenvalues, &want) < 1e-10,
            "{:?}",
            s.eigenvalues
        );
    }
}

#[test]
fn residual_diagnostic_is_small() {
    let e: Vec<f64> = (0..400)
        .map(|k| ((k * 7919 % 1000) as f64) / 500.0 - 1.0)
        .collect();
    let s = eig::eigenvalues(&matrix_from(20, &e)).unwrap();
    assert!(s.max_residual < 1e-12, "{}", s.max_residual);
    assert!(s.iterations > 0);
}
