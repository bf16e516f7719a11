#![allow(dead_code)]

use ptchain::{Complex64, RealMatrix64};

/// Largest distance in a greedy nearest-neighbour matching of two multisets.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multiset sizes differ");
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap())
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

pub fn matrix_from(dim: usize, entries: &[f64]) -> RealMatrix64 {
    RealMatrix64::from_row_major(dim, entries[..dim * dim].to_vec()).unwrap()
}

/// Sorted real parts, asserting every imaginary part is tiny.
pub fn real_parts(eigs: &[Complex64], tol: f64) -> Vec<f64> {
    let mut v: Vec<f64> = eigs
        .iter()
        .map(|z| {
            assert!(z.im.abs() <= tol, "unexpected complex eigenvalue {z}");
            z.re
        })
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}
