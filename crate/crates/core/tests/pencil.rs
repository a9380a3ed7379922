mod common;

use common::{c, direct_sigmas, multiset_distance, random_matrix, rel_close};
use multicond::condnum::sigma_spectrum;
use multicond::linalg::random::{seeded_rng, Field};
use multicond::pencil::{
    construct_defective_pair, construct_defective_pair_with_z, construct_hermitian_pair, construct_nonhermitian_pair,
    extract_cluster, swap_for_infinite, NamedBuilder, CLUSTER_TOL, EXAMPLE2_SIGMAS,
};
use multicond::{Complex64, DenseMatrix, EigenStructure, Error, MatrixPair};
use proptest::prelude::*;
use rand::Rng;

/// `r` descending singular values spanning at most four decades.
fn random_sigmas(r: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeded_rng(seed);
    let mut s: Vec<f64> = (0..r).map(|_| 10f64.powf(rng.random_range(-4.0..0.5))).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn random_z(r: usize, seed: u64) -> DenseMatrix {
    // shifted to keep Z comfortably nonsingular
    &random_matrix(r, r, seed) + &DenseMatrix::identity(r).scale_real(2.0)
}

/// `(||(A - lambda0 B) X1||, ||Y1^H (A - lambda0 B)||, ||Y1^H B X1||)`.
fn defective_residuals(pair: &MatrixPair, es: &EigenStructure) -> (f64, f64, f64) {
    let shifted = pair.a() - &pair.b().scale(es.lambda0);
    let scale = pair.a().frobenius_norm() + pair.b().frobenius_norm();
    (
        (&shifted * &es.x1).max_abs() / scale,
        (&es.y1.adjoint() * &shifted).max_abs() / scale,
        (&(&es.y1.adjoint() * pair.b()) * &es.x1).max_abs() / pair.b().frobenius_norm(),
    )
}

fn planted_spectrum(lambda0: Complex64, r: usize, rest: &[Complex64]) -> Vec<Complex64> {
    let mut all = vec![lambda0; r];
    all.extend_from_slice(rest);
    all
}

#[test]
fn nonhermitian_round_trip_over_seeds() {
    for seed in 0..50u64 {
        let mut rng = seeded_rng(1000 + seed);
        let r = rng.random_range(1..=4);
        let extra = rng.random_range(1..=3);
        let lambda0 = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0));
        let rest: Vec<Complex64> = (0..extra)
            .map(|k| lambda0 + Complex64::new(1.0 + k as f64, rng.random_range(-1.0..1.0)))
            .collect();
        let sigmas = random_sigmas(r, seed);
        let field = if seed % 2 == 0 { Field::Real } else { Field::Complex };
        let (pair, es) = construct_nonhermitian_pair(lambda0, &rest, &sigmas, &random_z(r, seed), field, seed).unwrap();

        let got = direct_sigmas(&es.x1, &es.y1);
        for (a, b) in got.iter().zip(&sigmas) {
            assert!(rel_close(*a, *b, 1e-10), "seed {seed}: sigma {a} vs {b}");
        }
        let (ra, rb) = es.normalization_residuals(&pair).unwrap();
        assert!(ra <= 1e-10 * (1.0 + lambda0.norm()) && rb <= 1e-10, "seed {seed}: residuals {ra:e} {rb:e}");

        let eig = pair.eigenvalues().unwrap();
        let d = multiset_distance(&eig, &planted_spectrum(lambda0, r, &rest));
        assert!(d <= 1e-9 * (1.0 + lambda0.norm()), "seed {seed}: spectrum off by {d:e}");

        let found = extract_cluster(&pair, lambda0, r, CLUSTER_TOL).unwrap();
        let s1 = sigma_spectrum(&es.x1, &es.y1).unwrap();
        let s2 = sigma_spectrum(&found.x1, &found.y1).unwrap();
        for (a, b) in s1.as_slice().iter().zip(s2.as_slice()) {
            assert!(rel_close(*a, *b, 1e-9), "seed {seed}: extracted sigma {b} vs planted {a}");
        }
        let (ra, rb) = found.normalization_residuals(&pair).unwrap();
        assert!(ra <= 1e-10 * (1.0 + lambda0.norm()) && rb <= 1e-10);
    }
}

#[test]
fn sigmas_do_not_depend_on_z() {
    let lambda0 = c(1.0);
    let (_, base) =
        construct_nonhermitian_pair(lambda0, &[c(2.0)], &EXAMPLE2_SIGMAS, &DenseMatrix::identity(3), Field::Real, 5)
            .unwrap();
    let reference = sigma_spectrum(&base.x1, &base.y1).unwrap();
    for k in 0..10u64 {
        let z = random_z(3, 77 + k);
        let (pair, es) = construct_nonhermitian_pair(lambda0, &[c(2.0)], &EXAMPLE2_SIGMAS, &z, Field::Real, 5).unwrap();
        let planted = sigma_spectrum(&es.x1, &es.y1).unwrap();
        let found = extract_cluster(&pair, lambda0, 3, CLUSTER_TOL).unwrap();
        let extracted = sigma_spectrum(&found.x1, &found.y1).unwrap();
        for i in 0..3 {
            let want = reference.as_slice()[i];
            assert!(rel_close(planted.as_slice()[i], want, 1e-9));
            assert!(rel_close(extracted.as_slice()[i], want, 1e-9), "Z #{k}: {extracted:?}");
        }
    }
}

#[test]
fn defective_sigmas_do_not_depend_on_z() {
    for k in 0..10u64 {
        let z = random_z(3, 300 + k);
        let (pair, es) = construct_defective_pair_with_z(&EXAMPLE2_SIGMAS, 2, &[c(2.0)], &z, Field::Real, k).unwrap();
        let s = sigma_spectrum(&es.x1, &es.y1).unwrap();
        for (a, b) in s.as_slice().iter().zip(EXAMPLE2_SIGMAS) {
            assert!(rel_close(*a, b, 1e-9));
        }
        let (rx, ry, rb) = defective_residuals(&pair, &es);
        assert!(rx <= 1e-12 && ry <= 1e-12 && rb <= 1e-12, "{rx:e} {ry:e} {rb:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn hermitian_pairs_round_trip(n in 2usize..=6, r in 1usize..=4, seed: u64) {
        let r = r.min(n);
        let mut rng = seeded_rng(seed);
        let lambda0: f64 = rng.random_range(-3.0..3.0);
        let mut lambda = vec![lambda0; r];
        lambda.extend((r..n).map(|k| lambda0 + 1.0 + k as f64));
        let w = random_z(n, seed);
        let pair = construct_hermitian_pair(&lambda, &w).unwrap();
        prop_assert!(pair.is_hermitian_definite());
        let eig = pair.eigenvalues().unwrap();
        let want: Vec<Complex64> = lambda.iter().map(|&x| c(x)).collect();
        prop_assert!(multiset_distance(&eig, &want) <= 1e-9 * (1.0 + lambda0.abs() + n as f64));
        let es = extract_cluster(&pair, c(lambda0), r, CLUSTER_TOL).unwrap();
        let (ra, rb) = es.normalization_residuals(&pair).unwrap();
        prop_assert!(ra <= 1e-10 * (1.0 + lambda0.abs()) && rb <= 1e-10);
        prop_assert!(es.x1 == es.y1);
    }
}

#[test]
fn named_builders_plant_their_targets() {
    for builder in NamedBuilder::ALL {
        let built = builder.build(11).unwrap();
        let (lambda0, r, n1) = builder.target();
        assert_eq!((built.structure.lambda0, built.structure.r, built.structure.n1), (lambda0, r, n1));
        if n1 == 1 {
            let (ra, rb) = built.structure.normalization_residuals(&built.pair).unwrap();
            assert!(ra <= 1e-10 && rb <= 1e-10, "{builder}: {ra:e} {rb:e}");
        } else {
            let (rx, ry, rb) = defective_residuals(&built.pair, &built.structure);
            assert!(rx <= 1e-12 && ry <= 1e-12 && rb <= 1e-12, "{builder}: {rx:e} {ry:e} {rb:e}");
        }
        assert_eq!(builder.name().parse::<NamedBuilder>().unwrap(), builder);
    }
    // the nonhermitian builder is real, so its eigenvalues are too
    let built = NamedBuilder::Example2Nonhermitian.build(3).unwrap();
    assert!(built.pair.a().as_slice().iter().all(|z| z.im == 0.0));
}

#[test]
fn defective_pair_spectrum_and_detection() {
    let (pair, es) = construct_defective_pair(&EXAMPLE2_SIGMAS, 2, &[c(2.0)], Field::Real, 4).unwrap();
    assert_eq!(es.r, 3);
    assert_eq!(pair.n(), 7);
    let eig = pair.eigenvalues().unwrap();
    let near: usize = eig.iter().filter(|z| (*z - 1.0).norm() < 1e-4).count();
    assert_eq!(near, 6);
    match extract_cluster(&pair, c(1.0), 6, 1e-4) {
        Err(Error::DefectiveCluster { .. }) => {}
        other => panic!("expected a defective cluster, got {other:?}"),
    }
}

#[test]
fn infinite_eigenvalue_by_swap() {
    let a = DenseMatrix::from_real_diag(&[1.0, 1.0, 3.0]);
    let b = DenseMatrix::from_real_diag(&[0.0, 0.0, 1.0]);
    let pair = MatrixPair::general(a, b).unwrap();
    assert!(matches!(pair.eigenvalues(), Err(Error::IllPosedReduction { .. })));
    let swapped = swap_for_infinite(&pair).unwrap();
    let es = extract_cluster(&swapped, c(0.0), 2, CLUSTER_TOL).unwrap();
    let s = sigma_spectrum(&es.x1, &es.y1).unwrap();
    assert!(rel_close(s.as_slice()[0], 1.0, 1e-12) && rel_close(s.as_slice()[1], 1.0, 1e-12));
}
