mod common;

use common::{c, multiset_distance, random_hermitian_pair, random_nonhermitian_pair, rel_close, spectrum_in};
use multicond::condnum::{
    first_order_eigs, kappa_defective, kappa_hermitian, kappa_nonhermitian, sigma_spectrum, worst_case_hermitian,
    worst_case_nonhermitian,
};
use multicond::lab::{random_perturbation_with, Structure};
use multicond::linalg::random::{seeded_rng, Field};
use multicond::linalg::{general_eig, spectral_norm, svd};
use multicond::pencil::NamedBuilder;
use multicond::{Complex64, DenseMatrix, EigenStructure, MatrixPair, Regime, SigmaSpectrum};
use proptest::prelude::*;
use rand::Rng;

fn spectrum_from(seed: u64, r: usize) -> SigmaSpectrum {
    spectrum_in(seed, r, -6.0, 2.0)
}

/// Structured bound by direct enumeration over the splitting index.
fn oracle_hermitian(s: &[f64], lambda0: f64, tau: f64) -> Vec<f64> {
    (1..=s.len())
        .map(|i| {
            let best = (1..=i).map(|j| (s[j - 1] * s[i - j]).sqrt()).fold(f64::INFINITY, f64::min);
            (1.0 + tau * lambda0.abs()) * best
        })
        .collect()
}

/// Unstructured bound as a plain product, no logarithms or clamping.
fn oracle_general(s: &[f64], lambda0: Complex64, tau: f64) -> Vec<f64> {
    (1..=s.len())
        .map(|i| (1.0 + tau * lambda0.norm()) * s[..i].iter().product::<f64>().powf(1.0 / i as f64))
        .collect()
}

fn sorted_magnitudes(z: &[Complex64]) -> Vec<f64> {
    let mut m: Vec<f64> = z.iter().map(|z| z.norm()).collect();
    m.sort_by(|a, b| b.total_cmp(a));
    m
}

fn example_pairs() -> Vec<(&'static str, MatrixPair, EigenStructure)> {
    [NamedBuilder::Example2Hermitian, NamedBuilder::Example2Nonhermitian, NamedBuilder::Example1]
        .into_iter()
        .map(|b| {
            let built = b.build(0).unwrap();
            (b.name(), built.pair, built.structure)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn kappa_properties(seed: u64, r in 1usize..=8, re in -5.0f64..5.0, im in -5.0f64..5.0, tau in 0.0f64..3.0, scale in 1e-3f64..1e3) {
        let s = spectrum_from(seed, r);
        let lambda0 = Complex64::new(re, im);
        let real0 = c(re);
        let h = kappa_hermitian(&s, real0, tau);
        let g = kappa_nonhermitian(&s, lambda0, tau);
        let g_real = kappa_nonhermitian(&s, real0, tau);
        prop_assert_eq!(h.regime, Regime::HermitianStructured);
        prop_assert_eq!(g.regime, Regime::General);

        for (got, want) in h.kappas.iter().zip(oracle_hermitian(s.as_slice(), re, tau)) {
            prop_assert!(rel_close(*got, want, 1e-12));
        }
        for (got, want) in g.kappas.iter().zip(oracle_general(s.as_slice(), lambda0, tau)) {
            prop_assert!(rel_close(*got, want, 1e-12));
        }
        for k in [&h.kappas, &g.kappas] {
            prop_assert!(k.windows(2).all(|w| w[0] >= w[1]));
        }
        for i in 0..r {
            prop_assert!(h.kappas[i] <= g_real.kappas[i] * (1.0 + 1e-12));
        }
        for i in 0..r.min(2) {
            prop_assert!(rel_close(h.kappas[i], g_real.kappas[i], 1e-12));
        }

        let scaled = s.scaled(scale).unwrap();
        let hs = kappa_hermitian(&scaled, real0, tau);
        let gs = kappa_nonhermitian(&scaled, lambda0, tau);
        for i in 0..r {
            prop_assert!(rel_close(hs.kappas[i], scale * h.kappas[i], 1e-12));
            prop_assert!(rel_close(gs.kappas[i], scale * g.kappas[i], 1e-12));
        }
        for n1 in 1..=3usize {
            let d = kappa_defective(&s, lambda0, tau, n1);
            let ds = kappa_defective(&scaled, lambda0, tau, n1);
            prop_assert_eq!(d.regime, if n1 == 1 { Regime::General } else { Regime::Defective { n1 } });
            for i in 0..r {
                prop_assert!(rel_close(d.kappas[i], g.kappas[i].powf(1.0 / n1 as f64), 1e-12));
                prop_assert!(rel_close(ds.kappas[i], scale.powf(1.0 / n1 as f64) * d.kappas[i], 1e-12));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn kappa_spread_bounded_by_condition_of_b(seed: u64) {
        let (pair, es) = random_hermitian_pair(seed);
        let s = sigma_spectrum(&es.x1, &es.y1).unwrap();
        let sv = svd(pair.b()).unwrap().sigmas;
        let cond_b = sv[0] / sv[sv.len() - 1];
        for k in [kappa_hermitian(&s, es.lambda0, 1.0), kappa_nonhermitian(&s, es.lambda0, 1.0)] {
            let ratio = k.kappas[0] / k.kappas[es.r - 1];
            prop_assert!(ratio <= cond_b * (1.0 + 1e-10), "{} > {}", ratio, cond_b);
        }
    }

    #[test]
    fn sigma_spectrum_matches_direct_svd(seed: u64) {
        let (_, es) = random_nonhermitian_pair(seed);
        let fast = sigma_spectrum(&es.x1, &es.y1).unwrap();
        let direct = common::direct_sigmas(&es.x1, &es.y1);
        for (a, b) in fast.as_slice().iter().zip(&direct) {
            prop_assert!((a - b).abs() <= 1e-12 * direct[0]);
        }
    }

    #[test]
    fn first_order_spectrum_equivalences(seed: u64, hermitian: bool) {
        let (_, es) = if hermitian { random_hermitian_pair(seed) } else { random_nonhermitian_pair(seed) };
        let n = es.x1.rows();
        let mut rng = seeded_rng(seed ^ 0xabcdef);
        let (e, f) = random_perturbation_with(n, Structure::General, Field::Complex, 0.7, &mut rng).unwrap();
        let mu = first_order_eigs(&es, &e, &f).unwrap();
        let g = &e - &f.scale(es.lambda0);

        // Sigma V^H G U with X1 Y1^H = U Sigma V^H
        let p = svd(&(&es.x1 * &es.y1.adjoint())).unwrap();
        let r = es.r;
        let u = p.u.select_columns(&(0..r).collect::<Vec<_>>());
        let v = p.v.select_columns(&(0..r).collect::<Vec<_>>());
        let small = &(&DenseMatrix::from_real_diag(&p.sigmas[..r]) * &v.adjoint()) * &(&g * &u);
        let via_svd = general_eig(&small).unwrap();

        // nonzero eigenvalues of G X1 Y1^H
        let mut big = general_eig(&(&g * &(&es.x1 * &es.y1.adjoint()))).unwrap();
        big.truncate(r);

        let scale = p.sigmas[0] * g.frobenius_norm();
        prop_assert!(multiset_distance(&mu, &via_svd) <= 1e-10 * scale);
        prop_assert!(multiset_distance(&mu, &big) <= 1e-10 * scale);
    }

    #[test]
    fn worst_cases_attain_kappa(seed: u64, hermitian: bool, tau in 0.0f64..2.0) {
        let (pair, es) = if hermitian { random_hermitian_pair(seed) } else { random_nonhermitian_pair(seed) };
        let s = sigma_spectrum(&es.x1, &es.y1).unwrap();
        let structured = kappa_hermitian(&s, es.lambda0, tau);
        let general = kappa_nonhermitian(&s, es.lambda0, tau);
        for i in 1..=es.r {
            let (e, f) = worst_case_nonhermitian(&es, i, tau).unwrap();
            prop_assert!(rel_close(spectral_norm(&e).unwrap(), 1.0, 1e-12));
            prop_assert!(spectral_norm(&f).unwrap() <= tau * (1.0 + 1e-12));
            let m = sorted_magnitudes(&first_order_eigs(&es, &e, &f).unwrap());
            prop_assert!(rel_close(m[i - 1], general.kappas[i - 1], 1e-10), "i={} {:?} vs {:?}", i, m, general.kappas);
            if hermitian {
                prop_assert!(pair.is_hermitian_definite());
                let (e, f) = worst_case_hermitian(&es, i, tau).unwrap();
                prop_assert!(e == e.adjoint() && f == f.adjoint());
                prop_assert!(rel_close(spectral_norm(&e).unwrap(), 1.0, 1e-12));
                let m = sorted_magnitudes(&first_order_eigs(&es, &e, &f).unwrap());
                prop_assert!(rel_close(m[i - 1], structured.kappas[i - 1], 1e-10), "i={} {:?} vs {:?}", i, m, structured.kappas);
            }
        }
    }
}

#[test]
fn worst_cases_attain_named_pair_values() {
    for (name, pair, es) in example_pairs() {
        let s = sigma_spectrum(&es.x1, &es.y1).unwrap();
        let tau = 1.0;
        let mut cases = vec![(kappa_nonhermitian(&s, es.lambda0, tau), false)];
        if pair.is_hermitian_definite() {
            cases.push((kappa_hermitian(&s, es.lambda0, tau), true));
        }
        for (k, structured) in cases {
            for i in 1..=es.r {
                let (e, f) = if structured {
                    worst_case_hermitian(&es, i, tau).unwrap()
                } else {
                    worst_case_nonhermitian(&es, i, tau).unwrap()
                };
                let m = sorted_magnitudes(&first_order_eigs(&es, &e, &f).unwrap());
                assert!(rel_close(m[i - 1], k.kappas[i - 1], 1e-10), "{name} i={i}: {m:?} vs {:?}", k.kappas);
            }
        }
    }
}

#[test]
fn sampled_supremum_never_exceeded() {
    let draws = 2000;
    for (name, pair, es) in example_pairs() {
        let s = sigma_spectrum(&es.x1, &es.y1).unwrap();
        let n = pair.n();
        let tau = 1.0;
        let mut structures = vec![(Structure::General, kappa_nonhermitian(&s, es.lambda0, tau))];
        if pair.is_hermitian_definite() {
            structures.push((Structure::Hermitian, kappa_hermitian(&s, es.lambda0, tau)));
        }
        for (structure, k) in structures {
            for field in [Field::Real, Field::Complex] {
                let mut rng = seeded_rng(31);
                let mut worst = 0.0f64;
                for _ in 0..draws {
                    let shrink: f64 = rng.random_range(0.5..=1.0);
                    let (e, f) = random_perturbation_with(n, structure, field, tau, &mut rng).unwrap();
                    let m = sorted_magnitudes(&first_order_eigs(&es, &e.scale_real(shrink), &f).unwrap());
                    for i in 0..es.r {
                        worst = worst.max(m[i] / k.kappas[i]);
                    }
                }
                assert!(worst <= 1.0 + 1e-10, "{name} {structure:?} {field:?}: ratio {worst}");
            }
        }
    }
}
