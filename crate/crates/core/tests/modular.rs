mod common;

use std::f64::consts::TAU;

use common::{c, dense, density, largest_singular, pos_power, superop};
use num_complex::Complex64;
use proptest::prelude::*;
use wstar::algebra::{random_faithful_space, rotated_space, sample, SampleKind};
use wstar::modular::{
    bounded_constant, delta_spectrum, in_s1, kms_check, project_to_s1, right_action_norm, sigma_t, spectral_truncate,
    SigmaMethod,
};
use wstar::powers::{powers_stage, PowersSpec};
use wstar::{BlockMatrix, CMatrix, WStarSpace};

fn dedup(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<f64> = Vec::new();
    for x in v {
        if out.last().is_none_or(|&l| (x - l).abs() > 1e-10 * x.abs().max(1.0)) {
            out.push(x);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(48) })]

    #[test]
    fn sigma_is_a_state_preserving_automorphism(n in 1usize..=4, seed in any::<u64>(), s in -20.0f64..20.0, t in -20.0f64..20.0) {
        let space = random_faithful_space(&[n, 2], seed).unwrap();
        let x = sample(&space, &SampleKind::Element, seed ^ 1).unwrap();
        let y = sample(&space, &SampleKind::Element, seed ^ 2).unwrap();
        let sig = |z: &BlockMatrix, t: f64| sigma_t(&space, z, t, SigmaMethod::Coefficient).unwrap();
        prop_assert!(sig(&(&x * &y), t).max_abs_diff(&(&sig(&x, t) * &sig(&y, t))) <= 1e-10);
        prop_assert!(sig(&x.adjoint(), t).max_abs_diff(&sig(&x, t).adjoint()) <= 1e-10);
        prop_assert!(sig(&sig(&x, t), s).max_abs_diff(&sig(&x, s + t)) <= 1e-10);
        prop_assert!((space.state(&sig(&x, t)) - space.state(&x)).norm() <= 1e-12);
        prop_assert_eq!(sig(&x, 0.0), x);
    }

    #[test]
    fn delta_spectrum_matches_superoperator(n in 1usize..=5, seed in any::<u64>()) {
        let space = random_faithful_space(&[n], seed).unwrap();
        let a = density(&space);
        let ainv = pos_power(&a, -1.0);
        // v ↦ a v a^{-1} is self-adjoint for the Hilbert–Schmidt inner product
        let delta = superop(n, |v| &a * v * &ainv);
        let h = (&delta + delta.adjoint()) * c(0.5);
        let oracle = dedup(h.symmetric_eigen().eigenvalues.iter().cloned().collect());
        let got = dedup(delta_spectrum(&space));
        prop_assert_eq!(got.len(), oracle.len());
        for (g, o) in got.iter().zip(&oracle) {
            prop_assert!((g - o).abs() <= 1e-10 * o.max(1.0), "{} vs {}", g, o);
        }
    }

    #[test]
    fn kms_holds_on_random_triples(n in 1usize..=4, seed in any::<u64>(), t in -10.0f64..10.0) {
        let space = random_faithful_space(&[n, 1], seed).unwrap();
        let x = sample(&space, &SampleKind::Element, seed ^ 3).unwrap();
        let y = sample(&space, &SampleKind::Element, seed ^ 4).unwrap();
        let r = kms_check(&space, &x, &y, t, 1e-10).unwrap();
        prop_assert!(r.passed, "{:?}", r);
    }

    #[test]
    fn bounded_constant_matches_superoperators(n in 1usize..=4, seed in any::<u64>()) {
        let space = random_faithful_space(&[n], seed).unwrap();
        let x = sample(&space, &SampleKind::Element, seed ^ 5).unwrap();
        let a = density(&space);
        let (h, hinv) = (pos_power(&a, 0.5), pos_power(&a, -0.5));
        let xd = dense(&x);
        let right = largest_singular(&superop(n, |v| v * &hinv * &xd * &h));
        let right_adj = largest_singular(&superop(n, |v| v * &hinv * xd.adjoint() * &h));
        let left = largest_singular(&superop(n, |v| &xd * v));
        let r = bounded_constant(&space, &x).unwrap();
        prop_assert!((r.op_norm - left).abs() <= 1e-9);
        prop_assert!((r.right_norm - right).abs() <= 1e-9);
        prop_assert!((r.right_norm_adjoint - right_adj).abs() <= 1e-9);
        let p = project_to_s1(&space, &x.scale_real(3.0)).unwrap();
        prop_assert!(in_s1(&space, &p, 1e-12).unwrap());
    }
}

#[test]
fn powers_delta_spectrum() {
    for lambda in [0.3, 0.5, 0.8] {
        let spec = PowersSpec::Lambda { lambda };
        let got = dedup(delta_spectrum(&spec.space().unwrap()));
        let want = [lambda, 1.0, 1.0 / lambda];
        for (g, w) in got.iter().zip(dedup(want.to_vec()).iter()) {
            assert!((g - w).abs() < 1e-12);
        }
        for n in 1..=4 {
            let got = dedup(delta_spectrum(&powers_stage(&spec, n).unwrap()));
            let want = dedup((-(n as i32)..=n as i32).map(|k| lambda.powi(k)).collect());
            assert_eq!(got.len(), 2 * n + 1);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() <= 1e-10 * w);
            }
        }
    }
}

#[test]
fn non_commuting_projection_is_not_right_bounded_by_one() {
    // a = diag(1/3, 2/3) and p the projection onto (1, 1)/√2
    let space = WStarSpace::diagonal(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
    let p = BlockMatrix::from_block(CMatrix::from_element(2, 2, c(0.5)));
    let norm = right_action_norm(&space, &p).unwrap();
    assert!((norm - 3.0 / (2.0 * 2f64.sqrt())).abs() < 1e-12, "{norm}");
    let q = space.block_projection(0);
    assert!(in_s1(&space, &q, 1e-12).unwrap());
}

#[test]
fn large_times_use_reduced_phases() {
    let space = rotated_space(&[0.2, 0.3, 0.5], 3).unwrap();
    let x = sample(&space, &SampleKind::Element, 1).unwrap();
    let t = 1e6 * TAU;
    let a = sigma_t(&space, &x, t, SigmaMethod::Coefficient).unwrap();
    let u = space.complex_power(Complex64::new(0.0, t));
    let b = &(&u * &x) * &u.adjoint();
    assert!(a.max_abs_diff(&b) < 1e-8);
}

#[test]
fn spectral_truncation_keeps_low_frequencies() {
    let space = WStarSpace::diagonal(&[0.2, 0.8]).unwrap();
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 1)] = c(1.0);
    m[(0, 0)] = c(2.0);
    let x = BlockMatrix::from_block(m);
    let low = spectral_truncate(&space, &x, 0.5).unwrap();
    assert_eq!(low.block(0)[(0, 1)], c(0.0));
    assert_eq!(low.block(0)[(0, 0)], c(2.0));
    let all = spectral_truncate(&space, &x, 10.0).unwrap();
    assert_eq!(all, x);
}
