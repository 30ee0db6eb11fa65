mod common;

use proptest::prelude::*;
use wstar::logic::{phi_t_estimate, EstimateKind, OptConfig};
use wstar::powers::{
    classify_sequence, classify_type, lattice_period, powers_stage, powers_stage_capped, rational_approximation,
    tinv_modulus, twisted_decay, twisted_value_direct, PowersSpec, ScanConfig, TypeTag,
};
use wstar::Error;

fn oracle_modulus(eigs: &[f64], t: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for &e in eigs {
        let mag = e;
        let arg = t * e.ln();
        re += mag * arg.cos();
        im += mag * arg.sin();
    }
    re.hypot(im)
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(128) })]

    #[test]
    fn modulus_is_at_most_one_and_periodic(lambda in 0.05f64..0.95, t in -50.0f64..50.0) {
        let eigs = PowersSpec::Lambda { lambda }.eigenvalues();
        let m = tinv_modulus(&eigs, t).unwrap();
        prop_assert!(m <= 1.0 + 1e-15);
        prop_assert!((m - oracle_modulus(&eigs, t)).abs() < 1e-13);
        let p = lattice_period(lambda).unwrap();
        prop_assert!((tinv_modulus(&eigs, t + p).unwrap() - m).abs() < 1e-12);
        prop_assert!((tinv_modulus(&eigs, p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rational_approximation_is_close(p in 1i64..50, q in 1i64..50) {
        let r = p as f64 / q as f64;
        let (a, b) = rational_approximation(r).unwrap();
        prop_assert!(b > 0);
        prop_assert!((a as f64 / b as f64 - r).abs() < 1e-9);
    }
}

#[test]
fn classifies_powers_states() {
    let scan = ScanConfig { t_max: 100.0, steps: 100_000 };
    for lambda in [0.3, 0.5, 0.8] {
        let v = classify_type(&PowersSpec::Lambda { lambda }.eigenvalues(), &scan).unwrap();
        match v.tag {
            TypeTag::IIILambda { lambda: got } => assert!((got - lambda).abs() < 1e-6, "{lambda}: {got}"),
            other => panic!("{lambda}: {other:?}"),
        }
        let p = lattice_period(lambda).unwrap();
        for (k, t) in v.evidence.iter().enumerate() {
            assert!((t - k as f64 * p).abs() < 1e-6, "{lambda}: {t}");
        }
    }
    let v = classify_type(&[0.5, 0.5], &scan).unwrap();
    assert_eq!(v.tag, TypeTag::TracialII1);
    let v = classify_type(&PowersSpec::Infinity { lambda: 0.5, mu: 1.0 / 3.0 }.eigenvalues(), &scan).unwrap();
    assert_eq!(v.tag, TypeTag::III1);
}

#[test]
fn commensurable_pairs_are_iii_lambda() {
    // ln(1/8) / ln(1/2) = 3: one lattice with generator 1/2
    let spec = PowersSpec::Infinity { lambda: 0.5, mu: 0.125 };
    let v = classify_type(&spec.eigenvalues(), &ScanConfig { t_max: 40.0, steps: 40_000 }).unwrap();
    match v.tag {
        TypeTag::IIILambda { lambda } => assert!((lambda - 0.5).abs() < 1e-6, "{lambda}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn varying_densities_are_undetermined() {
    let a = PowersSpec::Lambda { lambda: 0.5 }.eigenvalues();
    let b = PowersSpec::Lambda { lambda: 0.3 }.eigenvalues();
    let v = classify_sequence(&[a.clone(), b], &ScanConfig { t_max: 20.0, steps: 20_000 }).unwrap();
    assert!(matches!(v.tag, TypeTag::Undetermined { .. }));
    let v = classify_sequence(&[a.clone(), a], &ScanConfig { t_max: 20.0, steps: 20_000 }).unwrap();
    assert!(matches!(v.tag, TypeTag::IIILambda { .. }));
}

#[test]
fn coarse_scans_are_rejected() {
    let e = classify_type(&[0.4, 0.6], &ScanConfig { t_max: 10.0, steps: 10 }).unwrap_err();
    assert!(matches!(e, Error::ScanTooCoarse { .. }));
}

#[test]
fn phi_t_on_stages_sees_the_lattice() {
    let cfg = OptConfig { sample_budget: 300, restarts: 2, ascent_steps: 4, seed: 4, ..OptConfig::default() };
    for lambda in [0.3, 0.5] {
        let p = lattice_period(lambda).unwrap();
        for n in 1..=3 {
            let space = powers_stage(&PowersSpec::Lambda { lambda }, n).unwrap();
            let e = phi_t_estimate(&space, 2.0 * p, &cfg);
            assert_eq!((e.value, e.kind), (0.0, EstimateKind::Exact), "{lambda} {n}");
            let e = phi_t_estimate(&space, p / 2.0, &cfg);
            assert!(e.value > 0.1, "{lambda} {n}: {}", e.value);
        }
    }
}

#[test]
fn stage_spectrum_is_the_product_of_factor_spectra() {
    let spec = PowersSpec::Lambda { lambda: 0.4 };
    let f = spec.eigenvalues();
    let mut expect = vec![1.0];
    for _ in 0..4 {
        expect = expect.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
    }
    expect.sort_by(f64::total_cmp);
    let mut got = powers_stage(&spec, 4).unwrap().eigenvalues();
    got.sort_by(f64::total_cmp);
    assert_eq!(got.len(), 16);
    for (a, b) in got.iter().zip(&expect) {
        assert!((a - b).abs() < 1e-15);
    }
    assert!(matches!(powers_stage_capped(&spec, 13, 4096), Err(Error::DimensionCap { .. })));
}

#[test]
fn twisted_decay_agrees_with_explicit_stages() {
    let spec = PowersSpec::Lambda { lambda: 0.5 };
    let curve = twisted_decay(&spec, 0.9, 1.7, 40, 256, 1e-3).unwrap();
    let mut direct = 0;
    for (i, d) in curve.direct_values.iter().enumerate() {
        if let Some(d) = d {
            assert!((d - curve.values[i]).abs() < 1e-12 * curve.values[i].max(1e-300).max(1.0));
            direct += 1;
        }
    }
    assert_eq!(direct, 8);
    let explicit = twisted_value_direct(&spec, 0.9, 1.7, 3, 256).unwrap();
    assert!((explicit - (0.9 * oracle_modulus(&spec.eigenvalues(), 1.7)).powi(3)).abs() < 1e-14);
    assert!(curve.criterion_decays);
    assert!(curve.decays_to_zero);
    assert_eq!(curve.sharp_values[1], 0.9f64.powi(2));
}
