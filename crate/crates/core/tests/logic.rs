mod common;

use proptest::prelude::*;
use wstar::algebra::{random_faithful_space, sample, SampleKind};
use wstar::logic::{
    beta_lower, center_dimension, center_expectation, central_witness, chi_factor_estimate, herrero_szarek_witness,
    phi_t_estimate, rank_tuples, search_projections, theta_integrand, xi, EstimateKind, OptConfig, Sense, XiVariant,
};
use wstar::modular::in_s1;
use wstar::{BlockMatrix, Error, WStarSpace};

fn small(seed: u64) -> OptConfig {
    OptConfig { sample_budget: 200, restarts: 2, ascent_steps: 4, seed, ..OptConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(24) })]

    #[test]
    fn larger_budget_never_lowers_a_leaf_estimate(n in 2usize..=3, seed in any::<u64>()) {
        let space = random_faithful_space(&[n], seed).unwrap();
        let x = sample(&space, &SampleKind::Element, seed ^ 9).unwrap();
        let lo = beta_lower(&space, &x, &small(seed));
        let hi = beta_lower(&space, &x, &OptConfig { sample_budget: 800, ..small(seed) });
        prop_assert!(hi.value >= lo.value, "{} < {}", hi.value, lo.value);
        let y = lo.witness("y").unwrap();
        prop_assert!(in_s1(&space, y, 1e-9).unwrap());
        let realised = space.sharp_norm(&x.commutator(y));
        prop_assert_eq!(realised.to_bits(), lo.value.to_bits());
    }

    #[test]
    fn center_expectation_preserves_the_state(dims in prop::collection::vec(1usize..=3, 1..=3), seed in any::<u64>()) {
        let space = random_faithful_space(&dims, seed).unwrap();
        let x = sample(&space, &SampleKind::Element, seed ^ 1).unwrap();
        let e = center_expectation(&space, &x).unwrap();
        prop_assert!((space.state(&e) - space.state(&x)).norm() <= 1e-12);
        prop_assert!(center_expectation(&space, &e).unwrap().max_abs_diff(&e) <= 1e-12);
        prop_assert_eq!(center_dimension(&dims), dims.len());
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let space = random_faithful_space(&[3], 5).unwrap();
    let x = sample(&space, &SampleKind::Element, 6).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| beta_lower(&space, &x, &small(3)))
    };
    let (a, b) = (run(1), run(3));
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.witness("y"), b.witness("y"));
}

#[test]
fn central_projection_certifies_non_factor() {
    let space = random_faithful_space(&[2, 1, 3], 8).unwrap();
    let w = central_witness(&space).unwrap();
    let est = chi_factor_estimate(&space, &small(0));
    assert_eq!(est.kind, EstimateKind::CertifiedLower);
    let weight = space.state(&w.projection).re;
    assert!((est.value - (weight - weight * weight).sqrt()).abs() < 1e-12);
    assert!((xi(&space, &w.projection, XiVariant::Centered) - est.value).abs() < 1e-15);
    // a central projection commutes with everything, so the θ integrand sees its full size
    let one = space.identity();
    let v = theta_integrand(&space, &space.identity(), &w.projection);
    let size = space.sharp_norm(&w.projection).min(space.sharp_norm(&(&one - &w.projection)));
    assert!((v - size).abs() < 1e-15);
    assert!(central_witness(&WStarSpace::tracial(&[3])).is_none());
}

#[test]
fn phi_t_vanishes_exactly_on_trivial_times() {
    let space = WStarSpace::diagonal(&[1.0 / 3.0, 2.0 / 3.0]).unwrap();
    let period = std::f64::consts::TAU / 2f64.ln();
    let e = phi_t_estimate(&space, period, &small(0));
    assert_eq!(e.value, 0.0);
    assert_eq!(e.kind, EstimateKind::Exact);
    let e = phi_t_estimate(&space, period / 2.0, &small(0));
    assert!(e.value > 0.1, "{}", e.value);
}

#[test]
fn jordan_block_has_trivial_idempotent_commutant() {
    for n in [2, 3, 5, 8] {
        herrero_szarek_witness(n).unwrap();
    }
    assert_eq!(herrero_szarek_witness(1), Err(Error::BadDimension(1)));
    assert_eq!(herrero_szarek_witness(33), Err(Error::BadDimension(33)));
}

#[test]
fn projection_search_covers_every_rank() {
    assert_eq!(rank_tuples(&[2, 1]).len(), 6);
    let space = WStarSpace::tracial(&[3]);
    let f = |p: &BlockMatrix| p.trace().re;
    let r = search_projections(&space, &f, &small(1), 1, Sense::Sup, false);
    assert!((r.value - 3.0).abs() < 1e-12);
    let r = search_projections(&space, &f, &small(1), 1, Sense::Inf, false);
    assert!(r.value.abs() < 1e-12);
    assert!(r.witness.is_projection(1e-10));
}
