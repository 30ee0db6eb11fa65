mod common;

use common::gen_real;
use proptest::prelude::*;
use wstar::algebra::random_faithful_space;
use wstar::dsl::{eval_ast, library, parse, Formula, Sort};
use wstar::logic::{chi_residual_search, EstimateKind, OptConfig};
use wstar::rng::rng_from_seed;
use wstar::{Error, WStarSpace};

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(1000) })]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let f = gen_real(&mut rng_from_seed(seed), &mut Vec::new(), 6);
        let text = f.to_string();
        prop_assert_eq!(parse(&text).unwrap(), f);
        // printing is a fixed point after one round
        prop_assert_eq!(parse(&text).unwrap().to_string(), text);
    }

    #[test]
    fn generated_formulas_are_sentences(seed in any::<u64>()) {
        let f = gen_real(&mut rng_from_seed(seed), &mut Vec::new(), 5);
        prop_assert_eq!(f.sort().unwrap(), Sort::Real);
    }

    #[test]
    fn parser_never_panics(text in "[a-z0-9 .,:()\\[\\]*+@-]{0,40}") {
        if let Err(e) = parse(&text) {
            prop_assert!(e.offset <= text.len());
        }
    }
}

#[test]
fn sort_mutations_are_rejected() {
    for (text, unbound) in [
        ("sharp(2)", false),
        ("sup x:S1. sharp(x) + x", false),
        ("abs(one)", false),
        ("max(1, one)", false),
        ("sup x:S1. x", false),
        ("sup x:S1. sup x:Proj. sharp(x)", false),
        ("sharp(y)", true),
        ("sup x:S1. sharp(y)", true),
    ] {
        let f = parse(text).unwrap();
        match f.check_sentence() {
            Err(Error::UnboundVariable(_)) => assert!(unbound, "{text}"),
            Err(Error::SortError(_)) => assert!(!unbound, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
    assert!(parse("one + one").unwrap().check_sentence().is_err());
}

#[test]
fn parse_errors_point_at_the_token() {
    let e = parse("sharp(x) + * 2").unwrap_err();
    assert_eq!(e.offset, 11);
    let e = parse("sup x:Ball. 1").unwrap_err();
    assert_eq!(e.offset, 6);
    assert_eq!(e.found, "Ball");
    let e = parse("sigma[t](x)").unwrap_err();
    assert_eq!(e.offset, 6);
}

#[test]
fn library_chi_matches_dedicated_search_bitwise() {
    let cfg = OptConfig { sample_budget: 150, restarts: 2, ascent_steps: 2, seed: 99, ..OptConfig::default() };
    for (i, n) in [2usize, 3].iter().enumerate() {
        let space = random_faithful_space(&[*n], 50 + i as u64).unwrap();
        let a = eval_ast(&parse("@chi_factor").unwrap(), &space, &cfg).unwrap();
        let b = chi_residual_search(&space, &cfg);
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.witness("x"), b.witness("x"));
        assert_eq!(a.evaluations, b.evaluations);
        assert_eq!(a.kind, EstimateKind::HeuristicResidual);
    }
}

#[test]
fn binder_free_sentences_evaluate_exactly() {
    let s = WStarSpace::diagonal(&[0.25, 0.75]).unwrap();
    let e = eval_ast(&parse("re(state(sigma[3](one))) + sharp(2 * one)").unwrap(), &s, &OptConfig::default()).unwrap();
    assert_eq!(e.kind, EstimateKind::Exact);
    assert!((e.value - 3.0).abs() < 1e-12);
    let phi = library::phi_t(0.0);
    assert!(matches!(phi, Formula::Bind { .. }));
}
