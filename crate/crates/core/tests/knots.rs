use hfb_core::config::RunConfig;
use hfb_core::knots::{invariants, presentation, InvariantPackage, KnotSpec};
use hfb_core::linalg::rat_int;
use hfb_core::Error;
use proptest::prelude::*;

fn run(k: &KnotSpec) -> InvariantPackage {
    let cfg = RunConfig { verify: true, ..Default::default() };
    let p = invariants(k, &cfg).unwrap();
    assert!(p.checks_passed(), "{p}");
    p
}

fn parse(s: &str) -> KnotSpec {
    s.parse().unwrap()
}

fn vanishes(p: &InvariantPackage) -> bool {
    p.hfb_red_conn.torsion.is_empty() && p.omega == 0
}

#[test]
fn torus_and_two_bridge_sums_have_no_reduced_part() {
    for s in [
        "montesinos(0;3/7)",
        "montesinos(0;5/13)",
        "sum(torus(2,5),montesinos(0;3/7))",
        "sum(torus(3,4),mirror(torus(2,7)))",
        "sum(torus(3,5),torus(3,5),mirror(montesinos(0;5/13)))",
    ] {
        let p = run(&parse(s));
        assert!(vanishes(&p), "{p}");
        assert_eq!(p.delta_bar, p.delta_under, "{s}");
    }
}

#[test]
fn two_bridge_determinant_is_the_numerator() {
    // the tangle 1/a is a twist region, so n/d closes up to a cover of order n
    for (n, d) in [(3, 7), (5, 13), (7, 9)] {
        let p = run(&parse(&format!("montesinos(0;{n}/{d})")));
        assert_eq!(p.det, n.into());
    }
}

#[test]
fn even_and_odd_torus_knots_agree_on_symmetry() {
    // both constructions give L-space or rational covers here
    for s in ["torus(2,3)", "torus(2,9)", "torus(4,7)", "torus(3,8)", "mirror(torus(4,5))"] {
        let p = run(&parse(s));
        assert!(vanishes(&p), "{p}");
    }
}

#[test]
fn definiteness_failure_is_reported() {
    // the Euler number vanishes, so the cover has b_1 > 0 and neither side is definite
    let k = parse("montesinos(0;1/3,-1/3,1/5,-1/5)");
    assert_eq!(presentation(&k).unwrap_err(), Error::NotNegativeDefinite);
    assert!(matches!(presentation(&parse("montesinos(0;2/9)")), Err(Error::InvalidKnot(_))));
    assert!(matches!("pretzel(3)".parse::<KnotSpec>(), Err(Error::InvalidKnot(_))));
}

#[test]
fn sum_with_the_mirror_is_slice_like() {
    for s in ["pretzel(11,-5,9)", "torus(3,7)", "pretzel(2,-3,-9)"] {
        let p = run(&parse(&format!("sum({s},mirror({s}))")));
        assert_eq!(p.hfb_conn.towers, vec![rat_int(-2)], "{s}");
        assert!(vanishes(&p), "{p}");
    }
}

fn odd_pretzel() -> impl Strategy<Value = KnotSpec> {
    let odd = prop_oneof![(-5i64..=-1).prop_map(|a| 2 * a - 1), (1i64..=5).prop_map(|a| 2 * a + 1)];
    proptest::collection::vec(odd, 3).prop_map(KnotSpec::Pretzel)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pretzel_invariants_are_consistent(k in odd_pretzel()) {
        let Ok(p) = invariants(&k, &RunConfig { verify: true, ..Default::default() }) else {
            // only a vanishing Euler number is allowed to fail
            prop_assert!(matches!(invariants(&k, &RunConfig::default()), Err(Error::NotNegativeDefinite)));
            return Ok(());
        };
        prop_assert!(p.checks_passed(), "{}", p);
        let m = invariants(&KnotSpec::Mirror(Box::new(k.clone())), &RunConfig::default()).unwrap();
        prop_assert_eq!(&p.delta_under, &-m.delta_bar.clone());
        prop_assert_eq!(&p.delta, &-m.delta.clone());
        prop_assert_eq!(p.omega, m.omega);
        prop_assert_eq!(&p.det, &m.det);
    }

    #[test]
    fn spec_text_round_trips_through_the_pipeline(k in odd_pretzel()) {
        let again: KnotSpec = k.to_string().parse().unwrap();
        let cfg = RunConfig::default();
        match (invariants(&k, &cfg), invariants(&again, &cfg)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            _ => prop_assert!(false, "one side failed"),
        }
    }
}
