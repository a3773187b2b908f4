mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use famverify::cli::{parse_equation_file, write_equation_file};
use famverify::diagram::{EquationFamily, Language};
use famverify::interp::{degree_bound, diagram_degree, interpret_family, ContractionOrder, InterpretOptions};
use famverify::phasepoly::{Coeff, DegreePair, Exponents, LaurentPoly};
use famverify::planner::{build_plan, PlanSettings};

fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-3i64..=3, -3i32..=3, -2i32..=2), 0..5).prop_map(|terms| {
        let mut p = LaurentPoly::zero();
        for (c, i, j) in terms {
            p = &p + &LaurentPoly::monomial(Coeff::from_i64(c), Exponents::from_pairs([("a", i), ("b", j)]));
        }
        p
    })
}

fn le(a: DegreePair, b: DegreePair) -> bool {
    a.le(&b)
}

fn langs() -> impl Strategy<Value = Language> {
    prop_oneof![Just(Language::Zx), Just(Language::Zh), Just(Language::Zw)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(p in poly(), q in poly(), r in poly()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert_eq!(&p - &p, LaurentPoly::zero());
        prop_assert_eq!(&p * &LaurentPoly::one(), p.clone());
    }

    #[test]
    fn degrees_are_subadditive(p in poly(), q in poly()) {
        for v in ["a", "b"] {
            prop_assert!(le((&p * &q).degree(v), p.degree(v) + q.degree(v)));
            prop_assert!(le((&p + &q).degree(v), p.degree(v).join(q.degree(v))));
        }
    }

    #[test]
    fn quotient_is_a_ring_map(p in poly(), q in poly(), g in 1u32..9) {
        let lhs = (&p * &q).quotient_reduce("a", g);
        let rhs = (&p.quotient_reduce("a", g) * &q.quotient_reduce("a", g)).quotient_reduce("a", g);
        prop_assert_eq!(lhs, rhs);
        let d = p.quotient_reduce("a", g).degree("a");
        prop_assert!(d.neg.or_zero() == 0 && d.pos.or_zero() < g);
    }

    #[test]
    fn evaluation_commutes_with_products(p in poly(), q in poly(), x in 1i64..5, y in -4i64..-1) {
        let env: BTreeMap<String, Coeff> = [("a".to_string(), Coeff::from_i64(x)), ("b".to_string(), Coeff::from_i64(y))].into();
        let pq = (&p * &q).eval(&env).unwrap();
        prop_assert_eq!(pq, &p.eval(&env).unwrap() * &q.eval(&env).unwrap());
        let s = (&p + &q).eval(&env).unwrap();
        prop_assert_eq!(s, &p.eval(&env).unwrap() + &q.eval(&env).unwrap());
    }

    #[test]
    fn interpretation_is_monoidal(seed in any::<u64>(), lang in langs()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_diagram(&mut rng, lang, 2, 1, 1, &["a"], 2);
        let b = random_diagram(&mut rng, lang, 2, 1, 2, &["a"], 2);
        let o = InterpretOptions::default();
        let ma = interpret_family(&a, &o).unwrap();
        let mb = interpret_family(&b, &o).unwrap();
        let t = interpret_family(&a.tensor(&b).unwrap(), &o).unwrap();
        prop_assert!(t.approx_eq(&ma.kron(&mb), 1e-9));
        let c = interpret_family(&a.compose(&b).unwrap(), &o).unwrap();
        prop_assert!(c.approx_eq(&mb.mul(&ma).unwrap(), 1e-9));
    }

    #[test]
    fn exact_degree_never_exceeds_bound(seed in any::<u64>(), lang in langs()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_diagram(&mut rng, lang, 4, 1, 1, &["a", "b"], 3);
        for v in ["a", "b"] {
            let exact = diagram_degree(&d, v, &InterpretOptions::default()).unwrap();
            prop_assert!(exact.exact);
            prop_assert!(le(exact.degree, degree_bound(&d, v, None)));
        }
    }

    #[test]
    fn contraction_order_does_not_matter(seed in any::<u64>(), lang in langs()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_diagram(&mut rng, lang, 5, 2, 1, &["a"], 2);
        let greedy = interpret_family(&d, &InterpretOptions::default()).unwrap();
        let seq = interpret_family(&d, &InterpretOptions { order: ContractionOrder::Sequential, ..Default::default() }).unwrap();
        prop_assert!(greedy.approx_eq(&seq, 1e-9));
    }

    #[test]
    fn instantiation_grows_linearly(k in 0usize..9) {
        let fam = fixture("bang_bound.eq");
        let base = fam.instantiate_bangbox("d", 0).unwrap();
        let one = fam.instantiate_bangbox("d", 1).unwrap();
        let f = fam.instantiate_bangbox("d", k).unwrap();
        for (got, b, o) in [(&f.lhs, &base.lhs, &one.lhs), (&f.rhs, &base.rhs, &one.rhs)] {
            prop_assert_eq!(got.node_count(), b.node_count() + k * (o.node_count() - b.node_count()));
            prop_assert_eq!(got.edges().len(), b.edges().len() + k * (o.edges().len() - b.edges().len()));
            prop_assert!(!got.has_bangboxes());
        }
    }

    #[test]
    fn renaming_variables_keeps_the_plan(suffix in "[a-z]{1,4}") {
        let text = std::fs::read_to_string(fixture_path("spider_law.eq")).unwrap();
        let renamed = text.replace("a1", &format!("x{suffix}")).replace("a2", &format!("y{suffix}"));
        let p = build_plan(&parse_equation_file(&text).unwrap(), &PlanSettings::default()).unwrap();
        let q = build_plan(&parse_equation_file(&renamed).unwrap(), &PlanSettings::default()).unwrap();
        prop_assert_eq!(p.len(), q.len());
        prop_assert_eq!(p.grids.values().map(|g| g.len()).collect::<Vec<_>>(), q.grids.values().map(|g| g.len()).collect::<Vec<_>>());
    }

    #[test]
    fn equation_files_round_trip(seed in any::<u64>(), lang in langs()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lhs = random_diagram(&mut rng, lang, 3, 1, 2, &["a", "b"], 2);
        let rhs = random_diagram(&mut rng, lang, 2, 1, 2, &["a"], 2);
        let fam = EquationFamily::new(lhs, rhs);
        let text = write_equation_file(&fam);
        let back = parse_equation_file(&text).unwrap();
        prop_assert_eq!(&back, &fam, "{}", text);
    }
}
