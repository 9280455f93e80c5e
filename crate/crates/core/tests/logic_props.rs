mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use sli::logic::{check_models, Formula, Quantifier};
use sli::parser::{parse_problem, print_problem};

fn closed(rng: &mut StdRng, s: &sli::logic::Structure, depth: usize) -> Formula {
    let f = common::random_world_formula(rng, s, depth);
    close(rng, f)
}

fn close(rng: &mut StdRng, mut f: Formula) -> Formula {
    for v in f.free_variables().into_iter().rev() {
        let q = if rng.gen() {
            Quantifier::ForAll
        } else {
            Quantifier::Exists
        };
        f = Formula::quantified(q, v, f);
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn negation_flips_truth(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let s = common::random_world(&mut rng, 5);
        let f = closed(&mut rng, &s, 4);
        let t = check_models(&s, &f).unwrap();
        prop_assert_eq!(check_models(&s, &Formula::not(f.clone())).unwrap(), !t);
        prop_assert_eq!(t, common::truth(&s, &f, &mut Vec::new()));
    }

    #[test]
    fn implication_is_an_abbreviation(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let s = common::random_world(&mut rng, 4);
        let a = closed(&mut rng, &s, 3);
        let b = closed(&mut rng, &s, 3);
        let lhs = check_models(&s, &Formula::implies(a.clone(), b.clone())).unwrap();
        let rhs = check_models(&s, &Formula::or(Formula::not(a.clone()), b.clone())).unwrap();
        prop_assert_eq!(lhs, rhs);
        let e = Formula::equiv(a.clone(), b.clone());
        prop_assert_eq!(check_models(&s, &e).unwrap(), check_models(&s, &e.desugar()).unwrap());
    }

    #[test]
    fn desugared_formulas_use_core_connectives(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let s = common::random_world(&mut rng, 3);
        let f = common::random_world_formula(&mut rng, &s, 4);
        prop_assert!(f.desugar().is_desugared());
        prop_assert_eq!(f.desugar().free_variables(), f.free_variables());
    }
}

#[test]
fn element_order_is_stable_across_reads() {
    let text = "vocabulary { type T := {c, a, b}. pred p(T). } structure { p := {b, c}. }";
    let p = parse_problem(text).unwrap();
    let d = p.structure.domain("T").unwrap();
    let names: Vec<_> = (0..3).map(|i| d.element_name(i).to_string()).collect();
    assert_eq!(names, ["c", "a", "b"]);
    let again = parse_problem(&print_problem(&p)).unwrap();
    let d2 = again.structure.domain("T").unwrap();
    assert_eq!(d.elements(), d2.elements());
    assert_eq!(
        p.structure.relation("p").unwrap().tuples().collect::<Vec<_>>(),
        vec![vec![0], vec![2]]
    );
}
