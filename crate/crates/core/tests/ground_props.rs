mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use sli::ground::{ground_problem, GroundOptions, Grounding, Strategy};
use sli::logic::Variable;
use sli::parser::{parse_problem, Problem};
use sli::satset::eval_satset;

fn problem(mx: &common::MxProblem) -> Problem {
    Problem {
        vocabulary: mx.s0.vocabulary().clone(),
        theory: mx.theory.clone(),
        structure: mx.s0.clone(),
    }
}

fn ground(p: &Problem, s: Strategy) -> Grounding {
    ground_problem(p, s, &GroundOptions::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn every_strategy_preserves_expansions(seed in any::<u64>()) {
        let mx = common::random_mx(&mut StdRng::seed_from_u64(seed));
        let p = problem(&mx);
        for strategy in Strategy::ALL {
            let g = ground(&p, strategy);
            for s1 in common::expansions(&mx) {
                let full = common::join(&mx.s0, &s1);
                let truth = mx.theory.iter().all(|f| common::truth(&full, f, &mut Vec::new()));
                let eval_in = if strategy == Strategy::NoReduce { &full } else { &s1 };
                prop_assert_eq!(g.theory.satisfied_by(eval_in), Some(truth), "{}", strategy);
            }
        }
    }

    #[test]
    fn vec_and_naive_emit_the_same_theory(seed in any::<u64>()) {
        let mx = common::random_mx(&mut StdRng::seed_from_u64(seed));
        let p = problem(&mx);
        let v = ground(&p, Strategy::Vec);
        let n = ground(&p, Strategy::Naive);
        prop_assert_eq!(&v.theory.assertions, &n.theory.assertions);
        prop_assert_eq!(v.theory.verdict, n.theory.verdict);
    }

    #[test]
    fn reduced_output_mentions_only_open_symbols(seed in any::<u64>()) {
        let mx = common::random_mx(&mut StdRng::seed_from_u64(seed));
        let p = problem(&mx);
        for strategy in [Strategy::Vec, Strategy::Naive] {
            for sym in ground(&p, strategy).theory.symbols() {
                prop_assert!(!mx.s0.is_interpreted(&sym), "{} mentions {}", strategy, sym);
            }
        }
    }

    #[test]
    fn instantiations_count_guard_satisfiers(seed in any::<u64>(), n in 1usize..=12, density in 0.0f64..=1.0) {
        let mut rng = StdRng::seed_from_u64(seed);
        let elems: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
        let mut pairs = Vec::new();
        for a in &elems {
            for b in &elems {
                if rng.gen_bool(density) {
                    pairs.push(format!("({a}, {b})"));
                }
            }
        }
        let text = format!(
            "vocabulary {{ type A := {{{}}}. pred r(A, A). pred u(A). pred v(A). }}
             theory {{ !x, y in A: r(x, y) & x ~= y => u(x) | v(y). }}
             structure {{ r := {{{}}}. }}",
            elems.join(", "),
            pairs.join(", ")
        );
        let p = parse_problem(&text).unwrap();
        let guard = parse_problem(&text.replace("r(x, y) & x ~= y => u(x) | v(y)", "r(x, y) & x ~= y"))
            .unwrap()
            .theory[0]
            .clone();
        let (_, _, body) = guard.as_quantifier().unwrap();
        let (_, _, body) = body.as_quantifier().unwrap();
        let vars = [Variable::new("x", "A"), Variable::new("y", "A")];
        let expected = eval_satset(body, &vars, &p.structure).unwrap().popcount();
        for strategy in [Strategy::Vec, Strategy::Naive] {
            let g = ground(&p, strategy);
            prop_assert_eq!(g.stats[0].instantiations, expected);
            prop_assert_eq!(g.theory.assertions.len() as u64, expected);
        }
        let full = ground(&p, Strategy::NoReduce);
        prop_assert_eq!(full.stats[0].instantiations, (n * n) as u64);
    }
}
