mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use sli::parser::{parse_formula, parse_problem, print_formula};

const VALID: &str = "vocabulary {
  type T := {a, b, c}.
  type R := -1..2.
  pred p(T). pred e(T, T).
  func f(T) -> Int[0..9].
}
theory {
  // comment
  !x in T: p(x) => ?y in T: e(x, y) & f(y) + 1 >= f(x).
  !r in R: r * r =< 4.
}
structure {
  p := {a, c}.
  e := {(a, b), (c, c)}.
  f := {a -> 3, b -> 0, c -> 7}.
}
";

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn print_then_parse_is_desugar(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let s = common::random_world(&mut rng, 4);
        let f = common::random_world_formula(&mut rng, &s, 4);
        let text = print_formula(&f);
        let back = parse_formula(&text, s.vocabulary(), s.domains(), &f.free_variables());
        match back {
            Ok(g) => prop_assert_eq!(g, f.desugar()),
            Err(e) => prop_assert!(false, "{}: {}", text, e),
        }
    }

    #[test]
    fn arbitrary_text_never_panics(text in "[a-z{}()=<>~&|!?.,:;0-9 \n-]{0,80}") {
        if let Err(e) = parse_problem(&text) {
            prop_assert!(e.span.line >= 1 && e.span.col_start >= 1);
        }
    }

    #[test]
    fn truncated_and_spliced_inputs_never_panic(a in 0usize..400, b in 0usize..400) {
        let (lo, hi) = (a.min(b).min(VALID.len()), a.max(b).min(VALID.len()));
        let spliced = format!("{}{}", &VALID[..lo], &VALID[hi..]);
        if let Err(e) = parse_problem(&spliced) {
            prop_assert!(e.span.line >= 1);
        }
        let _ = parse_problem(&VALID[..lo]);
    }
}

#[test]
fn valid_reference_problem_parses() {
    let p = parse_problem(VALID).unwrap();
    assert_eq!(p.theory.len(), 2);
}
