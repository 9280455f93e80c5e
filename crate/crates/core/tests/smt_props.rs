mod common;

use std::collections::{HashMap, HashSet};
use std::fs;
use std::process::Command;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use sli::ground::{ground_problem, GroundFormula, GroundOptions, Strategy};
use sli::parser::Problem;
use sli::smt::emit_smt;

fn problem(mx: &common::MxProblem) -> Problem {
    Problem {
        vocabulary: mx.s0.vocabulary().clone(),
        theory: mx.theory.clone(),
        structure: mx.s0.clone(),
    }
}

/// The assertion lines that correspond to the theory's assertions, in order.
fn assertion_lines(text: &str, count: usize) -> Vec<&str> {
    let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("(assert ")).collect();
    lines[lines.len() - count..].to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn emission_is_injective_and_deterministic(seed in any::<u64>()) {
        let mx = common::random_mx(&mut StdRng::seed_from_u64(seed));
        for strategy in Strategy::ALL {
            let g = ground_problem(&problem(&mx), strategy, &GroundOptions::default()).unwrap();
            let text = emit_smt(&g.theory);
            prop_assert_eq!(&text, &emit_smt(&g.theory));
            prop_assert!(text.ends_with("(check-sat)\n"));

            let mut by_text: HashMap<&str, &GroundFormula> = HashMap::new();
            for (line, f) in assertion_lines(&text, g.theory.assertions.len()).into_iter().zip(&g.theory.assertions) {
                if let Some(prev) = by_text.insert(line, f) {
                    prop_assert_eq!(prev, f, "{} printed twice", line);
                }
            }
            let decls = g.theory.declarations();
            let consts: Vec<&str> = text
                .lines()
                .filter_map(|l| l.strip_prefix("(declare-const "))
                .map(|l| l.split(' ').next().unwrap())
                .collect();
            prop_assert_eq!(consts.len(), decls.atoms.len() + decls.terms.len());
            prop_assert_eq!(consts.iter().collect::<HashSet<_>>().len(), consts.len());
        }
    }
}

const Z3_SCRIPT: &str = r#"
import sys, z3
for path in sys.argv[1:]:
    s = z3.Solver()
    s.from_file(path)
    print(s.check())
"#;

fn z3_available() -> bool {
    Command::new("python3")
        .args(["-c", "import z3"])
        .output()
        .is_ok_and(|o| o.status.success())
}

/// Solver verdicts on emitted files agree with brute-force model expansion.
/// Skipped when the z3 Python bindings are not installed.
#[test]
fn solver_round_trip() {
    if !z3_available() {
        eprintln!("z3 not available, skipping");
        return;
    }
    let dir = std::env::temp_dir().join(format!("sli-smt-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let mut rng = StdRng::seed_from_u64(0x2357);
    let mut files = Vec::new();
    let mut expected = Vec::new();
    for i in 0..150 {
        let mx = common::random_mx(&mut rng);
        let sat = common::expansions(&mx).iter().any(|s1| {
            let full = common::join(&mx.s0, s1);
            mx.theory.iter().all(|f| common::truth(&full, f, &mut Vec::new()))
        });
        for strategy in [Strategy::Vec, Strategy::NoReduce] {
            let g = ground_problem(&problem(&mx), strategy, &GroundOptions::default()).unwrap();
            let path = dir.join(format!("{i}-{strategy}.smt2"));
            fs::write(&path, emit_smt(&g.theory)).unwrap();
            files.push(path);
            expected.push(if sat { "sat" } else { "unsat" });
        }
    }
    let out = Command::new("python3")
        .arg("-c")
        .arg(Z3_SCRIPT)
        .args(&files)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let got: Vec<&str> = stdout.lines().collect();
    assert_eq!(got.len(), expected.len());
    for ((path, g), e) in files.iter().zip(&got).zip(&expected) {
        assert_eq!(g, e, "{}", path.display());
    }
    fs::remove_dir_all(&dir).unwrap();
}
