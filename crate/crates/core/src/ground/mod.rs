//! Grounding: turning a theory with quantifiers into a quantifier-free
//! theory over ground atoms, simplified against the interpreted part of the
//! structure.
//!
//! Three strategies are available. `Vec` splits each quantifier block on its
//! interpreted guards and enumerates only tuples admitted by the guard
//! tensors. `Naive` enumerates every tuple and evaluates guards per tuple.
//! `NoReduce` substitutes every tuple and leaves interpreted symbols in the
//! output, adding their interpretation as facts.

mod engine;
mod guards;
mod stats;
mod theory;

use std::time::Instant;

use thiserror::Error;

use crate::logic::{Formula, ModelError, Structure};
use crate::parser::Problem;
use crate::satset::SatSetError;
use crate::tensor::{TensorError, DEFAULT_REDUCE_THRESHOLD};

pub use guards::{
    guard_formula, guard_split, is_vacuous, liftable_guards, maximal_interpreted_subformulas, signs_of, simplify,
    strip_negations, substitute, Block, GuardSplit,
};
pub use stats::{write_stats_csv, SentenceStats};
pub use theory::{eval_formula, eval_term, Declarations, GroundApp, GroundFormula, GroundTerm, GroundTheory, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Vec,
    Naive,
    NoReduce,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Vec, Strategy::Naive, Strategy::NoReduce];

    pub fn label(self) -> &'static str {
        match self {
            Strategy::Vec => "vec",
            Strategy::Naive => "naive",
            Strategy::NoReduce => "noreduce",
        }
    }

    pub fn parse(s: &str) -> Option<Strategy> {
        Strategy::ALL.into_iter().find(|st| st.label() == s)
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone)]
pub struct GroundOptions {
    /// Largest number of guards split on per block; beyond it `Vec` falls
    /// back to `Naive` for the sentence.
    pub guard_cap: usize,
    pub reduce_threshold: usize,
    pub deadline: Option<Instant>,
}

impl Default for GroundOptions {
    fn default() -> Self {
        Self {
            guard_cap: 8,
            reduce_threshold: DEFAULT_REDUCE_THRESHOLD,
            deadline: None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroundError {
    #[error("{guards} guards exceed the cap of {cap}")]
    GuardCapExceeded { guards: usize, cap: usize },
    #[error("formula is not quantified")]
    NotQuantified,
    #[error("deadline exceeded")]
    Timeout,
    #[error("arithmetic overflow")]
    ArithmeticOverflow,
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error(transparent)]
    SatSet(#[from] SatSetError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl GroundError {
    /// Time or memory limits, as opposed to malformed input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            GroundError::Timeout | GroundError::SatSet(SatSetError::Tensor(TensorError::Overflow { .. }))
        )
    }
}

impl From<TensorError> for GroundError {
    fn from(e: TensorError) -> Self {
        GroundError::SatSet(SatSetError::Tensor(e))
    }
}

/// Grounds one sentence against `s0`.
pub fn ground_sentence(
    f: &Formula,
    s0: &Structure,
    strategy: Strategy,
    opts: &GroundOptions,
) -> Result<(GroundFormula, SentenceStats), GroundError> {
    let f = f.desugar().rename_apart();
    let start = Instant::now();
    let mut g = engine::Grounder::new(s0, strategy, opts);
    let (result, label) = match g.run(&f) {
        Err(GroundError::GuardCapExceeded { .. }) if strategy == Strategy::Vec => {
            g = engine::Grounder::new(s0, Strategy::Naive, opts);
            (g.run(&f)?, "vec-fallback".to_string())
        }
        r => (r?, strategy.label().to_string()),
    };
    let stats = g.stats(label, start.elapsed().as_micros());
    Ok((result, stats))
}

/// Output of [`ground_problem`].
#[derive(Debug, Clone)]
pub struct Grounding {
    pub theory: GroundTheory,
    pub stats: Vec<SentenceStats>,
}

impl Grounding {
    pub fn peak_bits(&self) -> u64 {
        self.stats.iter().map(|s| s.tensor_bits).max().unwrap_or(0)
    }
}

/// Grounds every sentence of `p` and conjoins the results. Stops at the
/// first sentence that grounds to `false`.
pub fn ground_problem(p: &Problem, strategy: Strategy, opts: &GroundOptions) -> Result<Grounding, GroundError> {
    let s0 = &p.structure;
    let mut parts = Vec::with_capacity(p.theory.len());
    let mut stats = Vec::with_capacity(p.theory.len());
    for (i, f) in p.theory.iter().enumerate() {
        let (g, mut st) = ground_sentence(f, s0, strategy, opts)?;
        st.sentence_id = i;
        stats.push(st);
        if g == GroundFormula::False {
            parts = vec![GroundFormula::False];
            break;
        }
        parts.push(g);
    }
    let mut combined = GroundFormula::and(parts);
    if strategy == Strategy::NoReduce && combined.as_bool().is_none() {
        let mut used = Vec::new();
        for f in &p.theory {
            for s in f.symbols() {
                if !used.contains(&s) {
                    used.push(s);
                }
            }
        }
        let mut all = engine::interpretation_facts(s0, &used);
        match combined {
            GroundFormula::And(v) => all.extend(v),
            g => all.push(g),
        }
        combined = GroundFormula::And(all);
    }
    let theory = GroundTheory::from_formula(p.vocabulary.clone(), s0.domains().clone(), combined);
    Ok(Grounding { theory, stats })
}
