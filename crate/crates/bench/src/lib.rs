//! Shared inputs for the kernel benchmarks.

use ielc_core::gen::{self, Gen, Sample};
use ielc_core::{parse::parse_formula, reduce, Formula, HilbertProof, Mode, Term};

pub const SEED: u64 = 20_160_711;

/// The benchmark corpus: 300 generated terms with their contexts.
pub fn corpus() -> Vec<Sample> {
    gen::corpus(SEED, 300)
}

/// Pairs `(t, u)` with `u` a single-step reduct of `t`, for simulation.
pub fn reduct_pairs(corpus: &[Sample], limit: usize) -> Vec<(Term, Term)> {
    corpus
        .iter()
        .flat_map(|s| {
            reduce::successors(&s.term, Mode::Default)
                .into_iter()
                .map(|(u, _, _)| (s.term.clone(), u))
        })
        .take(limit)
        .collect()
}

pub fn hilbert_proofs(count: usize) -> Vec<HilbertProof> {
    let mut g = Gen::new(SEED);
    (0..count).map(|_| g.hilbert_proof(6)).collect()
}

/// Formulas for countermodel search; the last two have none.
pub fn search_formulas() -> Vec<Formula> {
    ["[]p -> p", "p \\/ ~p", "~~p -> p", "[]p \\/ ~[]p", "p -> []p", "[](p -> q) -> []p -> []q"]
        .iter()
        .map(|s| parse_formula(s).expect("benchmark formula parses"))
        .collect()
}
