//! Randomized property suites over a seeded corpus. Each suite reports how
//! many cases held and describes the first few that did not.

use std::fmt;

use crate::gen::{self, Gen, Sample, ATOMS};
use crate::hilbert::{
    check_hilbert, deduction_theorem_at, hilbert_to_nd, necessitation, nd_to_hilbert, HilbertProof,
};
use crate::kripke::{enumerate_models, FrameCondition, KripkeModel};
use crate::metaprops::{
    canonicity_check, classify, disjunction_split, reflection_extract, weak_dp, TermClass,
};
use crate::parse::{parse_formula, parse_hilbert, parse_model, parse_term};
use crate::reduce::{self, NormalizeOptions, Strategy, DEFAULT_MAX_STEPS};
use crate::stlc::{self, erase_context, erase_formula, erase_term, stlc_check, DEFAULT_SIM_BUDGET};
use crate::syntax::{alpha_eq, Context, Formula, Name, Term};
use crate::typeck::infer;

const KEPT_FAILURES: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> SuiteReport {
        SuiteReport {
            name,
            passed: 0,
            total: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, outcome: Result<(), String>) {
        self.total += 1;
        match outcome {
            Ok(()) => self.passed += 1,
            Err(msg) => {
                if self.failures.len() < KEPT_FAILURES {
                    self.failures.push(msg);
                }
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.ok() { "ok" } else { "FAILED" };
        write!(f, "{:<20} {}/{} {}", self.name, self.passed, self.total, verdict)?;
        for m in &self.failures {
            write!(f, "\n    {m}")?;
        }
        Ok(())
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn roundtrip(seed: u64, count: usize) -> SuiteReport {
    let mut r = SuiteReport::new("roundtrip");
    let mut g = Gen::new(seed);
    for _ in 0..count {
        let f = g.formula(4);
        let printed = f.to_string();
        r.record(ensure(parse_formula(&printed).as_ref() == Ok(&f), || {
            format!("formula {printed}")
        }));
        let t = g.corpus_term().term;
        let printed = t.to_string();
        r.record(ensure(parse_term(&printed).as_ref() == Ok(&t), || format!("term {printed}")));
        let m = g.model(4);
        let printed = m.to_string();
        r.record(ensure(parse_model(&printed).as_ref() == Ok(&m), || {
            format!("model {printed:?}")
        }));
    }
    r
}

pub fn hilbert_roundtrip(seed: u64, count: usize) -> SuiteReport {
    let mut r = SuiteReport::new("hilbert-roundtrip");
    let mut g = Gen::new(seed);
    for _ in 0..count {
        let p = g.hilbert_proof(6);
        let printed = p.to_string();
        r.record(ensure(parse_hilbert(&printed).as_ref() == Ok(&p), || printed.clone()));
    }
    r
}

pub fn subject_reduction(corpus: &[Sample]) -> SuiteReport {
    let mut r = SuiteReport::new("subject-reduction");
    for s in corpus {
        r.record(match reduce::normalize(&s.term, DEFAULT_MAX_STEPS) {
            Err(e) => Err(format!("{}: {e}", s.term)),
            Ok((_, trace)) => trace
                .steps
                .iter()
                .find(|st| infer(&s.ctx, &st.result).as_ref() != Ok(&s.ty))
                .map_or(Ok(()), |st| {
                    Err(format!("{} lost its type after {} at {}", s.term, st.tag, st.path))
                }),
        });
    }
    r
}

fn normal_form(t: &Term, strategy: Strategy) -> Result<Term, String> {
    let opts = NormalizeOptions {
        strategy,
        ..NormalizeOptions::default()
    };
    reduce::normalize_with(t, &opts)
        .map(|(nf, _)| nf)
        .map_err(|e| format!("{t}: {e}"))
}

pub fn confluence(corpus: &[Sample]) -> SuiteReport {
    let mut r = SuiteReport::new("confluence");
    for s in corpus {
        r.record((|| {
            let lo = normal_form(&s.term, Strategy::LeftmostOutermost)?;
            let ri = normal_form(&s.term, Strategy::RightmostInnermost)?;
            ensure(alpha_eq(&lo, &ri), || format!("{}: {lo} vs {ri}", s.term))
        })());
    }
    r
}

pub fn simulation(corpus: &[Sample]) -> SuiteReport {
    let mut r = SuiteReport::new("simulation");
    for s in corpus {
        for (next, tag, path) in reduce::successors(&s.term, reduce::Mode::Default) {
            let sim = stlc::simulates(&s.term, &next, DEFAULT_SIM_BUDGET);
            r.record(ensure(sim.succeeded(), || {
                format!("{} --{tag} @ {path}--> {next}: {sim:?}", s.term)
            }));
        }
    }
    r
}

pub fn erasure_typing(corpus: &[Sample]) -> SuiteReport {
    let mut r = SuiteReport::new("erasure-typing");
    for s in corpus {
        let res = stlc_check(&erase_context(&s.ctx), &erase_term(&s.term), &erase_formula(&s.ty));
        r.record(res.map_err(|e| format!("{}: {e}", s.term)));
    }
    r
}

pub fn stlc_confluence(corpus: &[Sample]) -> SuiteReport {
    let mut r = SuiteReport::new("stlc-confluence");
    for s in corpus {
        let e = erase_term(&s.term);
        let lo = stlc::stlc_normalize(&e, DEFAULT_MAX_STEPS, Strategy::LeftmostOutermost);
        let ri = stlc::stlc_normalize(&e, DEFAULT_MAX_STEPS, Strategy::RightmostInnermost);
        r.record(match (lo, ri) {
            (Ok(a), Ok(b)) => ensure(stlc::stlc_alpha_eq(&a, &b), || format!("{e}: {a} vs {b}")),
            (Err(err), _) | (_, Err(err)) => Err(format!("{e}: {err}")),
        });
    }
    r
}

/// Canonicity of closed normal forms and the three extraction procedures
/// on every closed corpus term of eligible type.
pub fn canonicity(corpus: &[Sample]) -> SuiteReport {
    let mut r = SuiteReport::new("canonicity");
    for s in corpus.iter().filter(|s| s.term.is_closed()) {
        r.record(check_closed(s));
    }
    r
}

fn check_closed(s: &Sample) -> Result<(), String> {
    let empty = Context::new();
    let nf = normal_form(&s.term, Strategy::LeftmostOutermost)?;
    ensure(classify(&nf) == TermClass::IntroHeaded, || {
        format!("{nf} classified as {}", classify(&nf))
    })?;
    ensure(canonicity_check(&nf, &s.ty) == Ok(true), || format!("{nf} is not canonical"))?;
    let retype = |t: &Term, want: &Formula| {
        ensure(infer(&empty, t).as_ref() == Ok(want), || {
            format!("witness {t} does not prove {want}")
        })
    };
    if let Formula::Box(a) = &s.ty {
        let u = reflection_extract(&s.term).map_err(|e| format!("reflect {}: {e}", s.term))?;
        retype(&u, a)?;
        ensure(classify(&u) == TermClass::IntroHeaded, || format!("{u} is not intro-headed"))?;
        if let Formula::Disj(l, rt) = &**a {
            let (side, w) = weak_dp(&s.term).map_err(|e| format!("weak dp {}: {e}", s.term))?;
            let chosen = match side {
                crate::metaprops::Side::Left => l,
                crate::metaprops::Side::Right => rt,
            };
            retype(&w, &Formula::boxed((**chosen).clone()))?;
            let (_, split) = disjunction_split(&u).map_err(|e| e.to_string())?;
            let again = reflection_extract(&w).map_err(|e| e.to_string())?;
            ensure(alpha_eq(&again, &split), || format!("{again} differs from {split}"))?;
        }
    }
    if let Formula::Disj(l, rt) = &s.ty {
        let (side, w) = disjunction_split(&s.term).map_err(|e| format!("split {}: {e}", s.term))?;
        let chosen = match side {
            crate::metaprops::Side::Left => l,
            crate::metaprops::Side::Right => rt,
        };
        retype(&w, chosen)?;
    }
    Ok(())
}

pub fn hilbert_to_terms(seed: u64, count: usize) -> SuiteReport {
    let mut r = SuiteReport::new("hilbert-to-nd");
    let mut g = Gen::new(seed);
    for _ in 0..count {
        let p = g.hilbert_proof(6);
        r.record((|| {
            let a = check_hilbert(&p).map_err(|e| format!("generated proof: {e}"))?;
            let t = hilbert_to_nd(&p).map_err(|e| e.to_string())?;
            ensure(infer(&p.hyp_context(), &t).as_ref() == Ok(&a), || format!("{t} does not prove {a}"))
        })());
    }
    r
}

pub fn terms_to_hilbert(corpus: &[Sample]) -> SuiteReport {
    let mut r = SuiteReport::new("nd-to-hilbert");
    for s in corpus {
        r.record((|| {
            let p = nd_to_hilbert(&s.term, &s.ctx).map_err(|e| e.to_string())?;
            let a = check_hilbert(&p).map_err(|e| format!("{}: {e}", s.term))?;
            ensure(a == s.ty && p.hyps == s.ctx.formulas(), || {
                format!("{} translated to a proof of {a}", s.term)
            })
        })());
    }
    r
}

/// Discharges every hypothesis, last first.
fn discharge_all(p: &HilbertProof) -> Result<HilbertProof, String> {
    let mut cur = p.clone();
    while !cur.hyps.is_empty() {
        let n = cur.hyps.len();
        let next = deduction_theorem_at(&cur, n - 1).map_err(|e| e.to_string())?;
        let want = Formula::imp(cur.hyps[n - 1].clone(), cur.conclusion().cloned().unwrap_or(Formula::Top));
        let got = check_hilbert(&next).map_err(|e| format!("deduction output: {e}"))?;
        ensure(got == want && next.hyps.len() == n - 1, || {
            format!("deduction gave {got}, expected {want}")
        })?;
        cur = next;
    }
    Ok(cur)
}

pub fn deduction_and_necessitation(seed: u64, count: usize) -> SuiteReport {
    let mut r = SuiteReport::new("deduction");
    let mut g = Gen::new(seed);
    for _ in 0..count {
        let p = g.hilbert_proof(6);
        r.record((|| {
            let thm = discharge_all(&p)?;
            let a = check_hilbert(&thm).map_err(|e| e.to_string())?;
            let boxed = necessitation(&thm).map_err(|e| e.to_string())?;
            let got = check_hilbert(&boxed).map_err(|e| format!("necessitation output: {e}"))?;
            ensure(got == Formula::boxed(a.clone()), || format!("necessitation of {a} gave {got}"))
        })());
    }
    r
}

fn small_models(max_worlds: usize) -> Vec<KripkeModel> {
    let atoms: Vec<Name> = ATOMS.iter().map(|&a| Name::from(a)).collect();
    (1..=max_worlds)
        .flat_map(|n| enumerate_models(n, &atoms, FrameCondition::Default).collect::<Vec<_>>())
        .collect()
}

/// Theorems of random proofs with all hypotheses discharged hold in every
/// valid model of at most two worlds.
pub fn soundness(seed: u64, count: usize) -> SuiteReport {
    let mut r = SuiteReport::new("soundness");
    let models = small_models(2);
    let mut g = Gen::new(seed);
    for _ in 0..count {
        let p = g.hilbert_proof(6);
        r.record((|| {
            let thm = discharge_all(&p)?;
            let a = check_hilbert(&thm).map_err(|e| e.to_string())?;
            match models.iter().find(|m| !crate::kripke::valid_in_model(m, &a)) {
                Some(m) => Err(format!("{a} fails in {m:?}")),
                None => Ok(()),
            }
        })());
    }
    r
}

/// Every suite, each with its own stream derived from `seed`.
pub fn run_all(seed: u64, count: usize) -> Vec<SuiteReport> {
    let corpus = gen::corpus(seed, count);
    vec![
        roundtrip(seed ^ 0x1, count),
        hilbert_roundtrip(seed ^ 0x2, count),
        subject_reduction(&corpus),
        confluence(&corpus),
        simulation(&corpus),
        erasure_typing(&corpus),
        stlc_confluence(&corpus),
        canonicity(&corpus),
        hilbert_to_terms(seed ^ 0x3, count),
        terms_to_hilbert(&corpus),
        deduction_and_necessitation(seed ^ 0x4, count),
        soundness(seed ^ 0x5, count),
    ]
}
