//! The axiomatic calculus: line-numbered proofs with explicit axiom
//! instantiations and modus ponens, the deduction theorem, necessitation,
//! and translations to and from proof terms.

use std::collections::BTreeMap;

use crate::syntax::{Binding, Context, Formula, Name, Term};
use crate::typeck::{infer, TypeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Meta {
    A,
    B,
    C,
}

impl Meta {
    pub fn name(self) -> &'static str {
        match self {
            Meta::A => "A",
            Meta::B => "B",
            Meta::C => "C",
        }
    }

    pub fn from_name(s: &str) -> Option<Meta> {
        match s {
            "A" => Some(Meta::A),
            "B" => Some(Meta::B),
            "C" => Some(Meta::C),
            _ => None,
        }
    }
}

/// Assignment of formulas to the metavariables of a scheme.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Instantiation(BTreeMap<Meta, Formula>);

impl Instantiation {
    pub fn new() -> Instantiation {
        Instantiation::default()
    }

    pub fn of(pairs: &[(Meta, Formula)]) -> Instantiation {
        Instantiation(pairs.iter().cloned().collect())
    }

    pub fn get(&self, m: Meta) -> Option<&Formula> {
        self.0.get(&m)
    }

    pub fn set(&mut self, m: Meta, f: Formula) {
        self.0.insert(m, f);
    }

    pub fn iter(&self) -> impl Iterator<Item = (Meta, &Formula)> {
        self.0.iter().map(|(m, f)| (*m, f))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomScheme {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    K,
    CR,
}

impl AxiomScheme {
    pub const ALL: [AxiomScheme; 12] = [
        AxiomScheme::A1,
        AxiomScheme::A2,
        AxiomScheme::A3,
        AxiomScheme::A4,
        AxiomScheme::A5,
        AxiomScheme::A6,
        AxiomScheme::A7,
        AxiomScheme::A8,
        AxiomScheme::A9,
        AxiomScheme::A10,
        AxiomScheme::K,
        AxiomScheme::CR,
    ];

    pub fn id(self) -> &'static str {
        match self {
            AxiomScheme::A1 => "A1",
            AxiomScheme::A2 => "A2",
            AxiomScheme::A3 => "A3",
            AxiomScheme::A4 => "A4",
            AxiomScheme::A5 => "A5",
            AxiomScheme::A6 => "A6",
            AxiomScheme::A7 => "A7",
            AxiomScheme::A8 => "A8",
            AxiomScheme::A9 => "A9",
            AxiomScheme::A10 => "A10",
            AxiomScheme::K => "K",
            AxiomScheme::CR => "CR",
        }
    }

    pub fn from_id(id: &str) -> Option<AxiomScheme> {
        AxiomScheme::ALL.iter().copied().find(|s| s.id() == id)
    }

    pub fn metas(self) -> &'static [Meta] {
        use AxiomScheme::*;
        match self {
            A1 | A3 | A4 | A5 | A6 | A7 | K => &[Meta::A, Meta::B],
            A2 | A8 => &[Meta::A, Meta::B, Meta::C],
            A9 | CR => &[Meta::A],
            A10 => &[],
        }
    }

    /// The instance of the scheme, or `None` when `inst` does not assign
    /// exactly the scheme's metavariables.
    pub fn instantiate(self, inst: &Instantiation) -> Option<Formula> {
        let metas = self.metas();
        if inst.len() != metas.len() || metas.iter().any(|m| inst.get(*m).is_none()) {
            return None;
        }
        let m = |x: Meta| inst.get(x).cloned().unwrap_or(Formula::Top);
        let (a, b, c) = (m(Meta::A), m(Meta::B), m(Meta::C));
        use Formula as F;
        Some(match self {
            AxiomScheme::A1 => F::imp(a.clone(), F::imp(b, a)),
            AxiomScheme::A2 => F::imp(
                F::imp(a.clone(), F::imp(b.clone(), c.clone())),
                F::imp(F::imp(a.clone(), b), F::imp(a, c)),
            ),
            AxiomScheme::A3 => F::imp(F::conj(a.clone(), b), a),
            AxiomScheme::A4 => F::imp(F::conj(a, b.clone()), b),
            AxiomScheme::A5 => F::imp(a.clone(), F::imp(b.clone(), F::conj(a, b))),
            AxiomScheme::A6 => F::imp(a.clone(), F::disj(a, b)),
            AxiomScheme::A7 => F::imp(b.clone(), F::disj(a, b)),
            AxiomScheme::A8 => F::imp(
                F::imp(a.clone(), c.clone()),
                F::imp(F::imp(b.clone(), c.clone()), F::imp(F::disj(a, b), c)),
            ),
            AxiomScheme::A9 => F::imp(F::Bot, a),
            AxiomScheme::A10 => F::Top,
            AxiomScheme::K => F::imp(
                F::boxed(F::imp(a.clone(), b.clone())),
                F::imp(F::boxed(a), F::boxed(b)),
            ),
            AxiomScheme::CR => F::imp(a.clone(), F::boxed(a)),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Justification {
    /// 1-based index into the hypotheses.
    Hyp(usize),
    Axiom(AxiomScheme, Instantiation),
    /// `Mp(m, k)`: line `m` is `X -> Y`, line `k` is `X`.
    Mp(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Line {
    pub formula: Formula,
    pub just: Justification,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct HilbertProof {
    pub hyps: Vec<Formula>,
    pub lines: Vec<Line>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HilbertError {
    #[error("the proof has no lines")]
    Empty,
    #[error("line {line}: not an instance of the named scheme under the given instantiation")]
    BadAxiomInstance { line: usize },
    #[error("line {line}: modus ponens does not apply to the cited lines")]
    BadMP { line: usize },
    #[error("line {line}: no such hypothesis")]
    BadHypIndex { line: usize },
    #[error("{0} is not among the hypotheses")]
    HypothesisNotFound(Formula),
    #[error("necessitation needs a proof without hypotheses")]
    NonEmptyHypotheses,
}

impl HilbertProof {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    /// The hypotheses as a context `h1:F1, ..., hn:Fn`, the context in which
    /// [`hilbert_to_nd`] types its result.
    pub fn hyp_context(&self) -> Context {
        Context::from_entries(
            self.hyps
                .iter()
                .enumerate()
                .map(|(i, f)| (hyp_name(i), f.clone())),
        )
        .expect("hypothesis names are distinct")
    }
}

fn hyp_name(i: usize) -> String {
    format!("h{}", i + 1)
}

/// Validates every line and returns the conclusion.
pub fn check_hilbert(p: &HilbertProof) -> Result<Formula, HilbertError> {
    for (i, line) in p.lines.iter().enumerate() {
        let n = i + 1;
        match &line.just {
            Justification::Hyp(j) => {
                if *j == 0 || *j > p.hyps.len() || p.hyps[j - 1] != line.formula {
                    return Err(HilbertError::BadHypIndex { line: n });
                }
            }
            Justification::Axiom(s, inst) => {
                if s.instantiate(inst).as_ref() != Some(&line.formula) {
                    return Err(HilbertError::BadAxiomInstance { line: n });
                }
            }
            Justification::Mp(m, k) => {
                if *m == 0 || *k == 0 || *m >= n || *k >= n {
                    return Err(HilbertError::BadMP { line: n });
                }
                match &p.lines[m - 1].formula {
                    Formula::Impl(x, y)
                        if **x == p.lines[k - 1].formula && **y == line.formula => {}
                    _ => return Err(HilbertError::BadMP { line: n }),
                }
            }
        }
    }
    p.conclusion().cloned().ok_or(HilbertError::Empty)
}

/// Appends lines while computing their formulas.
#[derive(Default)]
struct Builder {
    hyps: Vec<Formula>,
    lines: Vec<Line>,
}

impl Builder {
    fn new(hyps: Vec<Formula>) -> Builder {
        Builder {
            hyps,
            lines: Vec::new(),
        }
    }

    fn formula(&self, n: usize) -> &Formula {
        &self.lines[n - 1].formula
    }

    fn push(&mut self, formula: Formula, just: Justification) -> usize {
        self.lines.push(Line { formula, just });
        self.lines.len()
    }

    fn hyp(&mut self, j: usize) -> usize {
        let f = self.hyps[j - 1].clone();
        self.push(f, Justification::Hyp(j))
    }

    fn axiom(&mut self, s: AxiomScheme, pairs: &[(Meta, Formula)]) -> usize {
        let inst = Instantiation::of(pairs);
        let f = s.instantiate(&inst).expect("complete instantiation");
        self.push(f, Justification::Axiom(s, inst))
    }

    fn mp(&mut self, m: usize, k: usize) -> usize {
        let Formula::Impl(x, y) = self.formula(m).clone() else {
            panic!("modus ponens on a non-implication");
        };
        debug_assert_eq!(*x, *self.formula(k));
        self.push(*y, Justification::Mp(m, k))
    }

    /// Appends `p`, whose hypotheses must be a prefix of ours, and returns the
    /// index of its conclusion.
    fn splice(&mut self, p: &HilbertProof) -> usize {
        debug_assert!(p.hyps.len() <= self.hyps.len() && p.hyps[..] == self.hyps[..p.hyps.len()]);
        let offset = self.lines.len();
        for line in &p.lines {
            let just = match &line.just {
                Justification::Mp(m, k) => Justification::Mp(m + offset, k + offset),
                other => other.clone(),
            };
            self.lines.push(Line {
                formula: line.formula.clone(),
                just,
            });
        }
        self.lines.len()
    }

    fn finish(self) -> HilbertProof {
        HilbertProof {
            hyps: self.hyps,
            lines: self.lines,
        }
    }
}

/// Discharges the hypothesis `h` (its first occurrence) from a checking
/// proof, yielding a proof of `h -> B` from the remaining hypotheses.
pub fn deduction_theorem(p: &HilbertProof, h: &Formula) -> Result<HilbertProof, HilbertError> {
    check_hilbert(p)?;
    let j = p
        .hyps
        .iter()
        .position(|g| g == h)
        .ok_or_else(|| HilbertError::HypothesisNotFound(h.clone()))?;
    Ok(discharge(p, j))
}

/// Like [`deduction_theorem`] but names the hypothesis by 0-based position.
pub fn deduction_theorem_at(p: &HilbertProof, index: usize) -> Result<HilbertProof, HilbertError> {
    check_hilbert(p)?;
    if index >= p.hyps.len() {
        return Err(HilbertError::BadHypIndex { line: 0 });
    }
    Ok(discharge(p, index))
}

/// The transformation behind the deduction theorem; `p` must check.
///
/// Only lines the conclusion depends on are kept. Lines that do not use the
/// discharged hypothesis are copied and weakened with A1 where needed; lines
/// that do are rebuilt with A2, and the hypothesis itself becomes the
/// five-line identity proof.
fn discharge(p: &HilbertProof, j: usize) -> HilbertProof {
    let n = p.lines.len();
    let h = p.hyps[j].clone();
    let hyp_no = j + 1;

    let mut needed = vec![false; n];
    needed[n - 1] = true;
    for i in (0..n).rev() {
        if needed[i] {
            if let Justification::Mp(m, k) = p.lines[i].just {
                needed[m - 1] = true;
                needed[k - 1] = true;
            }
        }
    }
    let mut uses_h = vec![false; n];
    for i in 0..n {
        uses_h[i] = match p.lines[i].just {
            Justification::Hyp(x) => x == hyp_no,
            Justification::Mp(m, k) => uses_h[m - 1] || uses_h[k - 1],
            Justification::Axiom(..) => false,
        };
    }

    let mut hyps = p.hyps.clone();
    hyps.remove(j);
    let mut b = Builder::new(hyps);
    let mut plain: Vec<Option<usize>> = vec![None; n];
    let mut under_h: Vec<Option<usize>> = vec![None; n];
    let mut identity: Option<usize> = None;

    for i in 0..n {
        if !needed[i] {
            continue;
        }
        let line = &p.lines[i];
        if !uses_h[i] {
            let just = match &line.just {
                Justification::Hyp(x) => Justification::Hyp(if *x > hyp_no { x - 1 } else { *x }),
                Justification::Mp(m, k) => {
                    Justification::Mp(plain[m - 1].unwrap(), plain[k - 1].unwrap())
                }
                a @ Justification::Axiom(..) => a.clone(),
            };
            plain[i] = Some(b.push(line.formula.clone(), just));
            continue;
        }
        under_h[i] = Some(match line.just {
            Justification::Hyp(_) => *identity.get_or_insert_with(|| {
                let hh = Formula::imp(h.clone(), h.clone());
                let l1 = b.axiom(AxiomScheme::A1, &[(Meta::A, h.clone()), (Meta::B, hh.clone())]);
                let l2 = b.axiom(
                    AxiomScheme::A2,
                    &[(Meta::A, h.clone()), (Meta::B, hh), (Meta::C, h.clone())],
                );
                let l3 = b.mp(l2, l1);
                let l4 = b.axiom(AxiomScheme::A1, &[(Meta::A, h.clone()), (Meta::B, h.clone())]);
                b.mp(l3, l4)
            }),
            Justification::Mp(m, k) => {
                let hx = weakened(&mut b, &h, p, m - 1, &plain, &mut under_h);
                let hxy = weakened(&mut b, &h, p, k - 1, &plain, &mut under_h);
                let Formula::Impl(x, y) = &p.lines[m - 1].formula else {
                    unreachable!("checked proof");
                };
                let a2 = b.axiom(
                    AxiomScheme::A2,
                    &[(Meta::A, h.clone()), (Meta::B, (**x).clone()), (Meta::C, (**y).clone())],
                );
                let l = b.mp(a2, hx);
                b.mp(l, hxy)
            }
            Justification::Axiom(..) => unreachable!("axioms never use a hypothesis"),
        });
    }
    let last = weakened(&mut b, &h, p, n - 1, &plain, &mut under_h);
    debug_assert_eq!(last, b.lines.len());
    b.finish()
}

/// The index of a line proving `h -> F_i`, adding an A1 weakening of the
/// plain copy when line `i` does not depend on `h`.
fn weakened(
    b: &mut Builder,
    h: &Formula,
    p: &HilbertProof,
    i: usize,
    plain: &[Option<usize>],
    under_h: &mut [Option<usize>],
) -> usize {
    if let Some(l) = under_h[i] {
        return l;
    }
    let f = p.lines[i].formula.clone();
    let src = plain[i].expect("line was copied");
    let a1 = b.axiom(AxiomScheme::A1, &[(Meta::A, f), (Meta::B, h.clone())]);
    let l = b.mp(a1, src);
    under_h[i] = Some(l);
    l
}

/// From a hypothesis-free proof of `A`, a proof of `[]A`.
pub fn necessitation(p: &HilbertProof) -> Result<HilbertProof, HilbertError> {
    let a = check_hilbert(p)?;
    if !p.hyps.is_empty() {
        return Err(HilbertError::NonEmptyHypotheses);
    }
    let mut b = Builder::new(Vec::new());
    let last = b.splice(p);
    let cr = b.axiom(AxiomScheme::CR, &[(Meta::A, a)]);
    b.mp(cr, last);
    Ok(b.finish())
}

fn inst_formula(inst: &Instantiation, m: Meta) -> Formula {
    inst.get(m).cloned().expect("checked instantiation")
}

/// The proof term witnessing an axiom instance.
pub fn axiom_witness(s: AxiomScheme, inst: &Instantiation) -> Term {
    let a = || inst_formula(inst, Meta::A);
    let b = || inst_formula(inst, Meta::B);
    let c = || inst_formula(inst, Meta::C);
    let v = Term::var;
    use Formula as F;
    match s {
        AxiomScheme::A1 => Term::lam("a", a(), Term::lam("b", b(), v("a"))),
        AxiomScheme::A2 => Term::lam(
            "f",
            F::imp(a(), F::imp(b(), c())),
            Term::lam(
                "g",
                F::imp(a(), b()),
                Term::lam(
                    "a",
                    a(),
                    Term::app(Term::app(v("f"), v("a")), Term::app(v("g"), v("a"))),
                ),
            ),
        ),
        AxiomScheme::A3 => Term::lam("p", F::conj(a(), b()), Term::proj1(v("p"))),
        AxiomScheme::A4 => Term::lam("p", F::conj(a(), b()), Term::proj2(v("p"))),
        AxiomScheme::A5 => Term::lam("a", a(), Term::lam("b", b(), Term::pair(v("a"), v("b")))),
        AxiomScheme::A6 => Term::lam("a", a(), Term::inj1(F::disj(a(), b()), v("a"))),
        AxiomScheme::A7 => Term::lam("b", b(), Term::inj2(F::disj(a(), b()), v("b"))),
        AxiomScheme::A8 => Term::lam(
            "f",
            F::imp(a(), c()),
            Term::lam(
                "g",
                F::imp(b(), c()),
                Term::lam(
                    "d",
                    F::disj(a(), b()),
                    Term::case(
                        v("d"),
                        "a",
                        Term::app(v("f"), v("a")),
                        "b",
                        Term::app(v("g"), v("b")),
                    ),
                ),
            ),
        ),
        AxiomScheme::A9 => Term::lam("z", F::Bot, Term::exfalso(a(), v("z"))),
        AxiomScheme::A10 => Term::triv(Term::lam("x", F::Bot, v("x"))),
        AxiomScheme::K => Term::lam(
            "f",
            F::boxed(F::imp(a(), b())),
            Term::lam(
                "a",
                F::boxed(a()),
                Term::boxed(
                    vec![
                        Binding::new("g", F::imp(a(), b()), v("f")),
                        Binding::new("x", a(), v("a")),
                    ],
                    Term::app(v("g"), v("x")),
                ),
            ),
        ),
        AxiomScheme::CR => Term::lam("x", a(), Term::boxed(vec![], v("x"))),
    }
}

/// Translates a checking proof into a term typed in
/// [`HilbertProof::hyp_context`] at the proof's conclusion.
pub fn hilbert_to_nd(p: &HilbertProof) -> Result<Term, HilbertError> {
    check_hilbert(p)?;
    let mut terms: Vec<Term> = Vec::with_capacity(p.lines.len());
    for line in &p.lines {
        let t = match &line.just {
            Justification::Hyp(j) => Term::var(&hyp_name(j - 1)),
            Justification::Axiom(s, inst) => axiom_witness(*s, inst),
            Justification::Mp(m, k) => Term::app(terms[m - 1].clone(), terms[k - 1].clone()),
        };
        terms.push(t);
    }
    Ok(terms.pop().expect("checked proof is non-empty"))
}

/// Where a term variable's proof comes from during [`nd_to_hilbert`].
#[derive(Clone)]
enum Source {
    Hyp(usize),
    /// Component `index` of the left-nested conjunction of `arity` formulas
    /// held by hypothesis `hyp`.
    Component { hyp: usize, index: usize, arity: usize },
}

/// Translates `ctx |- t : A` into a checking proof of `A` whose hypotheses
/// are the formulas of `ctx` in order.
pub fn nd_to_hilbert(t: &Term, ctx: &Context) -> Result<HilbertProof, TypeError> {
    infer(ctx, t)?;
    let hyps = ctx.formulas();
    let scope: Vec<(Name, Source)> = ctx
        .iter()
        .enumerate()
        .map(|(i, (n, _))| (n.clone(), Source::Hyp(i + 1)))
        .collect();
    Ok(translate(t, &hyps, &scope))
}

fn translate(t: &Term, hyps: &[Formula], scope: &[(Name, Source)]) -> HilbertProof {
    let mut b = Builder::new(hyps.to_vec());
    emit(&mut b, t, scope);
    b.finish()
}

/// Translates `t` in a scope extended by one hypothesis `a` bound to `src`,
/// then discharges that hypothesis, giving `a -> B`.
fn translate_discharged(
    b: &mut Builder,
    t: &Term,
    a: Formula,
    binder: Option<Name>,
    src_of: impl FnOnce(usize) -> Vec<(Name, Source)>,
    scope: &[(Name, Source)],
) -> usize {
    let mut hyps = b.hyps.clone();
    hyps.push(a);
    let j = hyps.len();
    let mut inner: Vec<(Name, Source)> = scope.to_vec();
    if let Some(x) = binder {
        inner.push((x, Source::Hyp(j)));
    }
    inner.extend(src_of(j));
    let body = translate(t, &hyps, &inner);
    let discharged = discharge(&body, j - 1);
    b.splice(&discharged)
}

fn emit(b: &mut Builder, t: &Term, scope: &[(Name, Source)]) -> usize {
    match t {
        Term::Var(x) => {
            let src = scope
                .iter()
                .rev()
                .find(|(n, _)| n == x)
                .map(|(_, s)| s.clone())
                .expect("well-typed term");
            match src {
                Source::Hyp(j) => b.hyp(j),
                Source::Component { hyp, index, arity } => {
                    let mut line = b.hyp(hyp);
                    let mut len = arity;
                    while len > index + 1 {
                        let Formula::Conj(l, r) = b.formula(line).clone() else {
                            unreachable!("left-nested conjunction");
                        };
                        let a3 = b.axiom(AxiomScheme::A3, &[(Meta::A, *l), (Meta::B, *r)]);
                        line = b.mp(a3, line);
                        len -= 1;
                    }
                    if index > 0 {
                        let Formula::Conj(l, r) = b.formula(line).clone() else {
                            unreachable!("left-nested conjunction");
                        };
                        let a4 = b.axiom(AxiomScheme::A4, &[(Meta::A, *l), (Meta::B, *r)]);
                        line = b.mp(a4, line);
                    }
                    line
                }
            }
        }
        Term::Lam(x, a, body) => {
            translate_discharged(b, body, a.clone(), Some(x.clone()), |_| Vec::new(), scope)
        }
        Term::App(f, a) => {
            let lf = emit(b, f, scope);
            let la = emit(b, a, scope);
            b.mp(lf, la)
        }
        Term::Pair(x, y) => {
            let lx = emit(b, x, scope);
            let ly = emit(b, y, scope);
            let fx = b.formula(lx).clone();
            let fy = b.formula(ly).clone();
            let a5 = b.axiom(AxiomScheme::A5, &[(Meta::A, fx), (Meta::B, fy)]);
            let l = b.mp(a5, lx);
            b.mp(l, ly)
        }
        Term::Proj1(p) | Term::Proj2(p) => {
            let lp = emit(b, p, scope);
            let Formula::Conj(l, r) = b.formula(lp).clone() else {
                unreachable!("well-typed term");
            };
            let s = if matches!(t, Term::Proj1(_)) { AxiomScheme::A3 } else { AxiomScheme::A4 };
            let ax = b.axiom(s, &[(Meta::A, *l), (Meta::B, *r)]);
            b.mp(ax, lp)
        }
        Term::Inj1(annot, x) | Term::Inj2(annot, x) => {
            let lx = emit(b, x, scope);
            let Formula::Disj(l, r) = annot else {
                unreachable!("well-typed term");
            };
            let s = if matches!(t, Term::Inj1(..)) { AxiomScheme::A6 } else { AxiomScheme::A7 };
            let ax = b.axiom(s, &[(Meta::A, (**l).clone()), (Meta::B, (**r).clone())]);
            b.mp(ax, lx)
        }
        Term::Case(s, x, u, y, v) => {
            let ls = emit(b, s, scope);
            let Formula::Disj(fa, fb) = b.formula(ls).clone() else {
                unreachable!("well-typed term");
            };
            let lu = translate_discharged(b, u, (*fa).clone(), Some(x.clone()), |_| Vec::new(), scope);
            let lv = translate_discharged(b, v, (*fb).clone(), Some(y.clone()), |_| Vec::new(), scope);
            let Formula::Impl(_, c) = b.formula(lu).clone() else {
                unreachable!("discharged proof");
            };
            let a8 = b.axiom(
                AxiomScheme::A8,
                &[(Meta::A, *fa), (Meta::B, *fb), (Meta::C, *c)],
            );
            let l1 = b.mp(a8, lu);
            let l2 = b.mp(l1, lv);
            b.mp(l2, ls)
        }
        Term::Exfalso(annot, x) => {
            let lx = emit(b, x, scope);
            let a9 = b.axiom(AxiomScheme::A9, &[(Meta::A, annot.clone())]);
            b.mp(a9, lx)
        }
        Term::Triv(_) => b.axiom(AxiomScheme::A10, &[]),
        Term::BoxIntro(bs, body) => {
            let annots: Vec<Formula> = bs.iter().map(|x| x.annot.clone()).collect();
            let conj = Formula::conj_all(&annots);
            let arity = bs.len();
            // Body under one hypothesis holding the conjunction of the binders.
            let names: Vec<Name> = bs.iter().map(|x| x.var.clone()).collect();
            let l_impl = translate_discharged(
                b,
                body,
                conj.clone(),
                None,
                |hyp| {
                    names
                        .iter()
                        .enumerate()
                        .map(|(index, n)| (n.clone(), Source::Component { hyp, index, arity }))
                        .collect()
                },
                scope,
            );
            let Formula::Impl(_, fb) = b.formula(l_impl).clone() else {
                unreachable!("discharged proof");
            };
            let cr = b.axiom(AxiomScheme::CR, &[(Meta::A, b.formula(l_impl).clone())]);
            let l_boxed = b.mp(cr, l_impl);
            let k = b.axiom(AxiomScheme::K, &[(Meta::A, conj.clone()), (Meta::B, *fb)]);
            let l_k = b.mp(k, l_boxed);
            let mut l_conj = b.splice(&box_conj(&annots));
            for arg in bs {
                let la = emit(b, &arg.arg, scope);
                l_conj = b.mp(l_conj, la);
            }
            b.mp(l_k, l_conj)
        }
    }
}

/// A hypothesis-free proof of `[]A1 -> ... -> []An -> [](A1 /\ ... /\ An)`
/// (left-nested), or of `[]Top` when `parts` is empty.
pub fn box_conj(parts: &[Formula]) -> HilbertProof {
    if parts.is_empty() {
        let mut b = Builder::new(Vec::new());
        let top = b.axiom(AxiomScheme::A10, &[]);
        let cr = b.axiom(AxiomScheme::CR, &[(Meta::A, Formula::Top)]);
        b.mp(cr, top);
        return b.finish();
    }
    let hyps: Vec<Formula> = parts.iter().cloned().map(Formula::boxed).collect();
    let mut b = Builder::new(hyps);
    let mut acc = b.hyp(1);
    let mut conj = parts[0].clone();
    for (i, a) in parts.iter().enumerate().skip(1) {
        let next = Formula::conj(conj.clone(), a.clone());
        let a5 = b.axiom(AxiomScheme::A5, &[(Meta::A, conj.clone()), (Meta::B, a.clone())]);
        let cr = b.axiom(AxiomScheme::CR, &[(Meta::A, b.formula(a5).clone())]);
        let l = b.mp(cr, a5);
        let k1 = b.axiom(
            AxiomScheme::K,
            &[(Meta::A, conj.clone()), (Meta::B, Formula::imp(a.clone(), next.clone()))],
        );
        let l = b.mp(k1, l);
        let l = b.mp(l, acc);
        let k2 = b.axiom(AxiomScheme::K, &[(Meta::A, a.clone()), (Meta::B, next.clone())]);
        let l = b.mp(k2, l);
        let ha = b.hyp(i + 1);
        acc = b.mp(l, ha);
        conj = next;
    }
    let mut proof = b.finish();
    for j in (0..parts.len()).rev() {
        proof = discharge(&proof, j);
    }
    proof
}
