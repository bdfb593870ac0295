//! Seeded random inputs: formulas, well-typed terms rich in redexes,
//! checking Hilbert proofs and Kripke models.
//!
//! Everything is driven by a ChaCha8 stream, so a seed fixes the output on
//! every platform.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::hilbert::{AxiomScheme, HilbertProof, Instantiation, Justification, Line, Meta};
use crate::kripke::KripkeModel;
use crate::syntax::{Binding, Context, Formula, Name, Term};

pub const ATOMS: [&str; 3] = ["p", "q", "r"];

/// Largest term admitted into the corpus.
pub const CORPUS_MAX_SIZE: usize = 30;

/// A term together with a context typing it and its formula.
#[derive(Clone, Debug)]
pub struct Sample {
    pub ctx: Context,
    pub term: Term,
    pub ty: Formula,
}

pub struct Gen {
    rng: ChaCha8Rng,
    next_name: usize,
    // Free hypotheses introduced while building the current term.
    hyps: Vec<(Name, Formula)>,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_name: 0,
            hyps: Vec::new(),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn fresh(&mut self) -> Name {
        self.next_name += 1;
        format!("v{}", self.next_name).into()
    }

    /// A formula of modal and connective depth at most `depth`.
    pub fn formula(&mut self, depth: usize) -> Formula {
        self.formula_over(&ATOMS, depth)
    }

    /// Like [`Gen::formula`] with atoms drawn from `atoms`.
    pub fn formula_over(&mut self, atoms: &[&str], depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.25) {
            return match self.rng.gen_range(0..10) {
                0 => Formula::Top,
                1 => Formula::Bot,
                _ => Formula::atom(atoms.choose(&mut self.rng).expect("atoms are non-empty")),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..5) {
            0 => Formula::imp(self.formula_over(atoms, d), self.formula_over(atoms, d)),
            1 => Formula::conj(self.formula_over(atoms, d), self.formula_over(atoms, d)),
            2 => Formula::disj(self.formula_over(atoms, d), self.formula_over(atoms, d)),
            _ => Formula::boxed(self.formula_over(atoms, d)),
        }
    }

    fn small_formula(&mut self) -> Formula {
        let d = self.rng.gen_range(0..=1);
        self.formula(d)
    }

    fn hyp(&mut self, goal: &Formula) -> Term {
        if let Some((n, _)) = self.hyps.iter().find(|(_, f)| f == goal) {
            return Term::Var(n.clone());
        }
        let n = self.fresh();
        self.hyps.push((n.clone(), goal.clone()));
        Term::Var(n)
    }

    fn lookup(&mut self, scope: &[(Name, Formula)], goal: &Formula) -> Option<Term> {
        let found: Vec<&Name> = scope
            .iter()
            .chain(self.hyps.iter())
            .filter(|(_, f)| f == goal)
            .map(|(n, _)| n)
            .collect();
        found.choose(&mut self.rng).map(|n| Term::Var((*n).clone()))
    }

    /// A term proving `goal` from `scope` plus fresh free hypotheses.
    fn term(&mut self, scope: &mut Vec<(Name, Formula)>, goal: &Formula, fuel: usize) -> Term {
        if fuel == 0 {
            if let Some(v) = self.lookup(scope, goal) {
                return v;
            }
            return self.intro(scope, goal, 0);
        }
        let f = fuel - 1;
        match self.rng.gen_range(0..16) {
            0 | 1 => match self.lookup(scope, goal) {
                Some(v) => v,
                None => self.intro(scope, goal, f),
            },
            2..=6 => self.intro(scope, goal, f),
            7 | 8 => {
                let a = self.small_formula();
                let x = self.fresh();
                scope.push((x.clone(), a.clone()));
                let body = self.term(scope, goal, f);
                scope.pop();
                let arg = self.term(scope, &a, f);
                Term::app(Term::Lam(x, a, Box::new(body)), arg)
            }
            9 => {
                let other = self.small_formula();
                let mine = self.term(scope, goal, f);
                let theirs = self.term(scope, &other, f / 2);
                if self.rng.gen_bool(0.5) {
                    Term::proj1(Term::pair(mine, theirs))
                } else {
                    Term::proj2(Term::pair(theirs, mine))
                }
            }
            10 => {
                let (a, c) = (self.small_formula(), self.small_formula());
                let left = self.rng.gen_bool(0.5);
                let sum = Formula::disj(a.clone(), c.clone());
                let scrut = if left {
                    Term::inj1(sum, self.term(scope, &a, f / 2))
                } else {
                    Term::inj2(sum, self.term(scope, &c, f / 2))
                };
                self.case_on(scope, scrut, &a, &c, goal, f)
            }
            11 => {
                let (a, c) = (self.small_formula(), self.small_formula());
                let scrut = self.hyp(&Formula::disj(a.clone(), c.clone()));
                self.case_on(scope, scrut, &a, &c, goal, f)
            }
            12 => {
                let a = self.small_formula();
                let fun = self.hyp(&Formula::imp(a.clone(), goal.clone()));
                let arg = self.term(scope, &a, f);
                Term::app(fun, arg)
            }
            13 => {
                let e = self.term(scope, &Formula::Bot, f / 2);
                Term::exfalso(goal.clone(), e)
            }
            _ => match goal {
                Formula::Box(a) if self.rng.gen_bool(0.5) => {
                    // An iota redex: a box that only forwards its argument.
                    let x = self.fresh();
                    let arg = self.term(scope, goal, f);
                    Term::boxed(vec![Binding::new(&x, (**a).clone(), arg)], Term::Var(x))
                }
                Formula::Box(_) => self.boxed(scope, goal, f, true),
                _ => self.intro(scope, goal, f),
            },
        }
    }

    fn case_on(
        &mut self,
        scope: &mut Vec<(Name, Formula)>,
        scrut: Term,
        a: &Formula,
        c: &Formula,
        goal: &Formula,
        f: usize,
    ) -> Term {
        let (x, y) = (self.fresh(), self.fresh());
        scope.push((x.clone(), a.clone()));
        let l = self.term(scope, goal, f / 2);
        scope.pop();
        scope.push((y.clone(), c.clone()));
        let r = self.term(scope, goal, f / 2);
        scope.pop();
        Term::Case(Box::new(scrut), x, Box::new(l), y, Box::new(r))
    }

    /// The introduction rule for `goal`'s main connective, or a hypothesis.
    fn intro(&mut self, scope: &mut Vec<(Name, Formula)>, goal: &Formula, f: usize) -> Term {
        match goal {
            Formula::Impl(a, b) => {
                let x = self.fresh();
                scope.push((x.clone(), (**a).clone()));
                let body = self.term(scope, b, f);
                scope.pop();
                Term::Lam(x, (**a).clone(), Box::new(body))
            }
            Formula::Conj(a, b) => {
                let l = self.term(scope, a, f / 2);
                let r = self.term(scope, b, f / 2);
                Term::pair(l, r)
            }
            Formula::Disj(a, b) => {
                if self.rng.gen_bool(0.5) {
                    Term::inj1(goal.clone(), self.term(scope, a, f))
                } else {
                    Term::inj2(goal.clone(), self.term(scope, b, f))
                }
            }
            Formula::Top => {
                let any = self.small_formula();
                Term::triv(self.term(scope, &any, f / 2))
            }
            Formula::Box(_) => self.boxed(scope, goal, f, false),
            Formula::Atom(_) | Formula::Bot => match self.lookup(scope, goal) {
                Some(v) if self.rng.gen_bool(0.7) => v,
                _ => self.hyp(goal),
            },
        }
    }

    fn boxed(&mut self, scope: &mut Vec<(Name, Formula)>, goal: &Formula, f: usize, nest: bool) -> Term {
        let Formula::Box(a) = goal else {
            unreachable!("boxed is only called at box goals")
        };
        let n = if f == 0 { 0 } else { self.rng.gen_range(0..=2) };
        let mut bs = Vec::new();
        for _ in 0..n {
            let b = self.small_formula();
            let x = self.fresh();
            let arg = if nest {
                // A box fed straight into this one: a delta redex.
                self.boxed(scope, &Formula::boxed(b.clone()), f / 2, false)
            } else {
                self.term(scope, &Formula::boxed(b.clone()), f / 2)
            };
            bs.push(Binding::new(&x, b, arg));
        }
        let k = scope.len();
        scope.extend(bs.iter().map(|b| (b.var.clone(), b.annot.clone())));
        let body = self.term(scope, a, f);
        scope.truncate(k);
        Term::boxed(bs, body)
    }

    /// A well-typed term whose free variables are typed by the returned
    /// context.
    pub fn open_term(&mut self, goal: &Formula, fuel: usize) -> Sample {
        self.hyps.clear();
        let term = self.term(&mut Vec::new(), goal, fuel);
        let ctx = Context::from_entries(self.hyps.drain(..)).expect("hypothesis names are fresh");
        Sample {
            ctx,
            term,
            ty: goal.clone(),
        }
    }

    /// Abstracts the free hypotheses of an open sample, yielding a closed
    /// term of the corresponding implication.
    pub fn close(sample: Sample) -> Sample {
        let mut term = sample.term;
        let mut ty = sample.ty;
        let entries: Vec<(Name, Formula)> =
            sample.ctx.iter().map(|(n, f)| (n.clone(), f.clone())).collect();
        for (n, f) in entries.into_iter().rev() {
            term = Term::Lam(n, f.clone(), Box::new(term));
            ty = Formula::imp(f, ty);
        }
        Sample {
            ctx: Context::new(),
            term,
            ty,
        }
    }

    /// A closed term of a box, disjunction or boxed disjunction type, the
    /// inputs eligible for the extraction procedures.
    pub fn closed_eligible(&mut self, fuel: usize) -> Sample {
        let goal = self.small_formula();
        let inner = Gen::close(self.open_term(&goal, fuel));
        let other = self.small_formula();
        let left = self.rng.gen_bool(0.5);
        let disj = if left {
            Formula::disj(inner.ty.clone(), other)
        } else {
            Formula::disj(other, inner.ty.clone())
        };
        let inj = if left {
            Term::inj1(disj.clone(), inner.term.clone())
        } else {
            Term::inj2(disj.clone(), inner.term.clone())
        };
        let (term, ty) = match self.rng.gen_range(0..6) {
            0 => (inj, disj),
            1 => {
                // A beta redex whose normal form is the injection.
                let x = self.fresh();
                let body = if left {
                    Term::inj1(disj.clone(), Term::var(&x))
                } else {
                    Term::inj2(disj.clone(), Term::var(&x))
                };
                (
                    Term::app(Term::Lam(x, inner.ty.clone(), Box::new(body)), inner.term.clone()),
                    disj,
                )
            }
            2 => (Term::boxed(vec![], inner.term.clone()), Formula::boxed(inner.ty.clone())),
            3 => (Term::boxed(vec![], inj), Formula::boxed(disj)),
            4 => {
                let x = self.fresh();
                let arg = Term::boxed(vec![], inner.term.clone());
                let body = if left {
                    Term::inj1(disj.clone(), Term::var(&x))
                } else {
                    Term::inj2(disj.clone(), Term::var(&x))
                };
                (
                    Term::boxed(vec![Binding::new(&x, inner.ty.clone(), arg)], body),
                    Formula::boxed(disj),
                )
            }
            _ => {
                let x = self.fresh();
                let arg = Term::boxed(vec![], inj);
                let boxed = Formula::boxed(disj.clone());
                (
                    Term::boxed(vec![Binding::new(&x, disj, arg)], Term::var(&x)),
                    boxed,
                )
            }
        };
        Sample {
            ctx: Context::new(),
            term,
            ty,
        }
    }

    /// One corpus term of size at most [`CORPUS_MAX_SIZE`]. Roughly a third
    /// are closed.
    pub fn corpus_term(&mut self) -> Sample {
        loop {
            let kind = self.rng.gen_range(0..6);
            let fuel = self.rng.gen_range(2..=5);
            let s = match kind {
                0 => self.closed_eligible(fuel - 1),
                1 => {
                    let goal = self.formula(2);
                    Gen::close(self.open_term(&goal, fuel))
                }
                _ => {
                    let goal = self.formula(2);
                    self.open_term(&goal, fuel)
                }
            };
            if s.term.size() <= CORPUS_MAX_SIZE {
                return s;
            }
        }
    }

    /// A checking Hilbert proof in which every line has modus-ponens depth
    /// at most `max_depth`.
    pub fn hilbert_proof(&mut self, max_depth: usize) -> HilbertProof {
        let n_hyps = self.rng.gen_range(0..=2);
        let hyps: Vec<Formula> = (0..n_hyps).map(|_| self.small_formula()).collect();
        let mut lines: Vec<Line> = Vec::new();
        let mut depth: Vec<usize> = Vec::new();
        let target = self.rng.gen_range(2..=10);
        while lines.len() < target {
            let choice = self.rng.gen_range(0..10);
            if choice < 2 && !hyps.is_empty() {
                let j = self.rng.gen_range(0..hyps.len());
                lines.push(Line {
                    formula: hyps[j].clone(),
                    just: Justification::Hyp(j + 1),
                });
                depth.push(0);
            } else if choice < 5 || lines.is_empty() {
                let s = *AxiomScheme::ALL.choose(&mut self.rng).expect("schemes exist");
                let inst = self.instantiation(s, &Instantiation::new());
                lines.push(axiom_line(s, inst));
                depth.push(0);
            } else if let Some((m, k)) = self.mp_pair(&lines, &depth, max_depth) {
                push_mp(&mut lines, &mut depth, m, k);
            } else {
                // Pick an axiom whose antecedent is an existing line, then
                // detach it.
                let k = self.rng.gen_range(0..lines.len());
                if depth[k] >= max_depth {
                    continue;
                }
                let f = lines[k].formula.clone();
                let mut schemes = AxiomScheme::ALL.to_vec();
                schemes.shuffle(&mut self.rng);
                for s in schemes {
                    if let Some(bound) = match_antecedent(s, &f) {
                        let inst = self.instantiation(s, &bound);
                        lines.push(axiom_line(s, inst));
                        depth.push(0);
                        let m = lines.len() - 1;
                        push_mp(&mut lines, &mut depth, m, k);
                        break;
                    }
                }
            }
        }
        HilbertProof { hyps, lines }
    }

    fn instantiation(&mut self, s: AxiomScheme, bound: &Instantiation) -> Instantiation {
        let mut inst = Instantiation::new();
        for &m in s.metas() {
            let f = match bound.get(m) {
                Some(f) => f.clone(),
                None => self.small_formula(),
            };
            inst.set(m, f);
        }
        inst
    }

    fn mp_pair(&mut self, lines: &[Line], depth: &[usize], max_depth: usize) -> Option<(usize, usize)> {
        let mut pairs = Vec::new();
        for (m, lm) in lines.iter().enumerate() {
            if let Formula::Impl(x, _) = &lm.formula {
                for (k, lk) in lines.iter().enumerate() {
                    if **x == lk.formula && depth[m].max(depth[k]) < max_depth {
                        pairs.push((m, k));
                    }
                }
            }
        }
        pairs.choose(&mut self.rng).copied()
    }

    /// A model with at most `max_worlds` worlds and arbitrary relations;
    /// it need not satisfy any frame condition.
    pub fn model(&mut self, max_worlds: usize) -> KripkeModel {
        let n = self.rng.gen_range(1..=max_worlds.max(1));
        let names: Vec<Name> = (0..n).map(|i| format!("w{i}").into()).collect();
        let mut le = BTreeSet::new();
        let mut e = BTreeSet::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.rng.gen_bool(0.3) {
                    le.insert((a, b));
                }
                if self.rng.gen_bool(0.3) {
                    e.insert((a, b));
                }
            }
        }
        let mut val = BTreeMap::new();
        for p in ATOMS {
            if self.rng.gen_bool(0.7) {
                let ws: BTreeSet<usize> = (0..n).filter(|_| self.rng.gen_bool(0.5)).collect();
                val.insert(Name::from(p), ws);
            }
        }
        KripkeModel::new(names, le, e, val).expect("generated worlds are in range and distinct")
    }
}

fn axiom_line(s: AxiomScheme, inst: Instantiation) -> Line {
    Line {
        formula: s.instantiate(&inst).expect("instantiation covers the scheme"),
        just: Justification::Axiom(s, inst),
    }
}

/// Appends `lines[m] applied to lines[k]`, both 0-based.
fn push_mp(lines: &mut Vec<Line>, depth: &mut Vec<usize>, m: usize, k: usize) {
    let Formula::Impl(_, y) = &lines[m].formula else {
        unreachable!("the major premise is an implication")
    };
    lines.push(Line {
        formula: (**y).clone(),
        just: Justification::Mp(m + 1, k + 1),
    });
    depth.push(1 + depth[m].max(depth[k]));
}

/// Binds the scheme's metavariables so that its antecedent becomes `f`.
fn match_antecedent(s: AxiomScheme, f: &Formula) -> Option<Instantiation> {
    let template = s.instantiate(&Instantiation::of(
        &s.metas()
            .iter()
            .map(|&m| (m, Formula::atom(m.name())))
            .collect::<Vec<_>>(),
    ))?;
    let Formula::Impl(ante, _) = template else {
        return None;
    };
    let mut inst = Instantiation::new();
    matches(&ante, f, &mut inst).then_some(inst)
}

fn matches(pat: &Formula, f: &Formula, inst: &mut Instantiation) -> bool {
    match (pat, f) {
        (Formula::Atom(a), _) if Meta::from_name(a).is_some() => {
            let m = Meta::from_name(a).expect("checked above");
            match inst.get(m) {
                Some(g) => g == f,
                None => {
                    inst.set(m, f.clone());
                    true
                }
            }
        }
        (Formula::Impl(a, b), Formula::Impl(c, d))
        | (Formula::Conj(a, b), Formula::Conj(c, d))
        | (Formula::Disj(a, b), Formula::Disj(c, d)) => matches(a, c, inst) && matches(b, d, inst),
        (Formula::Box(a), Formula::Box(c)) => matches(a, c, inst),
        _ => pat == f,
    }
}

/// The first `count` corpus terms for `seed`.
pub fn corpus(seed: u64, count: usize) -> Vec<Sample> {
    let mut g = Gen::new(seed);
    (0..count).map(|_| g.corpus_term()).collect()
}
