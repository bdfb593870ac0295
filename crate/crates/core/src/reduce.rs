//! One-step reduction, normalization with traces, and equality of proofs as
//! equality of normal forms.
//!
//! The default rule set is the beta rules together with iota and delta.
//! [`Mode::Perm`] adds commuting conversions for `case` and `abort`, and
//! [`Mode::Eta`] adds eta contraction for functions and pairs.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::syntax::{
    alpha_eq, fresh_into, rename_free, substitute_avoiding, substitute_in_scope, Binding, Formula,
    Name, NameSet, Path, Term,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleTag {
    BetaArrow,
    BetaPair1,
    BetaPair2,
    BetaCase1,
    BetaCase2,
    Iota,
    Delta,
    PermCase,
    PermAbort,
    Eta,
}

impl RuleTag {
    pub fn name(self) -> &'static str {
        match self {
            RuleTag::BetaArrow => "BetaArrow",
            RuleTag::BetaPair1 => "BetaPair1",
            RuleTag::BetaPair2 => "BetaPair2",
            RuleTag::BetaCase1 => "BetaCase1",
            RuleTag::BetaCase2 => "BetaCase2",
            RuleTag::Iota => "Iota",
            RuleTag::Delta => "Delta",
            RuleTag::PermCase => "PermCase",
            RuleTag::PermAbort => "PermAbort",
            RuleTag::Eta => "Eta",
        }
    }
}

impl fmt::Display for RuleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    #[default]
    Default,
    Perm,
    Eta,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Strategy {
    #[default]
    LeftmostOutermost,
    RightmostInnermost,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub tag: RuleTag,
    pub path: Path,
    pub result: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionTrace {
    pub initial: Term,
    pub steps: Vec<TraceStep>,
    /// The last term is normal.
    pub terminal: bool,
}

impl ReductionTrace {
    pub fn last(&self) -> &Term {
        self.steps.last().map_or(&self.initial, |s| &s.result)
    }
}

impl fmt::Display for ReductionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.steps.iter().enumerate() {
            writeln!(f, "#{} {} @ {} ⇒ {}", k + 1, s.tag, s.path, s.result)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no normal form reached within {max_steps} steps")]
pub struct StepBudgetExceeded {
    pub max_steps: usize,
    pub trace: Box<ReductionTrace>,
}

pub const DEFAULT_MAX_STEPS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormalizeOptions {
    pub strategy: Strategy,
    pub mode: Mode,
    pub max_steps: usize,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            strategy: Strategy::LeftmostOutermost,
            mode: Mode::Default,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

/// Renames binder `x` of `body` when `x` occurs anywhere in `extra`, which
/// is about to be moved under it.
fn rebind(x: &Name, body: &Term, extra: &[&Term], avoid: &mut NameSet) -> (Name, Term) {
    if extra.iter().any(|e| e.all_names().contains(x)) {
        let fresh = fresh_into(x, avoid);
        let body = rename_free(body, x, &fresh);
        (fresh, body)
    } else {
        (x.clone(), body.clone())
    }
}

/// Pushes an eliminator through both branches of a case.
fn perm_case(
    scrut: &Term,
    x: &Name,
    u: &Term,
    y: &Name,
    v: &Term,
    extra: &[&Term],
    avoid: &mut NameSet,
    elim: impl Fn(Term) -> Term,
) -> Term {
    let (x, u) = rebind(x, u, extra, avoid);
    let (y, v) = rebind(y, v, extra, avoid);
    Term::Case(Box::new(scrut.clone()), x, Box::new(elim(u)), y, Box::new(elim(v)))
}

/// The delta contraction of `box bs in r` at the binder `i`, whose argument
/// must itself be a box.
fn delta(bs: &[Binding], r: &Term, i: usize, avoid: &mut NameSet) -> Term {
    let Term::BoxIntro(inner, w) = &bs[i].arg else {
        unreachable!("delta needs a box argument");
    };
    let mut clash: NameSet = bs
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, b)| b.var.clone())
        .collect();
    clash.extend(r.all_names());
    let mut w = (**w).clone();
    let mut migrated = Vec::with_capacity(inner.len());
    for c in inner {
        let var = if clash.contains(&c.var) {
            let fresh = fresh_into(&c.var, avoid);
            w = rename_free(&w, &c.var, &fresh);
            fresh
        } else {
            c.var.clone()
        };
        clash.insert(var.clone());
        migrated.push(Binding {
            var,
            annot: c.annot.clone(),
            arg: c.arg.clone(),
        });
    }
    let mut bindings: Vec<Binding> = bs[..i].to_vec();
    bindings.extend(migrated);
    bindings.extend(bs[i + 1..].iter().cloned());
    let scope: Vec<Name> = bindings.iter().map(|b| b.var.clone()).collect();
    let body = substitute_in_scope(r, &bs[i].var, &w, &scope, avoid);
    Term::BoxIntro(bindings, Box::new(body))
}

/// Contractions of `t` at its root. With `all` false, stops after the
/// first rule in priority order (iota before delta, leftmost delta first).
fn contract_root(t: &Term, mode: Mode, avoid: &mut NameSet, all: bool) -> Vec<(Term, RuleTag)> {
    let mut out = Vec::new();
    match t {
        Term::App(f, s) => match &**f {
            Term::Lam(x, _, b) => {
                out.push((substitute_avoiding(b, x, s, avoid), RuleTag::BetaArrow));
            }
            Term::Case(scrut, x, u, y, v) if mode == Mode::Perm => {
                let r = perm_case(scrut, x, u, y, v, &[s], avoid, |b| Term::app(b, (**s).clone()));
                out.push((r, RuleTag::PermCase));
            }
            Term::Exfalso(Formula::Impl(_, b), e) if mode == Mode::Perm => {
                out.push((Term::exfalso((**b).clone(), (**e).clone()), RuleTag::PermAbort));
            }
            _ => {}
        },
        Term::Proj1(p) | Term::Proj2(p) => {
            let first = matches!(t, Term::Proj1(_));
            match &**p {
                Term::Pair(a, b) => {
                    if first {
                        out.push(((**a).clone(), RuleTag::BetaPair1));
                    } else {
                        out.push(((**b).clone(), RuleTag::BetaPair2));
                    }
                }
                Term::Case(scrut, x, u, y, v) if mode == Mode::Perm => {
                    let r = perm_case(scrut, x, u, y, v, &[], avoid, |b| {
                        if first {
                            Term::proj1(b)
                        } else {
                            Term::proj2(b)
                        }
                    });
                    out.push((r, RuleTag::PermCase));
                }
                Term::Exfalso(Formula::Conj(a, b), e) if mode == Mode::Perm => {
                    let annot = if first { a } else { b };
                    out.push((Term::exfalso((**annot).clone(), (**e).clone()), RuleTag::PermAbort));
                }
                _ => {}
            }
        }
        Term::Case(scrut, x, u, y, v) => match &**scrut {
            Term::Inj1(_, a) => {
                out.push((substitute_avoiding(u, x, a, avoid), RuleTag::BetaCase1));
            }
            Term::Inj2(_, a) => {
                out.push((substitute_avoiding(v, y, a, avoid), RuleTag::BetaCase2));
            }
            Term::Case(s2, x2, u2, y2, v2) if mode == Mode::Perm => {
                let outer = |b: Term| {
                    Term::Case(Box::new(b), x.clone(), u.clone(), y.clone(), v.clone())
                };
                let vx = Term::Var(x.clone());
                let vy = Term::Var(y.clone());
                let extra: [&Term; 4] = [u, v, &vx, &vy];
                let r = perm_case(s2, x2, u2, y2, v2, &extra, avoid, outer);
                out.push((r, RuleTag::PermCase));
            }
            _ => {}
        },
        Term::Exfalso(c, e) if mode == Mode::Perm => match &**e {
            Term::Case(scrut, x, u, y, v) => {
                let r = perm_case(scrut, x, u, y, v, &[], avoid, |b| Term::exfalso(c.clone(), b));
                out.push((r, RuleTag::PermCase));
            }
            Term::Exfalso(_, inner) => {
                out.push((Term::exfalso(c.clone(), (**inner).clone()), RuleTag::PermAbort));
            }
            _ => {}
        },
        Term::BoxIntro(bs, body) => {
            if let [b] = &bs[..] {
                if matches!(&**body, Term::Var(x) if *x == b.var) {
                    out.push((b.arg.clone(), RuleTag::Iota));
                    if !all {
                        return out;
                    }
                }
            }
            for (i, b) in bs.iter().enumerate() {
                if matches!(b.arg, Term::BoxIntro(..)) {
                    out.push((delta(bs, body, i, avoid), RuleTag::Delta));
                    if !all {
                        return out;
                    }
                }
            }
        }
        Term::Lam(x, _, body) if mode == Mode::Eta => {
            if let Term::App(f, a) = &**body {
                if matches!(&**a, Term::Var(y) if y == x) && !f.is_free(x) {
                    out.push(((**f).clone(), RuleTag::Eta));
                }
            }
        }
        Term::Pair(a, b) if mode == Mode::Eta => {
            if let (Term::Proj1(p), Term::Proj2(q)) = (&**a, &**b) {
                if alpha_eq(p, q) {
                    out.push(((**p).clone(), RuleTag::Eta));
                }
            }
        }
        _ => {}
    }
    out
}

fn find(
    t: &Term,
    strategy: Strategy,
    mode: Mode,
    avoid: &mut NameSet,
    path: &mut Vec<usize>,
) -> Option<(Term, RuleTag)> {
    if strategy == Strategy::LeftmostOutermost {
        if let Some(r) = contract_root(t, mode, avoid, false).pop() {
            return Some(r);
        }
    }
    let children = t.children();
    let order: Box<dyn Iterator<Item = usize>> = match strategy {
        Strategy::LeftmostOutermost => Box::new(0..children.len()),
        Strategy::RightmostInnermost => Box::new((0..children.len()).rev()),
    };
    for i in order {
        path.push(i);
        if let Some(r) = find(children[i], strategy, mode, avoid, path) {
            return Some(r);
        }
        path.pop();
    }
    if strategy == Strategy::RightmostInnermost {
        return contract_root(t, mode, avoid, false).pop();
    }
    None
}

fn replace_at(t: &Term, path: &[usize], new: Term) -> Term {
    let mut out = t.clone();
    let mut cur = &mut out;
    for &i in path {
        cur = cur.child_mut(i).expect("path points into the term");
    }
    *cur = new;
    out
}

/// The leftmost-outermost contraction in the default rule set.
pub fn step(t: &Term) -> Option<(Term, RuleTag, Path)> {
    step_with(t, Strategy::LeftmostOutermost, Mode::Default)
}

pub fn step_with(t: &Term, strategy: Strategy, mode: Mode) -> Option<(Term, RuleTag, Path)> {
    let mut avoid = t.all_names();
    let mut path = Vec::new();
    let (new, tag) = find(t, strategy, mode, &mut avoid, &mut path)?;
    Some((replace_at(t, &path, new), tag, Path(path)))
}

/// Every one-step reduct, one per redex and applicable rule, in pre-order.
pub fn successors(t: &Term, mode: Mode) -> Vec<(Term, RuleTag, Path)> {
    let mut avoid = t.all_names();
    let mut out = Vec::new();
    let mut path = Vec::new();
    collect_successors(t, t, mode, &mut avoid, &mut path, &mut out);
    out
}

fn collect_successors(
    root: &Term,
    t: &Term,
    mode: Mode,
    avoid: &mut NameSet,
    path: &mut Vec<usize>,
    out: &mut Vec<(Term, RuleTag, Path)>,
) {
    for (new, tag) in contract_root(t, mode, avoid, true) {
        out.push((replace_at(root, path, new), tag, Path(path.clone())));
    }
    for (i, c) in t.children().into_iter().enumerate() {
        path.push(i);
        collect_successors(root, c, mode, avoid, path, out);
        path.pop();
    }
}

pub fn is_normal(t: &Term, mode: Mode) -> bool {
    step_with(t, Strategy::LeftmostOutermost, mode).is_none()
}

/// Leftmost-outermost normalization in the default rule set.
pub fn normalize(t: &Term, max_steps: usize) -> Result<(Term, ReductionTrace), StepBudgetExceeded> {
    normalize_with(
        t,
        &NormalizeOptions {
            max_steps,
            ..NormalizeOptions::default()
        },
    )
}

pub fn normalize_with(
    t: &Term,
    opts: &NormalizeOptions,
) -> Result<(Term, ReductionTrace), StepBudgetExceeded> {
    let mut trace = ReductionTrace {
        initial: t.clone(),
        steps: Vec::new(),
        terminal: false,
    };
    let mut cur = t.clone();
    loop {
        match step_with(&cur, opts.strategy, opts.mode) {
            None => {
                trace.terminal = true;
                return Ok((cur, trace));
            }
            Some(_) if trace.steps.len() == opts.max_steps => {
                return Err(StepBudgetExceeded {
                    max_steps: opts.max_steps,
                    trace: Box::new(trace),
                });
            }
            Some((next, tag, path)) => {
                trace.steps.push(TraceStep {
                    tag,
                    path,
                    result: next.clone(),
                });
                cur = next;
            }
        }
    }
}

/// Equality of proofs: alpha-equal default normal forms.
pub fn eq_mod_box(t: &Term, u: &Term) -> Result<bool, StepBudgetExceeded> {
    let (nt, _) = normalize(t, DEFAULT_MAX_STEPS)?;
    let (nu, _) = normalize(u, DEFAULT_MAX_STEPS)?;
    Ok(alpha_eq(&nt, &nu))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Joinability {
    Joinable,
    NotJoinable,
    /// The reachable sets were cut off at the budget before a meet was found.
    BudgetExhausted,
}

struct Explorer {
    seen: HashSet<Term>,
    queue: VecDeque<Term>,
}

impl Explorer {
    fn new(t: &Term) -> Explorer {
        let key = t.canonical();
        Explorer {
            seen: HashSet::from([key.clone()]),
            queue: VecDeque::from([key]),
        }
    }

    /// Expands one term; true when it reaches a term the other side has
    /// already seen.
    fn expand(&mut self, other: &Explorer, budget: usize, mode: Mode) -> bool {
        let Some(t) = self.queue.pop_front() else {
            return false;
        };
        for (next, _, _) in successors(&t, mode) {
            if self.seen.len() >= budget {
                self.queue.push_front(t);
                return false;
            }
            let key = next.canonical();
            if self.seen.insert(key.clone()) {
                if other.seen.contains(&key) {
                    return true;
                }
                self.queue.push_back(key);
            }
        }
        false
    }

    fn done(&self) -> bool {
        self.queue.is_empty()
    }

    fn at_budget(&self, budget: usize) -> bool {
        !self.queue.is_empty() && self.seen.len() >= budget
    }
}

/// Searches for a common reduct of `t` and `u`, exploring at most `budget`
/// distinct terms (up to alpha) from each side.
pub fn joinable(t: &Term, u: &Term, budget: usize, mode: Mode) -> Joinability {
    let mut left = Explorer::new(t);
    let mut right = Explorer::new(u);
    if left.seen.iter().any(|k| right.seen.contains(k)) {
        return Joinability::Joinable;
    }
    loop {
        let left_live = !left.done() && !left.at_budget(budget);
        let right_live = !right.done() && !right.at_budget(budget);
        if !left_live && !right_live {
            break;
        }
        if left_live && left.expand(&right, budget, mode) {
            return Joinability::Joinable;
        }
        if right_live && right.expand(&left, budget, mode) {
            return Joinability::Joinable;
        }
    }
    if left.at_budget(budget) || right.at_budget(budget) {
        Joinability::BudgetExhausted
    } else {
        Joinability::NotJoinable
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_formula, parse_term};
    use crate::syntax::Context;
    use crate::typeck::infer;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn ctx(entries: &[(&str, &str)]) -> Context {
        Context::from_entries(entries.iter().map(|(n, f)| (*n, parse_formula(f).unwrap()))).unwrap()
    }

    #[test]
    fn iota_example() {
        let (r, tag, path) = step(&t("box [x:p = f] in x")).unwrap();
        assert_eq!((r, tag, path), (t("f"), RuleTag::Iota, Path::root()));
    }

    #[test]
    fn iota_takes_priority_over_delta() {
        let src = t("box [x:p = (box [] in a)] in x");
        let (r, tag, _) = step(&src).unwrap();
        assert_eq!((r.clone(), tag), (t("box [] in a"), RuleTag::Iota));
        let all = successors(&src, Mode::Default);
        assert!(all.iter().any(|(r2, tag, _)| *tag == RuleTag::Delta && alpha_eq(r2, &r)));
        let (nf, _) = normalize(&src, 10).unwrap();
        assert_eq!(nf, t("box [] in a"));
    }

    #[test]
    fn delta_example() {
        let c = ctx(&[("f", "[]p"), ("g", "p -> q"), ("h", "[]s0")]);
        let src = t("box [b:q = (box [x:p = f] in g x), r:s0 = h] in <b, r>");
        let (r, tag, path) = step(&src).unwrap();
        assert_eq!(tag, RuleTag::Delta);
        assert!(path.is_root());
        assert_eq!(r, t("box [x:p = f, r:s0 = h] in <g x, r>"));
        assert_eq!(infer(&c, &src), infer(&c, &r));
    }

    #[test]
    fn delta_freshens_clashing_binders() {
        let c = ctx(&[("f", "[]p"), ("g", "p -> q"), ("k", "[]p")]);
        let src = t("box [b:q = (box [x:p = f] in g x), x:p = k] in <b, x>");
        let (r, tag, _) = step(&src).unwrap();
        assert_eq!(tag, RuleTag::Delta);
        assert_eq!(r, t("box [x':p = f, x:p = k] in <g x', x>"));
        assert_eq!(infer(&c, &src), infer(&c, &r));
    }

    #[test]
    fn beta_examples() {
        assert_eq!(step(&t("(\\x:p. x) y")).unwrap().0, t("y"));
        assert_eq!(step(&t("(\\x:p. x) y")).unwrap().1, RuleTag::BetaArrow);
        let (nf, trace) = normalize(&t("(\\f:p->p. f y) (\\x:p. x)"), 100).unwrap();
        assert_eq!(nf, t("y"));
        assert_eq!(trace.steps.len(), 2);
        assert!(trace.terminal);
        assert_eq!(step(&t("snd <a, b>")).unwrap().1, RuleTag::BetaPair2);
        let (r, tag, _) = step(&t("case inr[p \\/ q] b of { inl x -> x | inr y -> <y, y> }")).unwrap();
        assert_eq!((r, tag), (t("<b, b>"), RuleTag::BetaCase2));
    }

    #[test]
    fn normal_terms_stay() {
        let src = t("\\x:p. box [] in x");
        let (nf, trace) = normalize(&src, 10).unwrap();
        assert_eq!(nf, src);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn beta_does_not_create_box_shadowing() {
        let c = ctx(&[("z", "[]p")]);
        let src = t("(\\x:[]p. \\y:q. x) (box [y:p = z] in y)");
        let (nf, _) = normalize(&src, 10).unwrap();
        assert_eq!(infer(&c, &src), infer(&c, &nf));
    }

    #[test]
    fn budget_exceeded_is_reported() {
        let err = normalize(&t("(\\f:p->p. f y) (\\x:p. x)"), 1).unwrap_err();
        assert_eq!(err.max_steps, 1);
        assert_eq!(err.trace.steps.len(), 1);
    }

    #[test]
    fn trace_format() {
        let (_, trace) = normalize(&t("fst <(\\x:p. x) y, z>"), 10).unwrap();
        assert_eq!(trace.to_string(), "#1 BetaPair1 @ root ⇒ (\\x:p. x) y\n#2 BetaArrow @ root ⇒ y\n");
        let (_, trace) =
            normalize_with(&t("<z, (\\x:p. x) y>"), &NormalizeOptions::default()).unwrap();
        assert_eq!(trace.to_string(), "#1 BetaArrow @ 1 ⇒ <z, y>\n");
    }

    #[test]
    fn strategies_pick_different_redexes() {
        let src = t("fst <(\\x:p. x) y, z>");
        let lo = step_with(&src, Strategy::LeftmostOutermost, Mode::Default).unwrap();
        let ri = step_with(&src, Strategy::RightmostInnermost, Mode::Default).unwrap();
        assert_eq!(lo.1, RuleTag::BetaPair1);
        assert_eq!(ri.1, RuleTag::BetaArrow);
        assert_eq!(ri.2, Path(vec![0, 0]));
    }

    #[test]
    fn eq_mod_box_examples() {
        assert_eq!(eq_mod_box(&t("box [x:p = f] in x"), &t("f")), Ok(true));
        assert_eq!(eq_mod_box(&t("\\x:p. x"), &t("\\y:p. y")), Ok(true));
        assert_eq!(eq_mod_box(&t("inl[p \\/ q] a"), &t("inr[p \\/ q] b")), Ok(false));
    }

    #[test]
    fn joinable_examples() {
        let src = t("(\\x:p. fst <x, x>) y");
        let succ = successors(&src, Mode::Default);
        assert_eq!(succ.len(), 2);
        assert_eq!(joinable(&succ[0].0, &succ[1].0, 50, Mode::Default), Joinability::Joinable);
        assert_eq!(joinable(&src, &src, 1, Mode::Default), Joinability::Joinable);
        assert_eq!(joinable(&t("a"), &t("b"), 50, Mode::Default), Joinability::NotJoinable);
        let big = t("(\\f:p->p. f (f (f y))) (\\x:p. x)");
        assert_eq!(joinable(&big, &t("z"), 2, Mode::Default), Joinability::BudgetExhausted);
    }

    #[test]
    fn permutations_and_eta() {
        let c = ctx(&[("d", "p \\/ q"), ("a", "r"), ("e", "Bot")]);
        let src = t("case d of { inl x -> \\z:r. z | inr y -> \\z:r. z } a");
        let (r, tag, _) = step_with(&src, Strategy::LeftmostOutermost, Mode::Perm).unwrap();
        assert_eq!(tag, RuleTag::PermCase);
        assert_eq!(infer(&c, &src), infer(&c, &r));
        assert!(step(&src).is_none());
        let src = t("fst (abort[r /\\ q] e)");
        let (r, tag, _) = step_with(&src, Strategy::LeftmostOutermost, Mode::Perm).unwrap();
        assert_eq!((r, tag), (t("abort[r] e"), RuleTag::PermAbort));
        let (r, tag, _) = step_with(&t("\\x:p. f x"), Strategy::LeftmostOutermost, Mode::Eta).unwrap();
        assert_eq!((r, tag), (t("f"), RuleTag::Eta));
        assert!(step_with(&t("\\x:p. x x"), Strategy::LeftmostOutermost, Mode::Eta).is_none());
        let (r, _, _) = step_with(&t("<fst w, snd w>"), Strategy::LeftmostOutermost, Mode::Eta).unwrap();
        assert_eq!(r, t("w"));
    }

    #[test]
    fn perm_renames_captured_binder() {
        let c = ctx(&[("d", "p \\/ q"), ("x", "r")]);
        let src = t("case d of { inl x -> \\z:r. z | inr y -> \\z:r. z } x");
        let (r, _, _) = step_with(&src, Strategy::LeftmostOutermost, Mode::Perm).unwrap();
        assert_eq!(infer(&c, &src), infer(&c, &r));
        assert!(r.free_vars().contains("x"));
    }
}
