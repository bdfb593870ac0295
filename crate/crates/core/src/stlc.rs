//! Simply typed lambda calculus with unit, empty, product and sum types,
//! and the erasure of modal terms into it.
//!
//! Boxes erase to continuation nests over a reserved answer type `Q`, so a
//! normalizing STLC makes an independent oracle for modal reduction.
//! Terms here are unannotated; typing is by unification.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::reduce::Strategy;
use crate::syntax::{fresh_into, Context, Formula, Name, NameSet, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StlcType {
    Unit,
    Empty,
    Atom(Name),
    /// The answer type of erased boxes, distinct from every atom.
    Q,
    Arrow(Box<StlcType>, Box<StlcType>),
    Product(Box<StlcType>, Box<StlcType>),
    Sum(Box<StlcType>, Box<StlcType>),
}

impl StlcType {
    pub fn arrow(a: StlcType, b: StlcType) -> StlcType {
        StlcType::Arrow(Box::new(a), Box::new(b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StlcTerm {
    Var(Name),
    Lam(Name, Box<StlcTerm>),
    App(Box<StlcTerm>, Box<StlcTerm>),
    Pair(Box<StlcTerm>, Box<StlcTerm>),
    Fst(Box<StlcTerm>),
    Snd(Box<StlcTerm>),
    Inl(Box<StlcTerm>),
    Inr(Box<StlcTerm>),
    Case(Box<StlcTerm>, Name, Box<StlcTerm>, Name, Box<StlcTerm>),
    Abort(Box<StlcTerm>),
    Triv(Box<StlcTerm>),
}

use StlcTerm as S;

fn bx<T>(t: T) -> Box<T> {
    Box::new(t)
}

impl StlcTerm {
    pub fn var(x: &str) -> StlcTerm {
        S::Var(x.into())
    }

    pub fn lam(x: &str, b: StlcTerm) -> StlcTerm {
        S::Lam(x.into(), bx(b))
    }

    pub fn app(f: StlcTerm, a: StlcTerm) -> StlcTerm {
        S::App(bx(f), bx(a))
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn children(&self) -> Vec<&StlcTerm> {
        match self {
            S::Var(_) => vec![],
            S::Lam(_, b) => vec![b],
            S::App(a, b) | S::Pair(a, b) => vec![a, b],
            S::Fst(a) | S::Snd(a) | S::Inl(a) | S::Inr(a) | S::Abort(a) | S::Triv(a) => vec![a],
            S::Case(s, _, u, _, v) => vec![s, u, v],
        }
    }

    fn child_mut(&mut self, i: usize) -> &mut StlcTerm {
        match (self, i) {
            (S::Lam(_, b), 0) => b,
            (S::App(a, _) | S::Pair(a, _), 0) => a,
            (S::App(_, b) | S::Pair(_, b), 1) => b,
            (S::Fst(a) | S::Snd(a) | S::Inl(a) | S::Inr(a) | S::Abort(a) | S::Triv(a), 0) => a,
            (S::Case(s, _, _, _, _), 0) => s,
            (S::Case(_, _, u, _, _), 1) => u,
            (S::Case(_, _, _, _, v), 2) => v,
            _ => panic!("no such child"),
        }
    }

    pub fn is_free(&self, x: &str) -> bool {
        match self {
            S::Var(y) => &**y == x,
            S::Lam(y, b) => &**y != x && b.is_free(x),
            S::Case(s, y, u, z, v) => {
                s.is_free(x) || (&**y != x && u.is_free(x)) || (&**z != x && v.is_free(x))
            }
            _ => self.children().iter().any(|c| c.is_free(x)),
        }
    }

    pub fn free_vars(&self) -> NameSet {
        fn go(t: &StlcTerm, bound: &mut Vec<Name>, out: &mut NameSet) {
            match t {
                S::Var(x) => {
                    if !bound.contains(x) {
                        out.insert(x.clone());
                    }
                }
                S::Lam(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                S::Case(s, x, u, y, v) => {
                    go(s, bound, out);
                    bound.push(x.clone());
                    go(u, bound, out);
                    bound.pop();
                    bound.push(y.clone());
                    go(v, bound, out);
                    bound.pop();
                }
                _ => {
                    for c in t.children() {
                        go(c, bound, out);
                    }
                }
            }
        }
        let mut out = NameSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn all_names(&self) -> NameSet {
        fn go(t: &StlcTerm, out: &mut NameSet) {
            match t {
                S::Var(x) | S::Lam(x, _) => {
                    out.insert(x.clone());
                }
                S::Case(_, x, _, y, _) => {
                    out.insert(x.clone());
                    out.insert(y.clone());
                }
                _ => {}
            }
            for c in t.children() {
                go(c, out);
            }
        }
        let mut out = NameSet::new();
        go(self, &mut out);
        out
    }

    /// Alpha-normal representative with bound variables named by depth.
    pub fn canonical(&self) -> StlcTerm {
        fn lookup(env: &[(Name, Name)], x: &Name) -> Name {
            env.iter()
                .rev()
                .find(|(a, _)| a == x)
                .map_or_else(|| x.clone(), |(_, b)| b.clone())
        }
        fn go(t: &StlcTerm, env: &mut Vec<(Name, Name)>) -> StlcTerm {
            let bind = |env: &mut Vec<(Name, Name)>, x: &Name| {
                let n: Name = format!("#{}", env.len()).into();
                env.push((x.clone(), n.clone()));
                n
            };
            match t {
                S::Var(x) => S::Var(lookup(env, x)),
                S::Lam(x, b) => {
                    let n = bind(env, x);
                    let b = go(b, env);
                    env.pop();
                    S::Lam(n, bx(b))
                }
                S::Case(s, x, u, y, v) => {
                    let s = go(s, env);
                    let nx = bind(env, x);
                    let u = go(u, env);
                    env.pop();
                    let ny = bind(env, y);
                    let v = go(v, env);
                    env.pop();
                    S::Case(bx(s), nx, bx(u), ny, bx(v))
                }
                _ => map_children(t, |c| go(c, env)),
            }
        }
        go(self, &mut Vec::new())
    }
}

pub fn stlc_alpha_eq(a: &StlcTerm, b: &StlcTerm) -> bool {
    a.canonical() == b.canonical()
}

/// Rebuilds a binder-free node with `f` applied to its children.
fn map_children(t: &StlcTerm, mut f: impl FnMut(&StlcTerm) -> StlcTerm) -> StlcTerm {
    match t {
        S::App(a, b) => S::App(bx(f(a)), bx(f(b))),
        S::Pair(a, b) => S::Pair(bx(f(a)), bx(f(b))),
        S::Fst(a) => S::Fst(bx(f(a))),
        S::Snd(a) => S::Snd(bx(f(a))),
        S::Inl(a) => S::Inl(bx(f(a))),
        S::Inr(a) => S::Inr(bx(f(a))),
        S::Abort(a) => S::Abort(bx(f(a))),
        S::Triv(a) => S::Triv(bx(f(a))),
        _ => t.clone(),
    }
}

fn rename_free(t: &StlcTerm, from: &str, to: &Name) -> StlcTerm {
    match t {
        S::Var(x) if &**x == from => S::Var(to.clone()),
        S::Var(_) => t.clone(),
        S::Lam(x, b) if &**x == from => t.clone(),
        S::Lam(x, b) => S::Lam(x.clone(), bx(rename_free(b, from, to))),
        S::Case(s, x, u, y, v) => S::Case(
            bx(rename_free(s, from, to)),
            x.clone(),
            bx(if &**x == from { (**u).clone() } else { rename_free(u, from, to) }),
            y.clone(),
            bx(if &**y == from { (**v).clone() } else { rename_free(v, from, to) }),
        ),
        _ => map_children(t, |c| rename_free(c, from, to)),
    }
}

/// Capture-avoiding `t[s/x]`; fresh names are drawn outside `avoid`.
fn subst(t: &StlcTerm, x: &str, s: &StlcTerm, s_free: &NameSet, avoid: &mut NameSet) -> StlcTerm {
    fn under(
        y: &Name,
        b: &StlcTerm,
        x: &str,
        s: &StlcTerm,
        s_free: &NameSet,
        avoid: &mut NameSet,
    ) -> (Name, StlcTerm) {
        if &**y == x || !b.is_free(x) {
            return (y.clone(), b.clone());
        }
        if s_free.contains(y) {
            let fresh = fresh_into(y, avoid);
            let b = rename_free(b, y, &fresh);
            let b = subst(&b, x, s, s_free, avoid);
            (fresh, b)
        } else {
            (y.clone(), subst(b, x, s, s_free, avoid))
        }
    }
    match t {
        S::Var(y) if &**y == x => s.clone(),
        S::Var(_) => t.clone(),
        S::Lam(y, b) => {
            let (y, b) = under(y, b, x, s, s_free, avoid);
            S::Lam(y, bx(b))
        }
        S::Case(c, y, u, z, v) => {
            let c = subst(c, x, s, s_free, avoid);
            let (y, u) = under(y, u, x, s, s_free, avoid);
            let (z, v) = under(z, v, x, s, s_free, avoid);
            S::Case(bx(c), y, bx(u), z, bx(v))
        }
        _ => map_children(t, |c| subst(c, x, s, s_free, avoid)),
    }
}

pub fn stlc_substitute(t: &StlcTerm, x: &str, s: &StlcTerm) -> StlcTerm {
    let mut avoid = t.all_names();
    avoid.extend(s.all_names());
    subst(t, x, s, &s.free_vars(), &mut avoid)
}

/// `|A|`: homomorphic except `|[]A| = (|A| -> Q) -> Q`.
pub fn erase_formula(f: &Formula) -> StlcType {
    match f {
        Formula::Atom(p) => StlcType::Atom(p.clone()),
        Formula::Top => StlcType::Unit,
        Formula::Bot => StlcType::Empty,
        Formula::Impl(a, b) => StlcType::arrow(erase_formula(a), erase_formula(b)),
        Formula::Conj(a, b) => StlcType::Product(bx(erase_formula(a)), bx(erase_formula(b))),
        Formula::Disj(a, b) => StlcType::Sum(bx(erase_formula(a)), bx(erase_formula(b))),
        Formula::Box(a) => StlcType::arrow(
            StlcType::arrow(erase_formula(a), StlcType::Q),
            StlcType::Q,
        ),
    }
}

/// `|t|`: homomorphic on the propositional constructors;
/// `box [x1 = t1, ..., xn = tn] in s` becomes
/// `\k. |t1| (\x1. ... |tn| (\xn. k |s|))` with `k` fresh.
pub fn erase_term(t: &Term) -> StlcTerm {
    let mut avoid = t.all_names();
    erase(t, &mut avoid)
}

fn erase(t: &Term, avoid: &mut NameSet) -> StlcTerm {
    match t {
        Term::Var(x) => S::Var(x.clone()),
        Term::Lam(x, _, b) => S::Lam(x.clone(), bx(erase(b, avoid))),
        Term::App(a, b) => S::App(bx(erase(a, avoid)), bx(erase(b, avoid))),
        Term::Pair(a, b) => S::Pair(bx(erase(a, avoid)), bx(erase(b, avoid))),
        Term::Proj1(a) => S::Fst(bx(erase(a, avoid))),
        Term::Proj2(a) => S::Snd(bx(erase(a, avoid))),
        Term::Inj1(_, a) => S::Inl(bx(erase(a, avoid))),
        Term::Inj2(_, a) => S::Inr(bx(erase(a, avoid))),
        Term::Case(s, x, u, y, v) => S::Case(
            bx(erase(s, avoid)),
            x.clone(),
            bx(erase(u, avoid)),
            y.clone(),
            bx(erase(v, avoid)),
        ),
        Term::Exfalso(_, a) => S::Abort(bx(erase(a, avoid))),
        Term::Triv(a) => S::Triv(bx(erase(a, avoid))),
        Term::BoxIntro(bs, body) => {
            let k: Name = if avoid.contains("k") {
                fresh_into("k", avoid)
            } else {
                avoid.insert("k".into());
                "k".into()
            };
            let mut acc = S::app(S::Var(k.clone()), erase(body, avoid));
            for b in bs.iter().rev() {
                acc = S::app(erase(&b.arg, avoid), S::Lam(b.var.clone(), bx(acc)));
            }
            S::Lam(k, bx(acc))
        }
    }
}

// Typing by unification.

#[derive(Clone, Debug, PartialEq, Eq)]
enum Ty {
    Var(usize),
    Unit,
    Empty,
    Atom(Name),
    Q,
    Arrow(Box<Ty>, Box<Ty>),
    Product(Box<Ty>, Box<Ty>),
    Sum(Box<Ty>, Box<Ty>),
}

impl Ty {
    fn of(t: &StlcType) -> Ty {
        match t {
            StlcType::Unit => Ty::Unit,
            StlcType::Empty => Ty::Empty,
            StlcType::Atom(p) => Ty::Atom(p.clone()),
            StlcType::Q => Ty::Q,
            StlcType::Arrow(a, b) => Ty::Arrow(bx(Ty::of(a)), bx(Ty::of(b))),
            StlcType::Product(a, b) => Ty::Product(bx(Ty::of(a)), bx(Ty::of(b))),
            StlcType::Sum(a, b) => Ty::Sum(bx(Ty::of(a)), bx(Ty::of(b))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StlcTypeError {
    #[error("unbound variable `{0}`")]
    Unbound(Name),
    #[error("cannot unify {0} with {1}")]
    Mismatch(String, String),
    #[error("infinite type")]
    Occurs,
}

#[derive(Default)]
struct Unifier {
    bindings: Vec<Option<Ty>>,
}

impl Unifier {
    fn fresh(&mut self) -> Ty {
        self.bindings.push(None);
        Ty::Var(self.bindings.len() - 1)
    }

    fn resolve(&self, t: &Ty) -> Ty {
        match t {
            Ty::Var(v) => match &self.bindings[*v] {
                Some(b) => self.resolve(b),
                None => t.clone(),
            },
            Ty::Arrow(a, b) => Ty::Arrow(bx(self.resolve(a)), bx(self.resolve(b))),
            Ty::Product(a, b) => Ty::Product(bx(self.resolve(a)), bx(self.resolve(b))),
            Ty::Sum(a, b) => Ty::Sum(bx(self.resolve(a)), bx(self.resolve(b))),
            _ => t.clone(),
        }
    }

    fn occurs(&self, v: usize, t: &Ty) -> bool {
        match self.resolve(t) {
            Ty::Var(w) => v == w,
            Ty::Arrow(a, b) | Ty::Product(a, b) | Ty::Sum(a, b) => {
                self.occurs(v, &a) || self.occurs(v, &b)
            }
            _ => false,
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> Result<(), StlcTypeError> {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (Ty::Var(x), Ty::Var(y)) if x == y => Ok(()),
            (Ty::Var(x), t) | (t, Ty::Var(x)) => {
                if self.occurs(*x, t) {
                    return Err(StlcTypeError::Occurs);
                }
                self.bindings[*x] = Some(t.clone());
                Ok(())
            }
            (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2))
            | (Ty::Product(a1, b1), Ty::Product(a2, b2))
            | (Ty::Sum(a1, b1), Ty::Sum(a2, b2)) => {
                self.unify(a1, a2)?;
                self.unify(b1, b2)
            }
            _ if a == b => Ok(()),
            _ => Err(StlcTypeError::Mismatch(format!("{a:?}"), format!("{b:?}"))),
        }
    }

    fn infer(&mut self, env: &mut Vec<(Name, Ty)>, t: &StlcTerm) -> Result<Ty, StlcTypeError> {
        Ok(match t {
            S::Var(x) => env
                .iter()
                .rev()
                .find(|(n, _)| n == x)
                .map(|(_, ty)| ty.clone())
                .ok_or_else(|| StlcTypeError::Unbound(x.clone()))?,
            S::Lam(x, b) => {
                let a = self.fresh();
                env.push((x.clone(), a.clone()));
                let r = self.infer(env, b);
                env.pop();
                Ty::Arrow(bx(a), bx(r?))
            }
            S::App(f, a) => {
                let tf = self.infer(env, f)?;
                let ta = self.infer(env, a)?;
                let r = self.fresh();
                self.unify(&tf, &Ty::Arrow(bx(ta), bx(r.clone())))?;
                r
            }
            S::Pair(a, b) => Ty::Product(bx(self.infer(env, a)?), bx(self.infer(env, b)?)),
            S::Fst(p) | S::Snd(p) => {
                let tp = self.infer(env, p)?;
                let (l, r) = (self.fresh(), self.fresh());
                self.unify(&tp, &Ty::Product(bx(l.clone()), bx(r.clone())))?;
                if matches!(t, S::Fst(_)) {
                    l
                } else {
                    r
                }
            }
            S::Inl(a) => Ty::Sum(bx(self.infer(env, a)?), bx(self.fresh())),
            S::Inr(a) => Ty::Sum(bx(self.fresh()), bx(self.infer(env, a)?)),
            S::Case(s, x, u, y, v) => {
                let ts = self.infer(env, s)?;
                let (l, r) = (self.fresh(), self.fresh());
                self.unify(&ts, &Ty::Sum(bx(l.clone()), bx(r.clone())))?;
                env.push((x.clone(), l));
                let tu = self.infer(env, u);
                env.pop();
                env.push((y.clone(), r));
                let tv = self.infer(env, v);
                env.pop();
                let (tu, tv) = (tu?, tv?);
                self.unify(&tu, &tv)?;
                tu
            }
            S::Abort(a) => {
                let ta = self.infer(env, a)?;
                self.unify(&ta, &Ty::Empty)?;
                self.fresh()
            }
            S::Triv(a) => {
                self.infer(env, a)?;
                Ty::Unit
            }
        })
    }
}

/// Checks `ctx |- t : expected`, where `t` may have a more general type.
pub fn stlc_check(
    ctx: &[(Name, StlcType)],
    t: &StlcTerm,
    expected: &StlcType,
) -> Result<(), StlcTypeError> {
    let mut u = Unifier::default();
    let mut env: Vec<(Name, Ty)> = ctx.iter().map(|(n, ty)| (n.clone(), Ty::of(ty))).collect();
    let found = u.infer(&mut env, t)?;
    u.unify(&found, &Ty::of(expected))
}

/// The erased context `|ctx|`.
pub fn erase_context(ctx: &Context) -> Vec<(Name, StlcType)> {
    ctx.iter().map(|(n, f)| (n.clone(), erase_formula(f))).collect()
}

// Reduction: beta, eta (functions, pairs, weak sums) and permutations of
// eliminators over case and abort.

fn rebind(x: &Name, body: &StlcTerm, extra: &[&StlcTerm], avoid: &mut NameSet) -> (Name, StlcTerm) {
    if extra.iter().any(|e| e.is_free(x)) {
        let fresh = fresh_into(x, avoid);
        let body = rename_free(body, x, &fresh);
        (fresh, body)
    } else {
        (x.clone(), body.clone())
    }
}

fn perm(
    s: &StlcTerm,
    x: &Name,
    u: &StlcTerm,
    y: &Name,
    v: &StlcTerm,
    extra: &[&StlcTerm],
    avoid: &mut NameSet,
    elim: impl Fn(StlcTerm) -> StlcTerm,
) -> StlcTerm {
    let (x, u) = rebind(x, u, extra, avoid);
    let (y, v) = rebind(y, v, extra, avoid);
    S::Case(bx(s.clone()), x, bx(elim(u)), y, bx(elim(v)))
}

/// Beta and permutation contractions at the root.
fn contract_root(t: &StlcTerm, avoid: &mut NameSet) -> Vec<StlcTerm> {
    let mut out = Vec::new();
    match t {
        S::App(f, a) => match &**f {
            S::Lam(x, b) => out.push(subst(b, x, a, &a.free_vars(), avoid)),
            S::Case(s, x, u, y, v) => {
                out.push(perm(s, x, u, y, v, &[a], avoid, |b| S::App(bx(b), a.clone())))
            }
            S::Abort(e) => out.push(S::Abort(e.clone())),
            _ => {}
        },
        S::Fst(p) | S::Snd(p) => {
            let first = matches!(t, S::Fst(_));
            match &**p {
                S::Pair(a, b) => out.push(if first { (**a).clone() } else { (**b).clone() }),
                S::Case(s, x, u, y, v) => out.push(perm(s, x, u, y, v, &[], avoid, |b| {
                    if first {
                        S::Fst(bx(b))
                    } else {
                        S::Snd(bx(b))
                    }
                })),
                S::Abort(e) => out.push(S::Abort(e.clone())),
                _ => {}
            }
        }
        S::Case(s, x, u, y, v) => {
            match &**s {
                S::Inl(a) => out.push(subst(u, x, a, &a.free_vars(), avoid)),
                S::Inr(a) => out.push(subst(v, y, a, &a.free_vars(), avoid)),
                S::Case(s2, x2, u2, y2, v2) => {
                    let outer = |b: StlcTerm| S::Case(bx(b), x.clone(), u.clone(), y.clone(), v.clone());
                    let whole = S::Case(
                        bx(StlcTerm::var("#")),
                        x.clone(),
                        u.clone(),
                        y.clone(),
                        v.clone(),
                    );
                    out.push(perm(s2, x2, u2, y2, v2, &[&whole], avoid, outer));
                }
                S::Abort(e) => out.push(S::Abort(e.clone())),
                _ => {}
            }
        }
        S::Abort(e) => match &**e {
            S::Case(s, x, u, y, v) => out.push(perm(s, x, u, y, v, &[], avoid, |b| S::Abort(bx(b)))),
            S::Abort(inner) => out.push(S::Abort(inner.clone())),
            _ => {}
        },
        _ => {}
    }
    out
}

/// The eta contraction at the root, if any.
fn contract_eta(t: &StlcTerm) -> Option<StlcTerm> {
    match t {
        S::Lam(x, b) => match &**b {
            S::App(f, a) if matches!(&**a, S::Var(z) if z == x) && !f.is_free(x) => {
                Some((**f).clone())
            }
            _ => None,
        },
        S::Pair(a, b) => match (&**a, &**b) {
            (S::Fst(p), S::Snd(q)) if stlc_alpha_eq(p, q) => Some((**p).clone()),
            _ => None,
        },
        S::Case(s, x, u, y, v) => {
            let inl_id = matches!(&**u, S::Inl(a) if matches!(&**a, S::Var(z) if z == x));
            let inr_id = matches!(&**v, S::Inr(a) if matches!(&**a, S::Var(z) if z == y));
            (inl_id && inr_id).then(|| (**s).clone())
        }
        _ => None,
    }
}

fn replace_at(t: &StlcTerm, path: &[usize], new: StlcTerm) -> StlcTerm {
    let mut out = t.clone();
    let mut cur = &mut out;
    for &i in path {
        cur = cur.child_mut(i);
    }
    *cur = new;
    out
}

/// Every one-step reduct under the relation described above.
pub fn successors(t: &StlcTerm) -> Vec<StlcTerm> {
    fn go(
        root: &StlcTerm,
        t: &StlcTerm,
        avoid: &mut NameSet,
        path: &mut Vec<usize>,
        out: &mut Vec<StlcTerm>,
    ) {
        for r in contract_root(t, avoid).into_iter().chain(contract_eta(t)) {
            out.push(replace_at(root, path, r));
        }
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i);
            go(root, c, avoid, path, out);
            path.pop();
        }
    }
    let mut avoid = t.all_names();
    let mut out = Vec::new();
    go(t, t, &mut avoid, &mut Vec::new(), &mut out);
    out
}

/// One step of `strategy`, contracting eta redexes only once no beta or
/// permutation redex is left. Postponing eta keeps the normal form
/// independent of the strategy; contracting an eta redex in a term without
/// other redexes never creates one.
pub fn stlc_step(t: &StlcTerm, strategy: Strategy) -> Option<StlcTerm> {
    type Rule<'a> = &'a mut dyn FnMut(&StlcTerm) -> Option<StlcTerm>;
    fn find(t: &StlcTerm, strategy: Strategy, rule: Rule<'_>, path: &mut Vec<usize>) -> Option<StlcTerm> {
        if strategy == Strategy::LeftmostOutermost {
            if let Some(r) = rule(t) {
                return Some(r);
            }
        }
        let n = t.children().len();
        let order: Vec<usize> = match strategy {
            Strategy::LeftmostOutermost => (0..n).collect(),
            Strategy::RightmostInnermost => (0..n).rev().collect(),
        };
        for i in order {
            path.push(i);
            if let Some(r) = find(t.children()[i], strategy, &mut *rule, path) {
                return Some(r);
            }
            path.pop();
        }
        if strategy == Strategy::RightmostInnermost {
            return rule(t);
        }
        None
    }
    let mut avoid = t.all_names();
    let mut path = Vec::new();
    let r = find(
        t,
        strategy,
        &mut |u| contract_root(u, &mut avoid).into_iter().next(),
        &mut path,
    )
    .or_else(|| {
        path.clear();
        find(t, strategy, &mut contract_eta, &mut path)
    })?;
    Some(replace_at(t, &path, r))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("STLC normalization exceeded {0} steps")]
pub struct StlcBudgetExceeded(pub usize);

pub const DEFAULT_SIM_BUDGET: usize = 200;

pub fn stlc_normalize(
    t: &StlcTerm,
    budget: usize,
    strategy: Strategy,
) -> Result<StlcTerm, StlcBudgetExceeded> {
    let mut cur = t.clone();
    for _ in 0..budget {
        match stlc_step(&cur, strategy) {
            Some(next) => cur = next,
            None => return Ok(cur),
        }
    }
    if stlc_step(&cur, strategy).is_none() {
        Ok(cur)
    } else {
        Err(StlcBudgetExceeded(budget))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Simulation {
    /// Reached after this many steps (at least one).
    Reached(usize),
    /// Every term reachable from the source was explored.
    Unreachable,
    BudgetExhausted,
}

impl Simulation {
    pub fn succeeded(self) -> bool {
        matches!(self, Simulation::Reached(_))
    }
}

/// Breadth-first search for `|t2|` among the terms reachable from `|t1|` in
/// one or more steps, expanding at most `budget` terms.
pub fn simulates(t1: &Term, t2: &Term, budget: usize) -> Simulation {
    reaches(&erase_term(t1), &erase_term(t2), budget)
}

pub fn reaches(from: &StlcTerm, to: &StlcTerm, budget: usize) -> Simulation {
    let target = to.canonical();
    let start = from.canonical();
    let mut seen: HashSet<StlcTerm> = HashSet::from([start.clone()]);
    let mut queue: VecDeque<(StlcTerm, usize)> = VecDeque::from([(start, 0)]);
    let mut expanded = 0;
    while let Some((t, depth)) = queue.pop_front() {
        if expanded == budget {
            return Simulation::BudgetExhausted;
        }
        expanded += 1;
        for next in successors(&t) {
            let key = next.canonical();
            if key == target {
                return Simulation::Reached(depth + 1);
            }
            if seen.insert(key.clone()) {
                queue.push_back((key, depth + 1));
            }
        }
    }
    Simulation::Unreachable
}

// Printing.

impl fmt::Display for StlcType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(out: &mut fmt::Formatter<'_>, t: &StlcType, level: u8) -> fmt::Result {
            let paren = match t {
                StlcType::Arrow(..) => level > 0,
                StlcType::Sum(..) => level > 1,
                StlcType::Product(..) => level > 2,
                _ => false,
            };
            if paren {
                out.write_str("(")?;
            }
            match t {
                StlcType::Unit => out.write_str("1")?,
                StlcType::Empty => out.write_str("0")?,
                StlcType::Atom(p) => out.write_str(p)?,
                StlcType::Q => out.write_str("Q")?,
                StlcType::Arrow(a, b) => {
                    go(out, a, 1)?;
                    out.write_str(" -> ")?;
                    go(out, b, 0)?;
                }
                StlcType::Sum(a, b) => {
                    go(out, a, 1)?;
                    out.write_str(" + ")?;
                    go(out, b, 2)?;
                }
                StlcType::Product(a, b) => {
                    go(out, a, 2)?;
                    out.write_str(" * ")?;
                    go(out, b, 3)?;
                }
            }
            if paren {
                out.write_str(")")?;
            }
            Ok(())
        }
        go(f, self, 0)
    }
}

impl fmt::Display for StlcTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn level(t: &StlcTerm) -> u8 {
            match t {
                S::Lam(..) => 0,
                S::App(..) | S::Fst(_) | S::Snd(_) | S::Inl(_) | S::Inr(_) | S::Abort(_) | S::Triv(_) => 1,
                S::Var(_) | S::Pair(..) | S::Case(..) => 2,
            }
        }
        fn go(out: &mut fmt::Formatter<'_>, t: &StlcTerm, want: u8) -> fmt::Result {
            let paren = level(t) < want;
            if paren {
                out.write_str("(")?;
            }
            let prefix = |out: &mut fmt::Formatter<'_>, kw: &str, a: &StlcTerm| {
                write!(out, "{kw} ")?;
                go(out, a, 2)
            };
            match t {
                S::Var(x) => out.write_str(x)?,
                S::Lam(x, b) => {
                    write!(out, "\\{x}. ")?;
                    go(out, b, 0)?;
                }
                S::App(a, b) => {
                    go(out, a, 1)?;
                    out.write_str(" ")?;
                    go(out, b, 2)?;
                }
                S::Pair(a, b) => {
                    out.write_str("<")?;
                    go(out, a, 0)?;
                    out.write_str(", ")?;
                    go(out, b, 0)?;
                    out.write_str(">")?;
                }
                S::Fst(a) => prefix(out, "fst", a)?,
                S::Snd(a) => prefix(out, "snd", a)?,
                S::Inl(a) => prefix(out, "inl", a)?,
                S::Inr(a) => prefix(out, "inr", a)?,
                S::Abort(a) => prefix(out, "abort", a)?,
                S::Triv(a) => prefix(out, "triv", a)?,
                S::Case(s, x, u, y, v) => {
                    out.write_str("case ")?;
                    go(out, s, 0)?;
                    write!(out, " of {{ inl {x} -> ")?;
                    go(out, u, 0)?;
                    write!(out, " | inr {y} -> ")?;
                    go(out, v, 0)?;
                    out.write_str(" }")?;
                }
            }
            if paren {
                out.write_str(")")?;
            }
            Ok(())
        }
        go(f, self, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_formula, parse_term};
    use crate::reduce;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn formula_erasure() {
        assert_eq!(erase_formula(&f("[]p")).to_string(), "(p -> Q) -> Q");
        assert_eq!(erase_formula(&f("p -> q0")).to_string(), "p -> q0");
        assert_eq!(erase_formula(&f("[][]p")).to_string(), "(((p -> Q) -> Q) -> Q) -> Q");
        assert_eq!(erase_formula(&f("Top /\\ Bot \\/ p")).to_string(), "1 * 0 + p");
    }

    #[test]
    fn term_erasure() {
        assert_eq!(erase_term(&t("box [] in a")).to_string(), "\\k. k a");
        assert_eq!(erase_term(&t("box [x:p = f] in x")).to_string(), "\\k. f (\\x. k x)");
        assert_eq!(erase_term(&t("\\x:p. x")).to_string(), "\\x. x");
        assert_eq!(
            erase_term(&t("box [x:p = f, y:q = g] in <x, y>")).to_string(),
            "\\k. f (\\x. g (\\y. k <x, y>))"
        );
        assert_eq!(erase_term(&t("\\k:p. box [] in k")).to_string(), "\\k. \\k'. k' k");
    }

    #[test]
    fn erasure_preserves_typing() {
        let ctx = Context::from_entries([("f", f("[](p -> q)")), ("a", f("[]p"))]).unwrap();
        let src = t("box [g:p -> q = f, x:p = a] in g x");
        let ty = crate::typeck::infer(&ctx, &src).unwrap();
        stlc_check(&erase_context(&ctx), &erase_term(&src), &erase_formula(&ty)).unwrap();
        let bad = stlc_check(&[], &StlcTerm::lam("x", StlcTerm::app(StlcTerm::var("x"), StlcTerm::var("x"))), &StlcType::Unit);
        assert!(bad.is_err());
    }

    #[test]
    fn normalize_examples() {
        let e = erase_term(&t("box [x:p = f] in x"));
        assert_eq!(stlc_normalize(&e, 100, Strategy::LeftmostOutermost).unwrap(), StlcTerm::var("f"));
        let e = erase_term(&t("(\\x:p. x) y"));
        assert_eq!(stlc_normalize(&e, 100, Strategy::LeftmostOutermost).unwrap(), StlcTerm::var("y"));
        let k = erase_term(&t(
            "(\\f:[](p->q). \\a:[]p. box [g:p->q = f, x:p = a] in g x) (box [] in \\z:p. w) (box [] in c)",
        ));
        assert!(stlc_normalize(&k, 1000, Strategy::LeftmostOutermost).is_ok());
    }

    #[test]
    fn simulation_examples() {
        assert_eq!(simulates(&t("box [x:p = f] in x"), &t("f"), 200), Simulation::Reached(2));
        assert_eq!(simulates(&t("(\\x:p. x) y"), &t("y"), 200), Simulation::Reached(1));
        let src = t("box [b:q = (box [x:p = f] in g x), r:s0 = h] in <b, r>");
        let (dst, _, _) = reduce::step(&src).unwrap();
        assert!(simulates(&src, &dst, 200).succeeded());
        assert_eq!(simulates(&t("y"), &t("y"), 200), Simulation::Unreachable);
    }

    #[test]
    fn permutation_and_eta_rules() {
        let c = S::Case(bx(StlcTerm::var("d")), "x".into(), bx(S::Inl(bx(StlcTerm::var("x")))), "y".into(), bx(S::Inr(bx(StlcTerm::var("y")))));
        assert_eq!(successors(&c), vec![StlcTerm::var("d")]);
        let app = StlcTerm::app(S::Abort(bx(StlcTerm::var("e"))), StlcTerm::var("a"));
        assert_eq!(successors(&app), vec![S::Abort(bx(StlcTerm::var("e")))]);
        let pair = S::Pair(bx(S::Fst(bx(StlcTerm::var("w")))), bx(S::Snd(bx(StlcTerm::var("w")))));
        assert_eq!(successors(&pair), vec![StlcTerm::var("w")]);
    }
}
