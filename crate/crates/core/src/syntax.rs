//! Formulas, proof terms and contexts, together with the binding machinery
//! every other module relies on: free variables, fresh names,
//! capture-avoiding substitution and alpha-equivalence.
//!
//! Variables are plain names. Binders are renamed on demand when a
//! substitution would capture, so every operation here is only meaningful up
//! to alpha-equivalence.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// An identifier: a variable or an atom name.
pub type Name = Arc<str>;

/// A set of names, ordered so that anything derived from it is deterministic.
pub type NameSet = BTreeSet<Name>;

/// Propositional formulas with the epistemic modality.
///
/// Negation is not a constructor; `~A` is notation for `A -> Bot`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Name),
    Top,
    Bot,
    Impl(Box<Formula>, Box<Formula>),
    Conj(Box<Formula>, Box<Formula>),
    Disj(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Impl(Box::new(a), Box::new(b))
    }

    pub fn conj(a: Formula, b: Formula) -> Formula {
        Formula::Conj(Box::new(a), Box::new(b))
    }

    pub fn disj(a: Formula, b: Formula) -> Formula {
        Formula::Disj(Box::new(a), Box::new(b))
    }

    pub fn boxed(a: Formula) -> Formula {
        Formula::Box(Box::new(a))
    }

    pub fn neg(a: Formula) -> Formula {
        Formula::imp(a, Formula::Bot)
    }

    /// Left-associated conjunction of `parts`; the empty conjunction is `Top`.
    pub fn conj_all(parts: &[Formula]) -> Formula {
        let mut iter = parts.iter().cloned();
        match iter.next() {
            None => Formula::Top,
            Some(first) => iter.fold(first, Formula::conj),
        }
    }

    /// Height of the syntax tree; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => 0,
            Formula::Box(a) => 1 + a.depth(),
            Formula::Impl(a, b) | Formula::Conj(a, b) | Formula::Disj(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bot => 1,
            Formula::Box(a) => 1 + a.size(),
            Formula::Impl(a, b) | Formula::Conj(a, b) | Formula::Disj(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn atoms(&self) -> NameSet {
        let mut out = NameSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut NameSet) {
        match self {
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Top | Formula::Bot => {}
            Formula::Box(a) => a.collect_atoms(out),
            Formula::Impl(a, b) | Formula::Conj(a, b) | Formula::Disj(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Subformulas, each listed once, children before parents.
    pub fn subformulas(&self) -> Vec<&Formula> {
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
            match f {
                Formula::Atom(_) | Formula::Top | Formula::Bot => {}
                Formula::Box(a) => go(a, out),
                Formula::Impl(a, b) | Formula::Conj(a, b) | Formula::Disj(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
            if !out.contains(&f) {
                out.push(f);
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }
}

/// One binder of a `box` introduction: `var : annot = arg`, where `arg`
/// proves `[]annot` and `var : annot` is available in the body.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Binding {
    pub var: Name,
    pub annot: Formula,
    pub arg: Term,
}

impl Binding {
    pub fn new(var: &str, annot: Formula, arg: Term) -> Binding {
        Binding {
            var: var.into(),
            annot,
            arg,
        }
    }
}

/// Terms of the modal lambda calculus; a well-typed term is a deduction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Name),
    Lam(Name, Formula, Box<Term>),
    App(Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Proj1(Box<Term>),
    Proj2(Box<Term>),
    /// `inl[A \/ B] t`; the annotation is the whole sum type.
    Inj1(Formula, Box<Term>),
    Inj2(Formula, Box<Term>),
    /// `case t of { inl x -> u | inr y -> v }`
    Case(Box<Term>, Name, Box<Term>, Name, Box<Term>),
    Exfalso(Formula, Box<Term>),
    /// Introduction of `Top` from a deduction of any formula.
    Triv(Box<Term>),
    /// `box [x1:A1 = t1, ..., xn:An = tn] in s`. The binders scope over the
    /// body only; the arguments live in the enclosing context.
    BoxIntro(Vec<Binding>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.into())
    }

    pub fn lam(x: &str, annot: Formula, body: Term) -> Term {
        Term::Lam(x.into(), annot, Box::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn proj1(t: Term) -> Term {
        Term::Proj1(Box::new(t))
    }

    pub fn proj2(t: Term) -> Term {
        Term::Proj2(Box::new(t))
    }

    pub fn inj1(annot: Formula, t: Term) -> Term {
        Term::Inj1(annot, Box::new(t))
    }

    pub fn inj2(annot: Formula, t: Term) -> Term {
        Term::Inj2(annot, Box::new(t))
    }

    pub fn case(scrut: Term, x: &str, left: Term, y: &str, right: Term) -> Term {
        Term::Case(
            Box::new(scrut),
            x.into(),
            Box::new(left),
            y.into(),
            Box::new(right),
        )
    }

    pub fn exfalso(annot: Formula, t: Term) -> Term {
        Term::Exfalso(annot, Box::new(t))
    }

    pub fn triv(t: Term) -> Term {
        Term::Triv(Box::new(t))
    }

    pub fn boxed(bindings: Vec<Binding>, body: Term) -> Term {
        Term::BoxIntro(bindings, Box::new(body))
    }

    /// Number of term constructors (annotations are not counted).
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Immediate subterms in path order: function before argument, box
    /// arguments before the box body, scrutinee before branches.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) => vec![],
            Term::Lam(_, _, b) => vec![b],
            Term::App(a, b) | Term::Pair(a, b) => vec![a, b],
            Term::Proj1(t)
            | Term::Proj2(t)
            | Term::Inj1(_, t)
            | Term::Inj2(_, t)
            | Term::Exfalso(_, t)
            | Term::Triv(t) => vec![t],
            Term::Case(s, _, u, _, v) => vec![s, u, v],
            Term::BoxIntro(bs, body) => {
                let mut out: Vec<&Term> = bs.iter().map(|b| &b.arg).collect();
                out.push(body);
                out
            }
        }
    }

    /// Mutable access to the `index`-th child, in [`Term::children`] order.
    pub fn child_mut(&mut self, index: usize) -> Option<&mut Term> {
        match (self, index) {
            (Term::Lam(_, _, b), 0) => Some(b),
            (Term::App(a, _), 0) | (Term::Pair(a, _), 0) => Some(a),
            (Term::App(_, b), 1) | (Term::Pair(_, b), 1) => Some(b),
            (
                Term::Proj1(t)
                | Term::Proj2(t)
                | Term::Inj1(_, t)
                | Term::Inj2(_, t)
                | Term::Exfalso(_, t)
                | Term::Triv(t),
                0,
            ) => Some(t),
            (Term::Case(s, _, _, _, _), 0) => Some(s),
            (Term::Case(_, _, u, _, _), 1) => Some(u),
            (Term::Case(_, _, _, _, v), 2) => Some(v),
            (Term::BoxIntro(bs, body), i) => {
                if i < bs.len() {
                    Some(&mut bs[i].arg)
                } else if i == bs.len() {
                    Some(body)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn subterm(&self, path: &Path) -> Option<&Term> {
        let mut cur = self;
        for &i in &path.0 {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    pub fn free_vars(&self) -> NameSet {
        let mut out = NameSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn is_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => &**y == x,
            Term::Lam(y, _, b) => &**y != x && b.is_free(x),
            Term::Case(s, y, u, z, v) => {
                s.is_free(x) || (&**y != x && u.is_free(x)) || (&**z != x && v.is_free(x))
            }
            Term::BoxIntro(bs, body) => {
                bs.iter().any(|b| b.arg.is_free(x))
                    || (bs.iter().all(|b| &*b.var != x) && body.is_free(x))
            }
            _ => self.children().iter().any(|c| c.is_free(x)),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every name occurring in the term, free or bound, including binders.
    pub fn all_names(&self) -> NameSet {
        let mut out = NameSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut NameSet) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Lam(x, _, _) => {
                out.insert(x.clone());
            }
            Term::Case(_, x, _, y, _) => {
                out.insert(x.clone());
                out.insert(y.clone());
            }
            Term::BoxIntro(bs, _) => {
                out.extend(bs.iter().map(|b| b.var.clone()));
            }
            _ => {}
        }
        for c in self.children() {
            c.collect_names(out);
        }
    }

    /// Alpha-normal representative: every bound variable is renamed after
    /// its binding depth. Two terms are alpha-equal iff their canonical forms
    /// are structurally equal, which makes this usable as a hash key.
    pub fn canonical(&self) -> Term {
        let mut env: Vec<(Name, Name)> = Vec::new();
        canon(self, &mut env)
    }
}

fn collect_free(t: &Term, bound: &mut Vec<Name>, out: &mut NameSet) {
    match t {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Lam(x, _, b) => {
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
        Term::Case(s, x, u, y, v) => {
            collect_free(s, bound, out);
            bound.push(x.clone());
            collect_free(u, bound, out);
            bound.pop();
            bound.push(y.clone());
            collect_free(v, bound, out);
            bound.pop();
        }
        Term::BoxIntro(bs, body) => {
            for b in bs {
                collect_free(&b.arg, bound, out);
            }
            let n = bound.len();
            bound.extend(bs.iter().map(|b| b.var.clone()));
            collect_free(body, bound, out);
            bound.truncate(n);
        }
        _ => {
            for c in t.children() {
                collect_free(c, bound, out);
            }
        }
    }
}

fn canon(t: &Term, env: &mut Vec<(Name, Name)>) -> Term {
    fn bind(env: &mut Vec<(Name, Name)>, x: &Name) -> Name {
        let fresh: Name = format!("#{}", env.len()).into();
        env.push((x.clone(), fresh.clone()));
        fresh
    }
    match t {
        Term::Var(x) => match env.iter().rev().find(|(from, _)| from == x) {
            Some((_, to)) => Term::Var(to.clone()),
            None => Term::Var(x.clone()),
        },
        Term::Lam(x, a, b) => {
            let y = bind(env, x);
            let body = canon(b, env);
            env.pop();
            Term::Lam(y, a.clone(), Box::new(body))
        }
        Term::App(a, b) => Term::app(canon(a, env), canon(b, env)),
        Term::Pair(a, b) => Term::pair(canon(a, env), canon(b, env)),
        Term::Proj1(a) => Term::proj1(canon(a, env)),
        Term::Proj2(a) => Term::proj2(canon(a, env)),
        Term::Inj1(f, a) => Term::inj1(f.clone(), canon(a, env)),
        Term::Inj2(f, a) => Term::inj2(f.clone(), canon(a, env)),
        Term::Exfalso(f, a) => Term::exfalso(f.clone(), canon(a, env)),
        Term::Triv(a) => Term::triv(canon(a, env)),
        Term::Case(s, x, u, y, v) => {
            let s = canon(s, env);
            let x2 = bind(env, x);
            let u = canon(u, env);
            env.pop();
            let y2 = bind(env, y);
            let v = canon(v, env);
            env.pop();
            Term::Case(Box::new(s), x2, Box::new(u), y2, Box::new(v))
        }
        Term::BoxIntro(bs, body) => {
            let args: Vec<Term> = bs.iter().map(|b| canon(&b.arg, env)).collect();
            let n = env.len();
            let bindings = bs
                .iter()
                .zip(args)
                .map(|(b, arg)| Binding {
                    var: bind(env, &b.var),
                    annot: b.annot.clone(),
                    arg,
                })
                .collect();
            let body = canon(body, env);
            env.truncate(n);
            Term::BoxIntro(bindings, Box::new(body))
        }
    }
}

/// Position of a subterm: child indices from the root, in
/// [`Term::children`] order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn child(&self, index: usize) -> Path {
        let mut v = self.0.clone();
        v.push(index);
        Path(v)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (i, step) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

/// First name derived from `base` that is not in `avoid`: `x'`, `x''`,
/// `x'''`, then `x'4`, `x'5`, ...
pub fn fresh_name(base: &str, avoid: &NameSet) -> Name {
    let stem = base.split('\'').next().filter(|s| !s.is_empty()).unwrap_or("v");
    for n in 1usize.. {
        let candidate = if n <= 3 {
            format!("{stem}{}", "'".repeat(n))
        } else {
            format!("{stem}'{n}")
        };
        if !avoid.contains(candidate.as_str()) {
            return candidate.into();
        }
    }
    unreachable!("the candidate sequence is infinite")
}

/// Picks a fresh name and records it in `avoid`.
pub(crate) fn fresh_into(base: &str, avoid: &mut NameSet) -> Name {
    let name = fresh_name(base, avoid);
    avoid.insert(name.clone());
    name
}

/// Replaces free occurrences of `from` by the variable `to`. `to` must not
/// occur in `t` at all, which rules out capture.
pub(crate) fn rename_free(t: &Term, from: &str, to: &Name) -> Term {
    match t {
        Term::Var(x) if &**x == from => Term::Var(to.clone()),
        Term::Var(_) => t.clone(),
        Term::Lam(x, a, b) => {
            if &**x == from {
                t.clone()
            } else {
                Term::Lam(x.clone(), a.clone(), Box::new(rename_free(b, from, to)))
            }
        }
        Term::Case(s, x, u, y, v) => Term::Case(
            Box::new(rename_free(s, from, to)),
            x.clone(),
            Box::new(if &**x == from {
                (**u).clone()
            } else {
                rename_free(u, from, to)
            }),
            y.clone(),
            Box::new(if &**y == from {
                (**v).clone()
            } else {
                rename_free(v, from, to)
            }),
        ),
        Term::BoxIntro(bs, body) => {
            let shadowed = bs.iter().any(|b| &*b.var == from);
            let bindings = bs
                .iter()
                .map(|b| Binding {
                    var: b.var.clone(),
                    annot: b.annot.clone(),
                    arg: rename_free(&b.arg, from, to),
                })
                .collect();
            let body = if shadowed {
                (**body).clone()
            } else {
                rename_free(body, from, to)
            };
            Term::BoxIntro(bindings, Box::new(body))
        }
        _ => map_children(t, |c| rename_free(c, from, to)),
    }
}

/// Rebuilds a binder-free node (App, Pair, projections, injections, Exfalso,
/// Triv) with `f` applied to each child. Binding nodes are returned as is.
pub(crate) fn map_children(t: &Term, mut f: impl FnMut(&Term) -> Term) -> Term {
    match t {
        Term::App(a, b) => Term::app(f(a), f(b)),
        Term::Pair(a, b) => Term::pair(f(a), f(b)),
        Term::Proj1(a) => Term::proj1(f(a)),
        Term::Proj2(a) => Term::proj2(f(a)),
        Term::Inj1(ty, a) => Term::inj1(ty.clone(), f(a)),
        Term::Inj2(ty, a) => Term::inj2(ty.clone(), f(a)),
        Term::Exfalso(ty, a) => Term::exfalso(ty.clone(), f(a)),
        Term::Triv(a) => Term::triv(f(a)),
        _ => t.clone(),
    }
}

/// Renames the box binders of `t` that are in `clash` to names outside
/// `avoid`.
///
/// Box binders may not shadow anything in scope, so a copy of a term placed
/// under binders of the same name gets those box binders renamed apart.
fn refresh_box_binders(t: &Term, clash: &NameSet, avoid: &mut NameSet) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Lam(x, a, b) => Term::Lam(
            x.clone(),
            a.clone(),
            Box::new(refresh_box_binders(b, clash, avoid)),
        ),
        Term::Case(s, x, u, y, v) => Term::Case(
            Box::new(refresh_box_binders(s, clash, avoid)),
            x.clone(),
            Box::new(refresh_box_binders(u, clash, avoid)),
            y.clone(),
            Box::new(refresh_box_binders(v, clash, avoid)),
        ),
        Term::BoxIntro(bs, body) => {
            let mut body = refresh_box_binders(body, clash, avoid);
            let mut bindings = Vec::with_capacity(bs.len());
            for b in bs {
                let var = if clash.contains(&b.var) {
                    let var = fresh_into(&b.var, avoid);
                    body = rename_free(&body, &b.var, &var);
                    var
                } else {
                    b.var.clone()
                };
                bindings.push(Binding {
                    var,
                    annot: b.annot.clone(),
                    arg: refresh_box_binders(&b.arg, clash, avoid),
                });
            }
            Term::BoxIntro(bindings, Box::new(body))
        }
        _ => map_children(t, |c| refresh_box_binders(c, clash, avoid)),
    }
}

fn collect_box_binders(t: &Term, out: &mut NameSet) {
    if let Term::BoxIntro(bs, _) = t {
        out.extend(bs.iter().map(|b| b.var.clone()));
    }
    for c in t.children() {
        collect_box_binders(c, out);
    }
}

/// Capture-avoiding substitution `t[s/x]`.
pub fn substitute(t: &Term, x: &str, s: &Term) -> Term {
    let mut avoid = t.all_names();
    avoid.extend(s.all_names());
    avoid.insert(x.into());
    substitute_avoiding(t, x, s, &mut avoid)
}

/// Substitution drawing fresh names outside `avoid`, which must contain
/// every name of `t` and `s` (and of any enclosing term whose binders are in
/// scope). Fresh names are added to `avoid` as they are chosen.
pub(crate) fn substitute_avoiding(t: &Term, x: &str, s: &Term, avoid: &mut NameSet) -> Term {
    substitute_in_scope(t, x, s, &[], avoid)
}

/// [`substitute_avoiding`] for a `t` that sits under the binders `scope`.
pub(crate) fn substitute_in_scope(
    t: &Term,
    x: &str,
    s: &Term,
    scope: &[Name],
    avoid: &mut NameSet,
) -> Term {
    if !t.is_free(x) {
        return t.clone();
    }
    let mut box_binders = NameSet::new();
    collect_box_binders(s, &mut box_binders);
    let mut cx = Subst {
        x,
        s,
        s_free: s.free_vars(),
        box_binders,
        scope: scope.to_vec(),
        avoid,
    };
    cx.go(t)
}

struct Subst<'a> {
    x: &'a str,
    s: &'a Term,
    s_free: NameSet,
    box_binders: NameSet,
    // Binders of `t` between the root and the current position.
    scope: Vec<Name>,
    avoid: &'a mut NameSet,
}

impl Subst<'_> {
    fn go(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(y) => {
                if &**y != self.x {
                    return t.clone();
                }
                let clash: NameSet = self
                    .scope
                    .iter()
                    .filter(|n| self.box_binders.contains(*n))
                    .cloned()
                    .collect();
                if clash.is_empty() {
                    self.s.clone()
                } else {
                    refresh_box_binders(self.s, &clash, self.avoid)
                }
            }
            Term::Lam(y, a, b) => {
                let (y, b) = self.under_binder(y, b);
                Term::Lam(y, a.clone(), Box::new(b))
            }
            Term::Case(scrut, y, u, z, v) => {
                let scrut = self.go(scrut);
                let (y, u) = self.under_binder(y, u);
                let (z, v) = self.under_binder(z, v);
                Term::Case(Box::new(scrut), y, Box::new(u), z, Box::new(v))
            }
            Term::BoxIntro(bs, body) => {
                let args: Vec<Term> = bs.iter().map(|b| self.go(&b.arg)).collect();
                let shadowed = bs.iter().any(|b| &*b.var == self.x);
                let mut body = (**body).clone();
                let mut vars: Vec<Name> = bs.iter().map(|b| b.var.clone()).collect();
                if !shadowed && body.is_free(self.x) {
                    for var in vars.iter_mut() {
                        if self.s_free.contains(var) {
                            let fresh = fresh_into(var, self.avoid);
                            body = rename_free(&body, var, &fresh);
                            *var = fresh;
                        }
                    }
                    let n = self.scope.len();
                    self.scope.extend(vars.iter().cloned());
                    body = self.go(&body);
                    self.scope.truncate(n);
                }
                let bindings = bs
                    .iter()
                    .zip(vars)
                    .zip(args)
                    .map(|((b, var), arg)| Binding {
                        var,
                        annot: b.annot.clone(),
                        arg,
                    })
                    .collect();
                Term::BoxIntro(bindings, Box::new(body))
            }
            _ => map_children(t, |c| self.go(c)),
        }
    }

    /// Substitutes under a single binder `y`, renaming `y` first when it
    /// would capture a free variable of `s`. A binder equal to `x` shadows it.
    fn under_binder(&mut self, y: &Name, body: &Term) -> (Name, Term) {
        if &**y == self.x || !body.is_free(self.x) {
            return (y.clone(), body.clone());
        }
        let (y, body) = if self.s_free.contains(y) {
            let fresh = fresh_into(y, self.avoid);
            let renamed = rename_free(body, y, &fresh);
            (fresh, renamed)
        } else {
            (y.clone(), body.clone())
        };
        self.scope.push(y.clone());
        let out = self.go(&body);
        self.scope.pop();
        (y, out)
    }
}

/// Alpha-equivalence: equal up to consistent renaming of bound variables.
/// Annotations must match exactly.
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    let mut left = Vec::new();
    let mut right = Vec::new();
    alpha(t, u, &mut left, &mut right)
}

fn alpha(t: &Term, u: &Term, left: &mut Vec<Name>, right: &mut Vec<Name>) -> bool {
    fn under(
        x: &Name,
        y: &Name,
        t: &Term,
        u: &Term,
        left: &mut Vec<Name>,
        right: &mut Vec<Name>,
    ) -> bool {
        left.push(x.clone());
        right.push(y.clone());
        let ok = alpha(t, u, left, right);
        left.pop();
        right.pop();
        ok
    }
    match (t, u) {
        (Term::Var(x), Term::Var(y)) => {
            let i = left.iter().rposition(|n| n == x);
            let j = right.iter().rposition(|n| n == y);
            match (i, j) {
                (None, None) => x == y,
                (i, j) => i == j,
            }
        }
        (Term::Lam(x, a, b), Term::Lam(y, a2, b2)) => a == a2 && under(x, y, b, b2, left, right),
        (Term::App(a, b), Term::App(a2, b2)) | (Term::Pair(a, b), Term::Pair(a2, b2)) => {
            alpha(a, a2, left, right) && alpha(b, b2, left, right)
        }
        (Term::Proj1(a), Term::Proj1(a2))
        | (Term::Proj2(a), Term::Proj2(a2))
        | (Term::Triv(a), Term::Triv(a2)) => alpha(a, a2, left, right),
        (Term::Inj1(f, a), Term::Inj1(f2, a2))
        | (Term::Inj2(f, a), Term::Inj2(f2, a2))
        | (Term::Exfalso(f, a), Term::Exfalso(f2, a2)) => f == f2 && alpha(a, a2, left, right),
        (Term::Case(s, x, p, y, q), Term::Case(s2, x2, p2, y2, q2)) => {
            alpha(s, s2, left, right)
                && under(x, x2, p, p2, left, right)
                && under(y, y2, q, q2, left, right)
        }
        (Term::BoxIntro(bs, body), Term::BoxIntro(bs2, body2)) => {
            if bs.len() != bs2.len() {
                return false;
            }
            let heads_match = bs
                .iter()
                .zip(bs2)
                .all(|(b, b2)| b.annot == b2.annot && alpha(&b.arg, &b2.arg, left, right));
            if !heads_match {
                return false;
            }
            let n = left.len();
            left.extend(bs.iter().map(|b| b.var.clone()));
            right.extend(bs2.iter().map(|b| b.var.clone()));
            let ok = alpha(body, body2, left, right);
            left.truncate(n);
            right.truncate(n);
            ok
        }
        _ => false,
    }
}

/// A variable was declared twice in a context.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("variable `{0}` is declared twice in the context")]
pub struct DuplicateVariable(pub Name);

/// Typing context: an ordered list of uniquely named hypotheses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Context {
    entries: Vec<(Name, Formula)>,
}

impl Context {
    pub fn new() -> Context {
        Context::default()
    }

    pub fn from_entries<I, S>(entries: I) -> Result<Context, DuplicateVariable>
    where
        I: IntoIterator<Item = (S, Formula)>,
        S: AsRef<str>,
    {
        let mut ctx = Context::new();
        for (name, f) in entries {
            ctx.push(name.as_ref(), f)?;
        }
        Ok(ctx)
    }

    pub fn push(&mut self, name: &str, f: Formula) -> Result<(), DuplicateVariable> {
        if self.contains(name) {
            return Err(DuplicateVariable(name.into()));
        }
        self.entries.push((name.into(), f));
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<&Formula> {
        self.entries
            .iter()
            .find(|(n, _)| &**n == name)
            .map(|(_, f)| f)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.lookup(name).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Formula)> {
        self.entries.iter().map(|(n, f)| (n, f))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn formulas(&self) -> Vec<Formula> {
        self.entries.iter().map(|(_, f)| f.clone()).collect()
    }
}
