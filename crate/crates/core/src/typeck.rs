//! Syntax-directed type inference: `ctx |- t : A` for the propositional
//! rules of natural deduction plus box introduction.
//!
//! The separate contexts of the box rule are merged into the one shared
//! context, and box binders may not shadow anything already in scope.

use crate::syntax::{Context, Formula, Name, Path, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("unbound variable `{name}` at {path}")]
    UnboundVariable { name: Name, path: Path },
    #[error("type mismatch at {path}: expected {expected}, found {found}")]
    TypeMismatch {
        path: Path,
        expected: String,
        found: Formula,
    },
    #[error("box binder `{name}` at {path} shadows a variable already in scope")]
    ShadowingInBox { name: Name, path: Path },
    #[error("box binder `{name}` at {path} is bound twice")]
    DuplicateBinder { name: Name, path: Path },
    #[error("argument of box binder `{binder}` at {path} has type {found}, which is not a box")]
    NonBoxArgument {
        binder: Name,
        path: Path,
        found: Formula,
    },
    #[error("annotation {annot} at {path} must be a disjunction")]
    BadInjectionAnnotation { path: Path, annot: Formula },
}

impl TypeError {
    /// The variant name, used as a diagnostic prefix.
    pub fn kind(&self) -> &'static str {
        match self {
            TypeError::UnboundVariable { .. } => "UnboundVariable",
            TypeError::TypeMismatch { .. } => "TypeMismatch",
            TypeError::ShadowingInBox { .. } => "ShadowingInBox",
            TypeError::DuplicateBinder { .. } => "DuplicateBinder",
            TypeError::NonBoxArgument { .. } => "NonBoxArgument",
            TypeError::BadInjectionAnnotation { .. } => "BadInjectionAnnotation",
        }
    }
}

/// A variable scope; later entries shadow earlier ones.
struct Scope<'a> {
    base: &'a Context,
    local: Vec<(Name, Formula)>,
}

impl Scope<'_> {
    fn lookup(&self, x: &str) -> Option<&Formula> {
        self.local
            .iter()
            .rev()
            .find(|(n, _)| &**n == x)
            .map(|(_, f)| f)
            .or_else(|| self.base.lookup(x))
    }

    fn contains(&self, x: &str) -> bool {
        self.lookup(x).is_some()
    }
}

/// Infers the unique formula `A` with `ctx |- t : A`.
pub fn infer(ctx: &Context, t: &Term) -> Result<Formula, TypeError> {
    let mut scope = Scope {
        base: ctx,
        local: Vec::new(),
    };
    let mut path = Vec::new();
    synth(&mut scope, t, &mut path)
}

/// True iff `t` is closed and proves `a` from no hypotheses. An ill-typed
/// `t` is reported as the underlying error.
pub fn check_closed_theorem(t: &Term, a: &Formula) -> Result<bool, TypeError> {
    let found = infer(&Context::new(), t)?;
    Ok(&found == a)
}

fn mismatch(path: &[usize], expected: impl ToString, found: Formula) -> TypeError {
    TypeError::TypeMismatch {
        path: Path(path.to_vec()),
        expected: expected.to_string(),
        found,
    }
}

fn synth_child(
    scope: &mut Scope<'_>,
    t: &Term,
    path: &mut Vec<usize>,
    index: usize,
) -> Result<Formula, TypeError> {
    path.push(index);
    let out = synth(scope, t, path);
    path.pop();
    out
}

fn synth_under(
    scope: &mut Scope<'_>,
    binder: &Name,
    annot: Formula,
    t: &Term,
    path: &mut Vec<usize>,
    index: usize,
) -> Result<Formula, TypeError> {
    scope.local.push((binder.clone(), annot));
    let out = synth_child(scope, t, path, index);
    scope.local.pop();
    out
}

fn synth(scope: &mut Scope<'_>, t: &Term, path: &mut Vec<usize>) -> Result<Formula, TypeError> {
    match t {
        Term::Var(x) => scope
            .lookup(x)
            .cloned()
            .ok_or_else(|| TypeError::UnboundVariable {
                name: x.clone(),
                path: Path(path.clone()),
            }),
        Term::Lam(x, a, body) => {
            let b = synth_under(scope, x, a.clone(), body, path, 0)?;
            Ok(Formula::imp(a.clone(), b))
        }
        Term::App(f, arg) => {
            let ft = synth_child(scope, f, path, 0)?;
            let Formula::Impl(dom, cod) = ft else {
                path.push(0);
                let err = mismatch(path, "an implication", ft);
                path.pop();
                return Err(err);
            };
            let at = synth_child(scope, arg, path, 1)?;
            if at != *dom {
                path.push(1);
                let err = mismatch(path, &*dom, at);
                path.pop();
                return Err(err);
            }
            Ok(*cod)
        }
        Term::Pair(a, b) => {
            let at = synth_child(scope, a, path, 0)?;
            let bt = synth_child(scope, b, path, 1)?;
            Ok(Formula::conj(at, bt))
        }
        Term::Proj1(p) | Term::Proj2(p) => {
            let pt = synth_child(scope, p, path, 0)?;
            match pt {
                Formula::Conj(a, b) => Ok(if matches!(t, Term::Proj1(_)) { *a } else { *b }),
                other => {
                    path.push(0);
                    let err = mismatch(path, "a conjunction", other);
                    path.pop();
                    Err(err)
                }
            }
        }
        Term::Inj1(annot, a) | Term::Inj2(annot, a) => {
            let Formula::Disj(left, right) = annot else {
                return Err(TypeError::BadInjectionAnnotation {
                    path: Path(path.clone()),
                    annot: annot.clone(),
                });
            };
            let want = if matches!(t, Term::Inj1(..)) { left } else { right };
            let at = synth_child(scope, a, path, 0)?;
            if at != **want {
                path.push(0);
                let err = mismatch(path, &**want, at);
                path.pop();
                return Err(err);
            }
            Ok(annot.clone())
        }
        Term::Case(s, x, u, y, v) => {
            let st = synth_child(scope, s, path, 0)?;
            let Formula::Disj(a, b) = st else {
                path.push(0);
                let err = mismatch(path, "a disjunction", st);
                path.pop();
                return Err(err);
            };
            let ut = synth_under(scope, x, *a, u, path, 1)?;
            let vt = synth_under(scope, y, *b, v, path, 2)?;
            if ut != vt {
                path.push(2);
                let err = mismatch(path, &ut, vt);
                path.pop();
                return Err(err);
            }
            Ok(ut)
        }
        Term::Exfalso(annot, a) => {
            let at = synth_child(scope, a, path, 0)?;
            if at != Formula::Bot {
                path.push(0);
                let err = mismatch(path, Formula::Bot, at);
                path.pop();
                return Err(err);
            }
            Ok(annot.clone())
        }
        Term::Triv(a) => {
            synth_child(scope, a, path, 0)?;
            Ok(Formula::Top)
        }
        Term::BoxIntro(bs, body) => {
            for (i, b) in bs.iter().enumerate() {
                if bs[..i].iter().any(|prev| prev.var == b.var) {
                    return Err(TypeError::DuplicateBinder {
                        name: b.var.clone(),
                        path: Path(path.clone()),
                    });
                }
                if scope.contains(&b.var) {
                    return Err(TypeError::ShadowingInBox {
                        name: b.var.clone(),
                        path: Path(path.clone()),
                    });
                }
            }
            for (i, b) in bs.iter().enumerate() {
                let at = synth_child(scope, &b.arg, path, i)?;
                match at {
                    Formula::Box(inner) if *inner == b.annot => {}
                    Formula::Box(_) => {
                        path.push(i);
                        let err = mismatch(path, Formula::boxed(b.annot.clone()), at);
                        path.pop();
                        return Err(err);
                    }
                    other => {
                        path.push(i);
                        let err = TypeError::NonBoxArgument {
                            binder: b.var.clone(),
                            path: Path(path.clone()),
                            found: other,
                        };
                        path.pop();
                        return Err(err);
                    }
                }
            }
            let n = scope.local.len();
            scope
                .local
                .extend(bs.iter().map(|b| (b.var.clone(), b.annot.clone())));
            let out = synth_child(scope, body, path, bs.len());
            scope.local.truncate(n);
            Ok(Formula::boxed(out?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_formula, parse_term};

    fn ctx(entries: &[(&str, &str)]) -> Context {
        Context::from_entries(
            entries
                .iter()
                .map(|(n, f)| (*n, parse_formula(f).unwrap())),
        )
        .unwrap()
    }

    fn infer_str(c: &Context, t: &str) -> Result<Formula, TypeError> {
        infer(c, &parse_term(t).unwrap())
    }

    #[test]
    fn co_reflection_witness() {
        let a = infer_str(&Context::new(), "\\x:p. box [] in x").unwrap();
        assert_eq!(a, parse_formula("p -> []p").unwrap());
    }

    #[test]
    fn k_witness() {
        let a = infer_str(
            &Context::new(),
            "\\f:[](p->q). \\a:[]p. box [g:p->q = f, x:p = a] in g x",
        )
        .unwrap();
        assert_eq!(a, parse_formula("[](p->q) -> []p -> []q").unwrap());
    }

    #[test]
    fn non_box_argument() {
        let err = infer_str(&ctx(&[("y", "p")]), "box [x:p = y] in x").unwrap_err();
        assert!(matches!(err, TypeError::NonBoxArgument { .. }), "{err}");
    }

    #[test]
    fn open_hypothesis_in_box_body() {
        let a = infer_str(&ctx(&[("c", "q"), ("f", "[]p")]), "box [x:p = f] in <x, c>").unwrap();
        assert_eq!(a, parse_formula("[](p /\\ q)").unwrap());
    }

    #[test]
    fn shadowing_in_box_rejected() {
        let err = infer_str(&ctx(&[("x", "p"), ("f", "[]p")]), "box [x:p = f] in x").unwrap_err();
        assert!(matches!(err, TypeError::ShadowingInBox { .. }), "{err}");
        let err = infer_str(&ctx(&[("f", "[]p")]), "\\x:q. box [x:p = f] in x").unwrap_err();
        assert!(matches!(err, TypeError::ShadowingInBox { .. }), "{err}");
    }

    #[test]
    fn duplicate_box_binder_rejected() {
        let err = infer_str(&ctx(&[("f", "[]p")]), "box [x:p = f, x:p = f] in x").unwrap_err();
        assert!(matches!(err, TypeError::DuplicateBinder { .. }), "{err}");
    }

    #[test]
    fn lambda_may_shadow() {
        let a = infer_str(&ctx(&[("x", "q")]), "\\x:p. x").unwrap();
        assert_eq!(a, parse_formula("p -> p").unwrap());
    }

    #[test]
    fn wrong_box_annotation_is_a_mismatch() {
        let err = infer_str(&ctx(&[("f", "[]p")]), "box [x:q = f] in x").unwrap_err();
        assert!(matches!(err, TypeError::TypeMismatch { .. }), "{err}");
    }

    #[test]
    fn closed_theorem_checks() {
        let t = parse_term("\\x:p. box [] in x").unwrap();
        assert_eq!(check_closed_theorem(&t, &parse_formula("p -> []p").unwrap()), Ok(true));
        let t = parse_term("\\x:p. x").unwrap();
        assert_eq!(check_closed_theorem(&t, &parse_formula("p -> q").unwrap()), Ok(false));
        let t = parse_term("box [] in triv (\\x:Bot. x)").unwrap();
        assert_eq!(check_closed_theorem(&t, &Formula::boxed(Formula::Top)), Ok(true));
        let open = parse_term("y").unwrap();
        assert!(check_closed_theorem(&open, &Formula::Top).is_err());
    }

    #[test]
    fn unbound_variable_path() {
        let err = infer_str(&Context::new(), "\\x:p. <x, z>").unwrap_err();
        assert_eq!(
            err,
            TypeError::UnboundVariable {
                name: "z".into(),
                path: Path(vec![0, 1])
            }
        );
    }

    #[test]
    fn injection_and_case() {
        let t = "\\d:p \\/ q. case d of { inl a -> inr[q \\/ p] a | inr b -> inl[q \\/ p] b }";
        let a = infer_str(&Context::new(), t).unwrap();
        assert_eq!(a, parse_formula("p \\/ q -> q \\/ p").unwrap());
        let err = infer_str(&ctx(&[("a", "p")]), "inl[p] a").unwrap_err();
        assert!(matches!(err, TypeError::BadInjectionAnnotation { .. }));
    }
}
