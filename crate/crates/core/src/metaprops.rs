//! Canonicity of closed normal terms and the extraction procedures it
//! licenses: reflection as an admissible rule, the disjunction property and
//! its weak form under a box.

use std::fmt;

use crate::reduce::{self, StepBudgetExceeded, DEFAULT_MAX_STEPS};
use crate::syntax::{substitute, Context, Formula, Path, Term};
use crate::typeck::{infer, TypeError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermClass {
    /// Normal, headed by an introduction.
    IntroHeaded,
    /// Normal, a variable or headed by an elimination.
    Neutral,
    /// Some redex remains; the path is the leftmost-outermost one.
    NotNormal(Path),
}

impl fmt::Display for TermClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermClass::IntroHeaded => f.write_str("IntroHeaded"),
            TermClass::Neutral => f.write_str("Neutral"),
            TermClass::NotNormal(p) => write!(f, "NotNormal({p})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "Left",
            Side::Right => "Right",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PropsError {
    #[error(transparent)]
    IllTyped(#[from] TypeError),
    #[error("term has free variables")]
    NotClosed,
    #[error("expected a proof of {expected}, found one of {found}")]
    WrongShape { expected: &'static str, found: Formula },
    #[error("term is not normal")]
    NotNormal,
    #[error(transparent)]
    Budget(#[from] Box<StepBudgetExceeded>),
    /// A closed normal term without an introduction at its head. Canonicity
    /// rules this out, so seeing it means the kernel is wrong.
    #[error("closed normal term is not canonical: {0}")]
    NotCanonical(Term),
}

pub fn classify(t: &Term) -> TermClass {
    if let Some((_, _, path)) = reduce::step(t) {
        return TermClass::NotNormal(path);
    }
    match t {
        Term::Var(_)
        | Term::App(..)
        | Term::Proj1(_)
        | Term::Proj2(_)
        | Term::Case(..)
        | Term::Exfalso(..) => TermClass::Neutral,
        Term::Lam(..)
        | Term::Pair(..)
        | Term::Inj1(..)
        | Term::Inj2(..)
        | Term::Triv(_)
        | Term::BoxIntro(..) => TermClass::IntroHeaded,
    }
}

fn head_matches(t: &Term, a: &Formula) -> bool {
    matches!(
        (t, a),
        (Term::Lam(..), Formula::Impl(..))
            | (Term::Pair(..), Formula::Conj(..))
            | (Term::Inj1(..) | Term::Inj2(..), Formula::Disj(..))
            | (Term::Triv(_), Formula::Top)
            | (Term::BoxIntro(..), Formula::Box(_))
    )
}

/// Type of a closed term, or the reason it has none.
fn closed_type(t: &Term) -> Result<Formula, PropsError> {
    if !t.is_closed() {
        return Err(PropsError::NotClosed);
    }
    Ok(infer(&Context::new(), t)?)
}

fn normal_form(t: &Term) -> Result<Term, PropsError> {
    reduce::normalize(t, DEFAULT_MAX_STEPS)
        .map(|(nf, _)| nf)
        .map_err(|e| PropsError::Budget(Box::new(e)))
}

/// For a closed normal proof of `a`: does its head introduce `a`'s main
/// connective?
pub fn canonicity_check(t: &Term, a: &Formula) -> Result<bool, PropsError> {
    let found = closed_type(t)?;
    if &found != a {
        return Err(TypeError::TypeMismatch {
            path: Path::root(),
            expected: a.to_string(),
            found,
        }
        .into());
    }
    if !reduce::is_normal(t, reduce::Mode::Default) {
        return Err(PropsError::NotNormal);
    }
    Ok(head_matches(t, a))
}

/// From a closed proof of `[]A`, a closed normal proof of `A`.
pub fn reflection_extract(t: &Term) -> Result<Term, PropsError> {
    match closed_type(t)? {
        Formula::Box(_) => extract(&normal_form(t)?),
        found => Err(PropsError::WrongShape { expected: "[]A", found }),
    }
}

/// `t` is closed and normal of box type, so it is a box whose arguments are
/// themselves closed normal boxes.
fn extract(t: &Term) -> Result<Term, PropsError> {
    let Term::BoxIntro(bs, body) = t else {
        return Err(PropsError::NotCanonical(t.clone()));
    };
    let mut s = (**body).clone();
    for b in bs {
        let u = extract(&b.arg)?;
        s = substitute(&s, &b.var, &u);
    }
    normal_form(&s)
}

/// From a closed proof of `A \/ B`, the side and a closed proof of it.
pub fn disjunction_split(t: &Term) -> Result<(Side, Term), PropsError> {
    match closed_type(t)? {
        Formula::Disj(..) => {}
        found => return Err(PropsError::WrongShape { expected: "A \\/ B", found }),
    }
    match normal_form(t)? {
        Term::Inj1(_, w) => Ok((Side::Left, *w)),
        Term::Inj2(_, w) => Ok((Side::Right, *w)),
        other => Err(PropsError::NotCanonical(other)),
    }
}

/// From a closed proof of `[](A \/ B)`, the side and a closed proof of
/// `[]A` or `[]B`.
pub fn weak_dp(t: &Term) -> Result<(Side, Term), PropsError> {
    match closed_type(t)? {
        Formula::Box(inner) if matches!(*inner, Formula::Disj(..)) => {}
        found => return Err(PropsError::WrongShape { expected: "[](A \\/ B)", found }),
    }
    let u = reflection_extract(t)?;
    let (side, w) = disjunction_split(&u)?;
    Ok((side, Term::boxed(vec![], w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_formula, parse_term};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&t("x")), TermClass::Neutral);
        assert_eq!(classify(&t("\\x:p. x")), TermClass::IntroHeaded);
        assert_eq!(classify(&t("(\\x:p. x) y")), TermClass::NotNormal(Path::root()));
        assert_eq!(classify(&t("fst z")), TermClass::Neutral);
        assert_eq!(
            classify(&t("\\z:p. (\\x:p. x) z")),
            TermClass::NotNormal(Path(vec![0]))
        );
    }

    #[test]
    fn canonicity() {
        assert!(canonicity_check(&t("\\x:p. box [] in x"), &f("p -> []p")).unwrap());
        assert!(canonicity_check(&t("box [] in triv (\\x:Bot. x)"), &f("[]Top")).unwrap());
        assert_eq!(
            canonicity_check(&t("(\\x:p. x)"), &f("q -> q")),
            Err(PropsError::IllTyped(TypeError::TypeMismatch {
                path: Path::root(),
                expected: "q -> q".into(),
                found: f("p -> p"),
            }))
        );
        assert_eq!(
            canonicity_check(&t("(\\x:p->p. x) (\\y:p. y)"), &f("p -> p")),
            Err(PropsError::NotNormal)
        );
    }

    #[test]
    fn reflection() {
        let id = t("\\y:p. y");
        assert_eq!(reflection_extract(&t("box [] in (\\y:p. y)")).unwrap(), id);
        let r = reflection_extract(&t("box [x:(p->p) = (box [] in \\y:p. y)] in x")).unwrap();
        assert_eq!(r, id);
        assert_eq!(infer(&Context::new(), &r).unwrap(), f("p -> p"));
        assert_eq!(
            reflection_extract(&t("box [] in triv(\\x:Bot. x)")).unwrap(),
            t("triv(\\x:Bot. x)")
        );
        let nested = t("box [a:p->p = (box [] in \\y:p. y), b:p->p = (box [c:p->p = (box [] in \\y:p. y)] in c)] in \\z:p. a (b z)");
        assert_eq!(reflection_extract(&nested).unwrap(), t("\\z:p. z"));
        assert!(matches!(
            reflection_extract(&id),
            Err(PropsError::WrongShape { .. })
        ));
    }

    #[test]
    fn disjunction() {
        assert_eq!(
            disjunction_split(&t("inl[(p->p) \\/ Bot] (\\x:p. x)")).unwrap(),
            (Side::Left, t("\\x:p. x"))
        );
        assert_eq!(
            disjunction_split(&t("((\\z:p->p. inl[(p->p)\\/q] z) (\\x:p. x))")).unwrap(),
            (Side::Left, t("\\x:p. x"))
        );
        assert!(matches!(
            disjunction_split(&t("<triv (\\x:p. x), triv (\\x:p. x)>")),
            Err(PropsError::WrongShape { .. })
        ));
        assert_eq!(disjunction_split(&t("inl[p \\/ p] x")), Err(PropsError::NotClosed));
    }

    #[test]
    fn weak_disjunction() {
        let (side, w) = weak_dp(&t("box [] in inl[(p->p)\\/Bot] (\\x:p. x)")).unwrap();
        assert_eq!((side, w.clone()), (Side::Left, t("box [] in \\x:p. x")));
        assert_eq!(infer(&Context::new(), &w).unwrap(), f("[](p->p)"));
        let (side, w) = weak_dp(&t("box [] in inr[Bot\\/Top] (triv (\\x:Bot. x))")).unwrap();
        assert_eq!((side, w), (Side::Right, t("box [] in triv (\\x:Bot. x)")));
        assert!(matches!(
            weak_dp(&t("box [] in \\x:p. x")),
            Err(PropsError::WrongShape { .. })
        ));
    }
}
