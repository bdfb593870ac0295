//! Concrete syntax output. Every printer here is the inverse of the
//! corresponding parser in [`crate::parse`] and emits the fewest parentheses
//! that parse back to the same tree.

use std::fmt::{self, Write as _};

use crate::hilbert::{HilbertProof, Justification};
use crate::kripke::KripkeModel;
use crate::syntax::{Formula, Term};

// Formula precedence levels, loosest first.
const F_IMPL: u8 = 0;
const F_DISJ: u8 = 1;
const F_CONJ: u8 = 2;
const F_PREFIX: u8 = 3;

fn write_formula(out: &mut impl fmt::Write, f: &Formula, level: u8) -> fmt::Result {
    let paren = match f {
        Formula::Impl(_, b) if **b == Formula::Bot => false,
        Formula::Impl(..) => level > F_IMPL,
        Formula::Disj(..) => level > F_DISJ,
        Formula::Conj(..) => level > F_CONJ,
        Formula::Atom(_) | Formula::Top | Formula::Bot | Formula::Box(_) => false,
    };
    if paren {
        out.write_char('(')?;
    }
    match f {
        Formula::Atom(p) => out.write_str(p)?,
        Formula::Top => out.write_str("Top")?,
        Formula::Bot => out.write_str("Bot")?,
        Formula::Box(a) => {
            out.write_str("[]")?;
            write_formula(out, a, F_PREFIX)?;
        }
        Formula::Impl(a, b) if **b == Formula::Bot => {
            out.write_char('~')?;
            write_formula(out, a, F_PREFIX)?;
        }
        Formula::Impl(a, b) => {
            write_formula(out, a, F_DISJ)?;
            out.write_str(" -> ")?;
            write_formula(out, b, F_IMPL)?;
        }
        Formula::Disj(a, b) => {
            write_formula(out, a, F_DISJ)?;
            out.write_str(" \\/ ")?;
            write_formula(out, b, F_CONJ)?;
        }
        Formula::Conj(a, b) => {
            write_formula(out, a, F_CONJ)?;
            out.write_str(" /\\ ")?;
            write_formula(out, b, F_PREFIX)?;
        }
    }
    if paren {
        out.write_char(')')?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, F_IMPL)
    }
}

// Term precedence levels: binders extend to the right, then application
// and prefix forms, then atoms.
const T_OPEN: u8 = 0;
const T_APP: u8 = 1;
const T_ATOM: u8 = 2;

fn term_level(t: &Term) -> u8 {
    match t {
        Term::Lam(..) | Term::BoxIntro(..) => T_OPEN,
        Term::App(..)
        | Term::Proj1(_)
        | Term::Proj2(_)
        | Term::Inj1(..)
        | Term::Inj2(..)
        | Term::Exfalso(..)
        | Term::Triv(_) => T_APP,
        Term::Var(_) | Term::Pair(..) | Term::Case(..) => T_ATOM,
    }
}

fn write_term(out: &mut impl fmt::Write, t: &Term, level: u8) -> fmt::Result {
    let paren = term_level(t) < level;
    if paren {
        out.write_char('(')?;
    }
    match t {
        Term::Var(x) => out.write_str(x)?,
        Term::Lam(x, a, body) => {
            write!(out, "\\{x}:{a}. ")?;
            write_term(out, body, T_OPEN)?;
        }
        Term::App(f, a) => {
            write_term(out, f, T_APP)?;
            out.write_char(' ')?;
            write_term(out, a, T_ATOM)?;
        }
        Term::Pair(a, b) => {
            out.write_char('<')?;
            write_term(out, a, T_OPEN)?;
            out.write_str(", ")?;
            write_term(out, b, T_OPEN)?;
            out.write_char('>')?;
        }
        Term::Proj1(a) => {
            out.write_str("fst ")?;
            write_term(out, a, T_ATOM)?;
        }
        Term::Proj2(a) => {
            out.write_str("snd ")?;
            write_term(out, a, T_ATOM)?;
        }
        Term::Inj1(ty, a) => {
            write!(out, "inl[{ty}] ")?;
            write_term(out, a, T_ATOM)?;
        }
        Term::Inj2(ty, a) => {
            write!(out, "inr[{ty}] ")?;
            write_term(out, a, T_ATOM)?;
        }
        Term::Exfalso(ty, a) => {
            write!(out, "abort[{ty}] ")?;
            write_term(out, a, T_ATOM)?;
        }
        Term::Triv(a) => {
            out.write_str("triv ")?;
            write_term(out, a, T_ATOM)?;
        }
        Term::Case(s, x, u, y, v) => {
            out.write_str("case ")?;
            write_term(out, s, T_OPEN)?;
            write!(out, " of {{ inl {x} -> ")?;
            write_term(out, u, T_OPEN)?;
            write!(out, " | inr {y} -> ")?;
            write_term(out, v, T_OPEN)?;
            out.write_str(" }")?;
        }
        Term::BoxIntro(bs, body) => {
            out.write_str("box [")?;
            for (i, b) in bs.iter().enumerate() {
                if i > 0 {
                    out.write_str(", ")?;
                }
                write!(out, "{}:{} = ", b.var, b.annot)?;
                write_term(out, &b.arg, T_OPEN)?;
            }
            out.write_str("] in ")?;
            write_term(out, body, T_OPEN)?;
        }
    }
    if paren {
        out.write_char(')')?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, T_OPEN)
    }
}

impl fmt::Display for HilbertProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.hyps.is_empty() {
            f.write_str("hyps: ")?;
            for (i, h) in self.hyps.iter().enumerate() {
                if i > 0 {
                    f.write_str("; ")?;
                }
                write!(f, "{h}")?;
            }
            f.write_char('\n')?;
        }
        for (i, line) in self.lines.iter().enumerate() {
            write!(f, "{}. {} ", i + 1, line.formula)?;
            match &line.just {
                Justification::Hyp(j) => write!(f, "hyp {j}")?,
                Justification::Mp(m, k) => write!(f, "mp {m} {k}")?,
                Justification::Axiom(scheme, inst) => {
                    write!(f, "ax {}", scheme.id())?;
                    if !inst.is_empty() {
                        f.write_str(" {")?;
                        for (i, (meta, g)) in inst.iter().enumerate() {
                            if i > 0 {
                                f.write_str(", ")?;
                            }
                            write!(f, "{} := {g}", meta.name())?;
                        }
                        f.write_char('}')?;
                    }
                }
            }
            f.write_char('\n')?;
        }
        Ok(())
    }
}

impl fmt::Display for KripkeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = |i: usize| self.world_name(i);
        f.write_str("worlds:")?;
        for name in self.worlds() {
            write!(f, " {name}")?;
        }
        f.write_str("\nle:")?;
        for (i, &(a, b)) in self.le_generators().iter().enumerate() {
            write!(f, "{} {} <= {}", if i > 0 { "," } else { "" }, w(a), w(b))?;
        }
        f.write_str("\nE:")?;
        for (i, &(a, b)) in self.e_relation().iter().enumerate() {
            write!(f, "{} {} E {}", if i > 0 { "," } else { "" }, w(a), w(b))?;
        }
        f.write_str("\nval:")?;
        for (i, (atom, worlds)) in self.valuation().iter().enumerate() {
            write!(f, "{} {atom} @", if i > 0 { "," } else { "" })?;
            for &x in worlds {
                write!(f, " {}", w(x))?;
            }
        }
        f.write_char('\n')
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Binding;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn formula_examples() {
        assert_eq!(Formula::imp(p(), Formula::imp(q(), p())).to_string(), "p -> q -> p");
        assert_eq!(Formula::boxed(Formula::disj(p(), q())).to_string(), "[](p \\/ q)");
        assert_eq!(Formula::imp(Formula::imp(p(), q()), p()).to_string(), "(p -> q) -> p");
        assert_eq!(Formula::neg(Formula::boxed(Formula::Bot)).to_string(), "~[]Bot");
        assert_eq!(
            Formula::conj(p(), Formula::conj(q(), p())).to_string(),
            "p /\\ (q /\\ p)"
        );
        assert_eq!(
            Formula::disj(Formula::conj(p(), q()), p()).to_string(),
            "p /\\ q \\/ p"
        );
    }

    #[test]
    fn term_examples() {
        let k = Term::boxed(
            vec![
                Binding::new("g", Formula::imp(p(), q()), Term::var("f")),
                Binding::new("x", p(), Term::var("a")),
            ],
            Term::app(Term::var("g"), Term::var("x")),
        );
        assert_eq!(k.to_string(), "box [g:p -> q = f, x:p = a] in g x");
        let t = Term::app(Term::lam("x", p(), Term::var("x")), Term::var("y"));
        assert_eq!(t.to_string(), "(\\x:p. x) y");
        let t = Term::proj1(Term::pair(Term::var("x"), Term::var("y")));
        assert_eq!(t.to_string(), "fst <x, y>");
        let t = Term::triv(Term::lam("x", Formula::Bot, Term::var("x")));
        assert_eq!(t.to_string(), "triv (\\x:Bot. x)");
    }
}
