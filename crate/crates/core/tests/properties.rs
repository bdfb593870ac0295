use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;

use ielc_core::gen::{Gen, Sample};
use ielc_core::hilbert::{check_hilbert, deduction_theorem_at, hilbert_to_nd, nd_to_hilbert};
use ielc_core::kripke::{enumerate_models, valid_in_model, KripkeModel};
use ielc_core::metaprops::{classify, TermClass};
use ielc_core::parse::{parse_formula, parse_hilbert, parse_model, parse_term};
use ielc_core::reduce::{self, normalize_with, successors, Mode, NormalizeOptions};
use ielc_core::stlc::{
    erase_context, erase_formula, erase_term, simulates, stlc_alpha_eq, stlc_check, stlc_normalize,
};
use ielc_core::syntax::Binding;
use ielc_core::{alpha_eq, infer, substitute, Formula, FrameCondition, Name, Strategy as Order, Term};

fn sample() -> impl Strategy<Value = Sample> {
    any::<u64>().prop_map(|seed| Gen::new(seed).corpus_term())
}

fn closed_sample() -> impl Strategy<Value = Sample> {
    any::<u64>().prop_map(|seed| Gen::close(Gen::new(seed).corpus_term()))
}

fn formula(depth: usize, atoms: &'static [&'static str]) -> impl Strategy<Value = Formula> {
    any::<u64>().prop_map(move |seed| Gen::new(seed).formula_over(atoms, depth))
}

/// Renames every bound variable by appending `suffix`.
fn rename_bound(t: &Term, suffix: &str) -> Term {
    fn go(t: &Term, env: &mut Vec<(Name, Name)>, suffix: &str) -> Term {
        let bind = |env: &mut Vec<(Name, Name)>, x: &Name| {
            let n: Name = format!("{x}{suffix}").into();
            env.push((x.clone(), n.clone()));
            n
        };
        match t {
            Term::Var(x) => Term::Var(
                env.iter()
                    .rev()
                    .find(|(a, _)| a == x)
                    .map_or_else(|| x.clone(), |(_, b)| b.clone()),
            ),
            Term::Lam(x, a, b) => {
                let n = bind(env, x);
                let b = go(b, env, suffix);
                env.pop();
                Term::Lam(n, a.clone(), Box::new(b))
            }
            Term::Case(s, x, u, y, v) => {
                let s = go(s, env, suffix);
                let nx = bind(env, x);
                let u = go(u, env, suffix);
                env.pop();
                let ny = bind(env, y);
                let v = go(v, env, suffix);
                env.pop();
                Term::Case(Box::new(s), nx, Box::new(u), ny, Box::new(v))
            }
            Term::BoxIntro(bs, body) => {
                let args: Vec<Term> = bs.iter().map(|b| go(&b.arg, env, suffix)).collect();
                let k = env.len();
                let names: Vec<Name> = bs.iter().map(|b| bind(env, &b.var)).collect();
                let body = go(body, env, suffix);
                env.truncate(k);
                let bs = bs
                    .iter()
                    .zip(names)
                    .zip(args)
                    .map(|((b, n), arg)| Binding::new(&n, b.annot.clone(), arg))
                    .collect();
                Term::BoxIntro(bs, Box::new(body))
            }
            Term::App(a, b) => Term::app(go(a, env, suffix), go(b, env, suffix)),
            Term::Pair(a, b) => Term::pair(go(a, env, suffix), go(b, env, suffix)),
            Term::Proj1(a) => Term::proj1(go(a, env, suffix)),
            Term::Proj2(a) => Term::proj2(go(a, env, suffix)),
            Term::Inj1(f, a) => Term::inj1(f.clone(), go(a, env, suffix)),
            Term::Inj2(f, a) => Term::inj2(f.clone(), go(a, env, suffix)),
            Term::Exfalso(f, a) => Term::exfalso(f.clone(), go(a, env, suffix)),
            Term::Triv(a) => Term::triv(go(a, env, suffix)),
        }
    }
    go(t, &mut Vec::new(), suffix)
}

fn boxes(t: &Term) -> usize {
    usize::from(matches!(t, Term::BoxIntro(..))) + t.children().iter().map(|c| boxes(c)).sum::<usize>()
}

fn nf(t: &Term, strategy: Order) -> Term {
    let opts = NormalizeOptions {
        strategy,
        ..NormalizeOptions::default()
    };
    normalize_with(t, &opts).expect("corpus terms normalize").0
}

fn models_up_to(n: usize, atoms: &[&str]) -> Vec<KripkeModel> {
    let atoms: Vec<Name> = atoms.iter().map(|&a| a.into()).collect();
    (1..=n)
        .flat_map(|k| enumerate_models(k, &atoms, FrameCondition::Default).collect::<Vec<_>>())
        .collect()
}

fn two_atom_models() -> &'static [KripkeModel] {
    static MODELS: OnceLock<Vec<KripkeModel>> = OnceLock::new();
    MODELS.get_or_init(|| models_up_to(3, &["p", "q"]))
}

fn three_atom_models() -> &'static [KripkeModel] {
    static MODELS: OnceLock<Vec<KripkeModel>> = OnceLock::new();
    MODELS.get_or_init(|| models_up_to(2, &["p", "q", "r"]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn substituting_a_variable_for_itself(s in sample()) {
        for x in s.term.free_vars().iter().chain(std::iter::once(&Name::from("zz"))) {
            prop_assert!(alpha_eq(&substitute(&s.term, x, &Term::Var(x.clone())), &s.term));
        }
    }

    #[test]
    fn substituting_for_an_absent_variable(s in sample(), u in sample()) {
        prop_assert!(alpha_eq(&substitute(&s.term, "absent", &u.term), &s.term));
    }

    #[test]
    fn free_variables_after_substitution(s in sample(), u in sample()) {
        let fv = s.term.free_vars();
        let Some(x) = fv.iter().next().cloned() else { return Ok(()) };
        let out = substitute(&s.term, &x, &u.term).free_vars();
        let mut want: BTreeSet<Name> = fv.iter().filter(|y| **y != x).cloned().collect();
        want.extend(u.term.free_vars());
        prop_assert_eq!(out, want);
    }

    #[test]
    fn substitution_avoids_capture(s in sample()) {
        // Replacing a free variable by a term whose free variables are all
        // the bound names of `s` must not capture any of them.
        let fv = s.term.free_vars();
        let Some(x) = fv.iter().next().cloned() else { return Ok(()) };
        let bound: Vec<Name> = s.term.all_names().difference(&fv).cloned().collect();
        let mut arg = Term::Var("w0".into());
        for b in &bound {
            arg = Term::pair(arg, Term::Var(b.clone()));
        }
        let out = substitute(&s.term, &x, &arg);
        for b in &bound {
            prop_assert!(out.is_free(b), "{} captured in {}", b, out);
        }
    }

    #[test]
    fn alpha_equivalence(s in sample(), u in sample()) {
        let a = rename_bound(&s.term, "_a");
        let b = rename_bound(&a, "_b");
        prop_assert!(alpha_eq(&s.term, &s.term));
        prop_assert!(alpha_eq(&s.term, &a) && alpha_eq(&a, &s.term));
        prop_assert!(alpha_eq(&a, &b) && alpha_eq(&s.term, &b));
        prop_assert_eq!(alpha_eq(&s.term, &u.term), alpha_eq(&u.term, &s.term));
    }

    #[test]
    fn formula_roundtrip(f in formula(4, &["p", "q", "r"])) {
        let printed = f.to_string();
        prop_assert_eq!(parse_formula(&printed), Ok(f.clone()));
        prop_assert_eq!(printed, f.clone().to_string());
    }

    #[test]
    fn term_roundtrip(s in sample()) {
        let printed = s.term.to_string();
        let back = parse_term(&printed).unwrap();
        prop_assert!(alpha_eq(&back, &s.term));
        prop_assert_eq!(back.to_string(), printed);
    }

    #[test]
    fn model_and_proof_roundtrip(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let m = g.model(5);
        prop_assert_eq!(parse_model(&m.to_string()), Ok(m));
        let p = g.hilbert_proof(6);
        prop_assert_eq!(parse_hilbert(&p.to_string()), Ok(p));
    }

    #[test]
    fn inference_is_unique_and_admits_weakening(s in sample(), c in formula(2, &["p", "q"])) {
        let variant = rename_bound(&s.term, "_a");
        prop_assert_eq!(infer(&s.ctx, &variant), Ok(s.ty.clone()));
        let mut wider = s.ctx.clone();
        wider.push("fresh_z", c).unwrap();
        prop_assert_eq!(infer(&wider, &s.term), Ok(s.ty.clone()));
    }

    #[test]
    fn each_step_preserves_the_type(s in sample()) {
        for mode in [Mode::Default, Mode::Perm, Mode::Eta] {
            for (next, tag, path) in successors(&s.term, mode) {
                prop_assert_eq!(infer(&s.ctx, &next), Ok(s.ty.clone()), "{} at {}", tag, path);
            }
        }
    }

    #[test]
    fn step_respects_alpha(s in sample()) {
        let variant = rename_bound(&s.term, "_a");
        match (reduce::step(&s.term), reduce::step(&variant)) {
            (None, None) => {}
            (Some((a, ta, pa)), Some((b, tb, pb))) => {
                prop_assert!(alpha_eq(&a, &b));
                prop_assert_eq!((ta, pa), (tb, pb));
            }
            _ => prop_assert!(false, "one variant is normal and the other is not"),
        }
    }

    #[test]
    fn modal_rules_remove_a_box(s in sample()) {
        for (next, tag, _) in successors(&s.term, Mode::Default) {
            if matches!(tag, ielc_core::RuleTag::Iota | ielc_core::RuleTag::Delta) {
                prop_assert!(boxes(&next) < boxes(&s.term));
            }
        }
    }

    #[test]
    fn strategies_agree(s in sample()) {
        prop_assert!(alpha_eq(
            &nf(&s.term, Order::LeftmostOutermost),
            &nf(&s.term, Order::RightmostInnermost)
        ));
    }

    #[test]
    fn erasure_preserves_typing(s in sample()) {
        let r = stlc_check(&erase_context(&s.ctx), &erase_term(&s.term), &erase_formula(&s.ty));
        prop_assert!(r.is_ok(), "{:?}", r);
    }

    #[test]
    fn erased_steps_are_simulated(s in sample()) {
        for (next, tag, _) in successors(&s.term, Mode::Default) {
            let sim = simulates(&s.term, &next, 200);
            prop_assert!(sim.succeeded(), "{} by {}: {:?}", s.term, tag, sim);
        }
    }

    #[test]
    fn erased_normal_forms_agree(s in sample()) {
        let e = erase_term(&s.term);
        let lo = stlc_normalize(&e, 10_000, Order::LeftmostOutermost).unwrap();
        let ri = stlc_normalize(&e, 10_000, Order::RightmostInnermost).unwrap();
        prop_assert!(stlc_alpha_eq(&lo, &ri), "{} vs {}", lo, ri);
    }

    #[test]
    fn closed_normal_terms_are_intro_headed(s in closed_sample()) {
        prop_assert_eq!(classify(&nf(&s.term, Order::LeftmostOutermost)), TermClass::IntroHeaded);
    }

    #[test]
    fn hilbert_translations_keep_conclusions(seed in any::<u64>(), s in sample()) {
        let p = Gen::new(seed).hilbert_proof(6);
        let a = check_hilbert(&p).unwrap();
        prop_assert_eq!(infer(&p.hyp_context(), &hilbert_to_nd(&p).unwrap()), Ok(a));
        let q = nd_to_hilbert(&s.term, &s.ctx).unwrap();
        prop_assert_eq!(check_hilbert(&q), Ok(s.ty.clone()));
    }

    #[test]
    fn deduction_theorem_is_linear(seed in any::<u64>()) {
        let p = Gen::new(seed).hilbert_proof(6);
        for i in 0..p.hyps.len() {
            let d = deduction_theorem_at(&p, i).unwrap();
            let want = Formula::imp(p.hyps[i].clone(), p.conclusion().unwrap().clone());
            prop_assert_eq!(check_hilbert(&d), Ok(want));
            prop_assert!(d.lines.len() <= (4 * p.lines.len()).max(5));
        }
    }

    #[test]
    fn theorems_hold_in_small_models(seed in any::<u64>()) {
        let p = Gen::new(seed).hilbert_proof(6);
        let mut cur = p;
        while !cur.hyps.is_empty() {
            cur = deduction_theorem_at(&cur, cur.hyps.len() - 1).unwrap();
        }
        let a = check_hilbert(&cur).unwrap();
        for m in three_atom_models() {
            prop_assert!(valid_in_model(m, &a), "{} fails in\n{}", a, m);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forcing_persists_along_the_order(i in any::<prop::sample::Index>(), f in formula(3, &["p", "q"])) {
        let models = two_atom_models();
        let m = &models[i.index(models.len())];
        let ext = m.extension(&f);
        for w in 0..m.len() {
            for v in 0..m.len() {
                if m.le(w, v) && ext & (1 << w) != 0 {
                    prop_assert!(ext & (1 << v) != 0, "{} at {} but not {} in\n{}", f, w, v, m);
                }
            }
        }
    }

    #[test]
    fn validity_is_closed_under_modus_ponens(
        i in any::<prop::sample::Index>(),
        a in formula(2, &["p", "q"]),
        b in formula(2, &["p", "q"]),
    ) {
        let models = two_atom_models();
        let m = &models[i.index(models.len())];
        if valid_in_model(m, &a) && valid_in_model(m, &Formula::imp(a.clone(), b.clone())) {
            prop_assert!(valid_in_model(m, &b));
        }
    }

    #[test]
    fn box_free_forcing_ignores_the_belief_relation(seed in any::<u64>(), f in formula(3, &["p", "q", "r"])) {
        fn box_free(f: &Formula) -> bool {
            !f.subformulas().iter().any(|g| matches!(g, Formula::Box(_)))
        }
        if !box_free(&f) {
            return Ok(());
        }
        let m = Gen::new(seed).model(4);
        let stripped = KripkeModel::new(
            m.worlds().to_vec(),
            m.le_generators().clone(),
            BTreeSet::new(),
            m.valuation().clone(),
        )
        .unwrap();
        prop_assert_eq!(m.extension(&f), stripped.extension(&f));
    }
}

#[test]
fn renaming_helper_changes_names() {
    let t = parse_term("\\x:p. box [y:q = z] in x").unwrap();
    let r = rename_bound(&t, "_a");
    assert_eq!(r.to_string(), "\\x_a:p. box [y_a:q = z] in x_a");
}
