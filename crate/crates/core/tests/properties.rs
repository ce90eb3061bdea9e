use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use hypergame::dialogue::{Dialogue, Mode, Move};
use hypergame::expansion::{copycat_expand, materialize, ExpandedPlayer, Splice};
use hypergame::gen::{self, random_closed_term, random_goal_type, TermGen};
use hypergame::semantics::{apply, interpret, normalize_syntactically, strategy_to_term, term_to_strategy};
use hypergame::term::{beta_normalize, enumerate_normal_terms, eta_long, typecheck, Term};
use hypergame::transition::{Label, TransitionSystem};
use hypergame::{enumerate_strategies, ImportUniverse, Strategy as Play, TypeExpr};

fn arb_type() -> impl Strategy<Value = TypeExpr> {
    let leaf = prop_oneof![Just("X"), Just("Y"), Just("Z")].prop_map(TypeExpr::var);
    leaf.prop_recursive(4, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TypeExpr::arrow(a, b)),
            (prop_oneof![Just("X"), Just("Y")], inner).prop_map(|(x, b)| TypeExpr::forall(x, b)),
        ]
    })
}

fn arb_lambda_type() -> impl Strategy<Value = TypeExpr> {
    let leaf = prop_oneof![Just("X"), Just("Y")].prop_map(TypeExpr::var);
    leaf.prop_recursive(3, 7, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| TypeExpr::arrow(a, b)))
}

fn normal_closed(seed: u64, quantifiers: usize) -> (Term, TypeExpr) {
    let mut rng = gen::rng(seed);
    loop {
        let u = random_goal_type(&mut rng, quantifiers);
        if let Some(t) = TermGen::new(&mut rng, false).term(&u, 10) {
            return (t, u);
        }
    }
}

proptest! {
    #[test]
    fn prenex_is_idempotent(t in arb_type()) {
        let p = t.prenex();
        prop_assert!(p.is_prenex());
        prop_assert_eq!(p.prenex(), p);
    }

    #[test]
    fn lazy_import_agrees_with_prenex_import(t in arb_type(), v in arb_type()) {
        prop_assume!(t.available_count() > 0);
        let lazy = t.import_lazy(&v).unwrap().prenex();
        let eager = t.prenex().import_prenex(&v).unwrap();
        prop_assert_eq!(lazy, eager);
    }

    #[test]
    fn resolved_views_reassemble(t in arb_type()) {
        if let Ok(view) = t.resolved_view() {
            prop_assert_eq!(view.reassemble(), t.clone());
            prop_assert_eq!(view.reassemble().resolved_view().unwrap(), view);
        }
    }

    #[test]
    fn trivial_substitution_is_prenexing(t in arb_type()) {
        prop_assert_eq!(t.substitute("X", &TypeExpr::var("X")), t.prenex());
    }

    #[test]
    fn types_print_and_parse_back(t in arb_type()) {
        prop_assert_eq!(TypeExpr::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn subject_reduction(seed in any::<u64>()) {
        let (t, ty) = random_closed_term(&mut gen::rng(seed), 25, 2, true);
        let n = beta_normalize(&t);
        prop_assert!(n.is_beta_normal());
        prop_assert_eq!(typecheck(&[], &n).unwrap(), ty);
    }

    #[test]
    fn eta_long_is_stable(seed in any::<u64>()) {
        let (t, ty) = random_closed_term(&mut gen::rng(seed), 25, 2, true);
        let once = eta_long(&beta_normalize(&t), &ty).unwrap();
        prop_assert!(eta_long(&once, &ty).unwrap().alpha_eq(&once));
        prop_assert!(beta_normalize(&once).alpha_eq(&once));
        prop_assert_eq!(typecheck(&[], &once).unwrap(), ty);
    }

    #[test]
    fn terms_print_and_parse_back(seed in any::<u64>()) {
        let (t, _) = random_closed_term(&mut gen::rng(seed), 25, 2, true);
        prop_assert!(Term::parse(&t.to_string()).unwrap().alpha_eq(&t));
    }

    #[test]
    fn compile_readback_round_trip(seed in any::<u64>()) {
        let (t, ty) = normal_closed(seed, 1);
        let s = term_to_strategy(&t, &ty).unwrap();
        let back = strategy_to_term(&s, &ty).unwrap();
        prop_assert!(back.alpha_eq(&t), "{} vs {}", back, t);
        prop_assert_eq!(term_to_strategy(&back, &ty).unwrap(), s.clone());
        prop_assert_eq!(Play::parse(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn identity_laws(seed in any::<u64>()) {
        let (t, a) = normal_closed(seed, 1);
        let tau = term_to_strategy(&t, &a).unwrap();
        let id_ty = TypeExpr::arrow(a.clone(), a.clone());
        let id = eta_long(&Term::parse(&format!("\\y:{a}. y")).unwrap(), &id_ty).unwrap();
        let left = apply(&term_to_strategy(&id, &id_ty).unwrap(), &id_ty, &tau, 1_000_000).unwrap();
        prop_assert_eq!(&left, &tau);
        if let TypeExpr::Arrow(dom, _) = &a {
            let right = Term::parse(&format!("\\x:{dom}. ({t}) ((\\y:{dom}. y) x)")).unwrap();
            let (s, ty) = interpret(&right, 1_000_000).unwrap();
            prop_assert_eq!(ty, a.clone());
            prop_assert_eq!(s, tau);
        }
    }

    #[test]
    fn normal_terms_are_fixed_points(u in arb_lambda_type()) {
        for t in enumerate_normal_terms(&u, 9, &ImportUniverse::default()) {
            prop_assert_eq!(typecheck(&[], &t).unwrap(), u.clone());
            prop_assert!(normalize_syntactically(&t).unwrap().alpha_eq(&t));
        }
    }

    #[test]
    fn raising_depth_keeps_strategies(u in arb_lambda_type()) {
        let ts = TransitionSystem::build(u);
        let universe = ImportUniverse::default();
        let small = enumerate_strategies(&ts, Mode::PBacktracking, 4, &universe, false);
        let large = enumerate_strategies(&ts, Mode::PBacktracking, 6, &universe, false);
        for s in &small {
            prop_assert!(large.iter().any(|l| l.plays().is_superset(s.plays())));
        }
    }

    #[test]
    fn copycat_holds_vacuously_with_one_base(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let u = gen::random_lambda_type(&mut rng, 8, &["X"]);
        let ts = TransitionSystem::build(u);
        let d = gen::random_dialogue(&mut rng, &ts, Mode::PBacktracking, &ImportUniverse::default(), 8);
        prop_assert_eq!(d.copycat_ok(&ts), Ok(true));
    }

    #[test]
    fn black_box_canonicalization(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let u = gen::random_type(&mut rng, 10, &["X"], 2);
        let ts = TransitionSystem::build(u);
        let d = gen::random_dialogue(&mut rng, &ts, Mode::BlackBox, &ImportUniverse::default(), 8);
        prop_assert_eq!(d.canonicalize_black_boxes(&ts), d.clone());
        let renamed = rename_boxes(&d);
        prop_assert_eq!(renamed.canonicalize_black_boxes(&ts), d);
    }

    #[test]
    fn eager_and_lazy_expansion_agree(b in arb_lambda_type(), w in arb_lambda_type(), seed in any::<u64>()) {
        let root = TypeExpr::forall("X", b.clone());
        let mut rng = gen::rng(seed);
        let Some(t) = TermGen::new(&mut rng, false).term(&root, 10) else { return Ok(()) };
        let w = w.subst_free("X", &TypeExpr::var("W"));
        let sigma = term_to_strategy(&t, &root).unwrap();
        let ts = TransitionSystem::build(root.clone());
        let assignment = BTreeMap::from([(Arc::from("B0"), w.clone())]);
        let eager = copycat_expand(&ts, &sigma, &assignment, 40).unwrap();
        let player = ExpandedPlayer::new(Arc::new(sigma), root.clone()).spliced(Splice { delta: vec![], ty: w.clone() });
        let instance = TransitionSystem::build(b.subst_free("X", &w));
        let lazy = materialize(&player, &instance, 100_000).unwrap();
        let stripped: Vec<Dialogue> = eager.plays().iter().map(drop_opening_import).collect();
        prop_assert_eq!(Play::from_plays(stripped), lazy);
    }
}

fn drop_opening_import(d: &Dialogue) -> Dialogue {
    let mut moves = d.moves.clone();
    if let Some(first) = moves.first_mut() {
        first.label.imports.remove(0);
    }
    Dialogue::new(moves)
}

fn rename_boxes(d: &Dialogue) -> Dialogue {
    let map: BTreeMap<_, _> = d
        .black_boxes()
        .into_iter()
        .enumerate()
        .map(|(i, b)| (b, TypeExpr::var(&format!("Fresh{i}"))))
        .collect();
    Dialogue::new(
        d.moves
            .iter()
            .map(|m| {
                let imports = m.label.imports.iter().map(|t| t.subst_many(&map)).collect();
                Move::new(m.back_ref, Label::new(m.label.branch, imports))
            })
            .collect(),
    )
}
