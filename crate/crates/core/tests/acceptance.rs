use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use hypergame::dialogue::{traces, trace_word, Dialogue, Mode, Move};
use hypergame::expansion::{materialize, ExpandedPlayer};
use hypergame::gen::{self, random_closed_term, random_dialogue, random_goal_type, random_type, TermGen};
use hypergame::semantics::{
    check_bijection, erasure_agrees, normalize_syntactically, normalize_via_games, strategy_to_term,
    term_to_strategy, Compose, UntypedPlayer,
};
use hypergame::transition::{Label, State, Style, TransitionSystem};
use hypergame::{enumerate_strategies, eta_long, ImportUniverse, Strategy, Term, TypeExpr};

type Outcome = Result<String, String>;

fn ty(s: &str) -> TypeExpr {
    TypeExpr::parse(s).unwrap()
}

fn tm(s: &str) -> Term {
    Term::parse(s).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(n: usize, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
    });
    let elapsed = start.elapsed();
    let (ok, detail) = match result {
        Ok(_) if elapsed > limit => (false, format!("too slow, limit {limit:?}")),
        Ok(d) => (true, d),
        Err(e) => (false, e),
    };
    println!(
        "criterion {n} [{name}]: {} in {:.3}s (limit {}s){}{}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if detail.is_empty() { "" } else { ": " },
        detail
    );
    ok
}

fn trace_set() -> Outcome {
    let ts = TransitionSystem::build(ty("X -> (X -> X) -> X"));
    let got: BTreeSet<String> =
        traces(&ts, &State::Initial, 4, &[], 4).iter().map(|t| trace_word(t)).collect();
    let want: BTreeSet<String> = ["ε", "1", "11", "12", "121"].iter().map(|s| s.to_string()).collect();
    ensure(got == want, || format!("got {got:?}"))?;
    Ok(format!("{got:?}"))
}

fn copycat_filter() -> Outcome {
    let u = ty("X -> Y -> X");
    let ts = TransitionSystem::build(u.clone());
    let universe = ImportUniverse::default();
    let live = enumerate_strategies(&ts, Mode::PBacktracking, 2, &universe, false);
    let cc = enumerate_strategies(&ts, Mode::PBacktracking, 2, &universe, true);
    ensure(live.len() == 2 && cc.len() == 1, || format!("{} live, {} copycat", live.len(), cc.len()))?;
    for s in &live {
        ensure(s.is_live(&ts, Mode::PBacktracking, &universe), || "enumerated strategy not live".into())?;
    }
    let t = strategy_to_term(&cc[0], &u).map_err(|e| e.to_string())?;
    ensure(t.alpha_eq(&tm("\\x:X. \\y:Y. x")), || format!("reads back as {t}"))?;
    Ok(format!("live 2, copycat 1, term {t}"))
}

fn tau_family() -> Outcome {
    let u = ty("X -> (X -> X) -> X");
    for n in 0..=3 {
        let body = (0..n).fold("x".to_string(), |acc, _| format!("f ({acc})"));
        let t = tm(&format!("\\x:X. \\f:X -> X. {body}"));
        let s = term_to_strategy(&t, &u).map_err(|e| e.to_string())?;
        let mut want = vec![(0, 1)];
        for k in 0..n {
            want.push((1, 2));
            want.push((2 * k + 2, 1));
        }
        want.push((1, 1));
        let plays: Vec<Vec<(usize, usize)>> = s.maximal_plays().iter().map(|p| p.erase()).collect();
        ensure(plays == vec![want.clone()], || format!("n={n}: {plays:?}"))?;
        let back = strategy_to_term(&s, &u).map_err(|e| e.to_string())?;
        ensure(back.alpha_eq(&t), || format!("n={n} reads back as {back}"))?;
    }
    Ok("n = 0..3".into())
}

fn bijections() -> Outcome {
    let mut notes = Vec::new();
    for (u, count) in [("forall G. G -> G", 1), ("forall G. G -> G -> G", 2), ("forall X. (X -> X) -> X -> X", 5)] {
        let r = check_bijection(&ty(u), 12, 10, Mode::BlackBox, &ImportUniverse::default());
        ensure(r.ok() && r.terms == count && r.strategies == count && r.matched == count, || format!("{u}: {r}"))?;
        notes.push(format!("{u}: {count}<->{count}"));
    }
    Ok(notes.join("; "))
}

fn h_to_h() -> Outcome {
    let h = "(forall G. G -> G)";
    let hh = ty(&format!("{h} -> {h}"));
    let ts = TransitionSystem::build(hh.clone());
    let universe = ImportUniverse::default();
    let terms = [
        tm(&format!("\\h:{h}. h")),
        tm(&format!("\\h:{h}. /\\G. \\g:G. g")),
        tm(&format!("\\h:{h}. /\\G. \\g:G. h [G -> G] (\\x:G. x) g")),
    ];
    let mut strategies: Vec<Strategy> = Vec::new();
    for t in &terms {
        let long = eta_long(t, &hh).map_err(|e| e.to_string())?;
        let s = term_to_strategy(&long, &hh).map_err(|e| e.to_string())?;
        s.validate(&ts, Mode::BlackBox).map_err(|e| e.to_string())?;
        ensure(s.is_live(&ts, Mode::BlackBox, &universe) && s.copycat_ok(&ts), || format!("{t}"))?;
        let back = strategy_to_term(&s, &hh).map_err(|e| e.to_string())?;
        ensure(back.alpha_eq(&long), || format!("{t} reads back as {back}"))?;
        ensure(!strategies.contains(&s), || format!("{t} collides"))?;
        strategies.push(s);
    }
    let iota = strategy_to_term(&strategies[0], &hh).unwrap();
    ensure(iota.alpha_eq(&tm(&format!("\\h:{h}. /\\G. \\g:G. h [G] g"))), || format!("iota = {iota}"))?;
    Ok(format!("iota reads back as {iota}"))
}

fn oracle() -> Outcome {
    let mut rng = gen::rng(2024);
    let n = 250;
    for i in 0..n {
        let (t, _) = random_closed_term(&mut rng, 25, 2, true);
        ensure(t.size() <= 25 && gen::term_quantifier_depth(&t) <= 2, || format!("generator bound: {t}"))?;
        let want = normalize_syntactically(&t).map_err(|e| e.to_string())?;
        let got = normalize_via_games(&t).map_err(|e| format!("#{i} {t}: {e}"))?;
        ensure(got.alpha_eq(&want), || format!("#{i} {t}: games {got}, syntax {want}"))?;
    }
    Ok(format!("{n}/{n} terms agree"))
}

fn type_algebra() -> Outcome {
    let sub = ty("X -> X").substitute("X", &ty("forall Y. Y"));
    ensure(sub.to_string() == "forall Y. (forall Y'. Y') -> Y", || format!("substitution: {sub}"))?;
    let imp = ty("forall X. X -> X")
        .import_prenex_seq([&ty("forall Y. Y"), &ty("Z -> Z")])
        .map_err(|e| e.to_string())?;
    ensure(imp.to_string() == "(forall Y. Y) -> Z -> Z", || format!("importation: {imp}"))?;
    let ts = TransitionSystem::build(ty("X -> X"));
    let s = State::Resolved(ty("(X' -> X' -> X') -> (forall X. X -> X) -> X''"));
    let l = Label::new(2, vec![ty("forall Y. Y"), ty("Z1 -> Z2 -> Z")]);
    let target = ts.step(&s, &l).ok_or("transition undefined")?;
    ensure(target.to_string() == "(forall Y. Y) -> Z1 -> Z2 -> Z", || format!("transition: {target}"))?;
    let colour = ts.colour(&s, &l).map_err(|e| e.to_string())?;
    ensure(&*colour == "Z", || format!("colour {colour}"))?;
    Ok(format!("{sub} | {imp} | {target}"))
}

const CASES: usize = 1000;

fn random_mode(rng: &mut gen::GenRng) -> Mode {
    use rand::Rng;
    [Mode::Full, Mode::PBacktracking, Mode::BlackBox][rng.gen_range(0..3)]
}

fn prefix_closure(rng: &mut gen::GenRng) -> Result<(), String> {
    use rand::Rng;
    let size = rng.gen_range(1..=12);
    let u = random_type(rng, size, &["X", "Y"], 1);
    let ts = TransitionSystem::build(u.clone());
    let mode = random_mode(rng);
    let universe = ImportUniverse::new(vec![ty("Z"), ty("forall Y. Y")]).with_max_imports(2);
    let d = random_dialogue(rng, &ts, mode, &universe, 7);
    ensure(d.valid_in(&ts, mode), || format!("{u} {mode:?}: generated play invalid\n{d}"))?;
    for n in 0..=d.len() {
        let p = d.prefix(n);
        ensure(p.valid_in(&ts, mode), || format!("{u} {mode:?}: prefix {n} invalid\n{d}"))?;
    }
    if mode == Mode::BlackBox {
        ensure(d.valid_in(&ts, Mode::PBacktracking), || format!("{u}: black-box play not in the P-backtracking game"))?;
    }
    if mode != Mode::Full {
        ensure(d.valid_in(&ts, Mode::Full), || format!("{u}: play not in the full game"))?;
    }
    Ok(())
}

fn normal_closed(rng: &mut gen::GenRng, quantifiers: usize) -> (Term, TypeExpr) {
    loop {
        let u = random_goal_type(rng, quantifiers);
        if let Some(t) = TermGen::new(rng, false).term(&u, 10) {
            return (t, u);
        }
    }
}

fn determinism(rng: &mut gen::GenRng) -> Result<(), String> {
    let (t, u) = normal_closed(rng, 1);
    let ts = TransitionSystem::build(u.clone());
    let s = term_to_strategy(&t, &u).map_err(|e| format!("{t}: {e}"))?;
    s.validate(&ts, Mode::BlackBox).map_err(|e| format!("{t}: {e}"))?;
    for p in s.plays() {
        let n = s.extensions(p).len();
        let want = if p.len() % 2 == 1 { n == 1 } else { true };
        ensure(want, || format!("{t}: {n} responses after\n{p}"))?;
    }
    let universe = [ty("Z"), ty("Z -> Z")];
    let mut states = vec![State::Initial];
    let mut seen = BTreeSet::new();
    while let Some(st) = states.pop() {
        if !seen.insert(st.clone()) || seen.len() > 30 {
            continue;
        }
        let labels = ts.enumerate_labels(&st, &universe, 2);
        let distinct: BTreeSet<&Label> = labels.iter().collect();
        ensure(distinct.len() == labels.len(), || format!("{u}: duplicate labels at {st}"))?;
        for l in labels {
            let a = ts.step(&st, &l);
            ensure(a == ts.step(&st, &l) && a.is_some(), || format!("{u}: step not a function at {st}"))?;
            states.push(a.unwrap());
        }
    }
    Ok(())
}

fn liveness(rng: &mut gen::GenRng, case: usize) -> Result<(), String> {
    let universe = ImportUniverse::default();
    if case.is_multiple_of(10) {
        use rand::Rng;
        let size = rng.gen_range(1..=7);
        let u = random_type(rng, size, &["X", "Y"], 1);
        let ts = TransitionSystem::build(u.clone());
        for s in enumerate_strategies(&ts, Mode::BlackBox, 6, &universe, true) {
            s.validate(&ts, Mode::BlackBox).map_err(|e| format!("{u}: {e}"))?;
            ensure(s.is_live(&ts, Mode::BlackBox, &universe) && s.copycat_ok(&ts), || format!("{u}: {}", s.to_text()))?;
        }
        return Ok(());
    }
    let (t, u) = normal_closed(rng, 1);
    let ts = TransitionSystem::build(u.clone());
    let s = term_to_strategy(&t, &u).map_err(|e| e.to_string())?;
    ensure(s.is_live(&ts, Mode::BlackBox, &universe), || format!("{t} not live"))?;
    ensure(s.copycat_ok(&ts), || format!("{t} not copycat"))?;
    Ok(())
}

fn label_erasure(rng: &mut gen::GenRng) -> Result<(), String> {
    let (tau, a, sigma, b) = loop {
        let (tau, a) = normal_closed(rng, 0);
        let b = random_goal_type(rng, 0);
        if let Some(sigma) = TermGen::new(rng, false).term(&TypeExpr::arrow(a.clone(), b.clone()), 10) {
            break (tau, a, sigma, b);
        }
    };
    let ab = TypeExpr::arrow(a.clone(), b.clone());
    let ss = term_to_strategy(&sigma, &ab).map_err(|e| e.to_string())?;
    let st = term_to_strategy(&tau, &a).map_err(|e| e.to_string())?;
    let typed = Compose::new(
        ExpandedPlayer::new(Arc::new(ss.clone()), ab.clone()),
        ExpandedPlayer::new(Arc::new(st.clone()), a.clone()),
        0,
        0,
    );
    let composite = materialize(&typed, &TransitionSystem::build(b.clone()), 1_000_000).map_err(|e| e.to_string())?;
    let untyped = Compose::new(UntypedPlayer::new(&ss), UntypedPlayer::new(&st), 0, 0);
    let agree = erasure_agrees(&typed, &untyped, &composite).map_err(|e| e.to_string())?;
    ensure(agree, || format!("({sigma}) ({tau}): erased transcripts differ"))?;
    let app = Term::app(sigma.clone(), tau.clone());
    let want = term_to_strategy(&normalize_syntactically(&app).map_err(|e| e.to_string())?, &b).map_err(|e| e.to_string())?;
    ensure(composite == want, || format!("({sigma}) ({tau}): composite differs from the normal form"))?;
    Ok(())
}

fn lazy_prenex(rng: &mut gen::GenRng) -> Result<(), String> {
    use rand::Rng;
    let size = rng.gen_range(1..=12);
    let u = random_type(rng, size, &["X", "Y"], 2);
    let lazy = TransitionSystem::with_style(u.clone(), Style::Lazy);
    let prenex = TransitionSystem::with_style(u.clone(), Style::Prenex);
    let universe = [ty("Z"), ty("forall Y. Y")];
    let a: BTreeSet<Vec<Label>> = traces(&lazy, &State::Initial, 3, &universe, 2).into_iter().collect();
    let b: BTreeSet<Vec<Label>> = traces(&prenex, &State::Initial, 3, &universe, 2).into_iter().collect();
    ensure(a == b, || format!("{u}: {} lazy traces vs {} prenex traces", a.len(), b.len()))?;
    for tr in &a {
        let sa = lazy.run(&State::Initial, tr).ok_or("lazy run failed")?;
        let sb = prenex.run(&State::Initial, tr).ok_or("prenex run failed")?;
        let (ta, tb) = (sa.as_type().cloned(), sb.as_type().cloned());
        ensure(ta.map(|t| t.prenex()) == tb.map(|t| t.prenex()), || format!("{u}: states differ after {tr:?}"))?;
    }
    Ok(())
}

type PropertyCase = dyn FnMut(&mut gen::GenRng, usize) -> Result<(), String>;

fn properties() -> Outcome {
    let mut rng = gen::rng(8);
    let suites: [(&str, &mut PropertyCase); 5] = [
        ("prefix-closure", &mut |r, _| prefix_closure(r)),
        ("determinism", &mut |r, _| determinism(r)),
        ("liveness", &mut |r, i| liveness(r, i)),
        ("label-erasure", &mut |r, _| label_erasure(r)),
        ("lazy/prenex", &mut |r, _| lazy_prenex(r)),
    ];
    let mut notes = Vec::new();
    for (name, f) in suites {
        for i in 0..CASES {
            f(&mut rng, i).map_err(|e| format!("{name} case {i}: {e}"))?;
        }
        notes.push(format!("{name} {CASES}/{CASES}"));
    }
    Ok(notes.join(", "))
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let results = [
        run(1, "trace set", secs(1), trace_set),
        run(2, "copycat filter", secs(1), copycat_filter),
        run(3, "tau_n family", secs(1), tau_family),
        run(4, "bijections", secs(30), bijections),
        run(5, "H -> H triple", secs(5), h_to_h),
        run(6, "oracle equivalence", secs(300), oracle),
        run(7, "type algebra", secs(1), type_algebra),
        run(8, "property suites", secs(120), properties),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn transcripts_parse_back() {
    let d = Dialogue::new(vec![Move::new(0, Label::new(1, vec![ty("B0")])), Move::new(1, Label::plain(1))]);
    let parsed = hypergame::format::parse_dialogue(&d.to_string()).unwrap();
    assert_eq!(parsed, d);
}
