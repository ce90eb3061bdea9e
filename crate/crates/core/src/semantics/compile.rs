//! Terms to strategies and back.
//!
//! An O-move entering a subterm binds that subterm's outer abstractions: its
//! black boxes name the type abstractions and its branches the term
//! abstractions. P answers with the head variable of the body: the pointer
//! and branch locate the binder, the imports are the head's type arguments,
//! and O's choice of branch in P's target enters the matching term argument.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::dialogue::{black_box_name, Dialogue, Move};
use crate::error::{Error, Result};
use crate::format;
use crate::strategy::Strategy;
use crate::term::{eta_long, typecheck, Arg, Term};
use crate::transition::{Label, State, TransitionSystem};
use crate::types::{Name, TypeExpr};

struct Compiler<'a> {
    ts: &'a TransitionSystem,
    out: Strategy,
}

#[derive(Clone, Default)]
struct Scope {
    vars: BTreeMap<Name, (usize, usize)>,
    types: BTreeMap<Name, TypeExpr>,
}

fn state_after(states: &[State], pos: usize) -> State {
    if pos == 0 {
        State::Initial
    } else {
        states[pos - 1].clone()
    }
}

/// O's forced black-box move choosing `branch` after `play`.
fn forced_o_move(ts: &TransitionSystem, play: &Dialogue, states: &[State], branch: usize) -> Result<Move> {
    let from = state_after(states, play.len());
    let t = ts
        .branch_type(&from, branch)
        .ok_or_else(|| Error::UndefinedTransition(format!("{from} has no branch {branch}")))?;
    let avoid = ts.root().free_vars();
    let used = play.black_boxes().len();
    let imports = (0..t.available_count())
        .map(|j| TypeExpr::Var(black_box_name(used + j, &avoid)))
        .collect();
    Ok(Move::new(play.len(), Label::new(branch, imports)))
}

fn not_eta_long(t: &Term) -> Error {
    Error::NotEtaLong(t.to_string())
}

impl Compiler<'_> {
    /// `play` ends with an O-move that entered `term` at branch type `ty`.
    fn o_move(&mut self, play: Dialogue, states: Vec<State>, term: &Term, ty: &TypeExpr, scope: &Scope) -> Result<()> {
        let o_pos = play.len();
        let boxes = play.at(o_pos).label.imports.clone();
        let mut scope = scope.clone();
        let (mut cur_ty, mut cur) = (ty.clone(), term.clone());
        let (mut branch, mut next_box) = (0, 0);
        loop {
            match (&cur_ty, &cur) {
                (TypeExpr::Forall(_, body), Term::TyAbs(x, b)) => {
                    let v = boxes.get(next_box).cloned().ok_or_else(|| not_eta_long(term))?;
                    scope.types.insert(x.clone(), v.clone());
                    next_box += 1;
                    cur_ty = TypeExpr::open(body, &v);
                    cur = (**b).clone();
                }
                (TypeExpr::Arrow(_, rest), Term::Abs(x, _, b)) => {
                    branch += 1;
                    scope.vars.insert(x.clone(), (o_pos, branch));
                    cur_ty = (**rest).clone();
                    cur = (**b).clone();
                }
                (TypeExpr::Var(_), _) => break,
                _ => return Err(not_eta_long(term)),
            }
        }
        let (head, args) = cur.spine();
        let Term::Var(h) = head else {
            return Err(not_eta_long(term));
        };
        let &(pos, br) = scope.vars.get(h).ok_or_else(|| Error::UnboundVariable(h.to_string()))?;
        let mut imports = Vec::new();
        let mut term_args = Vec::new();
        for a in args {
            match a {
                Arg::Type(v) => imports.push(v.subst_many(&scope.types)),
                Arg::Term(u) => term_args.push(u),
            }
        }
        let r = Move::new(pos, Label::new(br, imports));
        let from = state_after(&states, pos);
        let target = self
            .ts
            .step(&from, &r.label)
            .ok_or_else(|| Error::UndefinedTransition(format!("{from} --{}-->", r.label)))?;
        let play = play.extended(r);
        let mut states = states;
        states.push(target.clone());
        let n = self.ts.branch_count(&target);
        if n != term_args.len() {
            return Err(not_eta_long(term));
        }
        if n == 0 {
            self.out.insert_with_prefixes(&play);
        }
        for (j, arg) in term_args.iter().enumerate() {
            let o = forced_o_move(self.ts, &play, &states, j + 1)?;
            let arg_ty = self.ts.branch_type(&target, j + 1).expect("branch in range");
            let o_target = self.ts.step(&target, &o.label).expect("forced move steps");
            let mut st = states.clone();
            st.push(o_target);
            self.o_move(play.extended(o), st, arg, &arg_ty, &scope)?;
        }
        Ok(())
    }
}

/// The black-box strategy of a closed eta-long beta-normal term of type `ty`.
pub fn term_to_strategy(t: &Term, ty: &TypeExpr) -> Result<Strategy> {
    if let Some(x) = t.free_vars().into_iter().next() {
        return Err(Error::UnboundVariable(x.to_string()));
    }
    let got = typecheck(&[], t)?;
    if &got != ty {
        return Err(Error::Type { term: t.to_string(), msg: format!("has type `{got}`, expected `{ty}`") });
    }
    if !t.is_beta_normal() || eta_long(t, ty)? != *t {
        return Err(not_eta_long(t));
    }
    let ts = TransitionSystem::build(ty.clone());
    let mut c = Compiler { ts: &ts, out: Strategy::empty() };
    let open = forced_o_move(&ts, &Dialogue::default(), &[], 1)?;
    let s = ts.step(&State::Initial, &open.label).expect("opening steps");
    c.o_move(Dialogue::new(vec![open]), vec![s], t, ty, &Scope::default())?;
    Ok(c.out)
}

enum Binder {
    Term(Name, TypeExpr),
    Type(Name),
}

struct Reader<'a> {
    ts: &'a TransitionSystem,
    sigma: &'a Strategy,
    counter: usize,
}

impl Reader<'_> {
    fn witness(property: &str, d: &Dialogue) -> Error {
        Error::Strategy { property: property.into(), witness: format::write_dialogue(d, None) }
    }

    fn o_move(
        &mut self,
        play: &Dialogue,
        states: &[State],
        ty: &TypeExpr,
        vars: &BTreeMap<(usize, usize), Name>,
    ) -> Result<Term> {
        let o_pos = play.len();
        let boxes = &play.at(o_pos).label.imports;
        let mut vars = vars.clone();
        let mut binders: Vec<Binder> = Vec::new();
        let mut cur_ty = ty.clone();
        let (mut branch, mut next_box) = (0, 0);
        loop {
            match cur_ty {
                TypeExpr::Forall(_, body) => {
                    let v = boxes.get(next_box).cloned().ok_or_else(|| Self::witness("black-box", play))?;
                    let TypeExpr::Var(name) = &v else {
                        return Err(Self::witness("black-box", play));
                    };
                    binders.push(Binder::Type(name.clone()));
                    next_box += 1;
                    cur_ty = TypeExpr::open(&body, &v);
                }
                TypeExpr::Arrow(a, rest) => {
                    branch += 1;
                    self.counter += 1;
                    let x: Name = Arc::from(format!("x{}", self.counter));
                    vars.insert((o_pos, branch), x.clone());
                    binders.push(Binder::Term(x, (*a).clone()));
                    cur_ty = (*rest).clone();
                }
                _ => break,
            }
        }
        let r = self.sigma.response(play).cloned().ok_or_else(|| Self::witness("live", play))?;
        let head = vars.get(&(r.back_ref, r.label.branch)).cloned().ok_or_else(|| Self::witness("well-scoped", play))?;
        let from = state_after(states, r.back_ref);
        let target = self.ts.step(&from, &r.label).ok_or_else(|| Self::witness("inside the game", play))?;
        let o_state = &states[o_pos - 1];
        if o_state.as_type().and_then(TypeExpr::head) != target.as_type().and_then(TypeExpr::head) {
            return Err(Self::witness("copycat", &play.extended(r)));
        }
        let mut head_ty = self.ts.branch_type(&from, r.label.branch).expect("step succeeded");
        let play_r = play.extended(r.clone());
        let mut states_r = states.to_vec();
        states_r.push(target.clone());
        let mut args = Vec::new();
        let mut imports = r.label.imports.iter();
        let mut j = 0;
        loop {
            match head_ty {
                TypeExpr::Forall(_, body) => {
                    let v = imports.next().ok_or_else(|| Self::witness("inside the game", &play_r))?;
                    args.push(Arg::Type(v.clone()));
                    head_ty = TypeExpr::open(&body, v);
                }
                TypeExpr::Arrow(_, rest) => {
                    j += 1;
                    let o = forced_o_move(self.ts, &play_r, &states_r, j)?;
                    let arg_ty = self.ts.branch_type(&target, j).expect("branch in range");
                    let o_target = self.ts.step(&target, &o.label).expect("forced move steps");
                    let play_o = play_r.extended(o);
                    if !self.sigma.contains(&play_o) {
                        return Err(Self::witness("live", &play_o));
                    }
                    let mut st = states_r.clone();
                    st.push(o_target);
                    args.push(Arg::Term(self.o_move(&play_o, &st, &arg_ty, &vars)?));
                    head_ty = (*rest).clone();
                }
                _ => break,
            }
        }
        let mut out = Term::apply(Term::Var(head), args);
        for b in binders.into_iter().rev() {
            out = match b {
                Binder::Term(x, a) => Term::Abs(x, a, Arc::new(out)),
                Binder::Type(name) => Term::TyAbs(name, Arc::new(out)),
            };
        }
        Ok(out)
    }
}

/// The eta-long beta-normal term of type `ty` whose strategy is `sigma`.
pub fn strategy_to_term(sigma: &Strategy, ty: &TypeExpr) -> Result<Term> {
    let ts = TransitionSystem::build(ty.clone());
    let open = forced_o_move(&ts, &Dialogue::default(), &[], 1)?;
    let play = Dialogue::new(vec![open]);
    if !sigma.contains(&play) {
        return Err(Reader::witness("live", &play));
    }
    let s = ts.step(&State::Initial, &play.at(1).label).expect("opening steps");
    let mut r = Reader { ts: &ts, sigma, counter: 0 };
    r.o_move(&play, &[s], ty, &BTreeMap::new())
}
