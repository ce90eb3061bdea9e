//! Normalization by interaction.
//!
//! A subterm in type context `D` and term context `G` with type `A` is
//! interpreted on `forall D. G -> A`. Variables are compiled directly,
//! abstractions reuse the body's strategy, applications compose and type
//! applications instantiate by splicing.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expansion::{materialize, ExpandedPlayer, Splice};
use crate::strategy::Strategy;
use crate::term::{beta_normalize, eta_long, typecheck, Term};
use crate::transition::TransitionSystem;
use crate::types::{Name, TypeExpr};

use super::compile::{strategy_to_term, term_to_strategy};
use super::interaction::{Compose, DEFAULT_BUDGET};

struct Interpreter {
    delta: Vec<Name>,
    gamma: Vec<(Name, TypeExpr)>,
    budget: usize,
}

impl Interpreter {
    fn root(&self, a: &TypeExpr) -> TypeExpr {
        let body = TypeExpr::arrows(self.gamma.iter().map(|(_, t)| t.clone()), a.clone());
        self.delta.iter().rev().fold(body, |acc, x| TypeExpr::forall(x, acc))
    }

    fn player(&self, sigma: Strategy, a: &TypeExpr) -> ExpandedPlayer {
        ExpandedPlayer::new(Arc::new(sigma), self.root(a))
    }

    fn interpret(&mut self, t: &Term) -> Result<(Strategy, TypeExpr)> {
        match t {
            Term::Var(x) => {
                let a = self
                    .gamma
                    .iter()
                    .rev()
                    .find(|(y, _)| y == x)
                    .map(|(_, a)| a.clone())
                    .ok_or_else(|| Error::UnboundVariable(x.to_string()))?;
                let mut lam = Term::Var(x.clone());
                for (y, b) in self.gamma.iter().rev() {
                    lam = Term::Abs(y.clone(), b.clone(), Arc::new(lam));
                }
                for d in self.delta.iter().rev() {
                    lam = Term::TyAbs(d.clone(), Arc::new(lam));
                }
                let root = self.root(&a);
                Ok((term_to_strategy(&eta_long(&lam, &root)?, &root)?, a))
            }
            Term::Abs(x, a, body) => {
                self.gamma.push((x.clone(), a.clone()));
                let r = self.interpret(body);
                self.gamma.pop();
                let (s, b) = r?;
                Ok((s, TypeExpr::arrow(a.clone(), b)))
            }
            Term::TyAbs(x, body) => {
                self.delta.push(x.clone());
                let r = self.interpret(body);
                self.delta.pop();
                let (s, b) = r?;
                Ok((s, TypeExpr::forall(x, b)))
            }
            Term::App(f, u) => {
                let (sigma, fa) = self.interpret(f)?;
                let (tau, _) = self.interpret(u)?;
                let TypeExpr::Arrow(_, b) = &fa else {
                    return Err(Error::Type { term: t.to_string(), msg: "applies a non-function".into() });
                };
                let b = (**b).clone();
                let engine = Compose::new(
                    self.player(sigma, &fa),
                    self.player(tau, &self.arg_type(&fa)),
                    self.gamma.len(),
                    self.delta.len(),
                )
                .with_budget(self.budget);
                let ts = TransitionSystem::build(self.root(&b));
                Ok((materialize(&engine, &ts, self.budget)?, b))
            }
            Term::TyApp(f, w) => {
                let (sigma, fa) = self.interpret(f)?;
                let TypeExpr::Forall(_, body) = &fa else {
                    return Err(Error::Type { term: t.to_string(), msg: "instantiates a non-polymorphic term".into() });
                };
                let b = TypeExpr::open(body, w);
                let splice = Splice { delta: self.delta.clone(), ty: w.clone() };
                let engine = self.player(sigma, &fa).spliced(splice);
                let ts = TransitionSystem::build(self.root(&b));
                Ok((materialize(&engine, &ts, self.budget)?, b))
            }
        }
    }

    fn arg_type(&self, fa: &TypeExpr) -> TypeExpr {
        match fa {
            TypeExpr::Arrow(a, _) => (**a).clone(),
            _ => unreachable!("checked by caller"),
        }
    }
}

/// Apply `sigma` on the closed type `A -> B` to `tau` on `A`.
pub fn apply(sigma: &Strategy, sigma_ty: &TypeExpr, tau: &Strategy, budget: usize) -> Result<Strategy> {
    let TypeExpr::Arrow(a, b) = sigma_ty else {
        return Err(Error::Precondition(format!("`{sigma_ty}` is not a function type")));
    };
    let engine = Compose::new(
        ExpandedPlayer::new(Arc::new(sigma.clone()), sigma_ty.clone()),
        ExpandedPlayer::new(Arc::new(tau.clone()), (**a).clone()),
        0,
        0,
    )
    .with_budget(budget);
    materialize(&engine, &TransitionSystem::build((**b).clone()), budget)
}

/// The strategy of a closed well-typed term, computed by interaction.
pub fn interpret(t: &Term, budget: usize) -> Result<(Strategy, TypeExpr)> {
    let t = t.freshen();
    let ty = typecheck(&[], &t)?;
    let mut it = Interpreter { delta: Vec::new(), gamma: Vec::new(), budget };
    let (s, _) = it.interpret(&t)?;
    Ok((s, ty))
}

/// Normalize a closed well-typed term through its strategy; the result is
/// eta-long and beta-normal.
pub fn normalize_via_games(t: &Term) -> Result<Term> {
    normalize_via_games_with_budget(t, DEFAULT_BUDGET)
}

pub fn normalize_via_games_with_budget(t: &Term, budget: usize) -> Result<Term> {
    let (s, ty) = interpret(t, budget)?;
    strategy_to_term(&s, &ty)
}

/// The syntactic reference: beta-normalize, then eta-expand.
pub fn normalize_syntactically(t: &Term) -> Result<Term> {
    let ty = typecheck(&[], t)?;
    eta_long(&beta_normalize(t), &ty)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(src: &str) {
        let t = Term::parse(src).unwrap();
        let games = normalize_via_games(&t).unwrap();
        let syntax = normalize_syntactically(&t).unwrap();
        assert!(games.alpha_eq(&syntax), "{src}\n games: {games}\nsyntax: {syntax}");
    }

    #[test]
    fn simple_applications() {
        check("\\x:X. x");
        check("(\\x:X -> X. x) (\\y:X. y)");
        check("\\z:X. (\\x:X. \\y:X. y) z z");
        check("\\f:X -> X. \\z:X. (\\g:X -> X. g (g z)) f");
    }

    #[test]
    fn polymorphic_identity_at_itself() {
        let id = "(/\\G. \\g:G. g)";
        check(&format!("{id} [forall G. G -> G] {id}"));
        check(&format!("/\\Z. {id} [Z -> Z]"));
    }

    #[test]
    fn church_arithmetic() {
        let n = "(forall X. (X -> X) -> X -> X)";
        let two = "(/\\X. \\f:X -> X. \\x:X. f (f x))";
        let succ = format!("(\\n:{n}. /\\X. \\f:X -> X. \\x:X. f (n [X] f x))");
        check(&format!("{succ} {two}"));
        let add = format!("(\\m:{n}. \\n:{n}. /\\X. \\f:X -> X. \\x:X. m [X] f (n [X] f x))");
        check(&format!("{add} {two} {two}"));
        check(&format!("{two} [{n}] {succ} {two}"));
    }
}
