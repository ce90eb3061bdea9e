//! Seeded random generators for types, terms and dialogues.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dialogue::{legal_moves, Dialogue, Mode};
use crate::term::{typecheck, Term};
use crate::transition::TransitionSystem;
use crate::types::{Name, TypeExpr};
use crate::universe::ImportUniverse;

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random type of at most `size` constructors over the free variables
/// `free`, with at most `quantifiers` nested quantifiers.
pub fn random_type(rng: &mut GenRng, size: usize, free: &[&str], quantifiers: usize) -> TypeExpr {
    let mut scope: Vec<Name> = free.iter().map(|s| Arc::from(*s)).collect();
    let mut counter = 0;
    gen_type(rng, size.max(1), &mut scope, quantifiers, &mut counter)
}

fn gen_type(rng: &mut GenRng, size: usize, scope: &mut Vec<Name>, quantifiers: usize, counter: &mut usize) -> TypeExpr {
    let roll = rng.gen_range(0..10);
    if size < 3 || roll < 3 {
        if scope.is_empty() {
            scope.push(Arc::from("X"));
        }
        return TypeExpr::Var(scope.choose(rng).expect("non-empty").clone());
    }
    if quantifiers > 0 && roll < 5 {
        let name = format!("Q{counter}");
        *counter += 1;
        scope.push(Arc::from(name.as_str()));
        let body = gen_type(rng, size - 1, scope, quantifiers - 1, counter);
        scope.pop();
        return TypeExpr::forall(&name, body);
    }
    let left = rng.gen_range(1..size - 1);
    let a = gen_type(rng, left, scope, quantifiers, counter);
    let b = gen_type(rng, size - 1 - left, scope, quantifiers, counter);
    TypeExpr::arrow(a, b)
}

/// A random simple type (no quantifiers).
pub fn random_lambda_type(rng: &mut GenRng, size: usize, free: &[&str]) -> TypeExpr {
    random_type(rng, size, free, 0)
}

/// Type-directed random terms.
pub struct TermGen<'a> {
    pub rng: &'a mut GenRng,
    /// Introduce beta redexes and partial applications; otherwise the
    /// output is eta-long and beta-normal.
    pub redexes: bool,
    ty_scope: Vec<Name>,
    ctx: Vec<(Name, TypeExpr)>,
    counter: usize,
    work: usize,
}

const WORK_LIMIT: usize = 4000;

impl<'a> TermGen<'a> {
    pub fn new(rng: &'a mut GenRng, redexes: bool) -> Self {
        TermGen { rng, redexes, ty_scope: Vec::new(), ctx: Vec::new(), counter: 0, work: 0 }
    }

    fn fresh(&mut self, prefix: &str) -> Name {
        self.counter += 1;
        Arc::from(format!("{prefix}{}", self.counter))
    }

    fn small_type(&mut self, free: &[Name]) -> TypeExpr {
        let mut pool: Vec<Name> = self.ty_scope.clone();
        pool.extend(free.iter().cloned());
        if pool.is_empty() {
            pool.push(Arc::from("X"));
        }
        let a = TypeExpr::Var(pool.choose(self.rng).expect("non-empty").clone());
        match self.rng.gen_range(0..6) {
            0 => {
                let b = TypeExpr::Var(pool.choose(self.rng).expect("non-empty").clone());
                TypeExpr::arrow(a, b)
            }
            1 => TypeExpr::forall("G", TypeExpr::arrow(TypeExpr::var("G"), TypeExpr::var("G"))),
            _ => a,
        }
    }

    /// A type likely to be inhabited in the current context.
    fn argument_type(&mut self, free: &[Name]) -> TypeExpr {
        let known: Vec<TypeExpr> = self.ctx.iter().map(|(_, t)| t.clone()).collect();
        match (self.rng.gen_range(0..4), known.choose(self.rng)) {
            (0 | 1, Some(t)) => t.clone(),
            (2, Some(t)) => TypeExpr::arrow(t.clone(), t.clone()),
            (3, _) => TypeExpr::forall("G", TypeExpr::arrow(TypeExpr::var("G"), TypeExpr::var("G"))),
            _ => self.small_type(free),
        }
    }

    /// A term of type `ty` in the current context, or `None` when the fuel
    /// runs out before a term is found.
    pub fn term(&mut self, ty: &TypeExpr, fuel: usize) -> Option<Term> {
        self.work += 1;
        if fuel == 0 || self.work > WORK_LIMIT {
            return None;
        }
        if self.redexes && fuel > 3 && self.rng.gen_bool(0.4) {
            if let Some(t) = self.redex(ty, fuel) {
                return Some(t);
            }
        }
        match ty {
            TypeExpr::Arrow(a, b) if self.rng.gen_bool(0.8) || !self.redexes => {
                let x = self.fresh("x");
                self.ctx.push((x.clone(), (**a).clone()));
                let body = self.term(b, fuel - 1);
                self.ctx.pop();
                Some(Term::Abs(x, (**a).clone(), Arc::new(body?)))
            }
            TypeExpr::Forall(_, body) if self.rng.gen_bool(0.8) || !self.redexes => {
                let x = self.fresh("T");
                let opened = TypeExpr::open(body, &TypeExpr::Var(x.clone()));
                self.ty_scope.push(x.clone());
                let b = self.term(&opened, fuel - 1);
                self.ty_scope.pop();
                Some(Term::TyAbs(x, Arc::new(b?)))
            }
            _ => self.neutral(ty, fuel),
        }
    }

    fn redex(&mut self, ty: &TypeExpr, fuel: usize) -> Option<Term> {
        let free: Vec<Name> = ty.free_vars().into_iter().collect();
        if self.rng.gen_bool(0.6) {
            let a = self.argument_type(&free);
            let x = self.fresh("x");
            self.ctx.push((x.clone(), a.clone()));
            let body = self.term(ty, fuel / 2);
            self.ctx.pop();
            let arg = self.term(&a, fuel / 2)?;
            Some(Term::app(Term::Abs(x, a, Arc::new(body?)), arg))
        } else {
            let y = free.choose(self.rng)?.clone();
            let x = self.fresh("T");
            let abstracted = abstract_some(self.rng, ty, &y, &x);
            self.ty_scope.push(x.clone());
            let body = self.term(&abstracted, fuel - 1);
            self.ty_scope.pop();
            Some(Term::ty_app(Term::TyAbs(x, Arc::new(body?)), TypeExpr::Var(y)))
        }
    }

    /// A variable applied to arguments until its type reaches `ty`.
    fn neutral(&mut self, ty: &TypeExpr, fuel: usize) -> Option<Term> {
        let mut heads: Vec<(Name, TypeExpr)> = self.ctx.clone();
        heads.reverse();
        heads.shuffle(self.rng);
        for (h, hty) in heads {
            for _ in 0..3 {
                if let Some(t) = self.try_head(&h, &hty, ty, fuel) {
                    return Some(t);
                }
            }
        }
        None
    }

    fn try_head(&mut self, h: &Name, hty: &TypeExpr, goal: &TypeExpr, fuel: usize) -> Option<Term> {
        let mut plan: Vec<Result<TypeExpr, TypeExpr>> = Vec::new();
        let mut cur = hty.clone();
        let goal_free: Vec<Name> = goal.free_vars().into_iter().collect();
        loop {
            if &cur == goal && (self.redexes || !matches!(cur, TypeExpr::Arrow(..) | TypeExpr::Forall(..))) {
                break;
            }
            match cur {
                TypeExpr::Forall(_, body) => {
                    let v = if matches!(*body, TypeExpr::Bound(0)) || self.rng.gen_bool(0.3) {
                        goal.clone()
                    } else {
                        self.small_type(&goal_free)
                    };
                    cur = TypeExpr::open(&body, &v);
                    plan.push(Err(v));
                }
                TypeExpr::Arrow(a, b) => {
                    plan.push(Ok((*a).clone()));
                    cur = (*b).clone();
                }
                _ => return None,
            }
            if plan.len() > 6 {
                return None;
            }
        }
        let n_args = plan.iter().filter(|p| p.is_ok()).count().max(1);
        let share = (fuel - 1) / n_args;
        let mut t = Term::Var(h.clone());
        for step in plan {
            t = match step {
                Err(v) => Term::ty_app(t, v),
                Ok(a) => Term::app(t, self.term(&a, share)?),
            };
        }
        Some(t)
    }
}

/// Replace a random subset of the free occurrences of `y` in `ty` by `x`.
fn abstract_some(rng: &mut GenRng, ty: &TypeExpr, y: &Name, x: &Name) -> TypeExpr {
    match ty {
        TypeExpr::Var(v) if v == y && rng.gen_bool(0.7) => TypeExpr::Var(x.clone()),
        TypeExpr::Arrow(a, b) => TypeExpr::arrow(abstract_some(rng, a, y, x), abstract_some(rng, b, y, x)),
        TypeExpr::Forall(h, body) => TypeExpr::Forall(h.clone(), Arc::new(abstract_some(rng, body, y, x))),
        other => other.clone(),
    }
}

/// A function type whose result head is the head of one of its arguments,
/// so that it is usually inhabited; sometimes generalized over `X`.
pub fn random_goal_type(rng: &mut GenRng, quantifiers: usize) -> TypeExpr {
    let n = rng.gen_range(1..4);
    let args: Vec<TypeExpr> = (0..n).map(|_| {
        let size = rng.gen_range(1..6);
        random_type(rng, size, &["X", "Y"], quantifiers)
    }).collect();
    let head = args
        .choose(rng)
        .and_then(TypeExpr::head)
        .filter(|h| h.as_ref() == "X" || h.as_ref() == "Y")
        .map_or_else(|| TypeExpr::var("X"), TypeExpr::Var);
    let ty = TypeExpr::arrows(args, head);
    if quantifiers > 0 && rng.gen_bool(0.4) {
        TypeExpr::forall("X", ty)
    } else {
        ty
    }
}

/// Largest quantifier depth among the types a term mentions.
pub fn term_quantifier_depth(t: &Term) -> usize {
    match t {
        Term::Var(_) => 0,
        Term::Abs(_, a, b) => a.quantifier_depth().max(term_quantifier_depth(b)),
        Term::App(f, a) => term_quantifier_depth(f).max(term_quantifier_depth(a)),
        Term::TyAbs(_, b) => 1 + term_quantifier_depth(b),
        Term::TyApp(f, v) => v.quantifier_depth().max(term_quantifier_depth(f)),
    }
}

/// A closed well-typed term of size at most `max_size` whose types have
/// quantifier depth at most `max_depth`. With `redexes` the term is not
/// beta-normal and has size at least `max_size / 3`.
pub fn random_closed_term(rng: &mut GenRng, max_size: usize, max_depth: usize, redexes: bool) -> (Term, TypeExpr) {
    let min_size = if redexes { max_size / 3 } else { 1 };
    loop {
        let ty = random_goal_type(rng, max_depth.min(1));
        let fuel = rng.gen_range(6..20);
        let mut g = TermGen::new(rng, redexes);
        let Some(t) = g.term(&ty, fuel) else { continue };
        if t.size() > max_size || t.size() < min_size || term_quantifier_depth(&t) > max_depth {
            continue;
        }
        if redexes && t.is_beta_normal() {
            continue;
        }
        if let Ok(got) = typecheck(&[], &t) {
            debug_assert_eq!(got, ty);
            return (t, got);
        }
    }
}

/// A random walk through the legal moves of `ts` of at most `max_len` moves.
pub fn random_dialogue(
    rng: &mut GenRng,
    ts: &TransitionSystem,
    mode: Mode,
    universe: &ImportUniverse,
    max_len: usize,
) -> Dialogue {
    let mut d = Dialogue::default();
    while d.len() < max_len {
        let moves = legal_moves(ts, &d, mode, universe);
        let Some(m) = moves.choose(rng) else { break };
        d = d.extended(m.clone());
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_terms_typecheck() {
        let mut r = rng(7);
        for _ in 0..200 {
            let (t, ty) = random_closed_term(&mut r, 25, 2, true);
            assert_eq!(typecheck(&[], &t).unwrap(), ty);
            assert!(t.free_vars().is_empty());
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_closed_term(&mut rng(3), 25, 2, true).0;
        let b = random_closed_term(&mut rng(3), 25, 2, true).0;
        assert_eq!(a, b);
    }
}
