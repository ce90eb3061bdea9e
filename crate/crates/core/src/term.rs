//! System F terms: syntax, typing, normalization and eta-long forms.
//!
//! Terms use named binders. A type variable bound by `/\X` appears inside
//! annotations and type arguments as the free variable `X` of the
//! corresponding [`TypeExpr`]. Type application instantiates by plain
//! capture-avoiding substitution; prenex conversion is not applied to term
//! types.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::types::{fresh_name, lex, Name, Tok, TypeExpr, TypeParser};
use crate::universe::ImportUniverse;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Name),
    Abs(Name, TypeExpr, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
    TyAbs(Name, Arc<Term>),
    TyApp(Arc<Term>, TypeExpr),
}

/// An argument in an application spine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Term(Term),
    Type(TypeExpr),
}

/// Typing context: later entries shadow earlier ones.
pub type Context = Vec<(Name, TypeExpr)>;

fn lookup<'a>(ctx: &'a [(Name, TypeExpr)], x: &str) -> Option<&'a TypeExpr> {
    ctx.iter().rev().find(|(n, _)| &**n == x).map(|(_, t)| t)
}

fn prime_until(hint: &str, taken: impl Fn(&str) -> bool) -> Name {
    let mut name = hint.to_string();
    while taken(&name) {
        name.push('\'');
    }
    Arc::from(name)
}

impl Term {
    pub fn var(x: &str) -> Self {
        Term::Var(Arc::from(x))
    }

    pub fn abs(x: &str, ty: TypeExpr, body: Term) -> Self {
        Term::Abs(Arc::from(x), ty, Arc::new(body))
    }

    pub fn app(f: Term, a: Term) -> Self {
        Term::App(Arc::new(f), Arc::new(a))
    }

    pub fn ty_abs(x: &str, body: Term) -> Self {
        Term::TyAbs(Arc::from(x), Arc::new(body))
    }

    pub fn ty_app(f: Term, ty: TypeExpr) -> Self {
        Term::TyApp(Arc::new(f), ty)
    }

    /// Apply `head` to a spine of arguments.
    pub fn apply(head: Term, args: impl IntoIterator<Item = Arg>) -> Self {
        args.into_iter().fold(head, |acc, a| match a {
            Arg::Term(t) => Term::app(acc, t),
            Arg::Type(ty) => Term::ty_app(acc, ty),
        })
    }

    /// Split an application spine into its head and arguments.
    pub fn spine(&self) -> (&Term, Vec<Arg>) {
        let mut args = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Term::App(f, a) => {
                    args.push(Arg::Term((**a).clone()));
                    cur = f;
                }
                Term::TyApp(f, ty) => {
                    args.push(Arg::Type(ty.clone()));
                    cur = f;
                }
                _ => break,
            }
        }
        args.reverse();
        (cur, args)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let tokens = lex(text)?;
        let mut p = TermParser { inner: TypeParser { tokens: &tokens, pos: 0, end: text.len() } };
        let t = p.term()?;
        if p.inner.pos != tokens.len() {
            return Err(Error::syntax(p.inner.offset(), "unexpected trailing input"));
        }
        Ok(t)
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Abs(_, _, b) | Term::TyAbs(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::TyApp(f, _) => 1 + f.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Abs(x, _, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
            Term::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            Term::TyAbs(_, b) => b.collect_free(bound, out),
            Term::TyApp(f, _) => f.collect_free(bound, out),
        }
    }

    pub fn free_type_vars(&self) -> BTreeSet<Name> {
        match self {
            Term::Var(_) => BTreeSet::new(),
            Term::Abs(_, ty, b) => {
                let mut s = ty.free_vars();
                s.extend(b.free_type_vars());
                s
            }
            Term::App(f, a) => {
                let mut s = f.free_type_vars();
                s.extend(a.free_type_vars());
                s
            }
            Term::TyAbs(x, b) => {
                let mut s = b.free_type_vars();
                s.remove(x);
                s
            }
            Term::TyApp(f, ty) => {
                let mut s = f.free_type_vars();
                s.extend(ty.free_vars());
                s
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    fn all_names(&self, out: &mut HashSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.to_string());
            }
            Term::Abs(x, ty, b) => {
                out.insert(x.to_string());
                out.extend(ty.free_vars().iter().map(|n| n.to_string()));
                b.all_names(out);
            }
            Term::App(f, a) => {
                f.all_names(out);
                a.all_names(out);
            }
            Term::TyAbs(x, b) => {
                out.insert(x.to_string());
                b.all_names(out);
            }
            Term::TyApp(f, ty) => {
                out.extend(ty.free_vars().iter().map(|n| n.to_string()));
                f.all_names(out);
            }
        }
    }

    /// Capture-avoiding substitution of `u` for the term variable `x`.
    pub fn subst(&self, x: &str, u: &Term) -> Term {
        let fv = u.free_vars();
        let ftv = u.free_type_vars();
        self.subst_inner(x, u, &fv, &ftv)
    }

    fn subst_inner(&self, x: &str, u: &Term, fv: &BTreeSet<Name>, ftv: &BTreeSet<Name>) -> Term {
        match self {
            Term::Var(y) => {
                if &**y == x {
                    u.clone()
                } else {
                    self.clone()
                }
            }
            Term::Abs(y, ty, b) => {
                if &**y == x {
                    return self.clone();
                }
                if fv.contains(y) {
                    let body_fv = b.free_vars();
                    let y2 = prime_until(y, |n| fv.contains(n) || body_fv.contains(n) || n == x);
                    let b2 = b.subst(y, &Term::Var(y2.clone()));
                    Term::Abs(y2, ty.clone(), Arc::new(b2.subst_inner(x, u, fv, ftv)))
                } else {
                    Term::Abs(y.clone(), ty.clone(), Arc::new(b.subst_inner(x, u, fv, ftv)))
                }
            }
            Term::App(f, a) => Term::App(
                Arc::new(f.subst_inner(x, u, fv, ftv)),
                Arc::new(a.subst_inner(x, u, fv, ftv)),
            ),
            Term::TyAbs(y, b) => {
                if ftv.contains(y) {
                    let body_ftv = b.free_type_vars();
                    let y2 = prime_until(y, |n| ftv.contains(n) || body_ftv.contains(n));
                    let b2 = b.subst_type(y, &TypeExpr::Var(y2.clone()));
                    Term::TyAbs(y2, Arc::new(b2.subst_inner(x, u, fv, ftv)))
                } else {
                    Term::TyAbs(y.clone(), Arc::new(b.subst_inner(x, u, fv, ftv)))
                }
            }
            Term::TyApp(f, ty) => Term::TyApp(Arc::new(f.subst_inner(x, u, fv, ftv)), ty.clone()),
        }
    }

    /// Capture-avoiding substitution of the type `v` for the type variable `x`.
    pub fn subst_type(&self, x: &str, v: &TypeExpr) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::Abs(y, ty, b) => {
                Term::Abs(y.clone(), ty.subst_free(x, v), Arc::new(b.subst_type(x, v)))
            }
            Term::App(f, a) => Term::App(Arc::new(f.subst_type(x, v)), Arc::new(a.subst_type(x, v))),
            Term::TyAbs(y, b) => {
                if &**y == x {
                    return self.clone();
                }
                let fv = v.free_vars();
                if fv.contains(y) {
                    let body_ftv = b.free_type_vars();
                    let y2 = prime_until(y, |n| fv.contains(n) || body_ftv.contains(n) || n == x);
                    let b2 = b.subst_type(y, &TypeExpr::Var(y2.clone()));
                    Term::TyAbs(y2, Arc::new(b2.subst_type(x, v)))
                } else {
                    Term::TyAbs(y.clone(), Arc::new(b.subst_type(x, v)))
                }
            }
            Term::TyApp(f, ty) => Term::TyApp(Arc::new(f.subst_type(x, v)), ty.subst_free(x, v)),
        }
    }

    /// Rename every binder to a canonical name in traversal order.
    pub fn canonical(&self) -> Term {
        let mut counter = 0;
        self.canon(&BTreeMap::new(), &BTreeMap::new(), &mut counter)
    }

    fn canon(
        &self,
        vars: &BTreeMap<Name, Name>,
        tvars: &BTreeMap<Name, TypeExpr>,
        counter: &mut usize,
    ) -> Term {
        match self {
            Term::Var(x) => Term::Var(vars.get(x).cloned().unwrap_or_else(|| x.clone())),
            Term::Abs(x, ty, b) => {
                let name: Name = Arc::from(format!("%x{counter}"));
                *counter += 1;
                let mut vars = vars.clone();
                vars.insert(x.clone(), name.clone());
                Term::Abs(name, ty.subst_many(tvars), Arc::new(b.canon(&vars, tvars, counter)))
            }
            Term::App(f, a) => Term::App(
                Arc::new(f.canon(vars, tvars, counter)),
                Arc::new(a.canon(vars, tvars, counter)),
            ),
            Term::TyAbs(x, b) => {
                let name: Name = Arc::from(format!("%T{counter}"));
                *counter += 1;
                let mut tvars = tvars.clone();
                tvars.insert(x.clone(), TypeExpr::Var(name.clone()));
                Term::TyAbs(name, Arc::new(b.canon(vars, &tvars, counter)))
            }
            Term::TyApp(f, ty) => {
                Term::TyApp(Arc::new(f.canon(vars, tvars, counter)), ty.subst_many(tvars))
            }
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.canonical() == other.canonical()
    }

    /// Rename every binder apart from each other and from all free names.
    pub fn freshen(&self) -> Term {
        let mut taken: HashSet<String> = self.free_vars().iter().map(|n| n.to_string()).collect();
        taken.extend(self.free_type_vars().iter().map(|n| n.to_string()));
        self.fresh_inner(&BTreeMap::new(), &BTreeMap::new(), &mut taken)
    }

    fn fresh_inner(
        &self,
        vars: &BTreeMap<Name, Name>,
        tvars: &BTreeMap<Name, TypeExpr>,
        taken: &mut HashSet<String>,
    ) -> Term {
        match self {
            Term::Var(x) => Term::Var(vars.get(x).cloned().unwrap_or_else(|| x.clone())),
            Term::Abs(x, ty, b) => {
                let name = fresh_name(x, taken);
                taken.insert(name.clone());
                let name: Name = Arc::from(name);
                let mut vars = vars.clone();
                vars.insert(x.clone(), name.clone());
                Term::Abs(name, ty.subst_many(tvars), Arc::new(b.fresh_inner(&vars, tvars, taken)))
            }
            Term::App(f, a) => Term::App(
                Arc::new(f.fresh_inner(vars, tvars, taken)),
                Arc::new(a.fresh_inner(vars, tvars, taken)),
            ),
            Term::TyAbs(x, b) => {
                let name = fresh_name(x, taken);
                taken.insert(name.clone());
                let name: Name = Arc::from(name);
                let mut tvars = tvars.clone();
                tvars.insert(x.clone(), TypeExpr::Var(name.clone()));
                Term::TyAbs(name, Arc::new(b.fresh_inner(vars, &tvars, taken)))
            }
            Term::TyApp(f, ty) => {
                Term::TyApp(Arc::new(f.fresh_inner(vars, tvars, taken)), ty.subst_many(tvars))
            }
        }
    }

    pub fn is_beta_normal(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Abs(_, _, b) | Term::TyAbs(_, b) => b.is_beta_normal(),
            Term::App(f, a) => {
                !matches!(**f, Term::Abs(..)) && f.is_beta_normal() && a.is_beta_normal()
            }
            Term::TyApp(f, _) => !matches!(**f, Term::TyAbs(..)) && f.is_beta_normal(),
        }
    }
}

/// Infer the type of `t` in `ctx`.
pub fn typecheck(ctx: &[(Name, TypeExpr)], t: &Term) -> Result<TypeExpr> {
    let mut ctx = ctx.to_vec();
    infer(&mut ctx, t)
}

fn type_error(t: &Term, msg: impl Into<String>) -> Error {
    Error::Type { term: t.to_string(), msg: msg.into() }
}

fn infer(ctx: &mut Context, t: &Term) -> Result<TypeExpr> {
    match t {
        Term::Var(x) => lookup(ctx, x).cloned().ok_or_else(|| Error::UnboundVariable(x.to_string())),
        Term::Abs(x, ty, b) => {
            ctx.push((x.clone(), ty.clone()));
            let body = infer(ctx, b);
            ctx.pop();
            Ok(TypeExpr::arrow(ty.clone(), body?))
        }
        Term::App(f, a) => {
            let fty = infer(ctx, f)?;
            let aty = infer(ctx, a)?;
            match fty {
                TypeExpr::Arrow(dom, cod) if *dom == aty => Ok((*cod).clone()),
                TypeExpr::Arrow(dom, _) => Err(type_error(
                    t,
                    format!("argument has type `{aty}` but `{dom}` was expected"),
                )),
                other => Err(type_error(t, format!("applying a term of non-arrow type `{other}`"))),
            }
        }
        Term::TyAbs(x, b) => {
            let body = infer(ctx, b)?;
            if b.free_vars().iter().any(|y| lookup(ctx, y).is_some_and(|ty| ty.occurs_free(x))) {
                return Err(type_error(t, format!("type variable `{x}` occurs free in the context")));
            }
            Ok(TypeExpr::forall(x, body))
        }
        Term::TyApp(f, v) => match infer(ctx, f)? {
            TypeExpr::Forall(_, body) => Ok(TypeExpr::open(&body, v)),
            other => Err(type_error(t, format!("type application to non-universal type `{other}`"))),
        },
    }
}

/// Weak head normal form, normal order.
fn whnf(t: &Term) -> Term {
    match t {
        Term::App(f, a) => match whnf(f) {
            Term::Abs(x, _, body) => whnf(&body.subst(&x, a)),
            f2 => Term::App(Arc::new(f2), a.clone()),
        },
        Term::TyApp(f, v) => match whnf(f) {
            Term::TyAbs(x, body) => whnf(&body.subst_type(&x, v)),
            f2 => Term::TyApp(Arc::new(f2), v.clone()),
        },
        _ => t.clone(),
    }
}

/// Full beta normal form, including type redexes.
pub fn beta_normalize(t: &Term) -> Term {
    match whnf(t) {
        Term::Abs(x, ty, b) => Term::Abs(x, ty, Arc::new(beta_normalize(&b))),
        Term::TyAbs(x, b) => Term::TyAbs(x, Arc::new(beta_normalize(&b))),
        neutral => {
            let (head, args) = neutral.spine();
            Term::apply(
                head.clone(),
                args.into_iter().map(|a| match a {
                    Arg::Term(u) => Arg::Term(beta_normalize(&u)),
                    ty => ty,
                }),
            )
        }
    }
}

/// Eta-expand a beta-normal term of type `ty` in the empty context.
pub fn eta_long(t: &Term, ty: &TypeExpr) -> Result<Term> {
    eta_long_in(&[], t, ty)
}

/// Eta-expand a beta-normal term of type `ty` in `ctx`.
pub fn eta_long_in(ctx: &[(Name, TypeExpr)], t: &Term, ty: &TypeExpr) -> Result<Term> {
    let mut ctx = ctx.to_vec();
    eta(&mut ctx, t, ty)
}

fn taken_names(ctx: &Context, t: &Term, ty: &TypeExpr) -> HashSet<String> {
    let mut used = HashSet::new();
    t.all_names(&mut used);
    for (n, cty) in ctx {
        used.insert(n.to_string());
        used.extend(cty.free_vars().iter().map(|n| n.to_string()));
    }
    used.extend(ty.free_vars().iter().map(|n| n.to_string()));
    used
}

fn eta(ctx: &mut Context, t: &Term, ty: &TypeExpr) -> Result<Term> {
    match ty {
        TypeExpr::Arrow(a, b) => match t {
            Term::Abs(x, xty, body) => {
                if xty != &**a {
                    return Err(type_error(t, format!("annotation `{xty}` does not match `{a}`")));
                }
                ctx.push((x.clone(), xty.clone()));
                let body = eta(ctx, body, b);
                ctx.pop();
                Ok(Term::Abs(x.clone(), xty.clone(), Arc::new(body?)))
            }
            Term::TyAbs(..) => Err(type_error(t, format!("type abstraction at arrow type `{ty}`"))),
            _ => {
                let used = taken_names(ctx, t, ty);
                let x: Name = Arc::from(fresh_name("x", &used));
                let applied = Term::app(t.clone(), Term::Var(x.clone()));
                ctx.push((x.clone(), (**a).clone()));
                let body = eta(ctx, &applied, b);
                ctx.pop();
                Ok(Term::Abs(x, (**a).clone(), Arc::new(body?)))
            }
        },
        TypeExpr::Forall(hint, body_ty) => match t {
            Term::TyAbs(x, body) => {
                let inner = TypeExpr::open(body_ty, &TypeExpr::Var(x.clone()));
                Ok(Term::TyAbs(x.clone(), Arc::new(eta(ctx, body, &inner)?)))
            }
            Term::Abs(..) => Err(type_error(t, format!("abstraction at universal type `{ty}`"))),
            _ => {
                let used = taken_names(ctx, t, ty);
                let x: Name = Arc::from(fresh_name(hint, &used));
                let var = TypeExpr::Var(x.clone());
                let inner = TypeExpr::open(body_ty, &var);
                let applied = Term::ty_app(t.clone(), var);
                Ok(Term::TyAbs(x, Arc::new(eta(ctx, &applied, &inner)?)))
            }
        },
        TypeExpr::Var(_) | TypeExpr::Bound(_) => {
            let (head, args) = t.spine();
            let Term::Var(h) = head else {
                return Err(Error::NotEtaLong(format!("`{t}` is not beta-normal")));
            };
            let mut cur = lookup(ctx, h).cloned().ok_or_else(|| Error::UnboundVariable(h.to_string()))?;
            let mut out = Vec::with_capacity(args.len());
            for arg in args {
                match (arg, cur) {
                    (Arg::Term(u), TypeExpr::Arrow(a, b)) => {
                        out.push(Arg::Term(eta(ctx, &u, &a)?));
                        cur = (*b).clone();
                    }
                    (Arg::Type(v), TypeExpr::Forall(_, body)) => {
                        cur = TypeExpr::open(&body, &v);
                        out.push(Arg::Type(v));
                    }
                    (_, other) => {
                        return Err(type_error(t, format!("spine does not match type `{other}`")))
                    }
                }
            }
            if &cur != ty {
                return Err(type_error(t, format!("has type `{cur}`, expected `{ty}`")));
            }
            Ok(Term::apply(head.clone(), out))
        }
    }
}

/// Eta-long beta-normal inhabitants of `ty` with size at most `size_bound`,
/// type arguments drawn from `universe`.
pub fn enumerate_normal_terms(ty: &TypeExpr, size_bound: usize, universe: &ImportUniverse) -> Vec<Term> {
    let mut e = Enumerator { universe, scope: ty.free_vars().into_iter().collect(), ctx: Vec::new() };
    let mut out: Vec<(Term, usize)> = e.intro(ty, size_bound);
    out.sort_by_key(|(_, s)| *s);
    out.into_iter().map(|(t, _)| t).collect()
}

struct Enumerator<'a> {
    universe: &'a ImportUniverse,
    scope: Vec<Name>,
    ctx: Context,
}

impl Enumerator<'_> {
    fn intro(&mut self, ty: &TypeExpr, budget: usize) -> Vec<(Term, usize)> {
        if budget == 0 {
            return Vec::new();
        }
        match ty {
            TypeExpr::Arrow(a, b) => {
                let x: Name = Arc::from(format!("x{}", self.ctx.len()));
                self.ctx.push((x.clone(), (**a).clone()));
                let bodies = self.intro(b, budget - 1);
                self.ctx.pop();
                bodies
                    .into_iter()
                    .map(|(body, s)| (Term::Abs(x.clone(), (**a).clone(), Arc::new(body)), s + 1))
                    .collect()
            }
            TypeExpr::Forall(hint, body) => {
                let used: HashSet<String> = self
                    .scope
                    .iter()
                    .map(|n| n.to_string())
                    .chain(self.ctx.iter().flat_map(|(_, t)| t.free_vars().into_iter().map(|n| n.to_string())))
                    .collect();
                let x: Name = Arc::from(fresh_name(hint, &used));
                let inner = TypeExpr::open(body, &TypeExpr::Var(x.clone()));
                self.scope.push(x.clone());
                let bodies = self.intro(&inner, budget - 1);
                self.scope.pop();
                bodies.into_iter().map(|(b, s)| (Term::TyAbs(x.clone(), Arc::new(b)), s + 1)).collect()
            }
            TypeExpr::Var(_) => {
                let mut out = Vec::new();
                for k in 0..self.ctx.len() {
                    let (x, xty) = self.ctx[k].clone();
                    if self.ctx[k + 1..].iter().any(|(y, _)| *y == x) {
                        continue;
                    }
                    self.elim(Term::Var(x), 1, &xty, ty, budget, &mut out);
                }
                out
            }
            TypeExpr::Bound(_) => Vec::new(),
        }
    }

    fn elim(
        &mut self,
        acc: Term,
        size: usize,
        cur: &TypeExpr,
        goal: &TypeExpr,
        budget: usize,
        out: &mut Vec<(Term, usize)>,
    ) {
        if size > budget {
            return;
        }
        match cur {
            TypeExpr::Var(_) => {
                if cur == goal {
                    out.push((acc, size));
                }
            }
            TypeExpr::Arrow(a, b) => {
                if size + 2 > budget {
                    return;
                }
                for (arg, s) in self.intro(a, budget - size - 1) {
                    self.elim(Term::app(acc.clone(), arg), size + 1 + s, b, goal, budget, out);
                }
            }
            TypeExpr::Forall(_, body) => {
                for v in self.universe.candidates(&self.scope) {
                    let next = TypeExpr::open(body, &v);
                    self.elim(Term::ty_app(acc.clone(), v), size + 1, &next, goal, budget, out);
                }
            }
            TypeExpr::Bound(_) => {}
        }
    }
}

struct TermParser<'a> {
    inner: TypeParser<'a>,
}

impl TermParser<'_> {
    fn term(&mut self) -> Result<Term> {
        match self.inner.peek() {
            Some(Tok::Lambda) => {
                self.inner.pos += 1;
                let x = self.inner.ident()?;
                self.inner.expect(Tok::Colon, "`:` after the bound variable")?;
                let ty = self.inner.parse_type()?;
                self.inner.expect(Tok::Dot, "`.` after the annotation")?;
                let body = self.term()?;
                Ok(Term::abs(&x, ty, body))
            }
            Some(Tok::BigLambda) => {
                self.inner.pos += 1;
                let x = self.inner.ident()?;
                self.inner.expect(Tok::Dot, "`.` after the type variable")?;
                let body = self.term()?;
                Ok(Term::ty_abs(&x, body))
            }
            _ => self.application(),
        }
    }

    fn application(&mut self) -> Result<Term> {
        let mut acc = self.atom()?;
        loop {
            match self.inner.peek() {
                Some(Tok::LBracket) => {
                    self.inner.pos += 1;
                    let ty = self.inner.parse_type()?;
                    self.inner.expect(Tok::RBracket, "`]`")?;
                    acc = Term::ty_app(acc, ty);
                }
                Some(Tok::Ident(_)) | Some(Tok::LParen) => acc = Term::app(acc, self.atom()?),
                Some(Tok::Lambda) | Some(Tok::BigLambda) => return Ok(Term::app(acc, self.term()?)),
                _ => return Ok(acc),
            }
        }
    }

    fn atom(&mut self) -> Result<Term> {
        match self.inner.peek() {
            Some(Tok::Ident(_)) => Ok(Term::var(&self.inner.ident()?)),
            Some(Tok::LParen) => {
                self.inner.pos += 1;
                let t = self.term()?;
                self.inner.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(Error::syntax(self.inner.offset(), "expected a term")),
        }
    }
}

impl std::str::FromStr for Term {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Term::parse(s)
    }
}

impl Term {
    fn write(&self, out: &mut String, ctx: Prec) {
        match self {
            Term::Var(x) => out.push_str(x),
            Term::Abs(x, ty, b) => {
                let paren = ctx != Prec::Top;
                if paren {
                    out.push('(');
                }
                out.push_str(&format!("\\{x}:{ty}. "));
                b.write(out, Prec::Top);
                if paren {
                    out.push(')');
                }
            }
            Term::TyAbs(x, b) => {
                let paren = ctx != Prec::Top;
                if paren {
                    out.push('(');
                }
                out.push_str(&format!("/\\{x}. "));
                b.write(out, Prec::Top);
                if paren {
                    out.push(')');
                }
            }
            Term::App(f, a) => {
                let paren = ctx == Prec::Arg;
                if paren {
                    out.push('(');
                }
                f.write(out, Prec::Fun);
                out.push(' ');
                a.write(out, Prec::Arg);
                if paren {
                    out.push(')');
                }
            }
            Term::TyApp(f, ty) => {
                let paren = ctx == Prec::Arg;
                if paren {
                    out.push('(');
                }
                f.write(out, Prec::Fun);
                out.push_str(&format!(" [{ty}]"));
                if paren {
                    out.push(')');
                }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Prec {
    Top,
    Fun,
    Arg,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.write(&mut out, Prec::Top);
        f.write_str(&out)
    }
}
