//! The System F type algebra.
//!
//! Types are stored locally nameless: free variables carry their name and
//! bound variables are de Bruijn indices. A `Forall` keeps the binder name it
//! was written with, but only as a display hint: equality, ordering and
//! hashing ignore hints, so `==` on [`TypeExpr`] is alpha-equivalence.
//!
//! Quantifiers are resolved lazily. A quantifier is *available* when it would
//! be outermost after prenex conversion, i.e. it sits on the spine of arrow
//! codomains. Importing a type deletes the leftmost available quantifier and
//! substitutes the import for its variable, without converting to prenex form.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Name = Arc<str>;

#[derive(Clone, Debug)]
pub enum TypeExpr {
    /// A free type variable.
    Var(Name),
    /// A bound type variable as a de Bruijn index.
    Bound(usize),
    Arrow(Arc<TypeExpr>, Arc<TypeExpr>),
    /// A universal quantifier; the name is a display hint only.
    Forall(Name, Arc<TypeExpr>),
}

/// A resolved type `T1 -> ... -> Tn -> X` split into branches and head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedView {
    pub branches: Vec<TypeExpr>,
    pub head: Name,
}

impl ResolvedView {
    pub fn reassemble(&self) -> TypeExpr {
        self.branches
            .iter()
            .rev()
            .fold(TypeExpr::var(&self.head), |acc, b| TypeExpr::arrow(b.clone(), acc))
    }
}

impl TypeExpr {
    pub fn var(name: &str) -> Self {
        TypeExpr::Var(Arc::from(name))
    }

    pub fn arrow(domain: TypeExpr, codomain: TypeExpr) -> Self {
        TypeExpr::Arrow(Arc::new(domain), Arc::new(codomain))
    }

    /// `forall name. body`, binding every free occurrence of `name` in `body`.
    pub fn forall(name: &str, body: TypeExpr) -> Self {
        TypeExpr::Forall(Arc::from(name), Arc::new(body.abstract_var(name, 0)))
    }

    /// Right-nested arrows ending in `head`.
    pub fn arrows(branches: impl IntoIterator<Item = TypeExpr>, head: TypeExpr) -> Self {
        let branches: Vec<_> = branches.into_iter().collect();
        branches.into_iter().rev().fold(head, |acc, b| TypeExpr::arrow(b, acc))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let tokens = lex(text)?;
        let mut parser = TypeParser { tokens: &tokens, pos: 0, end: text.len() };
        let ty = parser.parse_type()?;
        if parser.pos != tokens.len() {
            return Err(Error::syntax(parser.offset(), "unexpected trailing input"));
        }
        Ok(ty)
    }

    fn abstract_var(&self, name: &str, depth: usize) -> Self {
        match self {
            TypeExpr::Var(n) if &**n == name => TypeExpr::Bound(depth),
            TypeExpr::Var(_) | TypeExpr::Bound(_) => self.clone(),
            TypeExpr::Arrow(a, b) => {
                TypeExpr::arrow(a.abstract_var(name, depth), b.abstract_var(name, depth))
            }
            TypeExpr::Forall(h, body) => {
                TypeExpr::Forall(h.clone(), Arc::new(body.abstract_var(name, depth + 1)))
            }
        }
    }

    /// Replace the loose index `depth` by `value`, which must be locally closed.
    fn instantiate(&self, value: &TypeExpr, depth: usize) -> Self {
        match self {
            TypeExpr::Bound(i) if *i == depth => value.clone(),
            TypeExpr::Bound(i) if *i > depth => TypeExpr::Bound(i - 1),
            TypeExpr::Var(_) | TypeExpr::Bound(_) => self.clone(),
            TypeExpr::Arrow(a, b) => {
                TypeExpr::arrow(a.instantiate(value, depth), b.instantiate(value, depth))
            }
            TypeExpr::Forall(h, body) => {
                TypeExpr::Forall(h.clone(), Arc::new(body.instantiate(value, depth + 1)))
            }
        }
    }

    fn shift(&self, by: usize, cutoff: usize) -> Self {
        match self {
            TypeExpr::Bound(i) if *i >= cutoff => TypeExpr::Bound(i + by),
            TypeExpr::Var(_) | TypeExpr::Bound(_) => self.clone(),
            TypeExpr::Arrow(a, b) => TypeExpr::arrow(a.shift(by, cutoff), b.shift(by, cutoff)),
            TypeExpr::Forall(h, body) => {
                TypeExpr::Forall(h.clone(), Arc::new(body.shift(by, cutoff + 1)))
            }
        }
    }

    /// Open the body of a quantifier with `value` in place of its variable.
    pub fn open(body: &TypeExpr, value: &TypeExpr) -> TypeExpr {
        body.instantiate(value, 0)
    }

    /// Capture-avoiding substitution of `value` for the free variable `name`,
    /// without prenex conversion.
    pub fn subst_free(&self, name: &str, value: &TypeExpr) -> Self {
        match self {
            TypeExpr::Var(n) if &**n == name => value.clone(),
            TypeExpr::Var(_) | TypeExpr::Bound(_) => self.clone(),
            TypeExpr::Arrow(a, b) => {
                TypeExpr::arrow(a.subst_free(name, value), b.subst_free(name, value))
            }
            TypeExpr::Forall(h, body) => {
                TypeExpr::Forall(h.clone(), Arc::new(body.subst_free(name, value)))
            }
        }
    }

    /// Simultaneous substitution of free variables.
    pub fn subst_many(&self, map: &BTreeMap<Name, TypeExpr>) -> Self {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            TypeExpr::Var(n) => map.get(n).cloned().unwrap_or_else(|| self.clone()),
            TypeExpr::Bound(_) => self.clone(),
            TypeExpr::Arrow(a, b) => TypeExpr::arrow(a.subst_many(map), b.subst_many(map)),
            TypeExpr::Forall(h, body) => TypeExpr::Forall(h.clone(), Arc::new(body.subst_many(map))),
        }
    }

    /// `T[V/X]`: substitution followed by prenex conversion.
    pub fn substitute(&self, name: &str, value: &TypeExpr) -> Self {
        self.subst_free(name, value).prenex()
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self {
            TypeExpr::Var(n) => {
                out.insert(n.clone());
            }
            TypeExpr::Bound(_) => {}
            TypeExpr::Arrow(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            TypeExpr::Forall(_, body) => body.collect_free(out),
        }
    }

    pub fn occurs_free(&self, name: &str) -> bool {
        match self {
            TypeExpr::Var(n) => &**n == name,
            TypeExpr::Bound(_) => false,
            TypeExpr::Arrow(a, b) => a.occurs_free(name) || b.occurs_free(name),
            TypeExpr::Forall(_, body) => body.occurs_free(name),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn size(&self) -> usize {
        match self {
            TypeExpr::Var(_) | TypeExpr::Bound(_) => 1,
            TypeExpr::Arrow(a, b) => 1 + a.size() + b.size(),
            TypeExpr::Forall(_, body) => 1 + body.size(),
        }
    }

    /// Maximum nesting of quantifiers.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            TypeExpr::Var(_) | TypeExpr::Bound(_) => 0,
            TypeExpr::Arrow(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            TypeExpr::Forall(_, body) => 1 + body.quantifier_depth(),
        }
    }

    pub fn has_quantifier(&self) -> bool {
        self.quantifier_depth() > 0
    }

    /// Pull every quantifier out of arrow codomains: `T -> forall X. U`
    /// becomes `forall X. T -> U`, throughout the type.
    pub fn prenex(&self) -> Self {
        match self {
            TypeExpr::Var(_) | TypeExpr::Bound(_) => self.clone(),
            TypeExpr::Forall(h, body) => TypeExpr::Forall(h.clone(), Arc::new(body.prenex())),
            TypeExpr::Arrow(a, b) => {
                let domain = a.prenex();
                let mut core = b.prenex();
                let mut hints = Vec::new();
                while let TypeExpr::Forall(h, body) = core {
                    hints.push(h);
                    core = (*body).clone();
                }
                let mut out = TypeExpr::arrow(domain.shift(hints.len(), 0), core);
                for h in hints.into_iter().rev() {
                    out = TypeExpr::Forall(h, Arc::new(out));
                }
                out
            }
        }
    }

    pub fn is_prenex(&self) -> bool {
        *self == self.prenex()
    }

    /// Binder hints of the available quantifiers, leftmost first.
    pub fn available_quantifiers(&self) -> Vec<Name> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                TypeExpr::Arrow(_, b) => cur = b,
                TypeExpr::Forall(h, body) => {
                    out.push(h.clone());
                    cur = body;
                }
                TypeExpr::Var(_) | TypeExpr::Bound(_) => return out,
            }
        }
    }

    pub fn available_count(&self) -> usize {
        let mut n = 0;
        let mut cur = self;
        loop {
            match cur {
                TypeExpr::Arrow(_, b) => cur = b,
                TypeExpr::Forall(_, body) => {
                    n += 1;
                    cur = body;
                }
                TypeExpr::Var(_) | TypeExpr::Bound(_) => return n,
            }
        }
    }

    pub fn is_resolved(&self) -> bool {
        self.available_count() == 0
    }

    /// Lazy importation: delete the leftmost available quantifier and
    /// substitute `value` for its variable.
    pub fn import_lazy(&self, value: &TypeExpr) -> Result<Self> {
        match self {
            TypeExpr::Arrow(a, b) => Ok(TypeExpr::Arrow(a.clone(), Arc::new(b.import_lazy(value)?))),
            TypeExpr::Forall(_, body) => Ok(TypeExpr::open(body, value)),
            TypeExpr::Var(_) | TypeExpr::Bound(_) => {
                Err(Error::NoAvailableQuantifier(self.to_string()))
            }
        }
    }

    pub fn import_seq<'a>(&self, values: impl IntoIterator<Item = &'a TypeExpr>) -> Result<Self> {
        values.into_iter().try_fold(self.clone(), |acc, v| acc.import_lazy(v))
    }

    /// Prenex-style importation: `forall X. T . V = T[V/X]` on the prenex form.
    pub fn import_prenex(&self, value: &TypeExpr) -> Result<Self> {
        let p = self.prenex();
        match &p {
            TypeExpr::Forall(_, body) => Ok(TypeExpr::open(body, value).prenex()),
            _ => Err(Error::NoAvailableQuantifier(self.to_string())),
        }
    }

    pub fn import_prenex_seq<'a>(
        &self,
        values: impl IntoIterator<Item = &'a TypeExpr>,
    ) -> Result<Self> {
        values.into_iter().try_fold(self.clone(), |acc, v| acc.import_prenex(v))
    }

    pub fn resolved_view(&self) -> Result<ResolvedView> {
        let mut branches = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                TypeExpr::Arrow(a, b) => {
                    branches.push((**a).clone());
                    cur = b;
                }
                TypeExpr::Var(head) => return Ok(ResolvedView { branches, head: head.clone() }),
                TypeExpr::Forall(..) | TypeExpr::Bound(_) => {
                    return Err(Error::Unresolved(self.to_string()))
                }
            }
        }
    }

    /// The rightmost variable of a resolved type.
    pub fn head(&self) -> Option<Name> {
        match self {
            TypeExpr::Arrow(_, b) => b.head(),
            TypeExpr::Var(n) => Some(n.clone()),
            _ => None,
        }
    }

    /// Number of branches of a resolved type.
    pub fn branch_count(&self) -> usize {
        match self {
            TypeExpr::Arrow(_, b) => 1 + b.branch_count(),
            _ => 0,
        }
    }

    /// The `index`-th branch (1-based) of a resolved type.
    pub fn branch(&self, index: usize) -> Option<&TypeExpr> {
        let mut cur = self;
        let mut i = 1;
        while let TypeExpr::Arrow(a, b) = cur {
            if i == index {
                return Some(a);
            }
            i += 1;
            cur = b;
        }
        None
    }

    fn tag(&self) -> u8 {
        match self {
            TypeExpr::Var(_) => 0,
            TypeExpr::Bound(_) => 1,
            TypeExpr::Arrow(..) => 2,
            TypeExpr::Forall(..) => 3,
        }
    }
}

impl PartialEq for TypeExpr {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (TypeExpr::Var(a), TypeExpr::Var(b)) => a == b,
            (TypeExpr::Bound(a), TypeExpr::Bound(b)) => a == b,
            (TypeExpr::Arrow(a1, b1), TypeExpr::Arrow(a2, b2)) => a1 == a2 && b1 == b2,
            (TypeExpr::Forall(_, b1), TypeExpr::Forall(_, b2)) => b1 == b2,
            _ => false,
        }
    }
}

impl Eq for TypeExpr {}

impl Hash for TypeExpr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.tag().hash(state);
        match self {
            TypeExpr::Var(n) => n.hash(state),
            TypeExpr::Bound(i) => i.hash(state),
            TypeExpr::Arrow(a, b) => {
                a.hash(state);
                b.hash(state);
            }
            TypeExpr::Forall(_, body) => body.hash(state),
        }
    }
}

impl Ord for TypeExpr {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (TypeExpr::Var(a), TypeExpr::Var(b)) => a.cmp(b),
            (TypeExpr::Bound(a), TypeExpr::Bound(b)) => a.cmp(b),
            (TypeExpr::Arrow(a1, b1), TypeExpr::Arrow(a2, b2)) => a1.cmp(a2).then_with(|| b1.cmp(b2)),
            (TypeExpr::Forall(_, b1), TypeExpr::Forall(_, b2)) => b1.cmp(b2),
            _ => self.tag().cmp(&other.tag()),
        }
    }
}

impl PartialOrd for TypeExpr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Pick a display name for a binder: the hint, primed until unused.
pub(crate) fn fresh_name(hint: &str, used: &HashSet<String>) -> String {
    let mut name = hint.to_string();
    while used.contains(&name) {
        name.push('\'');
    }
    name
}

/// Printing state: binder names in scope plus every name already handed out,
/// so binders come out pairwise distinct and distinct from free variables.
pub(crate) struct Namer {
    scope: Vec<String>,
    used: HashSet<String>,
}

impl Namer {
    pub(crate) fn new(used: HashSet<String>) -> Self {
        Namer { scope: Vec::new(), used }
    }

    pub(crate) fn write(&mut self, t: &TypeExpr, in_domain: bool, out: &mut String) {
        match t {
            TypeExpr::Var(n) => out.push_str(n),
            TypeExpr::Bound(i) => match self.scope.len().checked_sub(i + 1) {
                Some(k) => out.push_str(&self.scope[k]),
                None => out.push_str(&format!("#{i}")),
            },
            TypeExpr::Arrow(a, b) => {
                if in_domain {
                    out.push('(');
                }
                self.write(a, true, out);
                out.push_str(" -> ");
                self.write(b, false, out);
                if in_domain {
                    out.push(')');
                }
            }
            TypeExpr::Forall(h, body) => {
                if in_domain {
                    out.push('(');
                }
                let name = fresh_name(h, &self.used);
                self.used.insert(name.clone());
                out.push_str("forall ");
                out.push_str(&name);
                out.push_str(". ");
                self.scope.push(name);
                self.write(body, false, out);
                self.scope.pop();
                if in_domain {
                    out.push(')');
                }
            }
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let used = self.free_vars().iter().map(|n| n.to_string()).collect();
        let mut out = String::new();
        Namer::new(used).write(self, false, &mut out);
        f.write_str(&out)
    }
}

// ---------------------------------------------------------------------------
// Lexing and parsing, shared with the term grammar.

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Forall,
    Arrow,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lambda,
    BigLambda,
    Colon,
}

pub(crate) fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let simple = match c {
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ':' => Some(Tok::Colon),
            '∀' => Some(Tok::Forall),
            '→' => Some(Tok::Arrow),
            'λ' => Some(Tok::Lambda),
            'Λ' => Some(Tok::BigLambda),
            _ => None,
        };
        if let Some(tok) = simple {
            chars.next();
            out.push((pos, tok));
            continue;
        }
        match c {
            '-' => {
                chars.next();
                match chars.next() {
                    Some((_, '>')) => out.push((pos, Tok::Arrow)),
                    _ => return Err(Error::syntax(pos, "expected `->`")),
                }
            }
            '/' => {
                chars.next();
                match chars.next() {
                    Some((_, '\\')) => out.push((pos, Tok::BigLambda)),
                    _ => return Err(Error::syntax(pos, "expected `/\\`")),
                }
            }
            '\\' => {
                chars.next();
                out.push((pos, Tok::Lambda));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' || c == '\'' {
                        ident.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if ident == "forall" {
                    out.push((pos, Tok::Forall));
                } else {
                    out.push((pos, Tok::Ident(ident)));
                }
            }
            _ => return Err(Error::syntax(pos, format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

pub(crate) struct TypeParser<'a> {
    pub(crate) tokens: &'a [(usize, Tok)],
    pub(crate) pos: usize,
    pub(crate) end: usize,
}

impl TypeParser<'_> {
    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    pub(crate) fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    pub(crate) fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::syntax(self.offset(), format!("expected {what}")))
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(Error::syntax(self.offset(), "expected an identifier")),
        }
    }

    pub(crate) fn parse_type(&mut self) -> Result<TypeExpr> {
        if self.peek() == Some(&Tok::Forall) {
            self.pos += 1;
            let mut binders = vec![self.ident()?];
            while let Some(Tok::Ident(_)) = self.peek() {
                binders.push(self.ident()?);
            }
            self.expect(Tok::Dot, "`.` after quantified variables")?;
            let body = self.parse_type()?;
            return Ok(binders.iter().rev().fold(body, |acc, b| TypeExpr::forall(b, acc)));
        }
        let domain = self.parse_atom()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let codomain = self.parse_type()?;
            Ok(TypeExpr::arrow(domain, codomain))
        } else {
            Ok(domain)
        }
    }

    fn parse_atom(&mut self) -> Result<TypeExpr> {
        match self.peek() {
            Some(Tok::Ident(_)) => Ok(TypeExpr::var(&self.ident()?)),
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.parse_type()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(Error::syntax(self.offset(), "expected a type")),
        }
    }
}

impl std::str::FromStr for TypeExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TypeExpr::parse(s)
    }
}
