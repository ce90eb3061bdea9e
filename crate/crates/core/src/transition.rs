//! The transition system of a type.
//!
//! States are `Initial` or a resolved type. A label picks a branch of the
//! current state and imports types into it until it is resolved; the opening
//! label from `Initial` picks branch 1 (the root itself) and resolves it.
//! The label set is infinite for quantified types, so the system is a lazy
//! step function rather than a materialized graph.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::types::{Name, TypeExpr};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub branch: usize,
    pub imports: Vec<TypeExpr>,
}

impl Label {
    pub fn new(branch: usize, imports: Vec<TypeExpr>) -> Self {
        Label { branch, imports }
    }

    pub fn plain(branch: usize) -> Self {
        Label { branch, imports: Vec::new() }
    }

    /// Drop the type information, keeping the branch choice.
    pub fn erase_imports(&self) -> usize {
        self.branch
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.branch)?;
        if !self.imports.is_empty() {
            let parts: Vec<String> = self.imports.iter().map(|t| t.to_string()).collect();
            write!(f, "⟨{}⟩", parts.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum State {
    Initial,
    Resolved(TypeExpr),
}

impl State {
    pub fn as_type(&self) -> Option<&TypeExpr> {
        match self {
            State::Initial => None,
            State::Resolved(t) => Some(t),
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Initial => f.write_str("⋆"),
            State::Resolved(t) => write!(f, "{t}"),
        }
    }
}

/// How imports are performed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Style {
    /// Lazy importation into the leftmost available quantifier.
    #[default]
    Lazy,
    /// Prenex importation; every state is kept in prenex form.
    Prenex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem {
    root: TypeExpr,
    style: Style,
}

/// A bounded reachable fragment: states in discovery order and edges
/// `(source index, label, target index)`.
#[derive(Clone, Debug, Default)]
pub struct Fragment {
    pub states: Vec<State>,
    pub edges: Vec<(usize, Label, usize)>,
}

impl TransitionSystem {
    pub fn build(root: TypeExpr) -> Self {
        TransitionSystem { root, style: Style::Lazy }
    }

    pub fn with_style(root: TypeExpr, style: Style) -> Self {
        let root = match style {
            Style::Lazy => root,
            Style::Prenex => root.prenex(),
        };
        TransitionSystem { root, style }
    }

    pub fn root(&self) -> &TypeExpr {
        &self.root
    }

    pub fn style(&self) -> Style {
        self.style
    }

    fn import_all(&self, t: &TypeExpr, imports: &[TypeExpr]) -> Option<TypeExpr> {
        let out = match self.style {
            Style::Lazy => t.import_seq(imports).ok()?,
            Style::Prenex => t.prenex().import_prenex_seq(imports).ok()?,
        };
        out.is_resolved().then_some(out)
    }

    /// The type a label selects before importation, if the branch exists.
    pub fn branch_type(&self, s: &State, branch: usize) -> Option<TypeExpr> {
        match s {
            State::Initial => (branch == 1).then(|| self.root.clone()),
            State::Resolved(t) => t.branch(branch).cloned(),
        }
    }

    pub fn branch_count(&self, s: &State) -> usize {
        match s {
            State::Initial => 1,
            State::Resolved(t) => t.branch_count(),
        }
    }

    pub fn step(&self, s: &State, l: &Label) -> Option<State> {
        let t = self.branch_type(s, l.branch)?;
        self.import_all(&t, &l.imports).map(State::Resolved)
    }

    pub fn is_trace(&self, labels: &[Label]) -> bool {
        self.run(&State::Initial, labels).is_some()
    }

    /// Follow `labels` from `s`.
    pub fn run(&self, s: &State, labels: &[Label]) -> Option<State> {
        labels.iter().try_fold(s.clone(), |acc, l| self.step(&acc, l))
    }

    /// Head variable of the target of `l` from `s`.
    pub fn colour(&self, s: &State, l: &Label) -> Result<Name> {
        match self.step(s, l) {
            Some(State::Resolved(t)) => t
                .head()
                .ok_or_else(|| Error::UndefinedTransition(format!("{s} --{l}-->"))),
            _ => Err(Error::UndefinedTransition(format!("{s} --{l}-->"))),
        }
    }

    /// All defined labels from `s` whose imports come from `universe`,
    /// at most `max_imports` of them, ordered by branch then import indices.
    pub fn enumerate_labels(&self, s: &State, universe: &[TypeExpr], max_imports: usize) -> Vec<Label> {
        let mut out = Vec::new();
        for branch in 1..=self.branch_count(s) {
            let t = self.branch_type(s, branch).expect("branch in range");
            let t = match self.style {
                Style::Lazy => t,
                Style::Prenex => t.prenex(),
            };
            let mut imports = Vec::new();
            self.extend_imports(&t, branch, universe, max_imports, &mut imports, &mut out);
        }
        out
    }

    fn extend_imports(
        &self,
        t: &TypeExpr,
        branch: usize,
        universe: &[TypeExpr],
        budget: usize,
        imports: &mut Vec<TypeExpr>,
        out: &mut Vec<Label>,
    ) {
        if t.is_resolved() {
            out.push(Label::new(branch, imports.clone()));
            return;
        }
        if budget == 0 {
            return;
        }
        for v in universe {
            let next = match self.style {
                Style::Lazy => t.import_lazy(v),
                Style::Prenex => t.import_prenex(v),
            };
            if let Ok(next) = next {
                imports.push(v.clone());
                self.extend_imports(&next, branch, universe, budget - 1, imports, out);
                imports.pop();
            }
        }
    }

    /// Breadth-first exploration up to `depth` transitions from `Initial`.
    pub fn reachable(&self, depth: usize, universe: &[TypeExpr], max_imports: usize) -> Fragment {
        let mut frag = Fragment::default();
        let mut index: BTreeMap<State, usize> = BTreeMap::new();
        frag.states.push(State::Initial);
        index.insert(State::Initial, 0);
        let mut queue = VecDeque::from([(0usize, 0usize)]);
        while let Some((src, d)) = queue.pop_front() {
            if d == depth {
                continue;
            }
            let s = frag.states[src].clone();
            for l in self.enumerate_labels(&s, universe, max_imports) {
                let target = self.step(&s, &l).expect("enumerated label steps");
                let dst = match index.get(&target) {
                    Some(&i) => i,
                    None => {
                        let i = frag.states.len();
                        frag.states.push(target.clone());
                        index.insert(target, i);
                        queue.push_back((i, d + 1));
                        i
                    }
                };
                frag.edges.push((src, l, dst));
            }
        }
        frag
    }
}

impl Fragment {
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph transitions {\n");
        for (i, s) in self.states.iter().enumerate() {
            let shape = if i == 0 { ", shape=point" } else { "" };
            out.push_str(&format!("  s{i} [label=\"{}\"{shape}];\n", escape(&s.to_string())));
        }
        for (a, l, b) in &self.edges {
            out.push_str(&format!("  s{a} -> s{b} [label=\"{}\"];\n", escape(&l.to_string())));
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
