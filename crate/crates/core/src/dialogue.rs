//! Dialogues over a transition system.
//!
//! A dialogue is a sequence of moves, each carrying a back-reference to an
//! earlier position (1-based; 0 marks a starting move) at odd distance. Odd
//! positions belong to O, even positions to P. Moves carry no state: the state
//! after a move is recomputed from the state after its justifier.
//!
//! Three games are supported: the full backtracking game, the P-backtracking
//! game in which O always extends the previous move, and the black-box game in
//! which O imports only fresh variables and P imports types over them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::transition::{Label, State, TransitionSystem};
use crate::types::{Name, TypeExpr};
use crate::universe::ImportUniverse;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Move {
    pub back_ref: usize,
    pub label: Label,
}

impl Move {
    pub fn new(back_ref: usize, label: Label) -> Self {
        Move { back_ref, label }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dialogue {
    pub moves: Vec<Move>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Both players may backtrack.
    Full,
    /// Only P backtracks.
    PBacktracking,
    /// P-backtracking with black-box importation.
    BlackBox,
}

/// Whether the player at 1-based position `i` is O.
pub fn is_o_position(i: usize) -> bool {
    i % 2 == 1
}

/// The canonical name of the `j`-th black box, avoiding `avoid`.
pub fn black_box_name(j: usize, avoid: &BTreeSet<Name>) -> Name {
    let mut name = format!("B{j}");
    while avoid.contains(name.as_str()) {
        name.push('\'');
    }
    Arc::from(name)
}

impl Dialogue {
    pub fn new(moves: Vec<Move>) -> Self {
        Dialogue { moves }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// The move at 1-based position `i`.
    pub fn at(&self, i: usize) -> &Move {
        &self.moves[i - 1]
    }

    pub fn prefix(&self, n: usize) -> Dialogue {
        Dialogue { moves: self.moves[..n].to_vec() }
    }

    pub fn extended(&self, m: Move) -> Dialogue {
        let mut moves = self.moves.clone();
        moves.push(m);
        Dialogue { moves }
    }

    /// Check the odd-distance constraint on every back-reference.
    pub fn check_pointers(&self) -> Result<()> {
        for (k, m) in self.moves.iter().enumerate() {
            let i = k + 1;
            if m.back_ref >= i || (i - m.back_ref) % 2 == 0 {
                return Err(Error::MalformedDialogue(format!(
                    "move {i} points to {} (distance must be odd and positive)",
                    m.back_ref
                )));
            }
        }
        Ok(())
    }

    /// Positions of the thread ending at `i`, starting move first.
    pub fn thread_positions(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = i;
        while cur > 0 {
            out.push(cur);
            cur = self.at(cur).back_ref;
        }
        out.reverse();
        out
    }

    pub fn thread_at(&self, i: usize) -> Vec<Label> {
        self.thread_positions(i).into_iter().map(|p| self.at(p).label.clone()).collect()
    }

    /// All maximal threads, in order of their last move.
    pub fn threads(&self) -> Result<Vec<Vec<Label>>> {
        self.check_pointers()?;
        let pointed: BTreeSet<usize> = self.moves.iter().map(|m| m.back_ref).collect();
        Ok((1..=self.len())
            .filter(|i| !pointed.contains(i))
            .map(|i| self.thread_at(i))
            .collect())
    }

    pub fn is_p_backtracking(&self) -> bool {
        self.moves
            .iter()
            .enumerate()
            .all(|(k, m)| !is_o_position(k + 1) || m.back_ref == k)
    }

    /// States after each move, or the first position whose step is undefined.
    pub fn states(&self, ts: &TransitionSystem) -> Result<Vec<State>> {
        self.check_pointers()?;
        let mut out: Vec<State> = Vec::with_capacity(self.len());
        for (k, m) in self.moves.iter().enumerate() {
            let from = self.state_before(&out, m.back_ref);
            match ts.step(&from, &m.label) {
                Some(s) => out.push(s),
                None => {
                    return Err(Error::UndefinedTransition(format!(
                        "move {}: {from} --{}-->",
                        k + 1,
                        m.label
                    )))
                }
            }
        }
        Ok(out)
    }

    fn state_before(&self, states: &[State], back_ref: usize) -> State {
        if back_ref == 0 {
            State::Initial
        } else {
            states[back_ref - 1].clone()
        }
    }

    /// Every thread is a trace of `ts`.
    pub fn respects(&self, ts: &TransitionSystem) -> bool {
        self.states(ts).is_ok()
    }

    /// Colour (head variable of the target) of each move.
    pub fn colours(&self, ts: &TransitionSystem) -> Result<Vec<Name>> {
        self.states(ts)?
            .iter()
            .map(|s| match s {
                State::Resolved(t) => t.head().ok_or_else(|| Error::Unresolved(t.to_string())),
                State::Initial => Err(Error::Unresolved("⋆".into())),
            })
            .collect()
    }

    /// Every P-move has the colour of the O-move before it.
    pub fn copycat_ok(&self, ts: &TransitionSystem) -> Result<bool> {
        if !self.is_p_backtracking() {
            return Err(Error::Precondition("dialogue is not P-backtracking".into()));
        }
        let colours = self
            .colours(ts)
            .map_err(|e| Error::Precondition(format!("dialogue does not respect the game: {e}")))?;
        Ok((2..=self.len()).step_by(2).all(|i| colours[i - 1] == colours[i - 2]))
    }

    /// Black boxes imported by O, in play order.
    pub fn black_boxes(&self) -> Vec<Name> {
        let mut out = Vec::new();
        for (k, m) in self.moves.iter().enumerate() {
            if is_o_position(k + 1) {
                for t in &m.label.imports {
                    if let TypeExpr::Var(n) = t {
                        out.push(n.clone());
                    }
                }
            }
        }
        out
    }

    /// O imports only fresh, pairwise-distinct variables; P imports only
    /// types over black boxes already imported (and free variables of the root).
    pub fn blackbox_ok(&self, ts: &TransitionSystem) -> Result<bool> {
        if !self.is_p_backtracking() || !self.respects(ts) {
            return Err(Error::Precondition("dialogue is not in the P-backtracking game".into()));
        }
        let root_free = ts.root().free_vars();
        let mut boxes: BTreeSet<Name> = BTreeSet::new();
        for (k, m) in self.moves.iter().enumerate() {
            if is_o_position(k + 1) {
                for t in &m.label.imports {
                    match t {
                        TypeExpr::Var(n) if !boxes.contains(n) && !root_free.contains(n) => {
                            boxes.insert(n.clone());
                        }
                        _ => return Ok(false),
                    }
                }
            } else {
                for t in &m.label.imports {
                    if !t.free_vars().iter().all(|n| boxes.contains(n) || root_free.contains(n)) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    pub fn valid_in(&self, ts: &TransitionSystem, mode: Mode) -> bool {
        match mode {
            Mode::Full => self.respects(ts),
            Mode::PBacktracking => self.is_p_backtracking() && self.respects(ts),
            Mode::BlackBox => {
                self.is_p_backtracking() && self.respects(ts) && self.blackbox_ok(ts) == Ok(true)
            }
        }
    }

    /// Rename O's black boxes to their canonical names in play order.
    pub fn canonicalize_black_boxes(&self, ts: &TransitionSystem) -> Dialogue {
        let avoid = ts.root().free_vars();
        let map: BTreeMap<Name, TypeExpr> = self
            .black_boxes()
            .into_iter()
            .enumerate()
            .map(|(j, n)| (n, TypeExpr::Var(black_box_name(j, &avoid))))
            .collect();
        Dialogue {
            moves: self
                .moves
                .iter()
                .map(|m| Move {
                    back_ref: m.back_ref,
                    label: Label::new(
                        m.label.branch,
                        m.label.imports.iter().map(|t| t.subst_many(&map)).collect(),
                    ),
                })
                .collect(),
        }
    }

    /// Drop every import, keeping back-references and branch choices.
    pub fn erase(&self) -> Vec<(usize, usize)> {
        self.moves.iter().map(|m| (m.back_ref, m.label.branch)).collect()
    }
}

/// All one-move extensions of `d` that are valid in `mode`.
pub fn legal_moves(
    ts: &TransitionSystem,
    d: &Dialogue,
    mode: Mode,
    universe: &ImportUniverse,
) -> Vec<Move> {
    let Ok(states) = d.states(ts) else {
        return Vec::new();
    };
    let i = d.len() + 1;
    let state_after = |j: usize| if j == 0 { State::Initial } else { states[j - 1].clone() };
    let root_free: Vec<Name> = ts.root().free_vars().into_iter().collect();
    let mut out = Vec::new();
    let o_turn = is_o_position(i);
    let pointers: Vec<usize> = match (mode, o_turn) {
        (Mode::Full, _) => (0..i).filter(|j| (i - j) % 2 == 1).collect(),
        (_, true) => vec![i - 1],
        (_, false) => (1..i).step_by(2).collect(),
    };
    if mode == Mode::BlackBox && o_turn {
        let avoid = ts.root().free_vars();
        let used = d.black_boxes().len();
        let from = state_after(i - 1);
        for branch in 1..=ts.branch_count(&from) {
            let t = ts.branch_type(&from, branch).expect("branch in range");
            let k = t.available_count();
            let imports =
                (0..k).map(|j| TypeExpr::Var(black_box_name(used + j, &avoid))).collect();
            let label = Label::new(branch, imports);
            if ts.step(&from, &label).is_some() {
                out.push(Move::new(i - 1, label));
            }
        }
        return out;
    }
    let scope: Vec<Name> = if mode == Mode::BlackBox {
        root_free.iter().cloned().chain(d.black_boxes()).collect()
    } else {
        root_free
    };
    let mut candidates = universe.candidates(&scope);
    if mode == Mode::BlackBox {
        candidates.retain(|t| t.free_vars().iter().all(|v| scope.contains(v)));
    }
    for j in pointers {
        for label in ts.enumerate_labels(&state_after(j), &candidates, universe.max_imports) {
            out.push(Move::new(j, label));
        }
    }
    out
}

/// Label sequences of length at most `max_len` driving `ts` from `from`,
/// with imports from `universe`; includes the empty trace.
pub fn traces(
    ts: &TransitionSystem,
    from: &State,
    max_len: usize,
    universe: &[TypeExpr],
    max_imports: usize,
) -> Vec<Vec<Label>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![(from.clone(), Vec::new())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (s, trace) in frontier {
            for l in ts.enumerate_labels(&s, universe, max_imports) {
                let target = ts.step(&s, &l).expect("enumerated label steps");
                let mut t: Vec<Label> = trace.clone();
                t.push(l);
                out.push(t.clone());
                next.push((target, t));
            }
        }
        frontier = next;
    }
    out
}

/// Traces taken after the opening move, i.e. from the root state.
pub fn root_traces(
    ts: &TransitionSystem,
    max_len: usize,
    universe: &[TypeExpr],
    max_imports: usize,
) -> Vec<Vec<Label>> {
    match ts.step(&State::Initial, &Label::plain(1)) {
        Some(root) => traces(ts, &root, max_len, universe, max_imports),
        None => vec![Vec::new()],
    }
}

/// Render a trace compactly as its branch choices, e.g. `121`; `ε` if empty.
pub fn trace_word(trace: &[Label]) -> String {
    if trace.is_empty() {
        "ε".to_string()
    } else {
        trace.iter().map(|l| l.to_string()).collect()
    }
}

impl fmt::Display for Dialogue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::write_dialogue(self, None))
    }
}
