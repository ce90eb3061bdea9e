//! Players, copycat expansion and materialization.
//!
//! An [`Engine`] answers O-moves one at a time. Its cursor is the state of the
//! player after some play and can be cloned to explore alternatives, which is
//! how interaction gives each player its own view of a shared history.
//!
//! [`ExpandedPlayer`] runs a black-box strategy in the concrete P-backtracking
//! game, where O may import arbitrary types. O's imports at black-box
//! positions are recorded in an environment; imports that go on to resolve the
//! expanded head of a target are copied onto P's matching response, and the
//! two occurrences of the expanded head are then linked so that O's moves in
//! one are answered by copying them into the other.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;
use std::sync::Arc;

use crate::dialogue::{black_box_name, legal_moves, Dialogue, Mode, Move};
use crate::error::{Error, Result};
use crate::format;
use crate::strategy::Strategy;
use crate::transition::{Label, State, TransitionSystem};
use crate::types::{Name, TypeExpr};
use crate::universe::ImportUniverse;

/// The part of a label the interaction engine needs to see.
pub trait GameLabel: Clone + Debug + PartialEq {
    fn branch(&self) -> usize;
    fn with_branch(&self, branch: usize) -> Self;
    /// Opening label of an argument thread: the first `delta` imports of the
    /// outer opening followed by the imports of the calling move.
    fn argument_opening(outer: &Self, call: &Self, delta: usize) -> Self;
    /// For transcripts.
    fn to_label(&self) -> Label;
}

impl GameLabel for Label {
    fn branch(&self) -> usize {
        self.branch
    }

    fn with_branch(&self, branch: usize) -> Self {
        Label::new(branch, self.imports.clone())
    }

    fn argument_opening(outer: &Self, call: &Self, delta: usize) -> Self {
        let mut imports = outer.imports[..delta.min(outer.imports.len())].to_vec();
        imports.extend(call.imports.iter().cloned());
        Label::new(1, imports)
    }

    fn to_label(&self) -> Label {
        self.clone()
    }
}

/// Untyped labels: a bare branch choice.
impl GameLabel for usize {
    fn branch(&self) -> usize {
        *self
    }

    fn with_branch(&self, branch: usize) -> Self {
        branch
    }

    fn argument_opening(_: &Self, _: &Self, _: usize) -> Self {
        1
    }

    fn to_label(&self) -> Label {
        Label::plain(*self)
    }
}

pub trait Engine {
    type Label: GameLabel;
    type Cursor: Clone;

    fn start(&self) -> Self::Cursor;

    /// Play O's move (pointing into the cursor's play) and return P's
    /// response as a back-reference and label.
    fn answer(
        &self,
        cur: &mut Self::Cursor,
        back_ref: usize,
        label: &Self::Label,
    ) -> Result<(usize, Self::Label)>;
}

/// Replace the import at `slot` of the opening: the player's own root is
/// `forall D. G -> forall X. B` and it is played at `forall D. G -> B[W/X]`.
#[derive(Clone, Debug)]
pub struct Splice {
    pub delta: Vec<Name>,
    pub ty: TypeExpr,
}

/// A black-box strategy lifted to the concrete P-backtracking game.
#[derive(Clone, Debug)]
pub struct ExpandedPlayer {
    strategy: Arc<Strategy>,
    ts: TransitionSystem,
    avoid: BTreeSet<Name>,
    splice: Option<Splice>,
}

#[derive(Clone, Debug)]
struct Entry {
    inner: Option<usize>,
    /// For P-moves: the O-move whose expanded head this move's head copies,
    /// with the black-box branch counts of both targets.
    link: Option<(usize, usize, usize)>,
}

#[derive(Clone, Debug, Default)]
pub struct ExpandedCursor {
    moves: Vec<Entry>,
    inner: Dialogue,
    inner_states: Vec<State>,
    inner_to_outer: Vec<usize>,
    boxes: usize,
    env: BTreeMap<Name, TypeExpr>,
}

impl ExpandedCursor {
    /// The black-box play the underlying strategy has seen.
    pub fn inner_play(&self) -> &Dialogue {
        &self.inner
    }

    pub fn environment(&self) -> &BTreeMap<Name, TypeExpr> {
        &self.env
    }
}

impl ExpandedPlayer {
    pub fn new(strategy: Arc<Strategy>, root: TypeExpr) -> Self {
        let avoid = root.free_vars();
        ExpandedPlayer { strategy, ts: TransitionSystem::build(root), avoid, splice: None }
    }

    /// Play at an instance of the root: see [`Splice`].
    pub fn spliced(mut self, splice: Splice) -> Self {
        self.splice = Some(splice);
        self
    }

    fn splice_opening(&self, label: &Label) -> Label {
        let Some(sp) = &self.splice else {
            return label.clone();
        };
        let slot = sp.delta.len();
        let map: BTreeMap<Name, TypeExpr> =
            sp.delta.iter().cloned().zip(label.imports.iter().cloned()).collect();
        let mut imports = label.imports[..slot.min(label.imports.len())].to_vec();
        imports.push(sp.ty.subst_many(&map));
        imports.extend(label.imports.iter().skip(slot).cloned());
        Label::new(label.branch, imports)
    }

    fn state_after(cur: &ExpandedCursor, inner_pos: usize) -> State {
        if inner_pos == 0 {
            State::Initial
        } else {
            cur.inner_states[inner_pos - 1].clone()
        }
    }
}

impl Engine for ExpandedPlayer {
    type Label = Label;
    type Cursor = ExpandedCursor;

    fn start(&self) -> ExpandedCursor {
        ExpandedCursor::default()
    }

    fn answer(&self, cur: &mut ExpandedCursor, back_ref: usize, label: &Label) -> Result<(usize, Label)> {
        let pos = cur.moves.len() + 1;
        if back_ref != cur.moves.len() {
            return Err(Error::MalformedDialogue(format!(
                "O-move {pos} must point to move {}, not {back_ref}",
                cur.moves.len()
            )));
        }
        let label = if pos == 1 { self.splice_opening(label) } else { label.clone() };

        if back_ref > 0 {
            if let Some((x, n_y, n_x)) = cur.moves[back_ref - 1].link {
                if label.branch > n_y {
                    cur.moves.push(Entry { inner: None, link: None });
                    cur.moves.push(Entry { inner: None, link: Some((pos, 0, 0)) });
                    return Ok((x, label.with_branch(label.branch - n_y + n_x)));
                }
            }
        }

        let inner_j = match back_ref {
            0 => 0,
            j => cur.moves[j - 1].inner.ok_or_else(|| {
                Error::MalformedDialogue(format!("move {j} has no black-box counterpart"))
            })?,
        };
        let from = Self::state_after(cur, inner_j);
        let branch_ty = self.ts.branch_type(&from, label.branch).ok_or_else(|| {
            Error::UndefinedTransition(format!("{from} has no branch {}", label.branch))
        })?;
        let a = branch_ty.available_count();
        if label.imports.len() < a {
            return Err(Error::UndefinedTransition(format!(
                "branch {} of {from} needs at least {a} imports",
                label.branch
            )));
        }
        let mut boxes = Vec::with_capacity(a);
        for (j, v) in label.imports[..a].iter().enumerate() {
            let name = black_box_name(cur.boxes + j, &self.avoid);
            cur.env.insert(name.clone(), v.clone());
            boxes.push(TypeExpr::Var(name));
        }
        cur.boxes += a;
        let extras = label.imports[a..].to_vec();

        let o_inner = Move::new(inner_j, Label::new(label.branch, boxes));
        let o_state = self
            .ts
            .step(&from, &o_inner.label)
            .ok_or_else(|| Error::UndefinedTransition(format!("{from} --{}-->", o_inner.label)))?;
        cur.inner.moves.push(o_inner);
        cur.inner_states.push(o_state.clone());
        cur.inner_to_outer.push(pos);

        let r = self.strategy.response(&cur.inner).cloned().ok_or_else(|| Error::Strategy {
            property: "live".into(),
            witness: format::write_dialogue(&cur.inner, None),
        })?;
        let r_from = Self::state_after(cur, r.back_ref);
        let r_state = self
            .ts
            .step(&r_from, &r.label)
            .ok_or_else(|| Error::UndefinedTransition(format!("{r_from} --{}-->", r.label)))?;
        let target = cur.inner_to_outer[r.back_ref - 1];
        let n_r = self.ts.branch_count(&r_state);
        let n_o = self.ts.branch_count(&o_state);
        let mut imports: Vec<TypeExpr> = r.label.imports.iter().map(|t| t.subst_many(&cur.env)).collect();
        imports.extend(extras);
        cur.inner.moves.push(r.clone());
        cur.inner_states.push(r_state);
        cur.inner_to_outer.push(pos + 1);
        let inner_len = cur.inner.len();
        cur.moves.push(Entry { inner: Some(inner_len - 1), link: None });
        cur.moves.push(Entry { inner: Some(inner_len), link: Some((pos, n_r, n_o)) });
        Ok((target, Label::new(r.label.branch, imports)))
    }
}

/// Explore every black-box O-move against `engine` and collect the plays.
pub fn materialize<E: Engine<Label = Label>>(
    engine: &E,
    ts: &TransitionSystem,
    budget: usize,
) -> Result<Strategy> {
    let mut out = Strategy::empty();
    let mut steps = 0usize;
    let mut stack = vec![(Dialogue::default(), engine.start())];
    let universe = ImportUniverse::default();
    while let Some((play, cursor)) = stack.pop() {
        for o in legal_moves(ts, &play, Mode::BlackBox, &universe) {
            steps += 1;
            if steps > budget {
                return Err(Error::BudgetExceeded {
                    budget,
                    transcript: format::write_dialogue(&play.extended(o), None),
                });
            }
            let mut next = cursor.clone();
            let (back_ref, label) = engine.answer(&mut next, o.back_ref, &o.label)?;
            let extended = play.extended(o).extended(Move::new(back_ref, label));
            out.insert_with_prefixes(&extended);
            stack.push((extended, next));
        }
    }
    Ok(out)
}

/// Lift a black-box strategy by substituting types for some of O's black
/// boxes, exploring concrete plays up to `depth` moves.
pub fn copycat_expand(
    ts: &TransitionSystem,
    sigma: &Strategy,
    assignment: &BTreeMap<Name, TypeExpr>,
    depth: usize,
) -> Result<Strategy> {
    if assignment.is_empty() {
        return Ok(sigma.clone());
    }
    let known: BTreeSet<Name> = sigma.plays().iter().flat_map(|p| p.black_boxes()).collect();
    if let Some(bad) = assignment.keys().find(|k| !known.contains(*k)) {
        return Err(Error::UnknownBlackBox(bad.to_string()));
    }
    let mut avoid = ts.root().free_vars();
    for t in assignment.values() {
        avoid.extend(t.free_vars());
    }
    let engine = ExpandedPlayer::new(Arc::new(sigma.clone()), ts.root().clone());
    let mut out = Strategy::empty();
    let mut stack = vec![(Dialogue::default(), engine.start(), 0usize)];
    while let Some((play, cursor, used)) = stack.pop() {
        if play.len() + 2 > depth {
            continue;
        }
        let states = play.states(ts)?;
        let from = states.last().cloned().unwrap_or(State::Initial);
        for branch in 1..=ts.branch_count(&from) {
            let mut t = ts.branch_type(&from, branch).expect("branch in range");
            let mut imports = Vec::new();
            let mut k = used;
            while !t.is_resolved() {
                let fresh = black_box_name(k, &avoid);
                let v = assignment.get(&fresh).cloned().unwrap_or(TypeExpr::Var(fresh));
                t = t.import_lazy(&v)?;
                imports.push(v);
                k += 1;
            }
            let o = Move::new(play.len(), Label::new(branch, imports));
            let mut next = cursor.clone();
            let (back_ref, label) = engine.answer(&mut next, o.back_ref, &o.label)?;
            let extended = play.extended(o).extended(Move::new(back_ref, label));
            out.insert_with_prefixes(&extended);
            stack.push((extended, next, k));
        }
    }
    Ok(out)
}
