//! Composition by interaction.
//!
//! `sigma` plays on `forall D. G -> A -> B` and `tau` on `forall D. G -> A`.
//! The composite plays on `forall D. G -> B`. Both players share one history
//! of moves; the outside world only sees the moves that touch it. Each call
//! `sigma` makes to its `A` argument opens a fresh thread of `tau`.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::dialogue::{Dialogue, Move};
use crate::error::{Error, Result};
use crate::expansion::{Engine, GameLabel};
use crate::format;
use crate::strategy::Strategy;

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    Opponent,
    Sigma,
    Tau,
}

impl Party {
    pub fn tag(self) -> &'static str {
        match self {
            Party::Opponent => "O",
            Party::Sigma => "sigma",
            Party::Tau => "tau",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SharedMove<L> {
    pub by: Party,
    /// Shared index of the justifier.
    pub justifier: Option<usize>,
    pub label: L,
    /// Position in the external play, if visible there.
    pub external: Option<usize>,
}

pub struct Compose<E: Engine> {
    sigma: E,
    tau: E,
    k: usize,
    delta: usize,
    budget: usize,
}

type Snapshot<C> = Arc<(C, Vec<usize>)>;

#[derive(Clone)]
pub struct ComposeCursor<C, L> {
    history: Vec<SharedMove<L>>,
    external: Vec<usize>,
    after: Vec<Option<Snapshot<C>>>,
    calls: BTreeSet<usize>,
    opening: Option<usize>,
    steps: usize,
}

impl<C, L: GameLabel> ComposeCursor<C, L> {
    pub fn history(&self) -> &[SharedMove<L>] {
        &self.history
    }

    /// The whole interaction as a dialogue with emitter tags.
    pub fn transcript(&self) -> String {
        let d = Dialogue::new(
            self.history
                .iter()
                .map(|m| Move::new(m.justifier.map_or(0, |j| j + 1), m.label.to_label()))
                .collect(),
        );
        let tags: Vec<&str> = self.history.iter().map(|m| m.by.tag()).collect();
        format::write_dialogue(&d, Some(&tags))
    }
}

struct Delivery<C, L> {
    party: Party,
    base: Option<Snapshot<C>>,
    o_id: usize,
    label: L,
}

impl<E: Engine> Compose<E> {
    /// `k` is the length of the shared context and `delta` the number of
    /// shared type variables.
    pub fn new(sigma: E, tau: E, k: usize, delta: usize) -> Self {
        Compose { sigma, tau, k, delta, budget: DEFAULT_BUDGET }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    fn engine(&self, party: Party) -> &E {
        if party == Party::Tau {
            &self.tau
        } else {
            &self.sigma
        }
    }

    fn emit(cur: &mut ComposeCursor<E::Cursor, E::Label>, p_id: usize, target: usize, label: E::Label) -> (usize, E::Label) {
        cur.external.push(p_id);
        cur.history[p_id].external = Some(cur.external.len());
        (cur.history[target].external.expect("external justifier"), label)
    }

    fn malformed(cur: &ComposeCursor<E::Cursor, E::Label>, msg: &str) -> Error {
        Error::MalformedDialogue(format!("{msg}\n{}", cur.transcript()))
    }
}

impl<E: Engine> Engine for Compose<E> {
    type Label = E::Label;
    type Cursor = ComposeCursor<E::Cursor, E::Label>;

    fn start(&self) -> Self::Cursor {
        ComposeCursor {
            history: Vec::new(),
            external: Vec::new(),
            after: Vec::new(),
            calls: BTreeSet::new(),
            opening: None,
            steps: 0,
        }
    }

    fn answer(&self, cur: &mut Self::Cursor, back_ref: usize, label: &E::Label) -> Result<(usize, E::Label)> {
        let o_id = cur.history.len();
        let (justifier, party, base) = if back_ref == 0 {
            cur.opening = Some(o_id);
            (None, Party::Sigma, None)
        } else {
            let q = *cur.external.get(back_ref - 1).ok_or_else(|| Self::malformed(cur, "dangling pointer"))?;
            let owner = cur.history[q].by;
            if owner == Party::Opponent {
                return Err(Self::malformed(cur, "O points to an O-move"));
            }
            (Some(q), owner, cur.after[q].clone())
        };
        cur.history.push(SharedMove { by: Party::Opponent, justifier, label: label.clone(), external: None });
        cur.after.push(None);
        cur.external.push(o_id);
        cur.history[o_id].external = Some(cur.external.len());
        let mut next = Delivery { party, base, o_id, label: label.clone() };
        loop {
            cur.steps += 1;
            if cur.steps > self.budget {
                return Err(Error::BudgetExceeded { budget: self.budget, transcript: cur.transcript() });
            }
            let Delivery { party, base, o_id, label } = next;
            let engine = self.engine(party);
            let (mut local, mut view) = match base {
                Some(snap) => (snap.0.clone(), snap.1.clone()),
                None => (engine.start(), Vec::new()),
            };
            let local_back = view.len();
            view.push(o_id);
            let (pb, pl) = engine.answer(&mut local, local_back, &label)?;
            let j = *pb
                .checked_sub(1)
                .and_then(|i| view.get(i))
                .ok_or_else(|| Self::malformed(cur, "response points outside its view"))?;
            let p_id = cur.history.len();
            cur.history.push(SharedMove { by: party, justifier: Some(j), label: pl.clone(), external: None });
            view.push(p_id);
            cur.after.push(Some(Arc::new((local, view))));
            let opening = cur.opening.expect("opened");
            let to = |party, j: usize, label| Delivery { party, base: cur.after[j].clone(), o_id: p_id, label };
            next = match (party, cur.history[j].by) {
                (Party::Sigma, _) if j == opening => {
                    let i = pl.branch();
                    if i <= self.k {
                        return Ok(Self::emit(cur, p_id, opening, pl));
                    } else if i == self.k + 1 {
                        cur.calls.insert(p_id);
                        let l = E::Label::argument_opening(&cur.history[opening].label, &pl, self.delta);
                        Delivery { party: Party::Tau, base: None, o_id: p_id, label: l }
                    } else {
                        return Ok(Self::emit(cur, p_id, opening, pl.with_branch(i - 1)));
                    }
                }
                (Party::Tau, _) if cur.calls.contains(&j) => {
                    let i = pl.branch();
                    if i <= self.k {
                        return Ok(Self::emit(cur, p_id, opening, pl));
                    }
                    to(Party::Sigma, j, pl.with_branch(i - self.k))
                }
                (_, Party::Opponent) => return Ok(Self::emit(cur, p_id, j, pl)),
                (Party::Sigma, Party::Tau) => to(Party::Tau, j, pl),
                (Party::Tau, Party::Sigma) => to(Party::Sigma, j, pl),
                _ => return Err(Self::malformed(cur, "a player points to its own move")),
            };
        }
    }
}

/// A strategy with labels erased to branch numbers.
#[derive(Clone, Debug)]
pub struct UntypedPlayer {
    responses: BTreeMap<Vec<(usize, usize)>, (usize, usize)>,
}

impl UntypedPlayer {
    pub fn new(s: &Strategy) -> Self {
        let responses = s
            .plays()
            .iter()
            .filter(|p| p.len() % 2 == 0 && !p.is_empty())
            .map(|p| {
                let e = p.erase();
                (e[..e.len() - 1].to_vec(), e[e.len() - 1])
            })
            .collect();
        UntypedPlayer { responses }
    }
}

impl Engine for UntypedPlayer {
    type Label = usize;
    type Cursor = Vec<(usize, usize)>;

    fn start(&self) -> Self::Cursor {
        Vec::new()
    }

    fn answer(&self, cur: &mut Self::Cursor, back_ref: usize, label: &usize) -> Result<(usize, usize)> {
        cur.push((back_ref, *label));
        let r = *self
            .responses
            .get(cur)
            .ok_or_else(|| Error::Strategy { property: "live".into(), witness: format!("{cur:?}") })?;
        cur.push(r);
        Ok(r)
    }
}

/// Explore every untyped O-move (branches `1..=width` of P's targets as
/// recorded by `arity`) against `engine`, returning the erased plays.
pub fn materialize_untyped<E: Engine<Label = usize>>(
    engine: &E,
    arity: impl Fn(&[(usize, usize)]) -> usize,
    budget: usize,
) -> Result<BTreeSet<Vec<(usize, usize)>>> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(Vec::new(), engine.start())];
    let mut steps = 0;
    while let Some((play, cursor)) = stack.pop() {
        let n = arity(&play);
        for b in 1..=n {
            steps += 1;
            if steps > budget {
                return Err(Error::BudgetExceeded { budget, transcript: format!("{play:?}") });
            }
            let mut next = cursor.clone();
            let o = (play.len(), b);
            let r = engine.answer(&mut next, o.0, &o.1)?;
            let mut ext: Vec<(usize, usize)> = play.clone();
            ext.push(o);
            ext.push(r);
            out.insert(ext.clone());
            stack.push((ext, next));
        }
    }
    Ok(out)
}

/// A shared history with imports erased: `(justifier, branch, emitter)`.
pub fn erased_history<L: GameLabel>(history: &[SharedMove<L>]) -> Vec<(Option<usize>, usize, Party)> {
    history.iter().map(|m| (m.justifier, m.label.branch(), m.by)).collect()
}

/// Replay every play of `composite` through a typed and an untyped
/// interaction and compare the erased transcripts move by move.
pub fn erasure_agrees<E: Engine<Label = crate::transition::Label>>(
    typed: &Compose<E>,
    untyped: &Compose<UntypedPlayer>,
    composite: &Strategy,
) -> Result<bool> {
    for play in composite.maximal_plays() {
        let mut tc = typed.start();
        let mut uc = untyped.start();
        for pair in play.moves.chunks(2) {
            let o = &pair[0];
            let t = typed.answer(&mut tc, o.back_ref, &o.label)?;
            let u = untyped.answer(&mut uc, o.back_ref, &o.label.branch)?;
            if (t.0, t.1.branch) != u || erased_history(tc.history()) != erased_history(uc.history()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
