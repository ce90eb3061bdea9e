//! Strategies as finite prefix-closed sets of plays.
//!
//! Every odd-length play has exactly one extension (P's response). A strategy
//! is live when it contains every legal O-extension of its even-length plays.
//! In the P-backtracking and black-box games O never backtracks, so each play
//! is its own P-view and the play tree is the whole strategy.

use std::collections::BTreeSet;
use std::ops::Bound::{Excluded, Unbounded};

use crate::dialogue::{legal_moves, Dialogue, Mode, Move};
use crate::error::{Error, Result};
use crate::format;
use crate::transition::TransitionSystem;
use crate::universe::ImportUniverse;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Strategy {
    plays: BTreeSet<Dialogue>,
}

impl Default for Strategy {
    fn default() -> Self {
        Strategy::empty()
    }
}

impl Strategy {
    /// The strategy containing only the empty play.
    pub fn empty() -> Self {
        Strategy { plays: BTreeSet::from([Dialogue::default()]) }
    }

    /// The prefix closure of `plays`.
    pub fn from_plays<I: IntoIterator<Item = Dialogue>>(plays: I) -> Self {
        let mut out = Strategy::empty();
        for d in plays {
            out.insert_with_prefixes(&d);
        }
        out
    }

    /// Exactly the given plays, without closing under prefixes.
    pub fn from_raw(plays: BTreeSet<Dialogue>) -> Self {
        Strategy { plays }
    }

    pub(crate) fn insert_with_prefixes(&mut self, d: &Dialogue) {
        for n in (1..=d.len()).rev() {
            if !self.plays.insert(d.prefix(n)) {
                break;
            }
        }
    }

    pub fn plays(&self) -> &BTreeSet<Dialogue> {
        &self.plays
    }

    pub fn contains(&self, d: &Dialogue) -> bool {
        self.plays.contains(d)
    }

    /// One-move extensions of `d` in the strategy.
    pub fn extensions(&self, d: &Dialogue) -> Vec<&Move> {
        let n = d.len();
        self.plays
            .range((Excluded(d.clone()), Unbounded))
            .take_while(|p| p.moves.starts_with(&d.moves))
            .filter(|p| p.len() == n + 1)
            .map(|p| p.moves.last().expect("non-empty"))
            .collect()
    }

    /// P's response after the odd-length play `d`.
    pub fn response(&self, d: &Dialogue) -> Option<&Move> {
        self.extensions(d).into_iter().next()
    }

    pub fn maximal_plays(&self) -> Vec<&Dialogue> {
        self.plays
            .iter()
            .filter(|p| self.extensions(p).is_empty())
            .filter(|p| !p.is_empty() || self.plays.len() == 1)
            .collect()
    }

    /// Longest play length.
    pub fn depth(&self) -> usize {
        self.plays.iter().map(Dialogue::len).max().unwrap_or(0)
    }

    fn violation(property: &str, d: &Dialogue) -> Error {
        Error::Strategy { property: property.to_string(), witness: format::write_dialogue(d, None) }
    }

    /// Check the tree, determinism and membership conditions.
    pub fn validate(&self, ts: &TransitionSystem, mode: Mode) -> Result<()> {
        if !self.plays.contains(&Dialogue::default()) {
            return Err(Self::violation("a tree (missing the empty play)", &Dialogue::default()));
        }
        for p in &self.plays {
            if !p.is_empty() && !self.plays.contains(&p.prefix(p.len() - 1)) {
                return Err(Self::violation("a tree (missing a prefix)", p));
            }
            if !p.valid_in(ts, mode) {
                return Err(Self::violation("inside the game", p));
            }
            if p.len() % 2 == 1 && self.extensions(p).len() != 1 {
                return Err(Self::violation("deterministic (needs exactly one response)", p));
            }
        }
        Ok(())
    }

    /// Every legal O-extension of an even-length play is present. Outside the
    /// black-box game this is relative to `universe`.
    pub fn is_live(&self, ts: &TransitionSystem, mode: Mode, universe: &ImportUniverse) -> bool {
        self.liveness_witness(ts, mode, universe).is_none()
    }

    /// An even-length play with an unanswered O-extension, if any.
    pub fn liveness_witness(
        &self,
        ts: &TransitionSystem,
        mode: Mode,
        universe: &ImportUniverse,
    ) -> Option<Dialogue> {
        self.plays
            .iter()
            .filter(|p| p.len() % 2 == 0)
            .flat_map(|p| legal_moves(ts, p, mode, universe).into_iter().map(move |m| p.extended(m)))
            .find(|q| !self.plays.contains(q))
    }

    /// The copycat condition on every play.
    pub fn copycat_ok(&self, ts: &TransitionSystem) -> bool {
        self.plays.iter().all(|p| p.copycat_ok(ts) == Ok(true))
    }

    pub fn to_text(&self) -> String {
        format::write_plays(self.maximal_plays())
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(Strategy { plays: format::parse_strategy_plays(text)? })
    }
}

/// All live strategies with plays of length at most `depth`, optionally
/// restricted to the copycat condition, in a deterministic order.
pub fn enumerate_strategies(
    ts: &TransitionSystem,
    mode: Mode,
    depth: usize,
    universe: &ImportUniverse,
    require_copycat: bool,
) -> Vec<Strategy> {
    let search = Search { ts, mode, depth, universe, require_copycat };
    let mut out: Vec<Strategy> = search
        .below(&Dialogue::default())
        .into_iter()
        .map(|plays| {
            let mut s = Strategy::empty();
            s.plays.extend(plays);
            s
        })
        .collect();
    out.sort();
    out
}

struct Search<'a> {
    ts: &'a TransitionSystem,
    mode: Mode,
    depth: usize,
    universe: &'a ImportUniverse,
    require_copycat: bool,
}

impl Search<'_> {
    /// Every way to complete the strategy below the even-length play `p`.
    fn below(&self, p: &Dialogue) -> Vec<Vec<Dialogue>> {
        let o_moves = legal_moves(self.ts, p, self.mode, self.universe);
        if o_moves.is_empty() {
            return vec![Vec::new()];
        }
        if p.len() + 2 > self.depth {
            return Vec::new();
        }
        let mut acc: Vec<Vec<Dialogue>> = vec![Vec::new()];
        for o in o_moves {
            let po = p.extended(o);
            let mut options = Vec::new();
            for r in legal_moves(self.ts, &po, self.mode, self.universe) {
                let por = po.extended(r);
                if self.require_copycat && por.copycat_ok(self.ts) != Ok(true) {
                    continue;
                }
                for mut sub in self.below(&por) {
                    sub.push(po.clone());
                    sub.push(por.clone());
                    options.push(sub);
                }
            }
            if options.is_empty() {
                return Vec::new();
            }
            let mut next = Vec::with_capacity(acc.len() * options.len());
            for a in &acc {
                for opt in &options {
                    let mut merged = a.clone();
                    merged.extend(opt.iter().cloned());
                    next.push(merged);
                }
            }
            acc = next;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transition::Label;
    use crate::types::TypeExpr;

    fn ty(s: &str) -> TypeExpr {
        TypeExpr::parse(s).unwrap()
    }

    fn play(moves: &[(usize, usize)]) -> Dialogue {
        Dialogue::new(moves.iter().map(|&(a, b)| Move::new(a, Label::plain(b))).collect())
    }

    #[test]
    fn validation() {
        let ts = TransitionSystem::build(ty("X -> (X -> X) -> X"));
        assert!(Strategy::empty().validate(&ts, Mode::PBacktracking).is_ok());
        let tau1 = Strategy::from_plays([play(&[(0, 1), (1, 2), (2, 1), (1, 1)])]);
        assert!(tau1.validate(&ts, Mode::PBacktracking).is_ok());
        assert!(tau1.is_live(&ts, Mode::PBacktracking, &ImportUniverse::default()));
        let gap = Strategy::from_raw(BTreeSet::from([Dialogue::default(), play(&[(0, 1), (1, 2)])]));
        assert!(gap.validate(&ts, Mode::PBacktracking).is_err());
    }

    #[test]
    fn liveness() {
        let x = TransitionSystem::build(ty("X"));
        let u = ImportUniverse::default();
        assert!(!Strategy::empty().is_live(&x, Mode::PBacktracking, &u));
        assert!(enumerate_strategies(&x, Mode::PBacktracking, 4, &u, false).is_empty());
        let k = TransitionSystem::build(ty("X -> Y -> X"));
        assert!(Strategy::from_plays([play(&[(0, 1), (1, 1)])]).is_live(&k, Mode::PBacktracking, &u));
    }

    #[test]
    fn x_y_x_has_two_live_strategies_one_copycat() {
        let ts = TransitionSystem::build(ty("X -> Y -> X"));
        let u = ImportUniverse::default();
        let live = enumerate_strategies(&ts, Mode::PBacktracking, 2, &u, false);
        assert_eq!(live.len(), 2);
        let cc = enumerate_strategies(&ts, Mode::PBacktracking, 2, &u, true);
        assert_eq!(cc, vec![Strategy::from_plays([play(&[(0, 1), (1, 1)])])]);
        assert!(cc[0].copycat_ok(&ts));
        assert!(!Strategy::from_plays([play(&[(0, 1), (1, 2)])]).copycat_ok(&ts));
    }

    #[test]
    fn polymorphic_booleans() {
        let ts = TransitionSystem::build(ty("forall X. X -> X -> X"));
        let found = enumerate_strategies(&ts, Mode::BlackBox, 4, &ImportUniverse::default(), true);
        assert_eq!(found.len(), 2);
        for s in &found {
            assert!(s.validate(&ts, Mode::BlackBox).is_ok());
        }
    }

    #[test]
    fn text_round_trip() {
        let s = Strategy::from_plays([
            play(&[(0, 1), (1, 2), (2, 1), (1, 1)]),
            play(&[(0, 1), (1, 2), (2, 1), (1, 2)]),
        ]);
        assert_eq!(Strategy::parse(&s.to_text()).unwrap(), s);
        assert_eq!(s.maximal_plays().len(), 2);
    }
}
