//! Terms against strategies within bounds.

use std::fmt;

use crate::dialogue::Mode;
use crate::strategy::enumerate_strategies;
use crate::term::enumerate_normal_terms;
use crate::transition::TransitionSystem;
use crate::types::TypeExpr;
use crate::universe::ImportUniverse;

use super::compile::{strategy_to_term, term_to_strategy};

#[derive(Clone, Debug)]
pub struct BijectionReport {
    pub mode: Mode,
    pub terms: usize,
    /// Live strategies without the copycat condition (lambda mode only).
    pub live: Option<usize>,
    pub strategies: usize,
    pub matched: usize,
    /// Pairs lost only to the bounds.
    pub truncated: usize,
    pub failures: Vec<String>,
}

impl BijectionReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for BijectionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.ok() { "OK" } else { "FAILED" };
        match self.live {
            Some(live) => write!(
                f,
                "terms: {}, strategies(live): {live}, copycat: {}, bijection: {verdict}",
                self.terms, self.strategies
            )?,
            None => write!(f, "terms: {}, strategies: {}, bijection: {verdict}", self.terms, self.strategies)?,
        }
        for msg in &self.failures {
            write!(f, "\n  {msg}")?;
        }
        Ok(())
    }
}

/// Compare normal terms of size at most `term_bound` with copycat strategies
/// whose plays have length at most `depth_bound`.
pub fn check_bijection(
    ty: &TypeExpr,
    term_bound: usize,
    depth_bound: usize,
    mode: Mode,
    universe: &ImportUniverse,
) -> BijectionReport {
    let ts = TransitionSystem::build(ty.clone());
    let terms = enumerate_normal_terms(ty, term_bound, universe);
    let strategies = enumerate_strategies(&ts, mode, depth_bound, universe, true);
    let live = (mode != Mode::BlackBox)
        .then(|| enumerate_strategies(&ts, mode, depth_bound, universe, false).len());
    let mut report = BijectionReport {
        mode,
        terms: terms.len(),
        live,
        strategies: strategies.len(),
        matched: 0,
        truncated: 0,
        failures: Vec::new(),
    };
    for t in &terms {
        match term_to_strategy(t, ty) {
            Err(e) => report.failures.push(format!("cannot compile {t}: {e}")),
            Ok(s) => {
                match strategy_to_term(&s, ty) {
                    Ok(back) if back.alpha_eq(t) => {}
                    Ok(back) => report.failures.push(format!("{t} reads back as {back}")),
                    Err(e) => report.failures.push(format!("cannot read back {t}: {e}")),
                }
                if strategies.binary_search(&s).is_ok() {
                    report.matched += 1;
                } else if s.depth() <= depth_bound {
                    report.failures.push(format!("strategy of {t} is missing from the enumeration"));
                } else {
                    report.truncated += 1;
                }
            }
        }
    }
    for s in &strategies {
        match strategy_to_term(s, ty) {
            Err(e) => report.failures.push(format!("strategy has no term: {e}")),
            Ok(t) => {
                if term_to_strategy(&t, ty).as_ref() != Ok(s) {
                    report.failures.push(format!("strategy reads back as {t}, which compiles elsewhere"));
                }
                if !terms.iter().any(|u| u.alpha_eq(&t)) {
                    if t.size() <= term_bound {
                        report.failures.push(format!("term {t} is missing from the enumeration"));
                    } else {
                        report.truncated += 1;
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(ty: &str, size: usize, depth: usize, mode: Mode) -> BijectionReport {
        check_bijection(&TypeExpr::parse(ty).unwrap(), size, depth, mode, &ImportUniverse::default())
    }

    #[test]
    fn small_types() {
        let r = run("forall G. G -> G -> G", 6, 4, Mode::BlackBox);
        assert!(r.ok(), "{r}");
        assert_eq!((r.terms, r.strategies, r.matched), (2, 2, 2));
        let r = run("X -> Y -> X", 4, 2, Mode::PBacktracking);
        assert_eq!(r.to_string(), "terms: 1, strategies(live): 2, copycat: 1, bijection: OK");
        let r = run("forall Y. Y", 6, 6, Mode::BlackBox);
        assert_eq!(r.to_string(), "terms: 0, strategies: 0, bijection: OK");
        let r = run("forall X. (X -> X) -> X -> X", 12, 10, Mode::BlackBox);
        assert_eq!((r.terms, r.strategies, r.matched, r.ok()), (5, 5, 5, true));
    }
}

