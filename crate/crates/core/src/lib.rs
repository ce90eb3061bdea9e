//! Game semantics for System F.
//!
//! Types induce transition systems whose traces form games; dialogues with
//! back-references give backtracking games; finite live strategies on the
//! black-box game correspond to eta-long beta-normal terms, and composing
//! strategies by interaction normalizes terms.

pub mod cli;
pub mod dialogue;
pub mod error;
pub mod expansion;
pub mod format;
pub mod gen;
pub mod semantics;
pub mod strategy;
pub mod term;
pub mod transition;
pub mod types;
pub mod universe;

pub use error::{Error, Result};
pub use transition::{Label, State, Style, TransitionSystem};
pub use types::{ResolvedView, TypeExpr};
pub use dialogue::{Dialogue, Mode, Move};
pub use universe::ImportUniverse;
pub use term::{Term, beta_normalize, eta_long, typecheck};
pub use strategy::{enumerate_strategies, Strategy};
