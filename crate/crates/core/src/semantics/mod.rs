//! The model: compilation, readback, interaction and normalization.

pub mod bijection;
pub mod compile;
pub mod interaction;
pub mod normalize;

pub use bijection::{check_bijection, BijectionReport};
pub use compile::{strategy_to_term, term_to_strategy};
pub use interaction::{erasure_agrees, Compose, UntypedPlayer, DEFAULT_BUDGET};
pub use normalize::{apply, interpret, normalize_syntactically, normalize_via_games};
