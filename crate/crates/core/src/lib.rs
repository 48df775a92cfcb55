//! Impartial combinatorial game toolkit.
//!
//! The crate is organised around a generic memoized [`Solver`] over any
//! [`Ruleset`]. Concrete rulesets live in [`heap`] (Nim, Wythoff, Euclid,
//! Zeruclid, subtraction games), [`push`] builds push-the-button compounds
//! of two rulesets, and [`cram`] implements Push Cram on bitboards.
//!
//! Every closed-form P-position characterization shipped here is an
//! independent code path from the exhaustive solver, so the two can be
//! cross-checked against each other.

pub mod arith;
pub mod cache;
pub mod cram;
pub mod engine;
pub mod heap;
pub mod periodicity;
pub mod push;
pub mod verify;
pub mod zeruclid;

pub use engine::{
    mex, sum_nimbers, CacheStats, Convention, Nimber, Outcome, Ruleset, SolveError, Solver,
    DEFAULT_MEMO_CAP,
};
pub use heap::{HeapGame, HeapPosition, SubtractionSet};
pub use push::{Compound, Phase, Push, PushPosition};
