//! Generic impartial-game engine: rulesets, outcomes, Grundy values and a
//! memoizing solver.
//!
//! The solver walks the option graph with an explicit stack, so option
//! chains thousands of moves deep (subtraction games on large heaps) do not
//! touch the native call stack.

use std::fmt;
use std::hash::Hash;
use std::ops::BitXor;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default number of memo entries a single table may hold.
pub const DEFAULT_MEMO_CAP: usize = 100_000_000;

/// Result of a short impartial game under optimal play.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    /// The previous player (the one who just moved) wins.
    P,
    /// The next player (the one to move) wins.
    N,
}

impl Outcome {
    pub fn is_p(self) -> bool {
        self == Outcome::P
    }

    pub fn from_is_p(is_p: bool) -> Self {
        if is_p {
            Outcome::P
        } else {
            Outcome::N
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::P => "P",
            Outcome::N => "N",
        })
    }
}

/// Winning convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// The player left without a move loses.
    Normal,
    /// The player left without a move wins.
    Misere,
}

/// A Sprague-Grundy value.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Nimber(pub u32);

impl Nimber {
    pub const ZERO: Nimber = Nimber(0);

    pub fn value(self) -> u32 {
        self.0
    }
}

impl BitXor for Nimber {
    type Output = Nimber;

    fn bitxor(self, rhs: Nimber) -> Nimber {
        Nimber(self.0 ^ rhs.0)
    }
}

impl std::iter::Sum for Nimber {
    fn sum<I: Iterator<Item = Nimber>>(iter: I) -> Nimber {
        iter.fold(Nimber::ZERO, |acc, v| acc ^ v)
    }
}

impl fmt::Display for Nimber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Minimum excludant: the least non-negative integer absent from `values`.
pub fn mex<I: IntoIterator<Item = Nimber>>(values: I) -> Nimber {
    let values: Vec<u32> = values.into_iter().map(|v| v.0).collect();
    // The answer is at most values.len(), so larger entries can be ignored.
    let mut seen = vec![false; values.len() + 1];
    for v in values {
        if let Some(slot) = seen.get_mut(v as usize) {
            *slot = true;
        }
    }
    let m = seen.iter().position(|&s| !s).unwrap_or(seen.len());
    Nimber(m as u32)
}

/// Value of a disjunctive sum: XOR of the component values.
pub fn sum_nimbers<I: IntoIterator<Item = Nimber>>(values: I) -> Nimber {
    values.into_iter().sum()
}

/// An impartial ruleset: maps each position to its finite set of options.
///
/// Implementations must be deterministic and the option graph reachable
/// from any queried position must be finite and acyclic.
pub trait Ruleset {
    type Position: Clone + Eq + Hash;

    fn options(&self, position: &Self::Position) -> Vec<Self::Position>;

    /// Normal-play outcome of `position` when it is known without search.
    ///
    /// Positions answered here are neither expanded nor memoized by the
    /// outcome search. Grundy and misère computations ignore this hook.
    fn known_outcome(&self, _position: &Self::Position) -> Option<Outcome> {
        None
    }
}

impl<R: Ruleset + ?Sized> Ruleset for &R {
    type Position = R::Position;

    fn options(&self, position: &Self::Position) -> Vec<Self::Position> {
        (**self).options(position)
    }

    fn known_outcome(&self, position: &Self::Position) -> Option<Outcome> {
        (**self).known_outcome(position)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    /// The memo table reached its configured capacity; the instance is too
    /// large for the current budget.
    #[error("memo table reached its cap of {cap} entries")]
    MemoLimit { cap: usize },
}

/// Hit/miss counters for the memo tables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub hits: u64,
    pub computed: u64,
    pub entries: u64,
}

struct Frame<P> {
    position: P,
    options: Vec<P>,
    next: usize,
}

/// Memoizing solver bound to one ruleset.
///
/// One table is kept per convention plus one for Grundy values, all keyed
/// by the position exactly as the ruleset produces it.
pub struct Solver<R: Ruleset> {
    ruleset: R,
    cap: usize,
    normal: FxHashMap<R::Position, Outcome>,
    misere: FxHashMap<R::Position, Outcome>,
    grundy: FxHashMap<R::Position, Nimber>,
    hits: u64,
    computed: u64,
}

impl<R: Ruleset> Solver<R> {
    pub fn new(ruleset: R) -> Self {
        Self::with_cap(ruleset, DEFAULT_MEMO_CAP)
    }

    pub fn with_cap(ruleset: R, cap: usize) -> Self {
        Solver {
            ruleset,
            cap,
            normal: FxHashMap::default(),
            misere: FxHashMap::default(),
            grundy: FxHashMap::default(),
            hits: 0,
            computed: 0,
        }
    }

    pub fn ruleset(&self) -> &R {
        &self.ruleset
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits,
            computed: self.computed,
            entries: (self.normal.len() + self.misere.len() + self.grundy.len()) as u64,
        }
    }

    /// Drops every memoized entry.
    pub fn clear(&mut self) {
        self.normal.clear();
        self.misere.clear();
        self.grundy.clear();
    }

    pub(crate) fn outcome_table(&self, convention: Convention) -> &FxHashMap<R::Position, Outcome> {
        match convention {
            Convention::Normal => &self.normal,
            Convention::Misere => &self.misere,
        }
    }

    pub(crate) fn outcome_table_mut(
        &mut self,
        convention: Convention,
    ) -> &mut FxHashMap<R::Position, Outcome> {
        match convention {
            Convention::Normal => &mut self.normal,
            Convention::Misere => &mut self.misere,
        }
    }

    pub(crate) fn grundy_table(&self) -> &FxHashMap<R::Position, Nimber> {
        &self.grundy
    }

    pub(crate) fn grundy_table_mut(&mut self) -> &mut FxHashMap<R::Position, Nimber> {
        &mut self.grundy
    }

    fn lookup(&self, position: &R::Position, convention: Convention) -> Option<Outcome> {
        if let Some(&o) = self.outcome_table(convention).get(position) {
            return Some(o);
        }
        if convention == Convention::Normal {
            return self.ruleset.known_outcome(position);
        }
        None
    }

    /// Outcome of `position` under `convention`.
    pub fn outcome(
        &mut self,
        position: &R::Position,
        convention: Convention,
    ) -> Result<Outcome, SolveError> {
        if let Some(o) = self.lookup(position, convention) {
            self.hits += 1;
            return Ok(o);
        }
        let mut stack = vec![Frame {
            options: self.ruleset.options(position),
            position: position.clone(),
            next: 0,
        }];
        loop {
            let frame = stack
                .last_mut()
                .expect("stack is non-empty inside the loop");
            let mut winning = false;
            let mut descend = None;
            while frame.next < frame.options.len() {
                let option = &frame.options[frame.next];
                let known = match self.outcome_table(convention).get(option) {
                    Some(&o) => Some(o),
                    None if convention == Convention::Normal => self.ruleset.known_outcome(option),
                    None => None,
                };
                match known {
                    Some(Outcome::P) => {
                        winning = true;
                        break;
                    }
                    Some(Outcome::N) => frame.next += 1,
                    None => {
                        descend = Some(option.clone());
                        break;
                    }
                }
            }
            if let Some(child) = descend {
                let options = self.ruleset.options(&child);
                stack.push(Frame {
                    position: child,
                    options,
                    next: 0,
                });
                continue;
            }
            let frame = stack.pop().expect("frame was just inspected");
            let result = if winning {
                Outcome::N
            } else {
                match convention {
                    Convention::Normal => Outcome::P,
                    Convention::Misere if frame.options.is_empty() => Outcome::N,
                    Convention::Misere => Outcome::P,
                }
            };
            let cap = self.cap;
            let table = self.outcome_table_mut(convention);
            if table.len() >= cap {
                return Err(SolveError::MemoLimit { cap });
            }
            table.insert(frame.position, result);
            self.computed += 1;
            if stack.is_empty() {
                return Ok(result);
            }
        }
    }

    /// Sprague-Grundy value of `position` (normal play).
    pub fn grundy(&mut self, position: &R::Position) -> Result<Nimber, SolveError> {
        if let Some(&v) = self.grundy.get(position) {
            self.hits += 1;
            return Ok(v);
        }
        let mut stack = vec![Frame {
            options: self.ruleset.options(position),
            position: position.clone(),
            next: 0,
        }];
        loop {
            let frame = stack
                .last_mut()
                .expect("stack is non-empty inside the loop");
            let mut descend = None;
            while frame.next < frame.options.len() {
                let option = &frame.options[frame.next];
                if self.grundy.contains_key(option) {
                    frame.next += 1;
                } else {
                    descend = Some(option.clone());
                    break;
                }
            }
            if let Some(child) = descend {
                let options = self.ruleset.options(&child);
                stack.push(Frame {
                    position: child,
                    options,
                    next: 0,
                });
                continue;
            }
            let frame = stack.pop().expect("frame was just inspected");
            let value = mex(frame.options.iter().map(|o| self.grundy[o]));
            debug_assert!(value.0 < u32::MAX, "Grundy value overflowed 32 bits");
            if self.grundy.len() >= self.cap {
                return Err(SolveError::MemoLimit { cap: self.cap });
            }
            self.grundy.insert(frame.position, value);
            self.computed += 1;
            if stack.is_empty() {
                return Ok(value);
            }
        }
    }
}
