//! Heap rulesets: Nim, Wythoff, the Euclid variant, Zeruclid and
//! subtraction games, together with closed-form P-position oracles.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;
use thiserror::Error;

use crate::arith::{self, compare_ratio_phi, consecutive_fib_index, ArithError, PhiSide};
use crate::engine::{Outcome, Ruleset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeapError {
    #[error("cannot parse heap position {0:?}")]
    Parse(String),
    #[error("{game} is played on {expected} heap(s), got {got}")]
    WrongArity {
        game: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("subtraction set must be non-empty and contain only positive values")]
    BadSubtractionSet,
    #[error("{0} requires both coordinates to be positive")]
    ZeroCoordinate(&'static str),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Tuple of heap sizes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HeapPosition(pub SmallVec<[u64; 3]>);

impl HeapPosition {
    pub fn new(heaps: &[u64]) -> Self {
        HeapPosition(SmallVec::from_slice(heaps))
    }

    pub fn heaps(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Same heaps in ascending order.
    pub fn sorted(&self) -> HeapPosition {
        let mut h = self.0.clone();
        h.sort_unstable();
        HeapPosition(h)
    }

    fn with(&self, index: usize, value: u64) -> HeapPosition {
        let mut h = self.0.clone();
        h[index] = value;
        HeapPosition(h)
    }

    fn pair(&self) -> (u64, u64) {
        (self.0[0], self.0[1])
    }
}

impl From<(u64, u64)> for HeapPosition {
    fn from((a, b): (u64, u64)) -> Self {
        HeapPosition::new(&[a, b])
    }
}

impl fmt::Display for HeapPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}

impl FromStr for HeapPosition {
    type Err = HeapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let heaps = s
            .split(',')
            .map(|t| t.trim().parse::<u64>())
            .collect::<Result<SmallVec<_>, _>>()
            .map_err(|_| HeapError::Parse(s.to_string()))?;
        if heaps.is_empty() {
            return Err(HeapError::Parse(s.to_string()));
        }
        Ok(HeapPosition(heaps))
    }
}

/// Finite set of positive integers for a subtraction game.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubtractionSet(Vec<u64>);

impl SubtractionSet {
    pub fn new<I: IntoIterator<Item = u64>>(values: I) -> Result<Self, HeapError> {
        let set: BTreeSet<u64> = values.into_iter().collect();
        if set.is_empty() || set.contains(&0) {
            return Err(HeapError::BadSubtractionSet);
        }
        Ok(SubtractionSet(set.into_iter().collect()))
    }

    /// `{1, …, k}`.
    pub fn interval(k: u64) -> Result<Self, HeapError> {
        Self::new(1..=k)
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn max(&self) -> u64 {
        *self.0.last().expect("subtraction sets are non-empty")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for SubtractionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for SubtractionSet {
    type Err = HeapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let values = s
            .split(',')
            .map(|t| t.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| HeapError::Parse(s.to_string()))?;
        SubtractionSet::new(values)
    }
}

/// Strictly decrease exactly one heap.
pub fn nim_options(p: &HeapPosition) -> Vec<HeapPosition> {
    let mut out = Vec::with_capacity(p.total() as usize);
    for (i, &h) in p.0.iter().enumerate() {
        for v in 0..h {
            out.push(p.with(i, v));
        }
    }
    out
}

/// Nim moves plus equal reductions of both heaps.
pub fn wythoff_options(p: &HeapPosition) -> Vec<HeapPosition> {
    let mut out = nim_options(p);
    let (a, b) = p.pair();
    for k in 1..=a.min(b) {
        out.push((a - k, b - k).into());
    }
    out
}

/// Euclid on positive heaps, extended with the single move `(0,i) → (0,0)`.
///
/// From `(a,b)` with `a,b ≥ 1`, a positive multiple of the smaller heap is
/// taken from the larger one, which must stay positive. Equal heaps are
/// terminal.
pub fn euclid_variant_options(p: &HeapPosition) -> Vec<HeapPosition> {
    let (a, b) = p.pair();
    match (a, b) {
        (0, 0) => vec![],
        (0, _) | (_, 0) => vec![(0, 0).into()],
        _ if a == b => vec![],
        _ if a < b => (1..)
            .map(|q| q * a)
            .take_while(|&m| m < b)
            .map(|m| (a, b - m).into())
            .collect(),
        _ => (1..)
            .map(|q| q * b)
            .take_while(|&m| m < a)
            .map(|m| (a - m, b).into())
            .collect(),
    }
}

/// Remove a positive multiple of the smallest non-zero heap from any heap.
pub fn zeruclid_options(p: &HeapPosition) -> Vec<HeapPosition> {
    let Some(step) = p.0.iter().copied().filter(|&h| h > 0).min() else {
        return vec![];
    };
    let mut out: Vec<HeapPosition> = Vec::new();
    for (i, &h) in p.0.iter().enumerate() {
        let mut m = step;
        while m <= h {
            out.push(p.with(i, h - m));
            m += step;
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Remove `v ∈ S` tokens from a single heap.
pub fn subtraction_options(s: &SubtractionSet, p: &HeapPosition) -> Vec<HeapPosition> {
    let n = p.0[0];
    s.values()
        .iter()
        .filter(|&&v| v <= n)
        .map(|&v| HeapPosition::new(&[n - v]))
        .collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Nim;

impl Ruleset for Nim {
    type Position = HeapPosition;

    fn options(&self, p: &HeapPosition) -> Vec<HeapPosition> {
        nim_options(p)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Wythoff;

impl Ruleset for Wythoff {
    type Position = HeapPosition;

    fn options(&self, p: &HeapPosition) -> Vec<HeapPosition> {
        wythoff_options(p)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EuclidVariant;

impl Ruleset for EuclidVariant {
    type Position = HeapPosition;

    fn options(&self, p: &HeapPosition) -> Vec<HeapPosition> {
        euclid_variant_options(p)
    }
}

/// Zeruclid. With `sorted` set, positions and options are kept in ascending
/// heap order, which shrinks the memo table without changing any value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Zeruclid {
    pub sorted: bool,
}

impl Zeruclid {
    pub fn canonical() -> Self {
        Zeruclid { sorted: true }
    }

    /// Position as the solver expects it.
    pub fn normalize(&self, p: &HeapPosition) -> HeapPosition {
        if self.sorted {
            p.sorted()
        } else {
            p.clone()
        }
    }
}

impl Ruleset for Zeruclid {
    type Position = HeapPosition;

    fn options(&self, p: &HeapPosition) -> Vec<HeapPosition> {
        let mut out = zeruclid_options(p);
        if self.sorted {
            for o in &mut out {
                o.0.sort_unstable();
            }
            out.sort_unstable();
            out.dedup();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subtraction(pub SubtractionSet);

impl Ruleset for Subtraction {
    type Position = HeapPosition;

    fn options(&self, p: &HeapPosition) -> Vec<HeapPosition> {
        subtraction_options(&self.0, p)
    }
}

/// Runtime-selected heap ruleset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeapGame {
    Nim,
    Wythoff,
    Euclid,
    Zeruclid,
    Subtraction(SubtractionSet),
}

impl HeapGame {
    pub fn name(&self) -> String {
        match self {
            HeapGame::Nim => "nim".into(),
            HeapGame::Wythoff => "wythoff".into(),
            HeapGame::Euclid => "euclid".into(),
            HeapGame::Zeruclid => "zeruclid".into(),
            HeapGame::Subtraction(s) => format!("subtraction:{s}"),
        }
    }

    /// Checks that `p` has the number of heaps this ruleset is played on.
    pub fn validate(&self, p: &HeapPosition) -> Result<(), HeapError> {
        let (game, expected) = match self {
            HeapGame::Nim | HeapGame::Zeruclid => {
                return if p.is_empty() {
                    Err(HeapError::Parse(String::new()))
                } else {
                    Ok(())
                }
            }
            HeapGame::Wythoff => ("wythoff", 2),
            HeapGame::Euclid => ("euclid", 2),
            HeapGame::Subtraction(_) => ("subtraction", 1),
        };
        if p.len() == expected {
            Ok(())
        } else {
            Err(HeapError::WrongArity {
                game,
                expected,
                got: p.len(),
            })
        }
    }
}

impl fmt::Display for HeapGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for HeapGame {
    type Err = HeapError;

    /// `nim`, `wythoff`, `euclid`, `zeruclid`, or `subtraction:1,2,3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "nim" => Ok(HeapGame::Nim),
            "wythoff" => Ok(HeapGame::Wythoff),
            "euclid" => Ok(HeapGame::Euclid),
            "zeruclid" => Ok(HeapGame::Zeruclid),
            other => {
                let set = other
                    .strip_prefix("subtraction:")
                    .or_else(|| other.strip_prefix("sub:"))
                    .ok_or_else(|| HeapError::Parse(s.to_string()))?;
                Ok(HeapGame::Subtraction(set.parse()?))
            }
        }
    }
}

impl Ruleset for HeapGame {
    type Position = HeapPosition;

    fn options(&self, p: &HeapPosition) -> Vec<HeapPosition> {
        match self {
            HeapGame::Nim => nim_options(p),
            HeapGame::Wythoff => wythoff_options(p),
            HeapGame::Euclid => euclid_variant_options(p),
            HeapGame::Zeruclid => zeruclid_options(p),
            HeapGame::Subtraction(s) => subtraction_options(s, p),
        }
    }
}

/// Base games with a closed-form two-heap P-position characterization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaseGame {
    NimNormal,
    NimMisere,
    Wythoff,
    EuclidNormal,
    EuclidMisere,
}

impl BaseGame {
    pub const ALL: [BaseGame; 5] = [
        BaseGame::NimNormal,
        BaseGame::NimMisere,
        BaseGame::Wythoff,
        BaseGame::EuclidNormal,
        BaseGame::EuclidMisere,
    ];
}

/// Misère Nim on two heaps: `{(0,1), (1,0)} ∪ {(k,k) : k ≥ 2}`.
pub fn is_misere_nim_p(a: u64, b: u64) -> bool {
    matches!((a.min(b), a.max(b)), (0, 1)) || (a == b && a >= 2)
}

/// Misère Euclid on positive heaps: P iff `b/a < Φ` and `b/a ≠ F_{2i+2}/F_{2i+1}`,
/// or `b/a = F_{2i+1}/F_{2i}` (with `a ≤ b`).
pub fn is_misere_euclid_p(x: u64, y: u64) -> bool {
    let (a, b) = (x.min(y), x.max(y));
    debug_assert!(a >= 1);
    // j is such that b/a = F_{j+1}/F_j.
    match consecutive_fib_index(a, b) {
        Some(j) if (j + 1) % 2 == 0 => false,
        Some(j) if j >= 2 => true,
        _ => compare_ratio_phi(a, b).expect("a >= 1") == PhiSide::Below,
    }
}

/// Closed-form outcome of a two-heap base game.
pub fn base_p_oracle(game: BaseGame, x: u64, y: u64) -> Result<Outcome, HeapError> {
    let (a, b) = (x.min(y), x.max(y));
    let is_p = match game {
        BaseGame::NimNormal => a == b,
        BaseGame::NimMisere => is_misere_nim_p(a, b),
        BaseGame::Wythoff => arith::is_wythoff_pair(a, b)?,
        BaseGame::EuclidNormal | BaseGame::EuclidMisere if a == 0 => {
            return Err(HeapError::ZeroCoordinate("Euclid oracle"))
        }
        BaseGame::EuclidNormal => compare_ratio_phi(a, b)? == PhiSide::Below,
        BaseGame::EuclidMisere => is_misere_euclid_p(a, b),
    };
    Ok(Outcome::from_is_p(is_p))
}
