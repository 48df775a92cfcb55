//! The push-the-button compound `R1 ⊙ R2`.
//!
//! Play starts under `R1`. Exactly once, either player may spend a move
//! pressing the button, after which play continues under `R2` from the
//! current position. This module also carries the closed-form P-position
//! sets of the two-heap compounds of Nim, Wythoff and Euclid, and three
//! independent characterizations of Nim ⊙ Euclid.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{
    self, ceil_phi, is_wythoff_pair, zeckendorf, zeckendorf_decode, ArithError, FibWord,
};
use crate::engine::{Outcome, Ruleset};
use crate::heap::{is_misere_euclid_p, is_misere_nim_p, HeapGame};

/// Whether the button has been pressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// Still playing the first ruleset; the button is available.
    #[serde(rename = "before")]
    BeforeButton,
    /// The button was pressed; only the second ruleset applies.
    #[serde(rename = "after")]
    AfterButton,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PushPosition<P> {
    pub phase: Phase,
    pub inner: P,
}

impl<P> PushPosition<P> {
    pub fn before(inner: P) -> Self {
        PushPosition {
            phase: Phase::BeforeButton,
            inner,
        }
    }

    pub fn after(inner: P) -> Self {
        PushPosition {
            phase: Phase::AfterButton,
            inner,
        }
    }
}

impl<P: fmt::Display> fmt::Display for PushPosition<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.phase {
            Phase::BeforeButton => 1,
            Phase::AfterButton => 2,
        };
        write!(f, "({tag},{})", self.inner)
    }
}

/// `first ⊙ second` over the position space the two rulesets share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Push<R1, R2> {
    pub first: R1,
    pub second: R2,
}

impl<R1, R2> Push<R1, R2> {
    pub fn new(first: R1, second: R2) -> Self {
        Push { first, second }
    }
}

impl<R1, R2> Ruleset for Push<R1, R2>
where
    R1: Ruleset,
    R2: Ruleset<Position = R1::Position>,
{
    type Position = PushPosition<R1::Position>;

    fn options(&self, p: &Self::Position) -> Vec<Self::Position> {
        match p.phase {
            Phase::BeforeButton => {
                let mut out: Vec<_> = self
                    .first
                    .options(&p.inner)
                    .into_iter()
                    .map(PushPosition::before)
                    .collect();
                out.push(PushPosition::after(p.inner.clone()));
                out
            }
            Phase::AfterButton => self
                .second
                .options(&p.inner)
                .into_iter()
                .map(PushPosition::after)
                .collect(),
        }
    }
}

/// Two-heap push compounds with a closed-form P-position set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Compound {
    NimEuclid,
    NimWythoff,
    EuclidNim,
    WythoffNim,
}

impl Compound {
    pub const ALL: [Compound; 4] = [
        Compound::NimEuclid,
        Compound::NimWythoff,
        Compound::EuclidNim,
        Compound::WythoffNim,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Compound::NimEuclid => "nim-euclid",
            Compound::NimWythoff => "nim-wythoff",
            Compound::EuclidNim => "euclid-nim",
            Compound::WythoffNim => "wythoff-nim",
        }
    }

    pub fn ruleset(self) -> Push<HeapGame, HeapGame> {
        let (first, second) = match self {
            Compound::NimEuclid => (HeapGame::Nim, HeapGame::Euclid),
            Compound::NimWythoff => (HeapGame::Nim, HeapGame::Wythoff),
            Compound::EuclidNim => (HeapGame::Euclid, HeapGame::Nim),
            Compound::WythoffNim => (HeapGame::Wythoff, HeapGame::Nim),
        };
        Push::new(first, second)
    }
}

impl fmt::Display for Compound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Compound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Compound::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| format!("unknown compound {s:?}"))
    }
}

/// Nim ⊙ Euclid, set form: Wythoff pairs, minus the pairs `(u_{2n}, u_{2n+1})`,
/// plus the pairs `(u_{2n+1}, u_{2n+2})`.
///
/// The exceptional pairs are recognised by Zeckendorf shape: `u_{2n}` is
/// empty or `(10)^{n-1}1`, `u_{2n+1}` is `(10)^n` and `u_{2n+2}` is `(10)^n 1`.
pub fn nim_euclid_set_form(x: u64, y: u64) -> Result<bool, ArithError> {
    let (a, b) = (x.min(y), x.max(y));
    let wa = zeckendorf(a)?;
    let wythoff = is_wythoff_pair(a, b)?;
    let removed = wythoff && (wa.is_empty() || wa.is_ten_power_one());
    let added = wa.is_ten_power() && zeckendorf(b)? == wa.shifted(true)?;
    Ok((wythoff != removed) || added)
}

/// Closed-form outcome of a compound at the unordered pair `{x, y}`.
pub fn push_p_oracle(compound: Compound, x: u64, y: u64) -> Result<Outcome, ArithError> {
    let (a, b) = (x.min(y), x.max(y));
    let is_p = match compound {
        Compound::NimEuclid => nim_euclid_set_form(a, b)?,
        // Misère Nim set.
        Compound::NimWythoff => is_misere_nim_p(a, b),
        // Misère Euclid, with the variant's (0,i) -> (0,0) move on the axes.
        Compound::EuclidNim => {
            if a == 0 {
                b > 0
            } else {
                is_misere_euclid_p(a, b)
            }
        }
        // Shifted Wythoff pairs (a_n - 1, b_n - 1), n >= 1.
        Compound::WythoffNim => a < b && is_wythoff_pair(a + 1, b + 1)?,
    };
    Ok(Outcome::from_is_p(is_p))
}

/// Pairs `(A_n, B_n)` from the mex recurrence `A_n = mex{A_i, B_i : i < n}`,
/// `B_n = ⌈Φ A_n⌉`, starting at `(0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPairTable {
    pairs: Vec<(u64, u64)>,
}

impl PPairTable {
    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Whether the unordered pair is listed. Pairs are sorted by `A_n`, so
    /// this is a binary search.
    pub fn contains(&self, x: u64, y: u64) -> bool {
        let (a, b) = (x.min(y), x.max(y));
        self.pairs
            .binary_search_by_key(&a, |&(pa, _)| pa)
            .is_ok_and(|i| self.pairs[i].1 == b)
    }

    /// Largest value the table is guaranteed to classify completely: every
    /// integer up to it appears as some `A_n` or `B_n`.
    pub fn covered_up_to(&self) -> u64 {
        self.pairs.last().map_or(0, |&(a, _)| a)
    }
}

pub fn nim_euclid_recurrence(count: usize) -> Result<PPairTable, ArithError> {
    let mut pairs = Vec::with_capacity(count);
    let mut used: Vec<bool> = Vec::new();
    let mut next_free = 0u64;
    let mark = |used: &mut Vec<bool>, v: u64| {
        if used.len() <= v as usize {
            used.resize(v as usize + 1, false);
        }
        used[v as usize] = true;
    };
    for n in 0..count {
        while used.get(next_free as usize).copied().unwrap_or(false) {
            next_free += 1;
        }
        let a = next_free;
        let b = if n == 0 { 1 } else { ceil_phi(a)? };
        mark(&mut used, a);
        mark(&mut used, b);
        pairs.push((a, b));
    }
    Ok(PPairTable { pairs })
}

/// Which coordinate set of Nim ⊙ Euclid P-positions an integer belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "set", rename_all = "UPPERCASE")]
pub enum FibClass {
    /// Smaller coordinate; `partner` is the matching larger one.
    A { partner: u64 },
    /// Larger coordinate; `partner` is the matching smaller one.
    B { partner: u64 },
}

/// Classifies `x` from its Zeckendorf word `s`: `x ∈ A` iff `s` ends with an
/// even number of zeros and is not `(10)*1`, or `s = (10)*`. The partner of
/// `s_A` is `s_A 0`, or `s_A 1` when `s_A = (10)*`.
pub fn nim_euclid_fib_classify(x: u64) -> Result<FibClass, ArithError> {
    let s = zeckendorf(x)?;
    let in_a = (s.trailing_zeros() % 2 == 0 && !s.is_ten_power_one()) || s.is_ten_power();
    if in_a {
        let partner = s.shifted(s.is_ten_power())?;
        Ok(FibClass::A {
            partner: zeckendorf_decode(partner),
        })
    } else {
        // s_B = s_A 0 or s_A 1; either way dropping the last digit recovers s_A.
        let partner: FibWord = s.unshifted();
        Ok(FibClass::B {
            partner: zeckendorf_decode(partner),
        })
    }
}

/// Nim ⊙ Euclid P-membership through the Fibonacci characterization.
pub fn nim_euclid_by_fib(x: u64, y: u64) -> Result<bool, ArithError> {
    let (a, b) = (x.min(y), x.max(y));
    Ok(matches!(nim_euclid_fib_classify(a)?, FibClass::A { partner } if partner == b))
}

/// Wythoff pairs `(a_n, b_n)` for `n = 0, 1, …` while `b_n <= max`.
pub fn wythoff_pairs_up_to(max: u64) -> Result<Vec<(u64, u64)>, ArithError> {
    let mut out = Vec::new();
    for n in 0.. {
        let p = arith::WythoffPair::nth(n)?;
        if p.b > max {
            break;
        }
        out.push((p.a, p.b));
    }
    Ok(out)
}

/// P-positions `(a, b)` with `a ≤ b ≤ max` of a compound, from its oracle.
pub fn p_positions_up_to(compound: Compound, max: u64) -> Result<Vec<(u64, u64)>, ArithError> {
    let mut out = Vec::new();
    for a in 0..=max {
        for b in a..=max {
            if push_p_oracle(compound, a, b)?.is_p() {
                out.push((a, b));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Convention, Solver};
    use crate::heap::{HeapPosition, Nim, Subtraction, SubtractionSet};

    fn hp(a: u64, b: u64) -> HeapPosition {
        HeapPosition::new(&[a, b])
    }

    #[test]
    fn push_option_examples() {
        let r = Compound::NimEuclid.ruleset();
        assert_eq!(
            r.options(&PushPosition::before(hp(0, 0))),
            vec![PushPosition::after(hp(0, 0))]
        );
        let mut got = r.options(&PushPosition::before(hp(1, 1)));
        got.sort();
        let mut want = vec![
            PushPosition::before(hp(0, 1)),
            PushPosition::before(hp(1, 0)),
            PushPosition::after(hp(1, 1)),
        ];
        want.sort();
        assert_eq!(got, want);
        assert!(r.options(&PushPosition::after(hp(3, 3))).is_empty());
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(push_p_oracle(Compound::NimEuclid, 7, 12), Ok(Outcome::P));
        assert_eq!(push_p_oracle(Compound::NimEuclid, 1, 2), Ok(Outcome::N));
        assert_eq!(push_p_oracle(Compound::WythoffNim, 0, 1), Ok(Outcome::P));
        assert_eq!(push_p_oracle(Compound::NimWythoff, 5, 5), Ok(Outcome::P));
        assert_eq!(push_p_oracle(Compound::NimEuclid, 12, 20), Ok(Outcome::N));
    }

    #[test]
    fn recurrence_examples() {
        assert_eq!(nim_euclid_recurrence(1).unwrap().pairs(), &[(0, 1)]);
        assert_eq!(
            nim_euclid_recurrence(3).unwrap().pairs(),
            &[(0, 1), (2, 4), (3, 5)]
        );
        assert_eq!(nim_euclid_recurrence(11).unwrap().pairs()[10], (17, 28));
    }

    #[test]
    fn fib_classify_examples() {
        assert_eq!(nim_euclid_fib_classify(2), Ok(FibClass::A { partner: 4 }));
        assert_eq!(nim_euclid_fib_classify(3), Ok(FibClass::A { partner: 5 }));
        assert_eq!(nim_euclid_fib_classify(4), Ok(FibClass::B { partner: 2 }));
        assert_eq!(nim_euclid_fib_classify(0), Ok(FibClass::A { partner: 1 }));
        assert_eq!(nim_euclid_fib_classify(1), Ok(FibClass::B { partner: 0 }));
    }

    #[test]
    fn recurrence_table_invariants() {
        let t = nim_euclid_recurrence(5000).unwrap();
        assert_eq!(t.pairs()[0], (0, 1));
        let mut seen = vec![0u8; (t.pairs().last().unwrap().1 + 1) as usize];
        for (n, &(a, b)) in t.pairs().iter().enumerate() {
            if n >= 1 {
                assert_eq!(b, ceil_phi(a).unwrap());
            }
            seen[a as usize] += 1;
            seen[b as usize] += 1;
        }
        let cover = t.covered_up_to() as usize;
        assert!(seen[..=cover].iter().all(|&c| c == 1));
    }

    #[test]
    fn oracles_match_search() {
        for compound in Compound::ALL {
            let mut solver = Solver::new(compound.ruleset());
            for a in 0..=25 {
                for b in 0..=25 {
                    let searched = solver
                        .outcome(&PushPosition::before(hp(a, b)), Convention::Normal)
                        .unwrap();
                    assert_eq!(
                        push_p_oracle(compound, a, b).unwrap(),
                        searched,
                        "{compound} ({a},{b})"
                    );
                }
            }
        }
    }

    #[test]
    fn self_push_is_sum_with_star() {
        // R ⊙ R at (1,g) against R on g plus an extra heap of one token.
        let sub = SubtractionSet::new([1, 2]).unwrap();
        let mut push = Solver::new(Push::new(
            Subtraction(sub.clone()),
            Subtraction(sub.clone()),
        ));
        let mut plain = Solver::new(Subtraction(sub));
        for n in 0..=30u64 {
            let p = push
                .grundy(&PushPosition::before(HeapPosition::new(&[n])))
                .unwrap();
            let g = plain.grundy(&HeapPosition::new(&[n])).unwrap();
            assert_eq!(p.0, g.0 ^ 1, "n={n}");
        }
        let mut nim_push = Solver::new(Push::new(Nim, Nim));
        let mut nim3 = Solver::new(Nim);
        for a in 0..=8 {
            for b in 0..=8 {
                let lhs = nim_push
                    .outcome(&PushPosition::before(hp(a, b)), Convention::Normal)
                    .unwrap();
                let rhs = nim3
                    .outcome(&HeapPosition::new(&[a, b, 1]), Convention::Normal)
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}
