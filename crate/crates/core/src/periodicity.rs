//! Outcome and Grundy sequences of `Subtraction(S1) ⊙ R2` and certified
//! period detection.
//!
//! A sequence whose next term is a function of the last `M` terms and of
//! `n mod k` is driven by a finite state machine. Once a state repeats, the
//! sequence is periodic forever from that point, so a repeat is a proof
//! rather than an observation. [`certify_period`] runs that machine and
//! reports canonical (minimal) preperiod and period.

use std::collections::hash_map::Entry;
use std::hash::Hash;

use rustc_hash::FxHashMap;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{mex, Convention, Nimber, Outcome, Ruleset, SolveError, Solver};
use crate::heap::{HeapPosition, Subtraction, SubtractionSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PeriodError {
    /// No state repeated within the proven bound on distinct states.
    #[error("no state repetition within {bound} steps")]
    HorizonExceeded { bound: usize },
    #[error("lookback window must be positive")]
    EmptyWindow,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Proof of eventual periodicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodCertificate {
    /// Least `n0` with `seq[n + period] = seq[n]` for all `n ≥ n0`.
    pub preperiod: usize,
    /// Least eventual period.
    pub period: usize,
    /// Lookback length `M` of the state.
    pub window: usize,
    /// Residue modulus `k` carried in the state.
    pub modulus: usize,
    /// First index of the repeated state and the length of the state cycle.
    pub state_repeat: (usize, usize),
}

/// Runs the state machine `state(i) = (seq[i..i+window], (i+window) mod modulus)`
/// until a state repeats.
///
/// `step(history, n)` must return `seq[n]` from `history = seq[..n]`, and for
/// `n ≥ offset + window` it must depend only on the last `window` entries
/// and on `n mod modulus`. `max_states` is the size of the state space; a
/// repeat is guaranteed within it.
pub fn certify_period<T, F>(
    window: usize,
    modulus: usize,
    offset: usize,
    max_states: usize,
    mut step: F,
) -> Result<(PeriodCertificate, Vec<T>), PeriodError>
where
    T: Copy + Eq + Hash,
    F: FnMut(&[T], usize) -> T,
{
    if window == 0 {
        return Err(PeriodError::EmptyWindow);
    }
    let modulus = modulus.max(1);
    let mut seq: Vec<T> = Vec::new();
    let mut extend_to = |seq: &mut Vec<T>, len: usize| {
        while seq.len() < len {
            let next = step(seq, seq.len());
            seq.push(next);
        }
    };
    let mut seen: FxHashMap<(Vec<T>, usize), usize> = FxHashMap::default();
    let mut i = offset;
    let (mu, lambda) = loop {
        if i - offset > max_states {
            return Err(PeriodError::HorizonExceeded { bound: max_states });
        }
        extend_to(&mut seq, i + window);
        let key = (seq[i..i + window].to_vec(), (i + window) % modulus);
        match seen.entry(key) {
            Entry::Occupied(e) => break (*e.get(), i - *e.get()),
            Entry::Vacant(e) => {
                e.insert(i);
            }
        }
        i += 1;
    };
    // Periodic with period lambda from mu on; shrink to the least divisor
    // that still works over one full cycle, then walk the start backwards.
    extend_to(&mut seq, mu + 2 * lambda + window);
    let period = divisors(lambda)
        .into_iter()
        .find(|&d| (mu..mu + lambda).all(|j| seq[j] == seq[j + d]))
        .unwrap_or(lambda);
    let mut preperiod = mu;
    while preperiod > 0 && seq[preperiod - 1] == seq[preperiod - 1 + period] {
        preperiod -= 1;
    }
    Ok((
        PeriodCertificate {
            preperiod,
            period,
            window,
            modulus,
            state_repeat: (mu, lambda),
        },
        seq,
    ))
}

fn divisors(n: usize) -> Vec<usize> {
    let mut d: Vec<usize> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    d.sort_unstable();
    d
}

/// A sequence known to be periodic from `preperiod` on, evaluable at any index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicTable<T> {
    prefix: Vec<T>,
    pub preperiod: usize,
    pub period: usize,
}

impl<T: Copy> PeriodicTable<T> {
    pub fn new(prefix: Vec<T>, preperiod: usize, period: usize) -> Self {
        assert!(prefix.len() >= preperiod + period);
        PeriodicTable {
            prefix,
            preperiod,
            period,
        }
    }

    pub fn at(&self, n: usize) -> T {
        if n < self.prefix.len() {
            self.prefix[n]
        } else {
            self.prefix[self.preperiod + (n - self.preperiod) % self.period]
        }
    }
}

fn subtraction_outcome_step(s: &SubtractionSet, history: &[Outcome], n: usize) -> Outcome {
    let all_n = s
        .values()
        .iter()
        .filter(|&&v| v as usize <= n)
        .all(|&v| history[n - v as usize] == Outcome::N);
    Outcome::from_is_p(all_n)
}

fn subtraction_misere_step(s: &SubtractionSet, history: &[Outcome], n: usize) -> Outcome {
    let mut moves = s.values().iter().filter(|&&v| v as usize <= n).peekable();
    if moves.peek().is_none() {
        return Outcome::N;
    }
    Outcome::from_is_p(moves.all(|&v| history[n - v as usize] == Outcome::N))
}

fn subtraction_grundy_step(s: &SubtractionSet, history: &[Nimber], n: usize) -> Nimber {
    mex(s
        .values()
        .iter()
        .filter(|&&v| v as usize <= n)
        .map(|&v| history[n - v as usize]))
}

/// Certified outcome sequence of the plain subtraction game.
pub fn certify_subtraction_outcomes(
    s: &SubtractionSet,
    convention: Convention,
) -> Result<(PeriodCertificate, PeriodicTable<Outcome>), PeriodError> {
    let m = s.max() as usize;
    let (cert, seq) = certify_period(m, 1, 0, 1 << m, |h, n| match convention {
        Convention::Normal => subtraction_outcome_step(s, h, n),
        Convention::Misere => subtraction_misere_step(s, h, n),
    })?;
    let table = PeriodicTable::new(seq, cert.preperiod, cert.period);
    Ok((cert, table))
}

/// Certified Grundy sequence of the plain subtraction game.
pub fn certify_subtraction_grundy(
    s: &SubtractionSet,
) -> Result<(PeriodCertificate, PeriodicTable<Nimber>), PeriodError> {
    let m = s.max() as usize;
    let bound = (s.len() + 1).saturating_pow(m as u32);
    let (cert, seq) = certify_period(m, 1, 0, bound, |h, n| subtraction_grundy_step(s, h, n))?;
    let table = PeriodicTable::new(seq, cert.preperiod, cert.period);
    Ok((cert, table))
}

/// Per-heap outcomes of a single-heap ruleset for heaps `0..length`.
pub fn heap_outcomes<R: Ruleset<Position = HeapPosition>>(
    solver: &mut Solver<R>,
    length: usize,
    convention: Convention,
) -> Result<Vec<Outcome>, SolveError> {
    (0..length)
        .map(|n| solver.outcome(&HeapPosition::new(&[n as u64]), convention))
        .collect()
}

/// Per-heap Grundy values of a single-heap ruleset for heaps `0..length`.
pub fn heap_grundy<R: Ruleset<Position = HeapPosition>>(
    solver: &mut Solver<R>,
    length: usize,
) -> Result<Vec<Nimber>, SolveError> {
    (0..length)
        .map(|n| solver.grundy(&HeapPosition::new(&[n as u64])))
        .collect()
}

fn compound_outcome_step(
    s1: &SubtractionSet,
    r2: Outcome,
    history: &[Outcome],
    n: usize,
) -> Outcome {
    // P iff pushing the button loses and every S1 move loses.
    if r2 == Outcome::P {
        return Outcome::N;
    }
    subtraction_outcome_step(s1, history, n)
}

fn compound_grundy_step(s1: &SubtractionSet, r2: Nimber, history: &[Nimber], n: usize) -> Nimber {
    mex(s1
        .values()
        .iter()
        .filter(|&&v| v as usize <= n)
        .map(|&v| history[n - v as usize])
        .chain(std::iter::once(r2)))
}

/// Outcomes of `Subtraction(S1) ⊙ R2` at heaps `0..r2_outcomes.len()`.
///
/// `r2_outcomes[n]` is the outcome of `R2` on heap `n` under the convention
/// being studied; since the button is always available, the same recursion
/// serves both conventions.
pub fn outcome_sequence(s1: &SubtractionSet, r2_outcomes: &[Outcome]) -> Vec<Outcome> {
    let mut seq = Vec::with_capacity(r2_outcomes.len());
    for (n, &r2) in r2_outcomes.iter().enumerate() {
        let next = compound_outcome_step(s1, r2, &seq, n);
        seq.push(next);
    }
    seq
}

/// Grundy values of `Subtraction(S1) ⊙ R2` at heaps `0..r2_values.len()`.
pub fn grundy_sequence(s1: &SubtractionSet, r2_values: &[Nimber]) -> Vec<Nimber> {
    let mut seq = Vec::with_capacity(r2_values.len());
    for (n, &r2) in r2_values.iter().enumerate() {
        let next = compound_grundy_step(s1, r2, &seq, n);
        seq.push(next);
    }
    seq
}

/// Certified outcome period of `Subtraction(S1) ⊙ R2`, where `r2` is
/// periodic from `r2.preperiod` with period `r2.period`.
pub fn certify_compound_outcomes(
    s1: &SubtractionSet,
    r2: &PeriodicTable<Outcome>,
) -> Result<PeriodCertificate, PeriodError> {
    let m = s1.max() as usize;
    let k = r2.period;
    let offset = r2.preperiod.saturating_sub(m);
    let bound = k.saturating_mul(1usize.checked_shl(m as u32).unwrap_or(usize::MAX));
    let (cert, _) = certify_period(m, k, offset, bound, |h, n| {
        compound_outcome_step(s1, r2.at(n), h, n)
    })?;
    Ok(cert)
}

/// Certified Grundy period of `Subtraction(S1) ⊙ R2`.
pub fn certify_compound_grundy(
    s1: &SubtractionSet,
    r2: &PeriodicTable<Nimber>,
) -> Result<PeriodCertificate, PeriodError> {
    let m = s1.max() as usize;
    let k = r2.period;
    let offset = r2.preperiod.saturating_sub(m);
    let bound = k.saturating_mul((s1.len() + 2).saturating_pow(m as u32));
    let (cert, _) = certify_period(m, k, offset, bound, |h, n| {
        compound_grundy_step(s1, r2.at(n), h, n)
    })?;
    Ok(cert)
}

/// Theoretical caps on period and preperiod: `k·2^M` for outcomes and
/// `k·(|S|+2)^M` for values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodBounds {
    pub outcome: u128,
    pub value: u128,
}

pub fn period_bounds(s1: &SubtractionSet, k: usize) -> PeriodBounds {
    let m = s1.max() as u32;
    PeriodBounds {
        outcome: (k as u128).saturating_mul(2u128.saturating_pow(m)),
        value: (k as u128).saturating_mul((s1.len() as u128 + 2).saturating_pow(m)),
    }
}

/// Closed-form period of `Subtraction({1..k1}) ⊙ Subtraction({1..k2})`:
/// `(k1+1)·a + 1` for the least `a ≥ 1` with `(k1+1)·a ≡ −1 (mod k2+1)`,
/// or `k1 + 1` if there is no such `a`.
pub fn predicted_period(k1: u64, k2: u64) -> u64 {
    let m = k2 + 1;
    (1..=m)
        .find(|&a| ((k1 + 1) * a + 1).is_multiple_of(m))
        .map_or(k1 + 1, |a| (k1 + 1) * a + 1)
}

/// Certified outcome period of `Subtraction({1..k1}) ⊙ Subtraction({1..k2})`.
pub fn certify_interval_compound(k1: u64, k2: u64) -> Result<PeriodCertificate, PeriodError> {
    let s1 = SubtractionSet::interval(k1).expect("k1 >= 1");
    let s2 = SubtractionSet::interval(k2).expect("k2 >= 1");
    let (_, r2) = certify_subtraction_outcomes(&s2, Convention::Normal)?;
    certify_compound_outcomes(&s1, &r2)
}

/// Best-effort period detection on a finite sample: least period `p` (then
/// least start) such that the tail from the start repeats with period `p`
/// and spans at least three periods. Used only to warn about second
/// rulesets that are not known to be periodic.
pub fn detect_period<T: PartialEq>(seq: &[T]) -> Option<(usize, usize)> {
    let len = seq.len();
    for p in 1..=len / 3 {
        let mut start = len - p;
        while start > 0 && seq[start - 1] == seq[start - 1 + p] {
            start -= 1;
        }
        if len - start >= 3 * p {
            return Some((start, p));
        }
    }
    None
}

/// Certificate for an octal game's Grundy sequence: if
/// `g(n + p) = g(n)` for `n0 ≤ n < 2·n0 + p + t` (`t` the largest number of
/// tokens removed), the sequence is periodic forever.
pub fn certify_octal_period(values: &[Nimber], max_take: usize) -> Option<PeriodCertificate> {
    let len = values.len();
    for p in 1..len {
        // least n0 such that the sample is p-periodic from n0 to its end
        let mut n0 = len - p;
        while n0 > 0 && values[n0 - 1] == values[n0 - 1 + p] {
            n0 -= 1;
        }
        if 2 * n0 + 2 * p + max_take <= len {
            return Some(PeriodCertificate {
                preperiod: n0,
                period: p,
                window: max_take,
                modulus: 1,
                state_repeat: (n0, p),
            });
        }
    }
    None
}

/// Solver for the plain subtraction game, exposed for cross-checks.
pub fn subtraction_solver(s: &SubtractionSet) -> Solver<Subtraction> {
    Solver::new(Subtraction(s.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::push::{Push, PushPosition};
    use Outcome::{N, P};

    fn interval(k: u64) -> SubtractionSet {
        SubtractionSet::interval(k).unwrap()
    }

    #[test]
    fn predicted_period_examples() {
        assert_eq!(predicted_period(2, 3), 4);
        assert_eq!(predicted_period(1, 1), 2);
        assert_eq!(predicted_period(1, 2), 3);
    }

    #[test]
    fn outcome_sequence_examples() {
        let one = interval(1);
        let mut r2 = subtraction_solver(&one);
        let r2o = heap_outcomes(&mut r2, 6, Convention::Normal).unwrap();
        assert_eq!(outcome_sequence(&one, &r2o), vec![N, P, N, P, N, P]);

        // Frozen from the brute-force push search below.
        let s1 = interval(2);
        let mut r2 = subtraction_solver(&interval(3));
        let r2o = heap_outcomes(&mut r2, 12, Convention::Normal).unwrap();
        assert_eq!(
            outcome_sequence(&s1, &r2o),
            vec![N, P, N, N, N, P, N, N, N, P, N, N]
        );
    }

    #[test]
    fn sequences_match_push_search() {
        for (s1, s2) in [
            (vec![1, 2], vec![1, 2, 3]),
            (vec![2, 5], vec![1, 3]),
            (vec![1], vec![1]),
        ] {
            let s1 = SubtractionSet::new(s1).unwrap();
            let s2 = SubtractionSet::new(s2).unwrap();
            let mut push = Solver::new(Push::new(Subtraction(s1.clone()), Subtraction(s2.clone())));
            let mut r2 = subtraction_solver(&s2);
            for conv in [Convention::Normal, Convention::Misere] {
                let r2o = heap_outcomes(&mut r2, 60, conv).unwrap();
                let seq = outcome_sequence(&s1, &r2o);
                for (n, &o) in seq.iter().enumerate() {
                    let p = PushPosition::before(HeapPosition::new(&[n as u64]));
                    assert_eq!(
                        push.outcome(&p, conv).unwrap(),
                        o,
                        "{s1} {s2} n={n} {conv:?}"
                    );
                }
            }
            let r2g = heap_grundy(&mut r2, 60).unwrap();
            let seq = grundy_sequence(&s1, &r2g);
            for (n, &g) in seq.iter().enumerate() {
                let p = PushPosition::before(HeapPosition::new(&[n as u64]));
                assert_eq!(push.grundy(&p).unwrap(), g);
            }
        }
    }

    #[test]
    fn grundy_zeroes_match_outcomes() {
        let s1 = SubtractionSet::new([1, 3, 4]).unwrap();
        let mut r2 = subtraction_solver(&SubtractionSet::new([2, 3]).unwrap());
        let r2o = heap_outcomes(&mut r2, 200, Convention::Normal).unwrap();
        let r2g = heap_grundy(&mut r2, 200).unwrap();
        let o = outcome_sequence(&s1, &r2o);
        let g = grundy_sequence(&s1, &r2g);
        assert!(o.iter().zip(&g).all(|(o, g)| o.is_p() == (g.0 == 0)));
        assert_eq!(g[0], Nimber(1));
    }

    #[test]
    fn self_push_values_are_shifted_by_star() {
        let one = interval(1);
        let mut r2 = subtraction_solver(&one);
        let r2g = heap_grundy(&mut r2, 40).unwrap();
        let g = grundy_sequence(&one, &r2g);
        for n in 0..40 {
            assert_eq!(g[n].0, r2g[n].0 ^ 1);
        }
    }

    #[test]
    fn certificate_examples() {
        let c = certify_interval_compound(1, 1).unwrap();
        assert_eq!((c.preperiod, c.period), (0, 2));
        let c = certify_interval_compound(2, 3).unwrap();
        assert_eq!((c.preperiod, c.period), (0, 4));
        let (c, _) = certify_period(1, 1, 0, 10, |_: &[u8], _| 7u8).unwrap();
        assert_eq!((c.preperiod, c.period), (0, 1));
    }

    #[test]
    fn certificate_with_preperiod() {
        // 5, 5, 5, then 1 2 3 repeating
        let (c, _) = certify_period(3, 1, 0, 1000, |h: &[u8], n| match n {
            0..=2 => 5,
            3 => 1,
            _ => {
                let last = h[n - 1];
                if last == 5 {
                    1
                } else {
                    last % 3 + 1
                }
            }
        })
        .unwrap();
        assert_eq!((c.preperiod, c.period), (3, 3));
    }

    #[test]
    fn horizon_is_enforced() {
        let err = certify_period(1, 1, 0, 5, |_: &[u32], n| n as u32).unwrap_err();
        assert_eq!(err, PeriodError::HorizonExceeded { bound: 5 });
    }

    #[test]
    fn interval_subtraction_base_case() {
        for k in 1..=10u64 {
            let mut s = subtraction_solver(&interval(k));
            for n in 0..100u64 {
                let p = HeapPosition::new(&[n]);
                assert_eq!(
                    s.outcome(&p, Convention::Normal).unwrap().is_p(),
                    n % (k + 1) == 0
                );
                assert_eq!(
                    s.outcome(&p, Convention::Misere).unwrap().is_p(),
                    n % (k + 1) == 1
                );
            }
        }
    }

    #[test]
    fn no_solution_case_equals_misere_first_ruleset() {
        for k1 in 1..=8u64 {
            for k2 in 1..=8u64 {
                let has_a = (1..=k2 + 1).any(|a| ((k1 + 1) * a + 1) % (k2 + 1) == 0);
                if has_a {
                    continue;
                }
                let mut r2 = subtraction_solver(&interval(k2));
                let r2o = heap_outcomes(&mut r2, 100, Convention::Normal).unwrap();
                let seq = outcome_sequence(&interval(k1), &r2o);
                for (n, o) in seq.iter().enumerate() {
                    assert_eq!(o.is_p(), n as u64 % (k1 + 1) == 1, "k1={k1} k2={k2} n={n}");
                }
            }
        }
    }

    #[test]
    fn detect_period_examples() {
        assert_eq!(detect_period(&[1, 2, 1, 2, 1, 2]), Some((0, 2)));
        assert_eq!(detect_period(&[9, 1, 1, 1, 1]), Some((1, 1)));
        assert_eq!(detect_period(&[1, 2, 3]), None);
    }
}
