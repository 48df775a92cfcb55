//! Exhaustive verification suites. Each suite cross-checks a closed form or
//! a structural claim against search and lists every counterexample.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::arith::{ceil_phi, u_seq};
use crate::cram::{
    self, bluff_check, cram_closed_form, cram_outcome, vertical_reachable, GridBoard,
    HorizontalCram,
};
use crate::engine::{Convention, Outcome, Ruleset, Solver};
use crate::heap::{HeapPosition, Nim, Subtraction, SubtractionSet};
use crate::periodicity::{
    certify_compound_grundy, certify_compound_outcomes, certify_interval_compound,
    certify_subtraction_grundy, certify_subtraction_outcomes, heap_outcomes, outcome_sequence,
    period_bounds, predicted_period, subtraction_solver,
};
use crate::push::{
    nim_euclid_fib_classify, nim_euclid_recurrence, nim_euclid_set_form, push_p_oracle,
    wythoff_pairs_up_to, Compound, FibClass, Push, PushPosition,
};
use crate::zeruclid::{self, zeruclid_bound_check, zeruclid_residue_survey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    PushLemma,
    PushCharacterization,
    NimEuclidTriple,
    ZeruclidBounds,
    ZeruclidResidues,
    SubtractionPeriods,
    CramPropositions,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::PushLemma,
        Suite::PushCharacterization,
        Suite::NimEuclidTriple,
        Suite::ZeruclidBounds,
        Suite::ZeruclidResidues,
        Suite::SubtractionPeriods,
        Suite::CramPropositions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::PushLemma => "push-lemma",
            Suite::PushCharacterization => "push-characterization",
            Suite::NimEuclidTriple => "nim-euclid-triple",
            Suite::ZeruclidBounds => "zeruclid-bounds",
            Suite::ZeruclidResidues => "zeruclid-residues",
            Suite::SubtractionPeriods => "subtraction-periods",
            Suite::CramPropositions => "cram-propositions",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Domain sizes for the suites. The defaults are the ranges the project
/// commits to checking.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteParams {
    pub lemma_nim_max: u64,
    pub lemma_subtraction_max: u64,
    pub characterization_max: u64,
    pub oracle_max: u64,
    pub triple_max: u64,
    pub triple_search_max: u64,
    pub correspondence_max: u64,
    pub bound_max: u64,
    pub residue_max: u64,
    pub interval_max: u64,
    pub random_instances: usize,
    pub random_max_element: u64,
    pub seed: u64,
    pub post_button_cells: u32,
    pub conjecture_k: u32,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            lemma_nim_max: 15,
            lemma_subtraction_max: 30,
            characterization_max: 30,
            oracle_max: 40,
            triple_max: 10_000,
            triple_search_max: 40,
            correspondence_max: 30,
            bound_max: 25,
            residue_max: 15,
            interval_max: 8,
            random_instances: 50,
            random_max_element: 6,
            seed: 2024,
            post_button_cells: 16,
            conjecture_k: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: u64,
    pub counterexamples: Vec<String>,
    /// Observations that are reported but are not claims under test.
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        SuiteReport {
            suite,
            checks: 0,
            counterexamples: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.counterexamples.push(what());
        }
    }

    fn error(&mut self, what: String) {
        self.checks += 1;
        self.counterexamples.push(what);
    }
}

pub fn run(suite: Suite, params: &SuiteParams) -> SuiteReport {
    let mut r = SuiteReport::new(suite);
    match suite {
        Suite::PushLemma => push_lemma(&mut r, params),
        Suite::PushCharacterization => push_characterization(&mut r, params),
        Suite::NimEuclidTriple => nim_euclid_triple(&mut r, params),
        Suite::ZeruclidBounds => zeruclid_bounds(&mut r, params),
        Suite::ZeruclidResidues => zeruclid_residues(&mut r, params),
        Suite::SubtractionPeriods => subtraction_periods(&mut r, params),
        Suite::CramPropositions => cram_propositions(&mut r, params),
    }
    r
}

fn hp(a: u64, b: u64) -> HeapPosition {
    HeapPosition::new(&[a, b])
}

/// `R ⊙ R` at `g` has the outcome of `g + ∗`.
fn push_lemma(r: &mut SuiteReport, p: &SuiteParams) {
    let mut push = Solver::new(Push::new(Nim, Nim));
    let mut nim = Solver::new(Nim);
    for a in 0..=p.lemma_nim_max {
        for b in 0..=p.lemma_nim_max {
            let lhs = push.outcome(&PushPosition::before(hp(a, b)), Convention::Normal);
            let rhs = nim.outcome(&HeapPosition::new(&[a, b, 1]), Convention::Normal);
            r.check(lhs.is_ok() && lhs == rhs, || {
                format!("nim ({a},{b}): {lhs:?} vs {rhs:?}")
            });
        }
    }
    let s = SubtractionSet::interval(2).expect("non-empty");
    let mut push = Solver::new(Push::new(Subtraction(s.clone()), Subtraction(s.clone())));
    let mut sub = Solver::new(Subtraction(s));
    for n in 0..=p.lemma_subtraction_max {
        let h = HeapPosition::new(&[n]);
        let lhs = push.outcome(&PushPosition::before(h.clone()), Convention::Normal);
        // g + ∗ is P iff G(g) xor 1 = 0
        let rhs = sub.grundy(&h).map(|g| Outcome::from_is_p(g.0 ^ 1 == 0));
        r.check(lhs.is_ok() && lhs == rhs, || {
            format!("subtraction{{1,2}} {n}: {lhs:?} vs {rhs:?}")
        });
    }
}

fn push_characterization(r: &mut SuiteReport, p: &SuiteParams) {
    for compound in Compound::ALL {
        let rules = compound.ruleset();
        let mut push = Solver::new(rules.clone());
        let mut second = Solver::new(rules.second.clone());
        let max = p.characterization_max.max(p.oracle_max);
        for a in 0..=max {
            for b in 0..=max {
                let g = hp(a, b);
                let here = match push.outcome(&PushPosition::before(g.clone()), Convention::Normal)
                {
                    Ok(o) => o,
                    Err(e) => return r.error(format!("{compound} ({a},{b}): {e}")),
                };
                if a <= p.oracle_max && b <= p.oracle_max {
                    let oracle = push_p_oracle(compound, a, b);
                    r.check(oracle.as_ref() == Ok(&here), || {
                        format!("{compound} ({a},{b}): oracle {oracle:?}, search {here}")
                    });
                }
                if a > p.characterization_max || b > p.characterization_max {
                    continue;
                }
                let after = second.outcome(&g, Convention::Normal);
                let options_n = rules.first.options(&g).into_iter().all(|o| {
                    push.outcome(&PushPosition::before(o), Convention::Normal) == Ok(Outcome::N)
                });
                let expect_p = after == Ok(Outcome::N) && options_n;
                r.check(here.is_p() == expect_p, || {
                    format!(
                        "{compound} ({a},{b}): P={} but rule gives {expect_p}",
                        here.is_p()
                    )
                });
                if after == Ok(Outcome::P) {
                    r.check(here == Outcome::N, || {
                        format!("{compound} ({a},{b}): button wins yet position is P")
                    });
                }
            }
        }
    }
}

/// Map from each integer to its (set, partner) under one characterization.
type Classes = BTreeMap<u64, (bool, u64)>;

fn classes_from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>, max: u64) -> Classes {
    let mut m = Classes::new();
    for (a, b) in pairs {
        if a <= max {
            m.insert(a, (true, b));
        }
        if b <= max {
            m.insert(b, (false, a));
        }
    }
    m
}

fn nim_euclid_triple(r: &mut SuiteReport, p: &SuiteParams) {
    let max = p.triple_max;
    // Set form: candidates are Wythoff pairs plus the added u-pairs; keep the
    // members. Complementarity means every integer shows up exactly once.
    let set_form = (|| {
        let mut cand = wythoff_pairs_up_to(3 * max + 3)?;
        for n in 0.. {
            let (x, y) = (u_seq(2 * n + 1)?, u_seq(2 * n + 2)?);
            if x > max {
                break;
            }
            cand.push((x, y));
        }
        let mut kept = Vec::new();
        for (a, b) in cand {
            if nim_euclid_set_form(a, b)? {
                kept.push((a, b));
            }
        }
        Ok::<_, crate::arith::ArithError>(classes_from_pairs(kept, max))
    })();
    let recurrence = nim_euclid_recurrence(max as usize + 2)
        .map(|t| classes_from_pairs(t.pairs().iter().copied(), max));
    let fib = (0..=max)
        .map(|x| {
            nim_euclid_fib_classify(x).map(|c| match c {
                FibClass::A { partner } => (x, (true, partner)),
                FibClass::B { partner } => (x, (false, partner)),
            })
        })
        .collect::<Result<Classes, _>>();
    let (set_form, recurrence, fib) = match (set_form, recurrence, fib) {
        (Ok(s), Ok(t), Ok(f)) => (s, t, f),
        (s, t, f) => {
            return r.error(format!(
                "arithmetic error: {:?}",
                (s.err(), t.err(), f.err())
            ))
        }
    };
    for x in 0..=max {
        let (s, t, f) = (set_form.get(&x), recurrence.get(&x), fib.get(&x));
        r.check(s.is_some() && s == t && t == f, || {
            format!("{x}: set form {s:?}, recurrence {t:?}, fibonacci {f:?}")
        });
    }
    // each characterization against search
    let mut push = Solver::new(Compound::NimEuclid.ruleset());
    let m = p.triple_search_max;
    for a in 0..=m {
        for b in a..=m {
            let Ok(here) = push.outcome(&PushPosition::before(hp(a, b)), Convention::Normal) else {
                return r.error(format!("search failed at ({a},{b})"));
            };
            let is_p = here.is_p();
            let views = [
                ("set form", set_form.get(&a) == Some(&(true, b))),
                ("recurrence", recurrence.get(&a) == Some(&(true, b))),
                ("fibonacci", fib.get(&a) == Some(&(true, b))),
            ];
            for (name, v) in views {
                r.check(v == is_p, || {
                    format!("({a},{b}): {name} says {v}, search says P={is_p}")
                });
            }
        }
    }
}

fn zeruclid_bounds(r: &mut SuiteReport, p: &SuiteParams) {
    let mut z = zeruclid::new_solver();
    // Zeruclid(1,a,b) against Nim ⊙ Euclid
    let mut push = Solver::new(Compound::NimEuclid.ruleset());
    for a in 0..=p.correspondence_max {
        for b in 0..=p.correspondence_max {
            let zp = z.outcome(
                &z.ruleset().normalize(&HeapPosition::new(&[1, a, b])),
                Convention::Normal,
            );
            let pp = push.outcome(&PushPosition::before(hp(a, b)), Convention::Normal);
            r.check(zp.is_ok() && zp == pp, || {
                format!("(1,{a},{b}): zeruclid {zp:?}, push {pp:?}")
            });
        }
    }
    for b in 1..=p.bound_max {
        for a in 1..=b {
            // look well past the window's upper end
            let c_max = match ceil_phi(b) {
                Ok(c) => c + b + a,
                Err(e) => return r.error(e.to_string()),
            };
            match zeruclid_bound_check(&mut z, a, b, c_max) {
                Ok(rep) => r.check(rep.violations.is_empty(), || {
                    format!(
                        "({a},{b}): P at c = {:?} outside the window",
                        rep.violations
                    )
                }),
                Err(e) => r.error(format!("({a},{b}): {e}")),
            }
        }
    }
}

fn zeruclid_residues(r: &mut SuiteReport, p: &SuiteParams) {
    let mut z = zeruclid::new_solver();
    for b in 1..=p.residue_max {
        for a in 1..=b {
            match zeruclid_residue_survey(&mut z, a, b) {
                Ok(s) => r.check(s.holds(), || format!("({a},{b}): hits {:?}", s.hits)),
                Err(e) => r.error(format!("({a},{b}): {e}")),
            }
        }
    }
}

fn random_set(rng: &mut StdRng, max_element: u64) -> SubtractionSet {
    let max = rng.gen_range(1..=max_element);
    let mut v: Vec<u64> = (1..max).filter(|_| rng.gen_bool(0.5)).collect();
    v.push(max);
    SubtractionSet::new(v).expect("contains max >= 1")
}

fn subtraction_periods(r: &mut SuiteReport, p: &SuiteParams) {
    for k1 in 1..=p.interval_max {
        for k2 in 1..=p.interval_max {
            let predicted = predicted_period(k1, k2);
            match certify_interval_compound(k1, k2) {
                Ok(c) => r.check(c.preperiod == 0 && c.period as u64 == predicted, || {
                    format!(
                        "({k1},{k2}): certified ({},{}), predicted period {predicted}",
                        c.preperiod, c.period
                    )
                }),
                Err(e) => r.error(format!("({k1},{k2}): {e}")),
            }
            // without a solution to the congruence, P-positions are those of
            // misère Subtraction({1..k1})
            if !(1..=k2 + 1).any(|a| ((k1 + 1) * a + 1) % (k2 + 1) == 0) {
                let s1 = SubtractionSet::interval(k1).expect("k1 >= 1");
                let mut r2 = subtraction_solver(&SubtractionSet::interval(k2).expect("k2 >= 1"));
                let len = 4 * (k1 + 1) as usize * (k2 + 1) as usize;
                match heap_outcomes(&mut r2, len, Convention::Normal) {
                    Ok(t) => {
                        let seq = outcome_sequence(&s1, &t);
                        let ok = seq
                            .iter()
                            .enumerate()
                            .all(|(n, o)| o.is_p() == (n as u64 % (k1 + 1) == 1));
                        r.check(ok, || format!("({k1},{k2}): not the misère pattern"));
                    }
                    Err(e) => r.error(e.to_string()),
                }
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(p.seed);
    let mut done = 0;
    let mut redrawn = 0;
    while done < p.random_instances {
        let s1 = random_set(&mut rng, p.random_max_element);
        let s2 = random_set(&mut rng, p.random_max_element);
        let (Ok((c2, r2)), Ok((g2, r2g))) = (
            certify_subtraction_outcomes(&s2, Convention::Normal),
            certify_subtraction_grundy(&s2),
        ) else {
            return r.error(format!("could not certify {s2}"));
        };
        // the bounds are stated for purely periodic R2
        if c2.preperiod != 0 || g2.preperiod != 0 {
            redrawn += 1;
            continue;
        }
        done += 1;
        match certify_compound_outcomes(&s1, &r2) {
            Ok(c) => {
                let bound = period_bounds(&s1, c2.period).outcome;
                r.check(
                    c.period as u128 <= bound && c.preperiod as u128 <= bound,
                    || {
                        format!(
                            "{{{s1}}}⊙{{{s2}}} outcomes ({},{}) exceed {bound}",
                            c.preperiod, c.period
                        )
                    },
                );
            }
            Err(e) => r.error(format!("{{{s1}}}⊙{{{s2}}}: {e}")),
        }
        match certify_compound_grundy(&s1, &r2g) {
            Ok(c) => {
                let bound = period_bounds(&s1, g2.period).value;
                r.check(
                    c.period as u128 <= bound && c.preperiod as u128 <= bound,
                    || {
                        format!(
                            "{{{s1}}}⊙{{{s2}}} values ({},{}) exceed {bound}",
                            c.preperiod, c.period
                        )
                    },
                );
            }
            Err(e) => r.error(format!("{{{s1}}}⊙{{{s2}}}: {e}")),
        }
    }
    r.notes.push(format!(
        "{done} random instances (seed {}), {redrawn} redrawn because the second game had a preperiod",
        p.seed
    ));
}

/// Boards on which each closed-form case is checked against search.
pub fn proposition_boards() -> Vec<(u32, u32)> {
    let mut v = Vec::new();
    v.extend((1..=8).map(|n| (2, n)));
    v.extend((1..=4).map(|k| (3, 2 * k)));
    v.extend((1..=9).map(|m| (m, 3)));
    v.extend((0..=3).map(|k| (2 * k + 1, 4)));
    v.sort_unstable();
    v.dedup();
    v
}

fn cram_propositions(r: &mut SuiteReport, p: &SuiteParams) {
    let mut s = cram::new_solver();
    for (m, n) in proposition_boards() {
        let expected = cram_closed_form(m as u64, n as u64);
        let got = GridBoard::empty(m, n)
            .map_err(|e| e.to_string())
            .and_then(|b| cram_outcome(&mut s, &b).map_err(|e| e.to_string()));
        r.check(
            expected.is_some() && got.as_ref().ok() == expected.as_ref(),
            || format!("{m}x{n}: closed form {expected:?}, search {got:?}"),
        );
    }
    let mut h = Solver::new(HorizontalCram);
    for m in 1..=p.post_button_cells {
        for n in 1..=p.post_button_cells / m {
            let boards = match vertical_reachable(m, n) {
                Ok(b) => b,
                Err(e) => return r.error(e.to_string()),
            };
            for b in boards {
                let g = h.grundy(&b);
                r.check(g == Ok(b.post_button_value()), || {
                    format!(
                        "{b}: search {g:?}, run decomposition {}",
                        b.post_button_value()
                    )
                });
            }
        }
    }
    // The conjecture on 3 x (2k+1) is reported, not asserted.
    for k in 0..=p.conjecture_k {
        let n = 2 * k + 1;
        match bluff_check(&mut s, 3, n) {
            Ok(b) => r.notes.push(format!(
                "3x{n}: outcome {}, bluff {}, bluff over domino openings {}, {} of {} openings lose",
                b.outcome,
                b.bluff,
                b.bluff_without_button,
                b.losing_moves.len(),
                b.moves
            )),
            Err(e) => r.notes.push(format!("3x{n}: {e}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteParams {
        SuiteParams {
            lemma_nim_max: 6,
            lemma_subtraction_max: 12,
            characterization_max: 10,
            oracle_max: 12,
            triple_max: 500,
            triple_search_max: 12,
            correspondence_max: 10,
            bound_max: 6,
            residue_max: 5,
            interval_max: 4,
            random_instances: 5,
            random_max_element: 4,
            seed: 7,
            post_button_cells: 8,
            conjecture_k: 1,
        }
    }

    #[test]
    fn suites_pass_on_small_domains() {
        let p = small();
        for suite in Suite::ALL {
            let r = run(suite, &p);
            assert!(r.passed(), "{suite}: {:?}", r.counterexamples);
            assert!(r.checks > 0, "{suite}");
        }
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>(), Ok(s));
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn proposition_boards_cover_each_case() {
        let b = proposition_boards();
        for needed in [(2, 8), (3, 8), (9, 3), (7, 4), (1, 4)] {
            assert!(b.contains(&needed));
        }
    }
}
