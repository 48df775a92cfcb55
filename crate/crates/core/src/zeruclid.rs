//! Checks for the three-heap Zeruclid results: the window `⌈Φb⌉ ≤ c ≤ ⌈Φb⌉ + a − 1`
//! for sorted P-positions, the one-P-position-per-residue-class property,
//! and the Grundy heatmap of `(1, a, b)`.

use serde::Serialize;
use thiserror::Error;

use crate::arith::{ceil_phi, ArithError};
use crate::engine::{Convention, Nimber, SolveError, Solver};
use crate::heap::{HeapPosition, Zeruclid};

/// Largest heatmap side accepted by [`grundy_heatmap`].
pub const HEATMAP_MAX: u64 = 400;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZeruclidError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

pub type ZeruclidSolver = Solver<Zeruclid>;

/// Solver over sorted triples.
pub fn new_solver() -> ZeruclidSolver {
    Solver::new(Zeruclid::canonical())
}

fn is_p(solver: &mut ZeruclidSolver, heaps: [u64; 3]) -> Result<bool, SolveError> {
    let p = solver.ruleset().normalize(&HeapPosition::new(&heaps));
    Ok(solver.outcome(&p, Convention::Normal)?.is_p())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub a: u64,
    pub b: u64,
    /// Every `c` in `[b, c_max]` with `(a, b, c)` a P-position.
    pub p_positions: Vec<u64>,
    /// Those P-positions outside `[⌈Φb⌉, ⌈Φb⌉ + a − 1]`.
    pub violations: Vec<u64>,
}

pub fn zeruclid_bound_check(
    solver: &mut ZeruclidSolver,
    a: u64,
    b: u64,
    c_max: u64,
) -> Result<BoundReport, ZeruclidError> {
    if a == 0 || a > b {
        return Err(ZeruclidError::Precondition(format!(
            "need 0 < a <= b, got a={a} b={b}"
        )));
    }
    let lo = ceil_phi(b)?;
    let hi = lo + a - 1;
    if c_max < lo + a {
        return Err(ZeruclidError::Precondition(format!(
            "c_max={c_max} must be at least {}",
            lo + a
        )));
    }
    let mut p_positions = Vec::new();
    for c in b..=c_max {
        if is_p(solver, [a, b, c])? {
            p_positions.push(c);
        }
    }
    let violations = p_positions
        .iter()
        .copied()
        .filter(|&c| c < lo || c > hi)
        .collect();
    Ok(BoundReport {
        a,
        b,
        p_positions,
        violations,
    })
}

/// All `c ≥ 0` with `(a, b, c)` a P-position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueSurvey {
    pub a: u64,
    pub b: u64,
    /// `(c, c mod a)` for every hit, in increasing `c`.
    pub hits: Vec<(u64, u64)>,
    /// Hits with `c ≥ b`, where the sorted-triple window applies.
    pub sorted_band: Vec<u64>,
    /// Hits with `c < b`.
    pub below_b: Vec<u64>,
}

impl ResidueSurvey {
    /// Exactly `a` hits, pairwise distinct modulo `a`.
    pub fn holds(&self) -> bool {
        let mut residues: Vec<u64> = self.hits.iter().map(|&(_, r)| r).collect();
        residues.sort_unstable();
        residues.dedup();
        self.hits.len() as u64 == self.a && residues.len() as u64 == self.a
    }
}

/// Scans `c ∈ [0, ⌈Φb⌉ + b]`. Any sorted P-position has its largest heap at
/// most `⌈Φ·middle⌉ + smallest − 1`, so nothing beyond that range can hit.
pub fn zeruclid_residue_survey(
    solver: &mut ZeruclidSolver,
    a: u64,
    b: u64,
) -> Result<ResidueSurvey, ZeruclidError> {
    if a == 0 || a > b {
        return Err(ZeruclidError::Precondition(format!(
            "need 0 < a <= b, got a={a} b={b}"
        )));
    }
    let top = ceil_phi(b)? + b;
    let mut hits = Vec::new();
    for c in 0..=top {
        if is_p(solver, [a, b, c])? {
            hits.push((c, c % a));
        }
    }
    let sorted_band = hits.iter().map(|&(c, _)| c).filter(|&c| c >= b).collect();
    let below_b = hits.iter().map(|&(c, _)| c).filter(|&c| c < b).collect();
    Ok(ResidueSurvey {
        a,
        b,
        hits,
        sorted_band,
        below_b,
    })
}

/// Grundy values of `(1, a, b)` for `0 ≤ a, b ≤ max_coord`, indexed `[a][b]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Heatmap {
    pub size: usize,
    values: Vec<Nimber>,
}

impl Heatmap {
    pub fn get(&self, a: usize, b: usize) -> Nimber {
        self.values[a * self.size + b]
    }

    pub fn row(&self, a: usize) -> &[Nimber] {
        &self.values[a * self.size..(a + 1) * self.size]
    }

    pub fn values(&self) -> &[Nimber] {
        &self.values
    }

    pub fn from_rows(rows: Vec<Vec<Nimber>>) -> Heatmap {
        let size = rows.len();
        Heatmap {
            size,
            values: rows.into_iter().flatten().collect(),
        }
    }

    /// CSV with header `a\b,0,1,...` and one row per `a`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("a\\b");
        for b in 0..self.size {
            out.push_str(&format!(",{b}"));
        }
        out.push('\n');
        for a in 0..self.size {
            out.push_str(&a.to_string());
            for v in self.row(a) {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn heatmap_row(
    solver: &mut ZeruclidSolver,
    a: u64,
    max_coord: u64,
) -> Result<Vec<Nimber>, SolveError> {
    (0..=max_coord)
        .map(|b| {
            let p = solver.ruleset().normalize(&HeapPosition::new(&[1, a, b]));
            solver.grundy(&p)
        })
        .collect()
}

pub fn grundy_heatmap(
    solver: &mut ZeruclidSolver,
    max_coord: u64,
) -> Result<Heatmap, ZeruclidError> {
    if max_coord == 0 || max_coord > HEATMAP_MAX {
        return Err(ZeruclidError::Precondition(format!(
            "max_coord must be in 1..={HEATMAP_MAX}, got {max_coord}"
        )));
    }
    let rows = (0..=max_coord)
        .map(|a| heatmap_row(solver, a, max_coord))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Heatmap::from_rows(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::push::{push_p_oracle, Compound};

    #[test]
    fn bound_check_examples() {
        let mut s = new_solver();
        let r = zeruclid_bound_check(&mut s, 1, 2, 6).unwrap();
        assert_eq!(r.p_positions, vec![4]);
        assert!(r.violations.is_empty());
        // (1,1,2) is the N-position (1,2) of Nim ⊙ Euclid; the only hit for
        // (1,1,c) is c = 0, outside the sorted band.
        let r = zeruclid_bound_check(&mut s, 1, 1, 4).unwrap();
        assert!(r.p_positions.is_empty());
        assert_eq!(
            zeruclid_residue_survey(&mut s, 1, 1).unwrap().hits,
            vec![(0, 0)]
        );
        assert!(r.violations.is_empty());
        let r = zeruclid_bound_check(&mut s, 2, 3, 10).unwrap();
        assert!(r.violations.is_empty());
        assert!(zeruclid_bound_check(&mut s, 3, 2, 10).is_err());
        assert!(zeruclid_bound_check(&mut s, 1, 2, 4).is_err());
    }

    #[test]
    fn residue_examples() {
        let mut s = new_solver();
        let r = zeruclid_residue_survey(&mut s, 1, 2).unwrap();
        assert_eq!(r.hits, vec![(4, 0)]);
        assert!(r.holds());
        let r = zeruclid_residue_survey(&mut s, 2, 2).unwrap();
        assert_eq!(r.hits.len(), 2);
        assert!(r.holds());
        let r = zeruclid_residue_survey(&mut s, 2, 3).unwrap();
        assert_eq!(r.hits.len(), 2);
        assert!(r.holds());
    }

    #[test]
    fn heatmap_examples_and_zero_set() {
        let mut s = new_solver();
        let h = grundy_heatmap(&mut s, 40).unwrap();
        assert_eq!(h.get(0, 0), Nimber(1));
        assert_eq!(h.get(2, 4), Nimber(0));
        assert_ne!(h.get(1, 2), Nimber(0));
        for a in 0..=40 {
            for b in 0..=40 {
                let zero = h.get(a as usize, b as usize) == Nimber(0);
                assert_eq!(
                    zero,
                    push_p_oracle(Compound::NimEuclid, a, b).unwrap().is_p()
                );
            }
        }
        assert!(h.to_csv().starts_with("a\\b,0,1,2"));
        assert!(grundy_heatmap(&mut s, HEATMAP_MAX + 1).is_err());
    }
}
