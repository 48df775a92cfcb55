//! Browser bindings for the static demo in `www/`.
//!
//! Three operations are exposed: the Zeruclid `(1, a, b)` Grundy heatmap, the
//! two-heap P-position tables of the push compounds, and a Push Cram explorer
//! that evaluates every move from a board. Results cross the boundary as flat
//! arrays or JSON strings so the page needs no bindings beyond `wasm-bindgen`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use gamelab::cram::{self, cram_closed_form, cram_outcome, CramSolver, GridBoard};
use gamelab::push::{p_positions_up_to, wythoff_pairs_up_to, Compound};
use gamelab::zeruclid::{self, grundy_heatmap};
use gamelab::Phase;

/// Largest board the explorer will search; bigger boards stall the page.
pub const CRAM_MAX_CELLS: u32 = 36;

/// Row-major Grundy values of `(1, a, b)` for `0 <= a, b <= max`.
#[wasm_bindgen]
pub fn zeruclid_heatmap(max: u32) -> Result<Vec<u32>, String> {
    let mut s = zeruclid::new_solver();
    let map = grundy_heatmap(&mut s, max as u64).map_err(|e| e.to_string())?;
    Ok(map.values().iter().map(|n| n.0).collect())
}

/// JSON object mapping each compound name, plus `wythoff`, to its
/// P-position pairs with both coordinates at most `max`.
#[wasm_bindgen]
pub fn p_position_tables(max: u32) -> Result<String, String> {
    let mut out = serde_json::Map::new();
    for c in Compound::ALL {
        let pairs = p_positions_up_to(c, max as u64).map_err(|e| e.to_string())?;
        out.insert(c.name().to_string(), json!(pairs));
    }
    let w = wythoff_pairs_up_to(max as u64).map_err(|e| e.to_string())?;
    out.insert("wythoff".into(), json!(w));
    Ok(Value::Object(out).to_string())
}

/// Push Cram explorer. Keeps one memo across calls so stepping through a
/// game stays fast.
#[wasm_bindgen]
pub struct CramExplorer {
    solver: CramSolver,
}

impl Default for CramExplorer {
    fn default() -> Self {
        Self::new()
    }
}

#[wasm_bindgen]
impl CramExplorer {
    #[wasm_bindgen(constructor)]
    pub fn new() -> CramExplorer {
        CramExplorer {
            solver: cram::new_solver(),
        }
    }

    /// Text of the empty `rows x cols` board.
    pub fn empty(&self, rows: u32, cols: u32) -> Result<String, String> {
        GridBoard::empty(rows, cols)
            .map(|b| b.to_string())
            .map_err(|e| e.to_string())
    }

    /// Analysis of a board given as `m n before|after hex`.
    ///
    /// The JSON carries the outcome, the closed-form verdict for empty
    /// boards, the value after the button, the cells as a row-major string
    /// (`#` covered) and every legal move with its resulting board.
    pub fn analyze(&mut self, board: &str) -> Result<String, String> {
        let b: GridBoard = board.parse().map_err(|e: cram::CramError| e.to_string())?;
        if b.rows() * b.cols() > CRAM_MAX_CELLS {
            return Err(format!("boards are limited to {CRAM_MAX_CELLS} cells here"));
        }
        analyze(&mut self.solver, &b).map(|v| v.to_string())
    }
}

fn analyze(s: &mut CramSolver, b: &GridBoard) -> Result<Value, String> {
    let outcome = cram_outcome(s, b).map_err(|e| e.to_string())?;
    let closed = (b.occupancy() == 0 && b.phase == Phase::BeforeButton)
        .then(|| cram_closed_form(b.rows() as u64, b.cols() as u64))
        .flatten();
    let mut moves = Vec::new();
    for child in b.legal_moves() {
        let o = cram_outcome(s, &child).map_err(|e| e.to_string())?;
        let (kind, cells) = if child.phase != b.phase {
            ("button", Vec::new())
        } else {
            let cells = covered_difference(b, &child);
            let kind = if cells.len() == 2 && cells[0][1] == cells[1][1] {
                "vertical"
            } else {
                "horizontal"
            };
            (kind, cells)
        };
        moves.push(json!({
            "kind": kind,
            "cells": cells,
            "board": child.to_string(),
            "winning": o.is_p(),
        }));
    }
    Ok(json!({
        "board": b.to_string(),
        "rows": b.rows(),
        "cols": b.cols(),
        "phase": if b.phase == Phase::BeforeButton { "before" } else { "after" },
        "cells": cell_string(b),
        "outcome": outcome,
        "closed_form": closed,
        "post_button_value": b.post_button_value().0,
        "moves": moves,
    }))
}

fn cell_string(b: &GridBoard) -> String {
    (0..b.rows())
        .flat_map(|r| (0..b.cols()).map(move |c| (r, c)))
        .map(|(r, c)| if b.is_covered(r, c) { '#' } else { '.' })
        .collect()
}

fn covered_difference(before: &GridBoard, after: &GridBoard) -> Vec<[u32; 2]> {
    (0..before.rows())
        .flat_map(|r| (0..before.cols()).map(move |c| (r, c)))
        .filter(|&(r, c)| after.is_covered(r, c) && !before.is_covered(r, c))
        .map(|(r, c)| [r, c])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heatmap_is_square_with_known_corner() {
        let v = zeruclid_heatmap(10).unwrap();
        assert_eq!(v.len(), 121);
        // (1, 0, 0) has value 1 and (1, 1, 0) is (1, 1): value 0.
        assert_eq!(v[0], 1);
        assert_eq!(v[11], 0);
        assert!(zeruclid_heatmap(0).is_err());
    }

    #[test]
    fn tables_include_every_compound() {
        let t: Value = serde_json::from_str(&p_position_tables(28).unwrap()).unwrap();
        assert_eq!(t["nim-euclid"][4], json!([7, 12]));
        assert_eq!(t["wythoff"][8], json!([12, 20]));
        assert_eq!(t.as_object().unwrap().len(), 5);
    }

    #[test]
    fn explorer_marks_winning_moves() {
        let mut x = CramExplorer::new();
        let board = x.empty(3, 3).unwrap();
        let a: Value = serde_json::from_str(&x.analyze(&board).unwrap()).unwrap();
        assert_eq!(a["outcome"], "N");
        assert_eq!(a["cells"], ".........");
        let moves = a["moves"].as_array().unwrap();
        assert_eq!(moves[0]["kind"], "button");
        assert_eq!(moves[0]["winning"], false);
        assert!(moves[1..]
            .iter()
            .all(|m| m["winning"] == true && m["kind"] == "vertical"));

        let after: Value = serde_json::from_str(&x.analyze("3 3 after 0").unwrap()).unwrap();
        assert!(after["moves"]
            .as_array()
            .unwrap()
            .iter()
            .all(|m| m["kind"] == "horizontal"));
        assert_eq!(after["closed_form"], Value::Null);
    }

    #[test]
    fn explorer_rejects_bad_input() {
        let mut x = CramExplorer::new();
        assert!(x.analyze("3 3 sideways 0").is_err());
        assert!(x.analyze("8 8 before 0").is_err());
    }
}
