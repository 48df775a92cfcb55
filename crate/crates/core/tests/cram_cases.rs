use std::time::Instant;

use gamelab::cram::{self, cram_closed_form, cram_outcome, GridBoard};
use gamelab::Outcome;

#[test]
fn closed_form_agrees_with_search_up_to_36_cells() {
    let mut checked = 0;
    for m in 1..=36u32 {
        for n in 1..=36 / m {
            let Some(expected) = cram_closed_form(m as u64, n as u64) else {
                continue;
            };
            let t = Instant::now();
            let mut s = cram::new_solver();
            let got = cram_outcome(&mut s, &GridBoard::empty(m, n).unwrap()).unwrap();
            eprintln!(
                "{m}x{n}: {got} in {:?}, {} entries",
                t.elapsed(),
                s.stats().entries
            );
            assert_eq!(got, expected, "{m}x{n}");
            checked += 1;
        }
    }
    assert!(checked > 50);
}

#[test]
fn open_cases_are_answered_by_search() {
    // odd rows, g007(cols) != 0, cols not 3 or 4: the closed form is silent
    let mut s = cram::new_solver();
    for (m, n) in [(5, 2), (5, 6), (7, 2)] {
        assert_eq!(cram_closed_form(m, n), None);
        let o = cram_outcome(&mut s, &GridBoard::empty(m as u32, n as u32).unwrap()).unwrap();
        assert!(matches!(o, Outcome::P | Outcome::N));
    }
}
