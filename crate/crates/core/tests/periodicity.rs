use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use gamelab::periodicity::{
    certify_compound_grundy, certify_compound_outcomes, certify_interval_compound,
    certify_subtraction_grundy, certify_subtraction_outcomes, grundy_sequence, outcome_sequence,
    period_bounds, predicted_period,
};
use gamelab::{Convention, SubtractionSet};

#[test]
fn interval_compounds_match_the_formula() {
    for k1 in 1..=8 {
        for k2 in 1..=8 {
            let c = certify_interval_compound(k1, k2).unwrap();
            assert_eq!(c.preperiod, 0, "k1={k1} k2={k2}");
            assert_eq!(c.period as u64, predicted_period(k1, k2), "k1={k1} k2={k2}");
        }
    }
}

/// Brute-force period of a long sample with no knowledge of the state
/// machine, used to cross-check certificates.
fn sample_period<T: PartialEq>(seq: &[T], pre: usize) -> usize {
    (1..seq.len())
        .find(|&p| (pre..seq.len() - p).all(|i| seq[i] == seq[i + p]))
        .unwrap()
}

fn random_set(rng: &mut StdRng) -> SubtractionSet {
    let max = rng.gen_range(1..=6u64);
    let mut v: Vec<u64> = (1..max).filter(|_| rng.gen_bool(0.5)).collect();
    v.push(max);
    SubtractionSet::new(v).unwrap()
}

#[test]
fn random_compounds_respect_the_bounds() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut done = 0;
    while done < 50 {
        let s1 = random_set(&mut rng);
        let s2 = random_set(&mut rng);
        let (c2, r2) = certify_subtraction_outcomes(&s2, Convention::Normal).unwrap();
        let (g2, r2g) = certify_subtraction_grundy(&s2).unwrap();
        // the bound theorems assume R2 is purely periodic
        if c2.preperiod != 0 || g2.preperiod != 0 {
            continue;
        }
        let oc = certify_compound_outcomes(&s1, &r2).unwrap();
        let ob = period_bounds(&s1, c2.period);
        assert!(oc.period as u128 <= ob.outcome && oc.preperiod as u128 <= ob.outcome);
        let gc = certify_compound_grundy(&s1, &r2g).unwrap();
        let gb = period_bounds(&s1, g2.period);
        assert!(gc.period as u128 <= gb.value && gc.preperiod as u128 <= gb.value);

        // certificates agree with a long direct computation
        let len = 4 * (oc.preperiod + oc.period).max(gc.preperiod + gc.period) + 200;
        let seq = outcome_sequence(&s1, &(0..len).map(|n| r2.at(n)).collect::<Vec<_>>());
        assert_eq!(sample_period(&seq, oc.preperiod), oc.period, "{s1} {s2}");
        let gseq = grundy_sequence(&s1, &(0..len).map(|n| r2g.at(n)).collect::<Vec<_>>());
        assert_eq!(sample_period(&gseq, gc.preperiod), gc.period, "{s1} {s2}");
        done += 1;
    }
}

#[test]
fn misere_second_ruleset_is_certified_too() {
    let s1 = SubtractionSet::interval(2).unwrap();
    let s2 = SubtractionSet::interval(3).unwrap();
    let (_, r2) = certify_subtraction_outcomes(&s2, Convention::Misere).unwrap();
    let c = certify_compound_outcomes(&s1, &r2).unwrap();
    let len = 200;
    let seq = outcome_sequence(&s1, &(0..len).map(|n| r2.at(n)).collect::<Vec<_>>());
    assert_eq!(sample_period(&seq, c.preperiod), c.period);
}
