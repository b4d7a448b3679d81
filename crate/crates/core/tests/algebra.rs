//! The coarse composition table against independent oracles.

use num_rational::Ratio;
use proptest::prelude::*;
use rand::Rng;

use tdtree::inference::allen::{allen_compose, AllenRelation, AllenSet};
use tdtree::inference::{compare_intervals, compose, compose_sets, CoarseRelation, RelationSet};
use tdtree::{Interval, RationalInterval};
use tdtree_testkit::rng;

const SYMBOLS: [&str; 13] = ["b", "m", "o", "s", "d", "f", "=", "fi", "di", "si", "oi", "mi", "bi"];

/// Allen's composition table, transcribed by hand. Row `r1`, column `r2`
/// lists the relations of A to C given `A r1 B` and `B r2 C`.
const ALLEN_TABLE: [[&str; 13]; 13] = [
    // b
    ["b", "b", "b", "b", "b m o s d", "b m o s d", "b", "b", "b", "b", "b m o s d", "b m o s d", "*"],
    // m
    ["b", "b", "b", "m", "o s d", "o s d", "m", "b", "b", "m", "o s d", "f fi =", "di si oi mi bi"],
    // o
    [
        "b",
        "b",
        "b m o",
        "o",
        "o s d",
        "o s d",
        "o",
        "b m o",
        "b m o fi di",
        "o fi di",
        "o s d f = fi di si oi",
        "oi di si",
        "di si oi mi bi",
    ],
    // s
    ["b", "b", "b m o", "s", "d", "d", "s", "b m o", "b m o fi di", "s = si", "d f oi", "mi", "bi"],
    // d
    ["b", "b", "b m o s d", "d", "d", "d", "d", "b m o s d", "*", "bi mi oi d f", "bi mi oi d f", "bi", "bi"],
    // f
    ["b", "m", "o s d", "d", "d", "f", "f", "f = fi", "bi mi oi di si", "oi mi bi", "oi mi bi", "bi", "bi"],
    // =
    ["b", "m", "o", "s", "d", "f", "=", "fi", "di", "si", "oi", "mi", "bi"],
    // fi
    ["b", "m", "o", "o", "o s d", "f = fi", "fi", "fi", "di", "di", "oi di si", "oi di si", "bi mi oi di si"],
    // di
    [
        "b m o fi di",
        "o fi di",
        "o fi di",
        "o fi di",
        "o s d f = fi di si oi",
        "oi di si",
        "di",
        "di",
        "di",
        "di",
        "oi di si",
        "oi di si",
        "bi mi oi di si",
    ],
    // si
    ["b m o fi di", "o fi di", "o fi di", "s = si", "oi d f", "oi", "si", "di", "di", "si", "oi", "mi", "bi"],
    // oi
    [
        "b m o fi di",
        "o fi di",
        "o s d f = fi di si oi",
        "oi d f",
        "oi d f",
        "oi",
        "oi",
        "oi di si",
        "bi mi oi di si",
        "oi bi mi",
        "oi bi mi",
        "bi",
        "bi",
    ],
    // mi
    ["b m o fi di", "s = si", "oi d f", "oi d f", "oi d f", "mi", "mi", "mi", "bi", "bi", "bi", "bi", "bi"],
    // bi
    ["*", "bi mi oi d f", "bi mi oi d f", "bi mi oi d f", "bi mi oi d f", "bi", "bi", "bi", "bi", "bi", "bi", "bi", "bi"],
];

fn parse_cell(cell: &str) -> AllenSet {
    if cell == "*" {
        return AllenSet::FULL;
    }
    cell.split_whitespace().fold(AllenSet::EMPTY, |set, sym| {
        let i = SYMBOLS.iter().position(|s| *s == sym).unwrap_or_else(|| panic!("unknown symbol {sym}"));
        set.with(AllenRelation::ALL[i])
    })
}

fn hand_table(r1: AllenRelation, r2: AllenRelation) -> AllenSet {
    parse_cell(ALLEN_TABLE[r1.index()][r2.index()])
}

/// The coarse table derived from the hand-transcribed Allen table.
fn oracle(r1: CoarseRelation, r2: CoarseRelation) -> RelationSet {
    let mut out = Vec::new();
    for a in r1.allen().iter() {
        for b in r2.allen().iter() {
            out.extend(hand_table(a, b).iter().map(CoarseRelation::from_allen));
        }
    }
    RelationSet::from_relations(out).expect("non-empty")
}

#[test]
fn enumerated_allen_table_matches_transcription() {
    for r1 in AllenRelation::ALL {
        for r2 in AllenRelation::ALL {
            assert_eq!(allen_compose(r1, r2), hand_table(r1, r2), "{r1:?} ∘ {r2:?}");
        }
    }
}

#[test]
fn coarse_table_matches_allen_oracle() {
    for r1 in CoarseRelation::ALL {
        for r2 in CoarseRelation::ALL {
            assert_eq!(compose(r1, r2), oracle(r1, r2), "{r1} ∘ {r2}");
        }
    }
}

#[test]
fn known_coarse_cells() {
    use CoarseRelation::*;
    assert_eq!(compose(Before, Before), RelationSet::single(Before));
    assert!(compose(Overlap, Overlap).is_full());
    assert_eq!(compose(Includes, Includes), RelationSet::single(Includes));
    assert_eq!(compose(IncludedIn, IncludedIn), RelationSet::single(IncludedIn));
    assert_eq!(compose(Before, IncludedIn), RelationSet::from_relations([Before, Overlap, IncludedIn]).unwrap());
}

fn random_rational<R: Rng>(rng: &mut R) -> Ratio<i64> {
    Ratio::new(rng.gen_range(-40..=40), rng.gen_range(1..=6))
}

fn random_interval<R: Rng>(rng: &mut R) -> RationalInterval {
    loop {
        let (a, b) = (random_rational(rng), random_rational(rng));
        if let Some(iv) = Interval::new(a.min(b), a.max(b)) {
            return iv;
        }
    }
}

#[test]
fn monte_carlo_soundness() {
    let mut rng = rng(0x5eed);
    let mut violations = 0;
    for _ in 0..100_000 {
        let (a, b, c) = (random_interval(&mut rng), random_interval(&mut rng), random_interval(&mut rng));
        let allowed = compose(compare_intervals(&a, &b), compare_intervals(&b, &c));
        if !allowed.contains(compare_intervals(&a, &c)) {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
}

#[test]
fn exhaustive_small_rationals() {
    // endpoints in halves over [0, 3]: every configuration of three
    // intervals is represented
    let points: Vec<Ratio<i64>> = (0..=6).map(|n| Ratio::new(n, 2)).collect();
    let mut intervals = Vec::new();
    for (i, &s) in points.iter().enumerate() {
        for &e in &points[i + 1..] {
            intervals.push(Interval::new(s, e).unwrap());
        }
    }
    let mut seen = [[RelationSet::single(CoarseRelation::Before); 5]; 5];
    let mut first = [[true; 5]; 5];
    for a in &intervals {
        for b in &intervals {
            let ab = compare_intervals(a, b);
            for c in &intervals {
                let bc = compare_intervals(b, c);
                let ac = compare_intervals(a, c);
                assert!(compose(ab, bc).contains(ac));
                let cell = &mut seen[ab.index()][bc.index()];
                if first[ab.index()][bc.index()] {
                    *cell = RelationSet::single(ac);
                    first[ab.index()][bc.index()] = false;
                } else {
                    *cell = cell.union(RelationSet::single(ac));
                }
            }
        }
    }
    // completeness: every relation the table allows is realized
    for r1 in CoarseRelation::ALL {
        for r2 in CoarseRelation::ALL {
            assert_eq!(seen[r1.index()][r2.index()], compose(r1, r2), "{r1} ∘ {r2}");
        }
    }
}

#[test]
fn compare_is_a_partition() {
    let mut rng = rng(7);
    for _ in 0..10_000 {
        let (a, b) = (random_interval(&mut rng), random_interval(&mut rng));
        let r = compare_intervals(&a, &b);
        assert_eq!(compare_intervals(&b, &a), r.invert());
        let matches = CoarseRelation::ALL
            .iter()
            .filter(|&&k| k.allen().contains(AllenRelation::between(&a, &b)))
            .count();
        assert_eq!(matches, 1);
    }
}

#[test]
fn float_endpoints_share_the_code_path() {
    let a = Interval::new(0.0_f64, 1.5).unwrap();
    let b = Interval::new(0.5_f64, 1.0).unwrap();
    assert_eq!(compare_intervals(&a, &b), CoarseRelation::Includes);
}

proptest! {
    #[test]
    fn set_composition_distributes_over_union(x in 1u8..32, y in 1u8..32) {
        let sx = RelationSet::from_relations(CoarseRelation::ALL.into_iter().filter(|r| x & (1 << r.index()) != 0)).unwrap();
        let sy = RelationSet::from_relations(CoarseRelation::ALL.into_iter().filter(|r| y & (1 << r.index()) != 0)).unwrap();
        let mut expected: Option<RelationSet> = None;
        for a in sx.iter() {
            for b in sy.iter() {
                let c = compose(a, b);
                expected = Some(expected.map_or(c, |e| e.union(c)));
            }
        }
        prop_assert_eq!(compose_sets(sx, sy), expected.unwrap());
        prop_assert_eq!(compose_sets(sx, sy).invert(), compose_sets(sy.invert(), sx.invert()));
    }
}
