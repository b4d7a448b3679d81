//! Allen's thirteen interval relations and their composition table.
//!
//! The table is derived by enumeration: three intervals have at most six
//! distinct endpoints, so integer endpoints in `0..6` realize every possible
//! configuration and the enumeration is exact.

use std::sync::OnceLock;

use crate::interval::Interval;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AllenRelation {
    Before,
    Meets,
    Overlaps,
    Starts,
    During,
    Finishes,
    Equals,
    FinishedBy,
    Contains,
    StartedBy,
    OverlappedBy,
    MetBy,
    After,
}

impl AllenRelation {
    pub const ALL: [AllenRelation; 13] = [
        AllenRelation::Before,
        AllenRelation::Meets,
        AllenRelation::Overlaps,
        AllenRelation::Starts,
        AllenRelation::During,
        AllenRelation::Finishes,
        AllenRelation::Equals,
        AllenRelation::FinishedBy,
        AllenRelation::Contains,
        AllenRelation::StartedBy,
        AllenRelation::OverlappedBy,
        AllenRelation::MetBy,
        AllenRelation::After,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// The relation of `b` to `a` when `a self b`.
    pub fn inverse(self) -> AllenRelation {
        AllenRelation::ALL[12 - self.index()]
    }

    /// Classifies the pair `(a, b)`; both intervals must be non-empty.
    pub fn between<T: Scalar>(a: &Interval<T>, b: &Interval<T>) -> AllenRelation {
        use std::cmp::Ordering::*;
        let cmp = |x: T, y: T| x.partial_cmp(&y).expect("comparable endpoints");
        if a.end < b.start {
            return AllenRelation::Before;
        }
        if a.end == b.start {
            return AllenRelation::Meets;
        }
        if b.end < a.start {
            return AllenRelation::After;
        }
        if b.end == a.start {
            return AllenRelation::MetBy;
        }
        match (cmp(a.start, b.start), cmp(a.end, b.end)) {
            (Equal, Equal) => AllenRelation::Equals,
            (Equal, Less) => AllenRelation::Starts,
            (Equal, Greater) => AllenRelation::StartedBy,
            (Greater, Equal) => AllenRelation::Finishes,
            (Less, Equal) => AllenRelation::FinishedBy,
            (Greater, Less) => AllenRelation::During,
            (Less, Greater) => AllenRelation::Contains,
            (Less, Less) => AllenRelation::Overlaps,
            (Greater, Greater) => AllenRelation::OverlappedBy,
        }
    }
}

/// A set of Allen relations as a 13-bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AllenSet(u16);

impl AllenSet {
    pub const EMPTY: AllenSet = AllenSet(0);
    pub const FULL: AllenSet = AllenSet((1 << 13) - 1);

    pub fn of(relations: &[AllenRelation]) -> AllenSet {
        relations.iter().fold(AllenSet::EMPTY, |s, &r| s.with(r))
    }

    pub fn with(self, r: AllenRelation) -> AllenSet {
        AllenSet(self.0 | 1 << r.index())
    }

    pub fn union(self, other: AllenSet) -> AllenSet {
        AllenSet(self.0 | other.0)
    }

    pub fn contains(self, r: AllenRelation) -> bool {
        self.0 & (1 << r.index()) != 0
    }

    pub fn iter(self) -> impl Iterator<Item = AllenRelation> {
        AllenRelation::ALL.into_iter().filter(move |&r| self.contains(r))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

fn unit_intervals() -> Vec<Interval<i64>> {
    let mut out = Vec::new();
    for s in 0..6 {
        for e in s + 1..6 {
            out.push(Interval { start: s, end: e });
        }
    }
    out
}

fn enumerate_composition() -> [[AllenSet; 13]; 13] {
    let mut table = [[AllenSet::EMPTY; 13]; 13];
    let intervals = unit_intervals();
    for a in &intervals {
        for b in &intervals {
            let ab = AllenRelation::between(a, b);
            for c in &intervals {
                let bc = AllenRelation::between(b, c);
                let ac = AllenRelation::between(a, c);
                let cell = &mut table[ab.index()][bc.index()];
                *cell = cell.with(ac);
            }
        }
    }
    table
}

/// All relations `A r C` possible when `A r1 B` and `B r2 C`.
pub fn allen_compose(r1: AllenRelation, r2: AllenRelation) -> AllenSet {
    static TABLE: OnceLock<[[AllenSet; 13]; 13]> = OnceLock::new();
    TABLE.get_or_init(enumerate_composition)[r1.index()][r2.index()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_is_involution() {
        for r in AllenRelation::ALL {
            assert_eq!(r.inverse().inverse(), r);
        }
        assert_eq!(AllenRelation::Before.inverse(), AllenRelation::After);
        assert_eq!(AllenRelation::During.inverse(), AllenRelation::Contains);
        assert_eq!(AllenRelation::Equals.inverse(), AllenRelation::Equals);
    }

    #[test]
    fn classification_respects_inverse() {
        let intervals = unit_intervals();
        for a in &intervals {
            for b in &intervals {
                assert_eq!(AllenRelation::between(b, a), AllenRelation::between(a, b).inverse());
            }
        }
    }

    #[test]
    fn familiar_cells() {
        use AllenRelation::*;
        assert_eq!(allen_compose(Before, Before), AllenSet::of(&[Before]));
        assert_eq!(allen_compose(Meets, Meets), AllenSet::of(&[Before]));
        assert_eq!(allen_compose(During, During), AllenSet::of(&[During]));
        assert_eq!(allen_compose(Equals, Overlaps), AllenSet::of(&[Overlaps]));
        assert_eq!(allen_compose(Before, After), AllenSet::FULL);
        assert_eq!(allen_compose(Contains, During).len(), 9);
    }
}
