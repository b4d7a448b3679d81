//! Pairwise temporal relations between tree nodes.
//!
//! The five coarse relations partition Allen's thirteen: `BEFORE` covers
//! before and meets, `INCLUDES` covers strict containment, and every
//! remaining overlap-type relation (including shared-endpoint containment and
//! equality) is `OVERLAP`. Composition of coarse relations is derived from
//! the Allen table, never written out by hand.

pub mod allen;

use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::interval::Interval;
use crate::model::{Document, EdgeLabel};
use crate::normalize::{Resolution, ResolvedTime};
use crate::scalar::Scalar;
use allen::{allen_compose, AllenRelation, AllenSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoarseRelation {
    Before,
    After,
    Overlap,
    Includes,
    /// Inverse of `Includes`; never used as an edge label.
    IncludedIn,
}

impl CoarseRelation {
    pub const ALL: [CoarseRelation; 5] = [
        CoarseRelation::Before,
        CoarseRelation::After,
        CoarseRelation::Overlap,
        CoarseRelation::Includes,
        CoarseRelation::IncludedIn,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn invert(self) -> CoarseRelation {
        match self {
            CoarseRelation::Before => CoarseRelation::After,
            CoarseRelation::After => CoarseRelation::Before,
            CoarseRelation::Overlap => CoarseRelation::Overlap,
            CoarseRelation::Includes => CoarseRelation::IncludedIn,
            CoarseRelation::IncludedIn => CoarseRelation::Includes,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CoarseRelation::Before => "Before",
            CoarseRelation::After => "After",
            CoarseRelation::Overlap => "Overlap",
            CoarseRelation::Includes => "Includes",
            CoarseRelation::IncludedIn => "IncludedIn",
        }
    }

    /// The Allen relations this coarse relation stands for.
    pub fn allen(self) -> AllenSet {
        use AllenRelation::*;
        match self {
            CoarseRelation::Before => AllenSet::of(&[Before, Meets]),
            CoarseRelation::After => AllenSet::of(&[After, MetBy]),
            CoarseRelation::Includes => AllenSet::of(&[Contains]),
            CoarseRelation::IncludedIn => AllenSet::of(&[During]),
            CoarseRelation::Overlap => AllenSet::of(&[
                Overlaps,
                OverlappedBy,
                Starts,
                StartedBy,
                Finishes,
                FinishedBy,
                Equals,
            ]),
        }
    }

    pub fn from_allen(r: AllenRelation) -> CoarseRelation {
        use AllenRelation::*;
        match r {
            Before | Meets => CoarseRelation::Before,
            After | MetBy => CoarseRelation::After,
            Contains => CoarseRelation::Includes,
            During => CoarseRelation::IncludedIn,
            _ => CoarseRelation::Overlap,
        }
    }

    /// The relation asserted by an edge label, read parent-to-child.
    pub fn from_label(label: EdgeLabel) -> Option<CoarseRelation> {
        match label {
            EdgeLabel::DependOn => None,
            EdgeLabel::Before => Some(CoarseRelation::Before),
            EdgeLabel::After => Some(CoarseRelation::After),
            EdgeLabel::Overlap => Some(CoarseRelation::Overlap),
            EdgeLabel::Includes => Some(CoarseRelation::Includes),
        }
    }
}

impl fmt::Display for CoarseRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A non-empty set of coarse relations; the full set means "unknown".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RelationSet(u8);

impl RelationSet {
    pub const FULL: RelationSet = RelationSet(0b11111);

    pub fn single(r: CoarseRelation) -> RelationSet {
        RelationSet(1 << r.index())
    }

    /// `None` for an empty iterator.
    pub fn from_relations(relations: impl IntoIterator<Item = CoarseRelation>) -> Option<RelationSet> {
        let bits = relations.into_iter().fold(0u8, |acc, r| acc | 1 << r.index());
        (bits != 0).then_some(RelationSet(bits))
    }

    pub fn contains(self, r: CoarseRelation) -> bool {
        self.0 & (1 << r.index()) != 0
    }

    pub fn union(self, other: RelationSet) -> RelationSet {
        RelationSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: RelationSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_full(self) -> bool {
        self == RelationSet::FULL
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Always false: a relation set holds at least one relation.
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = CoarseRelation> {
        CoarseRelation::ALL.into_iter().filter(move |&r| self.contains(r))
    }

    pub fn invert(self) -> RelationSet {
        RelationSet::from_relations(self.iter().map(CoarseRelation::invert)).expect("non-empty")
    }

    pub fn single_relation(self) -> Option<CoarseRelation> {
        (self.len() == 1).then(|| self.iter().next().expect("one element"))
    }
}

impl fmt::Display for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(CoarseRelation::name).collect();
        f.write_str(&names.join(","))
    }
}

pub type CompositionTable = [[RelationSet; 5]; 5];

/// Maps each coarse pair to Allen sets, composes there and maps back.
pub fn generate_composition_table() -> CompositionTable {
    let mut table = [[RelationSet::FULL; 5]; 5];
    for r1 in CoarseRelation::ALL {
        for r2 in CoarseRelation::ALL {
            let mut allen = AllenSet::EMPTY;
            for a in r1.allen().iter() {
                for b in r2.allen().iter() {
                    allen = allen.union(allen_compose(a, b));
                }
            }
            table[r1.index()][r2.index()] =
                RelationSet::from_relations(allen.iter().map(CoarseRelation::from_allen)).expect("composition is non-empty");
        }
    }
    table
}

pub fn composition_table() -> &'static CompositionTable {
    static TABLE: OnceLock<CompositionTable> = OnceLock::new();
    TABLE.get_or_init(generate_composition_table)
}

/// Possible relations of `A` to `C` given `A r1 B` and `B r2 C`.
pub fn compose(r1: CoarseRelation, r2: CoarseRelation) -> RelationSet {
    composition_table()[r1.index()][r2.index()]
}

pub fn compose_sets(s1: RelationSet, s2: RelationSet) -> RelationSet {
    let mut out: Option<RelationSet> = None;
    for a in s1.iter() {
        for b in s2.iter() {
            let c = compose(a, b);
            out = Some(out.map_or(c, |o| o.union(c)));
        }
    }
    out.expect("both sets are non-empty")
}

/// Classifies `a` relative to `b`.
pub fn compare_intervals<T: Scalar>(a: &Interval<T>, b: &Interval<T>) -> CoarseRelation {
    if a.end <= b.start {
        CoarseRelation::Before
    } else if b.end <= a.start {
        CoarseRelation::After
    } else if a.start < b.start && b.end < a.end {
        CoarseRelation::Includes
    } else if b.start < a.start && a.end < b.end {
        CoarseRelation::IncludedIn
    } else {
        CoarseRelation::Overlap
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("value is not an interval: {0}")]
    NotAnInterval(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
}

pub fn compare_resolved(a: &ResolvedTime, b: &ResolvedTime) -> Result<CoarseRelation, InferenceError> {
    match (a.interval(), b.interval()) {
        (Some(x), Some(y)) => Ok(compare_intervals(&x, &y)),
        (None, _) => Err(InferenceError::NotAnInterval(a.to_string())),
        (_, None) => Err(InferenceError::NotAnInterval(b.to_string())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InferenceConfig {
    /// Path length after which a full running set ends composition early.
    pub short_circuit_after: usize,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig { short_circuit_after: 64 }
    }
}

pub fn infer_relation(doc: &Document, a: &str, b: &str, resolved: &Resolution) -> Result<RelationSet, InferenceError> {
    infer_relation_with(doc, a, b, resolved, &InferenceConfig::default())
}

/// The possible relations of `a` to `b`.
///
/// When both nodes resolve to intervals the answer is their direct
/// comparison. Otherwise the edge relations along `a → LCA → b` are
/// composed; `DEPEND_ON` edges contribute the comparison of their endpoints
/// when both resolve and the full set otherwise.
pub fn infer_relation_with(
    doc: &Document,
    a: &str,
    b: &str,
    resolved: &Resolution,
    config: &InferenceConfig,
) -> Result<RelationSet, InferenceError> {
    let tree = &doc.tree;
    let ia = tree.index_of(a).ok_or_else(|| InferenceError::UnknownNode(a.to_owned()))?;
    let ib = tree.index_of(b).ok_or_else(|| InferenceError::UnknownNode(b.to_owned()))?;
    if ia == ib {
        return Ok(RelationSet::single(CoarseRelation::Overlap));
    }
    // Coarse composition is not associative, so always fold in one
    // orientation and invert for the other.
    if ia > ib {
        return infer_relation_with(doc, b, a, resolved, config).map(RelationSet::invert);
    }
    let interval_of = |i: usize| resolved.get(tree.node_at(i).id()).and_then(ResolvedTime::interval);
    if let (Some(x), Some(y)) = (interval_of(ia), interval_of(ib)) {
        return Ok(RelationSet::single(compare_intervals(&x, &y)));
    }

    // relation of parent to child along one edge
    let edge_relation = |child: usize| -> RelationSet {
        let (parent, label) = tree.parent_index(child).expect("path edges have parents");
        match CoarseRelation::from_label(label) {
            Some(r) => RelationSet::single(r),
            None => match (interval_of(parent), interval_of(child)) {
                (Some(p), Some(c)) => RelationSet::single(compare_intervals(&p, &c)),
                _ => RelationSet::FULL,
            },
        }
    };

    let (up, down) = tree.path_between(ia, ib);
    let steps = up
        .windows(2)
        .map(|w| edge_relation(w[0]).invert())
        .chain(down.iter().map(|&c| edge_relation(c)));

    let mut running: Option<RelationSet> = None;
    for (n, step) in steps.enumerate() {
        let next = match running {
            None => step,
            Some(r) => compose_sets(r, step),
        };
        if next.is_full() && n + 1 >= config.short_circuit_after {
            return Ok(RelationSet::FULL);
        }
        running = Some(next);
    }
    Ok(running.expect("distinct nodes are joined by at least one edge"))
}
