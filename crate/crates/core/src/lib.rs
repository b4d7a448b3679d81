//! Temporal dependency trees: a document model in which every time
//! expression and event depends on exactly one reference time, with
//! validation, time normalization, relation inference, agreement scoring,
//! corpus statistics and a heuristic baseline parser.

pub mod baseline;
pub mod format;
pub mod inference;
pub mod interval;
pub mod metrics;
pub mod model;
pub mod normalize;
pub mod scalar;
pub mod stats;
pub mod validate;

use num_rational::Ratio;

pub use format::{parse_document, serialize_document, FormatError};
pub use inference::{CoarseRelation, RelationSet};
pub use interval::Interval;
pub use metrics::Prf;
pub use model::{
    Document, DocumentDraft, Edge, EdgeLabel, EventClass, EventNode, Genre, MetaKind, Node, NodeId, NodeKind, Span,
    TemporalDependencyTree, TimexClass, TimexNode, TreeError,
};
pub use normalize::{CalendarValue, Granularity, ResolvedTime, TimeInterval, TimexSemantics};
pub use scalar::{Scalar, Score};
pub use validate::{Diagnostic, Mode, Rule, Severity};

/// Intervals with exact rational endpoints.
pub type RationalInterval = Interval<Ratio<i64>>;
/// Scores as floating point.
pub type Prf64 = Prf<f64>;
/// Scores as exact fractions.
pub type ExactPrf = Prf<Ratio<i64>>;
