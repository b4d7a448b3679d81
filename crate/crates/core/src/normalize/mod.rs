//! Time expression normalization.
//!
//! Each locatable time expression carries machine-readable semantics and is
//! resolved against the value of its parent: absolute values stand alone,
//! partial values borrow their missing coarse fields from the parent,
//! offsets shift the parent's start, and vague expressions map to one of the
//! three symbolic regions.

mod calendar;
mod lexicon;

use std::collections::BTreeMap;
use std::fmt;

use chrono::{Datelike, NaiveDateTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use calendar::{CalendarError, CalendarValue, Granularity};
pub use lexicon::demo_lexicon;

use crate::interval::Interval;
use crate::model::{Document, MetaKind, Node, NodeId, TimexClass, TimexNode};
use calendar::{floor, from_seconds, shift, to_seconds, unit_bounds};

/// Resolved intervals are measured in whole seconds since the Unix epoch.
pub type TimeInterval = Interval<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Weekday {
    Mon,
    Tue,
    Wed,
    Thu,
    Fri,
    Sat,
    Sun,
}

impl Weekday {
    fn to_chrono(self) -> chrono::Weekday {
        match self {
            Weekday::Mon => chrono::Weekday::Mon,
            Weekday::Tue => chrono::Weekday::Tue,
            Weekday::Wed => chrono::Weekday::Wed,
            Weekday::Thu => chrono::Weekday::Thu,
            Weekday::Fri => chrono::Weekday::Fri,
            Weekday::Sat => chrono::Weekday::Sat,
            Weekday::Sun => chrono::Weekday::Sun,
        }
    }
}

/// A value missing its coarse fields: `--03`, `T08:00`, or a weekday with an
/// optional time of day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialValue {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weekday: Option<Weekday>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<CalendarValue>,
}

impl PartialValue {
    pub fn fields(value: CalendarValue) -> Self {
        PartialValue { weekday: None, value: Some(value) }
    }

    pub fn weekday(weekday: Weekday) -> Self {
        PartialValue { weekday: Some(weekday), value: None }
    }

    pub fn check(&self) -> Result<(), CalendarError> {
        match (self.weekday, self.value) {
            (None, None) => Err(CalendarError("empty partial value".into())),
            (_, Some(v)) if v.year.is_some() => Err(CalendarError(format!("{v} is not partial"))),
            (Some(_), Some(v)) if v.month.is_some() || v.day.is_some() => {
                Err(CalendarError(format!("weekday cannot combine with {v}")))
            }
            (_, Some(v)) => v.validate(),
            (Some(_), None) => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OffsetUnit {
    Year,
    Month,
    Week,
    Day,
    Hour,
    Minute,
    Second,
}

impl OffsetUnit {
    pub fn granularity(self) -> Granularity {
        match self {
            OffsetUnit::Year => Granularity::Year,
            OffsetUnit::Month => Granularity::Month,
            OffsetUnit::Week => Granularity::Week,
            OffsetUnit::Day => Granularity::Day,
            OffsetUnit::Hour => Granularity::Hour,
            OffsetUnit::Minute => Granularity::Minute,
            OffsetUnit::Second => Granularity::Second,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Offset {
    /// `1` or `-1`.
    pub sign: i8,
    pub magnitude: u32,
    pub unit: OffsetUnit,
}

impl Offset {
    pub fn new(sign: i8, magnitude: u32, unit: OffsetUnit) -> Self {
        Offset { sign, magnitude, unit }
    }

    pub fn check(&self) -> Result<(), CalendarError> {
        if (self.sign != 1 && self.sign != -1) || self.magnitude == 0 {
            return Err(CalendarError(format!(
                "offset needs sign ±1 and a positive magnitude, got {}×{}",
                self.sign, self.magnitude
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Region {
    Past,
    Present,
    Future,
}

impl Region {
    pub fn meta(self) -> MetaKind {
        match self {
            Region::Past => MetaKind::PastRef,
            Region::Present => MetaKind::PresentRef,
            Region::Future => MetaKind::FutureRef,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimexSemantics {
    Absolute(CalendarValue),
    Partial(PartialValue),
    Offset(Offset),
    Symbolic(Region),
}

impl TimexSemantics {
    /// The only timex class each kind of semantics may annotate.
    pub fn expected_class(&self) -> TimexClass {
        match self {
            TimexSemantics::Absolute(_) => TimexClass::AbsoluteConcrete,
            TimexSemantics::Partial(_) | TimexSemantics::Offset(_) => TimexClass::RelativeConcrete,
            TimexSemantics::Symbolic(_) => TimexClass::Vague,
        }
    }

    pub fn check(&self) -> Result<(), CalendarError> {
        match self {
            TimexSemantics::Absolute(v) if !v.is_complete() => {
                Err(CalendarError(format!("{v} is not an absolute value")))
            }
            TimexSemantics::Absolute(v) => v.validate(),
            TimexSemantics::Partial(p) => p.check(),
            TimexSemantics::Offset(o) => o.check(),
            TimexSemantics::Symbolic(_) => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ResolvedTime {
    Interval {
        interval: TimeInterval,
        granularity: Granularity,
    },
    Symbolic(Region),
    Unresolved(String),
}

impl ResolvedTime {
    pub fn unresolved(reason: impl Into<String>) -> Self {
        ResolvedTime::Unresolved(reason.into())
    }

    pub fn not_a_time() -> Self {
        ResolvedTime::unresolved("not a time")
    }

    /// The calendar unit of `value`; `None` if it has no year or is out of range.
    pub fn from_calendar(value: &CalendarValue) -> Option<ResolvedTime> {
        let granularity = value.granularity()?;
        let start = value.start()?;
        let (_, end) = unit_bounds(start, granularity)?;
        Some(ResolvedTime::Interval {
            interval: Interval::new(to_seconds(start), to_seconds(end))?,
            granularity,
        })
    }

    pub fn interval(&self) -> Option<TimeInterval> {
        match self {
            ResolvedTime::Interval { interval, .. } => Some(*interval),
            _ => None,
        }
    }

    pub fn granularity(&self) -> Option<Granularity> {
        match self {
            ResolvedTime::Interval { granularity, .. } => Some(*granularity),
            _ => None,
        }
    }

    fn start(&self) -> Option<NaiveDateTime> {
        from_seconds(self.interval()?.start)
    }
}

impl fmt::Display for ResolvedTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error(transparent)]
    InvalidCalendar(#[from] CalendarError),
    #[error("node `{node}`: {source}")]
    AtNode {
        node: NodeId,
        #[source]
        source: CalendarError,
    },
    #[error("resolution order visits `{0}` before its parent")]
    NotTopological(NodeId),
    #[error("resolution order does not cover node `{0}` exactly once")]
    IncompleteOrder(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizeOptions {
    /// Fill missing semantics from the built-in English example lexicon.
    pub demo_lexicon: bool,
    /// Treat a weekday matching more than one day of its parent as unresolved.
    pub strict_weekdays: bool,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            demo_lexicon: true,
            strict_weekdays: false,
        }
    }
}

/// Resolves one time expression against its parent's value.
pub fn resolve_timex(semantics: &TimexSemantics, parent: &ResolvedTime) -> Result<ResolvedTime, CalendarError> {
    resolve_timex_with(semantics, parent, &NormalizeOptions::default())
}

pub fn resolve_timex_with(
    semantics: &TimexSemantics,
    parent: &ResolvedTime,
    options: &NormalizeOptions,
) -> Result<ResolvedTime, CalendarError> {
    match semantics {
        TimexSemantics::Absolute(value) => {
            value.validate()?;
            Ok(ResolvedTime::from_calendar(value).unwrap_or_else(|| ResolvedTime::unresolved("out of range")))
        }
        TimexSemantics::Symbolic(region) => Ok(ResolvedTime::Symbolic(*region)),
        TimexSemantics::Offset(offset) => {
            offset.check()?;
            let Some(anchor) = parent.start() else {
                return Ok(ResolvedTime::unresolved("offset needs a located parent"));
            };
            let granularity = offset.unit.granularity();
            let amount = i64::from(offset.sign) * i64::from(offset.magnitude);
            let located = shift(anchor, granularity, amount).and_then(|at| unit_bounds(at, granularity));
            Ok(match located {
                Some((start, end)) => ResolvedTime::Interval {
                    interval: Interval::new(to_seconds(start), to_seconds(end)).expect("unit is non-empty"),
                    granularity,
                },
                None => ResolvedTime::unresolved("out of range"),
            })
        }
        TimexSemantics::Partial(partial) => {
            partial.check()?;
            let (Some(anchor), Some(parent_interval), Some(parent_granularity)) =
                (parent.start(), parent.interval(), parent.granularity())
            else {
                return Ok(ResolvedTime::unresolved("partial value needs a located parent"));
            };
            match partial.weekday {
                Some(weekday) => resolve_weekday(weekday, partial.value, parent_interval, options),
                None => {
                    let value = partial.value.expect("checked");
                    let coarsest = value.coarsest().expect("checked");
                    let needed = match coarsest {
                        Granularity::Month => Granularity::Year,
                        Granularity::Day => Granularity::Month,
                        _ => Granularity::Day,
                    };
                    if parent_granularity < needed {
                        return Ok(ResolvedTime::unresolved(format!(
                            "parent is too coarse to anchor {value}"
                        )));
                    }
                    let full = value.anchored_at(anchor);
                    full.validate()?;
                    Ok(ResolvedTime::from_calendar(&full).unwrap_or_else(|| ResolvedTime::unresolved("out of range")))
                }
            }
        }
    }
}

fn resolve_weekday(
    weekday: Weekday,
    time: Option<CalendarValue>,
    parent: TimeInterval,
    options: &NormalizeOptions,
) -> Result<ResolvedTime, CalendarError> {
    let (Some(first), Some(last)) = (from_seconds(parent.start), from_seconds(parent.end - 1)) else {
        return Ok(ResolvedTime::unresolved("out of range"));
    };
    let wanted = weekday.to_chrono();
    let mut matches = Vec::new();
    let mut day = floor(first, Granularity::Day).date();
    while day <= last.date() {
        if day.weekday() == wanted {
            matches.push(day);
            if options.strict_weekdays && matches.len() > 1 {
                break;
            }
        }
        day = day.succ_opt().expect("date in range");
    }
    let Some(&chosen) = matches.first() else {
        return Ok(ResolvedTime::unresolved(format!("no {weekday:?} within parent interval")));
    };
    if options.strict_weekdays && matches.len() > 1 {
        return Ok(ResolvedTime::unresolved(format!("{weekday:?} is ambiguous within parent interval")));
    }
    let midnight = chosen.and_hms_opt(0, 0, 0).expect("midnight exists");
    let value = match time {
        Some(t) => t.anchored_at(midnight),
        None => CalendarValue::from_datetime(midnight, Granularity::Day),
    };
    value.validate()?;
    Ok(ResolvedTime::from_calendar(&value).unwrap_or_else(|| ResolvedTime::unresolved("out of range")))
}

/// Semantics for a timex: its own, else a lexicon entry consistent with its class.
pub fn effective_semantics(timex: &TimexNode, options: &NormalizeOptions) -> Option<TimexSemantics> {
    timex.semantics.or_else(|| {
        if !options.demo_lexicon {
            return None;
        }
        demo_lexicon(&timex.surface).filter(|s| s.expected_class() == timex.class)
    })
}

pub type Resolution = BTreeMap<NodeId, ResolvedTime>;

/// Resolves every meta and timex node of `doc`, parents before children.
pub fn resolve_all(doc: &Document) -> Result<Resolution, NormalizeError> {
    resolve_all_with(doc, &NormalizeOptions::default())
}

pub fn resolve_all_with(doc: &Document, options: &NormalizeOptions) -> Result<Resolution, NormalizeError> {
    let tree = &doc.tree;
    // breadth-first from ROOT
    let mut order = Vec::with_capacity(tree.len());
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); tree.len()];
    let mut root = 0;
    for i in 0..tree.len() {
        match tree.parent_index(i) {
            Some((p, _)) => children[p].push(i),
            None => root = i,
        }
    }
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(i) = queue.pop_front() {
        order.push(tree.node_at(i).id());
        queue.extend(children[i].iter().copied());
    }
    resolve_in_order(doc, &order, options)
}

/// Resolves nodes in the given order, which must list every tree node once
/// and visit each parent before its children.
pub fn resolve_in_order(doc: &Document, order: &[&str], options: &NormalizeOptions) -> Result<Resolution, NormalizeError> {
    let tree = &doc.tree;
    let mut values: Vec<Option<ResolvedTime>> = vec![None; tree.len()];
    for id in order {
        let i = tree
            .index_of(id)
            .ok_or_else(|| NormalizeError::IncompleteOrder(NodeId::new(*id)))?;
        if values[i].is_some() {
            return Err(NormalizeError::IncompleteOrder(NodeId::new(*id)));
        }
        let parent_value = match tree.parent_index(i) {
            Some((p, _)) => match (&values[p], tree.node_at(p)) {
                (_, Node::Event(_)) => ResolvedTime::not_a_time(),
                (Some(v), _) => v.clone(),
                (None, _) => return Err(NormalizeError::NotTopological(NodeId::new(*id))),
            },
            None => ResolvedTime::not_a_time(),
        };
        values[i] = Some(match tree.node_at(i) {
            Node::Meta(MetaKind::Root) | Node::Meta(MetaKind::Atemporal) => ResolvedTime::not_a_time(),
            Node::Meta(MetaKind::Dct) => match &doc.dct {
                Some(value) => {
                    value.validate().map_err(|source| NormalizeError::AtNode {
                        node: NodeId::new("DCT"),
                        source,
                    })?;
                    ResolvedTime::from_calendar(value)
                        .unwrap_or_else(|| ResolvedTime::unresolved("document creation time has no year"))
                }
                None => ResolvedTime::unresolved("no document creation time"),
            },
            Node::Meta(MetaKind::PresentRef) => ResolvedTime::Symbolic(Region::Present),
            Node::Meta(MetaKind::PastRef) => ResolvedTime::Symbolic(Region::Past),
            Node::Meta(MetaKind::FutureRef) => ResolvedTime::Symbolic(Region::Future),
            Node::Timex(timex) if timex.class == TimexClass::Unlocatable => ResolvedTime::unresolved("unlocatable"),
            Node::Timex(timex) => match effective_semantics(timex, options) {
                Some(semantics) => resolve_timex_with(&semantics, &parent_value, options).map_err(|source| {
                    NormalizeError::AtNode {
                        node: timex.id.clone(),
                        source,
                    }
                })?,
                None => ResolvedTime::unresolved("no semantics"),
            },
            // placeholder so the coverage check below stays uniform
            Node::Event(_) => ResolvedTime::not_a_time(),
        });
    }
    let mut out = BTreeMap::new();
    for (i, value) in values.into_iter().enumerate() {
        let node = tree.node_at(i);
        let value = value.ok_or_else(|| NormalizeError::IncompleteOrder(NodeId::new(node.id())))?;
        if !matches!(node, Node::Event(_)) {
            out.insert(NodeId::new(node.id()), value);
        }
    }
    Ok(out)
}

/// ISO-8601-style text truncated to the value's granularity, the symbolic
/// meta-node name, or `UNRESOLVED(<reason>)`.
pub fn render(value: &ResolvedTime) -> String {
    match value {
        ResolvedTime::Interval { interval, granularity } => match from_seconds(interval.start) {
            Some(start) if *granularity == Granularity::Week => {
                let week = start.iso_week();
                format!("{:04}-W{:02}", week.year(), week.week())
            }
            Some(start) => CalendarValue::from_datetime(start, *granularity).to_string(),
            None => "UNRESOLVED(out of range)".to_owned(),
        },
        ResolvedTime::Symbolic(region) => region.meta().id().to_owned(),
        ResolvedTime::Unresolved(reason) => format!("UNRESOLVED({reason})"),
    }
}
