//! Random document generators and independent oracles for the test suites.
//!
//! Generators are driven by a caller-supplied RNG so every failure can be
//! replayed from its seed.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use tdtree::model::{meta_edges, meta_nodes};
use tdtree::normalize::{Offset, OffsetUnit, PartialValue, Region, Resolution, Weekday};
use tdtree::{
    CalendarValue, Document, DocumentDraft, Edge, EdgeLabel, EventClass, EventNode, Genre, Granularity, MetaKind,
    Node, NodeId, ResolvedTime, Span, TimeInterval, TimexClass, TimexNode, TimexSemantics,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Path of a file under the shared fixture directory.
pub fn fixture(relative: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(relative)
}

pub fn load_fixture(relative: &str) -> Document {
    let bytes = std::fs::read(fixture(relative)).unwrap_or_else(|e| panic!("{relative}: {e}"));
    tdtree::parse_document(&bytes).unwrap_or_else(|e| panic!("{relative}: {e}"))
}

/// Names of the clean example fixtures, without extension.
pub const EXAMPLES: [&str; 13] = [
    "thursday_8am",
    "arrived_walked_began",
    "ten_minutes_later",
    "duration_unlocatable",
    "snowy_night",
    "once_upon",
    "recent_years",
    "tend",
    "in_the_future",
    "last_year",
    "growth_2011",
    "earth_goes",
    "economy_2003",
];

/// Mutant fixture names paired with the single rule each violates.
pub const MUTANTS: [(&str, &str); 14] = [
    ("r01_multiple_parents", "R1"),
    ("r02_meta_label", "R2"),
    ("r03_timex_under_event", "R3"),
    ("r04_absolute_not_root", "R4"),
    ("r05_relative_under_ref", "R5"),
    ("r06_vague_under_dct", "R6"),
    ("r07_unlocatable_in_tree", "R7"),
    ("r08_event_depend_on", "R8"),
    ("r09_event_under_root", "R9"),
    ("r10_stative_parent", "R10"),
    ("r11_unknown_class", "R11"),
    ("r12_absolute_under_dct", "R12"),
    ("r13_overlapping_spans", "R13"),
    ("r14_timex_temporal_label", "R14"),
];

const SYLLABLES: [&str; 12] = ["ka", "lo", "mi", "ne", "ru", "sa", "ti", "vo", "zé", "ph", "qu", "ör"];

fn word<R: Rng>(rng: &mut R) -> String {
    (0..rng.gen_range(1..=3)).map(|_| *SYLLABLES.choose(rng).expect("non-empty")).collect()
}

fn random_calendar<R: Rng>(rng: &mut R, fields: usize) -> CalendarValue {
    CalendarValue {
        year: Some(rng.gen_range(1950..=2030)),
        month: (fields >= 2).then(|| rng.gen_range(1..=12)),
        day: (fields >= 3).then(|| rng.gen_range(1..=28)),
        hour: (fields >= 4).then(|| rng.gen_range(0..24)),
        minute: (fields >= 5).then(|| rng.gen_range(0..60)),
        second: (fields >= 6).then(|| rng.gen_range(0..60)),
    }
}

fn random_semantics<R: Rng>(rng: &mut R, class: TimexClass, required: bool) -> Option<TimexSemantics> {
    if !required && rng.gen_bool(0.15) {
        return None;
    }
    match class {
        TimexClass::AbsoluteConcrete => {
            let fields = rng.gen_range(1..=3);
            Some(TimexSemantics::Absolute(random_calendar(rng, fields)))
        }
        TimexClass::RelativeConcrete => Some(match rng.gen_range(0..4) {
            0 | 1 => {
                let unit = *[
                    OffsetUnit::Year,
                    OffsetUnit::Month,
                    OffsetUnit::Week,
                    OffsetUnit::Day,
                    OffsetUnit::Hour,
                    OffsetUnit::Minute,
                    OffsetUnit::Second,
                ]
                .choose(rng)
                .expect("non-empty");
                let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                TimexSemantics::Offset(Offset::new(sign, rng.gen_range(1..=12), unit))
            }
            2 => {
                let value = CalendarValue {
                    year: None,
                    month: Some(rng.gen_range(1..=12)),
                    day: rng.gen_bool(0.5).then(|| rng.gen_range(1..=28)),
                    hour: None,
                    minute: None,
                    second: None,
                };
                TimexSemantics::Partial(PartialValue::fields(value))
            }
            _ => {
                let days = [Weekday::Mon, Weekday::Tue, Weekday::Wed, Weekday::Thu, Weekday::Fri, Weekday::Sat, Weekday::Sun];
                TimexSemantics::Partial(PartialValue::weekday(*days.choose(rng).expect("non-empty")))
            }
        }),
        TimexClass::Vague => {
            let region = *[Region::Past, Region::Present, Region::Future].choose(rng).expect("non-empty");
            Some(TimexSemantics::Symbolic(region))
        }
        TimexClass::Unlocatable => None,
    }
}

fn random_timex_class<R: Rng>(rng: &mut R) -> TimexClass {
    match rng.gen_range(0..20) {
        0..=5 => TimexClass::AbsoluteConcrete,
        6..=13 => TimexClass::RelativeConcrete,
        14..=16 => TimexClass::Vague,
        _ => TimexClass::Unlocatable,
    }
}

fn random_event_class<R: Rng>(rng: &mut R) -> EventClass {
    if rng.gen_bool(0.4) {
        EventClass::Event
    } else {
        *EventClass::ALL.choose(rng).expect("non-empty")
    }
}

/// A document with random text, sentence breaks, DCT and nodes, carrying
/// only the meta edges. Every relative timex has semantics when there is no
/// DCT value.
pub fn random_draft<R: Rng>(rng: &mut R, id: &str) -> DocumentDraft {
    let genre = if rng.gen_bool(0.5) { Genre::News } else { Genre::Narrative };
    let dct = rng.gen_bool(0.8).then(|| {
        let fields = *[3, 3, 6].choose(rng).expect("non-empty");
        random_calendar(rng, fields)
    });
    let mut text = String::new();
    let mut len = 0usize;
    let mut breaks = Vec::new();
    let mut nodes = meta_nodes();
    let (mut timexes, mut events) = (0, 0);
    for _ in 0..rng.gen_range(1..=6) {
        for w in 0..rng.gen_range(1..=8) {
            if w > 0 {
                text.push(' ');
                len += 1;
            }
            let token = word(rng);
            let span = Span::new(len, len + token.chars().count());
            len = span.end;
            text.push_str(&token);
            match rng.gen_range(0..10) {
                0..=1 => {
                    timexes += 1;
                    let class = random_timex_class(rng);
                    let semantics = random_semantics(rng, class, dct.is_none());
                    nodes.push(Node::Timex(TimexNode {
                        id: NodeId::new(format!("t{timexes}")),
                        span,
                        surface: token,
                        class,
                        semantics,
                    }));
                }
                2..=5 => {
                    events += 1;
                    nodes.push(Node::Event(EventNode {
                        id: NodeId::new(format!("e{events}")),
                        span,
                        surface: token,
                        class: random_event_class(rng),
                    }));
                }
                _ => {}
            }
        }
        text.push_str(". ");
        len += 2;
        breaks.push(len);
    }
    nodes.shuffle(rng);
    DocumentDraft {
        id: id.to_owned(),
        genre,
        text,
        sentence_breaks: rng.gen_bool(0.9).then_some(breaks),
        dct,
        nodes,
        edges: meta_edges(),
    }
}

fn random_temporal_label<R: Rng>(rng: &mut R) -> EdgeLabel {
    *[EdgeLabel::Before, EdgeLabel::After, EdgeLabel::Overlap, EdgeLabel::Includes]
        .choose(rng)
        .expect("non-empty")
}

/// Adds random edges that satisfy every rule in strict mode.
pub fn attach_randomly<R: Rng>(rng: &mut R, mut draft: DocumentDraft) -> DocumentDraft {
    let mut order: Vec<usize> = (0..draft.nodes.len()).filter(|&i| draft.nodes[i].span().is_some()).collect();
    order.shuffle(rng);
    let meta = |k: MetaKind| NodeId::from(k);
    let mut placed: Vec<usize> = Vec::new();
    let mut edges = meta_edges();
    for i in order {
        let node = &draft.nodes[i];
        let child = NodeId::new(node.id());
        let edge = |parent: NodeId, label| Edge { child: child.clone(), parent, label };
        match node {
            Node::Meta(_) => unreachable!(),
            Node::Timex(t) => match t.class {
                TimexClass::Unlocatable => continue,
                TimexClass::AbsoluteConcrete => edges.push(edge(meta(MetaKind::Root), EdgeLabel::DependOn)),
                TimexClass::RelativeConcrete => {
                    let mut parents: Vec<NodeId> = placed
                        .iter()
                        .filter(|&&p| draft.nodes[p].as_timex().is_some_and(|pt| pt.class.is_concrete()))
                        .map(|&p| NodeId::new(draft.nodes[p].id()))
                        .collect();
                    parents.push(meta(MetaKind::Dct));
                    edges.push(edge(parents.choose(rng).expect("non-empty").clone(), EdgeLabel::DependOn));
                }
                TimexClass::Vague => {
                    let parent = match t.semantics {
                        Some(TimexSemantics::Symbolic(region)) => region.meta(),
                        _ => *[MetaKind::PresentRef, MetaKind::PastRef, MetaKind::FutureRef].choose(rng).expect("non-empty"),
                    };
                    edges.push(edge(meta(parent), EdgeLabel::DependOn));
                }
            },
            Node::Event(e) => {
                let mut parents: Vec<NodeId> = placed
                    .iter()
                    .filter(|&&p| match &draft.nodes[p] {
                        Node::Timex(_) => true,
                        Node::Event(pe) => pe.class.is_eventive() || !e.class.is_eventive(),
                        Node::Meta(_) => false,
                    })
                    .map(|&p| NodeId::new(draft.nodes[p].id()))
                    .collect();
                for k in [MetaKind::Dct, MetaKind::PresentRef, MetaKind::PastRef, MetaKind::FutureRef, MetaKind::Atemporal] {
                    parents.push(meta(k));
                }
                let parent = parents.choose(rng).expect("non-empty").clone();
                let label = if parent.as_str() == MetaKind::Atemporal.id() {
                    EdgeLabel::DependOn
                } else {
                    random_temporal_label(rng)
                };
                edges.push(edge(parent, label));
            }
        }
        placed.push(i);
    }
    draft.edges = edges;
    draft
}

/// A random document whose tree passes strict validation.
pub fn random_document<R: Rng>(rng: &mut R, id: &str) -> Document {
    let draft = random_draft(rng, id);
    attach_randomly(rng, draft).build().expect("generated documents are valid")
}

/// A tree together with a hidden interval for every node except ROOT and
/// ATEMPORAL. Every realized interval satisfies the edge labels.
pub struct Realized {
    pub document: Document,
    /// What the inference engine may use: timexes and DCT resolve, the
    /// symbolic references do not.
    pub resolution: Resolution,
    pub truth: BTreeMap<String, TimeInterval>,
}

fn interval(start: i64, end: i64) -> TimeInterval {
    TimeInterval::new(start, end).expect("non-empty interval")
}

fn random_free_interval<R: Rng>(rng: &mut R) -> TimeInterval {
    let start = rng.gen_range(0..1_000_000);
    interval(start, start + rng.gen_range(1..1_000_000))
}

/// A child interval `c` with `compare_intervals(parent, c) == relation`.
pub fn realize_child<R: Rng>(rng: &mut R, p: TimeInterval, relation: tdtree::CoarseRelation) -> TimeInterval {
    use tdtree::CoarseRelation::*;
    let len = p.end - p.start;
    let gap = rng.gen_range(0..50);
    let width = rng.gen_range(1..100_000);
    match relation {
        Before => interval(p.end + gap, p.end + gap + width),
        After => interval(p.start - gap - width, p.start - gap),
        Includes => {
            assert!(len >= 3, "parent too short to include a child");
            let s = rng.gen_range(p.start + 1..=p.end - 2);
            interval(s, rng.gen_range(s + 1..=p.end - 1))
        }
        IncludedIn => interval(p.start - 1 - gap, p.end + 1 + rng.gen_range(0..50)),
        Overlap => match rng.gen_range(0..5) {
            0 => p,
            1 => interval(p.start, p.end + 1 + gap),
            2 => interval(p.start - 1 - gap, p.end),
            3 if len >= 2 => interval(p.start + rng.gen_range(1..len), p.end + 1 + gap),
            _ if len >= 2 => interval(p.start - 1 - gap, p.start + rng.gen_range(1..len)),
            _ => p,
        },
    }
}

fn coarse(label: EdgeLabel) -> Option<tdtree::CoarseRelation> {
    tdtree::inference::CoarseRelation::from_label(label)
}

/// A random tree of `n` text nodes with hidden intervals. Timexes are
/// concrete and resolve; events and the symbolic references do not.
pub fn random_realized_tree<R: Rng>(rng: &mut R, n: usize) -> Realized {
    let mut truth: BTreeMap<String, TimeInterval> = BTreeMap::new();
    for kind in [MetaKind::Dct, MetaKind::PresentRef, MetaKind::PastRef, MetaKind::FutureRef] {
        truth.insert(kind.id().to_owned(), random_free_interval(rng));
    }
    let mut nodes = meta_nodes();
    let mut edges = meta_edges();
    let mut text = String::new();
    let mut placed: Vec<(String, bool)> = Vec::new(); // (id, is_timex)
    for k in 0..n {
        if k > 0 {
            text.push(' ');
        }
        let start = text.chars().count();
        text.push('w');
        text.push_str(&k.to_string());
        let span = Span::new(start, text.chars().count());
        let is_timex = rng.gen_bool(0.4);
        let id = format!("{}{k}", if is_timex { "t" } else { "e" });
        let (parent, label, child_interval) = if is_timex {
            let mut parents: Vec<String> = placed.iter().filter(|(_, t)| *t).map(|(p, _)| p.clone()).collect();
            parents.push(MetaKind::Dct.id().to_owned());
            parents.push(MetaKind::Root.id().to_owned());
            let parent = parents.choose(rng).expect("non-empty").clone();
            let iv = match truth.get(&parent) {
                Some(&p) => {
                    let rel = *tdtree::CoarseRelation::ALL.choose(rng).expect("non-empty");
                    if rel == tdtree::CoarseRelation::Includes && p.end - p.start < 3 {
                        realize_child(rng, p, tdtree::CoarseRelation::Overlap)
                    } else {
                        realize_child(rng, p, rel)
                    }
                }
                None => random_free_interval(rng),
            };
            (parent, EdgeLabel::DependOn, iv)
        } else {
            let mut parents: Vec<String> = placed.iter().map(|(p, _)| p.clone()).collect();
            for k in [MetaKind::Dct, MetaKind::PresentRef, MetaKind::PastRef, MetaKind::FutureRef, MetaKind::Atemporal] {
                parents.push(k.id().to_owned());
            }
            let parent = parents.choose(rng).expect("non-empty").clone();
            match truth.get(&parent) {
                Some(&p) => {
                    let mut label = random_temporal_label(rng);
                    if label == EdgeLabel::Includes && p.end - p.start < 3 {
                        label = EdgeLabel::Overlap;
                    }
                    let iv = realize_child(rng, p, coarse(label).expect("temporal"));
                    (parent, label, iv)
                }
                None => (parent, EdgeLabel::DependOn, random_free_interval(rng)),
            }
        };
        let node_id = NodeId::new(id.clone());
        nodes.push(if is_timex {
            Node::Timex(TimexNode {
                id: node_id.clone(),
                span,
                surface: String::new(),
                class: if parent == MetaKind::Root.id() {
                    TimexClass::AbsoluteConcrete
                } else {
                    TimexClass::RelativeConcrete
                },
                semantics: None,
            })
        } else {
            Node::Event(EventNode {
                id: node_id.clone(),
                span,
                surface: String::new(),
                class: EventClass::Event,
            })
        });
        edges.push(Edge {
            child: node_id,
            parent: NodeId::new(parent),
            label,
        });
        truth.insert(id.clone(), child_interval);
        placed.push((id, is_timex));
    }
    let mut draft = DocumentDraft::new("realized", Genre::News, text);
    draft.nodes = nodes;
    draft.edges = edges;
    let document = draft.build().expect("realized tree is well formed");
    let mut resolution = Resolution::new();
    for node in document.tree.nodes() {
        let id = node.id();
        let value = match node {
            Node::Timex(_) | Node::Meta(MetaKind::Dct) => ResolvedTime::Interval {
                interval: truth[id],
                granularity: Granularity::Second,
            },
            Node::Meta(MetaKind::PresentRef) => ResolvedTime::Symbolic(Region::Present),
            Node::Meta(MetaKind::PastRef) => ResolvedTime::Symbolic(Region::Past),
            Node::Meta(MetaKind::FutureRef) => ResolvedTime::Symbolic(Region::Future),
            Node::Meta(_) => ResolvedTime::not_a_time(),
            Node::Event(_) => continue,
        };
        resolution.insert(NodeId::new(id), value);
    }
    Realized {
        document,
        resolution,
        truth,
    }
}

/// Corpus counts recomputed from raw JSON, independent of the library's
/// model types.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawCounts {
    pub documents: u64,
    pub sentences: u64,
    pub timexes: u64,
    pub unlocatable: u64,
    pub events: u64,
    pub timex_classes: BTreeMap<String, u64>,
    pub event_classes: BTreeMap<String, u64>,
    pub labels: BTreeMap<String, u64>,
    /// Keyed by (child kind, parent kind) with kinds "timex", "eventive",
    /// "stative" and "meta".
    pub matrix: BTreeMap<(String, String), u64>,
}

pub fn brute_force_counts(documents: &[Value]) -> RawCounts {
    let mut c = RawCounts::default();
    for doc in documents {
        c.documents += 1;
        c.sentences += doc.get("sentence_breaks").and_then(Value::as_array).map_or(0, |b| b.len() as u64);
        let nodes = doc["nodes"].as_array().expect("nodes");
        let kind_of = |id: &str| -> String {
            let node = nodes.iter().find(|n| n["id"] == id).expect("edge endpoint exists");
            match node["kind"].as_str().expect("kind") {
                "meta" => "meta".into(),
                "timex" => "timex".into(),
                _ if node["class"] == "EVENT" => "eventive".into(),
                _ => "stative".into(),
            }
        };
        let edges = doc["edges"].as_array().expect("edges");
        let has_parent = |id: &str| edges.iter().any(|e| e["child"] == id);
        for node in nodes {
            let id = node["id"].as_str().expect("id");
            let class = node.get("class").and_then(Value::as_str).unwrap_or_default().to_owned();
            match node["kind"].as_str().expect("kind") {
                "timex" if class == "UNLOCATABLE" => c.unlocatable += 1,
                "timex" if has_parent(id) => {
                    c.timexes += 1;
                    *c.timex_classes.entry(class).or_default() += 1;
                }
                "event" => {
                    c.events += 1;
                    *c.event_classes.entry(class).or_default() += 1;
                }
                _ => {}
            }
        }
        for e in edges {
            let child = e["child"].as_str().expect("child");
            let child_kind = kind_of(child);
            if child_kind == "meta" {
                continue;
            }
            *c.labels.entry(e["label"].as_str().expect("label").to_owned()).or_default() += 1;
            *c.matrix.entry((child_kind, kind_of(e["parent"].as_str().expect("parent")))).or_default() += 1;
        }
    }
    c
}
