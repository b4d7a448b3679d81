//! Validator agreement with independent per-rule predicates on random trees.

use rand::seq::SliceRandom;
use rand::Rng;

use tdtree::validate::validate;
use tdtree::{Document, Edge, EdgeLabel, MetaKind, Mode, Node, NodeId, Severity, TimexClass};
use tdtree_testkit::{attach_randomly, random_document, random_draft, rng};

/// True when `doc` satisfies every rule, checked without the validator.
fn satisfies_rules(doc: &Document, strict: bool) -> bool {
    let tree = &doc.tree;
    let is_meta = |n: &Node, k: MetaKind| n.meta() == Some(k);
    for node in tree.nodes() {
        let Some((parent, label)) = tree.parent(node.id()) else {
            continue;
        };
        let ok = match node {
            Node::Meta(_) => is_meta(parent, MetaKind::Root) && label == EdgeLabel::DependOn,
            Node::Timex(t) => {
                label == EdgeLabel::DependOn
                    && match t.class {
                        TimexClass::Unlocatable => false,
                        TimexClass::AbsoluteConcrete => is_meta(parent, MetaKind::Root),
                        TimexClass::RelativeConcrete => {
                            is_meta(parent, MetaKind::Dct) || parent.as_timex().is_some_and(|p| p.class.is_concrete())
                        }
                        TimexClass::Vague => parent.meta().is_some_and(MetaKind::is_symbolic_ref),
                    }
            }
            Node::Event(e) => {
                let atemporal = is_meta(parent, MetaKind::Atemporal);
                let stative_over_eventive =
                    e.class.is_eventive() && parent.as_event().is_some_and(|p| !p.class.is_eventive());
                !is_meta(parent, MetaKind::Root)
                    && atemporal == (label == EdgeLabel::DependOn)
                    && !(strict && stative_over_eventive)
            }
        };
        if !ok {
            return false;
        }
    }
    let spans: Vec<_> = doc.anchored_nodes().iter().filter_map(Node::span).collect();
    spans.iter().enumerate().all(|(i, a)| spans[i + 1..].iter().all(|b| a.end <= b.start || b.end <= a.start))
}

#[test]
fn generated_valid_documents_are_clean() {
    let mut rng = rng(11);
    for i in 0..200 {
        let doc = random_document(&mut rng, &format!("d{i}"));
        assert!(satisfies_rules(&doc, true));
        let diagnostics = validate(&doc, Mode::Strict);
        assert!(diagnostics.is_empty(), "d{i}: {diagnostics:?}");
    }
}

/// Re-points a few edges at random parents with random labels.
fn scramble<R: Rng>(rng: &mut R, id: &str) -> Option<Document> {
    let draft = random_draft(rng, id);
    let mut draft = attach_randomly(rng, draft);
    let ids: Vec<String> = draft.nodes.iter().map(|n| n.id().to_owned()).collect();
    for _ in 0..rng.gen_range(0..=2) {
        let anchored: Vec<usize> = (0..draft.edges.len())
            .filter(|&i| MetaKind::from_id(draft.edges[i].child.as_str()).is_none())
            .collect();
        let Some(&i) = anchored.choose(rng) else { break };
        let parent = ids.choose(rng).unwrap();
        draft.edges[i] = Edge {
            child: draft.edges[i].child.clone(),
            parent: NodeId::new(parent.clone()),
            label: *EdgeLabel::ALL.choose(rng).unwrap(),
        };
    }
    // occasionally pull an unlocatable timex into the tree
    if rng.gen_bool(0.1) {
        if let Some(t) = draft
            .nodes
            .iter()
            .find(|n| n.as_timex().is_some_and(|t| t.class == TimexClass::Unlocatable))
        {
            draft.edges.push(Edge::new(t.id(), "PRESENT_REF", EdgeLabel::DependOn));
        }
    }
    draft.build().ok()
}

#[test]
fn validator_agrees_with_independent_predicates() {
    let mut rng = rng(12);
    let (mut clean, mut dirty) = (0, 0);
    for i in 0..2000 {
        let Some(doc) = scramble(&mut rng, &format!("s{i}")) else {
            continue;
        };
        for (mode, strict) in [(Mode::Strict, true), (Mode::Lenient, false)] {
            let errors: Vec<_> = validate(&doc, mode).into_iter().filter(|d| d.severity == Severity::Error).collect();
            assert_eq!(errors.is_empty(), satisfies_rules(&doc, strict), "s{i} {mode:?}: {errors:?}");
        }
        if validate(&doc, Mode::Strict).is_empty() {
            clean += 1;
        } else {
            dirty += 1;
        }
    }
    assert!(clean > 100 && dirty > 100, "clean {clean}, dirty {dirty}");
}

#[test]
fn lenient_only_downgrades() {
    let mut rng = rng(13);
    for i in 0..500 {
        let Some(doc) = scramble(&mut rng, &format!("l{i}")) else {
            continue;
        };
        let strict = validate(&doc, Mode::Strict);
        let lenient = validate(&doc, Mode::Lenient);
        assert_eq!(strict.len(), lenient.len());
        for (s, l) in strict.iter().zip(&lenient) {
            assert_eq!((s.rule, &s.node), (l.rule, &l.node));
            assert!(l.severity <= s.severity);
        }
    }
}
