//! Worked examples: validation, normalization and inference on the example fixtures.

use std::collections::BTreeMap;

use tdtree::inference::{infer_relation, CoarseRelation};
use tdtree::normalize::{render, resolve_all, resolve_all_with, NormalizeOptions};
use tdtree::validate::{has_errors, validate, validate_source};
use tdtree::{Document, EdgeLabel, Mode, Rule, Severity};
use tdtree_testkit::{fixture, load_fixture, EXAMPLES, MUTANTS};

fn rendered(doc: &Document) -> BTreeMap<String, String> {
    resolve_all(doc)
        .unwrap()
        .into_iter()
        .map(|(id, value)| (id.as_str().to_owned(), render(&value)))
        .collect()
}

fn example(slug: &str) -> Document {
    load_fixture(&format!("examples/{slug}.json"))
}

#[test]
fn examples_have_no_strict_errors() {
    for slug in EXAMPLES {
        let doc = example(slug);
        let diagnostics = validate(&doc, Mode::Strict);
        assert!(diagnostics.is_empty(), "{slug}: {diagnostics:?}");
    }
}

#[test]
fn mutants_trip_exactly_their_rule() {
    for (name, rule) in MUTANTS {
        let bytes = std::fs::read(fixture(&format!("mutants/{name}.json"))).unwrap();
        let rule = Rule::from_id(rule).unwrap();
        let strict = validate_source(&bytes, Mode::Strict).unwrap();
        let rules: Vec<_> = strict.iter().map(|d| (d.rule, d.severity)).collect();
        assert_eq!(rules, vec![(rule, Severity::Error)], "{name} strict: {strict:?}");

        let lenient = validate_source(&bytes, Mode::Lenient).unwrap();
        let expected = if rule == Rule::R10 { Severity::Warning } else { Severity::Error };
        let rules: Vec<_> = lenient.iter().map(|d| (d.rule, d.severity)).collect();
        assert_eq!(rules, vec![(rule, expected)], "{name} lenient: {lenient:?}");
        assert_eq!(has_errors(&lenient), rule != Rule::R10);
    }
}

#[test]
fn mutant_base_is_clean() {
    let bytes = std::fs::read(fixture("mutants/base.json")).unwrap();
    assert!(validate_source(&bytes, Mode::Strict).unwrap().is_empty());
}

#[test]
fn diagnostics_are_deterministic() {
    for (name, _) in MUTANTS {
        let bytes = std::fs::read(fixture(&format!("mutants/{name}.json"))).unwrap();
        let a = validate_source(&bytes, Mode::Strict).unwrap();
        let b = validate_source(&bytes, Mode::Strict).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn economy_2003_renders() {
    let values = rendered(&example("economy_2003"));
    assert_eq!(values["t1"], "2003");
    assert_eq!(values["t2"], "2003-03");
    assert_eq!(values["t3"], "2004");
}

#[test]
fn thursday_at_eight() {
    let values = rendered(&example("thursday_8am"));
    assert_eq!(values["t1"], "2003-04-05");
    assert_eq!(values["t2"], "2003-04-05T08:00:00");
}

#[test]
fn ten_minutes_later_renders() {
    let values = rendered(&example("ten_minutes_later"));
    assert!(values.values().any(|v| v == "2003-04-05T08:10"), "{values:?}");
}

#[test]
fn lexicon_can_be_disabled() {
    let doc = example("thursday_8am");
    let options = NormalizeOptions {
        demo_lexicon: false,
        ..NormalizeOptions::default()
    };
    let values = resolve_all_with(&doc, &options).unwrap();
    assert_eq!(render(&values[&tdtree::NodeId::new("t2")]), "UNRESOLVED(no semantics)");
}

#[test]
fn symbolic_references_render_by_name() {
    for slug in EXAMPLES {
        let values = rendered(&example(slug));
        assert_eq!(values["PAST_REF"], "PAST_REF");
        assert_eq!(values["PRESENT_REF"], "PRESENT_REF");
        assert_eq!(values["FUTURE_REF"], "FUTURE_REF");
    }
}

#[test]
fn economy_2003_relations() {
    use CoarseRelation::*;
    let doc = example("economy_2003");
    let resolved = resolve_all(&doc).unwrap();
    let single = |a, b| infer_relation(&doc, a, b, &resolved).unwrap().single_relation();
    assert_eq!(single("t1", "t2"), Some(Includes));
    assert_eq!(single("t1", "t3"), Some(Before));
    assert_eq!(single("t2", "t3"), Some(Before));
    assert_eq!(single("t3", "t1"), Some(After));
}

#[test]
fn thursday_events_fall_inside_their_timexes() {
    let doc = example("thursday_8am");
    let resolved = resolve_all(&doc).unwrap();
    let rel = infer_relation(&doc, "t1", "e1", &resolved).unwrap();
    assert_eq!(rel.single_relation(), Some(CoarseRelation::Includes));
    // Thursday includes 8:00am which includes "got"
    let rel = infer_relation(&doc, "t1", "e2", &resolved).unwrap();
    assert_eq!(rel.single_relation(), Some(CoarseRelation::Includes));
}

#[test]
fn narrative_chain_is_ordered() {
    let doc = example("arrived_walked_began");
    let resolved = resolve_all(&doc).unwrap();
    let rel = infer_relation(&doc, "e1", "e3", &resolved).unwrap();
    assert_eq!(rel.single_relation(), Some(CoarseRelation::Before));
    for e in ["e2", "e3"] {
        let (parent, label) = doc.tree.parent(e).unwrap();
        assert_eq!(label, EdgeLabel::Before);
        assert!(parent.id().starts_with('e'));
    }
}

#[test]
fn vague_examples_hang_off_symbolic_references() {
    for slug in ["once_upon", "recent_years", "in_the_future", "snowy_night"] {
        let doc = example(slug);
        for t in doc.timexes().filter(|t| t.class == tdtree::TimexClass::Vague) {
            let (parent, _) = doc.tree.parent(t.id.as_str()).unwrap();
            assert!(parent.meta().is_some_and(|m| m.is_symbolic_ref()), "{slug}: {}", t.id);
        }
    }
}
