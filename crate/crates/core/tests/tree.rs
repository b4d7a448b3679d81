//! Spanning-tree shape, root paths and common ancestors on random trees.

use tdtree::model::TemporalDependencyTree;
use tdtree::{Edge, EdgeLabel, TreeError};
use tdtree_testkit::{random_document, rng};

/// Ancestors of `id`, itself first, computed by walking `parent`.
fn ancestors(tree: &TemporalDependencyTree, id: &str) -> Vec<String> {
    let mut out = vec![id.to_owned()];
    let mut current = id.to_owned();
    while let Some((parent, _)) = tree.parent(&current) {
        current = parent.id().to_owned();
        out.push(current.clone());
    }
    out
}

#[test]
fn random_trees_are_spanning_trees() {
    let mut rng = rng(71);
    for i in 0..100 {
        let doc = random_document(&mut rng, &format!("t{i}"));
        let tree = &doc.tree;
        assert_eq!(tree.edges().count(), tree.len() - 1);
        for node in tree.nodes() {
            let path = tree.path_to_root(node.id()).unwrap();
            assert_eq!(path.len(), tree.depth(node.id()).unwrap());
            let top = path.last().map_or(node.id(), |e| e.parent.as_str());
            assert_eq!(top, "ROOT");
            for w in path.windows(2) {
                assert_eq!(w[0].parent, w[1].child);
            }
        }
    }
}

#[test]
fn common_ancestor_is_the_deepest_shared_one() {
    let mut rng = rng(72);
    for i in 0..50 {
        let doc = random_document(&mut rng, &format!("l{i}"));
        let tree = &doc.tree;
        for a in tree.nodes() {
            for b in tree.nodes() {
                let lca = tree.lowest_common_ancestor(a.id(), b.id()).unwrap();
                let pa = ancestors(tree, a.id());
                let pb = ancestors(tree, b.id());
                let expected = pa.iter().find(|x| pb.contains(x)).unwrap();
                assert_eq!(lca, expected);
                assert_eq!(lca, tree.lowest_common_ancestor(b.id(), a.id()).unwrap());
            }
        }
    }
}

#[test]
fn structural_violations_are_rejected() {
    let nodes = tdtree::model::meta_nodes();
    let mut edges = tdtree::model::meta_edges();
    edges.push(Edge::new("DCT", "PAST_REF", EdgeLabel::DependOn));
    assert!(matches!(
        TemporalDependencyTree::build(nodes.clone(), edges),
        Err(TreeError::MultipleParents(_))
    ));
    let mut edges = tdtree::model::meta_edges();
    edges.pop();
    assert!(matches!(TemporalDependencyTree::build(nodes, edges), Err(TreeError::MissingParent(_))));
}
