//! Round-trip laws for the tree file format: rendering any tree and
//! parsing it back must reproduce the tree exactly, whatever identifiers
//! the original file used.

use proptest::prelude::*;

use treebraid::tree_io::{parse_tree, render_tree};
use treebraid_core::tree::{build_tree, RootedPlaneTree};

fn tree_strategy() -> impl Strategy<Value = RootedPlaneTree> {
    (2usize..12)
        .prop_flat_map(|v| {
            proptest::collection::vec(1usize..v.max(2), v.saturating_sub(2))
                .prop_map(move |raw_parents| (v, raw_parents))
        })
        .prop_map(|(v, raw_parents)| {
            let mut children: Vec<Vec<usize>> = vec![Vec::new(); v];
            children[0].push(1);
            for (i, raw) in raw_parents.iter().enumerate() {
                let vertex = i + 2;
                let parent = 1 + raw % (vertex - 1);
                children[parent].push(vertex);
            }
            build_tree(0, &children)
                .expect("parents below children give a valid tree")
                .tree
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rendering_then_parsing_is_the_identity(tree in tree_strategy()) {
        let parsed = parse_tree(&render_tree(&tree)).expect("rendered trees parse");
        prop_assert_eq!(parsed.tree, tree);
    }

    /// Sparse, shuffled identifiers in the input relabel into depth-first
    /// order, and the recorded input names invert that relabelling.
    #[test]
    fn input_labels_invert_the_relabelling(tree in tree_strategy(), stride in 1usize..7) {
        // Re-render with identifiers spread out by a stride, so input ids
        // and working ids disagree everywhere past the root.
        let mut text = String::from("root 0\n");
        for v in 0..tree.vertex_count() {
            let children = tree.children(v as u32);
            if children.is_empty() {
                continue;
            }
            text.push_str(&format!("{}:", v * stride));
            for &c in children {
                text.push_str(&format!(" {}", c as usize * stride));
            }
            text.push('\n');
        }
        let parsed = parse_tree(&text).expect("strided trees parse");
        prop_assert_eq!(&parsed.tree, &tree);
        for v in 0..tree.vertex_count() {
            prop_assert_eq!(parsed.input_label[v], v * stride);
            prop_assert_eq!(parsed.working_label(v * stride), Some(v as u32));
        }
    }
}
