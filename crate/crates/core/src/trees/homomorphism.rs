use super::{tree_for_partition, ColoredTree, NodeId};
use crate::sets::Partition;

/// A tree homomorphism `source -> target`: the root goes to the root, each
/// edge is either collapsed or sent onto an edge, colored vertices go to the
/// colored vertex with the same label, and every fiber is connected.
/// Equivalently `target` is obtained from `source` by contracting edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeHomomorphism {
    pub target: ColoredTree,
    /// `map[v]` is the image of source vertex `v`.
    pub map: Vec<NodeId>,
}

/// Searches for a homomorphism by backtracking over source vertices in
/// canonical (breadth-first) order.
pub fn find_homomorphism(source: &ColoredTree, target: &ColoredTree) -> Option<TreeHomomorphism> {
    if source.labels() != target.labels() {
        return None;
    }
    let n = source.node_count();
    let mut map = vec![usize::MAX; n];
    let mut entered = vec![false; target.node_count()];
    map[0] = target.root();
    if source.is_colored(0) != target.is_colored(0) {
        return None;
    }
    if extend(source, target, 1, &mut map, &mut entered) {
        Some(TreeHomomorphism {
            target: target.clone(),
            map,
        })
    } else {
        None
    }
}

fn extend(
    s: &ColoredTree,
    t: &ColoredTree,
    v: NodeId,
    map: &mut [NodeId],
    entered: &mut [bool],
) -> bool {
    if v == s.node_count() {
        return true;
    }
    let up = map[s.parent(v).expect("non-root vertex")];
    let candidates = std::iter::once(up).chain(t.children(up).iter().copied());
    for w in candidates {
        let collapse = w == up;
        let fits = match s.label(v) {
            Some(l) => !collapse && t.label(w) == Some(l),
            None => !t.is_colored(w),
        };
        if !fits || (!collapse && entered[w]) {
            continue;
        }
        map[v] = w;
        if !collapse {
            entered[w] = true;
        }
        if extend(s, t, v + 1, map, entered) {
            return true;
        }
        if !collapse {
            entered[w] = false;
        }
    }
    map[v] = usize::MAX;
    false
}

/// Whether `p` is compatible with `t`, i.e. `t` maps homomorphically onto
/// the model tree of `p`.
pub fn is_compatible(p: &Partition, t: &ColoredTree) -> bool {
    compatibility_witness(p, t).is_some()
}

/// The homomorphism onto the model tree of `p`, when one exists.
pub fn compatibility_witness(p: &Partition, t: &ColoredTree) -> Option<TreeHomomorphism> {
    let model = tree_for_partition(p).ok()?;
    find_homomorphism(t, &model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig() -> ColoredTree {
        ColoredTree::from_nested("((1,2),(3,4))").unwrap()
    }

    #[test]
    fn two_cherries_compatibilities() {
        let t = fig();
        let h = compatibility_witness(&"1,2|3,4".parse().unwrap(), &t).unwrap();
        assert_eq!(h.map, vec![0, 1, 2, 3, 4, 5, 6]);
        let star = compatibility_witness(&Partition::singletons(4), &t).unwrap();
        assert_eq!(&star.map[..3], &[0, 0, 0]);
        assert!(!is_compatible(&"1,3|2,4".parse().unwrap(), &t));
        assert!(is_compatible(&"1,2|3|4".parse().unwrap(), &t));
        assert!(is_compatible(&"1|2|3,4".parse().unwrap(), &t));
        assert!(!is_compatible(&"1,2,3|4".parse().unwrap(), &t));
    }

    #[test]
    fn label_sets_must_agree() {
        assert!(!is_compatible(&"1|2|3".parse().unwrap(), &fig()));
    }

    #[test]
    fn chains_collapse() {
        let chain = ColoredTree::from_nested("(((1,2),3))").unwrap();
        assert!(is_compatible(&"1,2|3".parse().unwrap(), &chain));
        assert!(is_compatible(&"1|2|3".parse().unwrap(), &chain));
        assert!(!is_compatible(&"1|2,3".parse().unwrap(), &chain));
    }
}
