use std::collections::HashMap;

use super::{ColoredTree, Shape};
use crate::sets::{set_partitions_of, Subset};

/// All reduced trees on labels `1..=n` whose uncolored vertices have at
/// least two children, optionally capped at `max_uncolored` uncolored
/// vertices. Sorted by number of uncolored vertices, then canonical form.
pub fn enumerate_trees(n: usize, max_uncolored: Option<usize>) -> Vec<ColoredTree> {
    if n < 2 {
        return Vec::new();
    }
    let cap = max_uncolored.unwrap_or(usize::MAX);
    let mut memo = HashMap::new();
    let mut out: Vec<(usize, ColoredTree)> = shapes(Subset::full(n), cap, &mut memo)
        .into_iter()
        .map(|(g, s)| (g, ColoredTree::from_shape(s)))
        .collect();
    out.sort();
    out.into_iter().map(|(_, t)| t).collect()
}

/// Shapes rooted at an uncolored vertex over `labels`, paired with their
/// uncolored-vertex count.
fn shapes(
    labels: Subset,
    cap: usize,
    memo: &mut HashMap<(Subset, usize), Vec<(usize, Shape)>>,
) -> Vec<(usize, Shape)> {
    if let Some(v) = memo.get(&(labels, cap)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if cap >= 1 {
        for p in set_partitions_of(labels) {
            if p.block_count() < 2 {
                continue;
            }
            let options: Vec<Vec<(usize, Shape)>> = p
                .blocks()
                .iter()
                .map(|&b| {
                    if b.len() == 1 {
                        vec![(0, Shape::Leaf(b.min_element().expect("nonempty")))]
                    } else {
                        shapes(b, cap - 1, memo)
                    }
                })
                .collect();
            let mut partial: Vec<(usize, Vec<Shape>)> = vec![(1, Vec::new())];
            for opts in &options {
                let mut next = Vec::new();
                for (g, children) in &partial {
                    for (h, s) in opts {
                        if g + h <= cap {
                            let mut c = children.clone();
                            c.push(s.clone());
                            next.push((g + h, c));
                        }
                    }
                }
                partial = next;
            }
            out.extend(partial.into_iter().map(|(g, c)| (g, Shape::Node(c))));
        }
    }
    memo.insert((labels, cap), out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_total_partition_numbers() {
        let counts: Vec<usize> = (2..=6).map(|n| enumerate_trees(n, None).len()).collect();
        assert_eq!(counts, vec![1, 4, 26, 236, 2752]);
    }

    #[test]
    fn cap_on_uncolored_vertices() {
        assert_eq!(enumerate_trees(4, Some(1)).len(), 1);
        assert!(enumerate_trees(5, Some(2)).iter().all(|t| t.g() <= 2));
        assert_eq!(enumerate_trees(1, None).len(), 0);
    }

    #[test]
    fn output_is_sorted_and_distinct() {
        let ts = enumerate_trees(5, None);
        for w in ts.windows(2) {
            assert!((w[0].g(), &w[0]) < (w[1].g(), &w[1]));
        }
    }
}
