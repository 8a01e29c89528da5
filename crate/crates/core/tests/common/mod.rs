//! Brute-force oracles shared by the integration tests. Everything here is
//! computed straight from the definitions, without calling the library's
//! own versions of the same quantity.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use boundary_lattice::trees::{EdgeId, NodeId};
use boundary_lattice::{ColoredTree, Partition, Subset};

/// `s(v) = e*_v + Σ s(c)` over uncolored children, zero at colored vertices.
pub fn subtree_sum(t: &ColoredTree, v: NodeId) -> Vec<i64> {
    let mut s = vec![0; t.g()];
    if let Some(k) = t.uncolored_index(v) {
        s[k - 1] += 1;
        for &c in t.children(v) {
            for (x, y) in s.iter_mut().zip(subtree_sum(t, c)) {
                *x += y;
            }
        }
    }
    s
}

pub fn edge_weights(t: &ColoredTree) -> BTreeMap<EdgeId, Vec<i64>> {
    t.edges()
        .map(|e| {
            let (p, c) = (t.edge_parent(e), t.edge_child(e));
            let w = subtree_sum(t, p)
                .iter()
                .zip(subtree_sum(t, c))
                .map(|(a, b)| a - b)
                .collect();
            (e, w)
        })
        .collect()
}

pub fn weighted_sum(t: &ColoredTree, m: &BTreeMap<EdgeId, u32>) -> Vec<i64> {
    let w = edge_weights(t);
    let mut s = vec![0; t.g()];
    for (e, &k) in m {
        for (x, y) in s.iter_mut().zip(&w[e]) {
            *x += i64::from(k) * y;
        }
    }
    s
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Root-to-colored-vertex edge paths, found by walking parents.
pub fn colored_paths(t: &ColoredTree) -> Vec<BTreeSet<EdgeId>> {
    (0..t.node_count())
        .filter(|&v| t.is_colored(v))
        .map(|v| {
            let mut path = BTreeSet::new();
            let mut cur = v;
            while let Some(p) = t.parent(cur) {
                path.insert(cur);
                cur = p;
            }
            path
        })
        .collect()
}

/// Every edge set meeting each root-to-colored path exactly once.
pub fn mcs_brute(t: &ColoredTree) -> Vec<Vec<EdgeId>> {
    let e = t.edge_count();
    assert!(e < 24, "too many edges for brute force");
    let paths = colored_paths(t);
    let mut out = Vec::new();
    for mask in 0u32..(1 << e) {
        let y: Vec<EdgeId> = (1..=e).filter(|&k| mask & (1 << (k - 1)) != 0).collect();
        if paths
            .iter()
            .all(|p| y.iter().filter(|k| p.contains(k)).count() == 1)
        {
            out.push(y);
        }
    }
    out.sort();
    out
}

/// Labels below each edge of `y`, as a partition key.
pub fn partition_brute(t: &ColoredTree, y: &[EdgeId]) -> Option<String> {
    let blocks: Vec<Subset> = y
        .iter()
        .map(|&e| {
            let c = t.edge_child(e);
            Subset::from_elements(
                (0..t.node_count())
                    .filter(|&v| t.is_colored(v) && (v == c || is_below(t, v, c)))
                    .map(|v| t.label(v).unwrap()),
            )
        })
        .collect();
    if blocks.len() < 2 {
        return None;
    }
    Some(Partition::new(blocks).ok()?.key())
}

fn is_below(t: &ColoredTree, mut v: NodeId, ancestor: NodeId) -> bool {
    while let Some(p) = t.parent(v) {
        if p == ancestor {
            return true;
        }
        v = p;
    }
    false
}

/// `n_P = Σ_{S ∈ P} k(S)`, with `k` indexed by the given subsets.
pub fn pull_push_brute(subsets: &[Subset], k: &[i64], partitions: &[Partition]) -> Vec<i64> {
    let index: BTreeMap<Subset, i64> = subsets.iter().copied().zip(k.iter().copied()).collect();
    partitions
        .iter()
        .map(|p| {
            p.blocks()
                .iter()
                .map(|b| index.get(b).copied().unwrap_or(0))
                .sum()
        })
        .collect()
}

/// The four-point relation for markings `i, j, k, l` as a map on partition keys.
pub fn four_point_relation(i: u32, j: u32, k: u32, l: u32) -> BTreeMap<String, i64> {
    let key = |blocks: &[&[u32]]| {
        Partition::new(
            blocks
                .iter()
                .map(|b| Subset::from_elements(b.iter().copied()))
                .collect(),
        )
        .unwrap()
        .key()
    };
    BTreeMap::from([
        (key(&[&[i, j], &[k], &[l]]), 1),
        (key(&[&[i], &[j], &[k, l]]), 1),
        (key(&[&[i, j], &[k, l]]), -1),
        (key(&[&[i], &[j], &[k], &[l]]), -1),
    ])
}

/// Reduced colored trees with labels `1..=n`, counted by brute force over
/// parent arrays and deduplicated by canonical form.
pub fn trees_by_parent_arrays(n: usize, max_uncolored: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for g in 1..=max_uncolored {
        // Uncolored vertices 0..g with 0 the root; colored leaves g..g+n.
        let total = g + n;
        let mut parents = vec![0usize; total];
        fill(&mut parents, 1, g, &mut out);
    }
    out
}

fn fill(parents: &mut Vec<usize>, i: usize, g: usize, out: &mut BTreeSet<String>) {
    if i == parents.len() {
        if let Some(s) = nested_if_valid(parents, g) {
            out.insert(s);
        }
        return;
    }
    for p in 0..g {
        // An uncolored vertex's parent has a smaller index, so no cycles.
        if i < g && p >= i {
            continue;
        }
        parents[i] = p;
        fill(parents, i + 1, g, out);
    }
}

fn nested_if_valid(parents: &[usize], g: usize) -> Option<String> {
    let mut children = vec![Vec::new(); g];
    for (v, &p) in parents.iter().enumerate().skip(1) {
        children[p].push(v);
    }
    if children.iter().any(|c| c.len() < 2) {
        return None;
    }
    fn render(v: usize, g: usize, children: &[Vec<usize>]) -> String {
        if v >= g {
            return (v - g + 1).to_string();
        }
        let parts: Vec<String> = children[v]
            .iter()
            .map(|&c| render(c, g, children))
            .collect();
        format!("({})", parts.join(","))
    }
    Some(
        ColoredTree::from_nested(&render(0, g, &children))
            .ok()?
            .to_nested(),
    )
}
