use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ColoredTree, Shape};
use crate::{Error, Result};

/// A tree as it appears on disk, before any validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTree {
    pub root: i64,
    pub vertices: Vec<RawVertex>,
    pub edges: Vec<[i64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawVertex {
    pub id: i64,
    pub colored: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: &'static str, failure: Option<String>) -> bool {
        let passed = failure.is_none();
        self.checks.push(CheckResult {
            name,
            passed,
            detail: failure,
        });
        passed
    }

    fn skip(&mut self, names: &[&'static str]) {
        for &name in names {
            self.push(name, Some("not checked: tree structure is broken".into()));
        }
    }
}

const STRUCTURE_DEPENDENT: [&str; 5] = [
    "acyclic",
    "connected",
    "root_uncolored",
    "one_colored_vertex_per_path",
    "uncolored_leaves_absent",
];

/// Runs every structural check and reports each one separately.
pub fn validate_tree(t: &RawTree) -> ValidationReport {
    let mut report = ValidationReport { checks: Vec::new() };

    let mut index: BTreeMap<i64, usize> = BTreeMap::new();
    let mut dup = None;
    for (i, v) in t.vertices.iter().enumerate() {
        if index.insert(v.id, i).is_some() {
            dup.get_or_insert(v.id);
        }
    }
    let ids_ok = report.push(
        "vertex_ids_unique",
        dup.map(|id| format!("vertex id {id} repeated")),
    );

    let bad_edge = t
        .edges
        .iter()
        .find(|[p, c]| !index.contains_key(p) || !index.contains_key(c) || p == c);
    let edges_ok = report.push(
        "edges_reference_vertices",
        bad_edge.map(|[p, c]| format!("edge [{p}, {c}] is a loop or names a missing vertex")),
    );

    let root_ok = report.push(
        "root_exists",
        (!index.contains_key(&t.root)).then(|| format!("root {} is not a vertex", t.root)),
    );

    let mut parent: BTreeMap<i64, i64> = BTreeMap::new();
    let mut multi = None;
    for &[p, c] in &t.edges {
        if parent.insert(c, p).is_some() {
            multi.get_or_insert(c);
        }
    }
    let root_has_parent = parent.contains_key(&t.root);
    let parent_ok = report.push(
        "single_parent",
        match (multi, root_has_parent) {
            (Some(c), _) => Some(format!("vertex {c} has more than one parent")),
            (None, true) => Some(format!("root {} has a parent", t.root)),
            _ => None,
        },
    );

    let label_mismatch = t.vertices.iter().find(|v| v.colored != v.label.is_some());
    report.push(
        "labels_match_coloring",
        label_mismatch.map(|v| format!("vertex {}: label present iff colored", v.id)),
    );

    let labels: Vec<u32> = t.vertices.iter().filter_map(|v| v.label).collect();
    let distinct: BTreeSet<u32> = labels.iter().copied().collect();
    let n = labels.len();
    let bijective = distinct.len() == n
        && (1..=crate::sets::MAX_N).contains(&n)
        && distinct.iter().copied().eq(1..=n as u32);
    report.push(
        "labels_bijective",
        (!bijective).then(|| format!("labels {labels:?} are not a permutation of 1..n")),
    );

    if !(ids_ok && edges_ok && root_ok && parent_ok) {
        report.skip(&STRUCTURE_DEPENDENT);
        return report;
    }

    let mut children: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for &[p, c] in &t.edges {
        children.entry(p).or_default().push(c);
    }
    // With unique parents and a parentless root, the graph is a forest plus
    // possibly cycles away from the root; a walk from the root finds the tree.
    let mut seen = BTreeSet::new();
    let mut stack = vec![t.root];
    while let Some(v) = stack.pop() {
        if seen.insert(v) {
            stack.extend(children.get(&v).into_iter().flatten().copied());
        }
    }
    let unreachable: Vec<i64> = index
        .keys()
        .filter(|id| !seen.contains(id))
        .copied()
        .collect();
    let cyclic = unreachable.iter().find(|&&v| {
        let mut cur = v;
        for _ in 0..=t.vertices.len() {
            match parent.get(&cur) {
                Some(&p) => cur = p,
                None => return false,
            }
        }
        true
    });
    report.push(
        "acyclic",
        cyclic.map(|v| format!("vertex {v} lies on a cycle")),
    );
    report.push(
        "connected",
        (!unreachable.is_empty())
            .then(|| format!("vertices {unreachable:?} are not reachable from the root")),
    );
    if !unreachable.is_empty() {
        report.skip(&STRUCTURE_DEPENDENT[2..]);
        return report;
    }

    let colored = |id: i64| t.vertices[index[&id]].colored;
    report.push(
        "root_uncolored",
        colored(t.root).then(|| "the principal vertex must be uncolored".to_string()),
    );

    // Colored vertices strictly above a colored vertex break the path rule.
    let mut stacked = None;
    for v in &t.vertices {
        if !v.colored {
            continue;
        }
        let mut cur = v.id;
        while let Some(&p) = parent.get(&cur) {
            if colored(p) {
                stacked.get_or_insert((p, v.id));
                break;
            }
            cur = p;
        }
    }
    report.push(
        "one_colored_vertex_per_path",
        stacked.map(|(a, b)| format!("colored vertex {b} lies below colored vertex {a}")),
    );

    // In the reduced tree every uncolored vertex must reach a colored one.
    fn reaches_colored(
        v: i64,
        children: &BTreeMap<i64, Vec<i64>>,
        colored: &dyn Fn(i64) -> bool,
    ) -> bool {
        colored(v)
            || children
                .get(&v)
                .is_some_and(|cs| cs.iter().any(|&c| reaches_colored(c, children, colored)))
    }
    let mut dead = None;
    let mut stack = vec![t.root];
    while let Some(v) = stack.pop() {
        if colored(v) {
            continue;
        }
        if !reaches_colored(v, &children, &colored) {
            dead.get_or_insert(v);
            continue;
        }
        stack.extend(children.get(&v).into_iter().flatten().copied());
    }
    report.push(
        "uncolored_leaves_absent",
        dead.map(|v| format!("uncolored vertex {v} has no colored vertex below it")),
    );
    report
}

/// Validates, drops everything strictly below colored vertices and returns
/// the canonical form.
pub fn reduce_tree(t: &RawTree) -> Result<ColoredTree> {
    let report = validate_tree(t);
    if let Some(f) = report.failures().next() {
        return Err(Error::InvalidTree(format!(
            "{}: {}",
            f.name,
            f.detail.clone().unwrap_or_default()
        )));
    }
    let mut children: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for &[p, c] in &t.edges {
        children.entry(p).or_default().push(c);
    }
    let by_id: BTreeMap<i64, &RawVertex> = t.vertices.iter().map(|v| (v.id, v)).collect();
    fn build(
        v: i64,
        children: &BTreeMap<i64, Vec<i64>>,
        by_id: &BTreeMap<i64, &RawVertex>,
    ) -> Shape {
        match by_id[&v].label {
            Some(l) => Shape::Leaf(l),
            None => Shape::Node(
                children
                    .get(&v)
                    .into_iter()
                    .flatten()
                    .map(|&c| build(c, children, by_id))
                    .collect(),
            ),
        }
    }
    Ok(ColoredTree::from_shape(build(t.root, &children, &by_id)))
}
