//! Edge weights `w_d` of a colored tree and certificates for equal weight
//! sums of disjoint edge multisets.
//!
//! Writing `s(v)` for the sum of `e*_v` and `s(c)` over uncolored children
//! `c` of `v`, the edge `v -> c` has weight `s(v) - s(c)` (with `s = 0` at
//! colored vertices). Coordinate `k - 1` of a [`WeightVector`] is the
//! coefficient of `e*_k`, `k` being the post-order index.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::trees::{ColoredTree, EdgeId, NodeId};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct WeightVector(pub Vec<i64>);

impl WeightVector {
    pub fn zero(g: usize) -> Self {
        WeightVector(vec![0; g])
    }

    /// The dual basis vector `e*_k`, `k` in `1..=g`.
    pub fn basis(g: usize, k: usize) -> Self {
        let mut v = vec![0; g];
        v[k - 1] = 1;
        WeightVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    fn add_scaled(&mut self, other: &WeightVector, c: i64) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += c * b;
        }
    }
}

/// Edge multiplicities.
pub type EdgeMultiset = BTreeMap<EdgeId, u32>;

/// `s(v)` for every vertex, indexed by vertex.
pub(crate) fn subtree_sums(t: &ColoredTree) -> Vec<WeightVector> {
    let g = t.g();
    let mut s = vec![WeightVector::zero(g); t.node_count()];
    for v in t.post_order() {
        if let Some(k) = t.uncolored_index(v) {
            let mut acc = WeightVector::basis(g, k);
            for &c in t.children(v) {
                acc.add_scaled(&s[c], 1);
            }
            s[v] = acc;
        }
    }
    s
}

/// `w_d` for every edge.
pub fn label_weights(t: &ColoredTree) -> BTreeMap<EdgeId, WeightVector> {
    let s = subtree_sums(t);
    t.edges()
        .map(|e| {
            let mut w = s[t.edge_parent(e)].clone();
            w.add_scaled(&s[e], -1);
            (e, w)
        })
        .collect()
}

/// `s(root)`: the weight of any path from the principal vertex to a colored
/// vertex.
pub fn total_weight(t: &ColoredTree) -> WeightVector {
    subtree_sums(t).swap_remove(t.root())
}

fn check_multisets(t: &ColoredTree, a: &EdgeMultiset, b: &EdgeMultiset) -> Result<()> {
    for e in a.keys().chain(b.keys()) {
        if !t.is_edge(*e) {
            return Err(Error::InvalidInput(format!("edge x{e} does not exist")));
        }
    }
    if let Some(e) = a
        .iter()
        .find(|(e, &m)| m > 0 && b.get(e).is_some_and(|&m| m > 0))
    {
        return Err(Error::InvalidInput(format!(
            "multisets share edge x{}",
            e.0
        )));
    }
    Ok(())
}

fn multiset_sum(
    t: &ColoredTree,
    weights: &BTreeMap<EdgeId, WeightVector>,
    m: &EdgeMultiset,
) -> WeightVector {
    let mut acc = WeightVector::zero(t.g());
    for (e, &k) in m {
        acc.add_scaled(&weights[e], k as i64);
    }
    acc
}

/// Whether the weights over `a` and over `b` have the same sum. The
/// multisets must have disjoint supports.
pub fn weight_sum_equal(t: &ColoredTree, a: &EdgeMultiset, b: &EdgeMultiset) -> Result<bool> {
    check_multisets(t, a, b)?;
    let w = label_weights(t);
    Ok(multiset_sum(t, &w, a) == multiset_sum(t, &w, b))
}

/// Two paths from `anchor` down to colored vertices, one drawn from each
/// multiset. Edges are listed top-down.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathPair {
    pub anchor: NodeId,
    pub a: Vec<EdgeId>,
    pub b: Vec<EdgeId>,
    pub a_end: u32,
    pub b_end: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingCertificate {
    pub pairs: Vec<PathPair>,
}

#[derive(Clone, Debug)]
struct OpenPath {
    edges: Vec<EdgeId>,
    end: u32,
}

/// Splits `a` and `b` into pairs of paths sharing a top vertex, following
/// the induction over principal subtrees. Returns `None` exactly when the
/// weight sums differ.
pub fn pairing_certificate(
    t: &ColoredTree,
    a: &EdgeMultiset,
    b: &EdgeMultiset,
) -> Result<Option<PairingCertificate>> {
    check_multisets(t, a, b)?;
    let mut pairs = Vec::new();
    if t.is_colored(t.root()) {
        return Ok(Some(PairingCertificate { pairs }));
    }
    let mult = |m: &EdgeMultiset, e: EdgeId| i64::from(m.get(&e).copied().unwrap_or(0));
    match pair_below(t, t.root(), 0, &|e| (mult(a, e), mult(b, e)), &mut pairs) {
        Some(open) => {
            debug_assert!(open.is_empty());
            Ok(Some(PairingCertificate { pairs }))
        }
        None => Ok(None),
    }
}

/// Pairs everything below the uncolored vertex `v` given that the child
/// edges of `v` carry `k` more copies from `a` than from `b`. Returns the
/// `|k|` unpaired full paths from `v` (from `a` if `k > 0`).
fn pair_below(
    t: &ColoredTree,
    v: NodeId,
    k: i64,
    mult: &dyn Fn(EdgeId) -> (i64, i64),
    pairs: &mut Vec<PathPair>,
) -> Option<Vec<OpenPath>> {
    let mut from_a = Vec::new();
    let mut from_b = Vec::new();
    let mut balance = 0;
    for &d in t.child_edges(v) {
        let (alpha, beta) = mult(d);
        balance += alpha - beta;
        let below = match t.label(d) {
            Some(l) => {
                vec![
                    OpenPath {
                        edges: Vec::new(),
                        end: l
                    };
                    (alpha + beta) as usize
                ]
            }
            None => pair_below(t, d, alpha - beta, mult, pairs)?,
        };
        let side = if alpha > 0 { &mut from_a } else { &mut from_b };
        for mut p in below {
            p.edges.insert(0, d);
            side.push(p);
        }
    }
    if balance != k {
        return None;
    }
    let key = |p: &OpenPath| (p.end, p.edges.clone());
    from_a.sort_by_key(key);
    from_b.sort_by_key(key);
    let matched = from_a.len().min(from_b.len());
    for (pa, pb) in from_a.drain(..matched).zip(from_b.drain(..matched)) {
        pairs.push(PathPair {
            anchor: v,
            a: pa.edges,
            b: pb.edges,
            a_end: pa.end,
            b_end: pb.end,
        });
    }
    from_a.extend(from_b);
    Some(from_a)
}

/// Re-checks a certificate without reference to how it was built: every
/// half of every pair must be a simple downward path from the anchor to the
/// stated colored vertex, the two halves must leave the anchor by different
/// edges, and the halves must add up to `a` and `b`.
pub fn verify_certificate(
    t: &ColoredTree,
    a: &EdgeMultiset,
    b: &EdgeMultiset,
    cert: &PairingCertificate,
) -> bool {
    let is_path = |anchor: NodeId, edges: &[EdgeId], end: u32| -> bool {
        let mut remaining: Vec<EdgeId> = edges.to_vec();
        let mut cur = anchor;
        while !remaining.is_empty() {
            let Some(i) = remaining
                .iter()
                .position(|&e| t.is_edge(e) && t.edge_parent(e) == cur)
            else {
                return false;
            };
            cur = t.edge_child(remaining.swap_remove(i));
        }
        !edges.is_empty() && t.label(cur) == Some(end)
    };
    let mut sum_a = EdgeMultiset::new();
    let mut sum_b = EdgeMultiset::new();
    for p in &cert.pairs {
        if p.anchor >= t.node_count()
            || !is_path(p.anchor, &p.a, p.a_end)
            || !is_path(p.anchor, &p.b, p.b_end)
            || p.a[0] == p.b[0]
        {
            return false;
        }
        for &e in &p.a {
            *sum_a.entry(e).or_default() += 1;
        }
        for &e in &p.b {
            *sum_b.entry(e).or_default() += 1;
        }
    }
    let strip = |m: &EdgeMultiset| -> EdgeMultiset {
        m.iter()
            .filter(|(_, &k)| k > 0)
            .map(|(&e, &k)| (e, k))
            .collect()
    };
    sum_a == strip(a) && sum_b == strip(b)
}
