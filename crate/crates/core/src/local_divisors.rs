//! Invariant Weil divisors of the local toric model of a colored tree and
//! the local Cartier criterion.
//!
//! Divisors correspond to minimally complete edge subsets `Y`: sets meeting
//! every path from the principal vertex to a colored vertex exactly once.
//! A divisor `Σ a_Y D_Y` is Cartier when some `u` satisfies `<u, v_Y> = a_Y`
//! for every `Y`; equivalently `a` is orthogonal to every integer relation
//! among the columns of the edge-by-`Y` incidence matrix.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::cones::RayVector;
use crate::intlinalg::{kernel_basis, to_big, IntMatrix, Solver};
use crate::sets::{Partition, Subset};
use crate::trees::{ColoredTree, EdgeId, NodeId};
use crate::weights::{subtree_sums, WeightVector};
use crate::{Error, Result};

/// A sorted set of edge ids.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSet(Vec<EdgeId>);

impl EdgeSet {
    pub fn new(mut edges: Vec<EdgeId>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        EdgeSet(edges)
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.0
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `"1,5,6"`.
    pub fn key(&self) -> String {
        self.0
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{{}}}",
            self.0
                .iter()
                .map(|e| format!("x{e}"))
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

impl fmt::Display for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

impl FromStr for EdgeSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let edges = s
            .split(',')
            .map(|p| {
                let p = p.trim();
                let p = p.strip_prefix('x').unwrap_or(p);
                p.parse::<EdgeId>()
                    .map_err(|_| Error::InvalidInput(format!("bad edge {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EdgeSet::new(edges))
    }
}

impl Serialize for EdgeSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.key())
    }
}

/// Minimally complete subsets of the subtree at the uncolored vertex `v`.
fn mcs_at(t: &ColoredTree, v: NodeId) -> Vec<Vec<EdgeId>> {
    let mut acc: Vec<Vec<EdgeId>> = vec![Vec::new()];
    for &d in t.child_edges(v) {
        let mut options = vec![vec![d]];
        if !t.is_colored(d) {
            options.extend(mcs_at(t, d));
        }
        acc = acc
            .iter()
            .flat_map(|partial| {
                options.iter().map(move |o| {
                    let mut x = partial.clone();
                    x.extend_from_slice(o);
                    x
                })
            })
            .collect();
    }
    acc
}

/// All minimally complete subsets, sorted lexicographically.
pub fn minimally_complete_subsets(t: &ColoredTree) -> Vec<EdgeSet> {
    if t.is_colored(t.root()) {
        return Vec::new();
    }
    let mut out: Vec<EdgeSet> = mcs_at(t, t.root()).into_iter().map(EdgeSet::new).collect();
    out.sort();
    out
}

/// True when every path from the principal vertex to a colored vertex
/// meets `y` in exactly one edge, and `y` only names edges of `t`.
pub fn is_minimally_complete(t: &ColoredTree, y: &EdgeSet) -> bool {
    y.edges().iter().all(|&e| t.is_edge(e))
        && !y.is_empty()
        && t.colored_paths()
            .iter()
            .all(|p| p.iter().filter(|&&e| y.contains(e)).count() == 1)
}

fn require_mcs(t: &ColoredTree, y: &EdgeSet) -> Result<()> {
    if is_minimally_complete(t, y) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{y:?} is not minimally complete"
        )))
    }
}

/// The ray `v_Y` of the divisor `D_Y`.
pub fn ray_of_subset(t: &ColoredTree, y: &EdgeSet) -> Result<RayVector> {
    require_mcs(t, y)?;
    Ok(ray_at(t, t.root(), y))
}

fn ray_at(t: &ColoredTree, v: NodeId, y: &EdgeSet) -> RayVector {
    let g = t.g();
    let base = RayVector::basis(g, t.uncolored_index(v).expect("uncolored vertex"));
    let mut out = base.clone();
    for &d in t.child_edges(v) {
        if y.contains(d) || t.is_colored(d) {
            continue;
        }
        let below = ray_at(t, d, y);
        for i in 0..g {
            out.0[i] += below.0[i] - base.0[i];
        }
    }
    out
}

/// The partition cut out by `y`: one block per edge, holding the labels
/// below it.
pub fn partition_of_subset(t: &ColoredTree, y: &EdgeSet) -> Result<Partition> {
    require_mcs(t, y)?;
    if y.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "{y:?} cuts a single block, which is not a partition with two or more blocks"
        )));
    }
    Partition::new(
        y.edges()
            .iter()
            .map(|&e| t.labels_below(t.edge_child(e)))
            .collect(),
    )
}

/// Inverse of [`partition_of_subset`]: for each block, the edge entering the
/// lowest common ancestor of its colored vertices.
pub fn subset_of_partition(t: &ColoredTree, p: &Partition) -> Result<EdgeSet> {
    if p.ground() != t.labels() {
        return Err(Error::NotCompatible(format!("{p} (label sets differ)")));
    }
    let mut y = Vec::with_capacity(p.block_count());
    for &block in p.blocks() {
        let lca = lowest_common_ancestor(t, block);
        if lca == t.root() {
            return Err(Error::NotCompatible(p.key()));
        }
        y.push(lca);
    }
    let y = EdgeSet::new(y);
    if !is_minimally_complete(t, &y) || partition_of_subset(t, &y)? != *p {
        return Err(Error::NotCompatible(p.key()));
    }
    Ok(y)
}

fn lowest_common_ancestor(t: &ColoredTree, labels: Subset) -> NodeId {
    let paths: Vec<Vec<EdgeId>> = labels
        .elements()
        .map(|l| t.path_from_root(t.vertex_of_label(l).expect("label present")))
        .collect();
    let common = (0..)
        .take_while(|&i| {
            paths[0]
                .get(i)
                .is_some_and(|e| paths.iter().all(|p| p.get(i) == Some(e)))
        })
        .count();
    if common == 0 {
        t.root()
    } else {
        paths[0][common - 1]
    }
}

/// Integer coefficients `a_Y` over minimally complete subsets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct LocalDivisorVector {
    pub coeffs: BTreeMap<EdgeSet, i64>,
}

impl LocalDivisorVector {
    pub fn coefficient(&self, y: &EdgeSet) -> i64 {
        self.coeffs.get(y).copied().unwrap_or(0)
    }

    pub fn from_dense(mcs: &[EdgeSet], values: &[i64]) -> Self {
        LocalDivisorVector {
            coeffs: mcs
                .iter()
                .zip(values)
                .filter(|(_, &c)| c != 0)
                .map(|(y, &c)| (y.clone(), c))
                .collect(),
        }
    }

    /// Coefficients in the order of `mcs`; fails on keys outside `mcs`.
    pub fn to_dense(&self, mcs: &[EdgeSet]) -> Result<Vec<i64>> {
        if let Some(y) = self.coeffs.keys().find(|y| mcs.binary_search(y).is_err()) {
            return Err(Error::InvalidInput(format!(
                "{y:?} is not minimally complete"
            )));
        }
        Ok(mcs.iter().map(|y| self.coefficient(y)).collect())
    }

    /// Parses `{"1,2": 1, "3,4,5,6": -1}`.
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: BTreeMap<String, i64> = serde_json::from_str(s)?;
        let mut coeffs = BTreeMap::new();
        for (k, c) in raw {
            if coeffs.insert(k.parse::<EdgeSet>()?, c).is_some() {
                return Err(Error::InvalidInput(format!("edge set {k:?} given twice")));
            }
        }
        Ok(LocalDivisorVector { coeffs })
    }
}

/// Uncolored vertices in generator order: the principal vertex, then the
/// others by post-order index.
pub fn generator_vertices(t: &ColoredTree) -> Vec<NodeId> {
    let g = t.g();
    let mut out = vec![t.root()];
    out.extend((1..g).map(|k| t.uncolored_vertex(k).expect("index in range")));
    out
}

/// `D_k`: the sum of `D_Y` over the `Y` containing an edge below `v_k`, for
/// each uncolored vertex in [`generator_vertices`] order.
pub fn local_cartier_generators(t: &ColoredTree) -> Vec<LocalDivisorVector> {
    let mcs = minimally_complete_subsets(t);
    generator_vertices(t)
        .into_iter()
        .map(|v| LocalDivisorVector {
            coeffs: mcs
                .iter()
                .filter(|y| {
                    y.edges()
                        .iter()
                        .any(|&e| t.is_descendant(t.edge_parent(e), v))
                })
                .map(|y| (y.clone(), 1))
                .collect(),
        })
        .collect()
}

/// The linear functional `s_k` (weight of the subtree at `v_k`) that cuts out
/// `D_k`, in [`generator_vertices`] order.
pub fn local_cartier_functionals(t: &ColoredTree) -> Vec<WeightVector> {
    let s = subtree_sums(t);
    generator_vertices(t)
        .into_iter()
        .map(|v| s[v].clone())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalCartierDecision {
    pub cartier: bool,
    /// `u` with `<u, v_Y> = a_Y` for every `Y`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WeightVector>,
    /// A kernel vector `m` over the minimally complete subsets with
    /// `Σ m_Y a_Y != 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violated_relation: Option<Vec<i64>>,
}

/// Precomputed data for deciding many divisors on one tree.
#[derive(Clone, Debug)]
pub struct LocalCartierChecker {
    tree: ColoredTree,
    mcs: Vec<EdgeSet>,
    rays: Vec<RayVector>,
    /// Integer relations among the incidence columns, one per row.
    relations: IntMatrix,
    /// Solves `R u = a` with the rays as rows of `R`.
    ray_solver: Solver,
    /// Solves `G c = a` with the generators `D_k` as columns of `G`.
    generator_solver: Solver,
}

impl LocalCartierChecker {
    pub fn new(t: &ColoredTree) -> Result<Self> {
        let mcs = minimally_complete_subsets(t);
        let edges = t.edge_count();
        let incidence =
            IntMatrix::from_fn(edges, mcs.len(), |e, j| i64::from(mcs[j].contains(e + 1)));
        let relations = kernel_basis(&incidence)?;
        let rays: Vec<RayVector> = mcs.iter().map(|y| ray_at(t, t.root(), y)).collect();
        let ray_rows: Vec<Vec<i64>> = rays.iter().map(|r| r.0.clone()).collect();
        let ray_solver = Solver::new(&IntMatrix::from_i64_rows(&ray_rows, t.g())?)?;
        let gens = local_cartier_generators(t);
        let gen_matrix =
            IntMatrix::from_fn(mcs.len(), gens.len(), |i, k| gens[k].coefficient(&mcs[i]));
        let generator_solver = Solver::new(&gen_matrix)?;
        Ok(LocalCartierChecker {
            tree: t.clone(),
            mcs,
            rays,
            relations,
            ray_solver,
            generator_solver,
        })
    }

    pub fn tree(&self) -> &ColoredTree {
        &self.tree
    }

    pub fn subsets(&self) -> &[EdgeSet] {
        &self.mcs
    }

    pub fn rays(&self) -> &[RayVector] {
        &self.rays
    }

    /// The relation lattice, rows indexed like [`Self::subsets`].
    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Cartier test by orthogonality to the relation lattice.
    pub fn orthogonality_test(&self, a: &[i64]) -> Option<Vec<i64>> {
        let a = to_big(a);
        (0..self.relations.rows())
            .map(|i| self.relations.row(i))
            .find(|m| {
                !m.iter()
                    .zip(&a)
                    .map(|(x, y)| x * y)
                    .sum::<BigInt>()
                    .is_zero()
            })
            .map(|m| {
                m.iter()
                    .map(|x| x.to_i64().expect("small relation"))
                    .collect()
            })
    }

    /// Cartier test by solving `<u, v_Y> = a_Y`.
    pub fn functional_test(&self, a: &[i64]) -> Result<Option<WeightVector>> {
        Ok(self.ray_solver.solve(&to_big(a))?.map(|u| {
            WeightVector(
                u.iter()
                    .map(|x| x.to_i64().expect("small witness"))
                    .collect(),
            )
        }))
    }

    pub fn decide_dense(&self, a: &[i64]) -> Result<LocalCartierDecision> {
        if a.len() != self.mcs.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients, got {}",
                self.mcs.len(),
                a.len()
            )));
        }
        let violated = self.orthogonality_test(a);
        let witness = self.functional_test(a)?;
        if violated.is_some() == witness.is_some() {
            return Err(Error::PropertyViolation(format!(
                "kernel test and functional solve disagree on {a:?} for tree {}",
                self.tree.to_nested()
            )));
        }
        if let Some(u) = &witness {
            let ok = self
                .rays
                .iter()
                .zip(a)
                .all(|(v, &ay)| u.0.iter().zip(&v.0).map(|(p, q)| p * q).sum::<i64>() == ay);
            if !ok {
                return Err(Error::PropertyViolation(
                    "witness does not reproduce the divisor".into(),
                ));
            }
        }
        Ok(LocalCartierDecision {
            cartier: witness.is_some(),
            witness,
            violated_relation: violated,
        })
    }

    pub fn decide(&self, a: &LocalDivisorVector) -> Result<LocalCartierDecision> {
        self.decide_dense(&a.to_dense(&self.mcs)?)
    }

    /// Integer coefficients `c_k` with `a = Σ c_k D_k`, in
    /// [`generator_vertices`] order.
    pub fn decompose(&self, a: &LocalDivisorVector) -> Result<Vec<BigInt>> {
        let dense = to_big(&a.to_dense(&self.mcs)?);
        self.generator_solver
            .solve(&dense)?
            .ok_or_else(|| Error::NotCartier("not an integer combination of the D_k".into()))
    }
}

/// Decides whether `a` is Cartier on `t` by two independent routes and
/// reports a witness functional or a violated relation.
pub fn is_cartier_local(t: &ColoredTree, a: &LocalDivisorVector) -> Result<LocalCartierDecision> {
    LocalCartierChecker::new(t)?.decide(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig() -> ColoredTree {
        ColoredTree::from_nested("((1,2),(3,4))").unwrap()
    }

    fn es(s: &str) -> EdgeSet {
        s.parse().unwrap()
    }

    #[test]
    fn two_cherries_subsets() {
        let keys: Vec<String> = minimally_complete_subsets(&fig())
            .iter()
            .map(EdgeSet::key)
            .collect();
        assert_eq!(keys, vec!["1,2", "1,5,6", "2,3,4", "3,4,5,6"]);
    }

    #[test]
    fn two_cherries_rays() {
        let t = fig();
        assert_eq!(ray_of_subset(&t, &es("1,2")).unwrap().0, vec![0, 0, 1]);
        assert_eq!(ray_of_subset(&t, &es("3,4,5,6")).unwrap().0, vec![1, 1, -1]);
        assert_eq!(ray_of_subset(&t, &es("1,5,6")).unwrap().0, vec![0, 1, 0]);
        assert!(ray_of_subset(&t, &es("1,5")).is_err());
    }

    #[test]
    fn two_cherries_partitions() {
        let t = fig();
        assert_eq!(
            partition_of_subset(&t, &es("1,2")).unwrap().key(),
            "1,2|3,4"
        );
        assert_eq!(
            partition_of_subset(&t, &es("3,4,5,6")).unwrap().key(),
            "1|2|3|4"
        );
        assert_eq!(
            subset_of_partition(&t, &"1,2|3|4".parse().unwrap())
                .unwrap()
                .key(),
            "1,5,6"
        );
        assert!(matches!(
            subset_of_partition(&t, &"1,3|2,4".parse().unwrap()),
            Err(Error::NotCompatible(_))
        ));
    }

    #[test]
    fn two_cherries_generators() {
        let gens = local_cartier_generators(&fig());
        let keys: Vec<Vec<String>> = gens
            .iter()
            .map(|d| d.coeffs.keys().map(EdgeSet::key).collect())
            .collect();
        assert_eq!(
            keys,
            vec![
                vec!["1,2", "1,5,6", "2,3,4", "3,4,5,6"],
                vec!["2,3,4", "3,4,5,6"],
                vec!["1,5,6", "3,4,5,6"],
            ]
        );
    }

    #[test]
    fn generators_are_cartier_with_subtree_weights() {
        for s in ["((1,2),(3,4))", "((1,(2,3)),4,(5,6))", "(((1,2),3))"] {
            let t = ColoredTree::from_nested(s).unwrap();
            let checker = LocalCartierChecker::new(&t).unwrap();
            for (d, s_k) in local_cartier_generators(&t)
                .iter()
                .zip(local_cartier_functionals(&t))
            {
                let dec = checker.decide(d).unwrap();
                assert!(dec.cartier);
                let dense = d.to_dense(checker.subsets()).unwrap();
                for (v, a) in checker.rays().iter().zip(dense) {
                    assert_eq!(s_k.0.iter().zip(&v.0).map(|(p, q)| p * q).sum::<i64>(), a);
                }
            }
        }
    }

    #[test]
    fn two_cherries_condition() {
        let t = fig();
        let checker = LocalCartierChecker::new(&t).unwrap();
        // order: {1,2}, {1,5,6}, {2,3,4}, {3,4,5,6}
        for a in [[1, 0, 0, 0], [1, 1, 0, 0], [2, 1, 1, 0], [0, 1, -1, 0]] {
            let expect = a[0] + a[3] == a[1] + a[2];
            assert_eq!(checker.decide_dense(&a).unwrap().cartier, expect, "{a:?}");
        }
        let dec = checker.decide_dense(&[1, 0, 0, 0]).unwrap();
        assert!(dec.violated_relation.is_some() && dec.witness.is_none());
    }

    #[test]
    fn decomposition_in_generators() {
        let t = fig();
        let checker = LocalCartierChecker::new(&t).unwrap();
        let a = LocalDivisorVector::from_dense(checker.subsets(), &[2, 1, 3, 2]);
        let c = checker.decompose(&a).unwrap();
        assert_eq!(c, to_big(&[2, 1, -1]));
        let bad = LocalDivisorVector::from_dense(checker.subsets(), &[1, 0, 0, 0]);
        assert!(checker.decompose(&bad).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let t = fig();
        let mut a = LocalDivisorVector::default();
        a.coeffs.insert(es("1,3"), 1);
        assert!(is_cartier_local(&t, &a).is_err());
        let parsed = LocalDivisorVector::from_json(r#"{"x1,x2": 1, "3,4,5,6": 1}"#).unwrap();
        assert_eq!(parsed.coefficient(&es("1,2")), 1);
    }
}
