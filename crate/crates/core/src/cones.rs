//! The cone `C(Γ)` dual to the weight cone, its generator set `G(Γ)` and
//! an exact check that the generators are the extreme rays.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::intlinalg::{self, IntMatrix, LinalgError};
use crate::trees::{ColoredTree, NodeId};
use crate::weights::{label_weights, total_weight, WeightVector};
use crate::Result;

/// Coordinate `k - 1` is the coefficient of `e_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct RayVector(pub Vec<i64>);

impl RayVector {
    pub fn basis(g: usize, k: usize) -> Self {
        let mut v = vec![0; g];
        v[k - 1] = 1;
        RayVector(v)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_primitive(&self) -> bool {
        self.0.iter().fold(0i64, |acc, &x| num_integer::gcd(acc, x)) == 1
    }
}

/// `G(v)` for the subtree at the uncolored vertex `v`, in the coordinates of
/// the whole tree.
pub(crate) fn generators_at(t: &ColoredTree, v: NodeId) -> Vec<RayVector> {
    let g = t.g();
    let k = t.uncolored_index(v).expect("uncolored vertex");
    let base = RayVector::basis(g, k);
    let mut acc = vec![base.clone()];
    for &c in t.children(v) {
        if t.is_colored(c) {
            continue;
        }
        let child = generators_at(t, c);
        let mut next = Vec::with_capacity(acc.len() * (child.len() + 1));
        for partial in &acc {
            next.push(partial.clone());
            for w in &child {
                let mut x = partial.clone();
                for i in 0..g {
                    x.0[i] += w.0[i] - base.0[i];
                }
                next.push(x);
            }
        }
        acc = next;
    }
    acc
}

/// `G(Γ)` in lexicographic order. Empty for a tree without uncolored
/// vertices.
pub fn generators(t: &ColoredTree) -> Vec<RayVector> {
    if t.is_colored(t.root()) {
        return Vec::new();
    }
    let mut out = generators_at(t, t.root());
    out.sort();
    out
}

pub fn pair(w: &WeightVector, v: &RayVector) -> Result<i64> {
    if w.dim() != v.0.len() {
        return Err(LinalgError::DimensionMismatch(format!(
            "weight of length {} paired with ray of length {}",
            w.dim(),
            v.0.len()
        ))
        .into());
    }
    Ok(w.coords().iter().zip(&v.0).map(|(a, b)| a * b).sum())
}

/// `Π (r_i + 1)` over the principal subtrees, recursively.
pub fn ray_count(t: &ColoredTree) -> u64 {
    fn at(t: &ColoredTree, v: NodeId) -> u64 {
        t.children(v)
            .iter()
            .map(|&c| if t.is_colored(c) { 1 } else { at(t, c) + 1 })
            .product()
    }
    if t.is_colored(t.root()) {
        0
    } else {
        at(t, t.root())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    /// `<w_d, v> >= 0` for every edge weight and generator.
    pub nonnegative: bool,
    /// No generator is a nonnegative combination of the others.
    pub minimal: bool,
    /// The generators span a space of dimension `g`.
    pub full_rank: bool,
    /// `<s, v> = 1` for every generator.
    pub total_weight_pairs_to_one: bool,
    pub primitive: bool,
    pub distinct: bool,
    /// Brute-force extreme rays of the dual of the weight cone agree with the
    /// generators. Only computed for small trees.
    pub extreme_rays_match: Option<bool>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.nonnegative
            && self.minimal
            && self.full_rank
            && self.total_weight_pairs_to_one
            && self.primitive
            && self.distinct
            && self.extreme_rays_match != Some(false)
    }
}

/// Largest number of `(g-1)`-subsets of weights examined by the extreme-ray
/// brute force.
const EXTREME_RAY_BUDGET: u64 = 20_000;

pub fn verify_duality(t: &ColoredTree) -> Result<DualityReport> {
    let gens = generators(t);
    let g = t.g();
    let mut weights: Vec<WeightVector> = label_weights(t).into_values().collect();
    weights.sort();
    weights.dedup();
    let s = total_weight(t);

    let mut nonnegative = true;
    for w in &weights {
        for v in &gens {
            nonnegative &= pair(w, v)? >= 0;
        }
    }
    let mut total_weight_pairs_to_one = true;
    for v in &gens {
        total_weight_pairs_to_one &= pair(&s, v)? == 1;
    }
    let minimal = (0..gens.len()).all(|j| {
        let others: Vec<&RayVector> = gens
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, v)| v)
            .collect();
        !in_cone(&others, &gens[j], g)
    });
    let gen_rows: Vec<Vec<i64>> = gens.iter().map(|v| v.0.clone()).collect();
    let full_rank = intlinalg::rank(&IntMatrix::from_i64_rows(&gen_rows, g)?)? == g;
    let primitive = gens.iter().all(RayVector::is_primitive);
    let mut sorted = gens.clone();
    sorted.dedup();
    let distinct = sorted.len() == gens.len();

    let extreme_rays_match = if g >= 1
        && weights.len() + 1 >= g
        && binomial(weights.len() as u64, g as u64 - 1) <= EXTREME_RAY_BUDGET
    {
        Some(extreme_rays(&weights, g)? == sorted)
    } else {
        None
    };
    Ok(DualityReport {
        nonnegative,
        minimal,
        full_rank,
        total_weight_pairs_to_one,
        primitive,
        distinct,
        extreme_rays_match,
    })
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Extreme rays of `{v : <w, v> >= 0 for all w}`, primitive and sorted: every
/// ray cut out by `g - 1` independent tight inequalities that satisfies the
/// rest.
fn extreme_rays(weights: &[WeightVector], g: usize) -> Result<Vec<RayVector>> {
    let mut rays = Vec::new();
    let mut subset: Vec<usize> = (0..g - 1).collect();
    loop {
        let rows: Vec<Vec<i64>> = subset.iter().map(|&i| weights[i].0.clone()).collect();
        let kernel = intlinalg::kernel_basis(&IntMatrix::from_i64_rows(&rows, g)?)?;
        if kernel.rows() == 1 {
            let r: Vec<i64> = kernel.to_i64_rows().expect("small entries").swap_remove(0);
            for sign in [1, -1] {
                let cand: Vec<i64> = r.iter().map(|x| sign * x).collect();
                let ok = weights
                    .iter()
                    .all(|w| w.0.iter().zip(&cand).map(|(a, b)| a * b).sum::<i64>() >= 0);
                if ok {
                    rays.push(RayVector(cand));
                }
            }
        }
        // next combination
        let k = subset.len();
        let Some(i) = (0..k).rev().find(|&i| subset[i] < weights.len() - k + i) else {
            break;
        };
        subset[i] += 1;
        for j in i + 1..k {
            subset[j] = subset[j - 1] + 1;
        }
    }
    rays.sort();
    rays.dedup();
    Ok(rays)
}

/// Exact feasibility of `Σ λ_i v_i = target`, `λ >= 0`, by phase-one simplex
/// over the rationals with Bland's rule.
fn in_cone(vs: &[&RayVector], target: &RayVector, g: usize) -> bool {
    let m = vs.len();
    let width = m + g + 1;
    let rhs = width - 1;
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    let mut tab: Vec<Vec<BigRational>> = (0..g)
        .map(|r| {
            let sign = if target.0[r] < 0 { -1 } else { 1 };
            let mut row = vec![BigRational::zero(); width];
            for (j, v) in vs.iter().enumerate() {
                row[j] = q(sign * v.0[r]);
            }
            row[m + r] = q(1);
            row[rhs] = q(sign * target.0[r]);
            row
        })
        .collect();
    let mut basis: Vec<usize> = (m..m + g).collect();
    // reduced costs of the phase-one objective (sum of artificials)
    let mut cost = vec![BigRational::zero(); width];
    for row in &tab {
        for j in 0..m {
            cost[j] -= &row[j];
        }
        cost[rhs] -= &row[rhs];
    }
    while let Some(enter) = (0..m + g).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[rhs] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            // unbounded phase-one objective cannot happen; it is bounded below by 0
            unreachable!("phase one is bounded");
        };
        let p = tab[r][enter].clone();
        for x in tab[r].iter_mut() {
            *x /= &p;
        }
        let pivot_row = tab[r].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        let f = cost[enter].clone();
        for (x, y) in cost.iter_mut().zip(&pivot_row) {
            *x -= &f * y;
        }
        basis[r] = enter;
    }
    cost[rhs].is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rays(t: &str) -> Vec<Vec<i64>> {
        generators(&ColoredTree::from_nested(t).unwrap())
            .into_iter()
            .map(|v| v.0)
            .collect()
    }

    #[test]
    fn two_cherries_generators() {
        let mut got = rays("((1,2),(3,4))");
        got.sort();
        let mut want = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, -1]];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn star_has_one_generator() {
        assert_eq!(rays("(1,2,3,4)"), vec![vec![1]]);
        assert_eq!(
            ray_count(&ColoredTree::from_nested("(1,2,3,4)").unwrap()),
            1
        );
    }

    #[test]
    fn product_formula_on_deeper_tree() {
        // two principal subtrees with two rays each
        let t = ColoredTree::from_nested("((1,(2,3)),(4,(5,6)))").unwrap();
        assert_eq!(ray_count(&t), 9);
        assert_eq!(generators(&t).len(), 9);
    }

    #[test]
    fn pairing_values() {
        let t = ColoredTree::from_nested("((1,2),(3,4))").unwrap();
        let s = total_weight(&t);
        assert!(generators(&t).iter().all(|v| pair(&s, v).unwrap() == 1));
        let w = label_weights(&t);
        assert_eq!(pair(&w[&1], &RayVector::basis(3, 1)).unwrap(), 0);
        assert_eq!(
            pair(&WeightVector::basis(3, 2), &RayVector::basis(3, 2)).unwrap(),
            1
        );
        assert!(pair(&WeightVector::basis(2, 1), &RayVector::basis(3, 1)).is_err());
    }

    #[test]
    fn duality_checks() {
        for s in [
            "((1,2),(3,4))",
            "(1,2,3)",
            "((1,(2,3)),(4,(5,6)))",
            "(((1,2),3))",
            "(1,(2,(3,(4,5))))",
        ] {
            let r = verify_duality(&ColoredTree::from_nested(s).unwrap()).unwrap();
            assert!(r.passed(), "{s}: {r:?}");
            assert_eq!(r.extreme_rays_match, Some(true), "{s}");
        }
    }

    #[test]
    fn cone_membership() {
        let e1 = RayVector(vec![1, 0]);
        let e2 = RayVector(vec![0, 1]);
        assert!(in_cone(&[&e1, &e2], &RayVector(vec![2, 3]), 2));
        assert!(!in_cone(&[&e1, &e2], &RayVector(vec![-1, 3]), 2));
        assert!(!in_cone(&[&e1], &RayVector(vec![1, 1]), 2));
    }
}
