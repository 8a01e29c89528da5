use num_traits::ToPrimitive;
use serde::Serialize;

use super::pushpull::pushpull_matrix;
use crate::intlinalg::{image_contains, kernel_basis, rank, row_lattice_basis, IntMatrix};
use crate::local_divisors::{partition_of_subset, LocalCartierChecker, LocalDivisorVector};
use crate::trees::enumerate_trees;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrosscheckReport {
    pub n: usize,
    pub trees: usize,
    /// Rank of the lattice of type-II vectors that are Cartier on every tree.
    pub local_rank: usize,
    /// Rank of the image of `q*p*`.
    pub image_rank: usize,
    pub lattices_equal: bool,
    /// A vector in one lattice but not the other, over partitions in
    /// canonical order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separating_vector: Option<Vec<i64>>,
    /// Tree-by-tree decisions on the image basis vectors.
    pub local_decisions: usize,
    pub local_rejections: usize,
}

impl CrosscheckReport {
    pub fn passed(&self) -> bool {
        self.lattices_equal && self.local_rejections == 0
    }
}

/// Compares the lattice of type-II vectors that are locally Cartier on
/// every enumerated tree with the image of `q*p*`.
///
/// Each tree contributes its local relations (integer relations among the
/// incidence columns of its minimally complete subsets), carried to
/// partition coordinates through the subset-to-partition dictionary. The
/// locally Cartier lattice is the common orthogonal complement of all of
/// them.
pub fn local_global_crosscheck(n: usize) -> Result<CrosscheckReport> {
    let pp = pushpull_matrix(n)?;
    let trees = enumerate_trees(n, None);
    let width = pp.cols.len();

    let mut checkers = Vec::with_capacity(trees.len());
    let mut column_maps = Vec::with_capacity(trees.len());
    let mut relation_rows: Vec<Vec<i64>> = Vec::new();
    for t in &trees {
        let checker = LocalCartierChecker::new(t)?;
        let cols: Vec<usize> = checker
            .subsets()
            .iter()
            .map(|y| {
                let p = partition_of_subset(t, y)?;
                pp.col_index(&p).ok_or_else(|| {
                    Error::PropertyViolation(format!("partition {p} missing from the column index"))
                })
            })
            .collect::<Result<_>>()?;
        let rel = checker.relations();
        for i in 0..rel.rows() {
            let mut row = vec![0i64; width];
            for (k, &c) in cols.iter().enumerate() {
                row[c] = rel.get(i, k).to_i64().expect("small relation");
            }
            relation_rows.push(row);
        }
        checkers.push(checker);
        column_maps.push(cols);
    }

    let relations = IntMatrix::from_i64_rows(&relation_rows, width)?;
    let local = kernel_basis(&relations)?;
    let local_basis = row_lattice_basis(&local)?;
    let image_basis = row_lattice_basis(&pp.matrix)?;
    let lattices_equal = local_basis == image_basis;

    let separating_vector = if lattices_equal {
        None
    } else {
        find_separating(&local_basis, &image_basis)?
            .or(find_separating(&image_basis, &local_basis)?)
    };

    let mut local_decisions = 0;
    let mut local_rejections = 0;
    for i in 0..image_basis.rows() {
        let v: Vec<i64> = image_basis
            .row(i)
            .iter()
            .map(|x| x.to_i64().expect("small basis entry"))
            .collect();
        for (checker, cols) in checkers.iter().zip(&column_maps) {
            let restricted: Vec<i64> = cols.iter().map(|&c| v[c]).collect();
            let a = LocalDivisorVector::from_dense(checker.subsets(), &restricted);
            local_decisions += 1;
            if !checker.decide(&a)?.cartier {
                local_rejections += 1;
            }
        }
    }

    Ok(CrosscheckReport {
        n,
        trees: trees.len(),
        local_rank: rank(&local_basis)?,
        image_rank: rank(&image_basis)?,
        lattices_equal,
        separating_vector,
        local_decisions,
        local_rejections,
    })
}

/// A row of `a` outside the row lattice of `b`.
fn find_separating(a: &IntMatrix, b: &IntMatrix) -> Result<Option<Vec<i64>>> {
    let bt = b.transpose();
    for i in 0..a.rows() {
        if !image_contains(&bt, a.row(i))? {
            return Ok(Some(
                a.row(i)
                    .iter()
                    .map(|x| x.to_i64().unwrap_or(i64::MAX))
                    .collect(),
            ));
        }
    }
    Ok(None)
}
