use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{check_n, DivisorVector};
use crate::intlinalg::{kernel_basis, to_big, IntMatrix, Solver};
use crate::sets::{nontrivial_partitions, proper_subsets, Partition, Subset};
use crate::{Error, Result};

/// The incidence matrix of `S ∈ P`: rows are nonempty proper subsets,
/// columns are partitions with at least two blocks. As a map it is `p*q*`;
/// its transpose is `q*p*`.
#[derive(Clone, Debug)]
pub struct PushPull {
    pub n: usize,
    pub rows: Vec<Subset>,
    pub cols: Vec<Partition>,
    pub matrix: IntMatrix,
}

impl PushPull {
    pub fn row_index(&self, s: Subset) -> Option<usize> {
        self.rows.binary_search(&s).ok()
    }

    pub fn col_index(&self, p: &Partition) -> Option<usize> {
        self.cols.binary_search(p).ok()
    }

    /// `q*p* k`: the partition vector `P -> Σ_{S ∈ P} k(S)`.
    pub fn pull_push(&self, k: &[BigInt]) -> Result<Vec<BigInt>> {
        if k.len() != self.rows.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} subset coefficients, got {}",
                self.rows.len(),
                k.len()
            )));
        }
        Ok(self
            .cols
            .iter()
            .map(|p| {
                p.blocks()
                    .iter()
                    .map(|&b| &k[self.row_index(b).expect("blocks are proper subsets")])
                    .sum()
            })
            .collect())
    }

    /// CSV with a header row of partition keys and a leading column of
    /// subset keys.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("subset");
        for p in &self.cols {
            out.push_str(",\"");
            out.push_str(&p.key());
            out.push('"');
        }
        out.push('\n');
        for (i, s) in self.rows.iter().enumerate() {
            out.push('"');
            out.push_str(&s.key());
            out.push('"');
            for x in self.matrix.row(i) {
                out.push(',');
                out.push_str(&x.to_string());
            }
            out.push('\n');
        }
        out
    }
}

pub fn pushpull_matrix(n: usize) -> Result<PushPull> {
    check_n(n)?;
    let rows = proper_subsets(n);
    let cols = nontrivial_partitions(n);
    crate::intlinalg::check_size(rows.len(), cols.len())?;
    let mut matrix = IntMatrix::zeros(rows.len(), cols.len());
    for (j, p) in cols.iter().enumerate() {
        for &b in p.blocks() {
            let i = rows.binary_search(&b).expect("blocks are proper subsets");
            matrix.set(i, j, BigInt::from(1));
        }
    }
    Ok(PushPull {
        n,
        rows,
        cols,
        matrix,
    })
}

/// Basis of the relation lattice `ker p*q*`, one relation per row, columns
/// indexed by partitions in canonical order.
pub fn relations_basis(n: usize) -> Result<IntMatrix> {
    Ok(kernel_basis(&pushpull_matrix(n)?.matrix)?)
}

/// Membership in the image of `q*p*` for one `n`.
#[derive(Clone, Debug)]
pub struct CartierLattice {
    pushpull: PushPull,
    solver: Solver,
}

impl CartierLattice {
    pub fn new(n: usize) -> Result<Self> {
        let pushpull = pushpull_matrix(n)?;
        let solver = Solver::new(&pushpull.matrix.transpose())?;
        Ok(CartierLattice { pushpull, solver })
    }

    pub fn pushpull(&self) -> &PushPull {
        &self.pushpull
    }

    pub fn rank(&self) -> usize {
        self.solver.rank()
    }

    fn check(&self, d: &DivisorVector) -> Result<()> {
        if d.n != self.pushpull.n {
            return Err(Error::InvalidInput(format!(
                "divisor has n = {}, lattice has n = {}",
                d.n, self.pushpull.n
            )));
        }
        d.validate()
    }

    /// Some `k` over nonempty proper subsets with `q*p* k` equal to the
    /// type-II part, or `None`.
    pub fn preimage(&self, d: &DivisorVector) -> Result<Option<Vec<BigInt>>> {
        self.check(d)?;
        let b = to_big(&d.type_ii_dense(&self.pushpull.cols));
        Ok(self.solver.solve(&b)?)
    }

    /// Type-I divisors are always Cartier; the type-II part must lie in the
    /// image of `q*p*`.
    pub fn is_cartier(&self, d: &DivisorVector) -> Result<bool> {
        Ok(self.preimage(d)?.is_some())
    }

    /// The explicit preimage built from simple partitions: `k({1})` is the
    /// all-singletons coefficient, `k({i}) = 0` for `i >= 2`, and
    /// `k(S) = n_{P_S} - Σ_{i ∉ S} k({i})` where `P_S` is `S` plus
    /// singletons. Fails with [`Error::NotCartier`] when it does not map
    /// back onto the type-II part.
    pub fn witness(&self, d: &DivisorVector) -> Result<Vec<i64>> {
        self.check(d)?;
        let pp = &self.pushpull;
        let n = pp.n;
        let n_sing = d.type_ii_coefficient(&Partition::singletons(n));
        let singleton_value = |i: u32| if i == 1 { n_sing } else { 0 };
        let k: Vec<i64> = pp
            .rows
            .iter()
            .map(|&s| {
                if s.len() == 1 {
                    singleton_value(s.min_element().expect("nonempty"))
                } else {
                    let p_s = simple_partition_of(n, s);
                    let outside: i64 = (1..=n as u32)
                        .filter(|&i| !s.contains(i))
                        .map(singleton_value)
                        .sum();
                    d.type_ii_coefficient(&p_s) - outside
                }
            })
            .collect();
        let image = pp.pull_push(&to_big(&k))?;
        let target = to_big(&d.type_ii_dense(&pp.cols));
        if image != target {
            let (j, _) = image
                .iter()
                .zip(&target)
                .enumerate()
                .find(|(_, (a, b))| a != b)
                .expect("vectors differ");
            return Err(Error::NotCartier(format!(
                "the simple-partition preimage misses the coefficient of {} ({} instead of {})",
                pp.cols[j],
                image[j].to_i64().unwrap_or(i64::MAX),
                target[j]
            )));
        }
        Ok(k)
    }
}

/// `S` together with singletons for the rest of `{1..n}`.
pub(crate) fn simple_partition_of(n: usize, s: Subset) -> Partition {
    let mut blocks = vec![s];
    blocks.extend(
        Subset::full(n)
            .difference(s)
            .elements()
            .map(Subset::singleton),
    );
    Partition::new(blocks).expect("disjoint blocks")
}

pub fn is_cartier_global(n: usize, d: &DivisorVector) -> Result<bool> {
    CartierLattice::new(n)?.is_cartier(d)
}

/// See [`CartierLattice::witness`].
pub fn cartier_witness(n: usize, d: &DivisorVector) -> Result<Vec<i64>> {
    CartierLattice::new(n)?.witness(d)
}
