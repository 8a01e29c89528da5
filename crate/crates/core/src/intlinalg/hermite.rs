//! Row-style Hermite normal form and everything built on it: rank,
//! integer kernels, integer solving and lattice comparison.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::scalar::{convert_rows, negate_row, sub_multiple, to_big_rows, Scalar};
use super::{check_size, IntMatrix, LinalgError};

/// `U * M = H` with `U` unimodular and `H` in row Hermite form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hermite {
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// Pivot column of each nonzero row of `h`, strictly increasing.
    pub pivots: Vec<usize>,
}

impl Hermite {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// In-place row Hermite reduction of `h` (columns `0..cols`), applying the
/// same row operations to `u` when given. Returns pivot columns, or `None`
/// on scalar overflow.
///
/// Pivot rule: the smallest nonzero absolute value in the column, ties to
/// the lowest row index. Pivots end positive, entries above a pivot are
/// reduced into `[0, pivot)`.
pub(crate) fn hnf_rows<T: Scalar>(
    h: &mut [Vec<T>],
    mut u: Option<&mut [Vec<T>]>,
    cols: usize,
) -> Option<Vec<usize>> {
    let nrows = h.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == nrows {
            break;
        }
        loop {
            let best = (r..nrows)
                .filter(|&i| !h[i][c].is_zero())
                .min_by(|&a, &b| h[a][c].cmp_abs(&h[b][c]));
            let Some(p) = best else { break };
            if p != r {
                h.swap(p, r);
                if let Some(u) = u.as_deref_mut() {
                    u.swap(p, r);
                }
            }
            let mut clean = true;
            for i in r + 1..nrows {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_trunc(&h[r][c])?;
                if !q.is_zero() {
                    let (top, bottom) = h.split_at_mut(i);
                    sub_multiple(&mut bottom[0], &top[r], &q, c)?;
                    if let Some(u) = u.as_deref_mut() {
                        let (top, bottom) = u.split_at_mut(i);
                        sub_multiple(&mut bottom[0], &top[r], &q, 0)?;
                    }
                }
                if !h[i][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            negate_row(&mut h[r][c..])?;
            if let Some(u) = u.as_deref_mut() {
                negate_row(&mut u[r])?;
            }
        }
        for i in 0..r {
            if h[i][c].is_zero() {
                continue;
            }
            let q = h[i][c].div_floor(&h[r][c])?;
            if !q.is_zero() {
                let (top, bottom) = h.split_at_mut(r);
                sub_multiple(&mut top[i], &bottom[0], &q, c)?;
                if let Some(u) = u.as_deref_mut() {
                    let (top, bottom) = u.split_at_mut(r);
                    sub_multiple(&mut top[i], &bottom[0], &q, 0)?;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Some(pivots)
}

fn identity_rows<T: Scalar>(n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| {
            let mut row = vec![T::zero(); n];
            row[i] = T::one();
            row
        })
        .collect()
}

type HnfRows = (Vec<Vec<BigInt>>, Option<Vec<Vec<BigInt>>>, Vec<usize>);

fn hnf_typed<T: Scalar>(rows: &[Vec<BigInt>], cols: usize, with_u: bool) -> Option<HnfRows> {
    let mut h: Vec<Vec<T>> = convert_rows(rows)?;
    let mut u: Option<Vec<Vec<T>>> = with_u.then(|| identity_rows(rows.len()));
    let pivots = hnf_rows(&mut h, u.as_deref_mut(), cols)?;
    Some((to_big_rows(&h), u.as_deref().map(to_big_rows), pivots))
}

/// Runs the reduction in `i64`, falling back to `BigInt` on overflow.
fn hnf_adaptive(rows: &[Vec<BigInt>], cols: usize, with_u: bool) -> HnfRows {
    hnf_typed::<i64>(rows, cols, with_u)
        .or_else(|| hnf_typed::<BigInt>(rows, cols, with_u))
        .expect("BigInt elimination cannot overflow")
}

/// Row Hermite normal form with its unimodular transform.
pub fn hermite_normal_form(m: &IntMatrix) -> Result<Hermite, LinalgError> {
    check_size(m.rows(), m.cols())?;
    let (h, u, pivots) = hnf_adaptive(&m.row_vecs(), m.cols(), true);
    Ok(Hermite {
        h: IntMatrix::from_big_rows(h, m.cols())?,
        u: IntMatrix::from_big_rows(u.expect("transform requested"), m.rows())?,
        pivots,
    })
}

/// Hermite form without the transform.
pub fn hermite_form(m: &IntMatrix) -> Result<(IntMatrix, Vec<usize>), LinalgError> {
    check_size(m.rows(), m.cols())?;
    let (h, _, pivots) = hnf_adaptive(&m.row_vecs(), m.cols(), false);
    Ok((IntMatrix::from_big_rows(h, m.cols())?, pivots))
}

pub fn rank(m: &IntMatrix) -> Result<usize, LinalgError> {
    Ok(hermite_form(m)?.1.len())
}

/// Canonical basis of the row lattice: the nonzero rows of its Hermite form.
pub fn row_lattice_basis(m: &IntMatrix) -> Result<IntMatrix, LinalgError> {
    let (h, pivots) = hermite_form(m)?;
    let rows = h.row_vecs().into_iter().take(pivots.len()).collect();
    IntMatrix::from_big_rows(rows, m.cols())
}

fn reverse_columns(rows: &mut [Vec<BigInt>]) {
    for r in rows {
        r.reverse();
    }
}

/// Hermite basis of the row lattice computed with the columns scanned from
/// last to first. This is the canonical form returned by [`kernel_basis`].
pub fn reverse_hermite_basis(m: &IntMatrix) -> Result<IntMatrix, LinalgError> {
    check_size(m.rows(), m.cols())?;
    let mut rows = m.row_vecs();
    reverse_columns(&mut rows);
    let (mut h, _, pivots) = hnf_adaptive(&rows, m.cols(), false);
    h.truncate(pivots.len());
    reverse_columns(&mut h);
    IntMatrix::from_big_rows(h, m.cols())
}

/// Basis of the integer kernel `{x : M x = 0}`, one basis vector per row.
///
/// The basis is saturated and canonical: it is the reverse-column Hermite
/// basis of the kernel lattice, so row `k` is the unique vector with pivot
/// `1` at its largest nonzero coordinate.
pub fn kernel_basis(m: &IntMatrix) -> Result<IntMatrix, LinalgError> {
    let (h, pivots) = hermite_form(m)?;
    if pivots
        .iter()
        .enumerate()
        .all(|(i, &c)| h.get(i, c).is_one())
    {
        Ok(unit_pivot_kernel(&h, &pivots))
    } else {
        general_kernel(m)
    }
}

/// Kernel read off a Hermite form whose pivots are all `1`: such a form is
/// the identity on pivot columns, so each free column `f` gives the vector
/// with `x_f = 1` and `x_p = -H[i][f]` on pivot column `p = pivots[i]`.
fn unit_pivot_kernel(h: &IntMatrix, pivots: &[usize]) -> IntMatrix {
    let cols = h.cols();
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    let mut out = Vec::new();
    for f in (0..cols).rev().filter(|&f| !is_pivot[f]) {
        let mut x = vec![<BigInt as Zero>::zero(); cols];
        x[f] = <BigInt as One>::one();
        for (i, &p) in pivots.iter().enumerate() {
            let v = h.get(i, f);
            if !Zero::is_zero(v) {
                x[p] = -v;
            }
        }
        out.push(x);
    }
    IntMatrix::from_big_rows(out, cols).expect("rows have matching length")
}

/// Kernel from the transform of the Hermite form of `M^T`: the rows of `U`
/// past the rank satisfy `U_i M^T = 0`.
pub(crate) fn general_kernel(m: &IntMatrix) -> Result<IntMatrix, LinalgError> {
    let hermite = hermite_normal_form(&m.transpose())?;
    let rows: Vec<Vec<BigInt>> = hermite
        .u
        .row_vecs()
        .into_iter()
        .skip(hermite.rank())
        .collect();
    let basis = IntMatrix::from_big_rows(rows, m.cols())?;
    reverse_hermite_basis(&basis)
}

/// Some integer `x` with `M x = b`, or `None` when no integer solution exists.
///
/// The solution is the canonical back-substitution through the Hermite form
/// of `M^T` with every free parameter set to zero.
pub fn solve_integer(m: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>, LinalgError> {
    Solver::new(m)?.solve(b)
}

/// Precomputed Hermite data for repeated solves against one matrix.
#[derive(Clone, Debug)]
pub struct Solver {
    m_rows: usize,
    /// Hermite form of `M^T` and its transform: `U M^T = H`.
    hermite: Hermite,
}

impl Solver {
    pub fn new(m: &IntMatrix) -> Result<Self, LinalgError> {
        Ok(Solver {
            m_rows: m.rows(),
            hermite: hermite_normal_form(&m.transpose())?,
        })
    }

    pub fn rank(&self) -> usize {
        self.hermite.rank()
    }

    pub fn solve(&self, b: &[BigInt]) -> Result<Option<Vec<BigInt>>, LinalgError> {
        if b.len() != self.m_rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "right-hand side has length {}, expected {}",
                b.len(),
                self.m_rows
            )));
        }
        let h = &self.hermite.h;
        let u = &self.hermite.u;
        // M U^T = H^T, so solve H^T y = b and return x = U^T y.
        let rank = self.hermite.rank();
        let mut y: Vec<BigInt> = vec![<BigInt as Zero>::zero(); u.rows()];
        for (i, &p) in self.hermite.pivots.iter().enumerate() {
            let mut rhs = b[p].clone();
            for (k, yk) in y.iter().enumerate().take(i) {
                let hk = h.get(k, p);
                if !Zero::is_zero(hk) && !Zero::is_zero(yk) {
                    rhs -= hk * yk;
                }
            }
            let pivot = h.get(i, p);
            if !Scalar::divides(pivot, &rhs) {
                return Ok(None);
            }
            y[i] = rhs / pivot;
        }
        for (j, bj) in b.iter().enumerate() {
            let lhs: BigInt = (0..rank)
                .filter(|&k| !Zero::is_zero(h.get(k, j)))
                .map(|k| h.get(k, j) * &y[k])
                .sum();
            if &lhs != bj {
                return Ok(None);
            }
        }
        let x = (0..u.cols())
            .map(|j| {
                (0..rank)
                    .filter(|&k| !Zero::is_zero(&y[k]))
                    .map(|k| u.get(k, j) * &y[k])
                    .sum()
            })
            .collect();
        Ok(Some(x))
    }
}

/// True when the column lattice of `m` contains `b`.
pub fn image_contains(m: &IntMatrix, b: &[BigInt]) -> Result<bool, LinalgError> {
    Ok(solve_integer(m, b)?.is_some())
}

/// Saturation of the row lattice of `m` inside `Z^cols`, as a canonical basis.
pub fn saturation(m: &IntMatrix) -> Result<IntMatrix, LinalgError> {
    let orthogonal = kernel_basis(m)?;
    kernel_basis(&orthogonal)
}

/// True when the two matrices have the same row lattice.
pub fn same_row_lattice(a: &IntMatrix, b: &IntMatrix) -> Result<bool, LinalgError> {
    if a.cols() != b.cols() {
        return Err(LinalgError::DimensionMismatch(format!(
            "lattices in Z^{} and Z^{}",
            a.cols(),
            b.cols()
        )));
    }
    Ok(row_lattice_basis(a)? == row_lattice_basis(b)?)
}
