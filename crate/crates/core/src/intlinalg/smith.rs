use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{check_size, IntMatrix, LinalgError};

/// `left * M * right = diag(invariant_factors, 0, ...)` with unimodular
/// `left` and `right`, and each invariant factor dividing the next.
#[derive(Clone, Debug)]
pub struct Smith {
    pub invariant_factors: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// The diagonal matrix `left * M * right`.
    pub fn diagonal(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.left.rows(), self.right.cols());
        for (i, f) in self.invariant_factors.iter().enumerate() {
            d.set(i, i, f.clone());
        }
        d
    }
}

struct Work {
    a: Vec<Vec<BigInt>>,
    left: Vec<Vec<BigInt>>,
    right: Vec<Vec<BigInt>>,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.left.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut().chain(self.right.iter_mut()) {
            row.swap(i, j);
        }
    }

    /// row_i += q * row_t
    fn add_row(&mut self, i: usize, t: usize, q: &BigInt) {
        for m in [&mut self.a, &mut self.left] {
            let src = m[t].clone();
            for (x, s) in m[i].iter_mut().zip(&src) {
                if !s.is_zero() {
                    *x += q * s;
                }
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for m in [&mut self.a, &mut self.left] {
            for x in m[i].iter_mut() {
                *x = -&*x;
            }
        }
    }

    /// col_j += q * col_t
    fn add_col(&mut self, j: usize, t: usize, q: &BigInt) {
        for row in self.a.iter_mut().chain(self.right.iter_mut()) {
            if !row[t].is_zero() {
                let delta = q * &row[t];
                row[j] += delta;
            }
        }
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    IntMatrix::identity(n).row_vecs()
}

pub fn smith_normal_form(m: &IntMatrix) -> Result<Smith, LinalgError> {
    check_size(m.rows(), m.cols())?;
    let (nr, nc) = (m.rows(), m.cols());
    let mut w = Work {
        a: m.row_vecs(),
        left: identity(nr),
        right: identity(nc),
    };
    let mut factors = Vec::new();
    for t in 0..nr.min(nc) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..nr {
                for j in t..nc {
                    let v = &w.a[i][j];
                    if v.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| v.magnitude() < w.a[bi][bj].magnitude()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            if pi != t {
                w.swap_rows(t, pi);
            }
            if pj != t {
                w.swap_cols(t, pj);
            }
            let mut dirty = false;
            for i in t + 1..nr {
                if w.a[i][t].is_zero() {
                    continue;
                }
                let q = -(&w.a[i][t] / &w.a[t][t]);
                w.add_row(i, t, &q);
                dirty |= !w.a[i][t].is_zero();
            }
            for j in t + 1..nc {
                if w.a[t][j].is_zero() {
                    continue;
                }
                let q = -(&w.a[t][j] / &w.a[t][t]);
                w.add_col(j, t, &q);
                dirty |= !w.a[t][j].is_zero();
            }
            if dirty {
                continue;
            }
            let pivot = w.a[t][t].clone();
            let offender =
                (t + 1..nr).find(|&i| w.a[i][t + 1..].iter().any(|v| !(v % &pivot).is_zero()));
            match offender {
                Some(i) => w.add_row(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if w.a[t][t].is_zero() {
            break;
        }
        if w.a[t][t].is_negative() {
            w.negate_row(t);
        }
        factors.push(w.a[t][t].clone());
    }
    Ok(Smith {
        invariant_factors: factors,
        left: IntMatrix::from_big_rows(w.left, nr)?,
        right: IntMatrix::from_big_rows(w.right, nc)?,
    })
}
