//! Boundary strata of the moduli space of `n`-marked scaled lines and the
//! global Cartier criterion.
//!
//! Type-I divisors are indexed by subsets `I` with `|I| >= 2`, type-II
//! divisors by partitions with at least two blocks. A divisor is Cartier
//! exactly when its type-II part is `q*p* k` for an integer vector `k` on
//! nonempty proper subsets.

mod crosscheck;
mod divisor;
mod pushpull;

use serde::Serialize;

use crate::sets::{nontrivial_partitions, subsets_of, Partition, Subset};
use crate::{Error, Result};

pub use crosscheck::{local_global_crosscheck, CrosscheckReport};
pub use divisor::DivisorVector;
pub use pushpull::{
    cartier_witness, is_cartier_global, pushpull_matrix, relations_basis, CartierLattice, PushPull,
};

/// Partition enumeration beyond this many markings is out of reach anyway
/// (the Bell number of 13 is about 2.7e7).
pub const MAX_PARTITION_N: usize = 12;

pub(crate) fn check_n(n: usize) -> Result<()> {
    if !(2..=MAX_PARTITION_N).contains(&n) {
        return Err(Error::InvalidInput(format!(
            "n = {n} is outside 2..={MAX_PARTITION_N}"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strata {
    pub n: usize,
    pub type_i: Vec<Subset>,
    pub type_ii: Vec<Partition>,
}

impl Serialize for Strata {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Strata", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field(
            "typeI",
            &self.type_i.iter().map(|x| x.key()).collect::<Vec<_>>(),
        )?;
        st.serialize_field(
            "typeII",
            &self.type_ii.iter().map(|x| x.key()).collect::<Vec<_>>(),
        )?;
        st.end()
    }
}

/// Codimension-one strata: subsets with `2 <= |I| <= n` and partitions with
/// at least two blocks, both in canonical order.
pub fn enumerate_strata(n: usize) -> Result<Strata> {
    check_n(n)?;
    Ok(Strata {
        n,
        type_i: subsets_of(Subset::full(n), 2, n),
        type_ii: nontrivial_partitions(n),
    })
}

/// Strata with `s` scalings: type-II labels carry the nonempty set `J` of
/// scalings that go to infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiStrata {
    pub n: usize,
    pub s: usize,
    pub type_i: Vec<Subset>,
    pub type_ii: Vec<(Partition, Subset)>,
}

impl Serialize for MultiStrata {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("MultiStrata", 4)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field(
            "typeI",
            &self.type_i.iter().map(|x| x.key()).collect::<Vec<_>>(),
        )?;
        st.serialize_field(
            "typeII",
            &self
                .type_ii
                .iter()
                .map(|(p, j)| [p.key(), j.key()])
                .collect::<Vec<_>>(),
        )?;
        st.end()
    }
}

pub fn enumerate_strata_multi(n: usize, s: usize) -> Result<MultiStrata> {
    if !(1..=MAX_PARTITION_N).contains(&n) || !(1..=crate::sets::MAX_N).contains(&s) {
        return Err(Error::InvalidInput(format!(
            "n = {n}, s = {s} out of range"
        )));
    }
    let partitions = if n >= 2 {
        nontrivial_partitions(n)
    } else {
        Vec::new()
    };
    let scalings = subsets_of(Subset::full(s), 1, s);
    let type_ii = partitions
        .iter()
        .flat_map(|p| scalings.iter().map(move |&j| (p.clone(), j)))
        .collect();
    Ok(MultiStrata {
        n,
        s,
        type_i: subsets_of(Subset::full(n), 2, n),
        type_ii,
    })
}

/// Partitions made of one block `S` with `|S| >= 2` and singletons, plus the
/// partition into singletons. There are `2^n - n - 1` of them.
pub fn simple_partitions(n: usize) -> Result<Vec<Partition>> {
    check_n(n)?;
    let mut out: Vec<Partition> = subsets_of(Subset::full(n), 2, n - 1)
        .into_iter()
        .map(|s| pushpull::simple_partition_of(n, s))
        .collect();
    out.push(Partition::singletons(n));
    out.sort();
    Ok(out)
}

/// Pullback of the boundary divisor `D_S` along the map forgetting the
/// scaling: `D_S` plus every `D_P` with `S` a block of `P`.
pub fn pullback_forgetful(n: usize, s: Subset) -> Result<DivisorVector> {
    check_n(n)?;
    if s.len() < 2 || s.len() > n - 1 || !s.is_subset_of(Subset::full(n)) {
        return Err(Error::InvalidInput(format!(
            "subset {s} must have between 2 and {} elements of {{1..{n}}}",
            n - 1
        )));
    }
    let mut d = DivisorVector::new(n);
    d.type_i.insert(s, 1);
    for p in nontrivial_partitions(n) {
        if p.contains_block(s) {
            d.type_ii.insert(p, 1);
        }
    }
    Ok(d)
}

fn check_pair(n: usize, i: u32, j: u32) -> Result<()> {
    check_n(n)?;
    let valid = |x: u32| (1..=n as u32).contains(&x);
    if i == j || !valid(i) || !valid(j) {
        return Err(Error::InvalidInput(format!(
            "need two distinct markings in 1..={n}, got {i} and {j}"
        )));
    }
    Ok(())
}

/// Pullback of `D_{{1},{2}}` along the map keeping markings `i` and `j`:
/// every partition separating `i` from `j`.
pub fn pullback_fij(n: usize, i: u32, j: u32) -> Result<DivisorVector> {
    check_pair(n, i, j)?;
    let mut d = DivisorVector::new(n);
    for p in nontrivial_partitions(n) {
        if p.separates(i, j) {
            d.type_ii.insert(p, 1);
        }
    }
    Ok(d)
}

/// Pullback of `D_{{1,2}}` along the map keeping markings `i` and `j`: every
/// subset containing both.
pub fn pullback_fij_type_i(n: usize, i: u32, j: u32) -> Result<DivisorVector> {
    check_pair(n, i, j)?;
    let pair = Subset::from_elements([i, j]);
    let mut d = DivisorVector::new(n);
    for s in subsets_of(Subset::full(n), 2, n) {
        if pair.is_subset_of(s) {
            d.type_i.insert(s, 1);
        }
    }
    Ok(d)
}
