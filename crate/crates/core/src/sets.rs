//! Subsets and set partitions of `{1..n}` with canonical orderings and
//! string keys (`"1,2"` for a subset, `"1,2|3|4"` for a partition).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::Error;

/// Largest supported number of markings.
pub const MAX_N: usize = 63;

/// A finite set of positive integers, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    /// `{1..n}`.
    pub fn full(n: usize) -> Subset {
        assert!(n <= MAX_N, "n = {n} exceeds {MAX_N}");
        Subset(if n == 0 { 0 } else { ((1u64 << n) - 1) << 1 })
    }

    pub fn singleton(i: u32) -> Subset {
        Subset::from_elements([i])
    }

    pub fn from_elements(elems: impl IntoIterator<Item = u32>) -> Subset {
        let mut bits = 0u64;
        for e in elems {
            assert!(e >= 1 && (e as usize) <= MAX_N, "element {e} out of range");
            bits |= 1 << e;
        }
        Subset(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: u32) -> bool {
        i >= 1 && (i as usize) <= MAX_N && self.0 & (1 << i) != 0
    }

    pub fn min_element(self) -> Option<u32> {
        (self.0 != 0).then(|| self.0.trailing_zeros())
    }

    pub fn max_element(self) -> Option<u32> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros())
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
    }

    pub fn elements(self) -> impl Iterator<Item = u32> {
        let bits = self.0;
        (1..=MAX_N as u32).filter(move |&i| bits & (1 << i) != 0)
    }

    pub fn to_vec(self) -> Vec<u32> {
        self.elements().collect()
    }

    /// Canonical key, e.g. `"1,2"`.
    pub fn key(self) -> String {
        self.elements()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses a key and checks every element lies in `{1..n}`.
    pub fn parse_in(s: &str, n: usize) -> Result<Subset, Error> {
        let sub: Subset = s.parse()?;
        if !sub.is_subset_of(Subset::full(n)) {
            return Err(Error::InvalidInput(format!(
                "subset {{{s}}} is not contained in {{1..{n}}}"
            )));
        }
        Ok(sub)
    }
}

/// Canonical order: by size, then lexicographically on sorted elements.
impl Ord for Subset {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.elements().cmp(other.elements()))
    }
}

impl PartialOrd for Subset {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

impl FromStr for Subset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut bits = 0u64;
        for part in s.split(',') {
            let part = part.trim();
            let e: u32 = part.parse().map_err(|_| {
                Error::InvalidInput(format!("bad subset element {part:?} in {s:?}"))
            })?;
            if e == 0 || e as usize > MAX_N {
                return Err(Error::InvalidInput(format!(
                    "subset element {e} out of range"
                )));
            }
            if bits & (1 << e) != 0 {
                return Err(Error::InvalidInput(format!(
                    "repeated element {e} in {s:?}"
                )));
            }
            bits |= 1 << e;
        }
        Ok(Subset(bits))
    }
}

/// A set partition: disjoint nonempty blocks ordered by minimum element.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Subset>,
}

impl Partition {
    /// Sorts the blocks and checks they are disjoint and nonempty.
    pub fn new(mut blocks: Vec<Subset>) -> Result<Partition, Error> {
        let mut seen = Subset::EMPTY;
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidInput("empty block in partition".into()));
            }
            if !seen.is_disjoint(*b) {
                return Err(Error::InvalidInput(format!(
                    "overlapping block {b:?} in partition"
                )));
            }
            seen = seen.union(*b);
        }
        blocks.sort_by_key(|b| b.min_element());
        Ok(Partition { blocks })
    }

    /// Partition of `{1..n}` into singletons.
    pub fn singletons(n: usize) -> Partition {
        Partition {
            blocks: (1..=n as u32).map(Subset::singleton).collect(),
        }
    }

    /// Parses a key such as `"1,2|3|4"` and checks it partitions `{1..n}`
    /// into at least two blocks.
    pub fn parse_in(s: &str, n: usize) -> Result<Partition, Error> {
        let p: Partition = s.parse()?;
        if p.ground() != Subset::full(n) {
            return Err(Error::InvalidInput(format!(
                "{s:?} is not a partition of {{1..{n}}}"
            )));
        }
        if p.block_count() < 2 {
            return Err(Error::InvalidInput(format!(
                "{s:?} has a single block; nontrivial partitions need at least two"
            )));
        }
        Ok(p)
    }

    pub fn blocks(&self) -> &[Subset] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn ground(&self) -> Subset {
        self.blocks.iter().fold(Subset::EMPTY, |a, b| a.union(*b))
    }

    pub fn contains_block(&self, s: Subset) -> bool {
        self.blocks.contains(&s)
    }

    pub fn block_of(&self, i: u32) -> Option<Subset> {
        self.blocks.iter().copied().find(|b| b.contains(i))
    }

    /// True when `i` and `j` lie in different blocks.
    pub fn separates(&self, i: u32, j: u32) -> bool {
        match self.block_of(i) {
            Some(b) => !b.contains(j),
            None => false,
        }
    }

    /// One distinguished block, every other block a singleton.
    pub fn is_simple(&self) -> bool {
        self.blocks.iter().filter(|b| b.len() >= 2).count() <= 1
    }

    pub fn key(&self) -> String {
        self.blocks
            .iter()
            .map(|b| b.key())
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Canonical order: more blocks first, then lexicographically on blocks.
impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        other.block_count().cmp(&self.block_count()).then_with(|| {
            self.blocks
                .iter()
                .map(|b| b.to_vec())
                .cmp(other.blocks.iter().map(|b| b.to_vec()))
        })
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.key())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let blocks = s
            .split('|')
            .map(str::parse)
            .collect::<Result<Vec<Subset>, _>>()?;
        Partition::new(blocks)
    }
}

/// Every set partition of `ground` (including the one-block partition),
/// generated by restricted growth strings and returned in canonical order.
pub fn set_partitions_of(ground: Subset) -> Vec<Partition> {
    let elems = ground.to_vec();
    let mut out = Vec::new();
    if elems.is_empty() {
        return out;
    }
    let mut growth = vec![0usize; elems.len()];
    loop {
        let nblocks = growth.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Subset::EMPTY; nblocks];
        for (e, &b) in elems.iter().zip(&growth) {
            blocks[b] = blocks[b].union(Subset::singleton(*e));
        }
        out.push(Partition { blocks });
        // next restricted growth string
        let mut k = elems.len() - 1;
        loop {
            if k == 0 {
                out.sort();
                return out;
            }
            let prefix_max = growth[..k].iter().max().copied().unwrap_or(0);
            if growth[k] <= prefix_max {
                growth[k] += 1;
                for g in growth.iter_mut().skip(k + 1) {
                    *g = 0;
                }
                break;
            }
            k -= 1;
        }
    }
}

/// `Par(I)`: partitions of `{1..n}` with at least two blocks.
pub fn nontrivial_partitions(n: usize) -> Vec<Partition> {
    set_partitions_of(Subset::full(n))
        .into_iter()
        .filter(|p| p.block_count() >= 2)
        .collect()
}

/// Subsets of `ground` whose size lies in `min..=max`, in canonical order.
pub fn subsets_of(ground: Subset, min: usize, max: usize) -> Vec<Subset> {
    let elems = ground.to_vec();
    let mut out: Vec<Subset> = (0u64..(1u64 << elems.len()))
        .map(|mask| {
            Subset::from_elements(
                elems
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &e)| e),
            )
        })
        .filter(|s| (min..=max).contains(&s.len()))
        .collect();
    out.sort();
    out
}

/// `P(I)`: nonempty proper subsets of `{1..n}`.
pub fn proper_subsets(n: usize) -> Vec<Subset> {
    subsets_of(Subset::full(n), 1, n.saturating_sub(1))
}
