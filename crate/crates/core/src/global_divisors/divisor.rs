use std::collections::BTreeMap;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Serialize, Serializer};

use crate::sets::{Partition, Subset};
use crate::{Error, Result};

/// A boundary divisor `Σ n_I D_I + Σ n_P D_P` on the moduli space of
/// `n`-marked scaled lines.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DivisorVector {
    pub n: usize,
    /// Coefficients of type-I divisors, keyed by subsets of size at least 2.
    pub type_i: BTreeMap<Subset, i64>,
    /// Coefficients of type-II divisors, keyed by partitions with at least
    /// two blocks.
    pub type_ii: BTreeMap<Partition, i64>,
}

impl DivisorVector {
    pub fn new(n: usize) -> Self {
        DivisorVector {
            n,
            ..Default::default()
        }
    }

    pub fn type_i_coefficient(&self, s: Subset) -> i64 {
        self.type_i.get(&s).copied().unwrap_or(0)
    }

    pub fn type_ii_coefficient(&self, p: &Partition) -> i64 {
        self.type_ii.get(p).copied().unwrap_or(0)
    }

    /// Type-II coefficients listed in the order of `cols`.
    pub fn type_ii_dense(&self, cols: &[Partition]) -> Vec<i64> {
        cols.iter().map(|p| self.type_ii_coefficient(p)).collect()
    }

    pub fn from_type_ii_dense(n: usize, cols: &[Partition], values: &[i64]) -> Self {
        DivisorVector {
            n,
            type_i: BTreeMap::new(),
            type_ii: cols
                .iter()
                .zip(values)
                .filter(|(_, &c)| c != 0)
                .map(|(p, &c)| (p.clone(), c))
                .collect(),
        }
    }

    /// Checks that every key is a stratum label for `n` markings.
    pub fn validate(&self) -> Result<()> {
        let full = Subset::full(self.n);
        for s in self.type_i.keys() {
            if s.len() < 2 || !s.is_subset_of(full) {
                return Err(Error::InvalidInput(format!(
                    "type-I key {s} is not a subset of {{1..{}}} with at least two elements",
                    self.n
                )));
            }
        }
        for p in self.type_ii.keys() {
            if p.ground() != full || p.block_count() < 2 {
                return Err(Error::InvalidInput(format!(
                    "type-II key {p} is not a partition of {{1..{}}} into two or more blocks",
                    self.n
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            n: usize,
            #[serde(rename = "typeI", default)]
            type_i: BTreeMap<String, i64>,
            #[serde(rename = "typeII", default)]
            type_ii: BTreeMap<String, i64>,
        }
        let raw: Raw = serde_json::from_str(s)?;
        if raw.n < 1 || raw.n > crate::sets::MAX_N {
            return Err(Error::InvalidInput(format!("n = {} out of range", raw.n)));
        }
        let mut d = DivisorVector::new(raw.n);
        for (k, c) in raw.type_i {
            if d.type_i.insert(Subset::parse_in(&k, raw.n)?, c).is_some() {
                return Err(Error::InvalidInput(format!("type-I key {k:?} given twice")));
            }
        }
        for (k, c) in raw.type_ii {
            if d.type_ii
                .insert(Partition::parse_in(&k, raw.n)?, c)
                .is_some()
            {
                return Err(Error::InvalidInput(format!(
                    "type-II key {k:?} given twice"
                )));
            }
        }
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("divisor serializes")
    }
}

struct KeyedMap<'a, K, F>(&'a BTreeMap<K, i64>, F);

impl<K, F: Fn(&K) -> String> Serialize for KeyedMap<'_, K, F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0 {
            m.serialize_entry(&(self.1)(k), v)?;
        }
        m.end()
    }
}

/// Keys are written in canonical order.
impl Serialize for DivisorVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DivisorVector", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("typeI", &KeyedMap(&self.type_i, |k: &Subset| k.key()))?;
        st.serialize_field("typeII", &KeyedMap(&self.type_ii, |k: &Partition| k.key()))?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_in_canonical_order() {
        let text = r#"{"n":4,"typeI":{"1,2,3":2,"3,4":1},"typeII":{"1,2|3,4":-1,"1|2|3|4":1}}"#;
        let d = DivisorVector::from_json(text).unwrap();
        assert_eq!(
            d.to_json(),
            r#"{"n":4,"typeI":{"3,4":1,"1,2,3":2},"typeII":{"1|2|3|4":1,"1,2|3,4":-1}}"#
        );
        assert_eq!(DivisorVector::from_json(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn bad_keys_rejected() {
        assert!(DivisorVector::from_json(r#"{"n":4,"typeI":{"1":1}}"#).is_err());
        assert!(DivisorVector::from_json(r#"{"n":4,"typeII":{"1,2|3":1}}"#).is_err());
        assert!(DivisorVector::from_json(r#"{"n":4,"typeII":{"1,2,3,4":1}}"#).is_err());
        assert!(DivisorVector::from_json(r#"{"n":4,"other":{}}"#).is_err());
        assert!(DivisorVector::from_json(r#"{"n":3,"typeI":{"1,2":1,"2,1":1}}"#).is_err());
    }
}
