use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

/// Largest number of summands a model may have.
pub const MAX_SUMMANDS: usize = 24;

/// A subset of the summand indices, stored as a bit mask over 0-based
/// positions. Displayed and serialized 1-based.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct IndexSet(u32);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    /// `{0, .., s-1}`.
    pub fn full(s: usize) -> IndexSet {
        assert!(s <= 32);
        if s == 32 {
            IndexSet(u32::MAX)
        } else {
            IndexSet((1u32 << s) - 1)
        }
    }

    pub fn from_bits(bits: u32) -> IndexSet {
        IndexSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(i: usize) -> IndexSet {
        IndexSet(1 << i)
    }

    /// Builds a set from 0-based indices.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> IndexSet {
        IndexSet(indices.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    /// Builds a set from 1-based indices, as used in files and on the
    /// command line. Returns `None` for index 0 or beyond `s`.
    pub fn from_one_based(indices: &[usize], s: usize) -> Option<IndexSet> {
        let mut bits = 0u32;
        for &i in indices {
            if i == 0 || i > s {
                return None;
            }
            bits |= 1 << (i - 1);
        }
        Some(IndexSet(bits))
    }

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 & (1 << i) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn insert(self, i: usize) -> IndexSet {
        IndexSet(self.0 | (1 << i))
    }

    pub fn union(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & other.0)
    }

    pub fn difference(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & !other.0)
    }

    /// Complement within `{0, .., s-1}`.
    pub fn complement(self, s: usize) -> IndexSet {
        IndexSet::full(s).difference(self)
    }

    pub fn is_subset(self, other: IndexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: IndexSet) -> bool {
        self.is_subset(other) && self != other
    }

    /// Largest element plus one, or 0 for the empty set.
    pub fn upper_bound(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    /// 0-based members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = usize> + Clone {
        let bits = self.0;
        (0..32).filter(move |i| bits & (1 << i) != 0)
    }

    pub fn to_one_based(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// Order used for lattice listings: by size, then lexicographically on
    /// the sorted member list.
    pub fn canonical_cmp(&self, other: &IndexSet) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }

    /// Every subset of `{0, .., s-1}`.
    pub fn all_subsets(s: usize) -> impl Iterator<Item = IndexSet> {
        assert!(s <= MAX_SUMMANDS);
        (0u32..(1u32 << s)).map(IndexSet)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter().map(|i| i + 1))
    }
}
