//! Subsets of a finite ground set, used both as vertex sets and as the
//! domain of outer measures.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// A subset of `{0, .., ground_size - 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    bits: FixedBitSet,
}

impl Subset {
    pub fn empty(ground_size: usize) -> Self {
        Subset {
            bits: FixedBitSet::with_capacity(ground_size),
        }
    }

    pub fn full(ground_size: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(ground_size);
        bits.insert_range(..);
        Subset { bits }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(ground_size: usize, iter: I) -> Result<Self> {
        let mut s = Subset::empty(ground_size);
        for i in iter {
            if i >= ground_size {
                return Err(Error::PointOutOfRange {
                    index: i,
                    size: ground_size,
                });
            }
            s.bits.insert(i);
        }
        Ok(s)
    }

    /// Low `ground_size` bits of `mask` select the members. Only for small ground sets.
    pub fn from_mask(ground_size: usize, mask: u64) -> Self {
        debug_assert!(ground_size <= 64);
        let mut s = Subset::empty(ground_size);
        for i in 0..ground_size {
            if mask >> i & 1 == 1 {
                s.bits.insert(i);
            }
        }
        s
    }

    /// Bitmask encoding, defined for ground sets of at most 64 points.
    pub fn mask(&self) -> u64 {
        debug_assert!(self.ground_size() <= 64);
        let mut m = 0u64;
        for i in self.iter() {
            m |= 1 << i;
        }
        m
    }

    pub fn ground_size(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn insert(&mut self, i: usize) {
        self.bits.insert(i);
    }

    pub fn union(&self, other: &Subset) -> Subset {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Subset { bits }
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Subset { bits }
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        Subset { bits }
    }

    pub fn complement(&self) -> Subset {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        Subset { bits }
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }
}

impl std::fmt::Display for Subset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
