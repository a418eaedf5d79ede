//! Bit-set clusters over dense element indices.
//!
//! A [`Cluster`] stores its members as little-endian 64-bit words with no
//! trailing zero words, so equality and hashing are by bit pattern. Up to 128
//! elements live inline; larger datasets spill to the heap transparently.
//! The total order is the unsigned numeric value of the bit pattern and is
//! used for every deterministic tie-break in the crate.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

/// Number of elements that fit without a heap allocation.
pub const INLINE_CAPACITY: usize = 128;

type Words = SmallVec<[u64; 2]>;

/// A nonempty (by convention) subset of `{0, .., n-1}`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Cluster {
    words: Words,
}

impl Cluster {
    pub fn empty() -> Self {
        Cluster { words: Words::new() }
    }

    pub fn singleton(index: usize) -> Self {
        let mut c = Cluster::empty();
        c.insert(index);
        c
    }

    /// The full set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        let mut words: Words = SmallVec::from_elem(u64::MAX, n / 64);
        if !n.is_multiple_of(64) {
            words.push((1u64 << (n % 64)) - 1);
        }
        Cluster { words }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut c = Cluster::empty();
        for i in indices {
            c.insert(i);
        }
        c
    }

    /// Builds a cluster from a raw `u128` bit pattern.
    pub fn from_bits(bits: u128) -> Self {
        let mut words: Words = SmallVec::new();
        words.push(bits as u64);
        words.push((bits >> 64) as u64);
        let mut c = Cluster { words };
        c.trim();
        c
    }

    /// The bit pattern as a `u128`, or `None` when an element index is ≥ 128.
    pub fn to_bits(&self) -> Option<u128> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0] as u128),
            2 => Some(self.words[0] as u128 | (self.words[1] as u128) << 64),
            _ => None,
        }
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, index: usize) {
        let (w, b) = (index / 64, index % 64);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1u64 << b;
    }

    pub fn contains(&self, index: usize) -> bool {
        let (w, b) = (index / 64, index % 64);
        self.words.get(w).is_some_and(|word| word >> b & 1 == 1)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.len() == 1
    }

    pub fn union(&self, other: &Cluster) -> Cluster {
        let (long, short) = if self.words.len() >= other.words.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(short.words.iter()) {
            *w |= s;
        }
        Cluster { words }
    }

    pub fn intersection(&self, other: &Cluster) -> Cluster {
        let words = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| a & b)
            .collect();
        let mut c = Cluster { words };
        c.trim();
        c
    }

    /// `self \ other`.
    pub fn difference(&self, other: &Cluster) -> Cluster {
        let mut words = self.words.clone();
        for (w, o) in words.iter_mut().zip(other.words.iter()) {
            *w &= !o;
        }
        let mut c = Cluster { words };
        c.trim();
        c
    }

    pub fn is_disjoint(&self, other: &Cluster) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &Cluster) -> bool {
        self.words.len() <= other.words.len()
            && self
                .words
                .iter()
                .zip(other.words.iter())
                .all(|(a, b)| a & !b == 0)
    }

    /// Smallest member index.
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    /// Largest member index.
    pub fn last(&self) -> Option<usize> {
        let top = self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    /// Member indices in ascending order.
    pub fn iter(&self) -> Members<'_> {
        Members {
            words: &self.words,
            word_index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Lowercase hexadecimal bit pattern, most significant digit first.
    pub fn to_hex(&self) -> String {
        if self.words.is_empty() {
            return "0".to_string();
        }
        let mut s = format!("{:x}", self.words[self.words.len() - 1]);
        for w in self.words.iter().rev().skip(1) {
            s.push_str(&format!("{w:016x}"));
        }
        s
    }

    /// Orders two disjoint halves so that the numerically smaller one is first.
    pub fn canonical_pair(a: Cluster, b: Cluster) -> (Cluster, Cluster) {
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

impl Ord for Cluster {
    fn cmp(&self, other: &Self) -> Ordering {
        self.words.len().cmp(&other.words.len()).then_with(|| {
            for (a, b) in self.words.iter().rev().zip(other.words.iter().rev()) {
                match a.cmp(b) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Cluster {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Cluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for Cluster {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Cluster::from_indices(iter)
    }
}

pub struct Members<'a> {
    words: &'a [u64],
    word_index: usize,
    current: u64,
}

impl Iterator for Members<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.word_index * 64 + bit);
            }
            self.word_index += 1;
            self.current = *self.words.get(self.word_index)?;
        }
    }
}

/// Enumerates every canonical two-partition `(left, right)` of a cluster.
///
/// `left` ranges over the nonempty subsets of the cluster that exclude its
/// largest member, so `left < right` always holds and each unordered split
/// is produced once. A cluster of size k yields `2^(k-1) - 1` pairs.
pub struct TwoPartitions {
    members: Vec<usize>,
    whole: Cluster,
    counter: u128,
    end: u128,
}

impl TwoPartitions {
    /// Panics if the cluster has more than 128 members; exact enumeration is
    /// infeasible long before that.
    pub fn new(cluster: &Cluster) -> Self {
        let members = cluster.to_vec();
        assert!(members.len() <= 128, "cannot enumerate splits of more than 128 elements");
        let free = members.len().saturating_sub(1);
        let end = if free == 0 { 1 } else { 1u128 << free };
        TwoPartitions {
            members,
            whole: cluster.clone(),
            counter: 1,
            end,
        }
    }

    /// Number of pairs for a cluster with `k` members.
    pub fn count(k: usize) -> u128 {
        if k < 2 {
            0
        } else {
            (1u128 << (k - 1)) - 1
        }
    }
}

impl Iterator for TwoPartitions {
    type Item = (Cluster, Cluster);

    fn next(&mut self) -> Option<Self::Item> {
        if self.counter >= self.end {
            return None;
        }
        let pattern = self.counter;
        self.counter += 1;
        let mut left = Cluster::empty();
        let mut bits = pattern;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            left.insert(self.members[b]);
        }
        let right = self.whole.difference(&left);
        Some((left, right))
    }
}
