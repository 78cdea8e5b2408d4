//! Finite ground spaces, element sets and enumerated set families.
//!
//! Elements of a [`GroundSpace`] are the ids `0..size`. Sets of elements are
//! fixed-width bit masks ([`ElemSet`]), which keeps every set `Copy` and makes
//! inclusion tests a handful of word operations.
//!
//! Convexities store one hull per subset of size at most the space's arity.
//! [`GroundSpace::rank`] maps such a subset to a dense table index using the
//! combinatorial number system, so every convexity over the same space shares
//! the same indexing.

use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORDS: usize = 4;

/// Largest ground space an [`ElemSet`] can hold.
pub const MAX_ELEMENTS: usize = WORDS * 64;

/// Default cap on `size` for operations that walk all `2^size` subsets.
pub const DEFAULT_CAP: usize = 20;

/// Upper bound on the number of entries of a small-subset hull table.
pub const MAX_TABLE_LEN: usize = 1 << 22;

/// Reads the enumeration cap from `FRACTO_CAP`, falling back to
/// [`DEFAULT_CAP`].
pub fn cap_from_env() -> usize {
    std::env::var("FRACTO_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

/// A set of element ids, stored as a fixed-width bit mask.
///
/// Ordering is by numeric mask value (highest word first), which is the order
/// in which [`GroundSpace::all_subsets`] produces sets.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ElemSet([u64; WORDS]);

impl ElemSet {
    pub const EMPTY: ElemSet = ElemSet([0; WORDS]);

    pub fn singleton(x: usize) -> Self {
        let mut s = Self::EMPTY;
        s.insert(x);
        s
    }

    /// The set `{0, 1, ..., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_ELEMENTS);
        let mut words = [0u64; WORDS];
        for (i, w) in words.iter_mut().enumerate() {
            let lo = i * 64;
            if n >= lo + 64 {
                *w = u64::MAX;
            } else if n > lo {
                *w = (1u64 << (n - lo)) - 1;
            }
        }
        ElemSet(words)
    }

    /// Builds a set from the low bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        let mut words = [0u64; WORDS];
        words[0] = mask;
        ElemSet(words)
    }

    /// Low 64 bits of the mask.
    pub fn low_mask(&self) -> u64 {
        self.0[0]
    }

    pub fn insert(&mut self, x: usize) {
        assert!(x < MAX_ELEMENTS, "element {x} exceeds ElemSet width");
        self.0[x / 64] |= 1 << (x % 64);
    }

    pub fn remove(&mut self, x: usize) {
        if x < MAX_ELEMENTS {
            self.0[x / 64] &= !(1 << (x % 64));
        }
    }

    pub fn with(mut self, x: usize) -> Self {
        self.insert(x);
        self
    }

    pub fn contains(&self, x: usize) -> bool {
        x < MAX_ELEMENTS && self.0[x / 64] & (1 << (x % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &ElemSet) -> bool {
        self.0.iter().zip(other.0.iter()).any(|(a, b)| a & b != 0)
    }

    pub fn union(&self, other: &ElemSet) -> ElemSet {
        let mut out = *self;
        for (o, b) in out.0.iter_mut().zip(other.0.iter()) {
            *o |= b;
        }
        out
    }

    pub fn intersection(&self, other: &ElemSet) -> ElemSet {
        let mut out = *self;
        for (o, b) in out.0.iter_mut().zip(other.0.iter()) {
            *o &= b;
        }
        out
    }

    pub fn difference(&self, other: &ElemSet) -> ElemSet {
        let mut out = *self;
        for (o, b) in out.0.iter_mut().zip(other.0.iter()) {
            *o &= !b;
        }
        out
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn last(&self) -> Option<usize> {
        for i in (0..WORDS).rev() {
            if self.0[i] != 0 {
                return Some(i * 64 + 63 - self.0[i].leading_zeros() as usize);
            }
        }
        None
    }

    /// Elements in ascending order.
    pub fn iter(&self) -> Iter {
        Iter { words: self.0, word: 0 }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for ElemSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = ElemSet::EMPTY;
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl Ord for ElemSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

impl PartialOrd for ElemSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for ElemSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ElemSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let ids = Vec::<usize>::deserialize(d)?;
        if let Some(&bad) = ids.iter().find(|&&x| x >= MAX_ELEMENTS) {
            return Err(serde::de::Error::custom(format!(
                "element {bad} exceeds the supported width {MAX_ELEMENTS}"
            )));
        }
        Ok(ids.into_iter().collect())
    }
}

pub struct Iter {
    words: [u64; WORDS],
    word: usize,
}

impl Iterator for Iter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        while self.word < WORDS {
            let w = self.words[self.word];
            if w != 0 {
                let bit = w.trailing_zeros() as usize;
                self.words[self.word] &= w - 1;
                return Some(self.word * 64 + bit);
            }
            self.word += 1;
        }
        None
    }
}

/// The finite universe `{0, ..., size-1}` together with the arity `n` of
/// every convexity defined on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSpace {
    size: usize,
    arity: usize,
    /// `binom[k][x] = C(x, k)` for `k <= arity`, `x <= size`.
    binom: Vec<Vec<usize>>,
    /// `offset[k]` = number of subsets of size `< k`.
    offset: Vec<usize>,
}

impl GroundSpace {
    pub fn new(size: usize, arity: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidSpace("size must be at least 1".into()));
        }
        if size > MAX_ELEMENTS {
            return Err(Error::InvalidSpace(format!(
                "size {size} exceeds the supported maximum {MAX_ELEMENTS}"
            )));
        }
        if arity == 0 || arity > size {
            return Err(Error::InvalidSpace(format!(
                "arity {arity} must lie in 1..={size}"
            )));
        }
        let mut binom = vec![vec![0usize; size + 1]; arity + 1];
        for x in 0..=size {
            binom[0][x] = 1;
            for k in 1..=arity {
                binom[k][x] = if x == 0 {
                    0
                } else {
                    binom[k][x - 1].saturating_add(binom[k - 1][x - 1])
                };
            }
        }
        let mut offset = vec![0usize; arity + 2];
        for k in 0..=arity {
            offset[k + 1] = offset[k].saturating_add(binom[k][size]);
        }
        if offset[arity + 1] > MAX_TABLE_LEN {
            return Err(Error::InvalidSpace(format!(
                "{} subsets of size <= {arity} is more than the hull table limit {MAX_TABLE_LEN}",
                offset[arity + 1]
            )));
        }
        Ok(GroundSpace { size, arity, binom, offset })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Same elements, different arity.
    pub fn with_arity(&self, arity: usize) -> Result<Self> {
        GroundSpace::new(self.size, arity)
    }

    pub fn full(&self) -> ElemSet {
        ElemSet::full(self.size)
    }

    pub fn contains(&self, set: &ElemSet) -> bool {
        set.is_subset(&self.full())
    }

    pub fn check(&self, set: &ElemSet) -> Result<()> {
        match set.last() {
            Some(x) if x >= self.size => Err(Error::OutOfRange { element: x, size: self.size }),
            _ => Ok(()),
        }
    }

    /// Number of subsets of size at most the arity.
    pub fn table_len(&self) -> usize {
        self.offset[self.arity + 1]
    }

    /// Dense index of a subset of size `<= arity`.
    pub fn rank(&self, set: &ElemSet) -> Option<usize> {
        let k = set.len();
        if k > self.arity || !self.contains(set) {
            return None;
        }
        let mut r = self.offset[k];
        for (i, x) in set.iter().enumerate() {
            r += self.binom[i + 1][x];
        }
        Some(r)
    }

    /// Inverse of [`GroundSpace::rank`].
    pub fn unrank(&self, index: usize) -> ElemSet {
        let k = (0..=self.arity)
            .find(|&k| index < self.offset[k + 1])
            .expect("index beyond table");
        let mut r = index - self.offset[k];
        let mut out = ElemSet::EMPTY;
        // Greedy decoding, largest position first.
        let mut hi = self.size;
        for pos in (1..=k).rev() {
            let mut x = pos - 1;
            while x + 1 < hi && self.binom[pos][x + 1] <= r {
                x += 1;
            }
            r -= self.binom[pos][x];
            out.insert(x);
            hi = x;
        }
        out
    }

    /// Every subset of size `<= arity`, in table order.
    pub fn small_subsets(&self) -> impl Iterator<Item = ElemSet> + '_ {
        (0..self.table_len()).map(|i| self.unrank(i))
    }

    /// Calls `f(B, rank(B))` for every nonempty `B ⊆ set` with `|B| <= arity`.
    /// Stops early when `f` breaks.
    pub fn for_each_small_subset<F>(&self, set: &ElemSet, mut f: F) -> ControlFlow<()>
    where
        F: FnMut(ElemSet, usize) -> ControlFlow<()>,
    {
        let elems: Vec<usize> = set.iter().collect();
        self.walk(&elems, 0, 0, ElemSet::EMPTY, 0, &mut f)
    }

    /// Like [`GroundSpace::for_each_small_subset`], restricted to subsets
    /// that meet `touch`. Each subset is visited once, in no fixed order.
    pub fn for_each_small_subset_touching<F>(&self, set: &ElemSet, touch: &ElemSet, mut f: F) -> ControlFlow<()>
    where
        F: FnMut(ElemSet, usize) -> ControlFlow<()>,
    {
        let mut used = ElemSet::EMPTY;
        for t in touch.intersection(set).iter() {
            // subsets whose least element of `touch` is `t`
            let rest: Vec<usize> = set.difference(&used).iter().filter(|&x| x != t).collect();
            self.walk_touching(&rest, 0, ElemSet::singleton(t), &mut f)?;
            used.insert(t);
        }
        ControlFlow::Continue(())
    }

    fn walk_touching<F>(&self, rest: &[usize], start: usize, acc: ElemSet, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(ElemSet, usize) -> ControlFlow<()>,
    {
        f(acc, self.rank(&acc).expect("small subset"))?;
        if acc.len() == self.arity {
            return ControlFlow::Continue(());
        }
        for (i, &x) in rest.iter().enumerate().skip(start) {
            self.walk_touching(rest, i + 1, acc.with(x), f)?;
        }
        ControlFlow::Continue(())
    }

    fn walk<F>(
        &self,
        elems: &[usize],
        start: usize,
        depth: usize,
        acc: ElemSet,
        partial: usize,
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(ElemSet, usize) -> ControlFlow<()>,
    {
        if depth == self.arity {
            return ControlFlow::Continue(());
        }
        for (i, &x) in elems.iter().enumerate().skip(start) {
            let set = acc.with(x);
            let partial = partial + self.binom[depth + 1][x];
            f(set, self.offset[depth + 1] + partial)?;
            self.walk(elems, i + 1, depth + 1, set, partial, f)?;
        }
        ControlFlow::Continue(())
    }

    /// Fails with [`Error::SpaceTooLarge`] when `2^size` subsets exceed `cap`.
    pub fn check_cap(&self, cap: usize) -> Result<()> {
        if self.size > cap || self.size > 63 {
            Err(Error::SpaceTooLarge { size: self.size, cap: cap.min(63) })
        } else {
            Ok(())
        }
    }

    /// All `2^size` subsets in mask order.
    pub fn all_subsets(&self, cap: usize) -> Result<impl Iterator<Item = ElemSet>> {
        self.check_cap(cap)?;
        Ok((0..1u64 << self.size).map(ElemSet::from_mask))
    }

    /// Number of subsets, when enumerable under `cap`.
    pub fn subset_count(&self, cap: usize) -> Result<u64> {
        self.check_cap(cap)?;
        Ok(1u64 << self.size)
    }
}

/// A sorted, deduplicated list of element sets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SetFamily {
    members: Vec<ElemSet>,
}

impl SetFamily {
    pub fn new(mut members: Vec<ElemSet>) -> Self {
        members.sort_unstable();
        members.dedup();
        SetFamily { members }
    }

    /// Wraps a list that the caller knows to be sorted and deduplicated.
    pub(crate) fn from_sorted(members: Vec<ElemSet>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        SetFamily { members }
    }

    pub fn members(&self) -> &[ElemSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, set: &ElemSet) -> bool {
        self.members.binary_search(set).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ElemSet> {
        self.members.iter()
    }

    pub fn intersection(&self, other: &SetFamily) -> SetFamily {
        SetFamily::from_sorted(self.members.iter().copied().filter(|s| other.contains(s)).collect())
    }

    pub fn union(&self, other: &SetFamily) -> SetFamily {
        let mut all = self.members.clone();
        all.extend_from_slice(&other.members);
        SetFamily::new(all)
    }

    pub fn is_subfamily(&self, other: &SetFamily) -> bool {
        self.members.iter().all(|s| other.contains(s))
    }

    /// First pair whose intersection is missing from the family.
    pub fn intersection_witness(&self) -> Option<(ElemSet, ElemSet)> {
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                if !self.contains(&a.intersection(b)) {
                    return Some((*a, *b));
                }
            }
        }
        None
    }
}

impl<'a> IntoIterator for &'a SetFamily {
    type Item = &'a ElemSet;
    type IntoIter = std::slice::Iter<'a, ElemSet>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

impl FromIterator<ElemSet> for SetFamily {
    fn from_iter<I: IntoIterator<Item = ElemSet>>(iter: I) -> Self {
        SetFamily::new(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn touching_walk_visits_exactly_the_meeting_subsets() {
        let space = GroundSpace::new(9, 3).unwrap();
        let set = ElemSet::from_mask(0b1_1011_0111);
        let touch = ElemSet::from_mask(0b0_1001_0010);
        let mut seen = Vec::new();
        let _ = space.for_each_small_subset_touching(&set, &touch, |b, r| {
            assert_eq!(space.rank(&b), Some(r));
            seen.push(b);
            ControlFlow::Continue(())
        });
        let mut expected = Vec::new();
        let _ = space.for_each_small_subset(&set, |b, _| {
            if b.intersects(&touch) {
                expected.push(b);
            }
            ControlFlow::Continue(())
        });
        seen.sort();
        expected.sort();
        assert_eq!(seen, expected);
    }

    #[test]
    fn rank_is_a_bijection_onto_the_table() {
        let g = GroundSpace::new(9, 3).unwrap();
        assert_eq!(g.table_len(), 1 + 9 + 36 + 84);
        let mut seen = vec![false; g.table_len()];
        for mask in 0u64..1 << 9 {
            let s = ElemSet::from_mask(mask);
            match g.rank(&s) {
                Some(r) => {
                    assert!(!seen[r]);
                    seen[r] = true;
                    assert_eq!(g.unrank(r), s);
                }
                None => assert!(s.len() > 3),
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn small_subset_walk_reports_matching_ranks() {
        let g = GroundSpace::new(12, 3).unwrap();
        let a: ElemSet = [1, 4, 5, 9, 11].into_iter().collect();
        let mut count = 0;
        let _ = g.for_each_small_subset(&a, |b, r| {
            assert!(b.is_subset(&a) && !b.is_empty());
            assert_eq!(g.rank(&b), Some(r));
            count += 1;
            ControlFlow::Continue(())
        });
        assert_eq!(count, 5 + 10 + 10);
    }

    #[test]
    fn invalid_spaces_are_rejected() {
        assert!(GroundSpace::new(0, 1).is_err());
        assert!(GroundSpace::new(4, 5).is_err());
        assert!(GroundSpace::new(4, 0).is_err());
        assert!(GroundSpace::new(MAX_ELEMENTS + 1, 1).is_err());
        assert!(matches!(
            GroundSpace::new(30, 2).unwrap().check_cap(20),
            Err(Error::SpaceTooLarge { .. })
        ));
    }

    #[test]
    fn out_of_range_elements() {
        let g = GroundSpace::new(5, 2).unwrap();
        assert!(g.check(&ElemSet::from_mask(0b11111)).is_ok());
        assert!(matches!(
            g.check(&ElemSet::singleton(5)),
            Err(Error::OutOfRange { element: 5, size: 5 })
        ));
    }

    #[test]
    fn wide_sets() {
        let mut s = ElemSet::EMPTY;
        for x in [0, 63, 64, 130, 255] {
            s.insert(x);
        }
        assert_eq!(s.to_vec(), vec![0, 63, 64, 130, 255]);
        assert_eq!(s.last(), Some(255));
        assert_eq!(ElemSet::full(130).len(), 130);
        assert_eq!(format!("{}", ElemSet::from_mask(0b1011)), "{0,1,3}");
    }

    proptest! {
        #[test]
        fn set_algebra_matches_masks(a in any::<u64>(), b in any::<u64>()) {
            let (sa, sb) = (ElemSet::from_mask(a), ElemSet::from_mask(b));
            prop_assert_eq!(sa.union(&sb).low_mask(), a | b);
            prop_assert_eq!(sa.intersection(&sb).low_mask(), a & b);
            prop_assert_eq!(sa.difference(&sb).low_mask(), a & !b);
            prop_assert_eq!(sa.is_subset(&sb), a & !b == 0);
            prop_assert_eq!(sa.cmp(&sb), a.cmp(&b));
            prop_assert_eq!(sa.len(), a.count_ones() as usize);
        }
    }
}
