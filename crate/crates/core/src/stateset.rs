//! Order-preserving bit sets over the states of one model.

use smallvec::SmallVec;
use std::fmt;

const WORD: usize = 64;

/// A set of state indices. Bit `i` stands for the `i`-th state of the model
/// the set was created for; iteration is in ascending state order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StateSet {
    words: SmallVec<[u64; 2]>,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet {
            words: SmallVec::from_elem(0, words_for(n)),
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for i in 0..n / WORD {
            s.words[i] = u64::MAX;
        }
        if !n.is_multiple_of(WORD) {
            s.words[n / WORD] = (1u64 << (n % WORD)) - 1;
        }
        s
    }

    pub fn singleton(n: usize, i: usize) -> Self {
        let mut s = Self::empty(n);
        s.insert(i);
        s
    }

    pub fn from_indices(n: usize, it: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for i in it {
            s.insert(i);
        }
        s
    }

    /// Builds a set over at most 64 states from a raw bit mask.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n <= WORD);
        let mut s = Self::empty(n);
        if n > 0 {
            s.words[0] = mask;
        }
        s
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words
            .get(i / WORD)
            .is_some_and(|w| w & (1 << (i % WORD)) != 0)
    }

    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        let w = &mut self.words[i / WORD];
        let bit = 1 << (i % WORD);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, i: usize) -> bool {
        let w = &mut self.words[i / WORD];
        let bit = 1 << (i % WORD);
        let had = *w & bit != 0;
        *w &= !bit;
        had
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union_with(&mut self, other: &StateSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &StateSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &StateSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    /// Complement relative to a universe of `n` states.
    pub fn complement(&self, n: usize) -> StateSet {
        let mut s = StateSet::full(n);
        s.difference_with(self);
        s
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD + bit);
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

impl<'a> IntoIterator for &'a StateSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_and_complement_respect_universe() {
        let s = StateSet::full(70);
        assert_eq!(s.len(), 70);
        assert!(s.contains(69));
        assert!(!s.contains(70));
        let t = StateSet::from_indices(70, [1, 65]);
        let c = t.complement(70);
        assert_eq!(c.len(), 68);
        assert!(!c.contains(65));
    }

    #[test]
    fn iteration_is_ascending() {
        let s = StateSet::from_indices(130, [129, 3, 64, 0]);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 64, 129]);
    }

    #[test]
    fn zero_sized_universe() {
        let s = StateSet::full(0);
        assert!(s.is_empty());
        assert_eq!(s.iter().count(), 0);
    }

    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn set_of(n: usize) -> impl Strategy<Value = BTreeSet<usize>> {
        proptest::collection::btree_set(0..n, 0..n.min(40))
    }

    fn two_sets() -> impl Strategy<Value = (usize, BTreeSet<usize>, BTreeSet<usize>)> {
        (1usize..150).prop_flat_map(|n| (Just(n), set_of(n), set_of(n)))
    }

    proptest! {
        #[test]
        fn algebra_matches_btreeset((n, x, y) in two_sets()) {
            let a = StateSet::from_indices(n, x.iter().copied());
            let b = StateSet::from_indices(n, y.iter().copied());
            let collect = |s: &StateSet| s.iter().collect::<BTreeSet<_>>();
            prop_assert_eq!(collect(&a.union(&b)), x.union(&y).copied().collect::<BTreeSet<_>>());
            prop_assert_eq!(collect(&a.intersection(&b)), x.intersection(&y).copied().collect::<BTreeSet<_>>());
            prop_assert_eq!(collect(&a.difference(&b)), x.difference(&y).copied().collect::<BTreeSet<_>>());
            prop_assert_eq!(a.len(), x.len());
            prop_assert_eq!(a.is_subset(&b), x.is_subset(&y));
            prop_assert_eq!(a.intersects(&b), !x.is_disjoint(&y));
            prop_assert_eq!(a.complement(n).len(), n - x.len());
            prop_assert_eq!(a.first(), x.iter().next().copied());
        }
    }
}
