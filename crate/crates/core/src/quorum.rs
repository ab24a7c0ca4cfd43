//! Slot sets over a cycle of `n` slots.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Index of a slot (beacon interval) inside one cycle, in `[0, n)`.
pub type SlotId = usize;

/// The awake slots of one node within a cycle of `n` slots.
///
/// Slots are kept strictly increasing, so equality is set equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Quorum {
    n: usize,
    slots: Vec<SlotId>,
}

impl Quorum {
    /// Builds a quorum from slots in any order. Duplicates are rejected.
    pub fn new(n: usize, slots: impl IntoIterator<Item = SlotId>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroCycle);
        }
        let mut slots: Vec<SlotId> = slots.into_iter().collect();
        slots.sort_unstable();
        if let Some(w) = slots.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateSlot(w[0]));
        }
        Self::from_sorted(n, slots)
    }

    /// Builds a quorum from a union of slot lists, merging repeats.
    pub fn from_union(n: usize, slots: impl IntoIterator<Item = SlotId>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroCycle);
        }
        let mut slots: Vec<SlotId> = slots.into_iter().collect();
        slots.sort_unstable();
        slots.dedup();
        Self::from_sorted(n, slots)
    }

    fn from_sorted(n: usize, slots: Vec<SlotId>) -> Result<Self> {
        match slots.last() {
            None => Err(Error::EmptyQuorum),
            Some(&last) if last >= n => Err(Error::SlotOutOfRange { slot: last, n }),
            Some(_) => Ok(Self { n, slots }),
        }
    }

    /// The whole cycle `{0, …, n−1}`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(n, 0..n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn slots(&self) -> &[SlotId] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    /// Always false: an empty quorum cannot be constructed.
    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn contains(&self, slot: SlotId) -> bool {
        self.slots.binary_search(&slot).is_ok()
    }

    /// `{(j + offset) mod n | j ∈ self}`. Negative offsets rotate backwards.
    pub fn rotate(&self, offset: i64) -> Quorum {
        let shift = offset.rem_euclid(self.n as i64) as usize;
        let mut slots: Vec<SlotId> = self.slots.iter().map(|&j| (j + shift) % self.n).collect();
        slots.sort_unstable();
        Quorum { n: self.n, slots }
    }

    /// Set intersection by linear merge. The result may be empty.
    pub fn intersection(&self, other: &Quorum) -> Result<Vec<SlotId>> {
        if self.n != other.n {
            return Err(Error::CycleMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(merge_intersection(&self.slots, &other.slots))
    }

    /// `|self ∩ other|` for quorums already known to share `n`.
    pub(crate) fn overlap(&self, other: &Quorum) -> usize {
        debug_assert_eq!(self.n, other.n);
        let (a, b) = (&self.slots, &other.slots);
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    /// `|Q| / n`.
    pub fn active_ratio<T: Scalar>(&self) -> T {
        T::from_ratio(self.len() as i128, self.n as i128)
    }

    /// Periodic extension of the quorum started at `offset`: position `s`
    /// is awake iff `(s − offset) mod n ∈ Q`.
    pub fn awake_schedule(&self, offset: i64, horizon: usize) -> Vec<bool> {
        let n = self.n as i64;
        let mut phase = (-offset).rem_euclid(n) as usize;
        let mut mask = vec![false; self.n];
        for &s in &self.slots {
            mask[s] = true;
        }
        let mut out = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            out.push(mask[phase]);
            phase += 1;
            if phase == self.n {
                phase = 0;
            }
        }
        out
    }

    /// The same awake pattern viewed over a cycle of `window` slots, where
    /// `window` is a multiple of `n`.
    pub fn lift(&self, window: usize) -> Result<Quorum> {
        if window == 0 || !window.is_multiple_of(self.n) {
            return Err(Error::InvalidParameters(format!(
                "window {window} is not a multiple of the cycle length {}",
                self.n
            )));
        }
        let slots = (0..window / self.n)
            .flat_map(|rep| self.slots.iter().map(move |&s| rep * self.n + s))
            .collect();
        Ok(Quorum { n: window, slots })
    }
}

pub(crate) fn merge_intersection(a: &[SlotId], b: &[SlotId]) -> Vec<SlotId> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl fmt::Debug for Quorum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quorum(n={}, {:?})", self.n, self.slots)
    }
}

impl fmt::Display for Quorum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use proptest::prelude::*;

    fn q(n: usize, s: &[usize]) -> Quorum {
        Quorum::new(n, s.iter().copied()).unwrap()
    }

    #[test]
    fn rotate_examples() {
        assert_eq!(
            q(15, &[0, 3, 6, 9, 12, 13]).rotate(1),
            q(15, &[1, 4, 7, 10, 13, 14])
        );
        assert_eq!(q(15, &[14, 12]).rotate(3), q(15, &[0, 2]));
        assert_eq!(q(15, &[2, 5]).rotate(0), q(15, &[2, 5]));
        assert_eq!(q(15, &[2, 5]).rotate(-3), q(15, &[2, 14]));
        assert_eq!(q(15, &[2, 5]).rotate(15 * 7 + 1), q(15, &[3, 6]));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Quorum::new(4, []), Err(Error::EmptyQuorum));
        assert_eq!(Quorum::new(4, [1, 1]), Err(Error::DuplicateSlot(1)));
        assert_eq!(
            Quorum::new(4, [4]),
            Err(Error::SlotOutOfRange { slot: 4, n: 4 })
        );
        assert_eq!(Quorum::new(0, [0]), Err(Error::ZeroCycle));
        assert_eq!(Quorum::from_union(4, [3, 1, 3]).unwrap(), q(4, &[1, 3]));
    }

    #[test]
    fn intersection_examples() {
        let a = q(16, &[0, 4, 8, 12, 13, 14, 15]);
        let b = q(16, &[0, 1, 5, 9, 13, 14, 15]);
        assert_eq!(a.intersection(&b).unwrap(), vec![0, 13, 14, 15]);
        assert_eq!(a.intersection(&a).unwrap(), a.slots().to_vec());
        let lps_a = q(16, &[0, 4, 8, 12, 13, 14]);
        let lps_d = q(16, &[3, 7, 11, 15, 12, 13]);
        assert_eq!(lps_a.intersection(&lps_d).unwrap(), vec![12, 13]);
        assert_eq!(
            a.intersection(&q(15, &[0])),
            Err(Error::CycleMismatch {
                left: 16,
                right: 15
            })
        );
    }

    #[test]
    fn active_ratio_examples() {
        let a = q(16, &[0, 4, 8, 12, 13, 14, 15]);
        assert_eq!(a.active_ratio::<Rational>(), Rational::new(7, 16));
        assert_eq!(a.active_ratio::<f64>(), 0.4375);
        assert_eq!(
            Quorum::full(9).unwrap().active_ratio::<Rational>(),
            Rational::from_integer(1)
        );
    }

    #[test]
    fn awake_schedule_examples() {
        let awake = |v: Vec<bool>| -> Vec<usize> {
            v.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i)
                .collect()
        };
        assert_eq!(awake(q(2, &[0]).awake_schedule(0, 4)), vec![0, 2]);
        let a = q(15, &[0, 3, 6, 9, 12, 13]);
        assert_eq!(awake(a.awake_schedule(1, 15)), a.rotate(1).slots().to_vec());
        let as_row0 = q(16, &[0, 4, 8, 12, 13, 14, 15]);
        assert_eq!(
            awake(as_row0.awake_schedule(0, 32)),
            vec![0, 4, 8, 12, 13, 14, 15, 16, 20, 24, 28, 29, 30, 31]
        );
    }

    #[test]
    fn lift_repeats_pattern() {
        let a = q(3, &[1]);
        assert_eq!(a.lift(9).unwrap(), q(9, &[1, 4, 7]));
        assert!(a.lift(10).is_err());
    }

    fn arb_quorum() -> impl Strategy<Value = Quorum> {
        (1usize..40).prop_flat_map(|n| {
            proptest::collection::btree_set(0..n, 1..=n.min(12))
                .prop_map(move |s| Quorum::new(n, s).unwrap())
        })
    }

    proptest! {
        #[test]
        fn rotation_composes(q in arb_quorum(), i in -100i64..100, j in -100i64..100) {
            let n = q.n() as i64;
            prop_assert_eq!(q.rotate(i).rotate(j), q.rotate((i + j).rem_euclid(n)));
            prop_assert_eq!(q.rotate(n), q.clone());
            prop_assert_eq!(q.rotate(i).len(), q.len());
            prop_assert_eq!(q.rotate(i).active_ratio::<Rational>(), q.active_ratio::<Rational>());
        }

        #[test]
        fn schedule_matches_rotation(q in arb_quorum(), off in -50i64..50) {
            let sched = q.awake_schedule(off, q.n());
            let r = q.rotate(off);
            for (s, awake) in sched.iter().enumerate() {
                prop_assert_eq!(*awake, r.contains(s));
            }
        }

        #[test]
        fn intersection_laws(a in arb_quorum(), seed in any::<u64>()) {
            let b = a.rotate((seed % 97) as i64);
            let ab = a.intersection(&b).unwrap();
            prop_assert_eq!(&ab, &b.intersection(&a).unwrap());
            prop_assert_eq!(a.intersection(&a).unwrap(), a.slots().to_vec());
            prop_assert!(ab.len() <= a.len().min(b.len()));
            prop_assert_eq!(ab.len(), a.overlap(&b));
        }
    }
}
