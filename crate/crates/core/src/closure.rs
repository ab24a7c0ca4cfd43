//! Exhaustive verification of the rotational closure property.
//!
//! A pair `(G, H)` survives offset `i` iff `G ∩ rotate(H, i) ≠ ∅`, which is
//! the same as `i ≡ g − h (mod n)` for some `g ∈ G`, `h ∈ H`. The checker
//! walks every ordered pair once, marks the offsets its differences reach,
//! and reports the first offset left unmarked.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quorum::{Quorum, SlotId};
use crate::system::QuorumSystem;

/// Caps on exhaustive enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Upper bound on `pairs × offsets` membership tests.
    pub max_tests: u64,
    /// Upper bound on the `lcm` window used by cross-system checks.
    pub max_window: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_tests: 100_000_000,
            max_window: 1_000_000,
        }
    }
}

impl Budget {
    pub fn with_max_tests(max_tests: u64) -> Self {
        Self {
            max_tests,
            ..Self::default()
        }
    }

    fn charge(&self, what: &'static str, required: u64) -> Result<()> {
        if required > self.max_tests {
            return Err(Error::Budget {
                what,
                required,
                limit: self.max_tests,
            });
        }
        Ok(())
    }
}

/// A quorum pair and offset with no common slot: `first ∩ rotate(second, offset) = ∅`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    /// Index of `G` in the first system.
    pub first: usize,
    /// Index of `H` in the second system.
    pub second: usize,
    /// Rotation applied to `H`; for cross checks, the start offset of `H`'s
    /// schedule inside the `lcm` window.
    pub offset: usize,
}

impl Witness {
    /// `G ∩ rotate(H, offset)` within one system. Empty for a genuine witness.
    pub fn replay_rotational(&self, sys: &QuorumSystem) -> Result<Vec<SlotId>> {
        let g = &sys.quorums()[self.first];
        let h = &sys.quorums()[self.second];
        g.intersection(&h.rotate(self.offset as i64))
    }

    /// Shared awake slots of the two periodic schedules over the `lcm` window.
    pub fn replay_cross(&self, a: &QuorumSystem, b: &QuorumSystem) -> Result<Vec<SlotId>> {
        let window = a.n().lcm(&b.n());
        let g = a.quorums()[self.first].lift(window)?;
        let h = b.quorums()[self.second].lift(window)?;
        g.intersection(&h.rotate(self.offset as i64))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum ClosureReport {
    Pass,
    Fail(Witness),
}

impl ClosureReport {
    pub fn passed(&self) -> bool {
        matches!(self, ClosureReport::Pass)
    }

    pub fn witness(&self) -> Option<Witness> {
        match self {
            ClosureReport::Pass => None,
            ClosureReport::Fail(w) => Some(*w),
        }
    }
}

/// Checks `G ∩ rotate(H, i) ≠ ∅` for every ordered pair and every offset.
///
/// On failure the witness is the least `(offset, first, second)` triple.
/// Fails with [`Error::Budget`] when `|Q|² · n` exceeds the cap.
pub fn check_rotational_closure(sys: &QuorumSystem, budget: &Budget) -> Result<ClosureReport> {
    let m = sys.len() as u64;
    budget.charge("rotational closure", m * m * sys.n() as u64)?;
    Ok(first_gap(sys.quorums(), sys.quorums(), sys.n()))
}

/// Checks two systems with possibly different cycle lengths.
///
/// Each quorum is extended periodically over `L = lcm(nA, nB)` slots, after
/// which both schedules repeat; a pair passes iff the two awake sets share a
/// slot in the window for every relative start offset in `[0, L)`.
pub fn check_cross_closure(
    a: &QuorumSystem,
    b: &QuorumSystem,
    budget: &Budget,
) -> Result<ClosureReport> {
    let window = a.n().lcm(&b.n());
    if window as u64 > budget.max_window {
        return Err(Error::Budget {
            what: "cross-closure window",
            required: window as u64,
            limit: budget.max_window,
        });
    }
    budget.charge(
        "cross closure",
        a.len() as u64 * b.len() as u64 * window as u64,
    )?;
    let lift = |sys: &QuorumSystem| -> Result<Vec<Quorum>> {
        sys.quorums().iter().map(|q| q.lift(window)).collect()
    };
    Ok(first_gap(&lift(a)?, &lift(b)?, window))
}

/// Sanity bound for closed systems: every quorum has at least `⌈√n⌉` slots.
pub fn min_quorum_size_check(sys: &QuorumSystem) -> bool {
    let bound = ceil_sqrt(sys.n());
    sys.quorums().iter().all(|q| q.len() >= bound)
}

pub(crate) fn ceil_sqrt(n: usize) -> usize {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

fn first_gap(left: &[Quorum], right: &[Quorum], n: usize) -> ClosureReport {
    // stamp[i] == epoch marks offset i as covered for the current pair
    let mut stamp = vec![0u32; n];
    let mut epoch = 0u32;
    let mut best: Option<Witness> = None;
    for (gi, g) in left.iter().enumerate() {
        for (hi, h) in right.iter().enumerate() {
            epoch += 1;
            for &x in g.slots() {
                for &y in h.slots() {
                    stamp[(x + n - y) % n] = epoch;
                }
            }
            let limit = best.map_or(n, |w| w.offset);
            if let Some(offset) = (0..limit).find(|&i| stamp[i] != epoch) {
                best = Some(Witness {
                    first: gi,
                    second: hi,
                    offset,
                });
                if offset == 0 {
                    return ClosureReport::Fail(best.unwrap());
                }
            }
        }
    }
    best.map_or(ClosureReport::Pass, ClosureReport::Fail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(n: usize, qs: &[&[usize]]) -> QuorumSystem {
        QuorumSystem::uniform(
            n,
            qs.iter()
                .map(|s| Quorum::new(n, s.iter().copied()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    /// Direct enumeration with rotate + intersection, in (offset, G, H) order.
    fn naive(sys: &QuorumSystem) -> ClosureReport {
        for i in 0..sys.n() {
            for (gi, g) in sys.quorums().iter().enumerate() {
                for (hi, h) in sys.quorums().iter().enumerate() {
                    if g.intersection(&h.rotate(i as i64)).unwrap().is_empty() {
                        return ClosureReport::Fail(Witness {
                            first: gi,
                            second: hi,
                            offset: i,
                        });
                    }
                }
            }
        }
        ClosureReport::Pass
    }

    #[test]
    fn disjoint_singletons_fail_at_offset_zero() {
        let s = sys(2, &[&[0], &[1]]);
        let report = check_rotational_closure(&s, &Budget::default()).unwrap();
        assert_eq!(
            report,
            ClosureReport::Fail(Witness {
                first: 0,
                second: 1,
                offset: 0
            })
        );
        assert!(report
            .witness()
            .unwrap()
            .replay_rotational(&s)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn small_examples_agree_with_naive_enumeration() {
        let cases = [
            sys(3, &[&[0, 1], &[0, 2], &[1, 2]]),
            sys(7, &[&[1, 2, 4]]),
            sys(7, &[&[0, 1, 2]]),
            sys(8, &[&[0, 1, 2], &[0, 4]]),
            sys(5, &[&[0, 1], &[2, 3]]),
        ];
        for s in &cases {
            assert_eq!(
                check_rotational_closure(s, &Budget::default()).unwrap(),
                naive(s),
                "{s:?}"
            );
        }
    }

    #[test]
    fn opposite_parity_singletons_fail_cross_at_offset_one() {
        let a = sys(2, &[&[0]]);
        let report = check_cross_closure(&a, &a, &Budget::default()).unwrap();
        let w = report.witness().unwrap();
        assert_eq!(
            w,
            Witness {
                first: 0,
                second: 0,
                offset: 1
            }
        );
        assert!(w.replay_cross(&a, &a).unwrap().is_empty());
    }

    #[test]
    fn budget_is_distinct_from_failure() {
        let s = sys(7, &[&[1, 2, 4]]);
        let tight = Budget::with_max_tests(6);
        assert!(matches!(
            check_rotational_closure(&s, &tight),
            Err(Error::Budget { .. })
        ));
        let narrow = Budget {
            max_tests: u64::MAX,
            max_window: 10,
        };
        let b = sys(3, &[&[0, 1]]);
        assert!(matches!(
            check_cross_closure(&s, &b, &narrow),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn ceil_sqrt_bounds() {
        assert_eq!(ceil_sqrt(7), 3);
        assert_eq!(ceil_sqrt(16), 4);
        assert_eq!(ceil_sqrt(17), 5);
        assert_eq!(ceil_sqrt(1), 1);
        assert!(min_quorum_size_check(&sys(7, &[&[1, 2, 4]])));
        assert!(!min_quorum_size_check(&sys(7, &[&[1, 2]])));
    }
}
