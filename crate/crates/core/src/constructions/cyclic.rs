//! Difference sets, cyclic quorum systems and FPP via Singer sets.

use serde::{Deserialize, Serialize};

use crate::closure::Budget;
use crate::error::{invalid, Error, Result};
use crate::quorum::Quorum;
use crate::system::QuorumSystem;

/// Residues mod `n` whose differences reach every nonzero residue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceSet {
    n: usize,
    elements: Vec<usize>,
    /// Fewest ordered representations `d_i − d_j` of any nonzero residue.
    lambda: usize,
}

impl DifferenceSet {
    pub fn new(n: usize, elements: impl IntoIterator<Item = usize>) -> Result<Self> {
        let q = Quorum::new(n, elements)?;
        let elements = q.slots().to_vec();
        if !is_difference_cover(n, &elements) {
            return Err(invalid(format!(
                "{elements:?} does not cover every nonzero residue mod {n}"
            )));
        }
        let counts = difference_counts(n, &elements);
        let lambda = counts.iter().skip(1).copied().min().unwrap_or(0);
        Ok(Self {
            n,
            elements,
            lambda,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn k_size(&self) -> usize {
        self.elements.len()
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    /// `Some(λ)` when every nonzero residue has exactly `λ` representations.
    pub fn uniform_multiplicity(&self) -> Option<usize> {
        let counts = difference_counts(self.n, &self.elements);
        let lambda = *counts.get(1)?;
        counts[1..].iter().all(|&c| c == lambda).then_some(lambda)
    }

    /// Singer (planar) set: every nonzero residue exactly once, `k(k−1)+1 = n`.
    pub fn is_planar(&self) -> bool {
        let k = self.k_size();
        k * (k - 1) + 1 == self.n && self.uniform_multiplicity() == Some(1)
    }
}

/// `counts[e]` = number of ordered pairs `i ≠ j` with `d_i − d_j ≡ e (mod n)`.
fn difference_counts(n: usize, elements: &[usize]) -> Vec<usize> {
    let mut counts = vec![0usize; n];
    for &a in elements {
        for &b in elements {
            if a != b {
                counts[(a + n - b) % n] += 1;
            }
        }
    }
    counts
}

/// Does every nonzero residue mod `n` arise as a difference of two elements?
pub fn is_difference_cover(n: usize, elements: &[usize]) -> bool {
    difference_counts(n, elements)
        .iter()
        .skip(1)
        .all(|&c| c > 0)
}

/// Lexicographically least `k_size`-subset of `Z_n` that is a difference set,
/// or `None` when there is none.
///
/// Backtracking over increasing elements; a branch is cut as soon as the
/// pairs it can still add cannot cover the residues left uncovered. The
/// number of search nodes is charged against `budget.max_tests`.
pub fn find_difference_set(
    n: usize,
    k_size: usize,
    budget: &Budget,
) -> Result<Option<DifferenceSet>> {
    if n == 0 || k_size == 0 || k_size > n {
        return Err(invalid(format!(
            "difference set search needs 1 ≤ k ≤ n, got n={n}, k={k_size}"
        )));
    }
    let mut search = Search {
        n,
        k: k_size,
        chosen: Vec::with_capacity(k_size),
        counts: vec![0; n],
        uncovered: n - 1,
        nodes: 0,
        limit: budget.max_tests,
    };
    // Covering is shift-invariant, so some solution contains 0, and the least
    // one starts with it.
    search.push(0);
    if search.extend(1)? {
        return DifferenceSet::new(n, search.chosen).map(Some);
    }
    Ok(None)
}

struct Search {
    n: usize,
    k: usize,
    chosen: Vec<usize>,
    counts: Vec<u32>,
    uncovered: usize,
    nodes: u64,
    limit: u64,
}

impl Search {
    fn push(&mut self, x: usize) {
        let n = self.n;
        for i in 0..self.chosen.len() {
            let y = self.chosen[i];
            for e in [(x + n - y) % n, (y + n - x) % n] {
                if self.counts[e] == 0 {
                    self.uncovered -= 1;
                }
                self.counts[e] += 1;
            }
        }
        self.chosen.push(x);
    }

    fn pop(&mut self) {
        let n = self.n;
        let x = self.chosen.pop().expect("non-empty");
        for &y in &self.chosen {
            for e in [(x + n - y) % n, (y + n - x) % n] {
                self.counts[e] -= 1;
                if self.counts[e] == 0 {
                    self.uncovered += 1;
                }
            }
        }
    }

    fn extend(&mut self, from: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(Error::Budget {
                what: "difference-set search",
                required: self.nodes,
                limit: self.limit,
            });
        }
        let m = self.chosen.len();
        if m == self.k {
            return Ok(self.uncovered == 0);
        }
        let capacity = self.k * (self.k - 1) - m * (m - 1);
        if self.uncovered > capacity {
            return Ok(false);
        }
        let remaining = self.k - m;
        for x in from..=self.n - remaining {
            self.push(x);
            if self.extend(x + 1)? {
                return Ok(true);
            }
            self.pop();
        }
        Ok(false)
    }
}

/// `G_i = D + i (mod n)` for `i = 0 … n−1`, uniformly weighted.
pub fn build_cyclic_system(set: &DifferenceSet) -> Result<QuorumSystem> {
    let n = set.n();
    let quorums = (0..n)
        .map(|i| Quorum::new(n, set.elements().iter().map(|d| (d + i) % n)))
        .collect::<Result<Vec<_>>>()?;
    QuorumSystem::uniform(n, quorums)
}

/// `p^e` with `p` prime and `e ≥ 1`.
pub fn is_prime_power(m: usize) -> bool {
    if m < 2 {
        return false;
    }
    let p = (2..=m)
        .find(|d| m.is_multiple_of(*d))
        .expect("m ≥ 2 has a divisor");
    let mut rest = m;
    while rest.is_multiple_of(p) {
        rest /= p;
    }
    rest == 1
}

/// The quorum size `k` of an FPP system on `n` points.
pub fn fpp_order(n: usize) -> Result<usize> {
    (2..=n)
        .take_while(|k| k * (k - 1) < n)
        .find(|k| k * (k - 1) + 1 == n && is_prime_power(k - 1))
        .ok_or_else(|| {
            invalid(format!(
                "FPP needs n = k(k−1)+1 with k−1 a prime power; {n} ≠ k(k−1)+1 for any such k"
            ))
        })
}

/// FPP as the cyclic system of the least Singer set of size `k`.
pub fn build_fpp_system(n: usize, budget: &Budget) -> Result<QuorumSystem> {
    let k = fpp_order(n)?;
    let set = find_difference_set(n, k, budget)?
        .ok_or_else(|| invalid(format!("no Singer difference set of size {k} mod {n}")))?;
    build_cyclic_system(&set)
}
