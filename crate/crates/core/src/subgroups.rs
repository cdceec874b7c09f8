//! Number of index-`N` subgroups of the free group `F₂ = ⟨a, b⟩`.
//!
//! Index-`N` subgroups correspond to transitive actions of `F₂` on
//! `{0..N}` with a marked point, i.e. to pairs of permutations generating a
//! transitive group, counted up to relabelings fixing the marked point. With
//! `t_N` the number of transitive pairs, `a_N = t_N / (N-1)!`. Counting all
//! `(N!)²` pairs by the size of the orbit containing the marked point gives
//!
//! ```text
//! a_N = N·N! − Σ_{i=1}^{N−1} (N−i)!·a_i
//! ```
//!
//! which is evaluated here with exact integers.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{all_permutations, cycle_labels};

/// Largest `N` accepted by [`count_transitive_pairs_bruteforce`].
pub const BRUTE_FORCE_CEILING: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupCountTable {
    pub max_index: usize,
    /// `counts[k]` is `a_{k+1}`.
    pub counts: Vec<BigUint>,
    /// `transitive_pair_counts[k]` is `t_{k+1} = a_{k+1}·k!`.
    pub transitive_pair_counts: Vec<BigUint>,
}

impl SubgroupCountTable {
    /// `a_n`, for `1 <= n <= max_index`.
    pub fn a(&self, n: usize) -> &BigUint {
        &self.counts[n - 1]
    }

    pub fn transitive_pairs(&self, n: usize) -> &BigUint {
        &self.transitive_pair_counts[n - 1]
    }

    /// `a_n / (n·n!)` as a float.
    pub fn ratio(&self, n: usize) -> f64 {
        big_ratio(self.a(n), &(factorial(n) * n))
    }

    /// Exact test of `a_n/(n·n!) < a_m/(m·m!)`.
    pub fn ratio_lt(&self, n: usize, m: usize) -> bool {
        self.a(n) * factorial(m) * m < self.a(m) * factorial(n) * n
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Quotient of two big integers as `f64`, without converting either operand
/// directly (they may exceed the `f64` range).
pub fn big_ratio(num: &BigUint, den: &BigUint) -> f64 {
    assert!(!den.is_zero(), "division by zero");
    let shift = den.bits().max(num.bits()).saturating_sub(1000) as usize;
    let n = (num >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

pub fn count_subgroups(max_index: usize) -> Result<SubgroupCountTable> {
    if max_index == 0 {
        return Err(Error::invalid("max_index must be at least 1"));
    }
    // fact[k] = k!
    let mut fact = Vec::with_capacity(max_index + 1);
    fact.push(BigUint::one());
    for k in 1..=max_index {
        let next = &fact[k - 1] * k;
        fact.push(next);
    }

    let mut counts: Vec<BigUint> = Vec::with_capacity(max_index);
    for n in 1..=max_index {
        let total = &fact[n] * n;
        let lower: BigUint = counts
            .iter()
            .enumerate()
            .map(|(k, a_i)| &fact[n - (k + 1)] * a_i)
            .sum();
        if lower >= total {
            return Err(Error::Invariant(format!("a_{n} would be non-positive")));
        }
        counts.push(total - lower);
    }
    let transitive_pair_counts = counts
        .iter()
        .enumerate()
        .map(|(k, a)| a * &fact[k])
        .collect();
    Ok(SubgroupCountTable {
        max_index,
        counts,
        transitive_pair_counts,
    })
}

/// Number of pairs `(σ_a, σ_b) ∈ S_N × S_N` generating a transitive group,
/// by direct enumeration.
///
/// The outer loop runs over `σ_a`; its cycles are the initial blocks of a
/// union-find that `σ_b` then merges. A full `N`-cycle admits every `σ_b`
/// without inspection.
pub fn count_transitive_pairs_bruteforce(n: usize) -> Result<BigUint> {
    count_transitive_pairs_bruteforce_with_ceiling(n, BRUTE_FORCE_CEILING)
}

pub fn count_transitive_pairs_bruteforce_with_ceiling(n: usize, ceiling: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    if n > ceiling {
        return Err(Error::ScaleExceeded {
            what: "oracle",
            n,
            ceiling,
        });
    }
    let perms = all_permutations(n);
    let n_perms = perms.len() / n;
    let total: u64 = perms
        .par_chunks(n)
        .map(|sigma_a| {
            let (label, cycles) = cycle_labels(sigma_a);
            if cycles == 1 {
                return n_perms as u64;
            }
            perms
                .chunks(n)
                .filter(|sigma_b| merges_to_one(&label, cycles, sigma_b))
                .count() as u64
        })
        .sum();
    Ok(BigUint::from(total))
}

fn merges_to_one(label: &[u8], cycles: usize, sigma_b: &[u8]) -> bool {
    let mut parent = [0u8; BRUTE_FORCE_CEILING];
    for (i, p) in parent.iter_mut().enumerate().take(cycles) {
        *p = i as u8;
    }
    fn root(parent: &mut [u8], mut x: u8) -> u8 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    let mut remaining = cycles;
    for (i, &j) in sigma_b.iter().enumerate() {
        let ra = root(&mut parent, label[i]);
        let rb = root(&mut parent, label[j as usize]);
        if ra != rb {
            parent[ra as usize] = rb;
            remaining -= 1;
            if remaining == 1 {
                return true;
            }
        }
    }
    remaining == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain enumeration with a generic union-find, no pruning.
    fn naive_transitive_pairs(n: usize) -> u64 {
        use crate::perm::UnionFind;
        let perms = all_permutations(n);
        let mut count = 0;
        for a in perms.chunks(n) {
            for b in perms.chunks(n) {
                let mut uf = UnionFind::new(n);
                for i in 0..n {
                    uf.union(i, a[i] as usize);
                    uf.union(i, b[i] as usize);
                }
                if uf.components() == 1 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn small_indices() {
        let t = count_subgroups(5).unwrap();
        let got: Vec<u64> = t.counts.iter().map(|c| c.to_u64().unwrap()).collect();
        assert_eq!(got, vec![1, 3, 13, 71, 461]);
        assert_eq!(t.transitive_pairs(3), &BigUint::from(26u32));
    }

    #[test]
    fn bruteforce_small_values() {
        assert_eq!(count_transitive_pairs_bruteforce(1).unwrap(), BigUint::from(1u32));
        assert_eq!(count_transitive_pairs_bruteforce(2).unwrap(), BigUint::from(3u32));
        assert_eq!(count_transitive_pairs_bruteforce(3).unwrap(), BigUint::from(26u32));
    }

    #[test]
    fn bruteforce_agrees_with_naive_enumeration() {
        for n in 1..=5 {
            assert_eq!(
                count_transitive_pairs_bruteforce(n).unwrap(),
                BigUint::from(naive_transitive_pairs(n)),
                "n = {n}"
            );
        }
    }

    #[test]
    fn oracle_ceiling_is_enforced() {
        match count_transitive_pairs_bruteforce(9) {
            Err(Error::ScaleExceeded { n: 9, ceiling: 8, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(count_transitive_pairs_bruteforce_with_ceiling(4, 3).is_err());
    }

    #[test]
    fn zero_index_rejected() {
        assert!(count_subgroups(0).is_err());
    }

    #[test]
    fn counts_respect_upper_bound_and_ratio_order() {
        let t = count_subgroups(30).unwrap();
        for n in 1..=30 {
            assert!(t.a(n) <= &(factorial(n) * n));
            assert!(!t.a(n).is_zero());
        }
        // a₂/(2·2!) = 3/4 > a₃/(3·3!) = 13/18; increasing from N = 3 on
        assert!(t.ratio_lt(3, 2));
        for n in 3..30 {
            assert!(t.ratio_lt(n, n + 1));
        }
        assert_eq!(t.ratio(1), 1.0);
    }

    #[test]
    fn big_ratio_handles_huge_operands() {
        let a = factorial(300);
        let b = factorial(300) * 4u32;
        assert!((big_ratio(&a, &b) - 0.25).abs() < 1e-15);
    }
}
