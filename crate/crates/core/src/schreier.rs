//! Schreier graphs of finite-index subgroups of `F₂ = ⟨a, b⟩`.
//!
//! A graph is stored as the permutation action of the two generators on the
//! cosets together with the coset of the subgroup itself (the base vertex).
//! Every vertex has one outgoing and one incoming edge per generator, so the
//! underlying multigraph is 4-regular when a fixed point counts as a loop of
//! degree 2.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{all_permutations, inverse, is_permutation};
use crate::seed::stream_rng;

/// Retry budget for [`sample_schreier`]; the fraction of transitive pairs
/// tends to 1, so hitting it signals a broken sampler.
pub const DEFAULT_REJECTION_CAP: usize = 1000;

/// Largest index handled by [`enumerate_subgroups`].
pub const ENUMERATION_CEILING: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct SchreierGraph {
    sigma_a: Vec<u32>,
    sigma_b: Vec<u32>,
    base: u32,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    sigma_a: Vec<u32>,
    sigma_b: Vec<u32>,
    base: u32,
}

impl TryFrom<RawGraph> for SchreierGraph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        if raw.sigma_a.len() != raw.n {
            return Err(Error::invalid(format!(
                "n = {} but sigma_a has {} entries",
                raw.n,
                raw.sigma_a.len()
            )));
        }
        SchreierGraph::new(raw.sigma_a, raw.sigma_b, raw.base)
    }
}

impl From<SchreierGraph> for RawGraph {
    fn from(g: SchreierGraph) -> Self {
        RawGraph {
            n: g.sigma_a.len(),
            sigma_a: g.sigma_a,
            sigma_b: g.sigma_b,
            base: g.base,
        }
    }
}

impl SchreierGraph {
    pub fn new(sigma_a: Vec<u32>, sigma_b: Vec<u32>, base: u32) -> Result<Self> {
        let n = sigma_a.len();
        if n == 0 {
            return Err(Error::invalid("a Schreier graph needs at least one vertex"));
        }
        if sigma_b.len() != n {
            return Err(Error::invalid("generator permutations differ in length"));
        }
        if !is_permutation(&sigma_a) || !is_permutation(&sigma_b) {
            return Err(Error::invalid("generator images are not permutations"));
        }
        if base as usize >= n {
            return Err(Error::invalid(format!("base vertex {base} out of range")));
        }
        if !is_transitive(&sigma_a, &sigma_b) {
            return Err(Error::invalid("generators do not act transitively"));
        }
        Ok(SchreierGraph {
            sigma_a,
            sigma_b,
            base,
        })
    }

    /// The index-1 subgroup: one vertex with an `a`-loop and a `b`-loop.
    pub fn trivial() -> Self {
        SchreierGraph {
            sigma_a: vec![0],
            sigma_b: vec![0],
            base: 0,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.sigma_a.len()
    }

    pub fn sigma_a(&self) -> &[u32] {
        &self.sigma_a
    }

    pub fn sigma_b(&self) -> &[u32] {
        &self.sigma_b
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Neighbors of each vertex in the order `a, a⁻¹, b, b⁻¹`.
    pub fn adjacency(&self) -> Vec<[u32; 4]> {
        let ia = inverse(&self.sigma_a);
        let ib = inverse(&self.sigma_b);
        (0..self.n_vertices())
            .map(|v| [self.sigma_a[v], ia[v], self.sigma_b[v], ib[v]])
            .collect()
    }

    /// Degree of every vertex with loops counted twice; always 4.
    pub fn degrees(&self) -> Vec<usize> {
        // each generator contributes one outgoing and one incoming half-edge
        vec![4; self.n_vertices()]
    }

    /// Applies a vertex relabeling `v ↦ relabel[v]`.
    pub fn relabeled(&self, relabel: &[u32]) -> Result<Self> {
        if relabel.len() != self.n_vertices() || !is_permutation(relabel) {
            return Err(Error::invalid("relabeling is not a permutation of the vertices"));
        }
        let n = self.n_vertices();
        let mut a = vec![0; n];
        let mut b = vec![0; n];
        for v in 0..n {
            a[relabel[v] as usize] = relabel[self.sigma_a[v] as usize];
            b[relabel[v] as usize] = relabel[self.sigma_b[v] as usize];
        }
        Ok(SchreierGraph {
            sigma_a: a,
            sigma_b: b,
            base: relabel[self.base as usize],
        })
    }

    /// The same subgroup with vertices numbered in canonical discovery order.
    pub fn canonical(&self) -> Self {
        let order = discovery_labels(self);
        self.relabeled(&order)
            .expect("discovery order of a transitive action is a permutation")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization cannot fail")
    }
}

pub fn is_transitive(sigma_a: &[u32], sigma_b: &[u32]) -> bool {
    let n = sigma_a.len();
    if n == 0 {
        return false;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut reached = 1;
    // forward images suffice: orbits of a finite permutation group are closed
    // under the generators themselves
    while let Some(v) = stack.pop() {
        for w in [sigma_a[v] as usize, sigma_b[v] as usize] {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                stack.push(w);
            }
        }
    }
    reached == n
}

/// Breadth-first discovery index of every vertex, starting at the base and
/// expanding edges in the order `a, a⁻¹, b, b⁻¹`.
fn discovery_labels(g: &SchreierGraph) -> Vec<u32> {
    let adj = g.adjacency();
    let n = g.n_vertices();
    let mut label = vec![u32::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    label[g.base as usize] = 0;
    queue.push_back(g.base);
    let mut next = 1;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v as usize] {
            if label[w as usize] == u32::MAX {
                label[w as usize] = next;
                next += 1;
                queue.push_back(w);
            }
        }
    }
    debug_assert_eq!(next as usize, n);
    label
}

/// Deduplication key: the action relabeled by breadth-first discovery order
/// from the base vertex, serialized as little-endian `u32` words
/// `n, σ_a[0..n], σ_b[0..n]`. Two pointed graphs share a key exactly when
/// they describe the same subgroup.
pub fn graph_canonical_form(g: &SchreierGraph) -> Vec<u8> {
    let c = g.canonical();
    let n = c.n_vertices();
    let mut out = Vec::with_capacity(4 * (2 * n + 1));
    out.extend_from_slice(&(n as u32).to_le_bytes());
    for &x in c.sigma_a.iter().chain(&c.sigma_b) {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

/// Draws a uniformly random transitive pair on `n` points: two uniform
/// permutations, redrawn until they act transitively.
pub fn sample_schreier(n: usize, seed: u64) -> Result<SchreierGraph> {
    sample_schreier_with(n, &mut stream_rng(seed, 0), DEFAULT_REJECTION_CAP)
}

pub fn sample_schreier_with<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    rejection_cap: usize,
) -> Result<SchreierGraph> {
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let mut a: Vec<u32> = (0..n as u32).collect();
    let mut b = a.clone();
    for _ in 0..rejection_cap {
        a.shuffle(rng);
        b.shuffle(rng);
        if is_transitive(&a, &b) {
            return Ok(SchreierGraph {
                sigma_a: a,
                sigma_b: b,
                base: 0,
            });
        }
    }
    Err(Error::RejectionCapExceeded {
        n,
        attempts: rejection_cap,
    })
}

/// One canonical representative per index-`n` subgroup, in lexicographic
/// order of `(σ_a, σ_b)`.
///
/// A pair with base vertex 0 is kept iff it is already in canonical
/// discovery order, which happens for exactly one labeling of each pointed
/// transitive action.
pub fn enumerate_subgroups(n: usize) -> Result<Vec<SchreierGraph>> {
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    if n > ENUMERATION_CEILING {
        return Err(Error::ScaleExceeded {
            what: "enumeration",
            n,
            ceiling: ENUMERATION_CEILING,
        });
    }
    let perms = all_permutations(n);
    let inverses: Vec<u8> = perms
        .chunks(n)
        .flat_map(|p| {
            let mut inv = vec![0u8; n];
            for (i, &x) in p.iter().enumerate() {
                inv[x as usize] = i as u8;
            }
            inv
        })
        .collect();

    let per_a: Vec<Vec<SchreierGraph>> = (0..perms.len() / n)
        .into_par_iter()
        .map(|ia| {
            let a = &perms[ia * n..(ia + 1) * n];
            let a_inv = &inverses[ia * n..(ia + 1) * n];
            // the first discovered neighbor of the base is σ_a(0) unless it is a loop
            if a[0] > 1 {
                return Vec::new();
            }
            let mut found = Vec::new();
            for ib in 0..perms.len() / n {
                let b = &perms[ib * n..(ib + 1) * n];
                let b_inv = &inverses[ib * n..(ib + 1) * n];
                if in_discovery_order(a, a_inv, b, b_inv) {
                    found.push(SchreierGraph {
                        sigma_a: a.iter().map(|&x| x as u32).collect(),
                        sigma_b: b.iter().map(|&x| x as u32).collect(),
                        base: 0,
                    });
                }
            }
            found
        })
        .collect();
    Ok(per_a.into_iter().flatten().collect())
}

/// True iff breadth-first search from vertex 0 discovers vertex `k` as the
/// `k`-th new vertex for every `k` (which also forces transitivity).
fn in_discovery_order(a: &[u8], a_inv: &[u8], b: &[u8], b_inv: &[u8]) -> bool {
    let n = a.len();
    let mut next = 1u8;
    // vertices are discovered in label order, so the queue is just 0..next
    let mut head = 0u8;
    while head < next {
        let v = head as usize;
        for w in [a[v], a_inv[v], b[v], b_inv[v]] {
            if w >= next {
                if w != next {
                    return false;
                }
                next += 1;
            }
        }
        head += 1;
    }
    next as usize == n
}

/// Exact diameter of the underlying graph (loops and multi-edges ignored).
///
/// Breadth-first search from all vertices, 64 sources at a time: each vertex
/// carries a bit mask of the sources that have reached it.
pub fn graph_diameter(g: &SchreierGraph) -> u32 {
    let adj = g.adjacency();
    let n = adj.len();
    let mut visited = vec![0u64; n];
    let mut frontier = vec![0u64; n];
    let mut next = vec![0u64; n];
    let mut diameter = 0;
    for batch in (0..n).step_by(64) {
        let width = (n - batch).min(64);
        let full = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        visited.iter_mut().for_each(|x| *x = 0);
        frontier.iter_mut().for_each(|x| *x = 0);
        for k in 0..width {
            visited[batch + k] = 1 << k;
            frontier[batch + k] = 1 << k;
        }
        let mut level = 0;
        loop {
            let mut any = 0u64;
            for v in 0..n {
                let [p, q, r, s] = adj[v];
                let reach = frontier[p as usize]
                    | frontier[q as usize]
                    | frontier[r as usize]
                    | frontier[s as usize];
                let fresh = reach & !visited[v];
                next[v] = fresh;
                any |= fresh;
            }
            if any == 0 {
                break;
            }
            level += 1;
            for v in 0..n {
                visited[v] |= next[v];
            }
            std::mem::swap(&mut frontier, &mut next);
        }
        debug_assert!(visited.iter().all(|&m| m == full), "graph is not connected");
        diameter = diameter.max(level);
    }
    diameter
}

/// Smallest `d` with `2·3^d − 1 >= n`: no 4-regular graph on `n` vertices
/// has a smaller diameter, since a ball of radius `d` holds at most
/// `1 + 4·(1 + 3 + … + 3^{d−1}) = 2·3^d − 1` vertices.
pub fn diameter_lower_bound(n: usize) -> u32 {
    let mut d = 0u32;
    let mut ball = 1u128;
    while ball < n as u128 {
        d += 1;
        ball = 2 * 3u128.pow(d) - 1;
    }
    d
}

/// `d <= 2·log₃(n)`, decided exactly as `3^d <= n²`.
pub fn within_twice_log3(d: u32, n: usize) -> bool {
    let n2 = (n as u128) * (n as u128);
    let mut p = 1u128;
    for _ in 0..d {
        p *= 3;
        if p > n2 {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterStatistics {
    pub n_vertices: usize,
    pub trials: usize,
    /// Diameter of trial `t` at position `t`.
    pub diameters: Vec<u32>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiameterSummary {
    pub n: usize,
    pub trials: usize,
    pub min: u32,
    pub median: f64,
    pub max: u32,
    pub frac_le_2log3: f64,
}

impl DiameterStatistics {
    pub fn min(&self) -> u32 {
        self.diameters.iter().copied().min().unwrap_or(0)
    }

    pub fn max(&self) -> u32 {
        self.diameters.iter().copied().max().unwrap_or(0)
    }

    pub fn median(&self) -> f64 {
        let mut d = self.diameters.clone();
        d.sort_unstable();
        let m = d.len();
        if m == 0 {
            return 0.0;
        }
        if m % 2 == 1 {
            d[m / 2] as f64
        } else {
            (d[m / 2 - 1] as f64 + d[m / 2] as f64) / 2.0
        }
    }

    /// Fraction of trials with diameter at most `2·log₃ N`.
    pub fn frac_le_2log3(&self) -> f64 {
        self.fraction(|d| within_twice_log3(d, self.n_vertices))
    }

    pub fn fraction(&self, pred: impl Fn(u32) -> bool) -> f64 {
        if self.diameters.is_empty() {
            return 0.0;
        }
        self.diameters.iter().filter(|&&d| pred(d)).count() as f64 / self.diameters.len() as f64
    }

    pub fn summary(&self) -> DiameterSummary {
        DiameterSummary {
            n: self.n_vertices,
            trials: self.trials,
            min: self.min(),
            median: self.median(),
            max: self.max(),
            frac_le_2log3: self.frac_le_2log3(),
        }
    }

    /// CSV rows `trial,diameter` with header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("trial,diameter\n");
        for (t, d) in self.diameters.iter().enumerate() {
            s.push_str(&format!("{t},{d}\n"));
        }
        s
    }
}

/// Diameters of `trials` independent uniform samples; trial `t` draws from
/// stream `t` of `seed`, so trial 0 reproduces [`sample_schreier`].
pub fn diameter_statistics(n: usize, trials: usize, seed: u64) -> Result<DiameterStatistics> {
    if n < 3 {
        return Err(Error::invalid("diameter statistics need N >= 3"));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let diameters = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t as u64);
            sample_schreier_with(n, &mut rng, DEFAULT_REJECTION_CAP).map(|g| graph_diameter(&g))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiameterStatistics {
        n_vertices: n,
        trials,
        diameters,
        seed,
    })
}
