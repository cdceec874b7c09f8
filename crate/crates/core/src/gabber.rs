//! Empirical constants for `ln |H_p(X, Z)_tors| <= C·V` over complexes whose
//! 1-skeleton has maximum degree at most `D`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{ComplexFile, SimplicialComplex};
use crate::error::{Error, Result};
use crate::homology::homology;
use crate::perm::UnionFind;
use crate::seed::stream_rng;

/// Highest homological degree the scan reports.
pub const MAX_REPORTED_DEGREE: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GabberEntry {
    pub degree: u64,
    pub p: usize,
    pub constant: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GabberTable {
    entries: Vec<GabberEntry>,
}

impl GabberTable {
    pub fn new(entries: Vec<GabberEntry>) -> Self {
        GabberTable { entries }
    }

    /// Constants from the Hadamard bound, for `p = 1..=max_p`.
    pub fn hadamard(degree: u64, max_p: usize) -> Self {
        GabberTable {
            entries: (1..=max_p)
                .map(|p| GabberEntry {
                    degree,
                    p,
                    constant: hadamard_constant(degree, p),
                })
                .collect(),
        }
    }

    pub fn entries(&self) -> &[GabberEntry] {
        &self.entries
    }

    /// Largest constant over all `p` at the smallest tabulated degree cap
    /// that is at least `degree`.
    pub fn constant_for(&self, degree: u64) -> Option<f64> {
        self.lookup(degree, |_| true)
    }

    /// As [`GabberTable::constant_for`], restricted to homological degree `p`.
    pub fn constant_for_p(&self, degree: u64, p: usize) -> Option<f64> {
        self.lookup(degree, |e| e.p == p)
    }

    fn lookup(&self, degree: u64, keep: impl Fn(&GabberEntry) -> bool) -> Option<f64> {
        let cap = self.entries.iter().filter(|e| e.degree >= degree && keep(e)).map(|e| e.degree).min()?;
        self.entries
            .iter()
            .filter(|e| e.degree == cap && keep(e))
            .map(|e| e.constant)
            .fold(None, |m, c| Some(m.map_or(c, |m: f64| m.max(c))))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// A constant `C` with `ln |H_p tors| <= C·V` for every complex of maximum
/// degree `D`.
///
/// The torsion order divides every nonzero maximal minor of `∂_{p+1}`, so it
/// is at most the product of the `r = rank` largest column norms, or of row
/// norms. Columns have `p + 2` unit entries and number at most
/// `V·C(D, p+1)/(p+2)`; rows have at most `D − p` entries and number at most
/// `V·C(D, p)/(p+1)`.
pub fn hadamard_constant(degree: u64, p: usize) -> f64 {
    let p = p as u64;
    let by_columns = binomial(degree, p + 1) / (p + 2) as f64 * 0.5 * ((p + 2) as f64).ln();
    let by_rows = if degree > p {
        binomial(degree, p) / (p + 1) as f64 * 0.5 * ((degree - p) as f64).ln()
    } else {
        0.0
    };
    by_columns.min(by_rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComplexKind {
    /// Bounded-degree graph with triangles added while their boundaries
    /// stay independent.
    Clique,
    /// Disks glued along closed walks in a small bounded-degree graph.
    Presentation,
    /// A cycle with one disk wrapping it `m` times.
    Moore,
    /// All triangles of a bounded-degree graph, with tetrahedra added while
    /// their boundaries stay independent.
    Solid,
}

const KINDS: [ComplexKind; 4] = [
    ComplexKind::Clique,
    ComplexKind::Presentation,
    ComplexKind::Moore,
    ComplexKind::Solid,
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub trial: u64,
    pub kind: ComplexKind,
    pub vertices: usize,
    pub max_degree: usize,
    /// `ln |H_p tors|` for `p = 1..=MAX_REPORTED_DEGREE`.
    pub log_torsion: Vec<f64>,
}

impl Observation {
    pub fn ratio(&self, p: usize) -> f64 {
        self.log_torsion.get(p - 1).copied().unwrap_or(0.0) / self.vertices as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GabberEstimate {
    pub p: usize,
    /// Largest observed `ln |H_p tors| / V`.
    pub max_ratio: f64,
    pub witness_trial: Option<u64>,
    pub witness: Option<ComplexFile>,
    pub hadamard: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GabberScan {
    pub degree: u64,
    pub vmax: usize,
    pub trials: u64,
    pub seed: u64,
    pub estimates: Vec<GabberEstimate>,
    pub observations: Vec<Observation>,
}

impl GabberScan {
    /// Largest estimate over all reported degrees.
    pub fn max_ratio(&self) -> f64 {
        self.estimates.iter().map(|e| e.max_ratio).fold(0.0, f64::max)
    }

    pub fn table(&self) -> GabberTable {
        GabberTable::new(
            self.estimates
                .iter()
                .map(|e| GabberEntry {
                    degree: self.degree,
                    p: e.p,
                    constant: e.max_ratio,
                })
                .collect(),
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("scan serialization cannot fail")
    }
}

/// Samples `trials` random complexes with at most `vmax` vertices and
/// 1-skeleton degree at most `degree`, trial `t` drawing from stream `t` of
/// `seed`, and records the largest `ln |H_p tors| / V` per degree `p`.
pub fn gabber_scan(degree: u64, vmax: usize, trials: u64, seed: u64) -> Result<GabberScan> {
    if degree < 2 {
        return Err(Error::invalid(format!("degree cap must be at least 2, got {degree}")));
    }
    if vmax < 4 {
        return Err(Error::invalid(format!("vertex cap must be at least 4, got {vmax}")));
    }
    let d = degree.min(u32::MAX as u64) as usize;
    let results: Vec<(Observation, SimplicialComplex)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t);
            let kind = *KINDS.choose(&mut rng).expect("nonempty");
            let c = generate(kind, d, vmax, &mut rng);
            debug_assert!(c.max_degree() <= d && c.n_vertices() <= vmax);
            let h = homology(&c)?;
            let obs = Observation {
                trial: t,
                kind,
                vertices: c.n_vertices(),
                max_degree: c.max_degree(),
                log_torsion: (1..=MAX_REPORTED_DEGREE).map(|p| h.log_torsion(p)).collect(),
            };
            Ok((obs, c))
        })
        .collect::<Result<_>>()?;
    let estimates = (1..=MAX_REPORTED_DEGREE)
        .map(|p| {
            let mut best: Option<&(Observation, SimplicialComplex)> = None;
            for r in &results {
                let ratio = r.0.ratio(p);
                if ratio > 0.0 && best.is_none_or(|b| ratio > b.0.ratio(p)) {
                    best = Some(r);
                }
            }
            GabberEstimate {
                p,
                max_ratio: best.map_or(0.0, |b| b.0.ratio(p)),
                witness_trial: best.map(|b| b.0.trial),
                witness: best.map(|b| b.1.to_file()),
                hadamard: hadamard_constant(degree, p),
            }
        })
        .collect();
    Ok(GabberScan {
        degree,
        vmax,
        trials,
        seed,
        estimates,
        observations: results.into_iter().map(|r| r.0).collect(),
    })
}

pub fn generate(kind: ComplexKind, degree: usize, vmax: usize, rng: &mut ChaCha8Rng) -> SimplicialComplex {
    match kind {
        ComplexKind::Clique => clique_complex(degree, vmax, rng, false),
        ComplexKind::Solid => clique_complex(degree, vmax, rng, true),
        ComplexKind::Moore => moore_complex(degree, vmax, rng),
        ComplexKind::Presentation => presentation_complex(degree, vmax, rng),
    }
}

/// Random graph where each vertex links to others at cyclic distance at
/// most `degree`, keeping every degree at most `degree`.
fn random_local_graph(v: usize, degree: usize, rng: &mut ChaCha8Rng) -> Vec<BTreeSet<u32>> {
    let mut label: Vec<u32> = (0..v as u32).collect();
    label.shuffle(rng);
    let window = (v / 2).min(degree.max(2));
    let mut candidates: Vec<(usize, usize)> = (0..v)
        .flat_map(|i| (1..=window).map(move |s| (i, (i + s) % v)))
        .filter(|&(i, j)| i != j)
        .collect();
    candidates.shuffle(rng);
    let mut adj = vec![BTreeSet::new(); v];
    for (i, j) in candidates {
        let (a, b) = (label[i] as usize, label[j] as usize);
        if adj[a].len() < degree && adj[b].len() < degree {
            adj[a].insert(b as u32);
            adj[b].insert(a as u32);
        }
    }
    adj
}

/// Cliques of the given size, as sorted tuples.
fn cliques(adj: &[BTreeSet<u32>], size: usize) -> Vec<Vec<u32>> {
    let mut layer: Vec<Vec<u32>> = (0..adj.len() as u32).map(|v| vec![v]).collect();
    for _ in 1..size {
        layer = layer
            .iter()
            .flat_map(|s| {
                let last = *s.last().unwrap();
                adj[last as usize]
                    .range(last + 1..)
                    .filter(|&&w| s.iter().all(|&u| adj[u as usize].contains(&w)))
                    .map(move |&w| {
                        let mut t = s.clone();
                        t.push(w);
                        t
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    layer
}

const PRIME: u64 = 2_147_483_647;

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % PRIME;
        }
        b = b * b % PRIME;
        e >>= 1;
    }
    r
}

/// Sparse echelon basis over `GF(PRIME)` for testing linear independence.
/// Each stored row is keyed by its smallest index, where it has a one.
#[derive(Default)]
struct ModpBasis {
    rows: HashMap<usize, Vec<(usize, u64)>>,
}

impl ModpBasis {
    /// Adds `v` if independent of the basis; reports whether it was.
    fn insert(&mut self, v: Vec<(usize, u64)>) -> bool {
        let mut v: BTreeMap<usize, u64> = v.into_iter().filter(|e| e.1 != 0).collect();
        // a leading index that is not a pivot cannot be cancelled
        while let Some((&lead, &f)) = v.iter().next() {
            let Some(row) = self.rows.get(&lead) else {
                let inv = pow_mod(f, PRIME - 2);
                self.rows.insert(lead, v.into_iter().map(|(i, x)| (i, x * inv % PRIME)).collect());
                return true;
            };
            for &(i, r) in row {
                let x = v.entry(i).or_insert(0);
                *x = (*x + PRIME - f * r % PRIME) % PRIME;
                if *x == 0 {
                    v.remove(&i);
                }
            }
        }
        false
    }
}

/// Boundary of a sorted simplex as a sparse vector over the indexed faces.
fn boundary_mod_p(s: &[u32], faces: &HashMap<Vec<u32>, usize>) -> Vec<(usize, u64)> {
    (0..s.len())
        .map(|i| {
            let mut f = s.to_vec();
            f.remove(i);
            (faces[&f], if i % 2 == 0 { 1 } else { PRIME - 1 })
        })
        .collect()
}

fn face_index(faces: &[Vec<u32>]) -> HashMap<Vec<u32>, usize> {
    faces.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect()
}

/// Takes top simplices in random order while their boundaries stay
/// independent mod a large prime, up to `target` of them.
fn spanning_layer(mut candidates: Vec<Vec<u32>>, faces: &[Vec<u32>], target: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
    let index = face_index(faces);
    candidates.shuffle(rng);
    let mut basis = ModpBasis::default();
    let mut taken = Vec::new();
    for c in candidates {
        if taken.len() >= target {
            break;
        }
        if basis.insert(boundary_mod_p(&c, &index)) {
            taken.push(c);
        }
    }
    taken
}

fn edges_of(adj: &[BTreeSet<u32>]) -> Vec<Vec<u32>> {
    adj.iter()
        .enumerate()
        .flat_map(|(a, nb)| nb.range(a as u32 + 1..).map(move |&b| vec![a as u32, b]))
        .collect()
}

// Torsion lives in complexes whose top simplices just kill the rational
// homology below them, so the top layer grows until it reaches that rank.
fn clique_complex(degree: usize, vmax: usize, rng: &mut ChaCha8Rng, solid: bool) -> SimplicialComplex {
    let v = rng.random_range(4..=vmax);
    let adj = random_local_graph(v, degree, rng);
    let edges = edges_of(&adj);
    let mut uf = UnionFind::new(v);
    for e in &edges {
        uf.union(e[0] as usize, e[1] as usize);
    }
    let cycle_rank = edges.len() + uf.components() - v;
    let mut simplices = edges.clone();
    if solid {
        let triangles = cliques(&adj, 3);
        let mut basis = ModpBasis::default();
        let index = face_index(&edges);
        let boundary_rank = triangles.iter().filter(|t| basis.insert(boundary_mod_p(t, &index))).count();
        let tets = spanning_layer(cliques(&adj, 4), &triangles, triangles.len() - boundary_rank, rng);
        simplices.extend(triangles);
        simplices.extend(tets);
    } else {
        simplices.extend(spanning_layer(cliques(&adj, 3), &edges, cycle_rank, rng));
    }
    SimplicialComplex::from_simplices(v, simplices).expect("generated simplices are valid")
}

/// Triangles of a disk glued along the closed walk `walk` (consecutive
/// entries distinct), using fresh vertices from `first_new` on. Returns the
/// number of fresh vertices.
///
/// When no three cyclically consecutive walk vertices repeat, each fresh
/// ring vertex covers two walk edges and the ring is filled by a fan, so a
/// walk of length `L` costs `⌈L/2⌉` vertices. Otherwise each walk edge gets
/// its own ring vertex and the ring is coned off.
fn attach_disk(walk: &[u32], first_new: u32, out: &mut Vec<Vec<u32>>) -> u32 {
    let l = walk.len();
    let w = |i: usize| walk[i % l];
    let compact = l >= 5 && (0..l).all(|i| w(i) != w(i + 2));
    if !compact {
        let ring = |i: usize| first_new + (i % l) as u32;
        let cone = first_new + l as u32;
        for i in 0..l {
            out.push(vec![w(i), w(i + 1), ring(i)]);
            out.push(vec![w(i + 1), ring(i), ring(i + 1)]);
            out.push(vec![ring(i), ring(i + 1), cone]);
        }
        return l as u32 + 1;
    }
    let r = l.div_ceil(2);
    let ring = |j: usize| first_new + (j % r) as u32;
    for j in 0..r {
        out.push(vec![w(2 * j), w(2 * j + 1), ring(j)]);
        let end = (2 * j + 2).min(l);
        if 2 * j + 1 < l {
            out.push(vec![w(2 * j + 1), w(end), ring(j)]);
        }
        out.push(vec![w(end), ring(j), ring(j + 1)]);
    }
    for j in 1..r - 1 {
        out.push(vec![ring(0), ring(j), ring(j + 1)]);
    }
    r as u32
}

/// Vertex degrees of the 1-skeleton spanned by `simplices`.
fn degrees(n: usize, simplices: &[Vec<u32>]) -> Vec<usize> {
    let mut adj = vec![BTreeSet::new(); n];
    for s in simplices {
        for &a in s {
            for &b in s {
                if a != b {
                    adj[a as usize].insert(b);
                }
            }
        }
    }
    adj.iter().map(BTreeSet::len).collect()
}

/// A `k`-cycle with one disk wrapping it `m` times.
fn moore_simplices(k: usize, m: usize) -> (usize, Vec<Vec<u32>>) {
    let walk: Vec<u32> = (0..m * k).map(|i| (i % k) as u32).collect();
    let mut simplices: Vec<Vec<u32>> = (0..k as u32).map(|i| vec![i, (i + 1) % k as u32]).collect();
    let used = attach_disk(&walk, k as u32, &mut simplices);
    (k + used as usize, simplices)
}

fn moore_complex(degree: usize, vmax: usize, rng: &mut ChaCha8Rng) -> SimplicialComplex {
    let options: Vec<(usize, Vec<Vec<u32>>)> = (3..=vmax)
        .flat_map(|k| (2..=degree).map(move |m| (k, m)))
        // k·m >= 6, so the disk is compact
        .filter(|&(k, m)| k + (k * m).div_ceil(2) <= vmax)
        .map(|(k, m)| moore_simplices(k, m))
        .filter(|(n, s)| *n <= vmax && degrees(*n, s).iter().all(|&d| d <= degree))
        .collect();
    match options.choose(rng) {
        Some((n, s)) => SimplicialComplex::from_simplices(*n, s.clone()).expect("generated simplices are valid"),
        None => SimplicialComplex::from_simplices(vmax.min(4), [[0u32, 1], [1, 2], [0, 2]]).unwrap(),
    }
}

fn shortest_path(adj: &[BTreeSet<u32>], from: u32, to: u32) -> Vec<u32> {
    let mut prev = vec![u32::MAX; adj.len()];
    prev[from as usize] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &y in &adj[x as usize] {
            if prev[y as usize] == u32::MAX {
                prev[y as usize] = x;
                queue.push_back(y);
            }
        }
    }
    let mut path = vec![to];
    while *path.last().unwrap() != from {
        path.push(prev[*path.last().unwrap() as usize]);
    }
    path.reverse();
    path
}

fn presentation_complex(degree: usize, vmax: usize, rng: &mut ChaCha8Rng) -> SimplicialComplex {
    let base_n = rng.random_range(3..=(vmax / 4).max(3));
    // a cycle keeps the base connected; chords add generators
    let mut adj = vec![BTreeSet::new(); base_n];
    for i in 0..base_n {
        let j = (i + 1) % base_n;
        adj[i].insert(j as u32);
        adj[j].insert(i as u32);
    }
    for _ in 0..rng.random_range(0..=base_n) {
        let (a, b) = (rng.random_range(0..base_n), rng.random_range(0..base_n));
        if a != b && adj[a].len() < degree / 3 && adj[b].len() < degree / 3 {
            adj[a].insert(b as u32);
            adj[b].insert(a as u32);
        }
    }
    let mut simplices: Vec<Vec<u32>> = adj
        .iter()
        .enumerate()
        .flat_map(|(a, nb)| nb.range(a as u32 + 1..).map(move |&b| vec![a as u32, b]))
        .collect();
    let mut n = base_n;
    for _ in 0..rng.random_range(1..=4) {
        if n + 3 > vmax {
            break;
        }
        let len = rng.random_range(3..=(2 * degree).min(2 * (vmax - n)));
        let start = rng.random_range(0..base_n as u32);
        let mut walk = vec![start];
        let mut x = start;
        while walk.len() < len {
            let path = shortest_path(&adj, x, start);
            if walk.len() + path.len() - 1 > len {
                break;
            }
            // avoid stepping straight back when there is a choice
            let prev = walk.len().checked_sub(2).map(|i| walk[i]);
            let nb: Vec<u32> = adj[x as usize].iter().copied().filter(|&y| Some(y) != prev).collect();
            x = match nb.choose(rng) {
                Some(&y) => y,
                None => prev.expect("base is connected"),
            };
            walk.push(x);
        }
        if x == start {
            walk.pop();
        } else {
            let back = shortest_path(&adj, x, start);
            walk.extend_from_slice(&back[1..back.len() - 1]);
        }
        if walk.len() < 3 {
            continue;
        }
        let mut trial = simplices.clone();
        let used = attach_disk(&walk, n as u32, &mut trial) as usize;
        if n + used > vmax || degrees(n + used, &trial).iter().any(|&d| d > degree) {
            continue;
        }
        simplices = trial;
        n += used;
    }
    SimplicialComplex::from_simplices(n, simplices).expect("generated simplices are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures::projective_plane;

    #[test]
    fn table_lookup() {
        let t = GabberTable::new(vec![
            GabberEntry { degree: 6, p: 1, constant: 0.1 },
            GabberEntry { degree: 6, p: 2, constant: 0.3 },
            GabberEntry { degree: 12, p: 1, constant: 0.2 },
        ]);
        assert_eq!(t.constant_for(5), Some(0.3));
        assert_eq!(t.constant_for_p(5, 1), Some(0.1));
        assert_eq!(t.constant_for(7), Some(0.2));
        assert_eq!(t.constant_for(13), None);
        assert_eq!(GabberTable::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn projective_plane_ratio_and_hadamard() {
        let c = projective_plane();
        let h = homology(&c).unwrap();
        let ratio = h.log_torsion(1) / c.n_vertices() as f64;
        assert!((ratio - 0.115_524_530_093_324_2).abs() < 1e-12);
        assert!(ratio <= hadamard_constant(c.max_degree() as u64, 1));
        assert!((hadamard_constant(12, 1) - 6.0 * 0.5 * 11f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn moore_space_has_cyclic_torsion() {
        for (k, m, vertices) in [(3, 2, 6), (3, 4, 9), (4, 3, 10), (5, 5, 18)] {
            let (n, s) = moore_simplices(k, m);
            assert_eq!(n, vertices);
            let c = SimplicialComplex::from_simplices(n, s).unwrap();
            let h = homology(&c).unwrap();
            assert_eq!(h.betti_numbers(), vec![1, 0, 0]);
            assert_eq!(h.torsion(1), &[(m as u32).into()]);
        }
    }

    #[test]
    fn coned_disk_on_backtracking_walk() {
        // a walk along a path and back is contractible in the base
        let mut s: Vec<Vec<u32>> = vec![vec![0, 1], vec![1, 2]];
        let used = attach_disk(&[0, 1, 2, 1], 3, &mut s);
        assert_eq!(used, 5);
        let c = SimplicialComplex::from_simplices(8, s).unwrap();
        let h = homology(&c).unwrap();
        assert_eq!(h.betti_numbers(), vec![1, 0, 1]);
        assert!(h.torsion(1).is_empty());
    }

    #[test]
    fn generators_respect_caps() {
        for kind in KINDS {
            for t in 0..40 {
                let mut rng = stream_rng(3, t);
                let c = generate(kind, 12, 40, &mut rng);
                assert!(c.max_degree() <= 12, "{kind:?} degree {}", c.max_degree());
                assert!(c.n_vertices() <= 40 && c.n_vertices() >= 3);
                assert!(c.is_closed());
            }
        }
    }

    #[test]
    fn scan_is_deterministic_and_bounded() {
        let a = gabber_scan(8, 20, 60, 5).unwrap();
        let b = gabber_scan(8, 20, 60, 5).unwrap();
        assert_eq!(a, b);
        for o in &a.observations {
            for p in 1..=MAX_REPORTED_DEGREE {
                assert!(o.ratio(p).is_finite());
                assert!(o.ratio(p) <= a.estimates[p - 1].max_ratio + 1e-15);
                assert!(o.ratio(p) <= hadamard_constant(8, p));
            }
        }
        assert!(a.max_ratio() > 0.0);
    }

    #[test]
    fn rejects_small_caps() {
        assert!(gabber_scan(1, 10, 1, 0).is_err());
        assert!(gabber_scan(4, 3, 1, 0).is_err());
    }
}
