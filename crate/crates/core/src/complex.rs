//! Finite abstract simplicial complexes.
//!
//! Simplices are strictly increasing vertex tuples; each dimension holds a
//! sorted, duplicate-free list. The boundary of `[v₀ … v_p]` is
//! `Σ (−1)^i [v₀ … v̂_i … v_p]`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::snf::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimplicialComplex {
    n_vertices: usize,
    /// `by_dim[p]` lists the `p`-simplices; `by_dim[0]` is every vertex.
    by_dim: Vec<Vec<Vec<u32>>>,
}

impl SimplicialComplex {
    /// The closure under faces of `simplices` on vertices `0..n_vertices`.
    /// Every vertex is present even if no simplex uses it.
    pub fn from_simplices<I, S>(n_vertices: usize, simplices: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u32]>,
    {
        let mut sets: Vec<BTreeSet<Vec<u32>>> = vec![(0..n_vertices as u32).map(|v| vec![v]).collect()];
        for s in simplices {
            let mut s = s.as_ref().to_vec();
            s.sort_unstable();
            if s.is_empty() {
                return Err(Error::invalid("empty simplex"));
            }
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid(format!("repeated vertex in simplex {s:?}")));
            }
            if *s.last().unwrap() as usize >= n_vertices {
                return Err(Error::invalid(format!("simplex {s:?} uses a vertex >= {n_vertices}")));
            }
            insert_with_faces(&mut sets, s);
        }
        Ok(SimplicialComplex {
            n_vertices,
            by_dim: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    /// Builds from per-dimension lists already known to be sorted tuples
    /// closed under faces.
    pub(crate) fn from_closed_sets(n_vertices: usize, sets: Vec<BTreeSet<Vec<u32>>>) -> Self {
        let mut by_dim: Vec<Vec<Vec<u32>>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        while by_dim.len() > 1 && by_dim.last().is_some_and(|d| d.is_empty()) {
            by_dim.pop();
        }
        if by_dim.is_empty() {
            by_dim.push(Vec::new());
        }
        let c = SimplicialComplex { n_vertices, by_dim };
        debug_assert!(c.is_closed());
        c
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Top dimension; 0 for a complex with no edges.
    pub fn dim(&self) -> usize {
        self.by_dim.len().saturating_sub(1)
    }

    pub fn simplices(&self, p: usize) -> &[Vec<u32>] {
        self.by_dim.get(p).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count(&self, p: usize) -> usize {
        self.simplices(p).len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.by_dim.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(p, s)| if p % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) })
            .sum()
    }

    /// Degree of every vertex in the 1-skeleton.
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_vertices];
        for e in self.simplices(1) {
            deg[e[0] as usize] += 1;
            deg[e[1] as usize] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.vertex_degrees().into_iter().max().unwrap_or(0)
    }

    pub fn is_closed(&self) -> bool {
        for p in 1..self.by_dim.len() {
            let lower: BTreeSet<&[u32]> = self.by_dim[p - 1].iter().map(Vec::as_slice).collect();
            for s in &self.by_dim[p] {
                for i in 0..s.len() {
                    let face = remove_at(s, i);
                    if !lower.contains(face.as_slice()) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Boundary map from `p`-chains to `(p−1)`-chains: rows are the
    /// `(p−1)`-simplices, columns the `p`-simplices, in sorted order.
    pub fn boundary_matrix(&self, p: usize) -> Result<IntMatrix> {
        if p == 0 {
            return Err(Error::invalid("boundary degree must be at least 1"));
        }
        let rows = self.simplices(p - 1);
        let index: HashMap<&[u32], usize> = rows.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        let columns = self
            .simplices(p)
            .iter()
            .map(|s| {
                let mut col: Vec<(usize, i64)> = (0..s.len())
                    .map(|i| {
                        let face = remove_at(s, i);
                        let sign = if i % 2 == 0 { 1 } else { -1 };
                        (index[face.as_slice()], sign)
                    })
                    .collect();
                col.sort_unstable_by_key(|e| e.0);
                col
            })
            .collect();
        Ok(IntMatrix::from_sparse_columns(rows.len(), columns))
    }

    /// Disjoint union; vertices of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &SimplicialComplex) -> SimplicialComplex {
        let shift = self.n_vertices as u32;
        let top = self.by_dim.len().max(other.by_dim.len());
        let by_dim = (0..top)
            .map(|p| {
                let mut v: Vec<Vec<u32>> = self.simplices(p).to_vec();
                v.extend(other.simplices(p).iter().map(|s| s.iter().map(|x| x + shift).collect()));
                v.sort();
                v
            })
            .collect();
        SimplicialComplex {
            n_vertices: self.n_vertices + other.n_vertices,
            by_dim,
        }
    }

    pub fn to_file(&self) -> ComplexFile {
        let mut simplices = BTreeMap::new();
        for p in 1..self.by_dim.len() {
            simplices.insert(p.to_string(), self.by_dim[p].clone());
        }
        ComplexFile {
            vertices: self.n_vertices,
            simplices,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("complex serialization cannot fail")
    }

    /// Parses the complex file format; listed simplices are closed under faces.
    pub fn from_json(s: &str) -> Result<Self> {
        let file: ComplexFile = serde_json::from_str(s)?;
        file.into_complex()
    }
}

/// On-disk form: `{"vertices": n, "simplices": {"1": [[i, j], …], "2": …}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub vertices: usize,
    #[serde(default)]
    pub simplices: BTreeMap<String, Vec<Vec<u32>>>,
}

impl ComplexFile {
    pub fn into_complex(self) -> Result<SimplicialComplex> {
        let mut all = Vec::new();
        for (key, list) in self.simplices {
            let p: usize = key
                .parse()
                .map_err(|_| Error::invalid(format!("dimension key {key:?} is not an integer")))?;
            for s in list {
                if s.len() != p + 1 {
                    return Err(Error::invalid(format!("simplex {s:?} listed under dimension {p}")));
                }
                all.push(s);
            }
        }
        SimplicialComplex::from_simplices(self.vertices, all)
    }
}

fn remove_at(s: &[u32], i: usize) -> Vec<u32> {
    let mut f = Vec::with_capacity(s.len() - 1);
    f.extend_from_slice(&s[..i]);
    f.extend_from_slice(&s[i + 1..]);
    f
}

/// Inserts a sorted simplex and all its faces; stops descending at faces
/// already present, whose own faces are then present too.
pub(crate) fn insert_with_faces(sets: &mut Vec<BTreeSet<Vec<u32>>>, s: Vec<u32>) {
    let p = s.len() - 1;
    while sets.len() <= p {
        sets.push(BTreeSet::new());
    }
    if p == 0 || sets[p].contains(&s) {
        sets[p].insert(s);
        return;
    }
    for i in 0..s.len() {
        insert_with_faces(sets, remove_at(&s, i));
    }
    sets[p].insert(s);
}

/// Standard triangulations used as regression fixtures.
pub mod fixtures {
    use super::SimplicialComplex;

    /// Boundary of a triangle.
    pub fn circle() -> SimplicialComplex {
        SimplicialComplex::from_simplices(3, [[0, 1], [1, 2], [0, 2]]).unwrap()
    }

    /// Boundary of the 3-simplex.
    pub fn sphere() -> SimplicialComplex {
        SimplicialComplex::from_simplices(4, [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).unwrap()
    }

    /// Seven-vertex torus: triangles `{i, i+1, i+3}` and `{i, i+2, i+3}` mod 7.
    pub fn torus() -> SimplicialComplex {
        let tri = (0..7u32).flat_map(|i| [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 2) % 7, (i + 3) % 7]]);
        SimplicialComplex::from_simplices(7, tri).unwrap()
    }

    /// Six-vertex projective plane (the hemi-icosahedron).
    pub fn projective_plane() -> SimplicialComplex {
        SimplicialComplex::from_simplices(
            6,
            [
                [0, 1, 2],
                [0, 2, 3],
                [0, 3, 4],
                [0, 4, 5],
                [0, 5, 1],
                [1, 2, 4],
                [2, 3, 5],
                [3, 4, 1],
                [4, 5, 2],
                [5, 1, 3],
            ],
        )
        .unwrap()
    }

    /// Klein bottle from a `k × k` grid of squares: columns wrap plainly,
    /// rows wrap with the reflection `i ↦ −i`.
    pub fn klein_bottle(k: u32) -> SimplicialComplex {
        assert!(k >= 3);
        let vert = |i: u32, j: u32| -> u32 {
            let (i, j) = if j == k { ((k - i % k) % k, 0) } else { (i % k, j) };
            j * k + i
        };
        let mut tri = Vec::new();
        for i in 0..k {
            for j in 0..k {
                let (a, b, c, d) = (vert(i, j), vert(i + 1, j), vert(i, j + 1), vert(i + 1, j + 1));
                tri.push([a, b, d]);
                tri.push([a, c, d]);
            }
        }
        SimplicialComplex::from_simplices((k * k) as usize, tri).unwrap()
    }
}
