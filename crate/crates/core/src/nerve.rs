//! Nerves of ball covers centered at net points.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::net::Net;

/// A nerve truncated at `max_dim`. When `dimension_capped` is set some
/// `(max_dim + 1)`-simplex was dropped and homology in degrees
/// `>= max_dim` is not trustworthy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nerve {
    pub complex: SimplicialComplex,
    pub max_dim: usize,
    pub dimension_capped: bool,
}

impl Nerve {
    /// Degrees whose homology is unaffected by truncation.
    pub fn trusted_degrees(&self) -> std::ops::Range<usize> {
        0..self.max_dim
    }
}

fn check(radius: f64, max_dim: usize) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid(format!("nerve radius must be positive, got {radius}")));
    }
    if max_dim == 0 {
        return Err(Error::invalid("nerve max_dim must be at least 1"));
    }
    Ok(())
}

/// Centers (as net indices) within `radius` of ambient point `x`.
fn witness_set(net: &Net<'_>, x: usize, radius: f64) -> Vec<u32> {
    let space = net.space();
    net.centers()
        .iter()
        .enumerate()
        .filter(|&(_, &c)| space.distance(x, c) <= radius)
        .map(|(i, _)| i as u32)
        .collect()
}

fn add_subsets(sets: &mut [BTreeSet<Vec<u32>>], w: &[u32], max_size: usize) {
    fn rec(sets: &mut [BTreeSet<Vec<u32>>], w: &[u32], start: usize, cur: &mut Vec<u32>, max_size: usize) {
        if !cur.is_empty() {
            sets[cur.len() - 1].insert(cur.clone());
        }
        if cur.len() == max_size {
            return;
        }
        for i in start..w.len() {
            cur.push(w[i]);
            rec(sets, w, i + 1, cur, max_size);
            cur.pop();
        }
    }
    rec(sets, w, 0, &mut Vec::new(), max_size);
}

/// Witness Čech nerve: centers `c₀ … c_k` span a simplex iff some point
/// of the ambient space is within `radius` of all of them.
pub fn cech_nerve(net: &Net<'_>, radius: f64, max_dim: usize) -> Result<Nerve> {
    check(radius, max_dim)?;
    let witnesses: BTreeSet<Vec<u32>> = (0..net.space().n_points())
        .into_par_iter()
        .map(|x| witness_set(net, x, radius))
        .collect::<Vec<_>>()
        .into_iter()
        .filter(|w| w.len() > 1)
        .collect();
    let max_size = max_dim + 1;
    let dimension_capped = witnesses.iter().any(|w| w.len() > max_size);
    let mut sets: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); max_size];
    sets[0] = (0..net.len() as u32).map(|v| vec![v]).collect();
    for w in &witnesses {
        add_subsets(&mut sets, w, max_size);
    }
    Ok(Nerve {
        complex: SimplicialComplex::from_closed_sets(net.len(), sets),
        max_dim,
        dimension_capped,
    })
}

/// Vietoris–Rips nerve: a simplex iff all pairwise center distances are at
/// most `2·radius`.
pub fn rips_nerve(net: &Net<'_>, radius: f64, max_dim: usize) -> Result<Nerve> {
    check(radius, max_dim)?;
    let m = net.len();
    let adj: Vec<Vec<bool>> = (0..m)
        .into_par_iter()
        .map(|i| (0..m).map(|j| i != j && net.center_distance(i, j) <= 2.0 * radius).collect())
        .collect();
    let max_size = max_dim + 1;
    let mut sets: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); max_size];
    let mut dimension_capped = false;
    // grow cliques by appending larger vertices adjacent to every member
    let mut layer: Vec<Vec<u32>> = (0..m as u32).map(|v| vec![v]).collect();
    for size in 1..=max_size {
        sets[size - 1].extend(layer.iter().cloned());
        let next: Vec<Vec<u32>> = layer
            .iter()
            .flat_map(|s| {
                let last = *s.last().unwrap() as usize;
                let adj = &adj;
                (last + 1..m)
                    .filter(move |&v| s.iter().all(|&u| adj[u as usize][v]))
                    .map(move |v| {
                        let mut t = s.clone();
                        t.push(v as u32);
                        t
                    })
            })
            .collect();
        if size == max_size {
            dimension_capped = !next.is_empty();
        }
        layer = next;
    }
    Ok(Nerve {
        complex: SimplicialComplex::from_closed_sets(m, sets),
        max_dim,
        dimension_capped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::homology;
    use crate::metric::FiniteMetricSpace;
    use crate::net::build_net;

    #[test]
    fn common_witness_gives_triangle() {
        // three centers around a witness at the origin
        let pts = vec![vec![1.0, 0.0], vec![-0.5, 0.8], vec![-0.5, -0.8], vec![0.0, 0.0]];
        let space = FiniteMetricSpace::from_points(&pts).unwrap();
        let net = Net::from_centers(&space, 1.0, vec![0, 1, 2]).unwrap();
        let n = cech_nerve(&net, 1.0, 2).unwrap();
        assert_eq!(n.complex.counts(), vec![3, 3, 1]);
        assert!(!n.dimension_capped);
        let capped = cech_nerve(&net, 1.0, 1).unwrap();
        assert!(capped.dimension_capped);
        assert_eq!(capped.complex.counts(), vec![3, 3]);
    }

    #[test]
    fn circle_nerve_is_a_circle() {
        let space = FiniteMetricSpace::circle(60).unwrap();
        let net = build_net(&space, 0.2).unwrap();
        let n = cech_nerve(&net, 0.15, 2).unwrap();
        let h = homology(&n.complex).unwrap();
        assert_eq!(h.betti(0), 1);
        assert_eq!(h.betti(1), 1);
    }

    #[test]
    fn small_radius_is_discrete() {
        let space = FiniteMetricSpace::circle(60).unwrap();
        let net = build_net(&space, 0.2).unwrap();
        let min_sep = (0..net.len())
            .flat_map(|i| (i + 1..net.len()).map(move |j| (i, j)))
            .map(|(i, j)| net.center_distance(i, j))
            .fold(f64::INFINITY, f64::min);
        let n = cech_nerve(&net, 0.49 * min_sep, 2).unwrap();
        assert_eq!(n.complex.counts(), vec![net.len()]);
    }

    #[test]
    fn rips_includes_boundary_distance() {
        let space = FiniteMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let net = Net::from_centers(&space, 1.0, vec![0, 1]).unwrap();
        assert_eq!(rips_nerve(&net, 0.5, 2).unwrap().complex.counts(), vec![2, 1]);
    }

    #[test]
    fn rips_triangle_without_cech_witness() {
        // three points at 120° on a 12-point unit circle; pairwise arc 2π/3
        let space = FiniteMetricSpace::circle(12).unwrap();
        let net = Net::from_centers(&space, 1.0, vec![0, 4, 8]).unwrap();
        let r = std::f64::consts::PI / 3.0 + 1e-9;
        let rips = rips_nerve(&net, r, 2).unwrap();
        let cech = cech_nerve(&net, r, 2).unwrap();
        assert_eq!(rips.complex.count(2), 1);
        assert_eq!(cech.complex.count(2), 0);
        assert_eq!(cech.complex.count(1), 3);
    }

    #[test]
    fn cech_inside_rips() {
        let space = FiniteMetricSpace::round_sphere(500).unwrap();
        let net = build_net(&space, 0.5).unwrap();
        for r in [0.3, 0.5, 0.8] {
            let c = cech_nerve(&net, r, 3).unwrap();
            let v = rips_nerve(&net, r, 3).unwrap();
            for p in 0..=c.complex.dim() {
                for s in c.complex.simplices(p) {
                    assert!(v.complex.simplices(p).binary_search(s).is_ok());
                }
            }
        }
    }
}
