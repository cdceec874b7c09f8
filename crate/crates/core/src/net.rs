//! Maximal separated nets.

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

#[derive(Clone, Debug)]
pub struct Net<'a> {
    space: &'a FiniteMetricSpace,
    separation: f64,
    centers: Vec<usize>,
}

/// Greedy pass in index order: a point becomes a center iff it is at least
/// `s` from every center accepted so far. The result is `s`-separated and
/// every point lies within `s` of a center.
pub fn build_net(space: &FiniteMetricSpace, s: f64) -> Result<Net<'_>> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::invalid(format!("net separation must be positive, got {s}")));
    }
    let mut centers: Vec<usize> = Vec::new();
    for x in 0..space.n_points() {
        if centers.iter().all(|&c| space.distance(x, c) >= s) {
            centers.push(x);
        }
    }
    Ok(Net {
        space,
        separation: s,
        centers,
    })
}

impl<'a> Net<'a> {
    /// Wraps explicitly chosen centers; no separation or maximality is
    /// assumed, see [`Net::is_separated`] and [`Net::is_maximal`].
    pub fn from_centers(space: &'a FiniteMetricSpace, separation: f64, centers: Vec<usize>) -> Result<Self> {
        if let Some(&c) = centers.iter().find(|&&c| c >= space.n_points()) {
            return Err(Error::invalid(format!("center {c} is not a point of the space")));
        }
        Ok(Net {
            space,
            separation,
            centers,
        })
    }

    pub fn space(&self) -> &'a FiniteMetricSpace {
        self.space
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn center_distance(&self, i: usize, j: usize) -> f64 {
        self.space.distance(self.centers[i], self.centers[j])
    }

    pub fn is_separated(&self) -> bool {
        let m = self.centers.len();
        (0..m).all(|i| (i + 1..m).all(|j| self.center_distance(i, j) >= self.separation))
    }

    /// Every point of the space is within the separation of some center.
    pub fn is_maximal(&self) -> bool {
        self.covers(self.separation)
    }

    /// Every point of the space is within `radius` of some center.
    pub fn covers(&self, radius: f64) -> bool {
        self.uncovered(radius).is_none()
    }

    /// First point farther than `radius` from every center.
    pub fn uncovered(&self, radius: f64) -> Option<usize> {
        (0..self.space.n_points()).find(|&x| self.centers.iter().all(|&c| self.space.distance(x, c) > radius))
    }
}
