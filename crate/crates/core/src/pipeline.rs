//! Net, nerve and homology of a finite metric space, checked against the
//! net size, degree and torsion bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gabber::{hadamard_constant, GabberTable};
use crate::geometry::{degree_bound, net_size_bound};
use crate::homology::{homology, HomologyProfile};
use crate::metric::FiniteMetricSpace;
use crate::nerve::cech_nerve;
use crate::net::build_net;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NerveConfig {
    pub separation: f64,
    pub radius: f64,
    pub max_dim: usize,
    /// Constants for the torsion check; the Hadamard bound at the nerve's
    /// maximum degree is used when absent or when no entry covers it.
    pub gabber: Option<GabberTable>,
}

impl NerveConfig {
    pub fn new(separation: f64, radius: f64) -> Self {
        NerveConfig {
            separation,
            radius,
            max_dim: 2,
            gabber: None,
        }
    }

    /// Separation `r/4` and radius `r/2` for an injectivity radius `r`.
    pub fn from_injectivity(r: f64) -> Self {
        Self::new(r / 4.0, r / 2.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub observed: f64,
    pub bound: f64,
    pub holds: bool,
}

impl BoundCheck {
    fn new(observed: f64, bound: f64) -> Self {
        BoundCheck {
            observed,
            bound,
            holds: observed <= bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub n_points: usize,
    pub separation: f64,
    pub radius: f64,
    pub max_dim: usize,
    pub centers: Vec<usize>,
    pub cover_verified: bool,
    /// The radius is below half the separation.
    pub cover_warning: bool,
    pub dimension_capped: bool,
    pub simplex_counts: Vec<usize>,
    pub max_degree: usize,
    pub homology: HomologyProfile,
    /// Homology is exact in degrees below this.
    pub trusted_degrees: usize,
    /// Euler characteristic of the nerve, when no simplex was dropped.
    pub euler_characteristic: Option<i64>,
    pub model_euler_characteristic: Option<i64>,
    /// `|centers|` against `net_size_bound(n, vol, 4·separation)`.
    pub net_size: Option<BoundCheck>,
    /// Maximum nerve degree against `degree_bound(n, 4·separation)`.
    pub degree: Option<BoundCheck>,
    pub gabber_constant: f64,
    /// `ln |H_p tors|` against `C·|centers|` for each trusted `p >= 1`.
    pub torsion: Vec<BoundCheck>,
}

pub fn nerve_pipeline(space: &FiniteMetricSpace, cfg: &NerveConfig) -> Result<PipelineReport> {
    let net = build_net(space, cfg.separation)?;
    let nerve = cech_nerve(&net, cfg.radius, cfg.max_dim)?;
    let c = &nerve.complex;
    let h = homology(c)?;
    if h.euler_characteristic() != c.euler_characteristic() {
        return Err(Error::Invariant("Euler characteristic from Betti numbers disagrees with simplex counts".into()));
    }
    let max_degree = c.max_degree();
    let n_centers = net.len();

    let scale = 4.0 * cfg.separation;
    let dim = space.manifold_dim();
    let net_size = match (dim, space.manifold_volume()) {
        (Some(n), Some(vol)) if n >= 2 => Some(BoundCheck::new(n_centers as f64, net_size_bound(n, vol, scale)?)),
        _ => None,
    };
    let degree = match dim {
        Some(n) if n >= 2 => Some(BoundCheck::new(max_degree as f64, degree_bound(n, scale)?)),
        _ => None,
    };
    let gabber_constant = cfg
        .gabber
        .as_ref()
        .and_then(|t| t.constant_for(max_degree as u64))
        .unwrap_or_else(|| {
            (1..cfg.max_dim)
                .map(|p| hadamard_constant(max_degree as u64, p))
                .fold(0.0, f64::max)
        });
    let torsion = (1..nerve.trusted_degrees().end)
        .map(|p| BoundCheck::new(h.log_torsion(p), gabber_constant * n_centers as f64))
        .collect();

    Ok(PipelineReport {
        n_points: space.n_points(),
        separation: cfg.separation,
        radius: cfg.radius,
        max_dim: cfg.max_dim,
        centers: net.centers().to_vec(),
        cover_verified: net.covers(cfg.radius),
        cover_warning: cfg.radius < cfg.separation / 2.0,
        dimension_capped: nerve.dimension_capped,
        simplex_counts: c.counts(),
        max_degree,
        trusted_degrees: nerve.trusted_degrees().end,
        euler_characteristic: (!nerve.dimension_capped).then(|| c.euler_characteristic()),
        model_euler_characteristic: space.manifold_euler(),
        homology: h,
        net_size,
        degree,
        gabber_constant,
        torsion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_torus_nerve() {
        let space = FiniteMetricSpace::flat_torus(2, 30).unwrap();
        let r = nerve_pipeline(&space, &NerveConfig::new(0.15, 0.16)).unwrap();
        assert!(r.cover_verified);
        assert_eq!(r.homology.betti(0), 1);
        assert_eq!(r.homology.betti(1), 2);
        assert!(r.homology.torsion(1).is_empty());
        assert!(r.torsion.iter().all(|t| t.holds));
    }

    #[test]
    fn circle_nerve_euler() {
        let space = FiniteMetricSpace::circle(120).unwrap();
        let mut cfg = NerveConfig::new(0.3, 0.32);
        cfg.max_dim = 3;
        let r = nerve_pipeline(&space, &cfg).unwrap();
        assert!(r.cover_verified && !r.dimension_capped);
        assert_eq!(r.euler_characteristic, r.model_euler_characteristic);
    }

    #[test]
    fn warns_on_small_radius() {
        let space = FiniteMetricSpace::circle(60).unwrap();
        let r = nerve_pipeline(&space, &NerveConfig::new(0.4, 0.1)).unwrap();
        assert!(r.cover_warning);
        assert!(!r.cover_verified);
    }

    #[test]
    fn injectivity_preset() {
        let cfg = NerveConfig::from_injectivity(1.0);
        assert_eq!((cfg.separation, cfg.radius), (0.25, 0.5));
    }
}
