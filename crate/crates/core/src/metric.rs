//! Finite metric spaces standing in for closed manifolds.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::stream_rng;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelTag {
    /// `resolution^dims` grid points on the unit flat torus `R^dims / Z^dims`.
    FlatTorus { dims: usize, resolution: usize },
    /// Evenly spaced points on the unit circle, arc-length metric.
    Circle { resolution: usize },
    /// Fibonacci points on the unit sphere, great-circle metric.
    RoundSphere { resolution: usize },
    /// Fibonacci points on the open upper hemisphere with the quotient
    /// metric `min(d(x, y), d(x, −y))`.
    ProjectivePlane { resolution: usize },
    ExplicitMatrix,
}

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    Coords { dim: usize, data: Vec<f64> },
    Matrix(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    tag: ModelTag,
    n_points: usize,
    storage: Storage,
}

const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653_3;

fn fibonacci_point(i: usize, n: usize, hemisphere: bool) -> [f64; 3] {
    let z = if hemisphere {
        1.0 - (i as f64 + 0.5) / n as f64
    } else {
        1.0 - 2.0 * (i as f64 + 0.5) / n as f64
    };
    let rho = (1.0 - z * z).max(0.0).sqrt();
    let phi = GOLDEN_ANGLE * i as f64;
    [rho * phi.cos(), rho * phi.sin(), z]
}

fn angle(x: &[f64], y: &[f64]) -> f64 {
    let dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
    let cx = x[1] * y[2] - x[2] * y[1];
    let cy = x[2] * y[0] - x[0] * y[2];
    let cz = x[0] * y[1] - x[1] * y[0];
    (cx * cx + cy * cy + cz * cz).sqrt().atan2(dot)
}

impl FiniteMetricSpace {
    pub fn flat_torus(dims: usize, resolution: usize) -> Result<Self> {
        if dims == 0 || resolution == 0 {
            return Err(Error::invalid("flat torus needs dims >= 1 and resolution >= 1"));
        }
        let n = resolution
            .checked_pow(dims as u32)
            .filter(|&n| n <= 1 << 24)
            .ok_or_else(|| Error::invalid("flat torus grid too large"))?;
        let mut data = Vec::with_capacity(n * dims);
        for k in 0..n {
            let mut rem = k;
            for _ in 0..dims {
                data.push((rem % resolution) as f64 / resolution as f64);
                rem /= resolution;
            }
        }
        Ok(FiniteMetricSpace {
            tag: ModelTag::FlatTorus { dims, resolution },
            n_points: n,
            storage: Storage::Coords { dim: dims, data },
        })
    }

    pub fn circle(resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::invalid("circle needs at least one point"));
        }
        let data = (0..resolution).map(|k| k as f64).collect();
        Ok(FiniteMetricSpace {
            tag: ModelTag::Circle { resolution },
            n_points: resolution,
            storage: Storage::Coords { dim: 1, data },
        })
    }

    pub fn round_sphere(resolution: usize) -> Result<Self> {
        Self::spherical(resolution, false)
    }

    pub fn projective_plane(resolution: usize) -> Result<Self> {
        Self::spherical(resolution, true)
    }

    fn spherical(resolution: usize, hemisphere: bool) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::invalid("sphere model needs at least one point"));
        }
        let data = (0..resolution).flat_map(|i| fibonacci_point(i, resolution, hemisphere)).collect();
        let tag = if hemisphere {
            ModelTag::ProjectivePlane { resolution }
        } else {
            ModelTag::RoundSphere { resolution }
        };
        Ok(FiniteMetricSpace {
            tag,
            n_points: resolution,
            storage: Storage::Coords { dim: 3, data },
        })
    }

    /// A space given by its full distance matrix; must be symmetric,
    /// nonnegative, with zero diagonal.
    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::invalid("empty distance matrix"));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid("distance matrix is not square"));
            }
            for (j, &d) in row.iter().enumerate() {
                if !(d >= 0.0 && d.is_finite()) {
                    return Err(Error::invalid(format!("bad distance at ({i}, {j})")));
                }
                if (i == j && d != 0.0) || rows[j][i] != d {
                    return Err(Error::invalid(format!("distance matrix not symmetric with zero diagonal at ({i}, {j})")));
                }
            }
            data.extend_from_slice(row);
        }
        Ok(FiniteMetricSpace {
            tag: ModelTag::ExplicitMatrix,
            n_points: n,
            storage: Storage::Matrix(data),
        })
    }

    /// Euclidean distances between the given points.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let rows = points
            .iter()
            .map(|x| {
                points
                    .iter()
                    .map(|y| x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
                    .collect()
            })
            .collect();
        Self::from_matrix(rows)
    }

    pub fn tag(&self) -> &ModelTag {
        &self.tag
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        match (&self.tag, &self.storage) {
            (_, Storage::Matrix(m)) => m[i * self.n_points + j],
            (ModelTag::Circle { resolution }, Storage::Coords { data, .. }) => {
                let k = (data[i] - data[j]).abs();
                let k = k.min(*resolution as f64 - k);
                2.0 * PI * k / *resolution as f64
            }
            (ModelTag::FlatTorus { .. }, Storage::Coords { dim, data }) => {
                let (x, y) = (&data[i * dim..(i + 1) * dim], &data[j * dim..(j + 1) * dim]);
                x.iter()
                    .zip(y)
                    .map(|(a, b)| {
                        let t = (a - b).abs();
                        let t = t.min(1.0 - t);
                        t * t
                    })
                    .sum::<f64>()
                    .sqrt()
            }
            (ModelTag::RoundSphere { .. }, Storage::Coords { data, .. }) => {
                angle(&data[3 * i..3 * i + 3], &data[3 * j..3 * j + 3])
            }
            (ModelTag::ProjectivePlane { .. }, Storage::Coords { data, .. }) => {
                let t = angle(&data[3 * i..3 * i + 3], &data[3 * j..3 * j + 3]);
                t.min(PI - t)
            }
            (ModelTag::ExplicitMatrix, Storage::Coords { .. }) => unreachable!("explicit spaces store a matrix"),
        }
    }

    /// Intrinsic dimension of the modelled manifold, when there is one.
    pub fn manifold_dim(&self) -> Option<usize> {
        match self.tag {
            ModelTag::FlatTorus { dims, .. } => Some(dims),
            ModelTag::Circle { .. } => Some(1),
            ModelTag::RoundSphere { .. } | ModelTag::ProjectivePlane { .. } => Some(2),
            ModelTag::ExplicitMatrix => None,
        }
    }

    /// Volume of the modelled manifold, when there is one.
    pub fn manifold_volume(&self) -> Option<f64> {
        match self.tag {
            ModelTag::FlatTorus { .. } => Some(1.0),
            ModelTag::Circle { .. } | ModelTag::ProjectivePlane { .. } => Some(2.0 * PI),
            ModelTag::RoundSphere { .. } => Some(4.0 * PI),
            ModelTag::ExplicitMatrix => None,
        }
    }

    /// Euler characteristic of the modelled manifold, when there is one.
    pub fn manifold_euler(&self) -> Option<i64> {
        match self.tag {
            ModelTag::FlatTorus { .. } | ModelTag::Circle { .. } => Some(0),
            ModelTag::RoundSphere { .. } => Some(2),
            ModelTag::ProjectivePlane { .. } => Some(1),
            ModelTag::ExplicitMatrix => None,
        }
    }

    /// Checks the triangle inequality on `samples` random triples, with
    /// `slack` absolute tolerance. Returns the first violating triple.
    pub fn spot_check_triangle(&self, samples: usize, seed: u64, slack: f64) -> Option<(usize, usize, usize)> {
        let mut rng = stream_rng(seed, 0);
        let n = self.n_points;
        (0..samples)
            .map(|_| (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n)))
            .find(|&(i, j, k)| self.distance(i, k) > self.distance(i, j) + self.distance(j, k) + slack)
    }
}
