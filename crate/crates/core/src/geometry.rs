//! Volume of hyperbolic balls and the inequalities assembled from it.
//!
//! Volumes in dimension `n >= 3` leave the `f64` range once the radius
//! reaches a few hundred, so every quantity has a `log_` twin that stays
//! finite. The linear versions are exponentials of the log versions past the
//! overflow threshold and may return `+inf`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gabber::GabberTable;
use crate::quadrature::integrate;

pub const QUADRATURE_REL_TOL: f64 = 1e-12;
pub const INVERSE_REL_TOL: f64 = 1e-10;

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::invalid(format!("dimension must be at least 2, got {n}")));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::invalid(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

/// `ln Γ(n/2)` for a positive integer `n`.
fn ln_gamma_half(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        // Γ(k) = (k-1)!
        (1..n / 2).map(|j| (j as f64).ln()).sum()
    } else {
        // Γ(k + 1/2) = (k - 1/2)(k - 3/2)···(1/2)·√π
        let k = n / 2;
        0.5 * PI.ln() + (0..k).map(|j| (j as f64 + 0.5).ln()).sum::<f64>()
    }
}

/// `ln vol(S^{n-1}) = ln(2π^{n/2}/Γ(n/2))`.
pub fn log_sphere_volume(n: usize) -> f64 {
    2f64.ln() + 0.5 * n as f64 * PI.ln() - ln_gamma_half(n)
}

fn ln_sinh(t: f64) -> f64 {
    if t < 1.0 {
        t.sinh().ln()
    } else {
        t + (-(-2.0 * t).exp()).ln_1p() - 2f64.ln()
    }
}

/// Radius beyond which the volume is only computed in log space.
pub fn overflow_radius(n: usize) -> f64 {
    700.0 / (n as f64 - 1.0)
}

fn direct_integral(n: usize, r: f64) -> f64 {
    let k = (n - 1) as i32;
    integrate(|t| t.sinh().powi(k), 0.0, r, QUADRATURE_REL_TOL)
}

/// `ln ∫₀^R sinh^{n-1}`; for large `R` the integrand is rescaled by
/// `e^{-(n-1)R}` and only the window where it exceeds `e^{-60}` is integrated.
fn log_integral(n: usize, r: f64) -> f64 {
    if r <= overflow_radius(n) {
        return direct_integral(n, r).ln();
    }
    let k = (n - 1) as f64;
    let lo = (r - 60.0 / k).max(0.0);
    let scaled = integrate(|t| (k * (ln_sinh(t) - r)).exp(), lo, r, QUADRATURE_REL_TOL);
    k * r + scaled.ln()
}

/// Volume of a ball of radius `r` in hyperbolic `n`-space,
/// `vol(S^{n-1}) ∫₀^r sinh^{n-1}(t) dt`.
pub fn ball_volume(n: usize, r: f64) -> Result<f64> {
    check_dim(n)?;
    if !(r >= 0.0) {
        return Err(Error::invalid("radius must be nonnegative"));
    }
    if r <= overflow_radius(n) {
        Ok(log_sphere_volume(n).exp() * direct_integral(n, r))
    } else {
        Ok(log_ball_volume(n, r)?.exp())
    }
}

pub fn log_ball_volume(n: usize, r: f64) -> Result<f64> {
    check_dim(n)?;
    if !(r >= 0.0) {
        return Err(Error::invalid("radius must be nonnegative"));
    }
    if r == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if r == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    Ok(log_sphere_volume(n) + log_integral(n, r))
}

/// Euclidean volume of a ball of radius `r` in `R^n`.
pub fn euclidean_ball_volume(n: usize, r: f64) -> f64 {
    (log_sphere_volume(n) - (n as f64).ln()).exp() * r.powi(n as i32)
}

/// Radius of the hyperbolic ball of volume `v`: the smallest diameter a
/// closed hyperbolic `n`-manifold of volume `v` can have.
pub fn min_diameter_for_volume(n: usize, v: f64) -> Result<f64> {
    check_positive("volume", v)?;
    min_diameter_for_log_volume(n, v.ln())
}

pub fn min_diameter_for_log_volume(n: usize, log_v: f64) -> Result<f64> {
    check_dim(n)?;
    if log_v.is_nan() || log_v == f64::INFINITY {
        return Err(Error::invalid("log volume must be finite"));
    }
    if log_v == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while log_ball_volume(n, hi)? < log_v {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > INVERSE_REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if log_ball_volume(n, mid)? < log_v {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Lower bound `exp(-diam/C)` on the injectivity radius.
pub fn injectivity_floor(diam: f64, c: f64) -> Result<f64> {
    if !(diam >= 0.0) {
        return Err(Error::invalid("diameter must be nonnegative"));
    }
    check_positive("C", c)?;
    Ok((-diam / c).exp())
}

/// `C·e^{(n-1)·diam}`, bounding every Betti number.
pub fn betti_bound(n: usize, diam: f64, c: f64) -> Result<f64> {
    Ok(log_betti_bound(n, diam, c)?.exp())
}

pub fn log_betti_bound(n: usize, diam: f64, c: f64) -> Result<f64> {
    check_dim(n)?;
    check_positive("C", c)?;
    if !(diam >= 0.0) {
        return Err(Error::invalid("diameter must be nonnegative"));
    }
    Ok(c.ln() + (n as f64 - 1.0) * diam)
}

/// Maximal number of points pairwise `>= r/4` apart in a manifold of the
/// given volume whose injectivity radius is at least `r`.
pub fn net_size_bound(n: usize, vol: f64, r: f64) -> Result<f64> {
    check_positive("volume", vol)?;
    Ok(log_net_size_bound(n, vol.ln(), r)?.exp())
}

pub fn log_net_size_bound(n: usize, log_vol: f64, r: f64) -> Result<f64> {
    check_positive("r", r)?;
    Ok(log_vol - log_ball_volume(n, r / 4.0)?)
}

/// `vol B(9r/8) / vol B(r/8)`: the number of disjoint `r/8`-balls fitting
/// in a `9r/8`-ball, which bounds the degree of a net vertex in the nerve.
pub fn degree_bound(n: usize, r: f64) -> Result<f64> {
    check_positive("r", r)?;
    Ok((log_ball_volume(n, 9.0 * r / 8.0)? - log_ball_volume(n, r / 8.0)?).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometryParams {
    pub n: usize,
    pub diam: f64,
    pub vol: Option<f64>,
    pub inj: Option<f64>,
    /// Constant of the injectivity floor `exp(-diam/C)`.
    pub c_inj: f64,
    /// Constant of `C·log vol <= diam`.
    pub c_vol: f64,
    pub c_betti: f64,
}

impl GeometryParams {
    pub fn new(n: usize, diam: f64) -> Self {
        GeometryParams {
            n,
            diam,
            vol: None,
            inj: None,
            c_inj: 1.0,
            c_vol: 1.0,
            c_betti: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.n)?;
        check_positive("diam", self.diam)?;
        for (name, c) in [("c_inj", self.c_inj), ("c_vol", self.c_vol), ("c_betti", self.c_betti)] {
            check_positive(name, c)?;
        }
        if let Some(inj) = self.inj {
            check_positive("inj", inj)?;
        }
        if let Some(vol) = self.vol {
            check_positive("vol", vol)?;
            if vol.ln() > log_ball_volume(self.n, self.diam)? {
                return Err(Error::invalid(
                    "volume exceeds the volume of a hyperbolic ball of radius diam",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorsionBound {
    pub n: usize,
    pub diam: f64,
    /// Injectivity radius floor `r`.
    pub inj_floor: f64,
    pub log_volume: f64,
    /// `ln` of the net size bound `vol / vol B(r/4)`.
    pub log_net_size: f64,
    pub net_size: f64,
    /// Degree cap valid for every `r <= 1`.
    pub degree_cap: u64,
    pub gabber_constant: f64,
    /// Bound on `ln ln |H_i(M, Z)_tors|`.
    pub loglog_bound: f64,
    /// `loglog_bound / diam`.
    pub envelope: f64,
    /// Fewer than two net points: the nerve is a point and has no torsion.
    pub trivial_torsion: bool,
}

/// Assembles the torsion bound from the injectivity floor, the net size and
/// degree bounds, and a Gabber constant looked up for the degree cap.
///
/// `r = exp(-diam/C_inj) <= 1` always, and the degree bound is nondecreasing
/// in `r`, so the degree is capped uniformly by `degree_bound(n, 1)`.
pub fn torsion_bound(n: usize, diam: f64, params: &GeometryParams, table: &GabberTable) -> Result<TorsionBound> {
    check_dim(n)?;
    check_positive("diam", diam)?;
    check_positive("c_inj", params.c_inj)?;
    let r = injectivity_floor(diam, params.c_inj)?;
    let log_volume = log_ball_volume(n, diam)?;
    let log_net_size = log_net_size_bound(n, log_volume, r)?;
    let degree_cap = degree_bound(n, r.max(1.0))?.ceil() as u64;
    let gabber_constant = table
        .constant_for(degree_cap)
        .ok_or(Error::ConstantTableMissing { degree: degree_cap })?;
    let loglog_bound = gabber_constant.ln() + log_net_size.max(0.0);
    Ok(TorsionBound {
        n,
        diam,
        inj_floor: r,
        log_volume,
        log_net_size,
        net_size: log_net_size.exp(),
        degree_cap,
        gabber_constant,
        loglog_bound,
        envelope: loglog_bound / diam,
        trivial_torsion: log_net_size < 2f64.ln(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessParams {
    /// Diameter is at most `A·log vol` along the sequence.
    pub a: f64,
    /// Volume is at most `B·log |tors|` along the sequence.
    pub b: f64,
    /// Uniform spectral gap of the sequence; only its existence matters.
    pub lambda1_floor: f64,
}

impl SharpnessParams {
    /// `B = 6π(1 + eps)`, just above the conjectured limit ratio `1/(6π)`.
    pub fn with_conjectural_b(a: f64, eps: f64) -> Self {
        SharpnessParams {
            a,
            b: 6.0 * PI * (1.0 + eps),
            lambda1_floor: 1.0,
        }
    }
}

impl Default for SharpnessParams {
    fn default() -> Self {
        SharpnessParams::with_conjectural_b(1.0, 0.01)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    /// `C = 1/A` in `ln ln |tors| >= C·diam − ln B`.
    pub slope: f64,
    /// `ln B`.
    pub offset: f64,
    pub loglog_tors_target: f64,
    /// Largest diameter compatible with `ln ln |tors| = target`: `A·(target + ln B)`.
    pub max_diameter_at_target: f64,
    /// Guaranteed `ln ln |tors| / diam` at that diameter.
    pub ratio_at_target: f64,
}

/// Chains `diam <= A·ln vol` with `vol <= B·ln |tors|` into
/// `ln ln |tors| >= diam/A − ln B`.
pub fn sharpness_chain(loglog_tors_target: f64, s: &SharpnessParams) -> Result<SharpnessReport> {
    check_positive("A", s.a)?;
    check_positive("B", s.b)?;
    check_positive("lambda1_floor", s.lambda1_floor)?;
    if !loglog_tors_target.is_finite() {
        return Err(Error::invalid("target must be finite"));
    }
    let slope = 1.0 / s.a;
    let offset = s.b.ln();
    let max_diameter_at_target = s.a * (loglog_tors_target + offset);
    Ok(SharpnessReport {
        slope,
        offset,
        loglog_tors_target,
        max_diameter_at_target,
        ratio_at_target: loglog_tors_target / max_diameter_at_target,
    })
}
