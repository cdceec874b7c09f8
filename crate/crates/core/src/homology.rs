//! Integral simplicial homology.
//!
//! `H_p ≅ Z^{b_p} ⊕ ⨁ Z/d_i` with `b_p = #p-simplices − rank ∂_p − rank ∂_{p+1}`
//! and `d_i` the invariant factors of `∂_{p+1}` greater than one.

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::error::Result;
use crate::snf::{smith_normal_form, SmithForm};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeHomology {
    pub betti: usize,
    #[serde(with = "decimal_list")]
    pub torsion: Vec<BigUint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HomologyProfile {
    degrees: Vec<DegreeHomology>,
}

impl HomologyProfile {
    pub fn degrees(&self) -> &[DegreeHomology] {
        &self.degrees
    }

    pub fn betti(&self, p: usize) -> usize {
        self.degrees.get(p).map_or(0, |d| d.betti)
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.betti).collect()
    }

    pub fn torsion(&self, p: usize) -> &[BigUint] {
        self.degrees.get(p).map_or(&[], |d| d.torsion.as_slice())
    }

    /// `|H_p(X, Z)_tors|`.
    pub fn torsion_order(&self, p: usize) -> BigUint {
        self.torsion(p).iter().product()
    }

    /// `ln |H_p(X, Z)_tors|`; zero when there is no torsion.
    pub fn log_torsion(&self, p: usize) -> f64 {
        self.torsion(p).iter().map(ln_big).fold(0.0, |acc, x| acc + x)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees
            .iter()
            .enumerate()
            .map(|(p, d)| if p % 2 == 0 { d.betti as i64 } else { -(d.betti as i64) })
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("homology serialization cannot fail")
    }

    /// Degreewise direct sum.
    pub fn direct_sum(&self, other: &HomologyProfile) -> HomologyProfile {
        let top = self.degrees.len().max(other.degrees.len());
        let degrees = (0..top)
            .map(|p| {
                let mut torsion: Vec<BigUint> = self.torsion(p).to_vec();
                torsion.extend_from_slice(other.torsion(p));
                DegreeHomology {
                    betti: self.betti(p) + other.betti(p),
                    torsion: normalize_torsion(torsion),
                }
            })
            .collect();
        HomologyProfile { degrees }
    }
}

/// Invariant-factor form of a finite abelian group given by cyclic orders.
pub fn normalize_torsion(orders: Vec<BigUint>) -> Vec<BigUint> {
    use num_integer::Integer;
    let mut d: Vec<BigUint> = orders.into_iter().filter(|x| !x.is_one()).collect();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = &d[i] / &g * &d[j];
            d[i] = g;
            d[j] = l;
        }
    }
    d.retain(|x| !x.is_one());
    d
}

pub(crate) fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        use num_traits::ToPrimitive;
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 900;
    use num_traits::ToPrimitive;
    (x >> shift).to_f64().expect("fits in f64").ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn homology(c: &SimplicialComplex) -> Result<HomologyProfile> {
    let top = c.dim();
    // snf[p] is the Smith form of ∂_p for 1 <= p <= top
    let forms: Vec<SmithForm> = (1..=top)
        .into_par_iter()
        .map(|p| c.boundary_matrix(p).map(|m| smith_normal_form(&m)))
        .collect::<Result<_>>()?;
    let rank = |p: usize| if p == 0 || p > top { 0 } else { forms[p - 1].rank };
    let degrees = (0..=top)
        .map(|p| DegreeHomology {
            betti: c.count(p) - rank(p) - rank(p + 1),
            torsion: if p < top { forms[p].torsion() } else { Vec::new() },
        })
        .collect();
    Ok(HomologyProfile { degrees })
}

mod decimal_list {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_str_radix(10)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        v.iter().map(|s| s.parse().map_err(serde::de::Error::custom)).collect()
    }
}
