//! Combinatorial model of manifolds glued from six fixed building blocks
//! along a Schreier graph, and the counting argument built on it.
//!
//! A manifold `M(H, τ)` is represented by its Schreier graph and the vertex
//! labeling `τ`; the blocks enter only through their diameters. Any two
//! points of `M(H, τ)` are joined by a path crossing at most
//! `2·diam(Γ_H) + 2` blocks, so `diam M(H, τ) <= 2D·diam(Γ_H) + 2D` where
//! `D` is the largest block diameter.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schreier::{
    diameter_lower_bound, diameter_statistics, enumerate_subgroups, graph_diameter,
    SchreierGraph, ENUMERATION_CEILING,
};
use crate::seed::mix;
use crate::subgroups::count_subgroups;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBlocks", into = "RawBlocks")]
pub struct BlockTable {
    diam: [f64; 6],
}

#[derive(Serialize, Deserialize)]
struct RawBlocks {
    #[serde(rename = "diam_V0")]
    v0: f64,
    #[serde(rename = "diam_V1")]
    v1: f64,
    #[serde(rename = "diam_Aplus")]
    a_plus: f64,
    #[serde(rename = "diam_Aminus")]
    a_minus: f64,
    #[serde(rename = "diam_Bplus")]
    b_plus: f64,
    #[serde(rename = "diam_Bminus")]
    b_minus: f64,
}

impl TryFrom<RawBlocks> for BlockTable {
    type Error = Error;

    fn try_from(r: RawBlocks) -> Result<Self> {
        BlockTable::new([r.v0, r.v1, r.a_plus, r.a_minus, r.b_plus, r.b_minus])
    }
}

impl From<BlockTable> for RawBlocks {
    fn from(t: BlockTable) -> Self {
        let [v0, v1, a_plus, a_minus, b_plus, b_minus] = t.diam;
        RawBlocks {
            v0,
            v1,
            a_plus,
            a_minus,
            b_plus,
            b_minus,
        }
    }
}

impl Default for BlockTable {
    fn default() -> Self {
        BlockTable { diam: [1.0; 6] }
    }
}

impl BlockTable {
    /// Diameters in the order `V₀, V₁, A₊, A₋, B₊, B₋`.
    pub fn new(diam: [f64; 6]) -> Result<Self> {
        if diam.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::invalid("block diameters must be positive and finite"));
        }
        Ok(BlockTable { diam })
    }

    /// All six blocks with the same diameter.
    pub fn uniform(d: f64) -> Result<Self> {
        BlockTable::new([d; 6])
    }

    pub fn diameters(&self) -> [f64; 6] {
        self.diam
    }

    /// `D`, the largest block diameter.
    pub fn max_diameter(&self) -> f64 {
        self.diam.iter().copied().fold(f64::MIN, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GLDescriptor {
    graph: SchreierGraph,
    tau: Vec<u8>,
}

impl GLDescriptor {
    /// Requires `τ` to take values in `{0, 1}` with exactly one vertex mapped to 1.
    pub fn new(graph: SchreierGraph, tau: Vec<u8>) -> Result<Self> {
        if tau.len() != graph.n_vertices() {
            return Err(Error::invalid("tau must label every vertex"));
        }
        if tau.iter().any(|&t| t > 1) {
            return Err(Error::invalid("tau takes values in {0, 1}"));
        }
        if tau.iter().filter(|&&t| t == 1).count() != 1 {
            return Err(Error::invalid("tau must mark exactly one vertex with 1"));
        }
        Ok(GLDescriptor { graph, tau })
    }

    /// `τ` marking only `vertex`.
    pub fn marked_at(graph: SchreierGraph, vertex: usize) -> Result<Self> {
        let mut tau = vec![0; graph.n_vertices()];
        *tau.get_mut(vertex)
            .ok_or_else(|| Error::invalid("marked vertex out of range"))? = 1;
        GLDescriptor::new(graph, tau)
    }

    pub fn graph(&self) -> &SchreierGraph {
        &self.graph
    }

    pub fn tau(&self) -> &[u8] {
        &self.tau
    }
}

pub fn manifold_diameter_upper(d: &GLDescriptor, blocks: &BlockTable) -> f64 {
    diameter_upper_for_graph_diameter(graph_diameter(d.graph()), blocks)
}

pub fn diameter_upper_for_graph_diameter(graph_diam: u32, blocks: &BlockTable) -> f64 {
    let big_d = blocks.max_diameter();
    2.0 * big_d * graph_diam as f64 + 2.0 * big_d
}

/// Largest graph diameter `g` with `2D·g + 2D <= d_max`, if any.
pub fn max_admissible_graph_diameter(d_max: f64, blocks: &BlockTable) -> Option<u32> {
    let big_d = blocks.max_diameter();
    if 2.0 * big_d > d_max {
        return None;
    }
    let guess = (d_max / (2.0 * big_d) - 1.0).floor().max(0.0).min(u32::MAX as f64 - 2.0) as u32;
    let fits = |g: u32| diameter_upper_for_graph_diameter(g, blocks) <= d_max;
    let mut g = guess;
    while g > 0 && !fits(g) {
        g -= 1;
    }
    while fits(g + 1) {
        g += 1;
    }
    Some(g)
}

/// Number of index-`N` subgroups per Schreier-graph diameter, by enumeration.
#[derive(Clone, Debug, Default)]
pub struct DiameterCensus {
    by_index: BTreeMap<usize, BTreeMap<u32, u64>>,
}

impl DiameterCensus {
    pub fn build(max_index: usize) -> Result<Self> {
        let mut census = DiameterCensus::default();
        for n in 1..=max_index {
            census.ensure(n)?;
        }
        Ok(census)
    }

    pub fn ensure(&mut self, n: usize) -> Result<&BTreeMap<u32, u64>> {
        if !self.by_index.contains_key(&n) {
            let mut hist = BTreeMap::new();
            for g in enumerate_subgroups(n)? {
                *hist.entry(graph_diameter(&g)).or_insert(0) += 1;
            }
            self.by_index.insert(n, hist);
        }
        Ok(&self.by_index[&n])
    }

    /// Subgroups of index `n` whose graph diameter is at most `g_max`.
    pub fn admitted(&mut self, n: usize, g_max: u32) -> Result<u64> {
        Ok(self.ensure(n)?.range(..=g_max).map(|(_, c)| c).sum())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    /// Enumerated subgroups filtered by diameter.
    Enumerated,
    /// Every subgroup qualifies or none can; decided without sampling.
    Certified,
    /// Fraction of qualifying graphs estimated from uniform samples.
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexContribution {
    pub n: usize,
    pub method: CountMethod,
    #[serde(with = "crate::gl::decimal")]
    pub subgroups: BigUint,
    /// Exact admitted count, for enumerated and certified indices.
    #[serde(with = "crate::gl::decimal_opt")]
    pub exact: Option<BigUint>,
    pub estimated: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoncommensurableCount {
    #[serde(with = "crate::gl::decimal")]
    pub exact: BigUint,
    pub estimated: f64,
    pub stderr: f64,
    /// Graphs beyond the ceiling could still qualify; the total is then only a lower bound.
    pub ceiling_too_low: bool,
    pub per_n: Vec<IndexContribution>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountOptions {
    /// Samples per index above the enumeration ceiling.
    pub trials: usize,
    pub seed: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { trials: 200, seed: 0 }
    }
}

/// Lower bound on the number of commensurability classes of glued manifolds
/// with diameter at most `d_max` built from graphs with at most `n_ceiling`
/// vertices.
///
/// Distinct subgroups give non-commensurable manifolds once `τ` marks a
/// single vertex, so each admitted subgroup contributes exactly one class;
/// other single-vertex markings of the same graph are not counted again.
pub fn count_noncommensurable(
    d_max: f64,
    blocks: &BlockTable,
    n_ceiling: usize,
    options: CountOptions,
) -> Result<NoncommensurableCount> {
    count_noncommensurable_with(d_max, blocks, n_ceiling, options, &mut DiameterCensus::default())
}

pub fn count_noncommensurable_with(
    d_max: f64,
    blocks: &BlockTable,
    n_ceiling: usize,
    options: CountOptions,
    census: &mut DiameterCensus,
) -> Result<NoncommensurableCount> {
    if n_ceiling == 0 {
        return Err(Error::invalid("ceiling must be at least 1"));
    }
    if !(d_max.is_finite() && d_max > 0.0) {
        return Err(Error::invalid("d_max must be positive"));
    }
    let table = count_subgroups(n_ceiling)?;
    let g_max = max_admissible_graph_diameter(d_max, blocks);

    let mut per_n = Vec::with_capacity(n_ceiling);
    for n in 1..=n_ceiling {
        let subgroups = table.a(n).clone();
        let mut c = IndexContribution {
            n,
            method: CountMethod::Certified,
            subgroups: subgroups.clone(),
            exact: Some(BigUint::zero()),
            estimated: 0.0,
            stderr: 0.0,
        };
        match g_max {
            None => {}
            Some(g) if g < diameter_lower_bound(n) => {}
            // a connected graph on n vertices has diameter at most n - 1
            Some(g) if g as usize + 1 >= n => c.exact = Some(subgroups),
            Some(g) if n <= ENUMERATION_CEILING => {
                c.method = CountMethod::Enumerated;
                c.exact = Some(BigUint::from(census.admitted(n, g)?));
            }
            Some(g) => {
                if options.trials == 0 {
                    return Err(Error::invalid("sampling needs at least one trial"));
                }
                let stats = diameter_statistics(n, options.trials, mix(options.seed, n as u64))?;
                let p = stats.fraction(|d| d <= g);
                let a = subgroups.to_f64().unwrap_or(f64::INFINITY);
                c.method = CountMethod::Sampled;
                c.exact = None;
                c.estimated = a * p;
                c.stderr = a * (p * (1.0 - p) / options.trials as f64).sqrt();
            }
        }
        per_n.push(c);
    }

    let exact = per_n.iter().filter_map(|c| c.exact.as_ref()).sum();
    let estimated = per_n.iter().map(|c| c.estimated).sum();
    let stderr = per_n.iter().map(|c| c.stderr * c.stderr).sum::<f64>().sqrt();
    let ceiling_too_low = g_max.is_some_and(|g| diameter_lower_bound(n_ceiling + 1) <= g);
    Ok(NoncommensurableCount {
        exact,
        estimated,
        stderr,
        ceiling_too_low,
        per_n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionParams {
    /// Constant relating volume and diameter: volume is at most `e^{d/C_n}`.
    pub c_n: f64,
    pub beta: f64,
    pub eps: f64,
    /// Constant of the `exp(C'·d·exp(C'·d))` lower bound on all classes.
    pub c_prime: f64,
}

impl Default for FractionParams {
    fn default() -> Self {
        FractionParams {
            c_n: 1.0,
            beta: 1.0,
            eps: 0.1,
            c_prime: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FractionBound {
    /// Natural log of the unclamped ratio.
    pub log_bound: f64,
    /// `min(1, exp(log_bound))`.
    pub fraction: f64,
}

/// Upper bound on the fraction of arithmetic manifolds among those of
/// diameter at most `d`: maximal arithmetic lattices of diameter `<= d`
/// number at most `exp(β·(d/C_n)^{1+ε})`, against at least
/// `exp(C'·d·exp(C'·d))` commensurability classes in total.
pub fn arithmetic_fraction_bound(d: f64, p: &FractionParams) -> Result<FractionBound> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::invalid("d must be a nonnegative real"));
    }
    if [p.c_n, p.beta, p.c_prime].iter().any(|c| !(*c > 0.0)) || !(p.eps >= 0.0) {
        return Err(Error::invalid("fraction constants must be positive (eps nonnegative)"));
    }
    let log_arith = p.beta * (d / p.c_n).powf(1.0 + p.eps);
    let log_all = p.c_prime * d * (p.c_prime * d).exp();
    let log_bound = log_arith - log_all;
    Ok(FractionBound {
        log_bound,
        fraction: log_bound.min(0.0).exp(),
    })
}

/// Big integers as decimal strings.
pub(crate) mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) mod decimal_opt {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_str(&v.to_str_radix(10)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| s.parse().map_err(serde::de::Error::custom)).transpose()
    }
}
