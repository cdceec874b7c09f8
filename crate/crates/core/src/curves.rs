//! Plot-ready data series.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gabber::GabberScan;
use crate::gl::{count_noncommensurable_with, BlockTable, CountOptions, DiameterCensus};
use crate::homology::ln_big;
use crate::schreier::diameter_statistics;
use crate::seed::mix;

/// Vertex ceiling for the exact counts behind `count-vs-diam`.
pub const COUNT_CEILING: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    CountVsDiam,
    DiamVsN,
    TorsionVsVertices,
}

impl std::str::FromStr for CurveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "count-vs-diam" => Ok(CurveKind::CountVsDiam),
            "diam-vs-n" => Ok(CurveKind::DiamVsN),
            "torsion-vs-vertices" => Ok(CurveKind::TorsionVsVertices),
            _ => Err(Error::invalid(format!("unknown curve kind {s:?}"))),
        }
    }
}

/// `y = slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Least-squares slope with the intercept moved down (`lower`) or up
/// (`upper`) until every residual has one sign.
pub fn envelope_fits(points: &[(f64, f64)]) -> Option<(Line, Line)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let offsets = points.iter().map(|p| p.1 - slope * p.0);
    let lo = offsets.clone().fold(f64::INFINITY, f64::min);
    let hi = offsets.fold(f64::NEG_INFINITY, f64::max);
    Some((Line { slope, intercept: lo }, Line { slope, intercept: hi }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub kind: CurveKind,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<(f64, f64)>,
    pub lower: Option<Line>,
    pub upper: Option<Line>,
}

impl Curve {
    /// `x,y,lower,upper`; the envelope columns are empty without a fit.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,lower,upper\n");
        let col = |l: &Option<Line>, x: f64| l.map_or(String::new(), |l| l.at(x).to_string());
        for &(x, y) in &self.points {
            s.push_str(&format!("{x},{y},{},{}\n", col(&self.lower, x), col(&self.upper, x)));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("curve serialization cannot fail")
    }

    pub fn below_upper(&self) -> bool {
        self.upper.is_none_or(|u| self.points.iter().all(|&(x, y)| y <= u.at(x) + 1e-12))
    }

    pub fn above_lower(&self) -> bool {
        self.lower.is_none_or(|l| self.points.iter().all(|&(x, y)| y >= l.at(x) - 1e-12))
    }
}

/// `ln ln` of the exact class count for integer `d_max` in `d_range`, with
/// every block of diameter `block_diam`. Points with count at most one
/// have no `ln ln` and are skipped.
pub fn count_vs_diam(d_range: std::ops::RangeInclusive<u32>, block_diam: f64) -> Result<Curve> {
    let blocks = BlockTable::uniform(block_diam)?;
    let mut census = DiameterCensus::default();
    let mut points = Vec::new();
    for d in d_range {
        let c = count_noncommensurable_with(d as f64, &blocks, COUNT_CEILING, CountOptions::default(), &mut census)?;
        if c.exact > 1u32.into() {
            points.push((d as f64, ln_big(&c.exact).ln()));
        }
    }
    let fits = envelope_fits(&points);
    Ok(Curve {
        kind: CurveKind::CountVsDiam,
        x_label: "d_max".into(),
        y_label: "ln ln count".into(),
        points,
        lower: fits.map(|f| f.0),
        upper: fits.map(|f| f.1),
    })
}

/// Median Schreier-graph diameter against `log₃N`, between the lines
/// `log₃N − 1` and `2·log₃N`; index `N` uses seed `mix(seed, N)`.
pub fn diam_vs_n(ns: &[usize], trials: usize, seed: u64) -> Result<Curve> {
    let points = ns
        .iter()
        .map(|&n| Ok((log3(n), diameter_statistics(n, trials, mix(seed, n as u64))?.median())))
        .collect::<Result<Vec<_>>>()?;
    Ok(Curve {
        kind: CurveKind::DiamVsN,
        x_label: "log3 N".into(),
        y_label: "median diameter".into(),
        points,
        lower: Some(Line { slope: 1.0, intercept: -1.0 }),
        upper: Some(Line { slope: 2.0, intercept: 0.0 }),
    })
}

fn log3(n: usize) -> f64 {
    (n as f64).ln() / 3f64.ln()
}

/// Largest `ln |H_p tors|` over `p` against vertex count, with the line
/// `C_est·V` through the origin as upper envelope.
pub fn torsion_vs_vertices(scan: &GabberScan) -> Curve {
    let points = scan
        .observations
        .iter()
        .map(|o| (o.vertices as f64, o.log_torsion.iter().copied().fold(0.0, f64::max)))
        .collect();
    Curve {
        kind: CurveKind::TorsionVsVertices,
        x_label: "vertices".into(),
        y_label: "ln |tors|".into(),
        points,
        lower: None,
        upper: Some(Line {
            slope: scan.max_ratio(),
            intercept: 0.0,
        }),
    }
}

/// Exact class count as `f64`, for display.
pub fn count_as_f64(c: &num_bigint::BigUint) -> f64 {
    c.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gabber::gabber_scan;

    #[test]
    fn fits_are_one_sided() {
        let pts = vec![(0.0, 0.0), (1.0, 2.0), (2.0, 1.5), (3.0, 4.0)];
        let (lo, hi) = envelope_fits(&pts).unwrap();
        assert!(pts.iter().all(|&(x, y)| y >= lo.at(x) - 1e-12 && y <= hi.at(x) + 1e-12));
        assert!(lo.slope > 0.0);
        assert!(envelope_fits(&pts[..1]).is_none());
    }

    #[test]
    fn count_curve_small_range() {
        let c = count_vs_diam(2..=8, 1.0).unwrap();
        // d = 2 admits only the trivial subgroup
        assert_eq!(c.points.first().unwrap().0, 4.0);
        let blocks = BlockTable::uniform(1.0).unwrap();
        let direct =
            crate::gl::count_noncommensurable(4.0, &blocks, COUNT_CEILING, CountOptions::default()).unwrap();
        assert!((c.points[0].1 - count_as_f64(&direct.exact).ln().ln()).abs() < 1e-12);
        assert!(c.lower.unwrap().slope > 0.0);
        assert!(c.above_lower() && c.below_upper());
        assert!(c.to_csv().starts_with("x,y,lower,upper\n4,"));
    }

    #[test]
    fn torsion_curve_under_line() {
        let scan = gabber_scan(8, 16, 40, 2).unwrap();
        let c = torsion_vs_vertices(&scan);
        assert_eq!(c.points.len(), 40);
        assert!(c.below_upper());
    }

    #[test]
    fn diam_curve_inside_envelope() {
        let c = diam_vs_n(&[27, 81], 30, 1).unwrap();
        assert!((c.points[1].0 - 4.0).abs() < 1e-12);
        assert!(c.above_lower() && c.below_upper());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("diam-vs-n".parse::<CurveKind>().unwrap(), CurveKind::DiamVsN);
        assert!("other".parse::<CurveKind>().is_err());
    }
}
