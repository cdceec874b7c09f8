//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL
//! line; the process exits nonzero if any criterion fails.

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::time::Instant;

use diamtors_core::complex::fixtures;
use diamtors_core::curves::{count_vs_diam, COUNT_CEILING};
use diamtors_core::gabber::{gabber_scan, GabberEntry, GabberTable};
use diamtors_core::geometry::{ball_volume, degree_bound, log_ball_volume, min_diameter_for_volume};
use diamtors_core::gl::{arithmetic_fraction_bound, count_noncommensurable, CountOptions, FractionParams};
use diamtors_core::homology::homology;
use diamtors_core::pipeline::{nerve_pipeline, NerveConfig, PipelineReport};
use diamtors_core::schreier::{diameter_lower_bound, diameter_statistics};
use diamtors_core::subgroups::{count_subgroups, count_transitive_pairs_bruteforce, factorial};
use diamtors_core::{BlockTable, FiniteMetricSpace, SimplicialComplex};
use num_bigint::BigUint;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("subgroup counts match brute force for N <= 7", subgroup_oracle),
        ("a_N/(N·N!) strictly increasing on 2..=100, >= 0.95 at 50", subgroup_ratio),
        ("Schreier diameters inside [lower bound, 2·log3 N]", diameter_envelope),
        ("loglog class counts admit a positive lower fit", counting_pipeline),
        ("arithmetic fraction bound decreasing, < 1e-100 at d = 20", fraction_bound),
        ("ball volume quadrature, inverse and degree bound", hyperbolic_layer),
        ("homology of the regression corpus", homology_corpus),
        ("projective plane nerve has H1 torsion [2]", projective_nerve),
        ("torsion-per-vertex scan is finite and seed-stable", gabber_bound),
        ("results independent of thread count", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {name}: {} ({:.1?})", i + 1, o.detail, t.elapsed());
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn subgroup_oracle() -> Outcome {
    let table = count_subgroups(7).unwrap();
    let mut mismatches = Vec::new();
    for n in 1..=7 {
        let pairs = count_transitive_pairs_bruteforce(n).unwrap();
        let oracle = pairs / factorial(n - 1);
        if &oracle != table.a(n) {
            mismatches.push(format!("N={n}: {} vs {oracle}", table.a(n)));
        }
    }
    let literal = [(2, 3u32), (3, 13), (4, 71), (5, 461)]
        .iter()
        .all(|&(n, a)| table.a(n) == &BigUint::from(a));
    let values: Vec<String> = (1..=7).map(|n| table.a(n).to_string()).collect();
    outcome(
        mismatches.is_empty() && literal,
        format!("a_1..a_7 = {}{}", values.join(", "), mismatches.join("; ")),
    )
}

fn subgroup_ratio() -> Outcome {
    let table = count_subgroups(100).unwrap();
    let drops: Vec<usize> = (2..100).filter(|&n| !table.ratio_lt(n, n + 1)).collect();
    let at_50 = table.ratio(50);
    let detail = format!(
        "ratio(2) = {:.4}, ratio(3) = {:.4}, ratio(50) = {at_50:.5}, non-increasing steps at N = {drops:?}",
        table.ratio(2),
        table.ratio(3)
    );
    outcome(drops.is_empty() && at_50 >= 0.95, detail)
}

fn diameter_envelope() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, n) in [243usize, 729, 2187].into_iter().enumerate() {
        let stats = diameter_statistics(n, 200, 1000 + i as u64).unwrap();
        let within = stats.frac_le_2log3();
        let floor = diameter_lower_bound(n);
        let above = stats.diameters.iter().all(|&d| d >= floor);
        pass &= within >= 0.99 && above;
        parts.push(format!(
            "N={n}: {:.1}% <= 2·log3 N, min {} >= {floor}: {above}",
            100.0 * within,
            stats.min()
        ));
    }
    outcome(pass, parts.join("; "))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Diameter of the graph with edges `v — a(v)` and `v — b(v)`, or `None`
/// when it is disconnected.
fn pair_diameter(a: &[usize], b: &[usize]) -> Option<usize> {
    let n = a.len();
    let mut neighbors = vec![Vec::new(); n];
    for v in 0..n {
        for w in [a[v], b[v]] {
            neighbors[v].push(w);
            neighbors[w].push(v);
        }
    }
    let mut diam = 0;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &neighbors[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        diam = diam.max(*dist.iter().max().unwrap());
    }
    (diam != usize::MAX).then_some(diam)
}

/// Subgroups of index at most `max_n` whose Schreier graph has diameter at
/// most `g`: transitive pairs on `N` points with that diameter, divided by
/// the `(N−1)!` labelings fixing the base point.
fn brute_force_admitted(max_n: usize, g: usize) -> BigUint {
    (1..=max_n)
        .map(|n| {
            let perms = permutations(n);
            let hits = perms
                .iter()
                .flat_map(|a| perms.iter().map(move |b| (a, b)))
                .filter(|(a, b)| pair_diameter(a, b).is_some_and(|d| d <= g))
                .count();
            BigUint::from(hits) / factorial(n - 1)
        })
        .sum()
}

fn counting_pipeline() -> Outcome {
    let curve = count_vs_diam(2..=14, 1.0).unwrap();
    let slope = curve.lower.map_or(f64::NAN, |l| l.slope);
    let fit_ok = slope > 0.0 && curve.above_lower() && curve.below_upper();

    // block diameter 1: manifold diameter <= 2g + 2, so d_max = 4 admits
    // graph diameter g <= 1; a 4-regular graph of diameter 1 has at most
    // 5 vertices, so indices up to 5 cover everything below the ceiling
    let blocks = BlockTable::uniform(1.0).unwrap();
    let count = |ceiling| count_noncommensurable(4.0, &blocks, ceiling, CountOptions::default()).unwrap();
    let full = count(COUNT_CEILING);
    let oracle = brute_force_admitted(5, 1);
    let up_to_two = count(2).exact;
    let counts_ok = full.exact == oracle && !full.ceiling_too_low && up_to_two == BigUint::from(4u32);
    outcome(
        fit_ok && counts_ok,
        format!(
            "{} points, lower slope {slope:.4}; count(d_max=4, D=1) = {} over N <= {COUNT_CEILING} (brute force {oracle}), {up_to_two} over N <= 2",
            curve.points.len(),
            full.exact
        ),
    )
}

fn fraction_bound() -> Outcome {
    let p = FractionParams::default();
    let grid: Vec<f64> = (0..=80).map(|i| i as f64 * 0.25).collect();
    let values: Vec<_> = grid.iter().map(|&d| arithmetic_fraction_bound(d, &p).unwrap()).collect();
    let non_increasing = values.windows(2).all(|w| w[1].fraction <= w[0].fraction);
    // strictly decreasing wherever the bound is informative
    let strict = values.windows(2).all(|w| w[0].log_bound >= 0.0 || w[1].log_bound < w[0].log_bound);
    let last = values.last().unwrap().log_bound;
    let target = -100.0 * 10f64.ln();
    outcome(
        non_increasing && strict && last < target,
        format!("ln bound at d = 20 is {last:.4e} (target < {target:.2})"),
    )
}

fn hyperbolic_layer() -> Outcome {
    let closed = |n: usize, r: f64| match n {
        2 => 2.0 * PI * (r.cosh() - 1.0),
        3 => PI * ((2.0 * r).sinh() - 2.0 * r),
        _ => unreachable!(),
    };
    let mut worst_quad = 0.0f64;
    let mut worst_inverse = 0.0f64;
    for n in [2, 3] {
        for r in [0.01, 0.1, 1.0, 5.0, 20.0] {
            let exact = closed(n, r);
            worst_quad = worst_quad.max((ball_volume(n, r).unwrap() - exact).abs() / exact);
            worst_quad = worst_quad.max((log_ball_volume(n, r).unwrap() - exact.ln()).abs() / exact.ln().abs().max(1.0));
            let back = min_diameter_for_volume(n, exact).unwrap();
            worst_inverse = worst_inverse.max((back - r).abs() / r);
        }
    }
    let mut worst_degree = 0.0f64;
    for n in [2, 3, 4] {
        let target = 9f64.powi(n as i32);
        worst_degree = worst_degree.max((degree_bound(n, 1e-4).unwrap() - target).abs() / target);
    }
    outcome(
        worst_quad <= 1e-10 && worst_inverse <= 1e-8 && worst_degree <= 1e-3,
        format!(
            "quadrature rel err {worst_quad:.2e}, inverse rel err {worst_inverse:.2e}, degree bound rel err {worst_degree:.2e}"
        ),
    )
}

/// Barycentric subdivision: vertices are the simplices of `c`, top
/// simplices the maximal flags.
fn barycentric(c: &SimplicialComplex) -> SimplicialComplex {
    let all: Vec<Vec<u32>> = (0..=c.dim()).flat_map(|p| c.simplices(p).to_vec()).collect();
    let id = |s: &Vec<u32>| all.iter().position(|t| t == s).unwrap() as u32;
    let mut flags = Vec::new();
    for top in c.simplices(c.dim()) {
        for order in permutations(top.len()) {
            let flag: Vec<u32> = (1..=top.len())
                .map(|k| {
                    let mut face: Vec<u32> = order[..k].iter().map(|&i| top[i]).collect();
                    face.sort_unstable();
                    id(&face)
                })
                .collect();
            flags.push(flag);
        }
    }
    SimplicialComplex::from_simplices(all.len(), flags).unwrap()
}

fn homology_corpus() -> Outcome {
    let two = || vec![BigUint::from(2u32)];
    let cases: Vec<(&str, SimplicialComplex, Vec<usize>, Vec<BigUint>)> = vec![
        ("circle", fixtures::circle(), vec![1, 1], vec![]),
        ("sphere", fixtures::sphere(), vec![1, 0, 1], vec![]),
        ("torus", fixtures::torus(), vec![1, 2, 1], vec![]),
        ("projective plane", fixtures::projective_plane(), vec![1, 0, 0], two()),
        ("subdivided projective plane", barycentric(&fixtures::projective_plane()), vec![1, 0, 0], two()),
        ("Klein bottle", fixtures::klein_bottle(3), vec![1, 1, 0], two()),
    ];
    let mut bad = Vec::new();
    for (name, c, betti, tors) in &cases {
        let h = homology(c).unwrap();
        if &h.betti_numbers() != betti || h.torsion(1) != tors.as_slice() {
            bad.push(format!("{name}: betti {:?}, torsion {:?}", h.betti_numbers(), h.torsion(1)));
        }
    }
    let minimal = fixtures::projective_plane();
    let cross = minimal.n_vertices() == 6 && minimal.count(2) == 10;
    outcome(
        bad.is_empty() && cross,
        if bad.is_empty() {
            format!("{} complexes match", cases.len())
        } else {
            bad.join("; ")
        },
    )
}

fn projective_report() -> PipelineReport {
    let space = FiniteMetricSpace::projective_plane(2000).unwrap();
    nerve_pipeline(&space, &NerveConfig::new(0.2, 0.3)).unwrap()
}

fn projective_nerve() -> Outcome {
    let r = projective_report();
    let tors: Vec<String> = r.homology.torsion(1).iter().map(|t| t.to_string()).collect();
    let pass = r.cover_verified && r.trusted_degrees >= 2 && tors == ["2"] && r.homology.betti(0) == 1;
    outcome(
        pass,
        format!(
            "{} centers, cover verified {}, betti {:?}, H1 torsion {tors:?}",
            r.centers.len(),
            r.cover_verified,
            r.homology.betti_numbers()
        ),
    )
}

fn gabber_bound() -> Outcome {
    let seeds = [11u64, 12, 13, 14, 15];
    let scans: Vec<_> = seeds.iter().map(|&s| gabber_scan(12, 40, 2000, s).unwrap()).collect();
    let total: u64 = scans.iter().map(|s| s.trials).sum();
    let finite = scans
        .iter()
        .all(|s| s.observations.iter().all(|o| (1..=2).all(|p| o.ratio(p).is_finite())));
    let maxima: Vec<f64> = scans.iter().map(|s| s.max_ratio()).collect();
    let hi = maxima.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = maxima.iter().copied().fold(f64::INFINITY, f64::min);
    let stable = lo > 0.0 && hi <= 1.2 * lo;

    // nerves from the pipeline against the constant from all scanned
    // complexes; their degrees can exceed the scan's cap
    let constant = hi;
    let table = GabberTable::new(vec![GabberEntry {
        degree: u64::MAX,
        p: 1,
        constant,
    }]);
    let nerves = [
        ("flat torus", FiniteMetricSpace::flat_torus(2, 30).unwrap(), NerveConfig::new(0.15, 0.16)),
        ("circle", FiniteMetricSpace::circle(120).unwrap(), NerveConfig::new(0.3, 0.32)),
        ("sphere", FiniteMetricSpace::round_sphere(800).unwrap(), NerveConfig::new(0.4, 0.5)),
        ("projective plane", FiniteMetricSpace::projective_plane(2000).unwrap(), NerveConfig::new(0.2, 0.3)),
    ];
    let mut nerve_ok = true;
    let mut nerve_parts = Vec::new();
    for (name, space, mut cfg) in nerves {
        cfg.gabber = Some(table.clone());
        let r = nerve_pipeline(&space, &cfg).unwrap();
        let holds = !r.torsion.is_empty() && r.torsion.iter().all(|t| t.holds && t.bound == constant * r.centers.len() as f64);
        nerve_ok &= holds;
        nerve_parts.push(format!("{name} (V={}, D={}): {holds}", r.centers.len(), r.max_degree));
    }
    outcome(
        total >= 10_000 && finite && stable && nerve_ok,
        format!(
            "{total} complexes, per-seed max {:?}, spread {:.3}; nerves under C = {constant:.4}: {}",
            maxima.iter().map(|m| format!("{m:.4}")).collect::<Vec<_>>(),
            hi / lo,
            nerve_parts.join(", ")
        ),
    )
}

fn determinism() -> Outcome {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let stats = diameter_statistics(243, 40, 5).unwrap().to_csv();
            let scan = gabber_scan(12, 30, 300, 5).unwrap().to_json();
            let nerve = serde_json::to_string(&projective_report()).unwrap();
            let count = serde_json::to_string(
                &count_noncommensurable(12.0, &BlockTable::uniform(1.0).unwrap(), 9, CountOptions::default()).unwrap(),
            )
            .unwrap();
            [stats, scan, nerve, count]
        })
    };
    let one = run(1);
    let four = run(4);
    let same = one == four;
    outcome(same, format!("1 and 4 worker threads give identical output: {same}"))
}
