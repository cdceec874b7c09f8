//! Adaptive Simpson quadrature with Richardson correction.

const MAX_DEPTH: u32 = 50;
const INITIAL_PANELS: usize = 16;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integral of `f` over `[a, b]` to relative tolerance `rel_tol`.
///
/// The interval is first cut into a fixed number of panels to get a
/// reliable magnitude estimate; each panel is then bisected until the
/// Simpson estimates of the halves agree with the whole.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let h = (b - a) / INITIAL_PANELS as f64;
    let mut panels = Vec::with_capacity(INITIAL_PANELS);
    let mut coarse = 0.0;
    for k in 0..INITIAL_PANELS {
        let lo = a + h * k as f64;
        let hi = if k + 1 == INITIAL_PANELS { b } else { lo + h };
        let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let s = simpson(fa, fm, fb, hi - lo);
        coarse += s;
        panels.push((lo, hi, fa, fm, fb, s));
    }
    let tol = (rel_tol * coarse.abs()).max(f64::MIN_POSITIVE);
    panels
        .into_iter()
        .map(|(lo, hi, fa, fm, fb, s)| {
            refine(&f, lo, hi, fa, fm, fb, s, tol / INITIAL_PANELS as f64, MAX_DEPTH)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_and_exponentials() {
        assert!((integrate(|x| x * x, 0.0, 3.0, 1e-12) - 9.0).abs() < 1e-12);
        let e = integrate(f64::exp, 0.0, 10.0, 1e-12);
        assert!((e - (10f64.exp() - 1.0)).abs() / e < 1e-12);
        assert!((integrate(f64::sin, 0.0, std::f64::consts::PI, 1e-12) - 2.0).abs() < 1e-11);
        assert_eq!(integrate(f64::exp, 1.0, 1.0, 1e-12), 0.0);
    }
}
