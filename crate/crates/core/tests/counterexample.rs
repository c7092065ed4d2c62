use mvlab_core::counterexample::{counterexample_demo, p_mu_i, u_truncated, CounterexampleConfig};
use mvlab_core::ExtReal;

/// Adaptive Simpson with a Richardson-corrected local estimate.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
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
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    rec(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
}

fn p_oracle(i: u32, x: [f64; 3]) -> f64 {
    let rho2 = x[1] * x[1] + x[2] * x[2];
    let f = |t: f64| 1.0 / ((t - x[0]).powi(2) + rho2).sqrt();
    let (lo, hi) = (1.0 / i as f64, i as f64);
    // split at the foot of the perpendicular so the peak lies on a node
    let mut total = 0.0;
    for (a, b) in [(lo, hi), (-hi, -lo)] {
        let cuts: Vec<f64> = [a, x[0].clamp(a, b), b].to_vec();
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                total += simpson(&f, w[0], w[1], 1e-14);
            }
        }
    }
    -total
}

#[test]
fn closed_form_matches_quadrature_off_axis() {
    let points: [(u32, [f64; 3]); 10] = [
        (2, [0.0, 1.0, 0.0]),
        (2, [0.3, 0.2, -0.1]),
        (3, [1.5, 0.05, 0.0]),
        (5, [-0.7, 0.0, 0.4]),
        (7, [2.0, -1.0, 1.0]),
        (10, [0.05, 0.02, 0.02]),
        (17, [-3.0, 0.5, 0.0]),
        (40, [0.0, 0.0, 0.3]),
        (100, [0.2, -0.3, 0.1]),
        (1000, [10.0, 0.1, 0.1]),
    ];
    for (i, x) in points {
        let closed = p_mu_i(i, &x).unwrap().to_f64();
        let oracle = p_oracle(i, x);
        assert!((closed - oracle).abs() < 1e-10, "i {i} x {x:?}: {closed} vs {oracle}");
    }
}

#[test]
fn origin_values() {
    let p2 = p_mu_i(2, &[0.0; 3]).unwrap().to_f64();
    assert!((p2 + 4.0 * 2f64.ln()).abs() < 1e-12);
    let cfg = CounterexampleConfig::new(1000).unwrap();
    let u0 = u_truncated(&cfg, &[0.0; 3]).unwrap().to_f64();
    assert!((u0 + 1.0).abs() < 1e-12);
    assert_eq!(u_truncated(&cfg, &[0.5, 0.0, 0.0]).unwrap(), ExtReal::NegInf);
}

#[test]
fn demo_small_n() {
    let cfg = CounterexampleConfig::new(2).unwrap();
    let rep = counterexample_demo(&cfg, 0.6, 10_000).unwrap();
    assert_eq!(rep.value_at_0, -0.5);
    assert!(rep.gap > 0.0);
    // only |s| >= 1/2 is clamped: a sixth of the segment
    assert!(rep.line_mean < -0.8 && rep.line_mean > -1.0, "{}", rep.line_mean);
}

#[test]
fn line_mean_non_increasing_in_n() {
    let mut prev = f64::INFINITY;
    for n in [20, 50, 200, 1000] {
        let cfg = CounterexampleConfig::new(n).unwrap();
        let m = counterexample_demo(&cfg, 0.1, 20_000).unwrap().line_mean;
        assert!(m <= prev + 1e-12, "N {n}: {m} > {prev}");
        prev = m;
    }
}
