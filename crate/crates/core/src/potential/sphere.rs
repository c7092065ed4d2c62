use crate::error::{invalid, Error, Result};
use crate::ext::ExtReal;
use crate::field::Field;
use crate::numeric::CompensatedSum;
use crate::point::Point;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tolerance of the sub-mean inequality.
pub const SUBMEAN_TOL: f64 = 1e-6;

const MIN_ORDER: usize = 8;
const MAX_ORDER: usize = 1 << 22;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(m: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        out[i] = (z, w);
        out[m - 1 - i] = (-z, w);
    }
    out
}

/// Unit-sphere nodes with weights summing to 1.
///
/// The plane uses `order` equally spaced angles. R^3 uses a product rule
/// with `m` Gauss-Legendre latitudes and `2m` equally spaced longitudes,
/// `2 m^2 >= order`; it is exact for spherical harmonics of degree below
/// `2m` and the node set is symmetric under `y -> -y`.
pub fn sphere_nodes(dim: usize, order: usize) -> Result<Vec<([f64; 3], f64)>> {
    if order < MIN_ORDER {
        return Err(invalid(format!("quadrature order {order} is below the minimum {MIN_ORDER}")));
    }
    match dim {
        2 => {
            let w = 1.0 / order as f64;
            Ok((0..order)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / order as f64;
                    ([t.cos(), t.sin(), 0.0], w)
                })
                .collect())
        }
        3 => {
            let m = ((order as f64 / 2.0).sqrt().ceil() as usize).max(2);
            let lon = 2 * m;
            let mut nodes = Vec::with_capacity(m * lon);
            for (z, wz) in gauss_legendre(m) {
                let rho = (1.0 - z * z).max(0.0).sqrt();
                let w = wz / (2.0 * lon as f64);
                for j in 0..lon {
                    let (s, c) = (2.0 * PI * (j as f64 + 0.5) / lon as f64).sin_cos();
                    nodes.push(([rho * c, rho * s, z], w));
                }
            }
            Ok(nodes)
        }
        n => Err(Error::Unsupported(format!("sphere quadrature for n = {n}"))),
    }
}

/// Average of `f` over the sphere `|y - x| = r` with about `quad_order` nodes.
pub fn sphere_mean<F: Field + ?Sized>(f: &F, x: &[f64], r: f64, quad_order: usize) -> Result<ExtReal> {
    if !(r > 0.0) {
        return Err(invalid("sphere radius must be positive"));
    }
    let dim = x.len();
    if let Some(n) = f.dim() {
        crate::error::check_dim(n, dim)?;
    }
    if !f.contains_ball(x, r) {
        return Err(crate::error::domain(format!(
            "sphere of radius {r} around {x:?} leaves the domain of the function"
        )));
    }
    let nodes = sphere_nodes(dim, quad_order)?;
    // centred on the first sample, so constants come out exactly
    let mut acc = CompensatedSum::new();
    let mut base = None;
    let mut y = vec![0.0; dim];
    for (node, w) in &nodes {
        for k in 0..dim {
            y[k] = x[k] + r * node[k];
        }
        match f.value(&y)? {
            ExtReal::Finite(v) => {
                let b = *base.get_or_insert(v);
                acc.add(w * (v - b));
            }
            ExtReal::NegInf => return Ok(ExtReal::NegInf),
            ExtReal::PosInf => return Ok(ExtReal::PosInf),
        }
    }
    Ok(ExtReal::from(base.unwrap_or(0.0) + acc.value()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphereMean {
    pub mean: ExtReal,
    pub order: usize,
    /// `|mean(order) - mean(order / 2)|`
    pub last_change: f64,
    pub converged: bool,
}

/// Doubles the node count from `quad_order` until two consecutive means
/// differ by less than `tol / 2`.
pub fn sphere_mean_converged<F: Field + ?Sized>(
    f: &F,
    x: &[f64],
    r: f64,
    quad_order: usize,
    tol: f64,
) -> Result<SphereMean> {
    let mut order = quad_order;
    let mut prev = sphere_mean(f, x, r, order)?;
    loop {
        let next_order = order * 2;
        let next = sphere_mean(f, x, r, next_order)?;
        let change = match (prev, next) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => (a - b).abs(),
            (a, b) if a == b => 0.0,
            _ => f64::INFINITY,
        };
        if change < tol / 2.0 || next_order >= MAX_ORDER {
            return Ok(SphereMean {
                mean: next,
                order: next_order,
                last_change: change,
                converged: change < tol / 2.0,
            });
        }
        prev = next;
        order = next_order;
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmeanEntry {
    pub r: f64,
    pub mean: ExtReal,
    /// `mean - u(x)`
    pub margin: ExtReal,
    pub order: usize,
    pub quadrature_converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubmeanReport {
    pub x: Point,
    pub value: ExtReal,
    pub tol: f64,
    pub entries: Vec<SubmeanEntry>,
    pub worst_margin: ExtReal,
    pub pass: bool,
    /// `u(x) = -inf`: the inequality holds trivially.
    pub vacuous: bool,
}

/// Checks `u(x) <= mean of u over |y - x| = r` for every radius, with
/// tolerance [`SUBMEAN_TOL`] and order doubling from `quad_order`.
pub fn submean_check<F: Field + ?Sized>(f: &F, x: &[f64], radii: &[f64], quad_order: usize) -> Result<SubmeanReport> {
    if radii.is_empty() {
        return Err(invalid("no radii supplied"));
    }
    let value = f.value(x)?;
    let tol = SUBMEAN_TOL;
    let mut entries = Vec::with_capacity(radii.len());
    for &r in radii {
        let sm = sphere_mean_converged(f, x, r, quad_order, tol)?;
        let margin = match (sm.mean, value) {
            (_, ExtReal::NegInf) => ExtReal::PosInf,
            (ExtReal::Finite(m), ExtReal::Finite(v)) => ExtReal::Finite(m - v),
            (m, _) => m,
        };
        entries.push(SubmeanEntry { r, mean: sm.mean, margin, order: sm.order, quadrature_converged: sm.converged });
    }
    let worst_margin = entries.iter().map(|e| e.margin).fold(ExtReal::PosInf, ExtReal::min);
    Ok(SubmeanReport {
        x: Point::new(x.to_vec()),
        value,
        tol,
        pass: worst_margin >= ExtReal::Finite(-tol),
        vacuous: value.is_neg_inf(),
        entries,
        worst_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Dimension;
    use crate::potential::{HarmonicSpec, Part, RieszFunction};

    #[test]
    fn constants_exact() {
        let five = |_: &[f64]| ExtReal::Finite(5.0);
        for (x, r) in [(vec![0.0, 0.0], 1.0), (vec![0.3, -2.0, 1.0], 0.01)] {
            for q in [8, 13, 64] {
                assert_eq!(sphere_mean(&five, &x, r, q).unwrap(), ExtReal::Finite(5.0));
            }
        }
    }

    #[test]
    fn legendre_rule_is_exact() {
        for m in [2, 5, 12, 40] {
            let rule = gauss_legendre(m);
            for k in 0..2 * m {
                let q: f64 = rule.iter().map(|(z, w)| w * z.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "m {m} k {k}");
            }
        }
    }

    #[test]
    fn sphere_moments() {
        for order in [8, 50, 1000] {
            let nodes = sphere_nodes(3, order).unwrap();
            assert!(nodes.len() >= order);
            let total: f64 = nodes.iter().map(|n| n.1).sum();
            assert!((total - 1.0).abs() < 1e-14);
            for k in 0..3 {
                let m1: f64 = nodes.iter().map(|(p, w)| w * p[k]).sum();
                let m2: f64 = nodes.iter().map(|(p, w)| w * p[k] * p[k]).sum();
                assert!(m1.abs() < 1e-15);
                assert!((m2 - 1.0 / 3.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn order_floor() {
        let f = |_: &[f64]| ExtReal::ZERO;
        assert!(sphere_mean(&f, &[0.0, 0.0], 1.0, 7).is_err());
    }

    #[test]
    fn harmonic_mean_value() {
        let sq = HarmonicSpec::PlanarPower { m: 2, part: Part::Re };
        let m = sphere_mean(&sq, &[0.0, 0.0], 0.5, 16).unwrap().finite().unwrap();
        assert!(m.abs() < 1e-10);
        let cube = HarmonicSpec::PlanarPower { m: 5, part: Part::Im };
        for q in [64, 128] {
            let x = [0.2, -0.1];
            let m = sphere_mean(&cube, &x, 0.3, q).unwrap().finite().unwrap();
            assert!((m - cube.eval(&x).unwrap()).abs() < 1e-8);
        }
        let lin = HarmonicSpec::Sum {
            terms: vec![
                HarmonicSpec::Linear { coefficients: vec![1.0, -2.0, 0.5] },
                HarmonicSpec::Constant { value: 0.25 },
            ],
        };
        let x = [0.1, 0.7, -0.3];
        for q in [64, 100, 1000] {
            let m = sphere_mean(&lin, &x, 0.9, q).unwrap().finite().unwrap();
            assert!((m - lin.eval(&x).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn single_atom_submean() {
        let rf = RieszFunction::new(Dimension::PLANE, vec![(Point::origin(2), 2.0 * PI)], HarmonicSpec::zero(), 1.0)
            .unwrap();
        let x = [0.3, 0.0];
        let m = sphere_mean(&rf, &x, 0.1, 64).unwrap().finite().unwrap();
        assert!(m >= rf.eval(&x).unwrap().finite().unwrap() - 1e-8);
        // radius 0.5 encloses the atom: mean is -log(0.5) * -1 = log 0.5
        let rep = submean_check(&rf, &x, &[0.1, 0.5], 64).unwrap();
        assert!(rep.pass);
        let enclosing = rep.entries[1].margin.finite().unwrap();
        assert!((enclosing - ((0.5f64).ln() - (0.3f64).ln())).abs() < 1e-6);
        assert!(enclosing > 0.1);
    }

    #[test]
    fn harmonic_submean_equality() {
        let rf = RieszFunction::harmonic_only(
            Dimension::SPACE,
            HarmonicSpec::Linear { coefficients: vec![1.0, 2.0, 3.0] },
            2.0,
        )
        .unwrap();
        let rep = submean_check(&rf, &[0.1, 0.2, 0.3], &[0.1, 0.5, 1.0], 64).unwrap();
        assert!(rep.pass);
        for e in &rep.entries {
            assert!(e.margin.finite().unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn negative_mass_fails() {
        let rf = RieszFunction::new_unchecked(
            Dimension::PLANE,
            vec![(Point::from([0.1, 0.0]), -1.0)],
            HarmonicSpec::zero(),
            1.0,
        );
        let rep = submean_check(&rf, &[0.0, 0.0], &[0.2, 0.3], 64).unwrap();
        assert!(!rep.pass);
    }

    #[test]
    fn atom_at_centre_is_vacuous() {
        let rf =
            RieszFunction::new(Dimension::SPACE, vec![(Point::origin(3), 1.0)], HarmonicSpec::zero(), 1.0).unwrap();
        let rep = submean_check(&rf, &[0.0, 0.0, 0.0], &[0.2], 64).unwrap();
        assert!(rep.pass && rep.vacuous);
    }

    #[test]
    fn sphere_must_stay_in_domain() {
        let rf = RieszFunction::harmonic_only(Dimension::PLANE, HarmonicSpec::zero(), 1.0).unwrap();
        assert!(sphere_mean(&rf, &[0.5, 0.0], 0.6, 64).is_err());
    }
}
