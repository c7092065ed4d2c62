//! Fixed scenarios used by the test suites, the benches and `mvlab`.
//!
//! Every scenario is a deterministic construction; nothing here samples
//! randomly.

use crate::admissible::{gauge_scale, GaugeFunction};
use crate::counterexample::{CounterexampleConfig, Which};
use crate::error::Result;
use crate::field::FunctionSpec;
use crate::kernel::Dimension;
use crate::meanvalue::{EpsSchedule, ProofBoundConfig};
use crate::measure::{cantor_ad_set, sample_hypersurface, segment_measure, DiscreteMeasure, SurfaceSpec};
use crate::point::Point;
use crate::potential::{HarmonicSpec, Part, RieszFunction};

/// Measure, function and base point for a convergence study.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub measure: DiscreteMeasure,
    pub function: RieszFunction,
    pub x0: Point,
    pub schedule: EpsSchedule,
}

fn p(c: &[f64]) -> Point {
    Point::new(c.to_vec())
}

/// `x^2 - y^2` over the segment `[-1, 1] x {0}`.
pub fn segment(atoms: usize) -> Result<Scenario> {
    Ok(Scenario {
        measure: segment_measure(Dimension::PLANE, -1.0, 1.0, atoms)?,
        function: RieszFunction::harmonic_only(
            Dimension::PLANE,
            HarmonicSpec::PlanarPower { m: 2, part: Part::Re },
            2.0,
        )?,
        x0: p(&[0.0, 0.0]),
        schedule: EpsSchedule::new(0.4, 0.5, 8)?,
    })
}

/// Three Riesz atoms, two inside and one outside the unit sphere of R^3,
/// plus a linear part; studied at a point of the sphere.
pub fn sphere(resolution: usize) -> Result<Scenario> {
    let dim = Dimension::SPACE;
    let measure = sample_hypersurface(&SurfaceSpec::sphere(dim, Point::origin(3), 1.0), resolution)?;
    let function = RieszFunction::new(
        dim,
        vec![(p(&[0.3, -0.2, 0.1]), 1.0), (p(&[-0.1, 0.4, -0.3]), 0.5), (p(&[1.2, 1.1, 0.4]), 2.0)],
        HarmonicSpec::Linear { coefficients: vec![0.5, -0.25, 0.125] },
        3.0,
    )?;
    let r = 1.0 / 3f64.sqrt();
    Ok(Scenario { measure, function, x0: p(&[-r, -r, r]), schedule: EpsSchedule::new(0.8, 0.8, 8)? })
}

/// Four-corner Cantor set of dimension 1 in the plane, studied at the
/// corner `(0, 0)`.
pub fn cantor(level: u32) -> Result<Scenario> {
    let dim = Dimension::PLANE;
    let function = RieszFunction::new(
        dim,
        vec![(p(&[0.5, 0.5]), 1.0), (p(&[1.5, -0.5]), 0.5)],
        HarmonicSpec::Linear { coefficients: vec![0.3, -0.2] },
        4.0,
    )?;
    Ok(Scenario {
        measure: cantor_ad_set(Dimension::PLANE, 1.0, level)?,
        function,
        x0: p(&[0.0, 0.0]),
        schedule: EpsSchedule::new(0.25, 0.25, 4)?,
    })
}

/// Riesz atom at the base point of a plane patch in R^3: the means
/// diverge to `-inf`.
pub fn singular_flat(resolution: usize) -> Result<Scenario> {
    let dim = Dimension::SPACE;
    let spec = SurfaceSpec::flat(dim, Point::origin(3), vec![p(&[1.0, 0.0, 0.0]), p(&[0.0, 1.0, 0.0])], 0.45);
    let function =
        RieszFunction::new(dim, vec![(Point::origin(3), 4.0 * std::f64::consts::PI)], HarmonicSpec::zero(), 2.0)?;
    Ok(Scenario {
        measure: sample_hypersurface(&spec, resolution)?,
        function,
        x0: Point::origin(3),
        schedule: EpsSchedule::new(0.4, 0.5, 6)?,
    })
}

/// Data for the proof-bound checks.
#[derive(Debug, Clone)]
pub struct ProofScenario {
    pub measure: DiscreteMeasure,
    pub x0: Point,
    pub config: ProofBoundConfig,
    pub gauge: GaugeFunction,
    pub w_samples: Vec<Point>,
    pub eps_samples: Vec<f64>,
}

/// `n_eps` radii from `hi` down to `lo`, geometric.
fn geometric(hi: f64, lo: f64, count: usize) -> Vec<f64> {
    let q = (lo / hi).powf(1.0 / (count as f64 - 1.0));
    (0..count).map(|j| if j + 1 == count { lo } else { hi * q.powi(j as i32) }).collect()
}

/// `count` sample points around the origin of the plane at distances
/// from `d_min` to `d_max`, none of them on the first axis.
fn w_grid(d_min: f64, d_max: f64, count: usize) -> Vec<Point> {
    geometric(d_max, d_min, count)
        .into_iter()
        .enumerate()
        .map(|(j, d)| {
            let angle = 0.3 + 2.0 * std::f64::consts::PI * j as f64 / count as f64;
            p(&[d * angle.cos(), d * angle.sin()])
        })
        .collect()
}

/// `[-1, 1] x {0}` in the plane with gauge `2 r`: the interior mass of
/// `B(0, eps)` is exactly `2 eps` up to one cell.
pub fn proof_segment(grid: usize) -> Result<ProofScenario> {
    let measure = segment_measure(Dimension::PLANE, -1.0, 1.0, 200_000)?;
    Ok(ProofScenario {
        measure,
        x0: p(&[0.0, 0.0]),
        config: ProofBoundConfig::new(2.0, 1.5, 0.9, 1.1, 9.0, 0.05)?,
        gauge: gauge_scale(&GaugeFunction::power(1.0), 2.0)?,
        w_samples: w_grid(5e-4, 0.9, grid),
        eps_samples: geometric(0.05, 1e-3, grid),
    })
}

/// One unit atom at distance `eps_min / 2` from the base point, with gauge
/// `r`; the upper constant is `1 / eps_min`.
pub fn proof_single_atom(grid: usize) -> Result<ProofScenario> {
    let eps_min = 1e-3;
    let measure = DiscreteMeasure::new(Dimension::PLANE, "single atom", vec![(p(&[0.5 * eps_min, 0.0]), 1.0)])?;
    Ok(ProofScenario {
        measure,
        x0: p(&[0.0, 0.0]),
        config: ProofBoundConfig::new(2.0, 1.5, 1.0, 1.0 / eps_min, 9.0, 0.05)?,
        gauge: GaugeFunction::power(1.0),
        w_samples: w_grid(2e-4, 0.9, grid),
        eps_samples: geometric(0.05, eps_min, grid),
    })
}

/// Data for a comparison check; `null_points` are the zero-weight atoms
/// that make up the exceptional set.
#[derive(Debug, Clone)]
pub struct ComparisonScenario {
    pub measure: DiscreteMeasure,
    pub u: FunctionSpec,
    pub v: FunctionSpec,
    pub null_points: Vec<Point>,
    pub check_points: Vec<Point>,
    pub schedule: EpsSchedule,
    pub tol: f64,
}

impl ComparisonScenario {
    pub fn in_null_set(&self, x: &[f64]) -> bool {
        self.null_points.iter().any(|q| q.as_slice() == x)
    }
}

/// Unit circle; `v` is subharmonic with Riesz atoms off the circle and
/// `u = v + |x - x*|^2` touches it only at the zero-weight atom `x*`.
pub fn circle_comparison(resolution: usize) -> Result<ComparisonScenario> {
    let dim = Dimension::PLANE;
    let circle = sample_hypersurface(&SurfaceSpec::sphere(dim, Point::origin(2), 1.0), resolution)?;
    let star = p(&[1f64.cos(), 1f64.sin()]);
    let measure = circle.with_atoms(vec![(star.clone(), 0.0)])?;
    let v = RieszFunction::new(
        dim,
        vec![(p(&[0.3, 0.1]), 2.0), (p(&[1.5, 0.4]), 1.0), (p(&[-0.2, -1.6]), 0.5)],
        HarmonicSpec::Linear { coefficients: vec![0.4, -0.3] },
        3.0,
    )?;
    let v = FunctionSpec::Riesz(v);
    let u = FunctionSpec::bump(v.clone(), star.clone(), 1.0);
    let mut check_points = vec![star.clone()];
    for j in 0..9 {
        let t = 1.0 + 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / 9.0;
        check_points.push(p(&[t.cos(), t.sin()]));
    }
    Ok(ComparisonScenario {
        measure,
        u,
        v,
        null_points: vec![star],
        check_points,
        schedule: EpsSchedule::new(0.2, 0.5, 5)?,
        tol: 1e-3,
    })
}

/// The co-dimension-2 construction: `u = v~ = -2`, `v = u~`, over the
/// line through the origin of R^3 where the truncated series is clamped,
/// `1/N <= |s| <= 0.5`, plus a zero-weight atom at the origin.
pub fn codim2_comparison(n_terms: u32, atoms: usize) -> Result<ComparisonScenario> {
    let cfg = CounterexampleConfig::new(n_terms)?;
    let inner = 1.0 / n_terms as f64;
    let line = segment_measure(Dimension::SPACE, -0.5, 0.5, atoms)?.restrict(|x| x[0].abs() >= inner)?;
    let measure = line.with_atoms(vec![(Point::origin(3), 0.0)])?;
    let schedule = EpsSchedule::new(0.4, 0.5, 4)?;
    Ok(ComparisonScenario {
        measure,
        u: FunctionSpec::counterexample(cfg, Which::VTilde),
        v: FunctionSpec::counterexample(cfg, Which::UTilde),
        null_points: vec![Point::origin(3)],
        check_points: vec![Point::origin(3)],
        schedule,
        tol: 1e-9,
    })
}

/// Riesz functions covered by the sub-mean certification, each with a
/// radius `r` such that every ball `B(x, 5 r)` with `|x| <= r` lies in its
/// domain.
pub fn riesz_functions() -> Result<Vec<(RieszFunction, f64)>> {
    let mut out = Vec::new();
    for sc in [segment(1000)?, cantor(2)?] {
        out.push((sc.function, 0.15));
    }
    out.push((sphere(16)?.function, 0.15));
    out.push((singular_flat(8)?.function, 0.1));
    if let FunctionSpec::Riesz(v) = circle_comparison(16)?.v {
        out.push((v, 0.1));
    }
    out.push((
        RieszFunction::new(
            Dimension::PLANE,
            vec![(p(&[0.05, 0.0]), 1.0), (p(&[0.0, -0.1]), 3.0), (p(&[0.2, 0.2]), 0.25)],
            HarmonicSpec::Sum {
                terms: vec![HarmonicSpec::Constant { value: 1.0 }, HarmonicSpec::PlanarPower { m: 3, part: Part::Im }],
            },
            2.0,
        )?,
        0.15,
    ));
    Ok(out)
}

/// The eight gauges whose two admissibility tests must agree.
pub fn gauges(n: Dimension) -> Result<Vec<GaugeFunction>> {
    let n = n.get() as f64;
    let table_r: Vec<f64> = (0..=160).map(|j| 10f64.powf(-14.0 + 0.1 * j as f64)).collect();
    let table_h = table_r.iter().map(|r| r.powf(n - 0.5)).collect();
    Ok(vec![
        GaugeFunction::power(n - 1.5),
        GaugeFunction::power(n - 1.0),
        GaugeFunction::power(n),
        GaugeFunction::power(n - 2.0),
        GaugeFunction::power_log(n - 1.0),
        GaugeFunction::power_log(n - 0.5),
        gauge_scale(&GaugeFunction::power(n - 1.0), 3.0)?,
        GaugeFunction::table(table_r, table_h)?,
    ])
}
