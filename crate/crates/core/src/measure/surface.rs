//! Hypersurface (and lower-dimensional flat) samplers producing atom
//! measures whose weights approximate the surface measure.

use super::{DiscreteMeasure, SAFETY_FACTOR};
use crate::error::{check_dim, invalid, Error, Result};
use crate::kernel::Dimension;
use crate::point::Point;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Height function of a graph patch, `R^(n-1) -> R`.
pub type HeightFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Atom budget for a single sampled surface.
const MAX_ATOMS: usize = 50_000_000;

#[derive(Clone)]
pub enum SurfaceKind {
    Sphere {
        center: Point,
        radius: f64,
    },
    /// `basepoint + sum u_i t_i` with `u` in `[-extent, extent]^k`. The frame
    /// holds `k` orthonormal vectors, `1 <= k <= n-1`; `k = n-1` is a
    /// hyperplane patch, smaller `k` gives flats of higher co-dimension.
    Flat {
        basepoint: Point,
        frame: Vec<Point>,
        extent: f64,
    },
    /// `{(t, f(t)) : t in box}` with `box = prod [lo_i, hi_i]` in R^(n-1).
    Graph {
        height: HeightFn,
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
}

impl fmt::Debug for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceKind::Sphere { center, radius } => {
                f.debug_struct("Sphere").field("center", center).field("radius", radius).finish()
            }
            SurfaceKind::Flat { basepoint, frame, extent } => f
                .debug_struct("Flat")
                .field("basepoint", basepoint)
                .field("frame", frame)
                .field("extent", extent)
                .finish(),
            SurfaceKind::Graph { lo, hi, .. } => {
                f.debug_struct("Graph").field("lo", lo).field("hi", hi).finish_non_exhaustive()
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SurfaceSpec {
    pub dim: Dimension,
    pub kind: SurfaceKind,
}

impl SurfaceSpec {
    pub fn sphere(dim: Dimension, center: Point, radius: f64) -> Self {
        SurfaceSpec { dim, kind: SurfaceKind::Sphere { center, radius } }
    }

    pub fn flat(dim: Dimension, basepoint: Point, frame: Vec<Point>, extent: f64) -> Self {
        SurfaceSpec { dim, kind: SurfaceKind::Flat { basepoint, frame, extent } }
    }

    pub fn graph(dim: Dimension, height: HeightFn, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        SurfaceSpec { dim, kind: SurfaceKind::Graph { height, lo, hi } }
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim.get();
        match &self.kind {
            SurfaceKind::Sphere { center, radius } => {
                check_dim(n, center.dim())?;
                if !(*radius > 0.0) {
                    return Err(invalid("sphere radius must be positive"));
                }
            }
            SurfaceKind::Flat { basepoint, frame, extent } => {
                check_dim(n, basepoint.dim())?;
                if frame.is_empty() || frame.len() >= n {
                    return Err(invalid(format!(
                        "flat frame needs between 1 and {} vectors, got {}",
                        n - 1,
                        frame.len()
                    )));
                }
                for (i, a) in frame.iter().enumerate() {
                    check_dim(n, a.dim())?;
                    for (j, b) in frame.iter().enumerate() {
                        let dot: f64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
                        let want = if i == j { 1.0 } else { 0.0 };
                        if (dot - want).abs() > 1e-12 {
                            return Err(invalid("tangent frame is not orthonormal"));
                        }
                    }
                }
                if !(*extent > 0.0) {
                    return Err(invalid("flat extent must be positive"));
                }
            }
            SurfaceKind::Graph { lo, hi, .. } => {
                check_dim(n - 1, lo.len())?;
                check_dim(n - 1, hi.len())?;
                if lo.iter().zip(hi).any(|(a, b)| !(b > a)) {
                    return Err(invalid("graph parameter box must have hi > lo on every axis"));
                }
            }
        }
        Ok(())
    }
}

fn grid_size(res: usize, k: usize) -> Result<usize> {
    let mut total: usize = 1;
    for _ in 0..k {
        total = total
            .checked_mul(res)
            .filter(|t| *t <= MAX_ATOMS)
            .ok_or_else(|| invalid(format!("resolution {res}^{k} exceeds the atom budget")))?;
    }
    Ok(total)
}

/// Cell-centre multi-index of grid cell `idx` in a `res^k` grid.
fn unrank(mut idx: usize, res: usize, out: &mut [usize]) {
    for slot in out.iter_mut() {
        *slot = idx % res;
        idx /= res;
    }
}

/// Samples the surface with `resolution` cells per parameter axis.
///
/// * Spheres in the plane: `resolution` equally spaced atoms, exact weights.
/// * Spheres in R^3: `resolution` polar bands, about `2 resolution sin(theta)`
///   atoms per band, midpoint-rule weights (total area error `O(resolution^-2)`).
/// * Flats: `resolution^k` cell centres, exact weights.
/// * Graphs: `resolution^(n-1)` cell centres, weights `dA * sqrt(1 + |grad f|^2)`
///   with the gradient by central differences.
pub fn sample_hypersurface(spec: &SurfaceSpec, resolution: usize) -> Result<DiscreteMeasure> {
    if resolution < 2 {
        return Err(invalid("resolution must be at least 2"));
    }
    spec.validate()?;
    let n = spec.dim.get();
    match &spec.kind {
        SurfaceKind::Sphere { center, radius } => match n {
            2 => Ok(circle(spec.dim, center, *radius, resolution)),
            3 => sphere3(spec.dim, center, *radius, resolution),
            _ => Err(Error::Unsupported(format!("sphere sampling is implemented for n = 2, 3 (got n = {n})"))),
        },
        SurfaceKind::Flat { basepoint, frame, extent } => {
            let k = frame.len();
            let count = grid_size(resolution, k)?;
            let h = 2.0 * extent / resolution as f64;
            let weight = h.powi(k as i32);
            let mut coords = Vec::with_capacity(count * n);
            let mut idx = vec![0usize; k];
            for cell in 0..count {
                unrank(cell, resolution, &mut idx);
                let mut p = basepoint.as_slice().to_vec();
                for (t, &i) in frame.iter().zip(&idx) {
                    let u = -extent + (i as f64 + 0.5) * h;
                    for (pc, tc) in p.iter_mut().zip(t.iter()) {
                        *pc += u * tc;
                    }
                }
                coords.extend(p);
            }
            DiscreteMeasure::from_raw(
                spec.dim,
                format!("{k}-flat patch, extent {extent}, {resolution} cells/axis"),
                coords,
                vec![weight; count],
                SAFETY_FACTOR * h,
            )
        }
        SurfaceKind::Graph { height, lo, hi } => {
            let k = n - 1;
            let count = grid_size(resolution, k)?;
            let steps: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a) / resolution as f64).collect();
            let cell: f64 = steps.iter().product();
            let mut coords = Vec::with_capacity(count * n);
            let mut weights = Vec::with_capacity(count);
            let mut idx = vec![0usize; k];
            let mut max_stretch: f64 = 1.0;
            for c in 0..count {
                unrank(c, resolution, &mut idx);
                let t: Vec<f64> = idx.iter().zip(lo).zip(&steps).map(|((&i, a), h)| a + (i as f64 + 0.5) * h).collect();
                let mut grad2 = 0.0;
                let mut probe = t.clone();
                for axis in 0..k {
                    let d = 1e-3 * steps[axis];
                    probe[axis] = t[axis] + d;
                    let up = height(&probe);
                    probe[axis] = t[axis] - d;
                    let down = height(&probe);
                    probe[axis] = t[axis];
                    let g = (up - down) / (2.0 * d);
                    grad2 += g * g;
                }
                let stretch = (1.0 + grad2).sqrt();
                max_stretch = max_stretch.max(stretch);
                coords.extend_from_slice(&t);
                coords.push(height(&t));
                weights.push(cell * stretch);
            }
            let spacing = steps.iter().cloned().fold(0.0, f64::max) * max_stretch;
            DiscreteMeasure::from_raw(
                spec.dim,
                format!("graph patch, {resolution} cells/axis"),
                coords,
                weights,
                SAFETY_FACTOR * spacing,
            )
        }
    }
}

fn circle(dim: Dimension, center: &Point, radius: f64, res: usize) -> DiscreteMeasure {
    let dt = 2.0 * PI / res as f64;
    let mut coords = Vec::with_capacity(2 * res);
    for j in 0..res {
        let t = (j as f64 + 0.5) * dt;
        coords.push(center[0] + radius * t.cos());
        coords.push(center[1] + radius * t.sin());
    }
    DiscreteMeasure::from_raw(
        dim,
        format!("circle r = {radius}, {res} atoms"),
        coords,
        vec![radius * dt; res],
        SAFETY_FACTOR * radius * dt,
    )
    .expect("circle sampling produces a valid measure")
}

fn sphere3(dim: Dimension, center: &Point, radius: f64, bands: usize) -> Result<DiscreteMeasure> {
    let dtheta = PI / bands as f64;
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    for i in 0..bands {
        let theta = (i as f64 + 0.5) * dtheta;
        let (st, ct) = theta.sin_cos();
        let per_band = ((2.0 * bands as f64 * st).round() as usize).max(3);
        let dphi = 2.0 * PI / per_band as f64;
        // Staggered bands avoid aligned meridians.
        let shift = if i % 2 == 0 { 0.5 } else { 0.0 };
        let w = radius * radius * st * dtheta * dphi;
        for j in 0..per_band {
            let phi = (j as f64 + shift) * dphi;
            let (sp, cp) = phi.sin_cos();
            coords.push(center[0] + radius * st * cp);
            coords.push(center[1] + radius * st * sp);
            coords.push(center[2] + radius * ct);
            weights.push(w);
        }
        if coords.len() / 3 > MAX_ATOMS {
            return Err(invalid("sphere resolution exceeds the atom budget"));
        }
    }
    DiscreteMeasure::from_raw(
        dim,
        format!("sphere r = {radius}, {bands} bands"),
        coords,
        weights,
        SAFETY_FACTOR * radius * dtheta,
    )
}
