//! Finite weighted atom clouds standing in for surface measures, natural
//! measures on self-similar sets and their restrictions.
//!
//! Balls are open everywhere: `B(x, eps) = { y : |y - x| < eps }`.
//!
//! Every measure carries a `min_radius`, the smallest radius at which its
//! ball masses are trustworthy (atom spacing times [`SAFETY_FACTOR`]).
//! Density and regularity checks refuse radii below it.

mod cantor;
mod density;
mod surface;

pub use cantor::cantor_ad_set;
pub use density::{ad_regularity_check, densities, densities_with_tail, AdReport, DensityEstimate};
pub use surface::{sample_hypersurface, HeightFn, SurfaceKind, SurfaceSpec};

use crate::error::{check_dim, invalid, Error, Result};
use crate::kernel::Dimension;
use crate::numeric::CompensatedSum;
use crate::point::Point;
use serde::{Deserialize, Serialize};

/// Multiplier applied to the atom spacing to obtain the validity radius.
pub const SAFETY_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MeasureDoc", into = "MeasureDoc")]
pub struct DiscreteMeasure {
    dim: Dimension,
    label: String,
    /// Row-major coordinates, `dim` per atom.
    coords: Vec<f64>,
    weights: Vec<f64>,
    min_radius: f64,
    /// Atom indices sorted by first coordinate; ball queries binary-search it.
    order: Vec<u32>,
    keys: Vec<f64>,
}

impl DiscreteMeasure {
    /// Builds a measure from `(point, weight)` pairs.
    pub fn new(dim: Dimension, label: impl Into<String>, atoms: Vec<(Point, f64)>) -> Result<Self> {
        let mut coords = Vec::with_capacity(atoms.len() * dim.get());
        let mut weights = Vec::with_capacity(atoms.len());
        for (p, w) in atoms {
            check_dim(dim.get(), p.dim())?;
            coords.extend_from_slice(p.as_slice());
            weights.push(w);
        }
        Self::from_raw(dim, label.into(), coords, weights, 0.0)
    }

    pub(crate) fn from_raw(
        dim: Dimension,
        label: String,
        coords: Vec<f64>,
        weights: Vec<f64>,
        min_radius: f64,
    ) -> Result<Self> {
        let n = dim.get();
        if coords.len() != weights.len() * n {
            return Err(invalid("coordinate buffer does not match atom count"));
        }
        if weights.len() > u32::MAX as usize {
            return Err(invalid("too many atoms"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(invalid(format!("atom weights must be finite and >= 0, got {w}")));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid("atom coordinates must be finite"));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(invalid("total mass must be positive"));
        }
        if !(min_radius >= 0.0) {
            return Err(invalid("min_radius must be >= 0"));
        }
        let mut order: Vec<u32> = (0..weights.len() as u32).collect();
        order.sort_by(|&a, &b| coords[a as usize * n].total_cmp(&coords[b as usize * n]).then(a.cmp(&b)));
        let keys = order.iter().map(|&i| coords[i as usize * n]).collect();
        Ok(DiscreteMeasure { dim, label, coords, weights, min_radius, order, keys })
    }

    /// The same measure with extra atoms appended; resolution is kept.
    pub fn with_atoms(&self, atoms: Vec<(Point, f64)>) -> Result<Self> {
        let mut coords = self.coords.clone();
        let mut weights = self.weights.clone();
        for (p, w) in atoms {
            check_dim(self.dim.get(), p.dim())?;
            coords.extend_from_slice(p.as_slice());
            weights.push(w);
        }
        Self::from_raw(self.dim, self.label.clone(), coords, weights, self.min_radius)
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let n = self.dim.get();
        &self.coords[i * n..(i + 1) * n]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.coords.chunks_exact(self.dim.get()).zip(self.weights.iter().copied())
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().copied().collect::<CompensatedSum>().value()
    }

    /// Smallest radius at which ball masses are considered resolved.
    pub fn min_radius(&self) -> f64 {
        self.min_radius
    }

    pub fn with_min_radius(mut self, r: f64) -> Self {
        self.min_radius = r.max(0.0);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Indices of atoms in the open ball `B(center, eps)`, in a fixed order.
    pub fn ball_indices<'a>(&'a self, center: &'a [f64], eps: f64) -> impl Iterator<Item = usize> + 'a {
        let lo = self.keys.partition_point(|&k| k < center[0] - eps);
        let hi = self.keys.partition_point(|&k| k <= center[0] + eps);
        self.order[lo..hi]
            .iter()
            .map(|&i| i as usize)
            .filter(move |&i| crate::numeric::dist(self.point(i), center) < eps)
    }

    /// `(point, weight)` for atoms in `B(center, eps)`.
    pub fn ball_atoms<'a>(&'a self, center: &'a [f64], eps: f64) -> impl Iterator<Item = (&'a [f64], f64)> + 'a {
        self.ball_indices(center, eps).map(move |i| (self.point(i), self.weights[i]))
    }

    pub fn ball_mass(&self, center: &[f64], eps: f64) -> Result<f64> {
        check_dim(self.dim.get(), center.len())?;
        if !(eps > 0.0) {
            return Err(invalid(format!("ball radius must be positive, got {eps}")));
        }
        Ok(self.ball_atoms(center, eps).map(|(_, w)| w).collect::<CompensatedSum>().value())
    }

    /// Number of atoms with positive weight in the ball.
    pub fn ball_count(&self, center: &[f64], eps: f64) -> usize {
        self.ball_atoms(center, eps).filter(|(_, w)| *w > 0.0).count()
    }

    /// The restriction `mu_K(E) = mu(K n E)` for `K = { member }`.
    pub fn restrict<F>(&self, member: F) -> Result<DiscreteMeasure>
    where
        F: Fn(&[f64]) -> bool,
    {
        let mut coords = Vec::new();
        let mut weights = Vec::new();
        for (p, w) in self.atoms() {
            if member(p) {
                coords.extend_from_slice(p);
                weights.push(w);
            }
        }
        if weights.is_empty() || !(weights.iter().sum::<f64>() > 0.0) {
            return Err(Error::EmptyRestriction);
        }
        Self::from_raw(self.dim, format!("{} restricted", self.label), coords, weights, self.min_radius)
    }

    /// Diameter of the atom cloud. Exact for up to 4096 atoms, the
    /// bounding-box diagonal (an upper bound) beyond that.
    pub fn diameter(&self) -> f64 {
        if self.len() <= 4096 {
            let mut d: f64 = 0.0;
            for i in 0..self.len() {
                for j in i + 1..self.len() {
                    d = d.max(crate::numeric::dist(self.point(i), self.point(j)));
                }
            }
            return d;
        }
        let n = self.dim.get();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for (p, _) in self.atoms() {
            for k in 0..n {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        crate::numeric::dist(&lo, &hi)
    }

    pub fn to_json(&self) -> Result<String> {
        crate::report::to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Wire format: `{"dim": n, "label": text, "atoms": [{"p": [...], "w": w}, ...]}`
/// plus an optional `min_radius`.
#[derive(Serialize, Deserialize)]
struct MeasureDoc {
    dim: Dimension,
    label: String,
    atoms: Vec<AtomDoc>,
    #[serde(default, skip_serializing_if = "is_zero")]
    min_radius: f64,
}

#[derive(Serialize, Deserialize)]
struct AtomDoc {
    p: Vec<f64>,
    w: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl TryFrom<MeasureDoc> for DiscreteMeasure {
    type Error = Error;

    fn try_from(doc: MeasureDoc) -> Result<Self> {
        let n = doc.dim.get();
        let mut coords = Vec::with_capacity(doc.atoms.len() * n);
        let mut weights = Vec::with_capacity(doc.atoms.len());
        for a in doc.atoms {
            check_dim(n, a.p.len())?;
            coords.extend(a.p);
            weights.push(a.w);
        }
        DiscreteMeasure::from_raw(doc.dim, doc.label, coords, weights, doc.min_radius)
    }
}

impl From<DiscreteMeasure> for MeasureDoc {
    fn from(m: DiscreteMeasure) -> Self {
        let atoms = m.atoms().map(|(p, w)| AtomDoc { p: p.to_vec(), w }).collect();
        MeasureDoc { dim: m.dim, label: m.label, atoms, min_radius: m.min_radius }
    }
}

/// Uniform cell-centred discretisation of the segment `[a, b]` on the first
/// axis of R^n, with total mass `b - a`.
pub fn segment_measure(dim: Dimension, a: f64, b: f64, atoms: usize) -> Result<DiscreteMeasure> {
    if !(b > a) || atoms < 2 {
        return Err(invalid("segment needs b > a and at least 2 atoms"));
    }
    let n = dim.get();
    let h = (b - a) / atoms as f64;
    let mut coords = vec![0.0; atoms * n];
    for i in 0..atoms {
        coords[i * n] = a + (i as f64 + 0.5) * h;
    }
    DiscreteMeasure::from_raw(
        dim,
        format!("segment [{a}, {b}] x 0, {atoms} atoms"),
        coords,
        vec![h; atoms],
        SAFETY_FACTOR * h,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn plane() -> Dimension {
        Dimension::PLANE
    }

    fn pair() -> DiscreteMeasure {
        DiscreteMeasure::new(plane(), "pair", vec![(Point::from([-0.5, 0.0]), 1.0), (Point::from([0.5, 0.0]), 1.0)])
            .unwrap()
    }

    #[test]
    fn ball_mass_open_ball() {
        let mu = pair();
        assert_eq!(mu.ball_mass(&[0.0, 0.0], 0.6).unwrap(), 2.0);
        assert_eq!(mu.ball_mass(&[0.0, 0.0], 0.5).unwrap(), 0.0);
        assert!(mu.ball_mass(&[0.0, 0.0, 0.0], 0.5).is_err());
        assert!(mu.ball_mass(&[0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn ball_mass_on_segment() {
        let mu = segment_measure(plane(), -1.0, 1.0, 10_000).unwrap();
        assert!((mu.total_mass() - 2.0).abs() < 1e-12);
        let m = mu.ball_mass(&[0.0, 0.0], 0.25).unwrap();
        assert!((m - 0.5).abs() <= 2.0 * (2.0 / 1e4));
    }

    #[test]
    fn invariants_rejected() {
        assert!(DiscreteMeasure::new(plane(), "neg", vec![(Point::from([0.0, 0.0]), -1.0)]).is_err());
        assert!(DiscreteMeasure::new(plane(), "zero", vec![(Point::from([0.0, 0.0]), 0.0)]).is_err());
        assert!(DiscreteMeasure::new(plane(), "dim", vec![(Point::from([0.0]), 1.0)]).is_err());
        assert!(DiscreteMeasure::new(plane(), "empty", vec![]).is_err());
    }

    #[test]
    fn restrict_examples() {
        let mu = pair();
        let right = mu.restrict(|p| p[0] >= 0.0).unwrap();
        assert_eq!(right.len(), 1);
        assert_eq!(right.point(0), &[0.5, 0.0]);
        let all = mu.restrict(|_| true).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all.total_mass(), mu.total_mass());
        assert!(matches!(mu.restrict(|_| false), Err(Error::EmptyRestriction)));

        let seg = segment_measure(plane(), -1.0, 1.0, 10_000).unwrap();
        let half = seg.restrict(|p| p[0] >= 0.0).unwrap();
        let full = seg.ball_mass(&[0.0, 0.0], 0.5).unwrap();
        let one_sided = half.ball_mass(&[0.0, 0.0], 0.5).unwrap();
        assert!((one_sided - 0.5).abs() < 1e-9);
        assert!((full - 1.0).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let mu = DiscreteMeasure::new(
            plane(),
            "odd values",
            vec![(Point::from([0.1, 1.0 / 3.0]), std::f64::consts::PI), (Point::from([-1e-300, 2.0f64.sqrt()]), 1e-17)],
        )
        .unwrap();
        let text = mu.to_json().unwrap();
        assert!(text.contains("\"atoms\""));
        let back = DiscreteMeasure::from_json(&text).unwrap();
        for i in 0..mu.len() {
            assert_eq!(mu.point(i), back.point(i));
            assert_eq!(mu.weight(i).to_bits(), back.weight(i).to_bits());
        }
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn json_dimension_checked() {
        let bad = r#"{"dim": 2, "label": "x", "atoms": [{"p": [1.0], "w": 1.0}]}"#;
        assert!(DiscreteMeasure::from_json(bad).is_err());
    }

    fn cloud() -> impl Strategy<Value = Vec<(f64, f64, u32)>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, 0u32..64), 1..200)
    }

    proptest! {
        #[test]
        fn ball_mass_monotone(atoms in cloud(), cx in -1.0f64..1.0, e1 in 0.01f64..1.0, e2 in 0.01f64..1.0) {
            let pts = atoms.iter().map(|&(x, y, w)| (Point::from([x, y]), 1.0 + w as f64)).collect();
            let mu = DiscreteMeasure::new(plane(), "cloud", pts).unwrap();
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            prop_assert!(mu.ball_mass(&[cx, 0.0], lo).unwrap() <= mu.ball_mass(&[cx, 0.0], hi).unwrap());
        }

        // Dyadic weights make every partial sum exact.
        #[test]
        fn restriction_consistency(atoms in cloud(), cx in -1.0f64..1.0, eps in 0.01f64..2.0, cut in -1.0f64..1.0) {
            let pts = atoms.iter().map(|&(x, y, w)| (Point::from([x, y]), (1 + w) as f64 / 1024.0)).collect();
            let mu = DiscreteMeasure::new(plane(), "cloud", pts).unwrap();
            let full = mu.ball_mass(&[cx, 0.0], eps).unwrap();
            let part = |keep: bool| match mu.restrict(|p| (p[0] >= cut) == keep) {
                Ok(r) => r.ball_mass(&[cx, 0.0], eps).unwrap(),
                Err(_) => 0.0,
            };
            prop_assert_eq!(part(true) + part(false), full);
        }

        #[test]
        fn brute_force_ball_query(atoms in cloud(), cx in -1.0f64..1.0, cy in -1.0f64..1.0, eps in 0.01f64..2.0) {
            let pts: Vec<_> = atoms.iter().map(|&(x, y, w)| (Point::from([x, y]), (1 + w) as f64 / 4.0)).collect();
            let expected: f64 = pts.iter().filter(|(p, _)| p.distance(&[cx, cy]) < eps).map(|(_, w)| *w).sum();
            let mu = DiscreteMeasure::new(plane(), "cloud", pts).unwrap();
            prop_assert_eq!(mu.ball_mass(&[cx, cy], eps).unwrap(), expected);
        }
    }
}
