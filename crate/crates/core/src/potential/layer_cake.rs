use crate::error::{invalid, Result};
use crate::field::Field;
use crate::measure::DiscreteMeasure;
use crate::numeric::CompensatedSum;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LayerCake {
    /// `sum_i w_i f(p_i)`
    pub lhs: f64,
    /// `int_0^inf mu({f >= t}) dt`
    pub rhs: f64,
    pub gap: f64,
}

impl LayerCake {
    pub fn relative_gap(&self) -> f64 {
        if self.lhs == 0.0 {
            self.gap
        } else {
            self.gap / self.lhs.abs()
        }
    }
}

/// Exact value of `int_0^inf mu({f >= t}) dt` for an atomic measure.
///
/// The super-level mass is piecewise constant in `t`, dropping at each
/// distinct atom value, so the integral is `sum_j (v_j - v_{j-1}) S_j` over
/// the sorted values with `S_j` the mass of atoms with value `>= v_j`.
pub fn layer_cake_rhs(values: &[f64], weights: &[f64]) -> Result<f64> {
    if values.len() != weights.len() {
        return Err(invalid("values and weights differ in length"));
    }
    if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(invalid(format!("layer-cake integrand must be finite and >= 0, got {v}")));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    // suffix[j] = mass of atoms order[j..]
    let mut suffix = vec![0.0; order.len() + 1];
    let mut acc = CompensatedSum::new();
    for j in (0..order.len()).rev() {
        acc.add(weights[order[j]]);
        suffix[j] = acc.value();
    }
    let mut total = CompensatedSum::new();
    let mut prev = 0.0;
    for (j, &i) in order.iter().enumerate() {
        let v = values[i];
        if v > prev {
            total.add((v - prev) * suffix[j]);
            prev = v;
        }
    }
    Ok(total.value())
}

/// Both sides of the layer-cake formula for `f` against `mu`.
pub fn verify_layer_cake<F: Field + ?Sized>(f: &F, mu: &DiscreteMeasure) -> Result<LayerCake> {
    let mut values = Vec::with_capacity(mu.len());
    let mut weights = Vec::with_capacity(mu.len());
    for (p, w) in mu.atoms() {
        let v = f.value(p)?;
        match v.finite() {
            Some(x) if x >= 0.0 => values.push(x),
            _ => return Err(invalid(format!("layer-cake integrand is {v} at {p:?}; it must be finite and >= 0"))),
        }
        weights.push(w);
    }
    let lhs = values.iter().zip(&weights).map(|(v, w)| v * w).collect::<CompensatedSum>().value();
    let rhs = layer_cake_rhs(&values, &weights)?;
    Ok(LayerCake { lhs, rhs, gap: (lhs - rhs).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ext::ExtReal;
    use crate::kernel::Dimension;
    use crate::point::Point;

    #[test]
    fn two_atoms() {
        let mu = DiscreteMeasure::new(
            Dimension::PLANE,
            "ab",
            vec![(Point::from([0.0, 0.0]), 1.0), (Point::from([1.0, 0.0]), 2.0)],
        )
        .unwrap();
        let f = |p: &[f64]| ExtReal::Finite(if p[0] == 0.0 { 1.0 } else { 3.0 });
        let lc = verify_layer_cake(&f, &mu).unwrap();
        assert_eq!((lc.lhs, lc.rhs, lc.gap), (7.0, 7.0, 0.0));

        let zero = |_: &[f64]| ExtReal::ZERO;
        let lc = verify_layer_cake(&zero, &mu).unwrap();
        assert_eq!((lc.lhs, lc.rhs, lc.gap), (0.0, 0.0, 0.0));

        let neg = |p: &[f64]| ExtReal::Finite(-p[0]);
        assert!(verify_layer_cake(&neg, &mu).is_err());
    }

    #[test]
    fn ties_and_zero_values() {
        let rhs = layer_cake_rhs(&[0.0, 2.0, 2.0, 5.0], &[1.0, 0.5, 0.25, 1.0]).unwrap();
        assert_eq!(rhs, 2.0 * 0.5 + 2.0 * 0.25 + 5.0);
    }
}
