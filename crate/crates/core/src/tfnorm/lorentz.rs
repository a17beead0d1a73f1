use crate::error::{Error, Result};

use super::index::Exponent;

/// Lorentz quasi-norm `‖f‖*_{pq}` of a step function: `values[k]` on a cell
/// of measure `weights[k]`.
///
/// The rearrangement is assembled from the sorted samples, and the integral
/// `(q/p) ∫ [t^{1/p} f*(t)]^q dt/t` is evaluated exactly on each step as
/// `f_k^q (t_k^{q/p} - t_{k-1}^{q/p})`.
pub fn lorentz_norm(values: &[f64], weights: &[f64], p: Exponent, q: Exponent) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Domain("Lorentz norm of an empty sample set".into()));
    }
    if values.len() != weights.len() {
        return Err(Error::Dimension(format!(
            "{} values but {} weights",
            values.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::Domain("cell weights must be positive".into()));
    }
    if p.is_infinite() && !q.is_infinite() {
        return Err(Error::Domain("L^{∞,q} is only defined here for q = ∞".into()));
    }
    let mut cells: Vec<(f64, f64)> = values.iter().map(|v| v.abs()).zip(weights.iter().copied()).collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));

    let inv_p = p.inv_f64();
    let mut t = 0.0;
    if q.is_infinite() {
        let mut sup = 0.0_f64;
        for (v, w) in cells {
            t += w;
            sup = sup.max(v * t.powf(inv_p));
        }
        return Ok(sup);
    }
    let qv = q.to_f64();
    let ratio = qv * inv_p;
    let mut terms = Vec::with_capacity(cells.len());
    let mut prev = 0.0;
    for (v, w) in cells {
        t += w;
        let next = t.powf(ratio);
        terms.push(v.powf(qv) * (next - prev));
        prev = next;
    }
    Ok(crate::parallel::pairwise_sum(&terms).powf(1.0 / qv))
}
