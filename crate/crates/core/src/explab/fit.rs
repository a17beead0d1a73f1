use crate::error::{Error, Result};

/// Least-squares line through `(ln param, ln value)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    /// `ln` of the empirical constant.
    pub intercept: f64,
    pub r_squared: f64,
    /// `ln value - (intercept + slope ln param)` for every input point.
    pub residuals: Vec<f64>,
}

/// Fits `value ≈ e^{intercept} param^{slope}` over the points whose parameter
/// lies in `window` (all points when `None`).
pub fn fit_power_law(points: &[(f64, f64)], window: Option<(f64, f64)>) -> Result<FitResult> {
    if let Some((x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::Domain(format!(
            "power-law fit needs positive data, got ({x}, {y})"
        )));
    }
    let inside = |x: f64| window.is_none_or(|(lo, hi)| x >= lo && x <= hi);
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, _)| inside(*x))
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 3 {
        return Err(Error::Domain(format!(
            "power-law fit needs at least 3 points in the window, got {}",
            logs.len()
        )));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("power-law fit needs distinct parameters".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = logs.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let residuals = points
        .iter()
        .map(|(x, y)| y.ln() - intercept - slope * x.ln())
        .collect();
    Ok(FitResult {
        slope,
        intercept,
        r_squared: r_squared.clamp(0.0, 1.0),
        residuals,
    })
}
