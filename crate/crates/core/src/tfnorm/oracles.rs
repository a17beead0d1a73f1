//! Closed forms for Gaussians and chirps.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{complex_det, inverse, is_symmetric, Mat};

use super::index::IndexPair;

/// `V_φ φ_A(x, ξ)` for `φ_A(t) = e^{-π|At|²}` and window `φ(t) = e^{-π|t|²}`:
/// with `M = AᵀA + I`,
/// `det(M)^{-1/2} e^{-π(I - M⁻¹)x·x} e^{-2πi (M⁻¹x)·ξ} e^{-π M⁻¹ξ·ξ}`.
pub fn gaussian_stft_oracle(a: &Mat, x: &[f64], xi: &[f64]) -> Result<Complex64> {
    let d = a.nrows();
    if a.ncols() != d || x.len() != d || xi.len() != d {
        return Err(Error::Dimension("A, x and ξ must share the dimension".into()));
    }
    let m = a.transpose() * a + Mat::identity(d, d);
    let m_inv = inverse(&m, "AᵀA + I")?;
    let quad = |u: &[f64], v: &[f64]| crate::matrix::bilinear(&m_inv, u, v);
    let xx: f64 = x.iter().map(|v| v * v).sum::<f64>() - quad(x, x);
    let amplitude = m.determinant().powf(-0.5) * (-PI * xx).exp() * (-PI * quad(xi, xi)).exp();
    Ok(Complex64::from_polar(amplitude, -2.0 * PI * quad(x, xi)))
}

/// `p^{-d/(2p)} q^{-d/(2q)} |det A|^{-1/p} det(AᵀA + I)^{-(1 - 1/q - 1/p)/2}`,
/// with `p^{-d/(2p)} = 1` at `p = ∞`.
pub fn dilated_gaussian_mod_norm_oracle(a: &Mat, idx: IndexPair) -> Result<f64> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::Dimension("A must be square".into()));
    }
    let det_a = a.determinant();
    if det_a == 0.0 || !det_a.is_finite() {
        return Err(Error::Singular(format!("A has determinant {det_a}")));
    }
    let ip = idx.p.inv_f64();
    let iq = idx.q.inv_f64();
    // p^{-d/(2p)} = exp((d/2)(1/p) ln(1/p)), continuous at 1/p = 0.
    let factor = |inv: f64| {
        if inv == 0.0 {
            1.0
        } else {
            (0.5 * d as f64 * inv * inv.ln()).exp()
        }
    };
    let m = a.transpose() * a + Mat::identity(d, d);
    Ok(factor(ip) * factor(iq) * det_a.abs().powf(-ip) * m.determinant().powf(-(1.0 - iq - ip) / 2.0))
}

/// `|det(I + iR)|^{1/2}`, the `W(FL¹, L^∞)` norm of `e^{-πiRt·t}`.
pub fn chirp_wiener_norm_oracle(r: &Mat) -> Result<f64> {
    if !is_symmetric(r, 1e-12) {
        return Err(Error::Contract("R must be symmetric".into()));
    }
    let d = r.nrows();
    Ok(complex_det(&Mat::identity(d, d), r).norm().sqrt())
}
