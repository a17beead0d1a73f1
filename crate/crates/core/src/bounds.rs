//! Index functions `μ₁`, `μ₂`, their regions, and the norm-bound constants
//! for dilations, metaplectic operators and quadratic propagators.
//!
//! Universal constants hidden behind `≲` are taken to be 1.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::{complex_det, is_symmetric, max_abs, symmetric_eigenvalues, Mat};
use crate::metaplectic::{HamiltonianKind, EPS_T};
use crate::symplectic::SymplecticMatrix;
use crate::tfnorm::{Exponent, IndexPair, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RegionLabel {
    I1,
    I1Star,
    I2,
    I2Star,
    I3,
    I3Star,
}

impl RegionLabel {
    pub const ALL: [RegionLabel; 6] = [
        RegionLabel::I1,
        RegionLabel::I1Star,
        RegionLabel::I2,
        RegionLabel::I2Star,
        RegionLabel::I3,
        RegionLabel::I3Star,
    ];

    pub fn is_starred(self) -> bool {
        matches!(self, RegionLabel::I1Star | RegionLabel::I2Star | RegionLabel::I3Star)
    }

    fn contains(self, ip: Rational, iq: Rational) -> bool {
        let half = Rational::new(1, 2);
        let ipc = Rational::one() - ip;
        match self {
            RegionLabel::I1 => ip.max(ipc) <= iq,
            RegionLabel::I1Star => ip.min(ipc) >= iq,
            RegionLabel::I2 => iq.max(half) <= ipc,
            RegionLabel::I2Star => iq.min(half) >= ipc,
            RegionLabel::I3 => iq.max(half) <= ip,
            RegionLabel::I3Star => iq.min(half) >= ip,
        }
    }

    /// The exponent attached to the region, shared by the starred and
    /// unstarred versions.
    fn branch(self, ip: Rational, iq: Rational) -> Rational {
        match self {
            RegionLabel::I1 | RegionLabel::I1Star => -ip,
            RegionLabel::I2 | RegionLabel::I2Star => iq - Rational::one(),
            RegionLabel::I3 | RegionLabel::I3Star => iq - ip * 2,
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegionLabel::I1 => "I1",
            RegionLabel::I1Star => "I1*",
            RegionLabel::I2 => "I2",
            RegionLabel::I2Star => "I2*",
            RegionLabel::I3 => "I3",
            RegionLabel::I3Star => "I3*",
        };
        f.write_str(s)
    }
}

fn check_unit_square(idx: IndexPair) -> Result<(Rational, Rational)> {
    let (ip, iq) = (idx.p.inv(), idx.q.inv());
    let unit = |v: Rational| v >= Rational::zero() && v <= Rational::one();
    if !unit(ip) || !unit(iq) {
        return Err(Error::Domain(format!("index pair {idx} lies outside [1, ∞]²")));
    }
    Ok((ip, iq))
}

/// Every region containing `(1/p, 1/q)`.
pub fn classify_region(idx: IndexPair) -> Result<BTreeSet<RegionLabel>> {
    let (ip, iq) = check_unit_square(idx)?;
    Ok(RegionLabel::ALL
        .into_iter()
        .filter(|r| r.contains(ip, iq))
        .collect())
}

fn index_function(idx: IndexPair, starred: bool, name: &str) -> Result<Rational> {
    let (ip, iq) = check_unit_square(idx)?;
    let mut value: Option<Rational> = None;
    for region in RegionLabel::ALL {
        if region.is_starred() != starred || !region.contains(ip, iq) {
            continue;
        }
        let v = region.branch(ip, iq);
        match value {
            None => value = Some(v),
            Some(prev) if prev != v => {
                return Err(Error::Contract(format!(
                    "{name} branches disagree at {idx}: {prev} vs {v} on {region}"
                )))
            }
            Some(_) => {}
        }
    }
    value.ok_or_else(|| Error::Domain(format!("{idx} lies in no region defining {name}")))
}

/// `μ₁(p, q)`, read off the starred regions.
pub fn mu1(idx: IndexPair) -> Result<Rational> {
    index_function(idx, true, "μ₁")
}

/// `μ₂(p, q)`, read off the unstarred regions.
pub fn mu2(idx: IndexPair) -> Result<Rational> {
    index_function(idx, false, "μ₂")
}

pub fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn check_invertible(det: f64, what: &str) -> Result<()> {
    if det == 0.0 || !det.is_finite() {
        return Err(Error::Singular(format!("{what} has determinant {det}")));
    }
    Ok(())
}

/// `|det A|^{-(1/p - 1/q + 1)} det(I + AᵀA)^{1/2}`.
pub fn dilation_bound_general(a: &Mat, idx: IndexPair) -> Result<f64> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::Dimension("A must be square".into()));
    }
    let det = a.determinant();
    check_invertible(det, "A")?;
    let e = idx.p.inv_f64() - idx.q.inv_f64() + 1.0;
    let m = Mat::identity(d, d) + a.transpose() * a;
    Ok(det.abs().powf(-e) * m.determinant().sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormSpace {
    Modulation,
    Wiener,
}

impl std::str::FromStr for NormSpace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "modulation" | "m" => Ok(NormSpace::Modulation),
            "wiener" | "w" => Ok(NormSpace::Wiener),
            other => Err(Error::Parse(format!("unknown space `{other}`"))),
        }
    }
}

fn eigen_product(eigs: &[f64], e_max: f64, e_min: f64) -> f64 {
    eigs.iter()
        .map(|l| {
            let a = l.abs();
            a.max(1.0).powf(e_max) * a.min(1.0).powf(e_min)
        })
        .product()
}

/// `∏ max(1,|λⱼ|)^{μ₁} min(1,|λⱼ|)^{μ₂}` with the indices taken at `(p, q)`
/// for modulation spaces and at `(p′, q′)` for Wiener amalgams.
pub fn dilation_bound_symmetric(eigs: &[f64], idx: IndexPair, space: NormSpace) -> Result<f64> {
    if let Some(z) = eigs.iter().find(|l| **l == 0.0 || !l.is_finite()) {
        return Err(Error::Singular(format!("eigenvalue {z} is not admissible")));
    }
    let at = match space {
        NormSpace::Modulation => idx,
        NormSpace::Wiener => idx.conjugate(),
    };
    let m1 = rational_to_f64(mu1(at)?);
    let m2 = rational_to_f64(mu2(at)?);
    Ok(eigen_product(eigs, m1, m2))
}

fn require_p_le_q(idx: IndexPair) -> Result<()> {
    // p ≤ q iff 1/p ≥ 1/q.
    if idx.p.inv() < idx.q.inv() {
        return Err(Error::Admissibility(format!("{idx} violates p ≤ q")));
    }
    Ok(())
}

fn det_product(factors: &[Complex64]) -> f64 {
    factors.iter().product::<Complex64>().norm()
}

/// `|det B|^{1/q - 1/p - 3/2} |det(I + BᵀB)(B + iA)(B + iD)|^{1/2}`.
pub fn alpha(s: &SymplecticMatrix, idx: IndexPair) -> Result<f64> {
    require_p_le_q(idx)?;
    let (a, b, dd) = (s.a(), s.b(), s.d());
    let det_b = b.determinant();
    check_invertible(det_b, "B")?;
    let n = s.dim();
    let ibb = (Mat::identity(n, n) + b.transpose() * &b).determinant();
    let prod = det_product(&[
        Complex64::new(ibb, 0.0),
        complex_det(&b, &a),
        complex_det(&b, &dd),
    ]);
    let e = idx.q.inv_f64() - idx.p.inv_f64() - 1.5;
    Ok(det_b.abs().powf(e) * prod.sqrt())
}

/// `|det A|^{-3/2} |det B|^{-1} |det(I + AᵀA)(B + iA)(A + iC)|^{1/2}`, the
/// constant for the `(1, ∞)` Wiener pair.
pub fn beta(s: &SymplecticMatrix) -> Result<f64> {
    let (a, b, c) = (s.a(), s.b(), s.c());
    let det_a = a.determinant();
    let det_b = b.determinant();
    check_invertible(det_a, "A")?;
    check_invertible(det_b, "B")?;
    let n = s.dim();
    let iaa = (Mat::identity(n, n) + a.transpose() * &a).determinant();
    let prod = det_product(&[
        Complex64::new(iaa, 0.0),
        complex_det(&b, &a),
        complex_det(&a, &c),
    ]);
    Ok(det_a.abs().powf(-1.5) * det_b.abs().recip() * prod.sqrt())
}

fn symmetric_block(m: &Mat, name: &str) -> Result<Vec<f64>> {
    if !is_symmetric(m, 1e-12 * max_abs(m).max(1.0)) {
        return Err(Error::Contract(format!("{name} must be symmetric")));
    }
    let eigs = symmetric_eigenvalues(m);
    check_invertible(eigs.iter().product(), name)?;
    Ok(eigs)
}

/// Sharpened `α` for symmetric `B`, using the eigenvalues of `B`.
pub fn alpha_prime(s: &SymplecticMatrix, idx: IndexPair) -> Result<f64> {
    require_p_le_q(idx)?;
    let (a, b, dd) = (s.a(), s.b(), s.d());
    let eigs = symmetric_block(&b, "B")?;
    let prod = det_product(&[complex_det(&b, &a), complex_det(&b, &dd)]);
    let m1 = rational_to_f64(mu1(idx)?);
    let m2 = rational_to_f64(mu2(idx)?);
    Ok(prod.sqrt() * eigen_product(&eigs, m1 - 0.5, m2 - 0.5))
}

/// Sharpened `β` for symmetric `A`, using the eigenvalues of `A`.
pub fn beta_prime(s: &SymplecticMatrix) -> Result<f64> {
    let (a, b, c) = (s.a(), s.b(), s.c());
    let eigs = symmetric_block(&a, "A")?;
    let det_b = b.determinant();
    check_invertible(det_b, "B")?;
    let prod = det_product(&[complex_det(&b, &a), complex_det(&a, &c)]);
    Ok(det_b.abs().recip() * prod.sqrt() * eigen_product(&eigs, -0.5, -1.5))
}

/// `2^{d/4} ∏ ((1 + t²λⱼ²)/(t⁴λⱼ⁴))^{1/4}` for the free flow `(I, tB; 0, I)`,
/// as displayed for that family. It exceeds the general `β′` by `2^{d/4}`.
pub fn free_particle_beta_prime(b: &Mat, t: f64) -> Result<f64> {
    let eigs = symmetric_block(b, "B")?;
    if t == 0.0 || !t.is_finite() {
        return Err(Error::Singular(format!("t = {t}")));
    }
    let d = eigs.len() as f64;
    let prod: f64 = eigs
        .iter()
        .map(|l| {
            let tl2 = (t * l).powi(2);
            ((1.0 + tl2) / (tl2 * tl2)).powf(0.25)
        })
        .product();
    Ok(2f64.powf(d / 4.0) * prod)
}

/// The two endpoint profiles for the harmonic flow at `r = ∞`:
/// `|sin t|^{-d}|cos t|^{-3d/2}` (via `β′`) and `|sin t|^{-5d/2}` (via `α′`).
pub fn harmonic_endpoint_profiles(d: usize, t: f64) -> (f64, f64) {
    let (s, c) = (t.sin().abs(), t.cos().abs());
    let d = d as f64;
    (s.powf(-d) * c.powf(-1.5 * d), s.powf(-2.5 * d))
}

/// Fixed-time decay profile from `W(FL^r, L^{r′})` to `W(FL^{r′}, L^r)`.
///
/// Harmonic: `|sin t|^{-2d(1/2-1/r)}`. Repulsive:
/// `((1 + |sinh t|)/sinh² t)^{d(1/2-1/r)}`. Free: the `r = ∞` profile
/// `∏((1+t²λⱼ²)/(t⁴λⱼ⁴))^{1/4}` interpolated against conservation at `r = 2`.
pub fn dispersive_bound(kind: &HamiltonianKind, d: usize, t: f64, r: Exponent) -> Result<f64> {
    if r.inv() > Rational::new(1, 2) {
        return Err(Error::Admissibility(format!("r = {r} must be at least 2")));
    }
    kind.check_time(t, EPS_T)?;
    let theta = 0.5 - r.inv_f64();
    let df = d as f64;
    Ok(match kind {
        HamiltonianKind::Harmonic => t.sin().abs().powf(-2.0 * df * theta),
        HamiltonianKind::Repulsive => {
            let sh = t.sinh();
            ((1.0 + sh.abs()) / (sh * sh)).powf(df * theta)
        }
        HamiltonianKind::Free(b) => {
            if b.nrows() != d {
                return Err(Error::Dimension(format!("B is {}x{}, d = {d}", b.nrows(), b.ncols())));
            }
            let eigs = symmetric_block(b, "B")?;
            eigs.iter()
                .map(|l| {
                    let tl2 = (t * l).powi(2);
                    ((1.0 + tl2) / (tl2 * tl2)).powf(0.5 * theta)
                })
                .product()
        }
    })
}

/// `2/q + d/r = d/2` with `q > 4`, `r ≥ 2`; optionally the endpoint
/// `(4, 2d/(d-1))` for `d > 1`.
pub fn strichartz_admissible(q: Exponent, r: Exponent, d: usize, endpoint_allowed: bool) -> bool {
    let d_r = Rational::from_integer(d as i64);
    let scaling = q.inv() * 2 + r.inv() * d_r == d_r / 2;
    if !scaling || r.inv() > Rational::new(1, 2) {
        return false;
    }
    if q.inv() < Rational::new(1, 4) {
        return true;
    }
    endpoint_allowed
        && d > 1
        && q.inv() == Rational::new(1, 4)
        && r.inv() == Rational::new(d as i64 - 1, 2 * d as i64)
}

/// Prediction against measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub predicted: f64,
    pub fitted: f64,
    pub residual: f64,
    pub range: (f64, f64),
}

impl BoundReport {
    pub fn new(predicted: f64, fitted: f64, range: (f64, f64)) -> Self {
        Self {
            predicted,
            fitted,
            residual: (predicted - fitted).abs(),
            range,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(p: i64, q: i64) -> IndexPair {
        IndexPair::ints(p, q).unwrap()
    }

    #[test]
    fn l2_indices() {
        assert_eq!(mu1(pair(2, 2)).unwrap(), Rational::new(-1, 2));
        assert_eq!(mu2(pair(2, 2)).unwrap(), Rational::new(-1, 2));
    }

    #[test]
    fn strichartz_examples() {
        let e = |n, d| Exponent::ratio(n, d).unwrap();
        assert!(strichartz_admissible(e(8, 1), e(12, 5), 3, false));
        assert!(strichartz_admissible(e(4, 1), e(4, 1), 2, true));
        assert!(!strichartz_admissible(e(4, 1), e(4, 1), 2, false));
        assert!(strichartz_admissible(e(8, 1), e(4, 1), 1, false));
    }
}
