use std::f64::consts::PI;

use num_complex::Complex64;

use super::fourier::{fourier, inverse_at, Direction};
use super::{Grid, SampledField};
use crate::error::{Error, Result};
use crate::matrix::{inverse, is_symmetric, Mat};
use crate::parallel::pairwise_sum;

/// Energy fraction above which operations log an alias warning.
pub const ALIAS_WARN: f64 = 1e-12;

fn check_square(m: &Mat, d: usize, what: &str) -> Result<()> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::Dimension(format!(
            "{what} must be {d}x{d}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn check_vector(v: &[f64], d: usize, what: &str) -> Result<()> {
    if v.len() != d {
        return Err(Error::Dimension(format!("{what} must have {d} entries, got {}", v.len())));
    }
    Ok(())
}

fn mat_apply(m: &Mat, x: &[f64]) -> [f64; 2] {
    let mut out = [0.0; 2];
    for (i, o) in out.iter_mut().enumerate().take(x.len()) {
        *o = (0..x.len()).map(|j| m[(i, j)] * x[j]).sum();
    }
    out
}

/// Samples of `φ_A(t) = e^{-π|At|²}`.
pub fn gaussian(grid: &Grid, a: &Mat) -> Result<SampledField> {
    let d = grid.dim();
    check_square(a, d, "A")?;
    inverse(a, "A")?;
    Ok(SampledField::from_fn(*grid, |t| {
        let at = mat_apply(a, t);
        let r2: f64 = at[..d].iter().map(|v| v * v).sum();
        Complex64::new((-PI * r2).exp(), 0.0)
    }))
}

/// Samples of `e^{sign·πi Rt·t}`. Logs a warning when the local frequency
/// `|R|·L/2` at the box edge reaches the Nyquist limit.
pub fn chirp(grid: &Grid, r: &Mat, sign: f64) -> Result<SampledField> {
    let d = grid.dim();
    check_square(r, d, "R")?;
    if !is_symmetric(r, 1e-12) {
        return Err(Error::Contract("chirp matrix R must be symmetric".into()));
    }
    let spectral = r.clone().symmetric_eigen().eigenvalues.amax();
    if spectral * grid.side() / 2.0 >= grid.nyquist() {
        log::warn!(
            "chirp with |R| = {spectral} exceeds the Nyquist budget of the grid (N={}, L={})",
            grid.n(),
            grid.side()
        );
    }
    let s = sign.signum();
    Ok(SampledField::from_fn(*grid, |t| {
        let rt = mat_apply(r, t);
        let q: f64 = t.iter().zip(&rt).map(|(a, b)| a * b).sum();
        Complex64::from_polar(1.0, s * PI * q)
    }))
}

/// `T_{x0} f(t) = f(t - x0)` as a circular shift; `x0` must be a multiple of `h`.
pub fn translate(f: &SampledField, x0: &[f64]) -> Result<SampledField> {
    let grid = *f.grid();
    let d = grid.dim();
    check_vector(x0, d, "shift")?;
    let n = grid.n() as i64;
    let h = grid.spacing();
    let mut shifts = [0i64; 2];
    for (axis, &x) in x0.iter().enumerate() {
        let steps = x / h;
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-9 * steps.abs().max(1.0) {
            return Err(Error::Precondition(format!(
                "shift {x} is not a multiple of the grid spacing {h}"
            )));
        }
        shifts[axis] = (rounded as i64).rem_euclid(n);
    }
    let n = n as usize;
    let src = |k: usize, axis: usize| (k + n - shifts[axis] as usize) % n;
    let values = f.values();
    let out: Vec<Complex64> = match d {
        1 => (0..n).map(|k| values[src(k, 0)]).collect(),
        _ => (0..n * n)
            .map(|idx| values[src(idx / n, 0) * n + src(idx % n, 1)])
            .collect(),
    };
    Ok(SampledField::from_parts(grid, out))
}

/// `M_{ξ0} f(t) = e^{2πi ξ0·t} f(t)`.
pub fn modulate(f: &SampledField, xi0: &[f64]) -> Result<SampledField> {
    let grid = *f.grid();
    let d = grid.dim();
    check_vector(xi0, d, "frequency")?;
    let values: Vec<Complex64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(idx, &v)| {
            let t = grid.point(idx);
            let phase: f64 = (0..d).map(|i| xi0[i] * t[i]).sum();
            v * Complex64::from_polar(1.0, 2.0 * PI * phase)
        })
        .collect();
    Ok(SampledField::from_parts(grid, values))
}

/// Fraction of the field lost or aliased by `t ↦ f(At)`: the larger of the
/// spectral energy with `Aᵀξ` beyond Nyquist and the spatial energy mapped
/// outside the box.
pub fn alias_risk(f: &SampledField, a: &Mat) -> Result<f64> {
    let grid = *f.grid();
    let d = grid.dim();
    check_square(a, d, "A")?;
    let a_inv = inverse(a, "A")?;
    let spec = fourier(f, Direction::Forward);
    let at = a.transpose();
    let nyq = grid.nyquist();
    let fraction = |field: &SampledField, outside: &dyn Fn(&[f64]) -> bool| {
        let g = field.grid();
        let mut total = Vec::with_capacity(g.len());
        let mut lost = Vec::new();
        for (idx, v) in field.values().iter().enumerate() {
            let e = v.norm_sqr();
            total.push(e);
            if outside(&g.point(idx)[..d]) {
                lost.push(e);
            }
        }
        let t = pairwise_sum(&total);
        if t == 0.0 {
            0.0
        } else {
            pairwise_sum(&lost) / t
        }
    };
    let spectral = fraction(&spec, &|xi| {
        mat_apply(&at, xi)[..d].iter().any(|&v| v < -nyq || v >= nyq)
    });
    let spatial = fraction(f, &|y| !grid.contains(&mat_apply(&a_inv, y)[..d]));
    Ok(spectral.max(spatial))
}

/// `U_A f(t) = |det A|^{1/2} f(At)` through the trigonometric interpolant of
/// `f`; points `At` outside the box evaluate to zero.
pub fn dilate_unitary(f: &SampledField, a: &Mat) -> Result<SampledField> {
    let grid = *f.grid();
    check_square(a, grid.dim(), "A")?;
    inverse(a, "A")?;
    if a == &Mat::identity(grid.dim(), grid.dim()) {
        return Ok(f.clone());
    }
    let risk = alias_risk(f, a)?;
    if risk > ALIAS_WARN {
        log::warn!("dilation loses or aliases an energy fraction of {risk:.3e}");
    }
    let spec = fourier(f, Direction::Forward);
    let scale = a.determinant().abs().sqrt();
    let values = inverse_at(&spec, a, &grid).into_iter().map(|v| v * scale).collect();
    Ok(SampledField::from_parts(grid, values))
}

pub fn multiply(f: &SampledField, g: &SampledField) -> Result<SampledField> {
    f.grid().check_same(g.grid())?;
    let values = f.values().iter().zip(g.values()).map(|(a, b)| a * b).collect();
    Ok(SampledField::from_parts(*f.grid(), values))
}

/// Circular convolution approximating `∫ f(y) g(x - y) dy`.
pub fn convolve(f: &SampledField, g: &SampledField) -> Result<SampledField> {
    f.grid().check_same(g.grid())?;
    let product = multiply(&fourier(f, Direction::Forward), &fourier(g, Direction::Forward))?;
    let out = fourier(&product, Direction::Inverse);
    Ok(SampledField::from_parts(*f.grid(), out.into_values()))
}

pub fn l2_norm(f: &SampledField) -> f64 {
    let sq: Vec<f64> = f.values().iter().map(|v| v.norm_sqr()).collect();
    (pairwise_sum(&sq) * f.grid().cell_volume()).sqrt()
}

/// `⟨f, g⟩ = ∫ f ḡ`, linear in the first argument.
pub fn inner(f: &SampledField, g: &SampledField) -> Result<Complex64> {
    f.grid().check_same(g.grid())?;
    let prods: Vec<Complex64> = f.values().iter().zip(g.values()).map(|(a, b)| a * b.conj()).collect();
    let re: Vec<f64> = prods.iter().map(|v| v.re).collect();
    let im: Vec<f64> = prods.iter().map(|v| v.im).collect();
    Ok(Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) * f.grid().cell_volume())
}
