//! Complex fields sampled on uniform periodic grids over `[-L/2, L/2)^d`.
//!
//! Two-dimensional fields are stored row-major: sample `(i0, i1)` lives at
//! `i0 * N + i1` and has coordinates `(x_{i0}, x_{i1})`.

mod fourier;
mod io;
mod ops;

pub use fourier::{fourier, Direction};
pub use io::{field_from_csv, field_to_csv};
pub use ops::{
    alias_risk, chirp, convolve, dilate_unitary, gaussian, inner, l2_norm, modulate, multiply,
    translate,
};

pub(crate) use fourier::eval_linear;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    side: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, side: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::Dimension(format!("grid dimension must be 1 or 2, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Domain(format!(
                "samples per axis must be a power of two >= 8, got {n}"
            )));
        }
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::Domain(format!("box side must be positive, got {side}")));
        }
        Ok(Self { dim, n, side })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Samples per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Box side `L`.
    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn spacing(&self) -> f64 {
        self.side / self.n as f64
    }

    /// Total number of samples, `N^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `-L/2 + k h`.
    pub fn coord(&self, k: usize) -> f64 {
        -0.5 * self.side + k as f64 * self.spacing()
    }

    pub fn axis(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.coord(k)).collect()
    }

    /// Coordinates of the sample at flat index `idx`.
    pub fn point(&self, idx: usize) -> [f64; MAX_DIM] {
        match self.dim {
            1 => [self.coord(idx), 0.0],
            _ => [self.coord(idx / self.n), self.coord(idx % self.n)],
        }
    }

    /// The frequency grid matched to this grid by the DFT: spacing `1/L`,
    /// side `N/L`.
    pub fn dual(&self) -> Grid {
        Grid {
            dim: self.dim,
            n: self.n,
            side: self.n as f64 / self.side,
        }
    }

    /// `1/(2h)`: half-width of the dual box.
    pub fn nyquist(&self) -> f64 {
        0.5 / self.spacing()
    }

    /// Whether `x` lies inside `[-L/2, L/2)^d`.
    pub fn contains(&self, x: &[f64]) -> bool {
        let half = 0.5 * self.side;
        x.iter().take(self.dim).all(|&v| v >= -half && v < half)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        let same_side = (self.side - other.side).abs() <= 1e-12 * self.side.max(other.side);
        if self.dim != other.dim || self.n != other.n || !same_side {
            return Err(Error::Dimension(format!(
                "grid mismatch: (d={}, N={}, L={}) vs (d={}, N={}, L={})",
                self.dim, self.n, self.side, other.dim, other.n, other.side
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain(format!("sample {k} is not finite")));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts(grid: Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f` at every grid point. The slice passed to `f` has length `d`.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64 + Sync + Send) -> Self {
        let d = grid.dim();
        let values = crate::parallel::map_indexed(grid.len(), |idx| f(&grid.point(idx)[..d]));
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.norm()))
    }

    /// Riemann sum of `|f|` (discrete `L¹`).
    pub fn l1_norm(&self) -> f64 {
        let abs: Vec<f64> = self.values.iter().map(|v| v.norm()).collect();
        crate::parallel::pairwise_sum(&abs) * self.grid.cell_volume()
    }

    pub fn sub(&self, other: &SampledField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &SampledField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }
}

/// Multiply `v` by the unimodular constant that best aligns it with `reference`.
pub fn align_phase(v: &SampledField, reference: &SampledField) -> Result<SampledField> {
    let overlap = inner(reference, v)?;
    if overlap.norm() == 0.0 {
        return Ok(v.clone());
    }
    Ok(v.scale(overlap / overlap.norm()))
}

/// `max |u - e^{iθ}v|` with `θ` from [`align_phase`].
pub fn aligned_max_deviation(u: &SampledField, v: &SampledField) -> Result<f64> {
    Ok(u.sub(&align_phase(v, u)?)?.max_abs())
}

/// `‖u - e^{iθ}v‖₂ / ‖u‖₂` with `θ` from [`align_phase`].
pub fn aligned_relative_l2(u: &SampledField, v: &SampledField) -> Result<f64> {
    Ok(l2_norm(&u.sub(&align_phase(v, u)?)?) / l2_norm(u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid::new(3, 64, 1.0).is_err());
        assert!(Grid::new(1, 48, 1.0).is_err());
        assert!(Grid::new(1, 4, 1.0).is_err());
        assert!(Grid::new(1, 64, 0.0).is_err());
        let g = Grid::new(2, 8, 4.0).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.point(9), [-1.5, -1.5]);
        assert_eq!(g.dual().spacing(), 0.25);
    }

    #[test]
    fn field_validation() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        assert!(SampledField::new(g, vec![Complex64::new(0.0, 0.0); 7]).is_err());
        let mut v = vec![Complex64::new(0.0, 0.0); 8];
        v[3].re = f64::NAN;
        assert!(SampledField::new(g, v).is_err());
    }
}
