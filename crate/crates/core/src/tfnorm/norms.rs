use crate::error::{Error, Result};
use crate::field::{Grid, SampledField};
use crate::parallel::pairwise_sum;

use super::index::{Exponent, IndexPair};
use super::stft::{stft_on, Spectrogram, StftLattice};

/// Largest tolerated fraction of `Σ|V|²` in the outer band of an axis that
/// carries a finite exponent.
pub const COVERAGE_LIMIT: f64 = 1e-10;

/// Fraction of each axis treated as its outer band.
const BAND_FRACTION: usize = 16;

/// Lattice used when none is given: matched to the DFT in one dimension;
/// in two dimensions positions and frequencies are thinned to at most 32
/// per axis to keep the lattice at desk scale.
pub fn default_lattice(grid: &Grid) -> StftLattice {
    let matched = StftLattice::matched(grid);
    if grid.dim() == 1 {
        return matched;
    }
    let stride = (grid.n() / 32).max(1) as f64;
    StftLattice {
        dx: matched.dx * stride,
        dxi: matched.dxi * stride,
        x_extent: None,
    }
}

fn lp(values: &[f64], e: Exponent, cell: f64) -> f64 {
    if e.is_infinite() {
        return values.iter().fold(0.0_f64, |m, &v| m.max(v));
    }
    let p = e.to_f64();
    let powered: Vec<f64> = if p == 1.0 {
        values.to_vec()
    } else if p == 2.0 {
        values.iter().map(|v| v * v).collect()
    } else {
        values.iter().map(|v| v.powf(p)).collect()
    };
    (pairwise_sum(&powered) * cell).powf(1.0 / p)
}

fn band(len: usize) -> usize {
    len.div_ceil(BAND_FRACTION)
}

impl Spectrogram {
    fn in_band(axis_len: usize, dim: usize, flat: usize) -> bool {
        let b = band(axis_len);
        let edge = |k: usize| k < b || k + b >= axis_len;
        match dim {
            1 => edge(flat),
            _ => edge(flat / axis_len) || edge(flat % axis_len),
        }
    }

    /// Fraction of `Σ|V|²` on the outer bands of the position axes
    /// (`positions`) and/or the frequency axes (`frequencies`).
    pub fn tail_fraction(&self, positions: bool, frequencies: bool) -> f64 {
        let nxi = self.n_xi();
        let total: Vec<f64> = self.values().iter().map(|v| v.norm_sqr()).collect();
        let total_sum = pairwise_sum(&total);
        if total_sum == 0.0 {
            return 0.0;
        }
        let tail: Vec<f64> = total
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                (positions && Self::in_band(self.x_axis().len(), self.dim(), k / nxi))
                    || (frequencies && Self::in_band(self.xi_axis().len(), self.dim(), k % nxi))
            })
            .map(|(_, &v)| v)
            .collect();
        pairwise_sum(&tail) / total_sum
    }

    fn check_coverage(&self, positions: bool, frequencies: bool) -> Result<()> {
        let tail = self.tail_fraction(positions, frequencies);
        if tail > COVERAGE_LIMIT {
            return Err(Error::Coverage {
                tail,
                limit: COVERAGE_LIMIT,
            });
        }
        Ok(())
    }

    fn magnitudes(&self) -> Vec<f64> {
        self.values().iter().map(|v| v.norm()).collect()
    }

    /// `‖ ‖V(·, ξ)‖_{L^p} ‖_{L^q}`.
    pub fn modulation_norm(&self, idx: IndexPair) -> Result<f64> {
        self.check_coverage(!idx.p.is_infinite(), !idx.q.is_infinite())?;
        let mag = self.magnitudes();
        let (nx, nxi) = (self.n_x(), self.n_xi());
        let cell_x = self.dx().powi(self.dim() as i32);
        let cell_xi = self.dxi().powi(self.dim() as i32);
        let inner: Vec<f64> = (0..nxi)
            .map(|j| {
                let column: Vec<f64> = (0..nx).map(|i| mag[i * nxi + j]).collect();
                lp(&column, idx.p, cell_x)
            })
            .collect();
        Ok(lp(&inner, idx.q, cell_xi))
    }

    /// `‖ ‖V(x, ·)‖_{L^p} ‖_{L^q}`.
    pub fn wiener_norm(&self, idx: IndexPair) -> Result<f64> {
        self.check_coverage(!idx.q.is_infinite(), !idx.p.is_infinite())?;
        let mag = self.magnitudes();
        let nxi = self.n_xi();
        let cell_x = self.dx().powi(self.dim() as i32);
        let cell_xi = self.dxi().powi(self.dim() as i32);
        let inner: Vec<f64> = mag.chunks(nxi).map(|row| lp(row, idx.p, cell_xi)).collect();
        Ok(lp(&inner, idx.q, cell_x))
    }
}

/// The Gaussian window `e^{-π|t|²}` on `grid`.
pub fn default_window(grid: &Grid) -> SampledField {
    let d = grid.dim();
    SampledField::from_fn(*grid, |t| {
        let r2: f64 = t[..d].iter().map(|v| v * v).sum();
        num_complex::Complex64::new((-std::f64::consts::PI * r2).exp(), 0.0)
    })
}

pub fn modulation_norm(f: &SampledField, idx: IndexPair, window: &SampledField) -> Result<f64> {
    modulation_norm_on(f, idx, window, &default_lattice(f.grid()))
}

pub fn modulation_norm_on(
    f: &SampledField,
    idx: IndexPair,
    window: &SampledField,
    lattice: &StftLattice,
) -> Result<f64> {
    stft_on(f, window, lattice)?.modulation_norm(idx)
}

pub fn wiener_amalgam_norm(f: &SampledField, idx: IndexPair, window: &SampledField) -> Result<f64> {
    wiener_amalgam_norm_on(f, idx, window, &default_lattice(f.grid()))
}

pub fn wiener_amalgam_norm_on(
    f: &SampledField,
    idx: IndexPair,
    window: &SampledField,
    lattice: &StftLattice,
) -> Result<f64> {
    stft_on(f, window, lattice)?.wiener_norm(idx)
}

/// Discrete `L^{q/2}([0, T])` norm of per-slice Wiener amalgam norms
/// `W(FL^{p}, L^{q_x})` for slices sampled at midpoints with step `dt`.
pub fn mixed_time_norm(
    slices: &[SampledField],
    dt: f64,
    q: Exponent,
    inner: IndexPair,
    window: &SampledField,
    lattice: &StftLattice,
) -> Result<f64> {
    if slices.is_empty() {
        return Err(Error::Domain("no time slices".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    let norms = crate::parallel::map_indexed(slices.len(), |k| {
        wiener_amalgam_norm_on(&slices[k], inner, window, lattice)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    Ok(time_norm(&norms, dt, q))
}

/// `(Σ_k n_k^{q/2} dt)^{2/q}`, or the maximum for `q = ∞`.
pub fn time_norm(norms: &[f64], dt: f64, q: Exponent) -> f64 {
    if q.is_infinite() {
        return norms.iter().fold(0.0_f64, |m, &v| m.max(v));
    }
    let half = 0.5 * q.to_f64();
    let powered: Vec<f64> = norms.iter().map(|v| v.powf(half)).collect();
    (pairwise_sum(&powered) * dt).powf(1.0 / half)
}
