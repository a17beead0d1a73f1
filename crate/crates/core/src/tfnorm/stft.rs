use std::fmt::Write as _;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::{Grid, SampledField};

/// Sampling lattice for the STFT. `dx` must be a multiple of the grid
/// spacing `h` and `dxi` a multiple of `1/L`. `x_extent`, when set,
/// keeps only positions with every coordinate in `[-x_extent, x_extent]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StftLattice {
    pub dx: f64,
    pub dxi: f64,
    pub x_extent: Option<f64>,
}

impl StftLattice {
    /// Matched to the DFT: `δx = h`, `δξ = 1/L`, full extent.
    pub fn matched(grid: &Grid) -> Self {
        Self {
            dx: grid.spacing(),
            dxi: 1.0 / grid.side(),
            x_extent: None,
        }
    }

    pub fn with_extent(mut self, extent: f64) -> Self {
        self.x_extent = Some(extent);
        self
    }
}

fn stride(step: f64, unit: f64, what: &str) -> Result<usize> {
    let ratio = step / unit;
    let rounded = ratio.round();
    if !(rounded >= 1.0) || (ratio - rounded).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::Precondition(format!(
            "{what} = {step} is not a positive multiple of {unit}"
        )));
    }
    Ok(rounded as usize)
}

/// STFT samples `V_g f(x, ξ)` on a product lattice.
///
/// Positions and frequencies are each a product of one per-axis list;
/// values are stored position-major: `values[ix * n_xi + iξ]`, with `ix`
/// and `iξ` flattened row-major over axes.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrogram {
    dim: usize,
    dx: f64,
    dxi: f64,
    x_axis: Vec<f64>,
    xi_axis: Vec<f64>,
    values: Vec<Complex64>,
}

impl Spectrogram {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dxi(&self) -> f64 {
        self.dxi
    }

    pub fn x_axis(&self) -> &[f64] {
        &self.x_axis
    }

    pub fn xi_axis(&self) -> &[f64] {
        &self.xi_axis
    }

    /// Number of lattice positions.
    pub fn n_x(&self) -> usize {
        self.x_axis.len().pow(self.dim as u32)
    }

    pub fn n_xi(&self) -> usize {
        self.xi_axis.len().pow(self.dim as u32)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, ix: usize, ixi: usize) -> Complex64 {
        self.values[ix * self.n_xi() + ixi]
    }

    fn unflatten(axis: &[f64], dim: usize, idx: usize) -> [f64; 2] {
        match dim {
            1 => [axis[idx], 0.0],
            _ => [axis[idx / axis.len()], axis[idx % axis.len()]],
        }
    }

    pub fn x_point(&self, ix: usize) -> [f64; 2] {
        Self::unflatten(&self.x_axis, self.dim, ix)
    }

    pub fn xi_point(&self, ixi: usize) -> [f64; 2] {
        Self::unflatten(&self.xi_axis, self.dim, ixi)
    }

    fn locate(axis: &[f64], v: f64, step: f64) -> Option<usize> {
        let k = ((v - axis[0]) / step).round();
        if k < 0.0 || k as usize >= axis.len() {
            return None;
        }
        let k = k as usize;
        ((axis[k] - v).abs() <= 1e-9 * step).then_some(k)
    }

    /// The lattice value at `(x, ξ)`, if both are lattice points.
    pub fn at(&self, x: &[f64], xi: &[f64]) -> Option<Complex64> {
        if x.len() != self.dim || xi.len() != self.dim {
            return None;
        }
        let mut ix = 0;
        let mut ixi = 0;
        for axis in 0..self.dim {
            ix = ix * self.x_axis.len() + Self::locate(&self.x_axis, x[axis], self.dx)?;
            ixi = ixi * self.xi_axis.len() + Self::locate(&self.xi_axis, xi[axis], self.dxi)?;
        }
        Some(self.value(ix, ixi))
    }

    /// CSV with columns `x0[,x1],xi0[,xi1],re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self.dim {
            1 => out.push_str("x,xi,re,im\n"),
            _ => out.push_str("x0,x1,xi0,xi1,re,im\n"),
        }
        for ix in 0..self.n_x() {
            let x = self.x_point(ix);
            for ixi in 0..self.n_xi() {
                let xi = self.xi_point(ixi);
                let v = self.value(ix, ixi);
                let _ = match self.dim {
                    1 => writeln!(out, "{:.12e},{:.12e},{:.12e},{:.12e}", x[0], xi[0], v.re, v.im),
                    _ => writeln!(
                        out,
                        "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                        x[0], x[1], xi[0], xi[1], v.re, v.im
                    ),
                };
            }
        }
        out
    }
}

/// `V_g f(x, ξ) = ∫ e^{-2πiξ·y} f(y) g(y - x) dy` on the lattice with steps
/// `dx`, `dxi` and full extent.
pub fn stft(f: &SampledField, window: &SampledField, dx: f64, dxi: f64) -> Result<Spectrogram> {
    stft_on(
        f,
        window,
        &StftLattice {
            dx,
            dxi,
            x_extent: None,
        },
    )
}

/// As [`stft`] on an explicit lattice. One transform per position.
pub fn stft_on(f: &SampledField, window: &SampledField, lattice: &StftLattice) -> Result<Spectrogram> {
    let grid = *f.grid();
    if grid.dim() != window.grid().dim()
        || grid.n() != window.grid().n()
        || (grid.side() - window.grid().side()).abs() > 1e-12 * grid.side()
    {
        return Err(Error::Dimension("window must live on the signal grid".into()));
    }
    let d = grid.dim();
    let n = grid.n();
    let h = grid.spacing();
    let sx = stride(lattice.dx, h, "position step")?;
    let sxi = stride(lattice.dxi, 1.0 / grid.side(), "frequency step")?;
    let extent = lattice.x_extent.unwrap_or(f64::INFINITY);

    // Lattice positions are the grid points x_k with k - N/2 divisible by
    // the stride, so the origin is always included.
    let x_index: Vec<usize> = (0..n)
        .filter(|&k| (k as i64 - (n / 2) as i64).rem_euclid(sx as i64) == 0)
        .filter(|&k| grid.coord(k).abs() <= extent + 1e-12)
        .collect();
    if x_index.is_empty() {
        return Err(Error::Precondition("STFT lattice has no positions".into()));
    }
    let xi_index: Vec<usize> = (0..n)
        .filter(|&m| (m as i64 - (n / 2) as i64).rem_euclid(sxi as i64) == 0)
        .collect();
    let dual = grid.dual();
    let x_axis: Vec<f64> = x_index.iter().map(|&k| grid.coord(k)).collect();
    let xi_axis: Vec<f64> = xi_index.iter().map(|&m| dual.coord(m)).collect();

    let positions: Vec<[usize; 2]> = match d {
        1 => x_index.iter().map(|&k| [k, 0]).collect(),
        _ => x_index
            .iter()
            .flat_map(|&a| x_index.iter().map(move |&b| [a, b]))
            .collect(),
    };
    let freqs: Vec<usize> = match d {
        1 => xi_index.clone(),
        _ => xi_index
            .iter()
            .flat_map(|&a| xi_index.iter().map(move |&b| a * n + b))
            .collect(),
    };

    let fft = FftPlanner::new().plan_fft_forward(n);
    let fv = f.values();
    let gv = window.values();
    let half = n / 2;
    let parity = |k: usize| if k % 2 == 0 { 1.0 } else { -1.0 };
    let weight = grid.cell_volume();

    let rows: Vec<Vec<Complex64>> = crate::parallel::map_indexed(positions.len(), |pi| {
        let [a, b] = positions[pi];
        // Shift index of T_x g: x_k corresponds to a shift of k - N/2 samples.
        let shift = |k: usize, c: usize| (k + n + half - c) % n;
        let mut buf: Vec<Complex64> = match d {
            1 => (0..n).map(|k| fv[k] * gv[shift(k, a)] * parity(k)).collect(),
            _ => (0..n * n)
                .map(|idx| {
                    let (i, j) = (idx / n, idx % n);
                    fv[idx] * gv[shift(i, a) * n + shift(j, b)] * parity(i) * parity(j)
                })
                .collect(),
        };
        if d == 1 {
            fft.process(&mut buf);
        } else {
            for row in buf.chunks_mut(n) {
                fft.process(row);
            }
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                for i in 0..n {
                    col[i] = buf[i * n + j];
                }
                fft.process(&mut col);
                for i in 0..n {
                    buf[i * n + j] = col[i];
                }
            }
        }
        freqs
            .iter()
            .map(|&m| {
                let s = match d {
                    1 => parity(m + half),
                    _ => parity(m / n + half) * parity(m % n + half),
                };
                buf[m] * (s * weight)
            })
            .collect()
    });

    Ok(Spectrogram {
        dim: d,
        dx: lattice.dx,
        dxi: lattice.dxi,
        x_axis,
        xi_axis,
        values: rows.into_iter().flatten().collect(),
    })
}
