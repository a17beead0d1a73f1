//! Discrete Fourier transforms with the continuous normalization
//! `f̂(ξ) = ∫ f(t) e^{-2πitξ} dt`, plus evaluation of the underlying
//! trigonometric sums at off-grid points (chirp-z for uniform targets).

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{Grid, SampledField};
use crate::matrix::{is_diagonal, Mat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// `e^{2πi c k}`, reducing `c·k` modulo 1 with an exact product split so
/// that large `k` does not cost phase accuracy.
pub(crate) fn cis_turns(c: f64, k: f64) -> Complex64 {
    let p = c * k;
    let err = c.mul_add(k, -p);
    let frac = (p - p.round()) + err;
    Complex64::from_polar(1.0, 2.0 * PI * frac)
}

fn sign_pattern(grid: &Grid, idx: usize, centered: bool) -> f64 {
    let n = grid.n();
    let half = n / 2;
    let parity = |k: usize| {
        let e = if centered { k + half } else { k };
        if e % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    match grid.dim() {
        1 => parity(idx),
        _ => parity(idx / n) * parity(idx % n),
    }
}

fn fft_2d_inplace(values: &mut [Complex64], n: usize, dim: usize, fft: &Arc<dyn Fft<f64>>) {
    if dim == 1 {
        fft.process(values);
        return;
    }
    for row in values.chunks_mut(n) {
        fft.process(row);
    }
    let mut column = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            column[i] = values[i * n + j];
        }
        fft.process(&mut column);
        for i in 0..n {
            values[i * n + j] = column[i];
        }
    }
}

/// Forward maps a field on `[-L/2, L/2)^d` to its transform on the frequency
/// grid `[-N/(2L), N/(2L))^d`; inverse is the exact inverse on that space.
pub fn fourier(f: &SampledField, direction: Direction) -> SampledField {
    let grid = *f.grid();
    let n = grid.n();
    let out_grid = grid.dual();
    let mut planner = FftPlanner::new();
    let fft = match direction {
        Direction::Forward => planner.plan_fft_forward(n),
        Direction::Inverse => planner.plan_fft_inverse(n),
    };
    // Input coordinates are x_k = -L/2 + k h; the phase e^{∓2πi x_k ξ_m}
    // factors into (-1)^k (-1)^{m-N/2} times the plain DFT kernel.
    let (pre_centered, post_centered) = match direction {
        Direction::Forward => (false, true),
        Direction::Inverse => (true, false),
    };
    let mut values: Vec<Complex64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(idx, &v)| v * sign_pattern(&grid, idx, pre_centered))
        .collect();
    fft_2d_inplace(&mut values, n, grid.dim(), &fft);
    let weight = grid.cell_volume();
    for (idx, v) in values.iter_mut().enumerate() {
        *v *= weight * sign_pattern(&out_grid, idx, post_centered);
    }
    SampledField::from_parts(out_grid, values)
}

/// Chirp-z evaluation of `y_j = Σ_k a_k e^{2πi (x0 + k dx)(p0 + j dp)}`.
struct Czt {
    n: usize,
    m: usize,
    x0: f64,
    dx: f64,
    p0: f64,
    dp: f64,
    size: usize,
    filter: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Czt {
    fn new(n: usize, m: usize, x0: f64, dx: f64, p0: f64, dp: f64) -> Self {
        let size = (n + m - 1).next_power_of_two();
        let tau_half = 0.5 * dx * dp;
        let mut filter = vec![Complex64::new(0.0, 0.0); size];
        for l in 0..m {
            filter[l] = cis_turns(-tau_half, (l * l) as f64);
        }
        for l in 1..n {
            filter[size - l] = cis_turns(-tau_half, (l * l) as f64);
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        forward.process(&mut filter);
        Self {
            n,
            m,
            x0,
            dx,
            p0,
            dp,
            size,
            filter,
            forward,
            inverse,
        }
    }

    fn apply(&self, a: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(a.len(), self.n);
        let tau_half = 0.5 * self.dx * self.dp;
        let mut work = vec![Complex64::new(0.0, 0.0); self.size];
        for (k, &v) in a.iter().enumerate() {
            let kf = k as f64;
            work[k] = v * cis_turns(self.dx * self.p0, kf) * cis_turns(tau_half, kf * kf);
        }
        self.forward.process(&mut work);
        for (w, c) in work.iter_mut().zip(&self.filter) {
            *w *= c;
        }
        self.inverse.process(&mut work);
        let norm = 1.0 / self.size as f64;
        let base = cis_turns(self.x0, self.p0);
        (0..self.m)
            .map(|j| {
                let jf = j as f64;
                work[j] * norm * base * cis_turns(self.x0 * self.dp, jf) * cis_turns(tau_half, jf * jf)
            })
            .collect()
    }
}

/// `out_j = w Σ_k v_k e^{sign·2πi x_k·(M y_j)}` where `x_k` runs over
/// `src`, `y_j` over `out` and `w` is the cell volume of `src`. Targets
/// `M y_j` outside the dual box of `src` evaluate to zero.
pub(crate) fn eval_linear(
    values: &[Complex64],
    src: &Grid,
    sign: f64,
    map: &Mat,
    out: &Grid,
) -> Vec<Complex64> {
    let d = src.dim();
    debug_assert_eq!(out.dim(), d);
    debug_assert_eq!((map.nrows(), map.ncols()), (d, d));
    let weight = src.cell_volume();
    let limit = src.nyquist();
    let inside = |p: f64| p >= -limit && p < limit;
    let n_src = src.n();
    let n_out = out.n();

    if is_diagonal(map) {
        let czts: Vec<Czt> = (0..d)
            .map(|axis| {
                let a = sign * map[(axis, axis)];
                Czt::new(n_src, n_out, src.coord(0), src.spacing(), a * out.coord(0), a * out.spacing())
            })
            .collect();
        let targets: Vec<Vec<bool>> = (0..d)
            .map(|axis| (0..n_out).map(|j| inside(map[(axis, axis)] * out.coord(j))).collect())
            .collect();
        if d == 1 {
            return czts[0]
                .apply(values)
                .into_iter()
                .zip(&targets[0])
                .map(|(v, &ok)| if ok { v * weight } else { Complex64::new(0.0, 0.0) })
                .collect();
        }
        let rows: Vec<Vec<Complex64>> = crate::parallel::map_indexed(n_src, |i| {
            czts[1].apply(&values[i * n_src..(i + 1) * n_src])
        });
        let cols: Vec<Vec<Complex64>> = crate::parallel::map_indexed(n_out, |j| {
            let column: Vec<Complex64> = rows.iter().map(|r| r[j]).collect();
            czts[0].apply(&column)
        });
        let mut result = vec![Complex64::new(0.0, 0.0); n_out * n_out];
        for i in 0..n_out {
            for j in 0..n_out {
                if targets[0][i] && targets[1][j] {
                    result[i * n_out + j] = cols[j][i] * weight;
                }
            }
        }
        return result;
    }

    // General two-dimensional map: direct sum with the kernel factored
    // per axis, O(N^2) per target.
    let xs = src.axis();
    crate::parallel::map_indexed(out.len(), |j| {
        let y = out.point(j);
        let p0 = map[(0, 0)] * y[0] + map[(0, 1)] * y[1];
        let p1 = map[(1, 0)] * y[0] + map[(1, 1)] * y[1];
        if !(inside(p0) && inside(p1)) {
            return Complex64::new(0.0, 0.0);
        }
        let u0: Vec<Complex64> = xs.iter().map(|&x| cis_turns(sign * x, p0)).collect();
        let u1: Vec<Complex64> = xs.iter().map(|&x| cis_turns(sign * x, p1)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (k0, row) in values.chunks(n_src).enumerate() {
            let inner: Complex64 = row.iter().zip(&u1).map(|(v, u)| v * u).sum();
            acc += u0[k0] * inner;
        }
        acc * weight
    })
}

/// Trigonometric interpolant with spectrum `spec` (a field on a frequency
/// grid) at the points `M y_j`, `y_j` on `out`.
pub(crate) fn inverse_at(spec: &SampledField, map: &Mat, out: &Grid) -> Vec<Complex64> {
    eval_linear(spec.values(), spec.grid(), 1.0, map, out)
}
