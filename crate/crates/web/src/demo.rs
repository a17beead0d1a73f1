//! The computations behind the page, in plain Rust so they can be tested
//! natively.

use num_complex::Complex64;
use tfmeta::bounds::{classify_region, mu1, mu2, rational_to_f64};
use tfmeta::explab::{dispersive_experiment, ChirpAtom, ExperimentConfig, Witness};
use tfmeta::metaplectic::{propagate, HamiltonianKind, EPS_T};
use tfmeta::tfnorm::{default_window, stft_on, Exponent, IndexPair, Rational, StftLattice};
use tfmeta::{Grid, Result};

/// Row-major samples on a rectangle; row 0 is the bottom edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid2 {
    pub cols: usize,
    pub rows: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub data: Vec<f64>,
}

/// Initial datum of the spectrogram view: one chirped Gaussian packet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Packet {
    pub sigma: f64,
    pub chirp: f64,
    pub center: f64,
    pub frequency: f64,
}

impl Packet {
    fn witness(&self) -> Result<Witness> {
        Witness::new(
            1,
            vec![ChirpAtom {
                amplitude: Complex64::new(1.0, 0.0),
                center: vec![self.center],
                frequency: vec![self.frequency],
                sigma: self.sigma,
                chirp: self.chirp,
            }],
        )
    }
}

const SIDE: f64 = 16.0;
const N: usize = 256;

/// `|V_φ u(t)|` on `[-4, 4]²` for `u(0)` a packet, after the flow of `kind`
/// for time `t` (`t = 0` shows the packet itself).
pub fn spectrogram(kind: &str, t: f64, packet: Packet) -> Result<Grid2> {
    let grid = Grid::new(1, N, SIDE)?;
    let u0 = packet.witness()?.sample(&grid)?;
    let u = if t == 0.0 {
        u0
    } else {
        propagate(&HamiltonianKind::parse(kind, 1)?, t, &u0, EPS_T)?
    };
    let lattice = StftLattice {
        dx: 2.0 * grid.spacing(),
        dxi: 1.0 / SIDE,
        x_extent: Some(4.0),
    };
    let s = stft_on(&u, &default_window(&grid), &lattice)?;
    let xs: Vec<usize> = (0..s.x_axis().len()).collect();
    let xis: Vec<usize> = (0..s.xi_axis().len())
        .filter(|&k| s.xi_axis()[k].abs() <= 4.0 + 1e-9)
        .collect();
    let mut data = Vec::with_capacity(xs.len() * xis.len());
    for &j in &xis {
        for &i in &xs {
            data.push(s.value(i, j).norm());
        }
    }
    Ok(Grid2 {
        cols: xs.len(),
        rows: xis.len(),
        x_range: (s.x_axis()[0], s.x_axis()[xs.len() - 1]),
        y_range: (s.xi_axis()[xis[0]], s.xi_axis()[*xis.last().unwrap()]),
        data,
    })
}

/// `μ₁` (large) or `μ₂` (small) on the `(1/p, 1/q)` square at `res + 1`
/// points per side.
pub fn mu_map(res: usize, large: bool) -> Result<Grid2> {
    let res = res.max(1) as i64;
    let mut data = Vec::with_capacity(((res + 1) * (res + 1)) as usize);
    for j in 0..=res {
        for i in 0..=res {
            let idx = IndexPair::from_inverses(Rational::new(i, res), Rational::new(j, res))?;
            let mu = if large { mu1(idx)? } else { mu2(idx)? };
            data.push(rational_to_f64(mu));
        }
    }
    Ok(Grid2 {
        cols: res as usize + 1,
        rows: res as usize + 1,
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
        data,
    })
}

/// `μ₁`, `μ₂` and the regions at `(1/p, 1/q)`, snapped to the nearest
/// multiple of `1/den`.
pub fn index_summary(ip: f64, iq: f64, den: i64) -> Result<String> {
    let snap = |v: f64| Rational::new((v.clamp(0.0, 1.0) * den as f64).round() as i64, den);
    let idx = IndexPair::from_inverses(snap(ip), snap(iq))?;
    let regions: Vec<String> = classify_region(idx)?.iter().map(|r| r.to_string()).collect();
    Ok(format!(
        "(p, q) = {idx}: mu1 = {}, mu2 = {}, regions {}",
        mu1(idx)?,
        mu2(idx)?,
        regions.join(" ")
    ))
}

/// Measured `‖u(t)‖_{W(FL^{r′}, L^r)}` for a Gaussian of the given width
/// next to the predicted profile scaled by `‖u(0)‖_{W(FL^r, L^{r′})}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub times: Vec<f64>,
    pub measured: Vec<f64>,
    pub predicted: Vec<f64>,
    pub slope: f64,
    pub profile_slope: f64,
}

pub fn dispersive_curve(kind: &str, width: f64, r: &str, times: Vec<f64>) -> Result<Curve> {
    let cfg = ExperimentConfig {
        n: N,
        side: SIDE,
        width,
        ensemble: 0,
        sweep: times,
        ..ExperimentConfig::default()
    };
    let r: Exponent = r.parse()?;
    let res = dispersive_experiment(&HamiltonianKind::parse(kind, 1)?, r, &cfg)?;
    let rows: Vec<_> = res.rows.iter().filter(|row| row.experiment == "dispersive").collect();
    Ok(Curve {
        times: rows.iter().map(|row| row.param).collect(),
        measured: rows.iter().map(|row| row.value).collect(),
        predicted: rows.iter().map(|row| row.predicted).collect(),
        slope: res.report.fitted,
        profile_slope: res.report.predicted,
    })
}
