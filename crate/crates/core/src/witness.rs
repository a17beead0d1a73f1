//! Gaussian-chirp mixtures `Σ c_j M_{ξ_j} T_{x_j} (chirp · Gaussian)`, the
//! test family used by the experiments. Every member has a closed-form
//! Fourier transform and a closed-form dilation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Grid, SampledField};

/// `c e^{2πi ξ0·t} e^{-π(σ² - iR)|t - x0|²}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChirpAtom {
    pub amplitude: Complex64,
    pub center: Vec<f64>,
    pub frequency: Vec<f64>,
    pub sigma: f64,
    pub chirp: f64,
}

impl ChirpAtom {
    fn z(&self) -> Complex64 {
        Complex64::new(self.sigma * self.sigma, -self.chirp)
    }

    pub fn value(&self, t: &[f64]) -> Complex64 {
        let mut r2 = 0.0;
        let mut phase = 0.0;
        for i in 0..self.center.len() {
            let s = t[i] - self.center[i];
            r2 += s * s;
            phase += self.frequency[i] * t[i];
        }
        self.amplitude * (-PI * self.z() * r2).exp() * Complex64::from_polar(1.0, 2.0 * PI * phase)
    }

    /// `e^{-2πi x0·(ξ - ξ0)} z^{-d/2} e^{-π|ξ - ξ0|²/z}` times the amplitude.
    pub fn fourier_value(&self, xi: &[f64]) -> Complex64 {
        let d = self.center.len();
        let z = self.z();
        let mut r2 = 0.0;
        let mut phase = 0.0;
        for i in 0..d {
            let s = xi[i] - self.frequency[i];
            r2 += s * s;
            phase += self.center[i] * s;
        }
        self.amplitude
            * z.powf(-0.5 * d as f64)
            * (-PI * r2 / z).exp()
            * Complex64::from_polar(1.0, -2.0 * PI * phase)
    }

    /// `t ↦ atom(λt)`.
    pub fn dilated(&self, lambda: f64) -> Self {
        Self {
            amplitude: self.amplitude,
            center: self.center.iter().map(|c| c / lambda).collect(),
            frequency: self.frequency.iter().map(|f| f * lambda).collect(),
            sigma: self.sigma * lambda.abs(),
            chirp: self.chirp * lambda * lambda,
        }
    }

    /// Radius beyond which the envelope is below `1e-17`.
    pub fn radius(&self) -> f64 {
        (39.0 / (PI * self.sigma * self.sigma)).sqrt()
    }

    /// Largest local frequency on the support radius, plus the envelope's
    /// own bandwidth.
    pub fn bandwidth(&self) -> f64 {
        let f0 = self.frequency.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = self.radius();
        f0 + self.chirp.abs() * r + self.sigma * (39.0 / PI).sqrt()
    }
}

/// Parameter ranges for random witnesses.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessRanges {
    pub atoms: usize,
    pub sigma: (f64, f64),
    pub chirp: (f64, f64),
    pub center: (f64, f64),
    pub frequency: (f64, f64),
}

impl Default for WitnessRanges {
    fn default() -> Self {
        Self {
            atoms: 3,
            sigma: (0.7, 1.3),
            chirp: (-1.0, 1.0),
            center: (-1.5, 1.5),
            frequency: (-1.5, 1.5),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    dim: usize,
    atoms: Vec<ChirpAtom>,
}

impl Witness {
    pub fn new(dim: usize, atoms: Vec<ChirpAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Domain("a witness needs at least one atom".into()));
        }
        if atoms.iter().any(|a| a.center.len() != dim || a.frequency.len() != dim) {
            return Err(Error::Dimension(format!("all atoms must live in dimension {dim}")));
        }
        if atoms.iter().any(|a| !(a.sigma > 0.0)) {
            return Err(Error::Domain("atom widths must be positive".into()));
        }
        Ok(Self { dim, atoms })
    }

    /// The standard Gaussian `e^{-π|t|²}`.
    pub fn gaussian(dim: usize) -> Self {
        Self {
            dim,
            atoms: vec![ChirpAtom {
                amplitude: Complex64::new(1.0, 0.0),
                center: vec![0.0; dim],
                frequency: vec![0.0; dim],
                sigma: 1.0,
                chirp: 0.0,
            }],
        }
    }

    pub fn random(dim: usize, ranges: &WitnessRanges, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |(lo, hi): (f64, f64)| if lo == hi { lo } else { rng.gen_range(lo..hi) };
        let atoms = (0..ranges.atoms.max(1))
            .map(|_| {
                let amplitude = Complex64::new(draw((-1.0, 1.0)), draw((-1.0, 1.0)));
                let center = (0..dim).map(|_| draw(ranges.center)).collect();
                let frequency = (0..dim).map(|_| draw(ranges.frequency)).collect();
                ChirpAtom {
                    amplitude,
                    center,
                    frequency,
                    sigma: draw(ranges.sigma),
                    chirp: draw(ranges.chirp),
                }
            })
            .collect();
        Self { dim, atoms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[ChirpAtom] {
        &self.atoms
    }

    pub fn dilated(&self, lambda: f64) -> Self {
        Self {
            dim: self.dim,
            atoms: self.atoms.iter().map(|a| a.dilated(lambda)).collect(),
        }
    }

    pub fn value(&self, t: &[f64]) -> Complex64 {
        self.atoms.iter().map(|a| a.value(t)).sum()
    }

    pub fn fourier_value(&self, xi: &[f64]) -> Complex64 {
        self.atoms.iter().map(|a| a.fourier_value(xi)).sum()
    }

    pub fn sample(&self, grid: &Grid) -> Result<SampledField> {
        self.check_grid(grid)?;
        Ok(SampledField::from_fn(*grid, |t| self.value(t)))
    }

    /// The exact transform sampled on the frequency grid dual to `grid`.
    pub fn sample_fourier(&self, grid: &Grid) -> Result<SampledField> {
        self.check_grid(grid)?;
        Ok(SampledField::from_fn(grid.dual(), |xi| self.fourier_value(xi)))
    }

    fn check_grid(&self, grid: &Grid) -> Result<()> {
        if grid.dim() != self.dim {
            return Err(Error::Dimension(format!(
                "witness dimension {} vs grid dimension {}",
                self.dim,
                grid.dim()
            )));
        }
        Ok(())
    }

    /// Whether every atom's support and bandwidth fit the grid with margin.
    pub fn fits(&self, grid: &Grid) -> bool {
        self.atoms.iter().all(|a| {
            let reach = a.center.iter().fold(0.0_f64, |m, c| m.max(c.abs())) + a.radius();
            reach < 0.5 * grid.side() && a.bandwidth() < grid.nyquist()
        })
    }
}
