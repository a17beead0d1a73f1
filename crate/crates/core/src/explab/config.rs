use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::Grid;
use crate::metaplectic::HamiltonianKind;
use crate::tfnorm::{Exponent, IndexPair};

/// Which end of the dilation sweep an exponent describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Large,
    Small,
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "large" => Ok(Direction::Large),
            "small" => Ok(Direction::Small),
            other => Err(Error::Parse(format!("unknown direction `{other}`"))),
        }
    }
}

/// Run configuration, read from `key=value` lines.
///
/// Recognized keys: `d`, `N`, `L`, `p`, `q`, `r`, `kind`, `T`, `steps`,
/// `ensemble`, `seed`, `out`, plus `sweep` (comma-separated parameter
/// values), `direction`, `fit` (`lo,hi`), `width` (dilation of the Gaussian
/// witness), `extent` (position extent of the measured numerator) and
/// `exploratory`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub n: usize,
    pub side: f64,
    pub p: Exponent,
    pub q: Exponent,
    pub r: Exponent,
    pub kind: String,
    pub horizon: f64,
    pub steps: usize,
    pub ensemble: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub sweep: Vec<f64>,
    pub direction: Direction,
    pub fit: Option<(f64, f64)>,
    pub width: f64,
    pub extent: Option<f64>,
    pub exploratory: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            n: 512,
            side: 16.0,
            p: Exponent::int(2).expect("2 is a valid exponent"),
            q: Exponent::int(2).expect("2 is a valid exponent"),
            r: Exponent::infinity(),
            kind: "harmonic".into(),
            horizon: 1.0,
            steps: 64,
            ensemble: 32,
            seed: 0,
            out: None,
            sweep: Vec::new(),
            direction: Direction::Large,
            fit: None,
            width: 1.0,
            extent: None,
            exploratory: false,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad value `{value}` for `{key}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_num(key, s))
        .collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies one override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "d" => self.dim = parse_num(key, value)?,
            "N" => self.n = parse_num(key, value)?,
            "L" => self.side = parse_num(key, value)?,
            "p" => self.p = value.parse()?,
            "q" => self.q = value.parse()?,
            "r" => self.r = value.parse()?,
            "kind" => self.kind = value.to_string(),
            "T" => self.horizon = parse_num(key, value)?,
            "steps" => self.steps = parse_num(key, value)?,
            "ensemble" => self.ensemble = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "sweep" => self.sweep = parse_list(key, value)?,
            "direction" => self.direction = value.parse()?,
            "fit" => {
                let v = parse_list(key, value)?;
                if v.len() != 2 {
                    return Err(Error::Parse("fit expects `lo,hi`".into()));
                }
                self.fit = Some((v[0], v[1]));
            }
            "width" => self.width = parse_num(key, value)?,
            "extent" => self.extent = Some(parse_num(key, value)?),
            "exploratory" => self.exploratory = parse_num(key, value)?,
            other => return Err(Error::Parse(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.n, self.side)
    }

    pub fn index_pair(&self) -> IndexPair {
        IndexPair::new(self.p, self.q)
    }

    pub fn hamiltonian(&self) -> Result<HamiltonianKind> {
        HamiltonianKind::parse(&self.kind, self.dim)
    }

    /// The same run with `N` and the time-step count doubled.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n,
            steps: 2 * self.steps,
            ..self.clone()
        }
    }
}
