//! Metaplectic operators `μ(𝒮)` on sampled fields and the propagators
//! `e^{itH}` of quadratic Hamiltonians.
//!
//! Convention: `μ(J) = (-i)^{d/2} F`, lower-triangular factors act as
//! `e^{πi Cx·x}` and block-diagonal ones as `(det A)^{-1/2} f(A⁻¹x)`.
//! Outputs are canonical only up to a global unimodular phase.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{eval_linear, fourier, Direction, Grid, SampledField};
use crate::matrix::{bilinear, complex_det, inverse, is_symmetric, max_abs, Mat};
use crate::parallel::{map_indexed, pairwise_sum};
use crate::symplectic::{exp_scaled, AlgebraElement, SymplecticMatrix};

/// Default exclusion radius around propagator kernel singularities.
pub const EPS_T: f64 = 1e-3;

/// Alias indicator below which a factorized route is accepted as is.
pub const ROUTE_ALIAS_LIMIT: f64 = 1e-12;

/// Largest grid the dense-kernel route accepts per dimension.
pub const DENSE_LIMIT_1D: usize = 1024;
pub const DENSE_LIMIT_2D: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Route {
    /// Transform, chirp multiplier, inverse transform at `A⁻¹x`, chirp.
    FourierSide,
    /// Chirp, transform evaluated at `B⁻¹x`, chirp.
    BInvertible,
    /// Chirp convolution evaluated at `A⁻¹x`, chirp.
    Hybrid,
    LowerTriangular,
    BlockDiagonal,
    /// Direct quadrature of the kernel integral.
    DenseKernel,
}

impl Route {
    pub const ALL: [Route; 6] = [
        Route::BInvertible,
        Route::FourierSide,
        Route::Hybrid,
        Route::LowerTriangular,
        Route::BlockDiagonal,
        Route::DenseKernel,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Route::FourierSide => "fourier-side",
            Route::BInvertible => "b-invertible",
            Route::Hybrid => "hybrid",
            Route::LowerTriangular => "lower-triangular",
            Route::BlockDiagonal => "block-diagonal",
            Route::DenseKernel => "dense-kernel",
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fourier-side" | "f4" => Ok(Route::FourierSide),
            "b-invertible" | "f3" => Ok(Route::BInvertible),
            "hybrid" | "f5" => Ok(Route::Hybrid),
            "lower-triangular" | "lower" => Ok(Route::LowerTriangular),
            "block-diagonal" | "dilation" => Ok(Route::BlockDiagonal),
            "dense-kernel" | "dense" => Ok(Route::DenseKernel),
            other => Err(Error::Parse(format!("unknown route `{other}`"))),
        }
    }
}

fn det_nonzero(m: &Mat, scale: f64) -> bool {
    let det = m.determinant();
    det.is_finite() && det.abs() > 1e-12 * scale.powi(m.nrows() as i32).max(1e-300)
}

fn is_zero(m: &Mat, scale: f64) -> bool {
    max_abs(m) <= 1e-14 * scale
}

/// Routes whose structural preconditions hold for `s`.
pub fn valid_routes(s: &SymplecticMatrix) -> Vec<Route> {
    let scale = max_abs(s.matrix()).max(1.0);
    let d = s.dim();
    let id = Mat::identity(d, d);
    let (a, b, c, dd) = (s.a(), s.b(), s.c(), s.d());
    let a_ok = det_nonzero(&a, scale);
    let b_ok = det_nonzero(&b, scale);
    Route::ALL
        .into_iter()
        .filter(|route| match route {
            Route::BInvertible | Route::DenseKernel => b_ok,
            Route::FourierSide => a_ok,
            Route::Hybrid => a_ok && b_ok,
            Route::LowerTriangular => {
                is_zero(&(&a - &id), 1.0)
                    && is_zero(&(&dd - &id), 1.0)
                    && is_zero(&b, scale)
                    && is_symmetric(&c, 1e-12 * scale)
            }
            Route::BlockDiagonal => is_zero(&b, scale) && is_zero(&c, scale),
        })
        .collect()
}

/// Branch record for the constant prefactor of a route.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseConvention {
    /// The complex constant multiplying the route's integral.
    pub prefactor: Complex64,
    /// Whether the determinant square root needed the principal branch of a
    /// negative (or complex) argument.
    pub principal_branch_used: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetaplecticPlan {
    matrix: SymplecticMatrix,
    route: Route,
    phase: PhaseConvention,
}

fn principal_sqrt_inv(det: Complex64) -> (Complex64, bool) {
    (det.sqrt().inv(), det.im != 0.0 || det.re < 0.0)
}

fn i_pow_half_d(d: usize, sign: f64) -> Complex64 {
    Complex64::from_polar(1.0, sign * PI / 4.0 * d as f64)
}

impl MetaplecticPlan {
    /// A plan on an explicit route; errors if the route's preconditions fail.
    pub fn with_route(matrix: &SymplecticMatrix, route: Route) -> Result<Self> {
        let valid = valid_routes(matrix);
        if !valid.contains(&route) {
            let names: Vec<&str> = valid.iter().map(Route::name).collect();
            return Err(Error::Route {
                requested: route.name().into(),
                valid: if names.is_empty() { "none".into() } else { names.join(", ") },
            });
        }
        let d = matrix.dim();
        let (a, b) = (matrix.a(), matrix.b());
        let phase = match route {
            Route::BInvertible | Route::DenseKernel => {
                let (inv, branch) = principal_sqrt_inv(Complex64::new(b.determinant(), 0.0));
                PhaseConvention {
                    prefactor: i_pow_half_d(d, -1.0) * inv,
                    principal_branch_used: branch,
                }
            }
            Route::FourierSide | Route::BlockDiagonal => {
                let (inv, branch) = principal_sqrt_inv(Complex64::new(a.determinant(), 0.0));
                PhaseConvention {
                    prefactor: inv,
                    principal_branch_used: branch,
                }
            }
            Route::Hybrid => {
                let (inv_a, branch_a) = principal_sqrt_inv(Complex64::new(a.determinant(), 0.0));
                let p = inverse(&b, "B")? * &a;
                let det = complex_det(&Mat::zeros(d, d), &(-p));
                PhaseConvention {
                    prefactor: inv_a * det.sqrt(),
                    principal_branch_used: branch_a || det.re < 0.0,
                }
            }
            Route::LowerTriangular => PhaseConvention {
                prefactor: Complex64::new(1.0, 0.0),
                principal_branch_used: false,
            },
        };
        Ok(Self {
            matrix: matrix.clone(),
            route,
            phase,
        })
    }

    /// Chooses a route for applying `matrix` to `f`: exact special forms
    /// first, then whichever factorized route has a negligible alias
    /// indicator (preferring the `B`-invertible one), else the factorized
    /// route with the smaller indicator.
    pub fn auto(matrix: &SymplecticMatrix, f: &SampledField) -> Result<Self> {
        let valid = valid_routes(matrix);
        for special in [Route::BlockDiagonal, Route::LowerTriangular] {
            if valid.contains(&special) {
                return Self::with_route(matrix, special);
            }
        }
        let mut scored = Vec::new();
        for route in [Route::BInvertible, Route::FourierSide] {
            if valid.contains(&route) {
                let risk = route_alias_indicator(matrix, route, f)?;
                if risk <= ROUTE_ALIAS_LIMIT {
                    return Self::with_route(matrix, route);
                }
                scored.push((route, risk));
            }
        }
        let (route, risk) = scored
            .into_iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::Route {
                requested: "auto".into(),
                valid: "none".into(),
            })?;
        log::warn!("no alias-free route; using {route} with alias indicator {risk:.3e}");
        Self::with_route(matrix, route)
    }

    pub fn matrix(&self) -> &SymplecticMatrix {
        &self.matrix
    }

    pub fn route(&self) -> Route {
        self.route
    }

    pub fn phase(&self) -> PhaseConvention {
        self.phase
    }

    pub fn execute(&self, f: &SampledField) -> Result<SampledField> {
        if f.dim() != self.matrix.dim() {
            return Err(Error::Dimension(format!(
                "field dimension {} does not match Sp({})",
                f.dim(),
                self.matrix.dim()
            )));
        }
        let out = match self.route {
            Route::BInvertible => b_invertible(&self.matrix, f)?,
            Route::FourierSide => fourier_side(&self.matrix, f)?,
            Route::Hybrid => hybrid(&self.matrix, f)?,
            Route::DenseKernel => dense_kernel(&self.matrix, f)?,
            Route::LowerTriangular => chirp_multiply(f, &self.matrix.c(), 1.0),
            Route::BlockDiagonal => {
                let a_inv = inverse(&self.matrix.a(), "A")?;
                let spec = fourier(f, Direction::Forward);
                let values = eval_linear(spec.values(), spec.grid(), 1.0, &a_inv, f.grid());
                SampledField::new(*f.grid(), values)?
            }
        };
        Ok(out.scale(self.phase.prefactor))
    }
}

/// `f(x) e^{sign·πi x·Mx}`.
fn chirp_multiply(f: &SampledField, m: &Mat, sign: f64) -> SampledField {
    let g = *f.grid();
    let d = g.dim();
    let values: Vec<Complex64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(idx, &v)| {
            let x = g.point(idx);
            v * Complex64::from_polar(1.0, sign * PI * bilinear(m, &x[..d], &x[..d]))
        })
        .collect();
    SampledField::new(g, values).expect("chirp multiplication keeps samples finite")
}

fn b_invertible(s: &SymplecticMatrix, f: &SampledField) -> Result<SampledField> {
    let b_inv = inverse(&s.b(), "B")?;
    let inner = chirp_multiply(f, &(&b_inv * s.a()), 1.0);
    let values = eval_linear(inner.values(), inner.grid(), -1.0, &b_inv, f.grid());
    let g = SampledField::new(*f.grid(), values)?;
    Ok(chirp_multiply(&g, &(s.d() * &b_inv), 1.0))
}

fn fourier_side(s: &SymplecticMatrix, f: &SampledField) -> Result<SampledField> {
    let a_inv = inverse(&s.a(), "A")?;
    let spec = fourier(f, Direction::Forward);
    let filtered = chirp_multiply(&spec, &(&a_inv * s.b()), -1.0);
    let values = eval_linear(filtered.values(), filtered.grid(), 1.0, &a_inv, f.grid());
    let g = SampledField::new(*f.grid(), values)?;
    Ok(chirp_multiply(&g, &(s.c() * &a_inv), 1.0))
}

fn hybrid(s: &SymplecticMatrix, f: &SampledField) -> Result<SampledField> {
    let grid = *f.grid();
    let d = grid.dim();
    let a_inv = inverse(&s.a(), "A")?;
    let kernel = inverse(&s.b(), "B")? * s.a();
    let weight = grid.cell_volume();
    let fv = f.values();
    let values = map_indexed(grid.len(), |j| {
        let x = grid.point(j);
        let p = crate::matrix::mat_vec(&a_inv, &x[..d]);
        let mut re = Vec::with_capacity(fv.len());
        let mut im = Vec::with_capacity(fv.len());
        for (k, v) in fv.iter().enumerate() {
            let y = grid.point(k);
            let mut r = [0.0; 2];
            for i in 0..d {
                r[i] = p[i] - y[i];
            }
            let term = v * Complex64::from_polar(1.0, PI * bilinear(&kernel, &r[..d], &r[..d]));
            re.push(term.re);
            im.push(term.im);
        }
        Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) * weight
    });
    let g = SampledField::new(grid, values)?;
    Ok(chirp_multiply(&g, &(s.c() * &a_inv), 1.0))
}

fn dense_kernel(s: &SymplecticMatrix, f: &SampledField) -> Result<SampledField> {
    let grid = *f.grid();
    let d = grid.dim();
    let limit = if d == 1 { DENSE_LIMIT_1D } else { DENSE_LIMIT_2D };
    if grid.n() > limit {
        return Err(Error::Precondition(format!(
            "dense-kernel route is limited to N <= {limit} in dimension {d}"
        )));
    }
    let b_inv = inverse(&s.b(), "B")?;
    let outer = s.d() * &b_inv;
    let inner_form = &b_inv * s.a();
    let weight = grid.cell_volume();
    let fv = f.values();
    let pre: Vec<Complex64> = (0..grid.len())
        .map(|k| {
            let y = grid.point(k);
            fv[k] * Complex64::from_polar(1.0, PI * bilinear(&inner_form, &y[..d], &y[..d]))
        })
        .collect();
    let values = map_indexed(grid.len(), |j| {
        let x = grid.point(j);
        let bx = crate::matrix::mat_vec(&b_inv, &x[..d]);
        let mut re = Vec::with_capacity(pre.len());
        let mut im = Vec::with_capacity(pre.len());
        for (k, v) in pre.iter().enumerate() {
            let y = grid.point(k);
            let dot: f64 = (0..d).map(|i| y[i] * bx[i]).sum();
            let term = v * Complex64::from_polar(1.0, -2.0 * PI * dot);
            re.push(term.re);
            im.push(term.im);
        }
        let phase = PI * bilinear(&outer, &x[..d], &x[..d]);
        Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) * weight * Complex64::from_polar(1.0, phase)
    });
    SampledField::new(grid, values)
}

fn energy_fraction(f: &SampledField, outside: impl Fn(&[f64]) -> bool) -> f64 {
    let g = f.grid();
    let d = g.dim();
    let mut total = Vec::with_capacity(g.len());
    let mut lost = Vec::new();
    for (idx, v) in f.values().iter().enumerate() {
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
}

fn edge_band(g: &Grid, x: &[f64]) -> bool {
    let half = 0.5 * g.side();
    let band = g.side() / 16.0;
    x.iter().any(|v| v.abs() >= half - band)
}

fn outside_box(g: &Grid, m: &Mat, x: &[f64]) -> bool {
    !g.contains(&crate::matrix::mat_vec(m, x))
}

/// Energy fraction a factorized route may alias or truncate for this input.
///
/// `BInvertible`: spectrum of the chirped input near the Nyquist edge, plus
/// spectral energy at frequencies `ξ` whose output location `Bξ` leaves the
/// box. `FourierSide`: the periodic intermediate near the box edge (wrap
/// around), plus its energy at points `y` whose output location `Ay`
/// leaves the box.
pub fn route_alias_indicator(s: &SymplecticMatrix, route: Route, f: &SampledField) -> Result<f64> {
    let grid = *f.grid();
    match route {
        Route::BInvertible => {
            let b = s.b();
            let b_inv = inverse(&b, "B")?;
            let chirped = chirp_multiply(f, &(&b_inv * s.a()), 1.0);
            let spec = fourier(&chirped, Direction::Forward);
            let dual = *spec.grid();
            let edge = energy_fraction(&spec, |xi| edge_band(&dual, xi));
            let lost = energy_fraction(&spec, |xi| outside_box(&grid, &b, xi));
            Ok(edge.max(lost))
        }
        Route::FourierSide => {
            let a = s.a();
            let a_inv = inverse(&a, "A")?;
            let spec = fourier(f, Direction::Forward);
            let filtered = chirp_multiply(&spec, &(&a_inv * s.b()), -1.0);
            let mid = fourier(&filtered, Direction::Inverse);
            let mid = SampledField::new(grid, mid.into_values())?;
            let edge = energy_fraction(&mid, |y| edge_band(&grid, y));
            let lost = energy_fraction(&mid, |y| outside_box(&grid, &a, y));
            Ok(edge.max(lost))
        }
        _ => Ok(0.0),
    }
}

/// `μ(𝒮) f` on the given route, or an automatically chosen one.
pub fn apply(s: &SymplecticMatrix, f: &SampledField, route: Option<Route>) -> Result<SampledField> {
    let plan = match route {
        Some(r) => MetaplecticPlan::with_route(s, r)?,
        None => MetaplecticPlan::auto(s, f)?,
    };
    plan.execute(f)
}

/// The three quadratic Hamiltonians with closed-form flows.
#[derive(Clone, Debug, PartialEq)]
pub enum HamiltonianKind {
    /// `H = -Δ/4π + π|x|²`.
    Harmonic,
    /// `H = -Δ/4π - π|x|²`.
    Repulsive,
    /// `H = -B∇·∇/4π` for symmetric `B`.
    Free(Mat),
}

impl HamiltonianKind {
    pub fn name(&self) -> &'static str {
        match self {
            HamiltonianKind::Harmonic => "harmonic",
            HamiltonianKind::Repulsive => "repulsive",
            HamiltonianKind::Free(_) => "free",
        }
    }

    /// Parses `harmonic`, `repulsive` or `free`; `free` uses `B = I`.
    pub fn parse(s: &str, d: usize) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "harmonic" => Ok(HamiltonianKind::Harmonic),
            "repulsive" => Ok(HamiltonianKind::Repulsive),
            "free" => Ok(HamiltonianKind::Free(Mat::identity(d, d))),
            other => Err(Error::Parse(format!("unknown Hamiltonian kind `{other}`"))),
        }
    }

    pub fn generator(&self, d: usize) -> Result<AlgebraElement> {
        match self {
            HamiltonianKind::Harmonic => Ok(AlgebraElement::harmonic(d)),
            HamiltonianKind::Repulsive => Ok(AlgebraElement::repulsive(d)),
            HamiltonianKind::Free(b) => {
                if b.nrows() != d {
                    return Err(Error::Dimension(format!(
                        "free-particle matrix is {}x{}, field dimension is {d}",
                        b.nrows(),
                        b.ncols()
                    )));
                }
                AlgebraElement::free(b)
            }
        }
    }

    /// Errors when `t` lies within `eps_t` of the kernel singular set.
    pub fn check_time(&self, t: f64, eps_t: f64) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("time {t} is not finite")));
        }
        match self {
            HamiltonianKind::Harmonic if t.sin().abs() < eps_t => Err(Error::Singular(format!(
                "t = {t} is within {eps_t} of the excluded set {{kπ}}"
            ))),
            HamiltonianKind::Repulsive | HamiltonianKind::Free(_) if t.abs() < eps_t => Err(
                Error::Singular(format!("t = {t} is within {eps_t} of the excluded set {{0}}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn flow(&self, d: usize, t: f64) -> Result<SymplecticMatrix> {
        exp_scaled(&self.generator(d)?, t)
    }
}

/// `u(t) = μ(e^{t𝒜}) u₀`.
pub fn propagate(kind: &HamiltonianKind, t: f64, u0: &SampledField, eps_t: f64) -> Result<SampledField> {
    propagate_with(kind, t, u0, eps_t, None)
}

pub fn propagate_with(
    kind: &HamiltonianKind,
    t: f64,
    u0: &SampledField,
    eps_t: f64,
    route: Option<Route>,
) -> Result<SampledField> {
    kind.check_time(t, eps_t)?;
    apply(&kind.flow(u0.dim(), t)?, u0, route)
}

/// `|det B(t)|^{-1/2}`, the `L¹ → L^∞` bound of the propagator kernel
/// (`|sin t|^{-d/2}` harmonic, `|sinh t|^{-d/2}` repulsive).
pub fn classical_dispersive_bound(kind: &HamiltonianKind, d: usize, t: f64, eps_t: f64) -> Result<f64> {
    kind.check_time(t, eps_t)?;
    Ok(kind.flow(d, t)?.b().determinant().abs().powf(-0.5))
}

/// `sup|u(t)| / (bound(t) ‖u₀‖_{L¹})`.
pub fn classical_dispersive_check(kind: &HamiltonianKind, t: f64, u0: &SampledField, eps_t: f64) -> Result<f64> {
    let bound = classical_dispersive_bound(kind, u0.dim(), t, eps_t)?;
    let l1 = u0.l1_norm();
    if l1 == 0.0 {
        return Err(Error::Domain("initial datum is zero".into()));
    }
    let u = propagate(kind, t, u0, eps_t)?;
    Ok(u.max_abs() / (bound * l1))
}
