//! Linear algebra for the symplectic group `Sp(d, R)` and its Lie algebra.
//!
//! Matrices are stored as dense `2d × 2d` arrays and split into `d × d`
//! quadrants `(A, B; C, D)` by contiguous blocks. The canonical form is
//! `J = (0, I; -I, 0)`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::{is_symmetric, max_abs, Mat};

/// Default tolerance for group and algebra membership checks.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

pub fn canonical_j(d: usize) -> Mat {
    let mut j = Mat::zeros(2 * d, 2 * d);
    for i in 0..d {
        j[(i, d + i)] = 1.0;
        j[(d + i, i)] = -1.0;
    }
    j
}

fn half_dim(m: &Mat) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 || m.nrows() % 2 != 0 {
        return Err(Error::Dimension(format!(
            "expected an even side length, got {}",
            m.nrows()
        )));
    }
    Ok(m.nrows() / 2)
}

/// `max |ᵗM J M - J|`.
pub fn symplectic_defect(m: &Mat) -> Result<f64> {
    let d = half_dim(m)?;
    let j = canonical_j(d);
    Ok(max_abs(&(m.transpose() * &j * m - j)))
}

/// True iff `max |ᵗM J M - J| <= tol`.
pub fn is_symplectic(m: &Mat, tol: f64) -> Result<bool> {
    Ok(symplectic_defect(m)? <= tol)
}

/// True iff `max |ᵗ𝒜 J + J 𝒜| <= tol`, i.e. `𝒜 J` is symmetric.
pub fn is_algebra_element(m: &Mat, tol: f64) -> Result<bool> {
    let d = half_dim(m)?;
    let j = canonical_j(d);
    Ok(max_abs(&(m.transpose() * &j + &j * m)) <= tol)
}

fn block(m: &Mat, d: usize, row: usize, col: usize) -> Mat {
    m.view((row * d, col * d), (d, d)).into_owned()
}

fn assemble(a: &Mat, b: &Mat, c: &Mat, dd: &Mat) -> Result<Mat> {
    let d = a.nrows();
    for (name, blk) in [("A", a), ("B", b), ("C", c), ("D", dd)] {
        if blk.nrows() != d || blk.ncols() != d {
            return Err(Error::Dimension(format!(
                "block {name} is {}x{}, expected {d}x{d}",
                blk.nrows(),
                blk.ncols()
            )));
        }
    }
    let mut m = Mat::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d)).copy_from(a);
    m.view_mut((0, d), (d, d)).copy_from(b);
    m.view_mut((d, 0), (d, d)).copy_from(c);
    m.view_mut((d, d), (d, d)).copy_from(dd);
    Ok(m)
}

/// An element of `Sp(d, R)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMatrix {
    dim: usize,
    matrix: Mat,
}

impl SymplecticMatrix {
    /// Validates group membership. The defect is measured relative to
    /// `max(1, |M|²)` since `ᵗMJM` is quadratic in the entries.
    pub fn new(matrix: Mat, tol: f64) -> Result<Self> {
        let dim = half_dim(&matrix)?;
        let defect = symplectic_defect(&matrix)?;
        let scale = max_abs(&matrix).powi(2).max(1.0);
        if !(defect <= tol * scale) {
            return Err(Error::Contract(format!(
                "matrix is not symplectic (defect {defect:.3e})"
            )));
        }
        let det = matrix.determinant();
        if !((det - 1.0).abs() <= tol * scale.powi(dim as i32).max(1.0)) {
            return Err(Error::Contract(format!(
                "symplectic matrix must have unit determinant, got {det}"
            )));
        }
        Ok(Self { dim, matrix })
    }

    pub fn from_blocks(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Result<Self> {
        Self::new(assemble(a, b, c, d)?, SYMPLECTIC_TOL)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            dim: d,
            matrix: Mat::identity(2 * d, 2 * d),
        }
    }

    pub fn canonical_j(d: usize) -> Self {
        Self {
            dim: d,
            matrix: canonical_j(d),
        }
    }

    /// `(I, 0; C, I)` for symmetric `C`.
    pub fn lower_triangular(c: &Mat) -> Result<Self> {
        if !is_symmetric(c, 1e-12) {
            return Err(Error::Contract("lower-triangular block C must be symmetric".into()));
        }
        let d = c.nrows();
        Self::from_blocks(&Mat::identity(d, d), &Mat::zeros(d, d), c, &Mat::identity(d, d))
    }

    /// `(A, 0; 0, ᵗA⁻¹)`.
    pub fn block_diagonal(a: &Mat) -> Result<Self> {
        let inv_t = crate::matrix::inverse(a, "A")?.transpose();
        let d = a.nrows();
        Self::from_blocks(a, &Mat::zeros(d, d), &Mat::zeros(d, d), &inv_t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn a(&self) -> Mat {
        block(&self.matrix, self.dim, 0, 0)
    }

    pub fn b(&self) -> Mat {
        block(&self.matrix, self.dim, 0, 1)
    }

    pub fn c(&self) -> Mat {
        block(&self.matrix, self.dim, 1, 0)
    }

    pub fn d(&self) -> Mat {
        block(&self.matrix, self.dim, 1, 1)
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &SymplecticMatrix) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "cannot compose Sp({}) with Sp({})",
                self.dim, other.dim
            )));
        }
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `M⁻¹ = -J ᵗM J`.
    pub fn inverse(&self) -> Self {
        let j = canonical_j(self.dim);
        Self {
            dim: self.dim,
            matrix: -(&j * self.matrix.transpose() * &j),
        }
    }
}

/// An element of the Lie algebra `sp(d, R)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    dim: usize,
    matrix: Mat,
}

impl AlgebraElement {
    pub fn new(matrix: Mat, tol: f64) -> Result<Self> {
        let dim = half_dim(&matrix)?;
        if !is_algebra_element(&matrix, tol)? {
            return Err(Error::Contract(
                "matrix is not in sp(d,R): 𝒜J is not symmetric".into(),
            ));
        }
        Ok(Self { dim, matrix })
    }

    pub fn from_blocks(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Result<Self> {
        Self::new(assemble(a, b, c, d)?, SYMPLECTIC_TOL)
    }

    /// `(0, I; -I, 0)`, generating `H = -Δ/4π + π|x|²`.
    pub fn harmonic(d: usize) -> Self {
        Self {
            dim: d,
            matrix: canonical_j(d),
        }
    }

    /// `(0, I; I, 0)`, generating `H = -Δ/4π - π|x|²`.
    pub fn repulsive(d: usize) -> Self {
        let mut m = canonical_j(d);
        for i in 0..d {
            m[(d + i, i)] = 1.0;
        }
        Self { dim: d, matrix: m }
    }

    /// `(0, B; 0, 0)` with symmetric `B`, generating `H = -B∇·∇/4π`.
    pub fn free(b: &Mat) -> Result<Self> {
        let d = b.nrows();
        let z = Mat::zeros(d, d);
        Self::from_blocks(&z, b, &z, &z)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn a(&self) -> Mat {
        block(&self.matrix, self.dim, 0, 0)
    }

    pub fn b(&self) -> Mat {
        block(&self.matrix, self.dim, 0, 1)
    }

    pub fn c(&self) -> Mat {
        block(&self.matrix, self.dim, 1, 0)
    }

    pub fn d(&self) -> Mat {
        block(&self.matrix, self.dim, 1, 1)
    }

    fn named(&self) -> Option<NamedGenerator> {
        if self.matrix == canonical_j(self.dim) {
            return Some(NamedGenerator::Harmonic);
        }
        if self.matrix == Self::repulsive(self.dim).matrix {
            return Some(NamedGenerator::Repulsive);
        }
        let zero = Mat::zeros(self.dim, self.dim);
        if self.a() == zero && self.c() == zero && self.d() == zero {
            return Some(NamedGenerator::Free(self.b()));
        }
        None
    }
}

enum NamedGenerator {
    Harmonic,
    Repulsive,
    Free(Mat),
}

/// Taylor order of the series core; with `|X| <= 1/2` the truncation error
/// is below `0.5^21 / 21!`.
const SERIES_ORDER: usize = 20;

/// `e^{M}` by scaling and squaring around a fixed-order Taylor core.
pub fn expm(m: &Mat) -> Mat {
    let n = m.nrows();
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let squarings = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let x = m / 2f64.powi(squarings as i32);
    let mut result = Mat::identity(n, n);
    let mut term = Mat::identity(n, n);
    for k in 1..=SERIES_ORDER {
        term = &term * &x / k as f64;
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `e^{t𝒜}` through the generic series path, skipping closed forms.
pub fn exp_scaled_generic(generator: &AlgebraElement, t: f64) -> Result<SymplecticMatrix> {
    SymplecticMatrix::new(expm(&(generator.matrix() * t)), SYMPLECTIC_TOL)
}

/// `e^{t𝒜}`. The harmonic, repulsive and free generators use their closed
/// forms; anything else goes through [`expm`].
pub fn exp_scaled(generator: &AlgebraElement, t: f64) -> Result<SymplecticMatrix> {
    let d = generator.dim();
    let id = Mat::identity(d, d);
    let closed = match generator.named() {
        Some(NamedGenerator::Harmonic) => {
            let (s, c) = t.sin_cos();
            Some(assemble(&(&id * c), &(&id * s), &(&id * -s), &(&id * c))?)
        }
        Some(NamedGenerator::Repulsive) => {
            let (s, c) = (t.sinh(), t.cosh());
            Some(assemble(&(&id * c), &(&id * s), &(&id * s), &(&id * c))?)
        }
        Some(NamedGenerator::Free(b)) => Some(assemble(&id, &(b * t), &Mat::zeros(d, d), &id)?),
        None => None,
    };
    match closed {
        Some(m) => SymplecticMatrix::new(m, SYMPLECTIC_TOL),
        None => exp_scaled_generic(generator, t),
    }
}

/// Validating wrapper for raw matrices.
pub fn exp_scaled_matrix(generator: &Mat, t: f64) -> Result<SymplecticMatrix> {
    exp_scaled(&AlgebraElement::new(generator.clone(), SYMPLECTIC_TOL)?, t)
}

/// Coefficients of `P(x,ξ) = ½ ξ·Bξ - ξ·Ax - ½ x·Cx`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticForm {
    pub xi_xi: Mat,
    pub xi_x: Mat,
    pub x_x: Mat,
}

impl QuadraticForm {
    pub fn eval(&self, x: &[f64], xi: &[f64]) -> f64 {
        use crate::matrix::bilinear;
        0.5 * bilinear(&self.xi_xi, xi, xi) - bilinear(&self.xi_x, xi, x)
            - 0.5 * bilinear(&self.x_x, x, x)
    }
}

pub fn hamiltonian_form(generator: &AlgebraElement) -> QuadraticForm {
    QuadraticForm {
        xi_xi: generator.b(),
        xi_x: generator.a(),
        x_x: generator.c(),
    }
}

/// Parse the interchange CSV: a `dim,d` header then `2d` rows of `2d` values.
pub fn parse_matrix_csv(text: &str) -> Result<Mat> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let mut parts = header.split(',').map(str::trim);
    if parts.next() != Some("dim") {
        return Err(Error::Parse(format!("expected `dim,d` header, got `{header}`")));
    }
    let d: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad dimension in header `{header}`")))?;
    let n = 2 * d;
    let mut values = Vec::with_capacity(n * n);
    for (row, line) in lines.enumerate() {
        let parsed: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("row {row}: {e}")))?;
        if parsed.len() != n {
            return Err(Error::Parse(format!(
                "row {row} has {} entries, expected {n}",
                parsed.len()
            )));
        }
        values.extend(parsed);
    }
    if values.len() != n * n {
        return Err(Error::Parse(format!(
            "expected {n} rows, got {}",
            values.len() / n.max(1)
        )));
    }
    Ok(DMatrix::from_row_slice(n, n, &values))
}

pub fn matrix_to_csv(m: &Mat) -> String {
    let mut out = format!("dim,{}\n", m.nrows() / 2);
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.17e}", m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn close(a: &Mat, b: &Mat, tol: f64) -> bool {
        max_abs(&(a - b)) <= tol
    }

    #[test]
    fn membership_examples() {
        assert!(is_symplectic(&Mat::identity(2, 2), 1e-12).unwrap());
        assert!(is_symplectic(&canonical_j(1), 1e-12).unwrap());
        assert!(!is_symplectic(&(Mat::identity(2, 2) * 2.0), 1e-12).unwrap());
        assert!(matches!(
            is_symplectic(&Mat::identity(3, 3), 1e-12),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn algebra_examples() {
        assert!(is_algebra_element(&canonical_j(1), 1e-12).unwrap());
        assert!(is_algebra_element(AlgebraElement::repulsive(1).matrix(), 1e-12).unwrap());
        assert!(!is_algebra_element(&Mat::identity(2, 2), 1e-12).unwrap());
    }

    #[test]
    fn exp_closed_forms() {
        let j = exp_scaled(&AlgebraElement::harmonic(1), PI / 2.0).unwrap();
        assert!(close(j.matrix(), &canonical_j(1), 1e-15));

        let r = exp_scaled(&AlgebraElement::repulsive(1), 1.0).unwrap();
        let (c, s) = (1f64.cosh(), 1f64.sinh());
        assert!(close(r.matrix(), &DMatrix::from_row_slice(2, 2, &[c, s, s, c]), 1e-15));

        let f = exp_scaled(&AlgebraElement::free(&Mat::identity(1, 1)).unwrap(), 3.0).unwrap();
        assert!(close(f.matrix(), &DMatrix::from_row_slice(2, 2, &[1.0, 3.0, 0.0, 1.0]), 0.0));
    }

    #[test]
    fn closed_forms_agree_with_series() {
        let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, -0.5]);
        for gen in [
            AlgebraElement::harmonic(2),
            AlgebraElement::repulsive(2),
            AlgebraElement::free(&b).unwrap(),
        ] {
            for t in [-2.0, -0.3, 0.7, 1.9] {
                let fast = exp_scaled(&gen, t).unwrap();
                let slow = exp_scaled_generic(&gen, t).unwrap();
                assert!(close(fast.matrix(), slow.matrix(), 1e-12), "t={t}");
            }
        }
    }

    #[test]
    fn exp_at_zero_is_identity() {
        let m = DMatrix::from_row_slice(2, 2, &[0.3, 1.2, -0.7, -0.3]);
        let e = exp_scaled_matrix(&m, 0.0).unwrap();
        assert_eq!(e.matrix(), &Mat::identity(2, 2));
    }

    #[test]
    fn non_algebra_input_is_rejected() {
        assert!(matches!(
            exp_scaled_matrix(&Mat::identity(2, 2), 1.0),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn hamiltonian_forms() {
        let x = [0.7];
        let xi = [-1.3];
        let h = hamiltonian_form(&AlgebraElement::harmonic(1));
        assert!((h.eval(&x, &xi) - 0.5 * (xi[0] * xi[0] + x[0] * x[0])).abs() < 1e-15);
        let r = hamiltonian_form(&AlgebraElement::repulsive(1));
        assert!((r.eval(&x, &xi) - 0.5 * (xi[0] * xi[0] - x[0] * x[0])).abs() < 1e-15);
        let b = DMatrix::from_row_slice(1, 1, &[2.5]);
        let f = hamiltonian_form(&AlgebraElement::free(&b).unwrap());
        assert!((f.eval(&x, &xi) - 0.5 * 2.5 * xi[0] * xi[0]).abs() < 1e-15);
    }

    #[test]
    fn inverse_and_compose() {
        let m = exp_scaled(&AlgebraElement::repulsive(1), 0.4).unwrap();
        let id = m.compose(&m.inverse()).unwrap();
        assert!(close(id.matrix(), &Mat::identity(2, 2), 1e-14));
    }

    #[test]
    fn matrix_csv_round_trip() {
        let m = exp_scaled(&AlgebraElement::harmonic(2), 0.3).unwrap();
        let text = matrix_to_csv(m.matrix());
        assert!(text.starts_with("dim,2\n"));
        assert_eq!(&parse_matrix_csv(&text).unwrap(), m.matrix());
        assert!(parse_matrix_csv("dim,1\n1,0\n").is_err());
    }
}
