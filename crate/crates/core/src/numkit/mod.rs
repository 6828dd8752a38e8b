//! Dense complex linear algebra and polynomial kernels.
//!
//! Everything here is a pure function of its inputs. Matrices are
//! `nalgebra` dynamic matrices over `Complex64`.

mod pencil;
mod poly;
mod spectral;
mod stein;
mod tol;

pub use pencil::{smallest_generalized_eig, smallest_generalized_eig_with, PencilEig};
pub use poly::{det_poly, interpolate_on_circle, transfer_numerator, Polynomial};
pub use spectral::{spectral_factor, spectral_factor_with};
pub use stein::{solve_stein, solve_stein_general, solve_stein_with};
pub use tol::Tolerances;

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a matrix from row-major complex entries, rejecting non-finite values.
pub fn matrix_from_rows(rows: usize, cols: usize, entries: &[Complex64]) -> Result<ComplexMatrix> {
    if entries.len() != rows * cols {
        return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
    }
    let m = ComplexMatrix::from_row_slice(rows, cols, entries);
    ensure_finite(&m, "matrix")?;
    Ok(m)
}

/// Real matrix literal helper, row-major.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| c64(x, 0.0)))
}

pub fn ensure_finite(m: &ComplexMatrix, what: &'static str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub fn ensure_square(m: &ComplexMatrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!("{what} must be square, got {}x{}", m.nrows(), m.ncols())));
    }
    Ok(m.nrows())
}

/// `(M + M*) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// `‖M - M*‖_F ≤ tol·‖M‖_F`.
pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && (m - m.adjoint()).norm() <= tol * m.norm().max(f64::MIN_POSITIVE)
}

/// Complex Schur form `m = Q T Q*` as `(Q, T)`.
///
/// Triangular inputs are returned directly. The QR iteration can stall on
/// exactly structured matrices (nilpotent shifts), so a failed attempt is
/// retried after a fixed pseudo-random unitary similarity.
pub fn schur_form(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = m.nrows();
    let is_upper = (0..n).all(|j| (j + 1..n).all(|i| m[(i, j)] == Complex64::default()));
    if is_upper {
        return Ok((ComplexMatrix::identity(n, n), m.clone()));
    }
    let is_lower = (0..n).all(|j| (0..j).all(|i| m[(i, j)] == Complex64::default()));
    if is_lower {
        let flip = ComplexMatrix::from_fn(n, n, |i, j| if i + j + 1 == n { c64(1.0, 0.0) } else { Complex64::default() });
        let upper = &flip * m * &flip;
        return Ok((flip, upper));
    }
    let max_iter = 200 * n.max(4);
    if let Some(s) = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, max_iter) {
        return Ok(s.unpack());
    }
    for attempt in 1..=3u64 {
        let mut state = 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(attempt);
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let g = ComplexMatrix::from_fn(n, n, |_, _| c64(next(), next()));
        let u = g.qr().q();
        let rotated = u.adjoint() * m * &u;
        if let Some(s) = nalgebra::Schur::try_new(rotated, f64::EPSILON, max_iter) {
            let (q, t) = s.unpack();
            return Ok((u * q, t));
        }
    }
    Err(Error::NoConvergence)
}

/// Eigenvalues of a general square complex matrix.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let (_, t) = schur_form(m)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

pub fn spectral_radius(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Ascending eigenvalues of the Hermitian part of `m`.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_hermitian_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Points `radius·e^{2πik/count}`, `k = 0..count`.
pub fn circle_points(count: usize, radius: f64) -> Vec<Complex64> {
    (0..count)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / count as f64))
        .collect()
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}
