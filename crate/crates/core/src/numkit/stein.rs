//! Stein equations `X = A X M* + Q` by complex Schur back-substitution.

use super::{ensure_finite, ensure_square, hermitian_part, is_hermitian, schur_form, Complex64, ComplexMatrix, Tolerances};
use crate::error::{Error, Result};

struct Triangular {
    unitary: ComplexMatrix,
    upper: ComplexMatrix,
}

fn schur(m: &ComplexMatrix, margin: f64) -> Result<Triangular> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Triangular {
            unitary: m.clone(),
            upper: m.clone(),
        });
    }
    let (unitary, upper) = schur_form(m)?;
    let rho = (0..n).map(|i| upper[(i, i)].norm()).fold(0.0, f64::max);
    if rho >= 1.0 - margin {
        return Err(Error::SpectralRadius { rho });
    }
    Ok(Triangular { unitary, upper })
}

/// Solves `Y = T Y S* + C` with `T`, `S` upper triangular, column by column from the right.
fn triangular_stein(t: &ComplexMatrix, s: &ComplexMatrix, c: &ComplexMatrix) -> ComplexMatrix {
    let n = t.nrows();
    let k = s.nrows();
    let mut y = ComplexMatrix::zeros(n, k);
    let mut w = vec![Complex64::default(); n];
    let mut rhs = vec![Complex64::default(); n];
    for j in (0..k).rev() {
        // w = Σ_{l>j} conj(S_jl) y_l
        w.iter_mut().for_each(|x| *x = Complex64::default());
        for l in j + 1..k {
            let sjl = s[(j, l)].conj();
            if sjl == Complex64::default() {
                continue;
            }
            for i in 0..n {
                w[i] += sjl * y[(i, l)];
            }
        }
        // rhs = c_j + T w
        for i in 0..n {
            let mut acc = c[(i, j)];
            for m in i..n {
                acc += t[(i, m)] * w[m];
            }
            rhs[i] = acc;
        }
        // (I - conj(S_jj) T) y_j = rhs, upper triangular
        let sjj = s[(j, j)].conj();
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            for m in i + 1..n {
                acc += sjj * t[(i, m)] * y[(m, j)];
            }
            y[(i, j)] = acc / (Complex64::new(1.0, 0.0) - sjj * t[(i, i)]);
        }
    }
    y
}

/// Solves the general Stein equation `X = A X M* + Q` for `A` (n×n), `M` (k×k), `Q` (n×k).
///
/// Both `A` and `M` must have spectral radius below `1 - ε`.
pub fn solve_stein_general(a: &ComplexMatrix, m: &ComplexMatrix, q: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let n = ensure_square(a, "A")?;
    let k = ensure_square(m, "M")?;
    if q.nrows() != n || q.ncols() != k {
        return Err(Error::Dimension(format!("Q must be {n}x{k}, got {}x{}", q.nrows(), q.ncols())));
    }
    ensure_finite(a, "A")?;
    ensure_finite(m, "M")?;
    ensure_finite(q, "Q")?;
    if n == 0 || k == 0 {
        return Ok(ComplexMatrix::zeros(n, k));
    }
    let sa = schur(a, tol.stability_margin)?;
    let sm = schur(m, tol.stability_margin)?;
    let transformed = |r: &ComplexMatrix| sa.unitary.adjoint() * r * &sm.unitary;
    let back = |y: &ComplexMatrix| &sa.unitary * y * sm.unitary.adjoint();

    let mut x = back(&triangular_stein(&sa.upper, &sm.upper, &transformed(q)));
    // one step of refinement on the residual
    let residual = q - (&x - a * &x * m.adjoint());
    if residual.norm() > tol.stein * q.norm() {
        x += back(&triangular_stein(&sa.upper, &sm.upper, &transformed(&residual)));
    }
    Ok(x)
}

/// Solves `X = A X A* + Q` with the default tolerances.
pub fn solve_stein(a: &ComplexMatrix, q: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve_stein_with(a, q, &Tolerances::DEFAULT)
}

/// Solves `X = A X A* + Q`. The result is exactly Hermitian when `Q` is.
pub fn solve_stein_with(a: &ComplexMatrix, q: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let x = solve_stein_general(a, a, q, tol)?;
    if is_hermitian(q, 1e-14) {
        Ok(hermitian_part(&x))
    } else {
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{c64, real_matrix};

    fn truncated_series(a: &ComplexMatrix, q: &ComplexMatrix, terms: usize) -> ComplexMatrix {
        let mut x = ComplexMatrix::zeros(q.nrows(), q.ncols());
        let mut term = q.clone();
        for _ in 0..terms {
            x += &term;
            term = a * term * a.adjoint();
        }
        x
    }

    #[test]
    fn zero_dynamics_returns_rhs() {
        let x = solve_stein(&real_matrix(1, 1, &[0.0]), &real_matrix(1, 1, &[5.0])).unwrap();
        assert!((x[(0, 0)] - c64(5.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn scalar_geometric_series() {
        let x = solve_stein(&real_matrix(1, 1, &[0.5]), &real_matrix(1, 1, &[1.0])).unwrap();
        assert!((x[(0, 0)].re - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn shift_gramian_is_identity() {
        let a = real_matrix(3, 3, &[0., 0., 0., 1., 0., 0., 0., 1., 0.]);
        let mut q = ComplexMatrix::zeros(3, 3);
        q[(0, 0)] = c64(1.0, 0.0);
        let x = solve_stein(&a, &q).unwrap();
        assert!((x - ComplexMatrix::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn non_hermitian_rhs_and_rectangular() {
        let a = ComplexMatrix::from_row_slice(2, 2, &[c64(0.3, 0.2), c64(0.1, 0.0), c64(-0.2, 0.1), c64(0.5, -0.3)]);
        let m = ComplexMatrix::from_row_slice(
            3,
            3,
            &[
                c64(0.1, 0.0),
                c64(0.4, 0.0),
                c64(0.0, 0.2),
                c64(0.0, 0.0),
                c64(-0.6, 0.1),
                c64(0.2, 0.0),
                c64(0.3, 0.0),
                c64(0.0, 0.0),
                c64(0.2, -0.2),
            ],
        );
        let q = ComplexMatrix::from_fn(2, 3, |i, j| c64(i as f64 + 1.0, j as f64 - 1.0));
        let x = solve_stein_general(&a, &m, &q, &Tolerances::DEFAULT).unwrap();
        let r = &x - &a * &x * m.adjoint() - &q;
        assert!(r.norm() < 1e-12 * q.norm());
        let mut series = ComplexMatrix::zeros(2, 3);
        let mut term = q.clone();
        for _ in 0..200 {
            series += &term;
            term = &a * term * m.adjoint();
        }
        assert!((x - series).norm() < 1e-10);
    }

    #[test]
    fn matches_series_oracle() {
        let a = ComplexMatrix::from_row_slice(2, 2, &[c64(0.5, 0.1), c64(0.3, 0.0), c64(0.0, 0.0), c64(-0.4, 0.2)]);
        let q = ComplexMatrix::identity(2, 2);
        let x = solve_stein(&a, &q).unwrap();
        assert!((x.clone() - x.adjoint()).norm() == 0.0);
        assert!((x - truncated_series(&a, &q, 200)).norm() < 1e-12);
    }

    #[test]
    fn rejects_unstable_and_mismatched() {
        let a = real_matrix(1, 1, &[1.0]);
        assert!(matches!(
            solve_stein(&a, &real_matrix(1, 1, &[1.0])),
            Err(Error::SpectralRadius { .. })
        ));
        let a = real_matrix(2, 2, &[0.1, 0.0, 0.0, 0.1]);
        assert!(matches!(solve_stein(&a, &real_matrix(1, 1, &[1.0])), Err(Error::Dimension(_))));
    }
}
