use nalgebra::SymmetricEigen;

use super::{
    ensure_finite, ensure_square, hermitian_part, is_hermitian, min_hermitian_eigenvalue, ComplexMatrix, ComplexVector, Tolerances,
};
use crate::error::{Error, Result};

/// Smallest finite positive eigenvalue of a Hermitian PSD pencil `S v = λ M v`.
#[derive(Debug, Clone)]
pub struct PencilEig {
    pub value: f64,
    /// Unit-norm eigenvector.
    pub vector: ComplexVector,
    pub multiplicity: usize,
    /// Unit-norm basis (columns) of the eigenspace; its first column is `vector`.
    pub eigenspace: ComplexMatrix,
    /// Condition number of `S` on its numerical range.
    pub condition: f64,
}

/// Eigenvalues below this fraction of the largest one are treated as zero
/// when splitting `S` into range and null space.
const RANGE_CUT: f64 = 1e-13;

fn check_psd(m: &ComplexMatrix, what: &'static str, tol: f64) -> Result<SymmetricEigen<num_complex::Complex64, nalgebra::Dyn>> {
    if !is_hermitian(m, tol) {
        return Err(Error::NotPsd(what));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let scale = eig.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if eig.eigenvalues.iter().any(|&x| x < -tol * scale) {
        return Err(Error::NotPsd(what));
    }
    Ok(eig)
}

pub fn smallest_generalized_eig(s: &ComplexMatrix, m: &ComplexMatrix) -> Result<PencilEig> {
    smallest_generalized_eig_with(s, m, &Tolerances::DEFAULT)
}

/// Largest `Λ` with `S - ΛM ⪰ 0`, i.e. the smallest finite positive eigenvalue
/// of the pencil `(S, M)`, together with an eigenvector.
///
/// `S` is split into its numerical range and null space. A null direction of
/// `S` on which `M` is positive forces `Λ = 0`, which is reported as a
/// degenerate pencil; directions where `M` vanishes give infinite eigenvalues
/// and are dropped.
pub fn smallest_generalized_eig_with(s: &ComplexMatrix, m: &ComplexMatrix, tol: &Tolerances) -> Result<PencilEig> {
    let n = ensure_square(s, "S")?;
    if ensure_square(m, "M")? != n {
        return Err(Error::Dimension("S and M must have the same size".into()));
    }
    if n == 0 {
        return Err(Error::Dimension("empty pencil".into()));
    }
    ensure_finite(s, "S")?;
    ensure_finite(m, "M")?;
    let s_eig = check_psd(s, "S", tol.psd)?;
    let m_eig = check_psd(m, "M", tol.psd)?;
    let m_scale = m_eig.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if m_scale == 0.0 {
        return Err(Error::DegeneratePencil);
    }
    let s_scale = s_eig.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);

    let (range, null): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| s_eig.eigenvalues[i] > RANGE_CUT * s_scale);
    let m_h = hermitian_part(m);
    for &i in &null {
        let x = s_eig.eigenvectors.column(i);
        let quad = (x.adjoint() * &m_h * x)[(0, 0)].re;
        if quad > tol.psd * m_scale {
            return Err(Error::DegeneratePencil);
        }
    }
    if range.is_empty() {
        return Err(Error::DegeneratePencil);
    }

    // whitened basis: W = U_r D_r^{-1/2}
    let r = range.len();
    let mut whiten = ComplexMatrix::zeros(n, r);
    for (col, &i) in range.iter().enumerate() {
        let scale = 1.0 / s_eig.eigenvalues[i].sqrt();
        whiten.set_column(col, &(s_eig.eigenvectors.column(i) * num_complex::Complex64::new(scale, 0.0)));
    }
    let reduced = hermitian_part(&(whiten.adjoint() * &m_h * &whiten));
    let red_eig = reduced.symmetric_eigen();
    let (top, mu_max) = red_eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    if mu_max <= tol.psd * m_scale / s_scale {
        return Err(Error::DegeneratePencil);
    }
    let multiplicity = red_eig
        .eigenvalues
        .iter()
        .filter(|&&mu| mu >= mu_max * (1.0 - tol.multiplicity))
        .count();
    let value = 1.0 / mu_max;
    let mut order: Vec<usize> = (0..r)
        .filter(|&i| red_eig.eigenvalues[i] >= mu_max * (1.0 - tol.multiplicity) && i != top)
        .collect();
    order.insert(0, top);
    let mut eigenspace = &whiten * red_eig.eigenvectors.select_columns(order.iter());
    for mut col in eigenspace.column_iter_mut() {
        let norm = col.norm();
        col.unscale_mut(norm);
    }
    let vector = eigenspace.column(0).into_owned();

    let kept_min = range.iter().map(|&i| s_eig.eigenvalues[i]).fold(f64::INFINITY, f64::min);
    let condition = s_scale / kept_min;

    let slack = hermitian_part(s) - m_h.scale(value);
    if min_hermitian_eigenvalue(&slack) < -tol.pencil * s_scale {
        return Err(Error::DegeneratePencil);
    }
    Ok(PencilEig {
        value,
        vector: ComplexVector::from_column_slice(vector.as_slice()),
        multiplicity,
        eigenspace,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::real_matrix;

    #[test]
    fn identity_pencil_has_double_eigenvalue() {
        let e = smallest_generalized_eig(&ComplexMatrix::identity(2, 2), &ComplexMatrix::identity(2, 2)).unwrap();
        assert!((e.value - 1.0).abs() < 1e-14);
        assert_eq!(e.multiplicity, 2);
        assert_eq!(e.eigenspace.ncols(), 2);
    }

    #[test]
    fn diagonal_pencil_picks_first_axis() {
        let e = smallest_generalized_eig(&real_matrix(2, 2, &[1., 0., 0., 4.]), &ComplexMatrix::identity(2, 2)).unwrap();
        assert!((e.value - 1.0).abs() < 1e-14);
        assert_eq!(e.multiplicity, 1);
        assert!((e.vector[0].norm() - 1.0).abs() < 1e-14 && e.vector[1].norm() < 1e-14);
    }

    #[test]
    fn singular_m_gives_infinite_eigenvalue_that_is_skipped() {
        // eigenvalues of (diag(2,3), diag(1,0)): 2 and ∞
        let e = smallest_generalized_eig(&real_matrix(2, 2, &[2., 0., 0., 3.]), &real_matrix(2, 2, &[1., 0., 0., 0.])).unwrap();
        assert!((e.value - 2.0).abs() < 1e-14);
        assert!((e.vector[0].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_cases() {
        let s = real_matrix(2, 2, &[1., 0., 0., 0.]);
        // M positive on the null space of S: Λ = 0
        assert!(matches!(
            smallest_generalized_eig(&s, &ComplexMatrix::identity(2, 2)),
            Err(Error::DegeneratePencil)
        ));
        assert!(matches!(
            smallest_generalized_eig(&ComplexMatrix::identity(2, 2), &ComplexMatrix::zeros(2, 2)),
            Err(Error::DegeneratePencil)
        ));
        assert!(matches!(
            smallest_generalized_eig(&real_matrix(2, 2, &[1., 0., 0., -1.]), &ComplexMatrix::identity(2, 2)),
            Err(Error::NotPsd("S"))
        ));
        assert!(matches!(
            smallest_generalized_eig(&real_matrix(2, 2, &[1., 1., 0., 1.]), &ComplexMatrix::identity(2, 2)),
            Err(Error::NotPsd("S"))
        ));
    }

    #[test]
    fn singular_s_with_compatible_m() {
        // S = diag(1, 0), M = diag(0.5, 0): null space of S carries no M weight
        let e = smallest_generalized_eig(&real_matrix(2, 2, &[1., 0., 0., 0.]), &real_matrix(2, 2, &[0.5, 0., 0., 0.])).unwrap();
        assert!((e.value - 2.0).abs() < 1e-14);
    }
}
