use std::fmt;
use std::ops::{Add, Mul, Sub};

use super::{eigenvalues, ensure_square, Complex64, ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};

/// Polynomial in `z` with complex coefficients in ascending powers.
///
/// The coefficient list is never empty and carries no trailing exact zeros,
/// so `degree()` is the index of the last nonzero coefficient (0 for the zero
/// polynomial).
#[derive(Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("polynomial needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("polynomial"));
        }
        Ok(Self::from_vec_unchecked(coeffs))
    }

    fn from_vec_unchecked(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == Complex64::default() {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::default());
        }
        Polynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_vec_unchecked(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots.iter().fold(Self::one(), |acc, &r| {
            &acc * &Self::from_vec_unchecked(vec![-r, Complex64::new(1.0, 0.0)])
        })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::default()
    }

    /// Coefficient of `z^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::default(), |acc, &c| acc * z + c)
    }

    /// Polynomial with conjugated coefficients (`p̄` in `p̄(A)`).
    pub fn conj(&self) -> Self {
        Self::from_vec_unchecked(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_vec_unchecked(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Drops trailing coefficients with modulus at most `rel·max|c|`.
    pub fn trim_relative(&self, rel: f64) -> Self {
        let cut = rel * self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 && coeffs.last().unwrap().norm() <= cut {
            coeffs.pop();
        }
        Self::from_vec_unchecked(coeffs)
    }

    /// Divides by `z`, discarding the constant term.
    pub fn shift_down(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(Complex64::default());
        }
        Self::from_vec_unchecked(self.coeffs[1..].to_vec())
    }

    /// `p(A) v` by Horner's rule on the vector.
    pub fn apply(&self, a: &ComplexMatrix, v: &ComplexMatrix) -> ComplexMatrix {
        let mut acc = v.scale(0.0);
        for &c in self.coeffs.iter().rev() {
            acc = a * acc + v * c;
        }
        acc
    }

    /// `p(A)`.
    pub fn eval_matrix(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.apply(a, &ComplexMatrix::identity(a.nrows(), a.ncols()))
    }

    /// Roots from the eigenvalues of the companion matrix.
    ///
    /// Leading coefficients below `1e-14` of the largest are dropped first;
    /// the roots they would add lie far outside any region of interest.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let p = self.trim_relative(1e-14);
        let m = p.degree();
        if m == 0 {
            return Ok(Vec::new());
        }
        let lead = p.coeffs[m];
        let coeffs = &p.coeffs;
        let mut companion = ComplexMatrix::zeros(m, m);
        for j in 0..m {
            companion[(0, j)] = -coeffs[m - 1 - j] / lead;
        }
        for i in 1..m {
            companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        eigenvalues(&companion)
    }

    /// Smallest root modulus, `+∞` for constants.
    pub fn min_root_modulus(&self) -> Result<f64> {
        Ok(self.roots()?.iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min))
    }

    pub fn to_vector(&self) -> ComplexVector {
        ComplexVector::from_column_slice(&self.coeffs)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::from_vec_unchecked((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::from_vec_unchecked((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![Complex64::default(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::from_vec_unchecked(out)
    }
}

/// Recovers a polynomial of degree at most `degree` from its values on
/// `degree + 1` equispaced points of the unit circle (rotated off the real
/// axis). Coefficients below `8·ε·(degree + 1)` of the largest are set to zero.
pub fn interpolate_on_circle(degree: usize, mut f: impl FnMut(Complex64) -> Result<Complex64>) -> Result<Polynomial> {
    let count = degree + 1;
    let step = 2.0 * std::f64::consts::PI / count as f64;
    let offset = std::f64::consts::FRAC_1_PI * step;
    let mut values = Vec::with_capacity(count);
    for j in 0..count {
        values.push(f(Complex64::from_polar(1.0, offset + step * j as f64))?);
    }
    let mut coeffs: Vec<Complex64> = (0..count)
        .map(|k| {
            let sum: Complex64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| v * Complex64::from_polar(1.0, -(k as f64) * (offset + step * j as f64)))
                .sum();
            sum / count as f64
        })
        .collect();
    let peak = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let floor = 8.0 * f64::EPSILON * count as f64 * peak;
    for c in coeffs.iter_mut() {
        if c.norm() <= floor {
            *c = Complex64::default();
        }
    }
    Ok(Polynomial::from_vec_unchecked(coeffs))
}

/// `det(I - zM)` and `(I - zM)^{-1} rhs` from one LU factorization.
pub(crate) fn resolvent(m: &ComplexMatrix, z: Complex64, rhs: &ComplexMatrix) -> Result<(Complex64, ComplexMatrix)> {
    let n = m.nrows();
    let lu = (ComplexMatrix::identity(n, n) - m * z).lu();
    let det = lu.determinant();
    let solved = lu.solve(rhs).ok_or(Error::NearPole)?;
    Ok((det, solved))
}

/// Coefficients of `det(I - zM)` in ascending powers of `z`, interpolated
/// from LU determinants on the unit circle.
pub fn det_poly(m: &ComplexMatrix) -> Result<Polynomial> {
    let n = ensure_square(m, "M")?;
    if n == 0 {
        return Ok(Polynomial::one());
    }
    interpolate_on_circle(n, |z| Ok((ComplexMatrix::identity(n, n) - m * z).lu().determinant()))
}

/// Numerator `det(I - zA)·(d + z^s c (I - zA)^{-1} b)` of a transfer
/// function, `s = 1` with `delayed` and 0 otherwise.
pub fn transfer_numerator(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix, d: Complex64, delayed: bool) -> Result<Polynomial> {
    let n = ensure_square(a, "A")?;
    if n == 0 {
        return Ok(Polynomial::constant(d));
    }
    let degree = if delayed || d != Complex64::default() { n } else { n - 1 };
    interpolate_on_circle(degree, |z| {
        let (det, x) = resolvent(a, z, b)?;
        let gain = (c * x)[(0, 0)];
        Ok(det * (d + if delayed { gain * z } else { gain }))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{c64, real_matrix};

    #[test]
    fn det_poly_examples() {
        let close = |p: &Polynomial, want: &[f64]| {
            p.degree() + 1 == want.len() && want.iter().enumerate().all(|(k, w)| (p.coeff(k) - c64(*w, 0.0)).norm() < 1e-15)
        };
        assert!(close(&det_poly(&ComplexMatrix::zeros(3, 3)).unwrap(), &[1.0]));
        assert!(close(&det_poly(&real_matrix(1, 1, &[0.5])).unwrap(), &[1.0, -0.5]));
        // nilpotent shift
        assert!(close(&det_poly(&real_matrix(2, 2, &[0.0, 0.0, 1.0, 0.0])).unwrap(), &[1.0]));
        // diag(0.5, 0.25): (1 - z/2)(1 - z/4)
        assert!(close(
            &det_poly(&real_matrix(2, 2, &[0.5, 0.0, 0.0, 0.25])).unwrap(),
            &[1.0, -0.75, 0.125]
        ));
    }

    #[test]
    fn det_poly_matches_determinant_at_order_32() {
        let n = 32;
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            c64(((i * 7 + j * 3) % 11) as f64 / 40.0 - 0.12, ((i + 2 * j) % 5) as f64 / 50.0)
        });
        let p = det_poly(&m).unwrap();
        assert!((p.coeff(0) - c64(1.0, 0.0)).norm() < 1e-12);
        for z in [c64(0.3, 0.1), c64(-0.7, 0.4)] {
            let direct = (ComplexMatrix::identity(n, n) - m.scale(1.0) * z).determinant();
            assert!((p.eval(z) - direct).norm() < 1e-9 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn transfer_numerator_matches_evaluation() {
        let a = real_matrix(3, 3, &[0.5, 0.1, 0.0, -0.2, 0.3, 0.4, 0.0, 0.1, -0.6]);
        let b = real_matrix(3, 1, &[1.0, 0.0, 2.0]);
        let c = real_matrix(1, 3, &[0.3, -1.0, 0.5]);
        let den = det_poly(&a).unwrap();
        for delayed in [false, true] {
            let num = transfer_numerator(&a, &b, &c, c64(0.7, 0.0), delayed).unwrap();
            for z in [c64(0.2, -0.4), c64(1.5, 0.3)] {
                let x = (ComplexMatrix::identity(3, 3) - &a * z).lu().solve(&b).unwrap();
                let w = c64(0.7, 0.0) + (&c * x)[(0, 0)] * if delayed { z } else { c64(1.0, 0.0) };
                assert!((num.eval(z) / den.eval(z) - w).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn trims_and_roots() {
        let p = Polynomial::from_real(&[2.0, -3.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.degree(), 2);
        let mut r: Vec<f64> = p.roots().unwrap().iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        assert!((r[0] - 1.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12);
        assert!(Polynomial::new(vec![]).is_err());
        assert!(Polynomial::from_real(&[0.0, 0.0]).unwrap().is_zero());
    }

    #[test]
    fn apply_matches_eval_matrix() {
        let a = real_matrix(2, 2, &[0.1, 0.2, -0.3, 0.4]);
        let p = Polynomial::new(vec![c64(1.0, 1.0), c64(0.5, 0.0), c64(0.0, -2.0)]).unwrap();
        let v = real_matrix(2, 1, &[1.0, -1.0]);
        let direct = ComplexMatrix::identity(2, 2) * c64(1.0, 1.0) + a.scale(0.5) + (&a * &a) * c64(0.0, -2.0);
        assert!((p.apply(&a, &v) - &direct * &v).norm() < 1e-14);
        assert!((p.eval_matrix(&a) - direct).norm() < 1e-14);
    }
}
