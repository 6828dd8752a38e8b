use crate::error::{Error, Result};
use crate::numkit::{Complex64, ComplexMatrix, Polynomial, Tolerances};

use super::{Domain, StateSpaceModel};

/// `W(z) = num(z) / den(z)` in ascending powers of the delay variable `z`.
///
/// The denominator is scaled so that its constant coefficient is 1 whenever
/// that coefficient is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTransferFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalTransferFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("denominator is the zero polynomial".into()));
        }
        let lead = den.coeff(0);
        if lead == Complex64::default() {
            return Ok(RationalTransferFunction { num, den });
        }
        let s = Complex64::new(1.0, 0.0) / lead;
        Ok(RationalTransferFunction {
            num: num.scale(s),
            den: den.scale(s),
        })
    }

    pub fn constant(c: Complex64) -> Self {
        RationalTransferFunction {
            num: Polynomial::constant(c),
            den: Polynomial::one(),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    /// Smallest modulus among denominator roots (`+∞` for a constant denominator).
    pub fn min_pole_modulus(&self) -> Result<f64> {
        self.den.min_root_modulus()
    }

    /// All poles strictly outside the closed unit disc.
    pub fn is_stable(&self) -> bool {
        self.min_pole_modulus()
            .map(|m| m > 1.0 + Tolerances::DEFAULT.root_margin)
            .unwrap_or(false)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        RationalTransferFunction {
            num: self.num.scale(s),
            den: self.den.clone(),
        }
    }

    /// First `len` power-series coefficients `w_0, w_1, …` (the impulse response).
    pub fn impulse_response(&self, len: usize) -> Result<Vec<Complex64>> {
        let d0 = self.den.coeff(0);
        if d0 == Complex64::default() {
            return Err(Error::UnstableModel);
        }
        let mut w = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = self.num.coeff(k);
            for j in 1..=k.min(self.den.degree()) {
                acc -= self.den.coeff(j) * w[k - j];
            }
            w.push(acc / d0);
        }
        Ok(w)
    }

    /// Controllable canonical realization in the delay convention,
    /// `W(z) = D + z C (I - zA)^{-1} B`.
    pub fn to_state_space(&self) -> Result<StateSpaceModel> {
        let d0 = self.den.coeff(0);
        if d0 == Complex64::default() {
            return Err(Error::UnstableModel);
        }
        let m = self.num.degree().max(self.den.degree());
        let a_k = |k: usize| self.den.coeff(k) / d0;
        let b_k = |k: usize| self.num.coeff(k) / d0;
        let d = b_k(0);
        let mut a = ComplexMatrix::zeros(m, m);
        let mut b = ComplexMatrix::zeros(m, 1);
        let mut c = ComplexMatrix::zeros(1, m);
        for j in 0..m {
            a[(0, j)] = -a_k(j + 1);
            c[(0, j)] = b_k(j + 1) - d * a_k(j + 1);
        }
        for i in 1..m {
            a[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        if m > 0 {
            b[(0, 0)] = Complex64::new(1.0, 0.0);
        }
        StateSpaceModel::new(a, b, c, d, Domain::Discrete)
    }

    /// Removes numerator/denominator root pairs closer than `rel·max(1, |r|)`.
    pub fn cancel_common_roots(&self, rel: f64) -> Result<Self> {
        let mut num_roots = self.num.roots()?;
        let mut den_roots = self.den.roots()?;
        let mut changed = false;
        let mut i = 0;
        while i < den_roots.len() {
            let r = den_roots[i];
            let best = num_roots
                .iter()
                .enumerate()
                .map(|(j, q)| (j, (q - r).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1));
            match best {
                Some((j, dist)) if dist <= rel * r.norm().max(1.0) => {
                    num_roots.swap_remove(j);
                    den_roots.swap_remove(i);
                    changed = true;
                }
                _ => i += 1,
            }
        }
        if !changed {
            return Ok(self.clone());
        }
        let num = Polynomial::from_roots(&num_roots).scale(self.num.coeffs()[self.num.degree()]);
        let den = Polynomial::from_roots(&den_roots).scale(self.den.coeffs()[self.den.degree()]);
        Self::new(num, den)
    }

    /// Resultant of the numerator and denominator after scaling both to unit
    /// coefficient norm; near zero when they share a root.
    pub fn resultant(&self) -> f64 {
        let unit = |p: &Polynomial| {
            let n = p.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            p.scale(Complex64::new(1.0 / n.max(f64::MIN_POSITIVE), 0.0))
        };
        let (p, q) = (unit(&self.num), unit(&self.den));
        let (m, n) = (p.degree(), q.degree());
        if m + n == 0 {
            return 1.0;
        }
        let size = m + n;
        let mut sylvester = ComplexMatrix::zeros(size, size);
        for row in 0..n {
            for k in 0..=m {
                sylvester[(row, row + k)] = p.coeff(m - k);
            }
        }
        for row in 0..m {
            for k in 0..=n {
                sylvester[(n + row, row + k)] = q.coeff(n - k);
            }
        }
        sylvester.determinant().norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::c64;

    fn rtf(num: &[f64], den: &[f64]) -> RationalTransferFunction {
        RationalTransferFunction::new(Polynomial::from_real(num).unwrap(), Polynomial::from_real(den).unwrap()).unwrap()
    }

    #[test]
    fn normalizes_denominator() {
        let w = rtf(&[2.0, 4.0], &[2.0, -1.0]);
        assert_eq!(w.den().coeff(0), c64(1.0, 0.0));
        assert_eq!(w.num().coeff(1), c64(2.0, 0.0));
    }

    #[test]
    fn impulse_and_realization_agree() {
        let w = rtf(&[1.0, 0.5, -0.2], &[1.0, -0.6, 0.08]);
        let h = w.impulse_response(6).unwrap();
        let ss = w.to_state_space().unwrap();
        assert!((h[0] - ss.d()).norm() < 1e-15);
        let mut ak_b = ss.b().clone();
        for hk in &h[1..6] {
            let markov = (ss.c() * &ak_b)[(0, 0)];
            assert!((hk - markov).norm() < 1e-14);
            ak_b = ss.a() * ak_b;
        }
        for z in [c64(0.3, 0.4), c64(-0.8, 0.0)] {
            assert!((w.eval(z) - ss.eval(z).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn cancels_common_factor() {
        // (1 - 0.5z)(1 + z) / ((1 - 0.5z)(1 - 0.25z))
        let w = rtf(&[1.0, 0.5, -0.5], &[1.0, -0.75, 0.125]);
        assert!(w.resultant() < 1e-12);
        let r = w.cancel_common_roots(1e-8).unwrap();
        assert_eq!(r.den().degree(), 1);
        for z in [c64(0.3, 0.4), c64(-0.8, 0.1)] {
            assert!((w.eval(z) - r.eval(z)).norm() < 1e-12);
        }
        assert!(rtf(&[1.0, 1.0], &[1.0, -0.5]).resultant() > 1e-3);
    }

    #[test]
    fn stability() {
        assert!(rtf(&[1.0], &[1.0, -0.5]).is_stable());
        assert!(!rtf(&[1.0], &[1.0, -1.0]).is_stable());
        assert!(RationalTransferFunction::constant(c64(2.0, 0.0)).is_stable());
    }
}
