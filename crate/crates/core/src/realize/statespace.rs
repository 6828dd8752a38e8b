use crate::error::{Error, Result};
use crate::numkit::{det_poly, eigenvalues, ensure_finite, ensure_square, spectral_radius, transfer_numerator, Complex64, ComplexMatrix};

use super::RationalTransferFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Discrete,
    Continuous,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Discrete => "discrete",
            Domain::Continuous => "continuous",
        }
    }
}

/// SISO state-space model `(A, B, C, D)`.
///
/// Discrete models use the delay convention `W(z) = D + z C (I - zA)^{-1} B`,
/// continuous ones `W(s) = D + C (sI - A)^{-1} B`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel {
    a: ComplexMatrix,
    b: ComplexMatrix,
    c: ComplexMatrix,
    d: Complex64,
    domain: Domain,
}

impl StateSpaceModel {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, c: ComplexMatrix, d: Complex64, domain: Domain) -> Result<Self> {
        let k = ensure_square(&a, "A")?;
        if b.nrows() != k || b.ncols() != 1 || c.nrows() != 1 || c.ncols() != k {
            return Err(Error::Dimension(format!(
                "model with {k} states needs B {k}x1 and C 1x{k}, got {}x{} and {}x{}",
                b.nrows(),
                b.ncols(),
                c.nrows(),
                c.ncols()
            )));
        }
        ensure_finite(&a, "A")?;
        ensure_finite(&b, "B")?;
        ensure_finite(&c, "C")?;
        if !d.re.is_finite() || !d.im.is_finite() {
            return Err(Error::NonFinite("D"));
        }
        Ok(StateSpaceModel { a, b, c, d, domain })
    }

    /// Static gain with no states.
    pub fn gain(d: Complex64, domain: Domain) -> Self {
        StateSpaceModel {
            a: ComplexMatrix::zeros(0, 0),
            b: ComplexMatrix::zeros(0, 1),
            c: ComplexMatrix::zeros(1, 0),
            d,
            domain,
        }
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn c(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn d(&self) -> Complex64 {
        self.d
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Transfer value at `z` (discrete) or `s` (continuous).
    pub fn eval(&self, x: Complex64) -> Result<Complex64> {
        let k = self.order();
        if k == 0 {
            return Ok(self.d);
        }
        let eye = ComplexMatrix::identity(k, k);
        let (m, factor) = match self.domain {
            Domain::Discrete => (&eye - &self.a * x, x),
            Domain::Continuous => (&eye * x - &self.a, Complex64::new(1.0, 0.0)),
        };
        let solved = m.lu().solve(&self.b).ok_or(Error::NearPole)?;
        Ok(self.d + (&self.c * solved)[(0, 0)] * factor)
    }

    pub fn is_stable(&self) -> bool {
        match self.domain {
            Domain::Discrete => spectral_radius(&self.a).map(|r| r < 1.0).unwrap_or(false),
            Domain::Continuous => eigenvalues(&self.a).map(|ev| ev.iter().all(|l| l.re < 0.0)).unwrap_or(false),
        }
    }

    /// Polynomial form of a discrete model: denominator `det(I - zA)`,
    /// numerator `det(I - zA)·W(z)`.
    pub fn to_rational(&self) -> Result<RationalTransferFunction> {
        if self.domain != Domain::Discrete {
            return Err(Error::DomainMismatch);
        }
        let den = det_poly(&self.a)?;
        let num = transfer_numerator(&self.a, &self.b, &self.c, self.d, true)?;
        RationalTransferFunction::new(num, den)
    }

    pub fn scale_output(&self, s: Complex64) -> Self {
        StateSpaceModel {
            c: &self.c * s,
            d: self.d * s,
            ..self.clone()
        }
    }
}
