//! Input-to-state filters `x_k = A x_{k-1} + B y_k` and the inner-product
//! formulas that make them useful for interpolation.
//!
//! State-Markov vectors are reported in filter space, `⟨G, f⟩ = f̄(A)B`.
//! For a diagonal filter with `B = 1` the k-th entry is the conjugate of the
//! interpolated value, `conj(f(p̄_k))`.

use std::f64::consts::PI;

use nalgebra::{Cholesky, Dyn};

use crate::error::{Error, Result};
use crate::numkit::{
    det_poly, ensure_finite, ensure_square, hermitian_part, solve_stein, spectral_radius, transfer_numerator, Complex64, ComplexMatrix,
    Polynomial, Tolerances,
};
use crate::realize::RationalTransferFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationPoint {
    pub point: Complex64,
    pub multiplicity: usize,
}

impl InterpolationPoint {
    pub fn simple(point: Complex64) -> Self {
        InterpolationPoint { point, multiplicity: 1 }
    }
}

/// Angular placement of circle filters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spacing {
    /// `radius·e^{2πik/n}`.
    Even,
    /// Angular frequencies (rad/s) log-spaced over `[f_lo, f_hi]`, mapped to
    /// the angle `2 atan(ωT/2)` of their bilinear image for sample period `T`.
    Log { f_lo: f64, f_hi: f64, period: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    /// Every point at the origin: `A` is the down-shift, `B = e₁`.
    Caratheodory {
        n: usize,
    },
    Points(Vec<InterpolationPoint>),
    Circle {
        n: usize,
        radius: f64,
        spacing: Spacing,
        conjugate_closed: bool,
    },
    /// Any reachable stable pair supplied directly.
    Custom,
}

/// A stable reachable pair `(A, B)` together with its Gramian `𝒢 = ⟨G, G⟩`
/// and reachability matrix `Γ`. Immutable once built.
#[derive(Debug, Clone)]
pub struct InputToStateFilter {
    a: ComplexMatrix,
    b: ComplexMatrix,
    gramian: ComplexMatrix,
    reach: ComplexMatrix,
    gramian_factor: Cholesky<Complex64, Dyn>,
    layout: Layout,
}

impl InputToStateFilter {
    /// Builds a filter from an explicit pair, checking stability and reachability.
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        Self::with_layout(a, b, Layout::Custom)
    }

    fn with_layout(a: ComplexMatrix, b: ComplexMatrix, layout: Layout) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        let n = ensure_square(&a, "A")?;
        if n == 0 {
            return Err(Error::Dimension("filter needs at least one state".into()));
        }
        if b.nrows() != n || b.ncols() != 1 {
            return Err(Error::Dimension(format!("B must be {n}x1")));
        }
        ensure_finite(&a, "A")?;
        ensure_finite(&b, "B")?;
        let rho = spectral_radius(&a)?;
        if rho >= 1.0 - tol.stability_margin {
            return Err(Error::SpectralRadius { rho });
        }
        let mut reach = ComplexMatrix::zeros(n, n);
        let mut col = b.clone();
        for k in 0..n {
            reach.set_column(k, &col.column(0));
            col = &a * col;
        }
        let sv = reach.clone().singular_values();
        let ratio = sv.min() / sv.max();
        if !(ratio > tol.reach_rank) {
            return Err(Error::NotReachable { ratio });
        }
        let gramian = hermitian_part(&solve_stein(&a, &(&b * b.adjoint()))?);
        let gramian_factor = Cholesky::new(gramian.clone()).ok_or(Error::NotReachable { ratio: 0.0 })?;
        Ok(InputToStateFilter {
            a,
            b,
            gramian,
            reach,
            gramian_factor,
            layout,
        })
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn gramian(&self) -> &ComplexMatrix {
        &self.gramian
    }

    /// `Γ = [B, AB, …, A^{n-1}B]`.
    pub fn reach(&self) -> &ComplexMatrix {
        &self.reach
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// `𝒢⁻¹ R` through the cached Cholesky factor.
    pub fn gramian_solve(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.gramian_factor.solve(rhs)
    }

    /// `det(I - zA)` as a polynomial.
    pub fn char_poly(&self) -> Polynomial {
        det_poly(&self.a).expect("A is square")
    }

    /// The polynomial `p` with `row·G(z) = p(z) / det(I - zA)`, which equals
    /// `(det(I - z(A - B·row)) - det(I - zA)) / z`. Degree at most `n - 1`;
    /// computed from circle samples to avoid the cancellation in that difference.
    pub fn coinvariant_numerator(&self, row: &ComplexMatrix) -> Result<Polynomial> {
        if row.nrows() != 1 || row.ncols() != self.n() {
            return Err(Error::Dimension(format!("row vector must be 1x{}", self.n())));
        }
        transfer_numerator(&self.a, &self.b, row, Complex64::default(), false)
    }

    /// `G(z) = (I - zA)^{-1} B`.
    pub fn eval_g(&self, z: Complex64) -> Result<ComplexMatrix> {
        let n = self.n();
        let inv = (ComplexMatrix::identity(n, n) - &self.a * z).try_inverse().ok_or(Error::NearPole)?;
        if !(inv.norm() <= 1.0 / Tolerances::DEFAULT.near_pole) {
            return Err(Error::NearPole);
        }
        Ok(inv * &self.b)
    }

    /// `f̄(A) R` for a rational scalar `f` analytic in the closed disc.
    fn apply_conj(&self, f: &RationalTransferFunction, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !f.is_stable() {
            return Err(Error::UnstableF);
        }
        let den = f.den().conj().eval_matrix(&self.a);
        let solved = den.lu().solve(rhs).ok_or(Error::UnstableF)?;
        Ok(f.num().conj().apply(&self.a, &solved))
    }

    /// `f̄(A)`.
    pub fn apply_conj_matrix(&self, f: &RationalTransferFunction) -> Result<ComplexMatrix> {
        let n = self.n();
        self.apply_conj(f, &ComplexMatrix::identity(n, n))
    }

    /// `⟨G, f⟩ = f̄(A) B`.
    pub fn ip_g_scalar(&self, f: &RationalTransferFunction) -> Result<ComplexMatrix> {
        self.apply_conj(f, &self.b)
    }

    /// `⟨f, G⟩ = B* f(A*)`, the adjoint of [`Self::ip_g_scalar`].
    pub fn ip_scalar_g(&self, f: &RationalTransferFunction) -> Result<ComplexMatrix> {
        Ok(self.ip_g_scalar(f)?.adjoint())
    }

    /// `⟨G, fG⟩ = f̄(A) 𝒢`.
    pub fn ip_g_scalar_g(&self, f: &RationalTransferFunction) -> Result<ComplexMatrix> {
        self.apply_conj(f, &self.gramian)
    }

    /// Blaschke product `det(zI - A*) / det(I - zA)`; unimodular on the circle.
    pub fn blaschke(&self, z: Complex64) -> Result<Complex64> {
        let n = self.n();
        let eye = ComplexMatrix::identity(n, n);
        let den = (&eye - &self.a * z).determinant();
        let num = (&eye * z - self.a.adjoint()).determinant();
        if den.norm() <= Tolerances::DEFAULT.near_pole * (1.0 + num.norm()) {
            return Err(Error::NearPole);
        }
        Ok(num / den)
    }
}

/// Down-shift `A` and `B = e₁`, so `G(z) = [1, z, …, z^{n-1}]ᵀ` and `𝒢 = I`.
pub fn make_caratheodory(n: usize) -> Result<InputToStateFilter> {
    if n == 0 {
        return Err(Error::InvalidArgument("filter order must be at least 1".into()));
    }
    let (a, b) = jordan_pair(&[InterpolationPoint {
        point: Complex64::default(),
        multiplicity: n,
    }]);
    InputToStateFilter::with_layout(a, b, Layout::Caratheodory { n })
}

/// One lower Jordan block per point (size = multiplicity) with `B` carrying
/// `e₁` on each block. Simple points give `A = diag(p)`, `B = 1`.
fn jordan_pair(points: &[InterpolationPoint]) -> (ComplexMatrix, ComplexMatrix) {
    let n: usize = points.iter().map(|p| p.multiplicity).sum();
    let mut a = ComplexMatrix::zeros(n, n);
    let mut b = ComplexMatrix::zeros(n, 1);
    let mut offset = 0;
    for p in points {
        b[(offset, 0)] = Complex64::new(1.0, 0.0);
        for i in 0..p.multiplicity {
            a[(offset + i, offset + i)] = p.point;
            if i > 0 {
                a[(offset + i, offset + i - 1)] = Complex64::new(1.0, 0.0);
            }
        }
        offset += p.multiplicity;
    }
    (a, b)
}

const COINCIDENT: f64 = 1e-12;

pub fn make_point_filter(points: &[InterpolationPoint]) -> Result<InputToStateFilter> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("at least one interpolation point is required".into()));
    }
    for (i, p) in points.iter().enumerate() {
        if p.multiplicity == 0 {
            return Err(Error::InvalidArgument("multiplicity must be at least 1".into()));
        }
        if !(p.point.norm() < 1.0) {
            return Err(Error::PointOutsideDisc(p.point.to_string()));
        }
        if points[..i].iter().any(|q| (q.point - p.point).norm() <= COINCIDENT) {
            return Err(Error::DuplicatePoint(p.point.to_string()));
        }
    }
    let (a, b) = jordan_pair(points);
    InputToStateFilter::with_layout(a, b, Layout::Points(points.to_vec()))
}

/// Angles (in `(0, π)` for the log layout) before conjugate mirroring.
fn log_angles(count: usize, f_lo: f64, f_hi: f64, period: f64) -> Vec<f64> {
    let (lo, hi) = (f_lo.ln(), f_hi.ln());
    (0..count)
        .map(|k| {
            let t = if count == 1 { 0.5 } else { k as f64 / (count - 1) as f64 };
            let omega = (lo + t * (hi - lo)).exp();
            2.0 * (omega * period / 2.0).atan()
        })
        .collect()
}

/// `n` points on a circle of the given radius.
///
/// With `conjugate_closed` every non-real point comes with its conjugate (an
/// odd count adds the real point `radius`), so real data give real
/// polynomials downstream.
pub fn make_circle_filter(n: usize, radius: f64, spacing: Spacing, conjugate_closed: bool) -> Result<InputToStateFilter> {
    if n == 0 {
        return Err(Error::InvalidArgument("filter order must be at least 1".into()));
    }
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidArgument(format!("radius {radius} is not in (0, 1)")));
    }
    let angles: Vec<f64> = match spacing {
        Spacing::Even => (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect(),
        Spacing::Log { f_lo, f_hi, period } => {
            if !(f_lo > 0.0 && f_lo < f_hi && period > 0.0) {
                return Err(Error::InvalidArgument("log spacing needs 0 < f_lo < f_hi and T > 0".into()));
            }
            if conjugate_closed {
                let mut angles = Vec::with_capacity(n);
                if n % 2 == 1 {
                    angles.push(0.0);
                }
                for theta in log_angles(n / 2, f_lo, f_hi, period) {
                    angles.push(theta);
                    angles.push(-theta);
                }
                angles
            } else {
                log_angles(n, f_lo, f_hi, period)
            }
        }
    };
    let points: Vec<Complex64> = angles.iter().map(|&t| Complex64::from_polar(radius, t)).collect();
    for (i, p) in points.iter().enumerate() {
        if points[..i].iter().any(|q| (q - p).norm() <= COINCIDENT) {
            return Err(Error::AngleCollision);
        }
    }
    let list: Vec<InterpolationPoint> = points.into_iter().map(InterpolationPoint::simple).collect();
    let (a, b) = jordan_pair(&list);
    InputToStateFilter::with_layout(
        a,
        b,
        Layout::Circle {
            n,
            radius,
            spacing,
            conjugate_closed,
        },
    )
}
