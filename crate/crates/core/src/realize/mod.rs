//! Polynomial and state-space forms of the optimizer `W = σG/ξG`, and the
//! back-map formulas that recover `⟨G, W⟩` and `Λ⟨GW, GW⟩` from a model.

mod rational;
mod statespace;

pub use rational::RationalTransferFunction;
pub use statespace::{Domain, StateSpaceModel};

use crate::error::{Error, Result};
use crate::filter::InputToStateFilter;
use crate::interp::Solution;
use crate::numkit::{
    circle_points, hermitian_part, solve_stein, solve_stein_general, spectral_factor_with, Complex64, ComplexMatrix, Polynomial, Tolerances,
};

/// Borrowed view of either model representation.
#[derive(Debug, Clone, Copy)]
pub enum ModelRef<'a> {
    Rational(&'a RationalTransferFunction),
    StateSpace(&'a StateSpaceModel),
}

impl<'a> From<&'a RationalTransferFunction> for ModelRef<'a> {
    fn from(m: &'a RationalTransferFunction) -> Self {
        ModelRef::Rational(m)
    }
}

impl<'a> From<&'a StateSpaceModel> for ModelRef<'a> {
    fn from(m: &'a StateSpaceModel) -> Self {
        ModelRef::StateSpace(m)
    }
}

impl ModelRef<'_> {
    fn rational(self) -> Result<RationalTransferFunction> {
        match self {
            ModelRef::Rational(r) => Ok(r.clone()),
            ModelRef::StateSpace(s) => s.to_rational(),
        }
    }

    fn state_space(self) -> Result<StateSpaceModel> {
        match self {
            ModelRef::Rational(r) => r.to_state_space(),
            ModelRef::StateSpace(s) => Ok(s.clone()),
        }
    }

    pub fn eval(self, z: Complex64) -> Result<Complex64> {
        match self {
            ModelRef::Rational(r) => Ok(r.eval(z)),
            ModelRef::StateSpace(s) => s.eval(z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealizationForm {
    /// `n` states: `(Aβ, AB, σβ, σB) / ξB` with `β = I - Bξ/(ξB)`.
    Full,
    /// `n - 1` states after removing the mode that `β` annihilates.
    Reduced,
    /// Same `n - 1` states with the dynamics matrix built from the
    /// characteristic polynomial of `A` and the ratios `ξA^{k+1}B / ξB`.
    Companion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovarianceRoute {
    Polynomial,
    StateSpace,
}

fn numerator_and_denominator(filter: &InputToStateFilter, solution: &Solution) -> Result<(Polynomial, Polynomial)> {
    let b = filter.coinvariant_numerator(&solution.sigma_row)?;
    let a = filter.coinvariant_numerator(&solution.xi)?;
    Ok((b, a))
}

/// Fails when `ξG` has a zero in the closed disc that `σG` does not share.
pub(crate) fn check_optimizer_poles(filter: &InputToStateFilter, solution: &Solution, tol: &Tolerances) -> Result<()> {
    let (b, a) = numerator_and_denominator(filter, solution)?;
    if a.is_zero() {
        return Err(Error::UnstableOptimizer { modulus: 0.0 });
    }
    let mut num_roots = b.roots()?;
    for r in a.roots()? {
        if r.norm() > 1.0 + tol.root_margin {
            continue;
        }
        let matched = num_roots
            .iter()
            .enumerate()
            .map(|(j, q)| (j, (q - r).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .filter(|&(_, d)| d <= tol.cancel * r.norm().max(1.0));
        match matched {
            Some((j, _)) => {
                num_roots.swap_remove(j);
            }
            None => return Err(Error::UnstableOptimizer { modulus: r.norm() }),
        }
    }
    Ok(())
}

/// `W = b/a` with `b = (det(I - z(A - Bσ)) - det(I - zA))/z` and `a` the same
/// with `ξ`. Common factors are kept; see [`RationalTransferFunction::resultant`].
pub fn to_rational(filter: &InputToStateFilter, solution: &Solution) -> Result<RationalTransferFunction> {
    check_optimizer_poles(filter, solution, &Tolerances::DEFAULT)?;
    let (b, a) = numerator_and_denominator(filter, solution)?;
    RationalTransferFunction::new(b, a)
}

struct Appendix {
    xib: Complex64,
    beta: ComplexMatrix,
}

fn appendix_terms(filter: &InputToStateFilter, solution: &Solution) -> Result<Appendix> {
    let b = filter.b();
    let xib = (&solution.xi * b)[(0, 0)];
    if xib.norm() < Tolerances::DEFAULT.xib * solution.xi.norm() * b.norm() {
        return Err(Error::XiBZero);
    }
    let n = filter.n();
    let beta = ComplexMatrix::identity(n, n) - b * &solution.xi / xib;
    Ok(Appendix { xib, beta })
}

pub fn to_state_space(filter: &InputToStateFilter, solution: &Solution, form: RealizationForm) -> Result<StateSpaceModel> {
    let Appendix { xib, beta } = appendix_terms(filter, solution)?;
    let a = filter.a();
    let b = filter.b();
    let n = filter.n();
    let sigma = &solution.sigma_row;
    let d = (sigma * b)[(0, 0)] / xib;
    let inv_xib = Complex64::new(1.0, 0.0) / xib;
    if form == RealizationForm::Full {
        return StateSpaceModel::new(a * &beta, a * b, sigma * &beta * inv_xib, d, Domain::Discrete);
    }

    let k = n - 1;
    let reach_short = filter.reach().columns(0, k).into_owned();
    let output = sigma * &beta * a * &reach_short * inv_xib;
    let mut input = ComplexMatrix::zeros(k, 1);
    if k > 0 {
        input[(0, 0)] = Complex64::new(1.0, 0.0);
    }
    let dynamics = match form {
        RealizationForm::Reduced => {
            let reach_inv = filter
                .reach()
                .clone()
                .lu()
                .try_inverse()
                .ok_or_else(|| Error::SingularSystem("reachability matrix".into()))?;
            reach_inv.rows(1, k).into_owned() * a * &beta * a * &reach_short
        }
        _ => {
            // det(I - zA) = 1 + χ_1 z + … + χ_n z^n
            let chi = filter.char_poly();
            let mut gamma = Vec::with_capacity(k);
            let mut akb = a * b;
            for _ in 0..k {
                gamma.push((&solution.xi * &akb)[(0, 0)] * inv_xib);
                akb = a * akb;
            }
            let mut m = ComplexMatrix::zeros(k, k);
            for j in 0..k {
                m[(0, j)] = -gamma[j];
            }
            if k > 0 {
                m[(0, k - 1)] -= chi.coeff(n - 1);
            }
            for i in 1..k {
                m[(i, i - 1)] = Complex64::new(1.0, 0.0);
                m[(i, k - 1)] = -chi.coeff(n - 1 - i);
            }
            m
        }
    };
    StateSpaceModel::new(dynamics, input, output, d, Domain::Discrete)
}

/// Preferred output realization: the reduced form, or the canonical
/// realization of the polynomial form when `ξB` is too small or when the
/// reduced form keeps unstable modes that cancel in `W`.
pub fn realize_model(filter: &InputToStateFilter, solution: &Solution) -> Result<(RationalTransferFunction, StateSpaceModel)> {
    let rational = to_rational(filter, solution)?;
    let ss = match to_state_space(filter, solution, RealizationForm::Reduced) {
        Ok(ss) => ss,
        Err(Error::XiBZero) => {
            log::warn!("ξB is numerically zero; falling back to the canonical realization");
            rational.to_state_space()?
        }
        Err(e) => return Err(e),
    };
    if !ss.is_stable() {
        // unstable modes shared by σG and ξG are hidden in W but not in the realization
        let reduced = rational.cancel_common_roots(Tolerances::DEFAULT.cancel)?;
        if reduced.is_stable() {
            log::warn!("realization has cancelled unstable modes; using the realization of the reduced quotient");
            return Ok((rational, reduced.to_state_space()?));
        }
    }
    Ok((rational, ss))
}

fn ensure_stable(model: ModelRef<'_>) -> Result<()> {
    let stable = match model {
        ModelRef::Rational(r) => r.is_stable(),
        ModelRef::StateSpace(s) => s.domain() == Domain::Discrete && s.is_stable(),
    };
    if stable {
        Ok(())
    } else {
        Err(Error::UnstableModel)
    }
}

/// `⟨G, W⟩`. Rational models use `b̄(A) ā(A)^{-1} B`; state-space models use
/// `B D* + A P̃ C*` with `P̃ = A P̃ 𝒜* + B ℬ*`.
pub fn markov_check<'a>(filter: &InputToStateFilter, model: impl Into<ModelRef<'a>>) -> Result<ComplexMatrix> {
    let model = model.into();
    ensure_stable(model)?;
    match model {
        ModelRef::Rational(r) => filter.ip_g_scalar(r).map_err(|_| Error::UnstableModel),
        ModelRef::StateSpace(s) => {
            let a = filter.a();
            let b = filter.b();
            let cross = solve_stein_general(a, s.a(), &(b * s.b().adjoint()), &Tolerances::DEFAULT)?;
            Ok(b * s.d().conj() + a * cross * s.c().adjoint())
        }
    }
}

/// Positive-real part `f = d/a` of `WW*` together with `Ψ = f̄(A)`.
#[derive(Debug, Clone)]
pub struct PositiveRealPart {
    pub d: Polynomial,
    pub a: Polynomial,
    pub psi: ComplexMatrix,
}

impl PositiveRealPart {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.d.eval(z) / self.a.eval(z)
    }
}

pub fn positive_real_part(filter: &InputToStateFilter, w: &RationalTransferFunction) -> Result<PositiveRealPart> {
    let tol = Tolerances::DEFAULT;
    let d = spectral_factor_with(w.num(), w.den(), &tol)?;
    let f = RationalTransferFunction::new(d.clone(), w.den().clone())?;
    let mut floor = 0.0f64;
    let mut peak = 0.0f64;
    for z in circle_points(tol.circle_grid, 1.0) {
        let re = f.eval(z).re;
        floor = floor.min(re);
        peak = peak.max(re);
    }
    if floor < -tol.pencil * peak.max(1.0) {
        return Err(Error::SingularSystem(format!("positive-real part dips to {floor:e}")));
    }
    let psi = filter.apply_conj_matrix(&f)?;
    Ok(PositiveRealPart {
        d: f.num().clone(),
        a: f.den().clone(),
        psi,
    })
}

/// Realization of `G·𝒲` with state `(χ, x_{k-1})`.
///
/// The output is the current filter state `x_k`, so that the transfer is
/// exactly `G(z)𝒲(z)` in the delay convention; the lower block of the state
/// is `x` delayed once and carries the same covariance.
#[derive(Debug, Clone)]
pub struct CascadeRealization {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
    pub d: ComplexMatrix,
    /// Number of states belonging to the model (the filter follows).
    pub model_order: usize,
}

impl CascadeRealization {
    pub fn eval(&self, z: Complex64) -> Result<ComplexMatrix> {
        let k = self.a.nrows();
        let solved = (ComplexMatrix::identity(k, k) - &self.a * z)
            .lu()
            .solve(&self.b)
            .ok_or(Error::NearPole)?;
        Ok(&self.d + &self.c * solved * z)
    }

    /// Covariance of the filter state for unit-variance white input.
    pub fn state_covariance(&self) -> Result<ComplexMatrix> {
        let p = solve_stein(&self.a, &(&self.b * self.b.adjoint()))?;
        let k = self.model_order;
        let n = self.a.nrows() - k;
        Ok(hermitian_part(&p.view((k, k), (n, n)).into_owned()))
    }
}

pub fn cascade(filter: &InputToStateFilter, model: &StateSpaceModel) -> Result<CascadeRealization> {
    if model.domain() != Domain::Discrete {
        return Err(Error::DomainMismatch);
    }
    let k = model.order();
    let n = filter.n();
    let bc = filter.b() * model.c();
    let bd = filter.b() * model.d();
    let mut a = ComplexMatrix::zeros(k + n, k + n);
    a.view_mut((0, 0), (k, k)).copy_from(model.a());
    a.view_mut((k, 0), (n, k)).copy_from(&bc);
    a.view_mut((k, k), (n, n)).copy_from(filter.a());
    let mut b = ComplexMatrix::zeros(k + n, 1);
    b.view_mut((0, 0), (k, 1)).copy_from(model.b());
    b.view_mut((k, 0), (n, 1)).copy_from(&bd);
    let mut c = ComplexMatrix::zeros(n, k + n);
    c.view_mut((0, 0), (n, k)).copy_from(&bc);
    c.view_mut((0, k), (n, n)).copy_from(filter.a());
    Ok(CascadeRealization {
        a,
        b,
        c,
        d: bd,
        model_order: k,
    })
}

/// State covariance `𝒮 = Λ⟨GW, GW⟩` of the filter driven by `W` with input variance `Λ`.
///
/// The polynomial route evaluates `Λ(Ψ𝒢 + 𝒢Ψ*)` with `Ψ = f̄(A)`, `f + f* = WW*`;
/// the state-space route solves the Lyapunov equation of the cascade `G·W`.
pub fn covariance_check<'a>(
    filter: &InputToStateFilter,
    model: impl Into<ModelRef<'a>>,
    lambda: f64,
    route: CovarianceRoute,
) -> Result<ComplexMatrix> {
    let model = model.into();
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("input variance {lambda} must be positive")));
    }
    ensure_stable(model)?;
    let s = match route {
        CovarianceRoute::Polynomial => {
            let pr = positive_real_part(filter, &model.rational()?)?;
            let pg = &pr.psi * filter.gramian();
            &pg + pg.adjoint()
        }
        CovarianceRoute::StateSpace => cascade(filter, &model.state_space()?)?.state_covariance()?,
    };
    Ok(hermitian_part(&s).scale(lambda))
}
