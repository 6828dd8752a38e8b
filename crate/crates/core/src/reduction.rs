//! Model reduction: bilinear discretization, frequency responses, balanced
//! truncation and the interpolation-based reduction pipeline.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::filter::InputToStateFilter;
use crate::interp::{solve_with, validate_sigma, InterpolationData, SolveOptions};
use crate::numkit::{solve_stein, Complex64, ComplexMatrix};
use crate::realize::{covariance_check, markov_check, realize_model, CovarianceRoute, Domain, RationalTransferFunction, StateSpaceModel};

/// Tustin map to the delay convention: `W_d(z) = W_c(s)` with `s = (2/T)(1 - z)/(1 + z)`.
///
/// With `α = 2/T` and `M = αI - A`: `A_d = M⁻¹(αI + A)`, `B_d = M⁻¹B`,
/// `C_d = C(I + A_d)`, `D_d = D + C B_d`.
pub fn bilinear_discretize(model: &StateSpaceModel, period: f64) -> Result<StateSpaceModel> {
    if model.domain() != Domain::Continuous {
        return Err(Error::DomainMismatch);
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidArgument(format!("sample period {period} must be positive")));
    }
    let k = model.order();
    if k == 0 {
        return Ok(StateSpaceModel::gain(model.d(), Domain::Discrete));
    }
    let alpha = Complex64::new(2.0 / period, 0.0);
    let eye = ComplexMatrix::identity(k, k);
    let m = &eye * alpha - model.a();
    let lu = m.clone().lu();
    let inv = lu.try_inverse().ok_or(Error::SingularBilinear)?;
    // relative conditioning guard for a pole sitting on s = 2/T
    if inv.norm() * m.norm() > 1e14 {
        return Err(Error::SingularBilinear);
    }
    let ad = &inv * (&eye * alpha + model.a());
    let bd = &inv * model.b();
    let cd = model.c() * (&eye + &ad);
    let dd = model.d() + (model.c() * &bd)[(0, 0)];
    StateSpaceModel::new(ad, bd, cd, dd, Domain::Discrete)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScale {
    Log,
    Lin,
}

/// Frequency grid `lo:hi:npts:log|lin` in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub npts: usize,
    pub scale: GridScale,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, npts: usize, scale: GridScale) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) || npts == 0 {
            return Err(Error::InvalidArgument(format!("bad grid {lo}:{hi}:{npts}")));
        }
        if scale == GridScale::Log && lo <= 0.0 {
            return Err(Error::InvalidArgument("log grid needs lo > 0".into()));
        }
        if npts == 1 && lo != hi {
            return Err(Error::InvalidArgument("a one-point grid needs lo = hi".into()));
        }
        Ok(GridSpec { lo, hi, npts, scale })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.npts == 1 {
            return vec![self.lo];
        }
        let last = (self.npts - 1) as f64;
        (0..self.npts)
            .map(|i| {
                let t = i as f64 / last;
                match self.scale {
                    GridScale::Lin => self.lo + t * (self.hi - self.lo),
                    GridScale::Log => (self.lo.ln() + t * (self.hi.ln() - self.lo.ln())).exp(),
                }
            })
            .collect()
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            lo: 1.0,
            hi: 1e3,
            npts: 200,
            scale: GridScale::Log,
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidArgument(format!("grid '{s}' is not lo:hi:npts:log|lin"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let npts: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let scale = match parts[3].trim() {
            "log" => GridScale::Log,
            "lin" => GridScale::Lin,
            _ => return Err(bad()),
        };
        GridSpec::new(lo, hi, npts, scale)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = match self.scale {
            GridScale::Log => "log",
            GridScale::Lin => "lin",
        };
        write!(f, "{}:{}:{}:{scale}", self.lo, self.hi, self.npts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPoint {
    pub omega: f64,
    pub magnitude: f64,
    pub phase: f64,
}

/// Continuous models at `s = iω`; discrete models at the bilinear image
/// `z = (1 - iωT/2)/(1 + iωT/2)`, so both share one ω axis.
pub fn freq_response(model: &StateSpaceModel, grid: &GridSpec, period: Option<f64>) -> Result<Vec<FrequencyPoint>> {
    if model.domain() == Domain::Discrete && !matches!(period, Some(t) if t > 0.0) {
        return Err(Error::InvalidArgument(
            "discrete frequency response needs a positive sample period".into(),
        ));
    }
    grid.points()
        .into_iter()
        .map(|omega| {
            let x = match model.domain() {
                Domain::Continuous => Complex64::new(0.0, omega),
                Domain::Discrete => {
                    let half = Complex64::new(0.0, omega * period.unwrap_or(1.0) / 2.0);
                    (Complex64::new(1.0, 0.0) - half) / (Complex64::new(1.0, 0.0) + half)
                }
            };
            let w = model.eval(x)?;
            Ok(FrequencyPoint {
                omega,
                magnitude: w.norm(),
                phase: w.arg(),
            })
        })
        .collect()
}

pub fn frequency_csv(points: &[FrequencyPoint]) -> String {
    let mut out = String::from("omega,magnitude,phase_rad\n");
    for p in points {
        let _ = writeln!(out, "{:e},{:e},{:e}", p.omega, p.magnitude, p.phase);
    }
    out
}

/// `(P, Q)` with `P = APA* + BB*` and `Q = A*QA + C*C` for a stable discrete model.
pub fn gramians(model: &StateSpaceModel) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if model.domain() != Domain::Discrete {
        return Err(Error::DomainMismatch);
    }
    if !model.is_stable() {
        return Err(Error::UnstableModel);
    }
    let p = solve_stein(model.a(), &(model.b() * model.b().adjoint()))?;
    let q = solve_stein(&model.a().adjoint(), &(model.c().adjoint() * model.c()))?;
    Ok((p, q))
}

/// `X` with `XX* = P` from the Hermitian eigendecomposition (clipping tiny negative eigenvalues).
fn psd_sqrt(p: &ComplexMatrix) -> ComplexMatrix {
    let eig = crate::numkit::hermitian_part(p).symmetric_eigen();
    let scales: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let mut x = eig.eigenvectors;
    for (j, s) in scales.iter().enumerate() {
        x.column_mut(j).scale_mut(*s);
    }
    x
}

/// Hankel singular values in descending order.
pub fn hankel_singular_values(model: &StateSpaceModel) -> Result<Vec<f64>> {
    let (p, q) = gramians(model)?;
    let prod = psd_sqrt(&q).adjoint() * psd_sqrt(&p);
    let mut sv: Vec<f64> = prod.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Square-root balanced truncation to `k` states.
pub fn balanced_truncation(model: &StateSpaceModel, k: usize) -> Result<StateSpaceModel> {
    let order = model.order();
    if k > order {
        return Err(Error::InvalidArgument(format!(
            "cannot truncate a {order}-state model to {k} states"
        )));
    }
    let (p, q) = gramians(model)?;
    if k == 0 {
        return Ok(StateSpaceModel::gain(model.d(), Domain::Discrete));
    }
    let r = psd_sqrt(&p);
    let l = psd_sqrt(&q);
    let svd = (l.adjoint() * &r).svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let top = svd.singular_values[idx[0]];
    let kept = &idx[..k];
    if kept.iter().any(|&i| !(svd.singular_values[i] > 1e-14 * top)) {
        return Err(Error::SingularSystem(format!(
            "model has fewer than {k} numerically nonzero Hankel singular values"
        )));
    }
    let mut left = ComplexMatrix::zeros(k, order);
    let mut right = ComplexMatrix::zeros(order, k);
    for (j, &i) in kept.iter().enumerate() {
        let w = 1.0 / svd.singular_values[i].sqrt();
        left.set_row(j, &(u.column(i).adjoint() * &l.adjoint()).scale(w).row(0));
        right.set_column(j, &(&r * v_t.row(i).adjoint()).scale(w).column(0));
    }
    StateSpaceModel::new(
        &left * model.a() * &right,
        &left * model.b(),
        model.c() * &right,
        model.d(),
        Domain::Discrete,
    )
}

#[derive(Debug, Clone, Default)]
pub struct ReduceOptions {
    /// Sample period for continuous input models (ignored for discrete ones
    /// except when building frequency responses).
    pub period: Option<f64>,
    pub strict_sigma: bool,
    /// Scale the emitted model by `√Λ`.
    pub apply_variance: bool,
    pub grid: GridSpec,
    /// Record stage timings in the report (breaks byte-identical output).
    pub timings: bool,
}

/// Summary of one reduction run, rendered as a deterministic `key=value` block.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub full_order: usize,
    pub input_domain: Domain,
    pub period: Option<f64>,
    pub filter: String,
    pub degree: usize,
    pub lambda: f64,
    pub multiplicity: usize,
    pub condition: f64,
    pub sigma_structure_residual: f64,
    pub markov_residual: f64,
    pub covariance_residual: f64,
    pub input_stable: bool,
    pub reduced_stable: bool,
    pub apply_variance: bool,
    pub timings: Vec<(String, f64)>,
}

impl fmt::Display for ReductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "full_order={}", self.full_order)?;
        writeln!(f, "input_domain={}", self.input_domain.as_str())?;
        match self.period {
            Some(t) => writeln!(f, "period={t:e}")?,
            None => writeln!(f, "period=none")?,
        }
        writeln!(f, "filter={}", self.filter)?;
        writeln!(f, "degree={}", self.degree)?;
        writeln!(f, "lambda={:e}", self.lambda)?;
        writeln!(f, "multiplicity={}", self.multiplicity)?;
        writeln!(f, "unique={}", self.multiplicity == 1)?;
        writeln!(f, "pencil_condition={:e}", self.condition)?;
        writeln!(f, "sigma_structure_residual={:e}", self.sigma_structure_residual)?;
        writeln!(f, "markov_residual={:e}", self.markov_residual)?;
        writeln!(f, "covariance_residual={:e}", self.covariance_residual)?;
        writeln!(f, "input_stable={}", self.input_stable)?;
        writeln!(f, "reduced_stable={}", self.reduced_stable)?;
        writeln!(f, "apply_variance={}", self.apply_variance)?;
        for (stage, secs) in &self.timings {
            writeln!(f, "time_{stage}_s={secs:.6}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub report: ReductionReport,
    pub rational: RationalTransferFunction,
    pub state_space: StateSpaceModel,
    /// Discrete model the data were computed from.
    pub discrete_input: StateSpaceModel,
    pub original_response: Option<Vec<FrequencyPoint>>,
    pub reduced_response: Option<Vec<FrequencyPoint>>,
}

struct Stopwatch {
    enabled: bool,
    last: Instant,
    laps: Vec<(String, f64)>,
}

impl Stopwatch {
    fn new(enabled: bool) -> Self {
        Stopwatch {
            enabled,
            last: Instant::now(),
            laps: Vec::new(),
        }
    }

    fn lap(&mut self, stage: &str) {
        if self.enabled {
            let now = Instant::now();
            self.laps.push((stage.to_string(), (now - self.last).as_secs_f64()));
            self.last = now;
        }
    }
}

/// Reduces `model` to degree `filter.n() - 1`: exact `Σ = ⟨G𝒲, G𝒲⟩` and
/// `H = ⟨G, 𝒲⟩` from the (discretized) full model, then solve and realize.
pub fn reduce(model: &StateSpaceModel, filter: &InputToStateFilter, descriptor: &str, opts: &ReduceOptions) -> Result<Reduction> {
    let mut clock = Stopwatch::new(opts.timings);
    let input_stable = model.is_stable();
    if !input_stable {
        return Err(Error::UnstableModel);
    }
    let discrete = match model.domain() {
        Domain::Continuous => {
            let t = opts
                .period
                .ok_or_else(|| Error::InvalidArgument("a continuous model needs a sample period".into()))?;
            bilinear_discretize(model, t)?
        }
        Domain::Discrete => model.clone(),
    };
    clock.lap("discretize");

    let sigma = covariance_check(filter, &discrete, 1.0, CovarianceRoute::StateSpace)?;
    let markov = markov_check(filter, &discrete)?;
    let sigma_structure_residual = match validate_sigma(filter, &sigma) {
        Ok(_) => crate::interp::structure_fit(filter, &sigma)?.1,
        Err(Error::StructureViolation { residual }) => residual,
        Err(e) => return Err(e),
    };
    clock.lap("data");

    let data = InterpolationData::new(sigma.clone(), markov.clone())?;
    let solve_opts = SolveOptions {
        strict_sigma: opts.strict_sigma,
        ..SolveOptions::default()
    };
    let solution = solve_with(filter, &data, &solve_opts)?;
    clock.lap("solve");

    let (rational, state_space) = realize_model(filter, &solution)?;
    let markov_residual = (markov_check(filter, &state_space)? - &markov).norm() / markov.norm();
    let covariance_residual =
        (covariance_check(filter, &state_space, solution.lambda, CovarianceRoute::StateSpace)? - &sigma).norm() / sigma.norm();
    let reduced_stable = rational.is_stable() && state_space.is_stable();
    let (rational, state_space) = if opts.apply_variance {
        let g = Complex64::new(solution.lambda.sqrt(), 0.0);
        (rational.scale(g), state_space.scale_output(g))
    } else {
        (rational, state_space)
    };
    clock.lap("realize");

    let period = opts.period;
    let (original_response, reduced_response) = match period {
        Some(t) => (
            Some(freq_response(model, &opts.grid, Some(t))?),
            Some(freq_response(&state_space, &opts.grid, Some(t))?),
        ),
        None => (None, None),
    };
    clock.lap("frequency_response");

    let report = ReductionReport {
        full_order: model.order(),
        input_domain: model.domain(),
        period,
        filter: descriptor.to_string(),
        degree: filter.n() - 1,
        lambda: solution.lambda,
        multiplicity: solution.multiplicity,
        condition: solution.condition,
        sigma_structure_residual,
        markov_residual,
        covariance_residual,
        input_stable,
        reduced_stable,
        apply_variance: opts.apply_variance,
        timings: clock.laps,
    };
    Ok(Reduction {
        report,
        rational,
        state_space,
        discrete_input: discrete,
        original_response,
        reduced_response,
    })
}

/// `max |a - b| / max |a|` over points on the unit circle (discrete models).
pub fn max_circle_deviation(a: &StateSpaceModel, b: &StateSpaceModel, points: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    let mut peak = 0.0f64;
    for z in crate::numkit::circle_points(points, 1.0) {
        let (wa, wb) = (a.eval(z)?, b.eval(z)?);
        worst = worst.max((wa - wb).norm());
        peak = peak.max(wa.norm());
    }
    Ok(worst / peak.max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{make_caratheodory, make_circle_filter, Spacing};
    use crate::numkit::{c64, real_matrix};

    fn first_order(a: f64) -> StateSpaceModel {
        // 1/(s + a)
        StateSpaceModel::new(
            real_matrix(1, 1, &[-a]),
            real_matrix(1, 1, &[1.0]),
            real_matrix(1, 1, &[1.0]),
            c64(0.0, 0.0),
            Domain::Continuous,
        )
        .unwrap()
    }

    fn s_of_z(z: Complex64, t: f64) -> Complex64 {
        (Complex64::new(1.0, 0.0) - z) / (Complex64::new(1.0, 0.0) + z) * (2.0 / t)
    }

    #[test]
    fn bilinear_examples() {
        let t = 1.0 / 250.0;
        let a = 30.0;
        let c = first_order(a);
        let d = bilinear_discretize(&c, t).unwrap();
        assert!((d.eval(c64(1.0, 0.0)).unwrap() - c.eval(c64(0.0, 0.0)).unwrap()).norm() < 1e-14);
        let pole = (1.0 + a * t / 2.0) / (1.0 - a * t / 2.0);
        // delay-convention pole is 1/eigenvalue of A_d
        assert!((1.0 / d.a()[(0, 0)].re - pole).abs() < 1e-12);
        assert!(pole > 1.0 && d.is_stable());
        for z in crate::numkit::circle_points(64, 0.7) {
            assert!((d.eval(z).unwrap() - c.eval(s_of_z(z, t)).unwrap()).norm() < 1e-8);
        }
    }

    #[test]
    fn bilinear_singular_at_plus_two_over_t() {
        let t = 0.5;
        let c = StateSpaceModel::new(
            real_matrix(1, 1, &[4.0]),
            real_matrix(1, 1, &[1.0]),
            real_matrix(1, 1, &[1.0]),
            c64(0.0, 0.0),
            Domain::Continuous,
        )
        .unwrap();
        assert!(matches!(bilinear_discretize(&c, t), Err(Error::SingularBilinear)));
    }

    #[test]
    fn grid_parsing() {
        let g: GridSpec = "1:1000:4:log".parse().unwrap();
        let p = g.points();
        assert_eq!(p.len(), 4);
        assert!((p[1] - 10.0).abs() < 1e-12 && (p[3] - 1000.0).abs() < 1e-9);
        let g: GridSpec = "0:3:4:lin".parse().unwrap();
        assert_eq!(g.points(), vec![0.0, 1.0, 2.0, 3.0]);
        assert!("0:3:4:log".parse::<GridSpec>().is_err());
        assert!("1:2:3".parse::<GridSpec>().is_err());
        assert_eq!(g.to_string(), "0:3:4:lin");
    }

    #[test]
    fn frequency_response_examples() {
        let one = StateSpaceModel::gain(c64(1.0, 0.0), Domain::Discrete);
        let g = GridSpec::default();
        assert!(freq_response(&one, &g, Some(0.01))
            .unwrap()
            .iter()
            .all(|p| (p.magnitude - 1.0).abs() < 1e-15));
        // W(z) = z
        let delay = StateSpaceModel::new(
            real_matrix(1, 1, &[0.0]),
            real_matrix(1, 1, &[1.0]),
            real_matrix(1, 1, &[1.0]),
            c64(0.0, 0.0),
            Domain::Discrete,
        )
        .unwrap();
        assert!(freq_response(&delay, &g, Some(0.01))
            .unwrap()
            .iter()
            .all(|p| (p.magnitude - 1.0).abs() < 1e-14));
        assert!(freq_response(&delay, &g, None).is_err());
        let csv = frequency_csv(&freq_response(&one, &GridSpec::new(1.0, 1.0, 1, GridScale::Lin).unwrap(), Some(1.0)).unwrap());
        assert_eq!(csv, "omega,magnitude,phase_rad\n1e0,1e0,0e0\n");
    }

    fn random_discrete(seed: u64, order: usize) -> StateSpaceModel {
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = ComplexMatrix::from_fn(order, order, |_, _| c64(next(), next()));
        let rho = crate::numkit::spectral_radius(&a).unwrap();
        let a = a.scale(0.8 / rho);
        let b = ComplexMatrix::from_fn(order, 1, |_, _| c64(next(), next()));
        let c = ComplexMatrix::from_fn(1, order, |_, _| c64(next(), next()));
        StateSpaceModel::new(a, b, c, c64(next(), 0.0), Domain::Discrete).unwrap()
    }

    #[test]
    fn balanced_truncation_properties() {
        for seed in 1..4 {
            let m = random_discrete(seed, 6);
            let full = balanced_truncation(&m, 6).unwrap();
            assert!(max_circle_deviation(&m, &full, 128).unwrap() < 1e-9);
            let (p, q) = gramians(&full).unwrap();
            let hsv = hankel_singular_values(&m).unwrap();
            let diag = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(6, hsv.iter().map(|&s| c64(s, 0.0))));
            assert!((&p - &diag).norm() < 1e-8 * diag.norm());
            assert!((&q - &diag).norm() < 1e-8 * diag.norm());
            for k in 1..6 {
                let r = balanced_truncation(&m, k).unwrap();
                let bound = 2.0 * hsv[k..].iter().sum::<f64>();
                for z in crate::numkit::circle_points(256, 1.0) {
                    assert!((m.eval(z).unwrap() - r.eval(z).unwrap()).norm() <= bound * (1.0 + 1e-9));
                }
            }
        }
    }

    #[test]
    fn reduce_full_degree_reproduces_model() {
        let m = random_discrete(9, 3);
        let f = make_caratheodory(4).unwrap();
        let out = reduce(&m, &f, "caratheodory:4", &ReduceOptions::default()).unwrap();
        assert!(out.report.markov_residual < 1e-8);
        assert!(out.report.covariance_residual < 1e-6);
        assert!(out.report.reduced_stable);
        assert!((out.report.lambda - 1.0).abs() < 1e-8);
        assert!(max_circle_deviation(&m, &out.state_space, 128).unwrap() < 1e-6);
        assert_eq!(out.report.timings.len(), 0);
        let again = reduce(&m, &f, "caratheodory:4", &ReduceOptions::default()).unwrap();
        assert_eq!(out.report.to_string(), again.report.to_string());
    }

    #[test]
    fn reduce_continuous_with_circle_filter() {
        let c = first_order(20.0);
        let f = make_circle_filter(3, 0.95, Spacing::Even, true).unwrap();
        let opts = ReduceOptions {
            period: Some(1.0 / 250.0),
            ..ReduceOptions::default()
        };
        let out = reduce(&c, &f, "circle", &opts).unwrap();
        assert!(out.report.markov_residual < 1e-8 && out.report.covariance_residual < 1e-6);
        assert_eq!(out.original_response.unwrap().len(), 200);
        assert!(reduce(&c, &f, "circle", &ReduceOptions::default()).is_err());
    }
}
