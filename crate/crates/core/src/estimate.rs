//! Estimating `Σ` and `H` from data by running the filter recursion.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::filter::InputToStateFilter;
use crate::numkit::{hermitian_part, min_hermitian_eigenvalue, spectral_radius, Complex64, ComplexMatrix};

/// Scalar samples `y_1 … y_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSeries {
    samples: Vec<Complex64>,
    sample_period: f64,
}

impl SignalSeries {
    pub fn new(samples: Vec<Complex64>, sample_period: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument("signal needs at least one sample".into()));
        }
        if samples.iter().any(|y| !y.re.is_finite() || !y.im.is_finite()) {
            return Err(Error::NonFinite("signal"));
        }
        if !(sample_period > 0.0) {
            return Err(Error::InvalidArgument(format!("sample period {sample_period} must be positive")));
        }
        Ok(SignalSeries { samples, sample_period })
    }

    pub fn from_real(samples: &[f64], sample_period: f64) -> Result<Self> {
        Self::new(samples.iter().map(|&y| Complex64::new(y, 0.0)).collect(), sample_period)
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn sample_period(&self) -> f64 {
        self.sample_period
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Real unit-variance Gaussian white noise from a seeded generator.
pub fn white_noise(len: usize, seed: u64) -> Result<SignalSeries> {
    let mut rng = StdRng::seed_from_u64(seed);
    let samples = (0..len).map(|_| Complex64::new(rng.sample(StandardNormal), 0.0)).collect();
    SignalSeries::new(samples, 1.0)
}

/// `x_k = A x_{k-1} + B y_k`, `x_0 = 0`. Column `k-1` of the result is `x_k`.
pub fn run_filter(filter: &InputToStateFilter, y: &SignalSeries) -> ComplexMatrix {
    let n = filter.n();
    let a: Vec<Complex64> = filter.a().iter().copied().collect(); // column-major
    let b: Vec<Complex64> = filter.b().iter().copied().collect();
    let mut states = ComplexMatrix::zeros(n, y.len());
    let mut prev = vec![Complex64::default(); n];
    let mut next = vec![Complex64::default(); n];
    for (k, &yk) in y.samples().iter().enumerate() {
        for i in 0..n {
            let mut acc = b[i] * yk;
            for j in 0..n {
                acc += a[i + j * n] * prev[j];
            }
            next[i] = acc;
        }
        states.column_mut(k).copy_from_slice(&next);
        std::mem::swap(&mut prev, &mut next);
    }
    states
}

/// `min(1000, N/10)`.
pub fn default_burn_in(len: usize) -> usize {
    (len / 10).min(1000)
}

/// `(1/(N - burn_in)) Σ_{k > burn_in} x_k x_k*`.
pub fn sample_covariance(states: &ComplexMatrix, burn_in: usize) -> Result<ComplexMatrix> {
    let n = states.nrows();
    let total = states.ncols();
    if total <= burn_in {
        return Err(Error::EmptyAfterBurnIn);
    }
    let mut acc = ComplexMatrix::zeros(n, n);
    for col in states.column_iter().skip(burn_in) {
        for j in 0..n {
            let xj = col[j].conj();
            for i in j..n {
                acc[(i, j)] += col[i] * xj;
            }
        }
    }
    for j in 0..n {
        for i in 0..j {
            acc[(i, j)] = acc[(j, i)].conj();
        }
    }
    acc.unscale_mut((total - burn_in) as f64);
    Ok(hermitian_part(&acc))
}

#[derive(Debug, Clone)]
pub struct MarkovEstimate {
    pub markov: ComplexMatrix,
    /// `‖B‖·max|h_k|·ρ(A)^{ℓ+1}/(1 - ρ(A))`.
    pub truncation_bound: f64,
}

/// `Ĥ = Σ_{k=0..ℓ} conj(h_k) A^k B` from measured Markov parameters.
pub fn markov_from_impulse(filter: &InputToStateFilter, h: &[Complex64]) -> Result<MarkovEstimate> {
    if h.is_empty() {
        return Err(Error::InvalidArgument("at least one Markov parameter is required".into()));
    }
    let a = filter.a();
    let mut term = filter.b().clone();
    let mut markov = ComplexMatrix::zeros(filter.n(), 1);
    for hk in h {
        markov += &term * hk.conj();
        term = a * term;
    }
    let rho = spectral_radius(a)?;
    let peak = h.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let truncation_bound = filter.b().norm() * peak * rho.powi(h.len() as i32) / (1.0 - rho);
    Ok(MarkovEstimate { markov, truncation_bound })
}

/// Smallest eigenvalue of the Hermitian Toeplitz matrix built from `R_0 … R_ℓ`
/// (first row `R_k`, first column `conj(R_k)`); nonnegative iff the
/// covariance sequence is admissible.
pub fn toeplitz_psd(r: &[Complex64]) -> Result<f64> {
    if r.is_empty() {
        return Err(Error::InvalidArgument("need at least R_0".into()));
    }
    let m = r.len();
    let t = ComplexMatrix::from_fn(m, m, |i, j| if j >= i { r[j - i] } else { r[i - j].conj() });
    Ok(min_hermitian_eigenvalue(&t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{make_caratheodory, make_point_filter, InterpolationPoint};
    use crate::numkit::c64;

    #[test]
    fn impulse_gives_powers_of_a() {
        let f = make_point_filter(&[
            InterpolationPoint::simple(c64(0.5, 0.1)),
            InterpolationPoint {
                point: c64(-0.3, 0.0),
                multiplicity: 2,
            },
        ])
        .unwrap();
        let mut y = vec![0.0; 6];
        y[0] = 1.0;
        let x = run_filter(&f, &SignalSeries::from_real(&y, 1.0).unwrap());
        let mut expected = f.b().clone();
        for k in 0..6 {
            assert!((x.column(k) - expected.column(0)).norm() < 1e-15);
            expected = f.a() * expected;
        }
        let zeros = run_filter(&f, &SignalSeries::from_real(&[0.0; 5], 1.0).unwrap());
        assert!(zeros.iter().all(|v| *v == c64(0.0, 0.0)));
    }

    #[test]
    fn constant_input_converges_to_fixed_point() {
        let f = make_point_filter(&[InterpolationPoint::simple(c64(0.5, 0.0))]).unwrap();
        let x = run_filter(&f, &SignalSeries::from_real(&[3.0; 80], 1.0).unwrap());
        assert!((x[(0, 79)] - c64(6.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn covariance_of_constant_states() {
        let v = ComplexMatrix::from_column_slice(2, 1, &[c64(1.0, 2.0), c64(-0.5, 0.0)]);
        let states = ComplexMatrix::from_fn(2, 7, |i, _| v[(i, 0)]);
        let s = sample_covariance(&states, 2).unwrap();
        assert!((s - &v * v.adjoint()).norm() < 1e-14);
        assert!(matches!(sample_covariance(&states, 7), Err(Error::EmptyAfterBurnIn)));
    }

    #[test]
    fn impulse_markov_on_shift_filter() {
        let f = make_caratheodory(3).unwrap();
        let est = markov_from_impulse(&f, &[c64(1.0, 1.0), c64(2.0, 0.0), c64(0.0, -3.0), c64(5.0, 0.0)]).unwrap();
        let expected = ComplexMatrix::from_column_slice(3, 1, &[c64(1.0, -1.0), c64(2.0, 0.0), c64(0.0, 3.0)]);
        assert!((est.markov - expected).norm() < 1e-15);
        let single = markov_from_impulse(&f, &[c64(1.0, 0.0)]).unwrap();
        assert_eq!(single.markov, *f.b());
    }

    #[test]
    fn toeplitz_examples() {
        let r = |v: &[f64]| v.iter().map(|&x| c64(x, 0.0)).collect::<Vec<_>>();
        assert!((toeplitz_psd(&r(&[1.0, 0.0])).unwrap() - 1.0).abs() < 1e-14);
        assert!((toeplitz_psd(&r(&[1.0, 1.5])).unwrap() + 0.5).abs() < 1e-14);
        assert!((toeplitz_psd(&r(&[2.0, 1.0])).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn white_noise_is_reproducible() {
        let a = white_noise(100, 7).unwrap();
        let b = white_noise(100, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, white_noise(100, 8).unwrap());
    }
}
