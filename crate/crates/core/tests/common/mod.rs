#![allow(dead_code)]

use covinterp::filter::{make_point_filter, InputToStateFilter, InterpolationPoint};
use covinterp::numkit::{c64, Complex64, ComplexMatrix, Polynomial};
use covinterp::realize::{covariance_check, markov_check, CovarianceRoute, RationalTransferFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn point_in_annulus(rng: &mut impl Rng, lo: f64, hi: f64) -> Complex64 {
    Complex64::from_polar(rng.random_range(lo..hi), rng.random_range(0.0..std::f64::consts::TAU))
}

/// Simple points in the disc, pairwise at least `sep` apart.
pub fn random_filter(rng: &mut impl Rng, n: usize, max_radius: f64, sep: f64) -> InputToStateFilter {
    loop {
        let mut pts: Vec<Complex64> = Vec::new();
        while pts.len() < n {
            let p = point_in_annulus(rng, 0.0, max_radius);
            if pts.iter().all(|q| (q - p).norm() > sep) {
                pts.push(p);
            }
        }
        let list: Vec<InterpolationPoint> = pts.into_iter().map(InterpolationPoint::simple).collect();
        if let Ok(f) = make_point_filter(&list) {
            return f;
        }
    }
}

pub fn random_complex_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Random dense matrix rescaled to spectral radius `rho`.
pub fn random_stable_matrix(rng: &mut impl Rng, n: usize, rho: f64) -> ComplexMatrix {
    let m = random_complex_matrix(rng, n, n);
    let r = covinterp::numkit::spectral_radius(&m).unwrap();
    if r == 0.0 {
        m
    } else {
        m * Complex64::new(rho / r, 0.0)
    }
}

/// Random stable `b/a` of the given degree with poles of modulus in `[1/pole_max, 1/pole_min]`.
pub fn random_stable_rational(rng: &mut impl Rng, degree: usize, root_lo: f64, root_hi: f64) -> RationalTransferFunction {
    let roots: Vec<Complex64> = (0..degree).map(|_| point_in_annulus(rng, root_lo, root_hi)).collect();
    let den = Polynomial::from_roots(&roots);
    let num = Polynomial::new(
        (0..=degree)
            .map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
    )
    .unwrap();
    RationalTransferFunction::new(num, den).unwrap()
}

pub struct Instance {
    pub filter: InputToStateFilter,
    pub lambda_true: f64,
    pub sigma: ComplexMatrix,
    pub markov: ComplexMatrix,
}

/// Data generated by a known stable `W` of degree `n - 1` driven by white noise of variance `Λ_true`.
pub fn round_trip_instance(rng: &mut impl Rng, n: usize) -> Instance {
    let filter = random_filter(rng, n, 0.8, 0.15);
    let w = random_stable_rational(rng, n - 1, 1.5, 3.0);
    let lambda_true = rng.random_range(0.5..2.0);
    let sigma = covariance_check(&filter, &w, lambda_true, CovarianceRoute::StateSpace).unwrap();
    let markov = markov_check(&filter, &w).unwrap();
    Instance {
        filter,
        lambda_true,
        sigma,
        markov,
    }
}

/// Random real stable continuous model: lightly damped mode pairs with
/// natural frequencies log-spread over `[10, 10⁴]` rad/s and damping ratios in
/// `[0.02, 0.5]`, mixed by a random orthogonal similarity.
pub fn random_continuous_model(rng: &mut impl Rng, order: usize) -> covinterp::realize::StateSpaceModel {
    use covinterp::realize::{Domain, StateSpaceModel};
    use rand_distr::{Distribution, StandardNormal};
    let mut a = nalgebra::DMatrix::<f64>::zeros(order, order);
    let mut i = 0;
    while i < order {
        let wn = 10f64.powf(rng.random_range(1.0..4.0));
        let zeta = rng.random_range(0.02..0.5);
        if i + 1 < order {
            let sigma = zeta * wn;
            let omega = wn * (1.0 - zeta * zeta).sqrt();
            a[(i, i)] = -sigma;
            a[(i + 1, i + 1)] = -sigma;
            a[(i, i + 1)] = omega;
            a[(i + 1, i)] = -omega;
            i += 2;
        } else {
            a[(i, i)] = -wn;
            i += 1;
        }
    }
    let mut gauss = |r: usize, c: usize| nalgebra::DMatrix::<f64>::from_fn(r, c, |_, _| StandardNormal.sample(&mut *rng));
    let q = gauss(order, order).qr().q();
    let a = &q * a * q.transpose();
    let b = gauss(order, 1);
    let c = gauss(1, order);
    let cx = |m: nalgebra::DMatrix<f64>| m.map(|x| c64(x, 0.0));
    StateSpaceModel::new(cx(a), cx(b), cx(c), c64(0.0, 0.0), Domain::Continuous).unwrap()
}
