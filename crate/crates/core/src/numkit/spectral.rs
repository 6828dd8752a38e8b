use nalgebra::{DMatrix, DVector};

use super::{circle_points, Complex64, Polynomial, Tolerances};
use crate::error::{Error, Result};

pub fn spectral_factor(b: &Polynomial, a: &Polynomial) -> Result<Polynomial> {
    spectral_factor_with(b, a, &Tolerances::DEFAULT)
}

/// Lag-`k` coefficient (`k ≥ 0`) of the Laurent polynomial `p(z) q*(z)` on the circle.
fn cross_lag(p: &[Complex64], q: &[Complex64], k: usize) -> Complex64 {
    q.iter()
        .enumerate()
        .filter_map(|(j, qj)| p.get(j + k).map(|pk| *pk * qj.conj()))
        .sum()
}

/// Solves `b b* = d a* + a d*` for the polynomial `d`.
///
/// `a` must have all its roots strictly outside the closed unit disc. The
/// solution is unique up to `d ↦ d + iαa`; that freedom is fixed by making
/// `d(0)/a(0)` real. `f = d/a` is then the positive-real part of `|b/a|²`,
/// with `Re f = |b/a|²/2` on the circle.
pub fn spectral_factor_with(b: &Polynomial, a: &Polynomial, tol: &Tolerances) -> Result<Polynomial> {
    if a.is_zero() {
        return Err(Error::UnstableDenominator { modulus: 0.0 });
    }
    let min_root = a.min_root_modulus()?;
    if min_root <= 1.0 + tol.root_margin {
        return Err(Error::UnstableDenominator { modulus: min_root });
    }
    let m = a.degree().max(b.degree());
    let ac: Vec<Complex64> = (0..=m).map(|k| a.coeff(k)).collect();
    let bc: Vec<Complex64> = (0..=m).map(|k| b.coeff(k)).collect();
    let unknowns = 2 * (m + 1);

    // row layout: [Re L_0, (Re L_k, Im L_k) for k=1..m, Im(d_0 conj a_0)]
    let rows_for = |d: &[Complex64]| -> Vec<f64> {
        let mut row = Vec::with_capacity(unknowns);
        for k in 0..=m {
            let lag = cross_lag(d, &ac, k) + cross_lag(&ac, d, k);
            row.push(lag.re);
            if k > 0 {
                row.push(lag.im);
            }
        }
        row.push((d[0] * ac[0].conj()).im);
        row
    };

    let mut system = DMatrix::<f64>::zeros(unknowns, unknowns);
    let mut basis = vec![Complex64::default(); m + 1];
    for col in 0..unknowns {
        basis.iter_mut().for_each(|x| *x = Complex64::default());
        let j = col % (m + 1);
        basis[j] = if col <= m {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
        for (r, v) in rows_for(&basis).into_iter().enumerate() {
            system[(r, col)] = v;
        }
    }
    let mut rhs = DVector::<f64>::zeros(unknowns);
    let mut idx = 0;
    for k in 0..=m {
        let lag = cross_lag(&bc, &bc, k);
        rhs[idx] = lag.re;
        idx += 1;
        if k > 0 {
            rhs[idx] = lag.im;
            idx += 1;
        }
    }

    let svd = system.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= 1e-13 * smax {
        return Err(Error::SingularSystem(format!(
            "spectral factor system has condition {:e}",
            smax / smin
        )));
    }
    let x = svd.solve(&rhs, 0.0).map_err(|e| Error::SingularSystem(e.to_string()))?;
    let d = Polynomial::new((0..=m).map(|j| Complex64::new(x[j], x[m + 1 + j])).collect())?;

    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for z in circle_points(tol.circle_grid, 1.0) {
        let lhs = b.eval(z).norm_sqr();
        let rhs = 2.0 * (d.eval(z) * a.eval(z).conj()).re;
        worst = worst.max((lhs - rhs).abs());
        scale = scale.max(lhs);
    }
    if worst > tol.spectral * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::SingularSystem(format!(
            "spectral factor identity residual {:e}",
            worst / scale
        )));
    }
    Ok(d)
}
