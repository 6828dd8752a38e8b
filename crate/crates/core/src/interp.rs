//! The variance-maximization problem: find the largest input variance `Λ`
//! and `W = σG/ξG` with `Λ⟨GW, GW⟩ = Σ` and `⟨G, W⟩ = H`.
//!
//! The solution goes through the dual: with `ℋ = AℋA* + HB*`, `Λ` is the
//! smallest generalized eigenvalue of `(Σ, ℋ*𝒢⁻¹ℋ)`, `ξ*` its eigenvector
//! and `σ* = 𝒢⁻¹ℋξ*`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::filter::InputToStateFilter;
use crate::numkit::{
    ensure_finite, ensure_square, hermitian_part, is_hermitian, min_hermitian_eigenvalue, smallest_generalized_eig_with, solve_stein,
    Complex64, ComplexMatrix, Tolerances,
};
use crate::realize::check_optimizer_poles;

/// Target state covariance `Σ` and state-Markov vector `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationData {
    sigma: ComplexMatrix,
    markov: ComplexMatrix,
}

impl InterpolationData {
    /// Checks that `Σ` is Hermitian PSD and `H` a nonzero column of matching size.
    pub fn new(sigma: ComplexMatrix, markov: ComplexMatrix) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        let n = ensure_square(&sigma, "Σ")?;
        if markov.nrows() != n || markov.ncols() != 1 {
            return Err(Error::Dimension(format!("H must be {n}x1")));
        }
        ensure_finite(&sigma, "Σ")?;
        ensure_finite(&markov, "H")?;
        if !is_hermitian(&sigma, tol.psd) {
            return Err(Error::NotHermitian("Σ"));
        }
        let sigma = hermitian_part(&sigma);
        let scale = sigma.norm();
        if min_hermitian_eigenvalue(&sigma) < -tol.psd * scale {
            return Err(Error::NotPsd("Σ"));
        }
        if markov.iter().all(|h| *h == Complex64::default()) {
            return Err(Error::ZeroMarkov);
        }
        Ok(InterpolationData { sigma, markov })
    }

    pub fn sigma(&self) -> &ComplexMatrix {
        &self.sigma
    }

    pub fn markov(&self) -> &ComplexMatrix {
        &self.markov
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Reject `Σ` that fails the state-covariance structure test instead of warning.
    pub strict_sigma: bool,
    /// Return a solution flagged unstable instead of an error.
    pub allow_unstable: bool,
    pub tol: Tolerances,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            strict_sigma: false,
            allow_unstable: false,
            tol: Tolerances::DEFAULT,
        }
    }
}

/// Optimal `(Λ, ξ, σ)`; `W = σG/ξG`.
#[derive(Debug, Clone)]
pub struct Solution {
    pub lambda: f64,
    /// Row `ξ` (1×n).
    pub xi: ComplexMatrix,
    /// Row `σ` (1×n), scaled so that `σ𝒢σ* = 1`.
    pub sigma_row: ComplexMatrix,
    /// Multiplicity of `Λ` as a pencil eigenvalue; the optimizer is unique when 1.
    pub multiplicity: usize,
    /// `ℋ`, solution of `ℋ = AℋA* + HB*`.
    pub markov_gramian: ComplexMatrix,
    /// Relative residual of the structure test on `Σ`.
    pub structure_residual: f64,
    /// Condition number of `Σ` reported by the pencil solver.
    pub condition: f64,
    /// `ξG` has no uncancelled zero in the closed disc.
    pub stable: bool,
}

impl Solution {
    pub fn is_unique(&self) -> bool {
        self.multiplicity == 1
    }

    /// `σG(z) / ξG(z)`.
    pub fn eval(&self, filter: &InputToStateFilter, z: Complex64) -> Result<Complex64> {
        let g = filter.eval_g(z)?;
        Ok((&self.sigma_row * &g)[(0, 0)] / (&self.xi * &g)[(0, 0)])
    }
}

/// Least-squares `L` in `Σ - AΣA* = BL + L*B*` and the relative residual.
pub fn structure_fit(filter: &InputToStateFilter, sigma: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let n = filter.n();
    if sigma.nrows() != n || sigma.ncols() != n {
        return Err(Error::Dimension(format!("Σ must be {n}x{n}")));
    }
    let a = filter.a();
    let b = filter.b();
    let target = sigma - a * sigma * a.adjoint();
    let flatten = |m: &ComplexMatrix| -> Vec<f64> { m.iter().flat_map(|z| [z.re, z.im]).collect() };

    // L = e_j or i·e_j, real-linear in L because of L*
    let mut design = DMatrix::<f64>::zeros(2 * n * n, 2 * n);
    for col in 0..2 * n {
        let mut l = ComplexMatrix::zeros(1, n);
        l[(0, col % n)] = if col < n {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
        let term = b * &l + l.adjoint() * b.adjoint();
        design.set_column(col, &DVector::from_vec(flatten(&term)));
    }
    let rhs = DVector::from_vec(flatten(&target));
    let x = design
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::SingularSystem(e.to_string()))?;
    let l = ComplexMatrix::from_fn(1, n, |_, j| Complex64::new(x[j], x[n + j]));
    let residual = (&target - (b * &l + l.adjoint() * b.adjoint())).norm() / sigma.norm().max(f64::MIN_POSITIVE);
    Ok((l, residual))
}

/// Returns `L` with `Σ - AΣA* = BL + L*B*`, or an error if `Σ` cannot be a
/// state covariance of this filter.
pub fn validate_sigma(filter: &InputToStateFilter, sigma: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !is_hermitian(sigma, Tolerances::DEFAULT.psd) {
        return Err(Error::NotHermitian("Σ"));
    }
    let (l, residual) = structure_fit(filter, sigma)?;
    if residual > Tolerances::DEFAULT.structure {
        return Err(Error::StructureViolation { residual });
    }
    Ok(l)
}

/// Moves an estimated covariance onto the feasible structure: fit `L` by
/// least squares, then solve `Σ = AΣA* + BL + L*B*`.
pub fn project_sigma(filter: &InputToStateFilter, sigma: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (l, _) = structure_fit(filter, &hermitian_part(sigma))?;
    let b = filter.b();
    let rhs = b * &l + l.adjoint() * b.adjoint();
    Ok(hermitian_part(&solve_stein(filter.a(), &rhs)?))
}

/// `ℋ = AℋA* + HB*` (the right-hand side is not Hermitian in general).
pub fn markov_gramian(filter: &InputToStateFilter, markov: &ComplexMatrix) -> Result<ComplexMatrix> {
    if markov.nrows() != filter.n() || markov.ncols() != 1 {
        return Err(Error::Dimension(format!("H must be {}x1", filter.n())));
    }
    solve_stein(filter.a(), &(markov * filter.b().adjoint()))
}

/// Picks the member of a multi-dimensional eigenspace whose `ξG` has the
/// lowest-degree numerator. Every member is `a₀q` for the minimal-degree
/// denominator `a₀` and a free polynomial `q` with `deg q < m`, so cancelling
/// the top `m - 1` numerator coefficients leaves `q` constant.
fn minimal_degree_vector(filter: &InputToStateFilter, basis: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = filter.n();
    let m = basis.ncols();
    // numerator coefficients of e_j·G for each unit row
    let mut unit_numerators = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut row = ComplexMatrix::zeros(1, n);
        row[(0, j)] = Complex64::new(1.0, 0.0);
        let p = filter.coinvariant_numerator(&row)?;
        for k in 0..n {
            unit_numerators[(j, k)] = p.coeff(k);
        }
    }
    // column i: numerator coefficients of basis_i*·G
    let numerators = unit_numerators.transpose() * basis.map(|x| x.conj());
    let top = numerators.rows(n - (m - 1), m - 1).into_owned();
    let gram = hermitian_part(&(top.adjoint() * &top));
    let eig = gram.symmetric_eigen();
    let (pick, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("eigenspace is not empty");
    // coefficients act on conj(basis); conjugate back for the column vector
    let coeff = eig.eigenvectors.column(pick).map(|x| x.conj());
    let v = basis * coeff;
    let norm = v.norm();
    Ok(ComplexMatrix::from_column_slice(n, 1, v.unscale(norm).as_slice()))
}

pub fn solve(filter: &InputToStateFilter, data: &InterpolationData) -> Result<Solution> {
    solve_with(filter, data, &SolveOptions::default())
}

pub fn solve_with(filter: &InputToStateFilter, data: &InterpolationData, opts: &SolveOptions) -> Result<Solution> {
    let n = filter.n();
    if data.sigma().nrows() != n {
        return Err(Error::Dimension(format!(
            "data has size {}, filter has {n} states",
            data.sigma().nrows()
        )));
    }
    let tol = &opts.tol;
    let (_, structure_residual) = structure_fit(filter, data.sigma())?;
    if structure_residual > tol.structure {
        if opts.strict_sigma {
            return Err(Error::StructureViolation {
                residual: structure_residual,
            });
        }
        log::warn!("Σ deviates from the state-covariance structure (relative residual {structure_residual:e})");
    }

    let hgram = markov_gramian(filter, data.markov())?;
    let pencil_rhs = hermitian_part(&(hgram.adjoint() * filter.gramian_solve(&hgram)));
    let eig = smallest_generalized_eig_with(data.sigma(), &pencil_rhs, tol)?;

    // a cluster of nearly equal eigenvalues is only treated as one eigenvalue
    // if the minimal-degree member is itself an eigenvector to working accuracy
    let mut multiplicity = eig.multiplicity;
    let top = ComplexMatrix::from_column_slice(n, 1, eig.vector.as_slice());
    let xi_col = if multiplicity > 1 {
        let v = minimal_degree_vector(filter, &eig.eigenspace)?;
        let quotient = (v.adjoint() * data.sigma() * &v)[(0, 0)].re / (v.adjoint() * &pencil_rhs * &v)[(0, 0)].re;
        if (quotient - eig.value).abs() <= tol.degenerate * eig.value {
            v
        } else {
            log::debug!(
                "{multiplicity} pencil eigenvalues within {:e} are numerically distinct",
                tol.multiplicity
            );
            multiplicity = 1;
            top
        }
    } else {
        top
    };
    let sigma_col = filter.gramian_solve(&(&hgram * &xi_col));
    let energy = (sigma_col.adjoint() * filter.gramian() * &sigma_col)[(0, 0)].re;
    if !(energy > 0.0) {
        return Err(Error::DegeneratePencil);
    }
    // common positive scale for σ𝒢σ* = 1, then a common phase making the
    // first significant entry of ξ real positive
    let pivot = xi_col
        .iter()
        .position(|x| x.norm() > 1e-8 * xi_col.norm())
        .expect("eigenvector is nonzero");
    let phase = xi_col[pivot].conj() / xi_col[pivot].norm();
    let factor = phase * (1.0 / energy.sqrt());
    let xi = (xi_col * factor).adjoint();
    let sigma_row = (sigma_col * factor).adjoint();

    let mut solution = Solution {
        lambda: eig.value,
        xi,
        sigma_row,
        multiplicity,
        markov_gramian: hgram,
        structure_residual,
        condition: eig.condition,
        stable: true,
    };
    if solution.multiplicity > 1 {
        log::warn!(
            "smallest pencil eigenvalue has multiplicity {}; optimizer is not unique",
            solution.multiplicity
        );
    }
    if let Err(e) = check_optimizer_poles(filter, &solution, tol) {
        if !opts.allow_unstable {
            return Err(e);
        }
        log::warn!("{e}");
        solution.stable = false;
    }
    Ok(solution)
}
