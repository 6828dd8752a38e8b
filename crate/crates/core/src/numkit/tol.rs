/// Tolerances and grid sizes shared by every numerical stage.
///
/// All values are relative unless the field name says otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Stein residual bound, relative to `‖Q‖`.
    pub stein: f64,
    /// Margin below 1 that the spectral radius of a filter must respect.
    pub stability_margin: f64,
    /// Post-check on `S - ΛM ⪰ 0`, relative to `‖S‖`.
    pub pencil: f64,
    /// Hermitian / PSD acceptance for pencil inputs.
    pub psd: f64,
    /// Relative gap under which two pencil eigenvalues are candidates for one.
    pub multiplicity: f64,
    /// Relative Rayleigh-quotient deviation under which a vector from such a
    /// cluster counts as an eigenvector of the smallest eigenvalue.
    pub degenerate: f64,
    /// Identity check on the unit circle for spectral factors.
    pub spectral: f64,
    /// Root modulus margin used when deciding if a polynomial is stable.
    pub root_margin: f64,
    /// Feasibility residual for state covariances, relative to `‖Σ‖`.
    pub structure: f64,
    /// `‖(I - zA)^{-1}‖` above `1/near_pole` is treated as a pole.
    pub near_pole: f64,
    /// Reachability: smallest singular value of Γ relative to the largest.
    pub reach_rank: f64,
    /// `|ξB|` relative to `‖ξ‖‖B‖` below which the appendix forms are refused.
    pub xib: f64,
    /// Distance (relative) under which a numerator and a denominator root cancel.
    pub cancel: f64,
    /// Points on the unit circle used for identity checks.
    pub circle_grid: usize,
    /// Points used to compare realizations.
    pub realization_grid: usize,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        stein: 1e-12,
        stability_margin: 1e-9,
        pencil: 1e-9,
        psd: 1e-10,
        multiplicity: 1e-8,
        degenerate: 1e-12,
        spectral: 1e-9,
        root_margin: 1e-9,
        structure: 1e-8,
        near_pole: 1e-12,
        reach_rank: 1e-10,
        xib: 1e-12,
        cancel: 1e-6,
        circle_grid: 256,
        realization_grid: 128,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
