//! Numerical tolerances and default knobs, collected in one place.
//!
//! Every tolerance that a contract or test relies on is named here so that the
//! value and its justification can be audited without hunting through call
//! sites. All quantities are dimensionless unless the name says otherwise.

/// Maximum allowed deviation from Hermiticity for a density matrix,
/// `max_ij |rho_ij - conj(rho_ji)|`.
pub const DENSITY_HERMITICITY: f64 = 1e-10;

/// Maximum allowed deviation of a density-matrix trace from 1.
pub const DENSITY_TRACE: f64 = 1e-10;

/// Most negative eigenvalue a density matrix may have before it is rejected.
/// Exact propagation keeps states positive to machine precision; this budget
/// absorbs accumulated floating-point dust only.
pub const DENSITY_MIN_EIGENVALUE: f64 = -1e-9;

/// Eigenpair residual bound: `||M v - lambda v|| <= EIG_RESIDUAL * ||M|| * ||v||`.
pub const EIG_RESIDUAL: f64 = 1e-9;

/// Relative accuracy contract for the matrix exponential (for `||m|| <= 100`).
pub const EXPM_ACCURACY: f64 = 1e-10;

/// Eigenvector condition number below which the matrix exponential may use the
/// eigendecomposition route. Above it (defective or nearly defective input,
/// e.g. a Liouvillian at its exceptional point) scaling-and-squaring is used.
pub const EXPM_EIG_CONDITION_LIMIT: f64 = 1e6;

/// Default relative singular-value cutoff for `nullspace`.
pub const NULLSPACE_DEFAULT: f64 = 1e-10;

/// Relative tolerance for declaring parameters to sit exactly on the
/// exceptional point, `|gamma_eff - 4*omega| <= tol * max(gamma_eff, 4*omega)`.
pub const LEP_CLASSIFY: f64 = 1e-9;

/// Default relative precision of the bisection in `lep_locate`.
pub const LEP_LOCATE_DEFAULT: f64 = 1e-4;

/// Default Frobenius-norm convergence threshold for relaxation to the steady
/// state (`relax_to_steady` and the cycle wait phase).
pub const RELAX_DEFAULT: f64 = 1e-8;

/// Default cap on relaxation time, in units of `1/gamma_eff`.
pub const RELAX_T_MAX_FACTOR: f64 = 200.0;

/// Absolute slack (in units of the step ratio) when counting staircase steps,
/// so that spans that are an exact multiple of the step size do not gain a
/// spurious extra plateau from floating-point rounding.
pub const STAIRCASE_COUNT_SLACK: f64 = 1e-9;

/// Matching slack for segment-duration bookkeeping in seconds
/// (staircase dwells must sum to the segment duration within this).
pub const SEGMENT_DURATION_SLACK_S: f64 = 1e-12;

/// Denominator guard for the quantum efficiency: `|P_h_steady - P_h_start|`
/// below this is treated as degenerate.
pub const ETA_Q_DENOMINATOR: f64 = 1e-12;

/// Eigenvalues of a density matrix at or below this threshold contribute zero
/// to the von Neumann entropy.
pub const ENTROPY_EIGENVALUE_FLOOR: f64 = 1e-14;

/// Populations closer together than this (relatively) give an infinite
/// effective temperature.
pub const T_EFF_EQUAL_POPULATIONS: f64 = 1e-14;
