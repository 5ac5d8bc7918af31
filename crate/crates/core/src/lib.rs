//! Simulation library for a dissipative single-qubit quantum Otto engine.
//!
//! The machine under study is a driven two-level system whose excited state
//! decays through an engineered bath. Its Lindblad generator (the Liouvillian)
//! has a spectrum with an exceptional point where relaxation eigenvalues
//! coalesce; on either side of that point the approach to steady state is
//! qualitatively different (oscillatory vs. overdamped), and an Otto cycle
//! built from such strokes inherits that difference in its work, power, and
//! efficiency.
//!
//! Module map:
//! - [`linalg`]: dense complex eigen/exponential/nullspace kernels (<= 9x9).
//! - [`liouvillian`]: Hamiltonians, Lindblad superoperators, spectra, phases,
//!   steady states, and the exceptional-point locator.
//! - [`dynamics`]: piecewise-constant propagation of the master equation and
//!   drive-ramp discretization.
//! - [`thermo`]: work/heat bookkeeping, efficiencies, and state functionals.
//! - [`otto`]: four-stroke cycle assembly, presets, and parameter sweeps.
//! - [`tol`]: the numerical tolerances used across the crate.

pub mod dynamics;
pub mod linalg;
pub mod liouvillian;
pub mod otto;
pub mod thermo;
pub mod tol;
