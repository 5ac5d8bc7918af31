//! Model construction and spectral analysis for the dissipative qubit.
//!
//! The physical system is a two-level atom (ground `g`, excited `e`) driven at
//! Rabi rate `omega`, detuned by `delta`, whose excited state decays at an
//! engineered rate `gamma_eff`. Its Lindblad generator, written as a 4x4
//! matrix acting on the row-major vectorization of the density matrix, is the
//! central object here: its spectrum carries a second-order exceptional point
//! at `gamma_eff = 4 * omega` (at zero detuning) separating an oscillatory
//! ("exact") relaxation phase from an overdamped ("broken") one.
//!
//! A three-level extension models how the engineered decay is actually
//! produced: a lossy auxiliary level `p` coupled to `e` at rate `omega_p`,
//! decaying to `g` and `e` at `gamma_g` and `gamma_e`. Adiabatic elimination
//! of `p` reproduces the qubit model with
//! `gamma_eff = gamma_g * omega_p^2 / (gamma_g + gamma_e)^2`.
//!
//! Basis conventions, used consistently across the crate:
//! - qubit basis order `(g, e)`; three-level basis order `(g, e, p)`;
//! - `vectorize` flattens row-major, so the qubit vector is
//!   `(rho_gg, rho_ge, rho_eg, rho_ee)`.

use ndarray::linalg::kron;
use ndarray::{Array1, Array2};
use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, LinalgError, SpectralResult};
use crate::tol;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Convert a drive frequency quoted as `f = x/(2 pi)` in kHz to angular
/// units (rad/s). Applies to `omega`, `omega_p`, and `delta`.
pub fn omega_from_khz(f_khz: f64) -> f64 {
    2.0 * std::f64::consts::PI * 1e3 * f_khz
}

/// Convert a decay rate quoted in kHz to 1/s. Rates are plain inverse times;
/// no `2 pi` is applied.
pub fn rate_from_khz(rate_khz: f64) -> f64 {
    1e3 * rate_khz
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("parameter {name} is not finite")]
    NonFinite { name: &'static str },
    #[error("parameter {name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("analytic eigenvalues are only defined at zero detuning, got delta = {delta}")]
    DeltaNotZero { delta: f64 },
    #[error("phase classification is undefined when gamma_eff and omega are both zero")]
    DegenerateParams,
    #[error("total decay rate is zero")]
    ZeroGamma,
    #[error("steady state is not unique (nullspace dimension {dim})")]
    NonUniqueSteadyState { dim: usize },
    #[error("nullspace vector has near-zero trace; no normalizable steady state")]
    TracelessNullVector,
    #[error("bracket [{lo}, {hi}] is not valid (need 0 < lo < hi)")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("phase discriminant has the same sign at both bracket ends; no exceptional point inside")]
    NoBracket,
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] LinalgError),
    #[error("invalid density matrix: {0}")]
    Density(#[from] DensityError),
}

/// Parameters of the effective two-level model. `delta` and `omega` are
/// angular frequencies (rad/s); `gamma_eff` is a rate (1/s).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitParams {
    /// Detuning of the drive from the qubit transition (rad/s).
    pub delta: f64,
    /// Rabi rate of the coherent drive (rad/s), non-negative.
    pub omega: f64,
    /// Engineered decay rate of the excited state (1/s), non-negative.
    pub gamma_eff: f64,
}

impl QubitParams {
    pub fn new(delta: f64, omega: f64, gamma_eff: f64) -> Result<Self, ModelError> {
        let p = Self {
            delta,
            omega,
            gamma_eff,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), ModelError> {
        for (name, value) in [
            ("delta", self.delta),
            ("omega", self.omega),
            ("gamma_eff", self.gamma_eff),
        ] {
            if !value.is_finite() {
                return Err(ModelError::NonFinite { name });
            }
        }
        for (name, value) in [("omega", self.omega), ("gamma_eff", self.gamma_eff)] {
            if value < 0.0 {
                return Err(ModelError::Negative { name, value });
            }
        }
        Ok(())
    }
}

/// Parameters of the three-level implementation. Frequencies in rad/s,
/// rates in 1/s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThreeLevelParams {
    /// Detuning of the qubit drive (rad/s).
    pub delta: f64,
    /// Qubit drive Rabi rate (rad/s), non-negative.
    pub omega: f64,
    /// Coupling rate between `e` and the auxiliary level `p` (rad/s).
    pub omega_p: f64,
    /// Decay rate of `p` into `g` (1/s).
    pub gamma_g: f64,
    /// Decay rate of `p` back into `e` (1/s).
    pub gamma_e: f64,
}

impl ThreeLevelParams {
    pub fn new(
        delta: f64,
        omega: f64,
        omega_p: f64,
        gamma_g: f64,
        gamma_e: f64,
    ) -> Result<Self, ModelError> {
        let p = Self {
            delta,
            omega,
            omega_p,
            gamma_g,
            gamma_e,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), ModelError> {
        for (name, value) in [
            ("delta", self.delta),
            ("omega", self.omega),
            ("omega_p", self.omega_p),
            ("gamma_g", self.gamma_g),
            ("gamma_e", self.gamma_e),
        ] {
            if !value.is_finite() {
                return Err(ModelError::NonFinite { name });
            }
        }
        for (name, value) in [
            ("omega", self.omega),
            ("omega_p", self.omega_p),
            ("gamma_g", self.gamma_g),
            ("gamma_e", self.gamma_e),
        ] {
            if value < 0.0 {
                return Err(ModelError::Negative { name, value });
            }
        }
        Ok(())
    }

    /// Total decay rate of the auxiliary level.
    pub fn gamma_total(&self) -> f64 {
        self.gamma_g + self.gamma_e
    }
}

/// Effective qubit decay rate produced by the three-level scheme after
/// adiabatic elimination of the auxiliary level:
/// `gamma_eff = gamma_g * omega_p^2 / gamma_total^2`.
pub fn effective_decay_rate(p: &ThreeLevelParams) -> Result<f64, ModelError> {
    p.validate()?;
    let gamma = p.gamma_total();
    if gamma <= 0.0 {
        return Err(ModelError::ZeroGamma);
    }
    Ok(p.gamma_g * p.omega_p * p.omega_p / (gamma * gamma))
}

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

#[derive(Debug, Error, PartialEq)]
pub enum DensityError {
    #[error("density matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("density matrix dimension {dim} not supported (need 2 or 3)")]
    BadDimension { dim: usize },
    #[error("non-finite entry at ({row},{col})")]
    NonFinite { row: usize, col: usize },
    #[error("not Hermitian: max |rho_ij - conj(rho_ji)| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    #[error("trace deviates from one by {deviation:.3e}")]
    TraceNotOne { deviation: f64 },
    #[error("negative eigenvalue {min_eigenvalue:.3e} below tolerance")]
    NotPositive { min_eigenvalue: f64 },
    #[error("eigenvalue check failed: {0}")]
    Linalg(#[from] LinalgError),
}

/// A validated density matrix (dimension 2 or 3): Hermitian within
/// [`tol::DENSITY_HERMITICITY`], unit trace within [`tol::DENSITY_TRACE`],
/// and positive semidefinite up to [`tol::DENSITY_MIN_EIGENVALUE`].
///
/// Basis order is `(g, e)` for qubits and `(g, e, p)` for the three-level
/// system, so index 1 is always the qubit excited state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    data: Array2<Complex64>,
}

impl DensityMatrix {
    pub fn new(data: Array2<Complex64>) -> Result<Self, DensityError> {
        let (rows, cols) = data.dim();
        if rows != cols {
            return Err(DensityError::NotSquare { rows, cols });
        }
        if rows != 2 && rows != 3 {
            return Err(DensityError::BadDimension { dim: rows });
        }
        for ((row, col), z) in data.indexed_iter() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(DensityError::NonFinite { row, col });
            }
        }
        let mut herm_dev: f64 = 0.0;
        for i in 0..rows {
            for j in 0..rows {
                herm_dev = herm_dev.max((data[(i, j)] - data[(j, i)].conj()).norm());
            }
        }
        if herm_dev > tol::DENSITY_HERMITICITY {
            return Err(DensityError::NotHermitian {
                deviation: herm_dev,
            });
        }
        let trace: Complex64 = (0..rows).map(|k| data[(k, k)]).sum();
        let trace_dev = (trace - re(1.0)).norm();
        if trace_dev > tol::DENSITY_TRACE {
            return Err(DensityError::TraceNotOne {
                deviation: trace_dev,
            });
        }
        let min_ev = min_hermitian_eigenvalue(&data)?;
        if min_ev < tol::DENSITY_MIN_EIGENVALUE {
            return Err(DensityError::NotPositive {
                min_eigenvalue: min_ev,
            });
        }
        Ok(Self { data })
    }

    /// Pure ground state `|g><g|` of the given dimension (2 or 3).
    pub fn pure_ground(dim: usize) -> Result<Self, DensityError> {
        let mut m = Array2::zeros((dim, dim));
        if dim > 0 {
            m[(0, 0)] = re(1.0);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.data
    }

    /// Real part of a diagonal entry.
    pub fn population(&self, k: usize) -> f64 {
        self.data[(k, k)].re
    }

    pub fn ground_population(&self) -> f64 {
        self.population(0)
    }

    pub fn excited_population(&self) -> f64 {
        self.population(1)
    }

    /// Off-diagonal element `<i|rho|j>`.
    pub fn coherence(&self, i: usize, j: usize) -> Complex64 {
        self.data[(i, j)]
    }

    /// Smallest eigenvalue (clamped Hermitian part). Used to monitor
    /// positivity along trajectories.
    pub fn min_eigenvalue(&self) -> f64 {
        min_hermitian_eigenvalue(&self.data).expect("validated matrix")
    }
}

/// Smallest eigenvalue of a (nearly) Hermitian 2x2 or 3x3 matrix. The 2x2
/// case is closed-form; this runs on every trajectory sample, so it must not
/// hit the dense eigensolver.
fn min_hermitian_eigenvalue(m: &Array2<Complex64>) -> Result<f64, LinalgError> {
    match m.nrows() {
        2 => {
            let a = m[(0, 0)].re;
            let d = m[(1, 1)].re;
            let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
            let gap = ((a - d).powi(2) + 4.0 * b.norm_sqr()).sqrt();
            Ok(0.5 * (a + d - gap))
        }
        _ => {
            let herm = Array2::from_shape_fn(m.dim(), |(i, j)| {
                0.5 * (m[(i, j)] + m[(j, i)].conj())
            });
            let vals = linalg::hermitian_eigenvalues(&ComplexMatrix::new(herm)?)?;
            Ok(vals[0])
        }
    }
}

// ---------------------------------------------------------------------------
// Vectorization
// ---------------------------------------------------------------------------

/// Flatten a `dim x dim` matrix row-major into a length `dim^2` vector.
pub fn vectorize(rho: &Array2<Complex64>) -> Array1<Complex64> {
    let n = rho.nrows();
    Array1::from_shape_fn(n * n, |k| rho[(k / n, k % n)])
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &Array1<Complex64>, dim: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((dim, dim), |(i, j)| v[dim * i + j])
}

// ---------------------------------------------------------------------------
// Generator construction
// ---------------------------------------------------------------------------

/// Qubit Hamiltonian in the rotating frame, basis `(g, e)`:
/// `H = delta |e><e| + (omega/2)(|e><g| + |g><e|)`.
pub fn build_hamiltonian(p: &QubitParams) -> Result<ComplexMatrix, ModelError> {
    p.validate()?;
    let half = re(0.5 * p.omega);
    let h = ndarray::array![[re(0.0), half], [half, re(p.delta)]];
    Ok(ComplexMatrix::new(h)?)
}

/// Three-level Hamiltonian, basis `(g, e, p)`: the qubit block plus the
/// `e <-> p` coupling at rate `omega_p`.
pub fn build_hamiltonian_three_level(p: &ThreeLevelParams) -> Result<ComplexMatrix, ModelError> {
    p.validate()?;
    let half = re(0.5 * p.omega);
    let half_p = re(0.5 * p.omega_p);
    let z = re(0.0);
    let h = ndarray::array![
        [z, half, z],
        [half, re(p.delta), half_p],
        [z, half_p, z],
    ];
    Ok(ComplexMatrix::new(h)?)
}

/// Assemble the Lindblad generator as a superoperator on the row-major
/// vectorization: for `vec(A rho B) = (A kron B^T) vec(rho)`,
///
/// `L = -i (H kron 1 - 1 kron H^T)
///      + sum_k rate_k (L_k kron conj(L_k)
///                      - 1/2 (L_k^dag L_k) kron 1
///                      - 1/2 1 kron (L_k^dag L_k)^T)`.
fn lindblad_superoperator(
    h: &Array2<Complex64>,
    jumps: &[(f64, Array2<Complex64>)],
) -> Result<ComplexMatrix, ModelError> {
    let n = h.nrows();
    let id: Array2<Complex64> = Array2::eye(n);
    let mut sup = kron(h, &id) - kron(&id, &h.t().to_owned());
    sup.mapv_inplace(|z| -I * z);
    for (rate, l) in jumps {
        let l_conj = l.mapv(|z| z.conj());
        let l_dag_l = l.mapv(|z| z.conj()).t().dot(l).to_owned();
        let mut term = kron(l, &l_conj)
            - kron(&l_dag_l, &id).mapv(|z| 0.5 * z)
            - kron(&id, &l_dag_l.t().to_owned()).mapv(|z| 0.5 * z);
        term.mapv_inplace(|z| re(*rate) * z);
        sup += &term;
    }
    Ok(ComplexMatrix::new(sup)?)
}

/// 4x4 Lindblad generator of the qubit model with jump operator
/// `sigma_minus = |g><e|` at rate `gamma_eff`.
pub fn build_liouvillian(p: &QubitParams) -> Result<ComplexMatrix, ModelError> {
    let h = build_hamiltonian(p)?;
    let mut sigma_minus: Array2<Complex64> = Array2::zeros((2, 2));
    sigma_minus[(0, 1)] = re(1.0);
    lindblad_superoperator(h.as_array(), &[(p.gamma_eff, sigma_minus)])
}

/// 9x9 Lindblad generator of the three-level model with jumps
/// `|g><p|` at rate `gamma_g` and `|e><p|` at rate `gamma_e`.
pub fn build_liouvillian_three_level(p: &ThreeLevelParams) -> Result<ComplexMatrix, ModelError> {
    let h = build_hamiltonian_three_level(p)?;
    let mut l_g: Array2<Complex64> = Array2::zeros((3, 3));
    l_g[(0, 2)] = re(1.0);
    let mut l_e: Array2<Complex64> = Array2::zeros((3, 3));
    l_e[(1, 2)] = re(1.0);
    lindblad_superoperator(h.as_array(), &[(p.gamma_g, l_g), (p.gamma_e, l_e)])
}

// ---------------------------------------------------------------------------
// Spectra and phases
// ---------------------------------------------------------------------------

/// Numerical spectrum of the qubit Liouvillian.
pub fn spectrum(p: &QubitParams) -> Result<SpectralResult, ModelError> {
    Ok(linalg::eig(&build_liouvillian(p)?)?)
}

/// Numerical spectrum of the three-level Liouvillian.
pub fn spectrum_three_level(p: &ThreeLevelParams) -> Result<SpectralResult, ModelError> {
    Ok(linalg::eig(&build_liouvillian_three_level(p)?)?)
}

/// Closed-form Liouvillian eigenvalues at zero detuning, sorted by
/// (real part, imaginary part) ascending:
/// `{0, -gamma/2, (-3 gamma +/- xi)/4}` with `xi = sqrt(gamma^2 - 16 omega^2)`
/// (principal branch, so `xi` is positive imaginary in the exact phase).
///
/// The `-gamma/2` mode is the symmetric coherence combination, which decouples
/// at zero detuning; the `(-3 gamma +/- xi)/4` pair lives in the
/// population-difference / antisymmetric-coherence block and coalesces at
/// `gamma = 4 omega` into the exceptional point `-3 gamma / 4`. (Consistency
/// check: the four values sum to `tr L = -2 gamma`.)
pub fn analytic_eigenvalues(p: &QubitParams) -> Result<[Complex64; 4], ModelError> {
    p.validate()?;
    if p.delta != 0.0 {
        return Err(ModelError::DeltaNotZero { delta: p.delta });
    }
    let gamma = p.gamma_eff;
    let xi = re(gamma * gamma - 16.0 * p.omega * p.omega).sqrt();
    let mut vals = [
        re(0.0),
        re(-0.5 * gamma),
        (re(-3.0 * gamma) + xi) * re(0.25),
        (re(-3.0 * gamma) - xi) * re(0.25),
    ];
    vals.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(vals)
}

/// Which side of the exceptional point a parameter set falls on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralPhase {
    /// `gamma_eff < 4 omega`: the slow eigenvalue pair is complex (oscillatory
    /// relaxation).
    Exact,
    /// `gamma_eff > 4 omega`: the slow pair is real and split (overdamped).
    Broken,
    /// Within tolerance of `gamma_eff = 4 omega`.
    ExceptionalPoint,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseClassification {
    pub phase: SpectralPhase,
    /// `omega / gamma_eff`; the exceptional point sits at 1/4. Infinite when
    /// `gamma_eff` is zero.
    pub ratio: f64,
    /// The discriminant root `xi = sqrt(gamma^2 - 16 omega^2)` evaluated on
    /// the principal branch.
    pub xi: Complex64,
}

/// Classify the relaxation phase at zero detuning. `tol_lep` is the relative
/// half-width of the band around `gamma_eff = 4 omega` reported as the
/// exceptional point itself; [`tol::LEP_CLASSIFY`] is the conventional value.
/// The detuning field is ignored: the classification refers to the
/// zero-detuning spectral structure.
pub fn classify_phase(p: &QubitParams, tol_lep: f64) -> Result<PhaseClassification, ModelError> {
    p.validate()?;
    let gamma = p.gamma_eff;
    let four_omega = 4.0 * p.omega;
    let scale = gamma.max(four_omega);
    if scale == 0.0 {
        return Err(ModelError::DegenerateParams);
    }
    let xi = re(gamma * gamma - 16.0 * p.omega * p.omega).sqrt();
    let phase = if (gamma - four_omega).abs() <= tol_lep * scale {
        SpectralPhase::ExceptionalPoint
    } else if gamma < four_omega {
        SpectralPhase::Exact
    } else {
        SpectralPhase::Broken
    };
    Ok(PhaseClassification {
        phase,
        ratio: if gamma > 0.0 {
            p.omega / gamma
        } else {
            f64::INFINITY
        },
        xi,
    })
}

/// Closed-form steady-state excited population (valid for any detuning):
/// `P_e = (omega^2/4) / (delta^2 + gamma^2/4 + omega^2/2)`.
/// Returns 0 for a zero drive.
pub fn steady_state_population(p: &QubitParams) -> f64 {
    if p.omega == 0.0 {
        return 0.0;
    }
    let num = 0.25 * p.omega * p.omega;
    num / (p.delta * p.delta + 0.25 * p.gamma_eff * p.gamma_eff + 0.5 * p.omega * p.omega)
}

/// Unique steady state of the qubit Liouvillian, extracted from its
/// nullspace and normalized to unit trace. Requires `gamma_eff > 0` (a purely
/// unitary generator has no unique fixed point).
pub fn steady_state(p: &QubitParams) -> Result<DensityMatrix, ModelError> {
    p.validate()?;
    if p.gamma_eff <= 0.0 {
        return Err(ModelError::ZeroGamma);
    }
    let lv = build_liouvillian(p)?;
    let basis = linalg::nullspace(&lv, tol::NULLSPACE_DEFAULT)?;
    if basis.len() != 1 {
        return Err(ModelError::NonUniqueSteadyState { dim: basis.len() });
    }
    let m = unvectorize(&basis[0], 2);
    let trace: Complex64 = m[(0, 0)] + m[(1, 1)];
    if trace.norm() < 1e-6 {
        return Err(ModelError::TracelessNullVector);
    }
    let normalized = m.mapv(|z| z / trace);
    // Scrub the anti-Hermitian numerical dust before validation.
    let herm = Array2::from_shape_fn((2, 2), |(i, j)| {
        0.5 * (normalized[(i, j)] + normalized[(j, i)].conj())
    });
    Ok(DensityMatrix::new(herm)?)
}

// ---------------------------------------------------------------------------
// Exceptional-point location
// ---------------------------------------------------------------------------

/// Which spectrum the exceptional-point search runs on. In both cases the
/// search parameter is the ratio `r = omega / gamma_eff` of qubit drive to
/// effective decay; detuning is held at zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectrumSource {
    /// Effective two-level model at fixed `gamma_eff`.
    TwoLevel { gamma_eff: f64 },
    /// Full three-level model with a fixed engineered bath; `gamma_eff` is
    /// derived via [`effective_decay_rate`].
    ThreeLevel {
        omega_p: f64,
        gamma_g: f64,
        gamma_e: f64,
    },
}

/// Result of the bisection search for the exceptional point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LepLocation {
    /// Critical ratio `omega / gamma_eff`.
    pub ratio: f64,
    /// Drive rate at the critical ratio (rad/s).
    pub omega: f64,
    /// Effective decay rate of the searched model (1/s).
    pub gamma_eff: f64,
    /// Bisection steps taken.
    pub iterations: usize,
}

/// The two slow eigenvalues that coalesce at the exceptional point.
///
/// From a full Liouvillian spectrum, remove the eigenvalue closest to zero
/// (the steady state) and the one closest to `-gamma_eff / 2` (the symmetric
/// coherence mode), then take the two closest to `-3 gamma_eff / 4`, the
/// known coalescence location. For the three-level model the remaining five
/// fast modes sit at the scale of the auxiliary decay, orders of magnitude
/// away, so the same selection applies.
pub fn slow_pair(eigenvalues: &[Complex64], gamma_eff: f64) -> (Complex64, Complex64) {
    assert!(
        eigenvalues.len() >= 4,
        "need at least four eigenvalues to identify the slow pair"
    );
    let mut pool: Vec<Complex64> = eigenvalues.to_vec();
    let remove_closest = |pool: &mut Vec<Complex64>, target: Complex64| {
        let (idx, _) = pool
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| (*a - target).norm().total_cmp(&(*b - target).norm()))
            .expect("non-empty pool");
        pool.remove(idx);
    };
    remove_closest(&mut pool, re(0.0));
    remove_closest(&mut pool, re(-0.5 * gamma_eff));
    let target = re(-0.75 * gamma_eff);
    pool.sort_by(|a, b| (*a - target).norm().total_cmp(&(*b - target).norm()));
    (pool[0], pool[1])
}

/// Phase discriminant at ratio `r`: the slow pair's real-part splitting minus
/// its imaginary-part splitting. Positive in the broken phase, negative in
/// the exact phase, zero at the exceptional point.
fn phase_discriminant(source: &SpectrumSource, r: f64) -> Result<f64, ModelError> {
    let (eigs, gamma_eff) = match source {
        SpectrumSource::TwoLevel { gamma_eff } => {
            let p = QubitParams::new(0.0, r * gamma_eff, *gamma_eff)?;
            (spectrum(&p)?.eigenvalues, *gamma_eff)
        }
        SpectrumSource::ThreeLevel {
            omega_p,
            gamma_g,
            gamma_e,
        } => {
            let probe = ThreeLevelParams::new(0.0, 0.0, *omega_p, *gamma_g, *gamma_e)?;
            let gamma_eff = effective_decay_rate(&probe)?;
            let p = ThreeLevelParams::new(0.0, r * gamma_eff, *omega_p, *gamma_g, *gamma_e)?;
            (spectrum_three_level(&p)?.eigenvalues, gamma_eff)
        }
    };
    let (a, b) = slow_pair(&eigs, gamma_eff);
    Ok((a.re - b.re).abs() - (a.im - b.im).abs())
}

fn source_gamma_eff(source: &SpectrumSource) -> Result<f64, ModelError> {
    match source {
        SpectrumSource::TwoLevel { gamma_eff } => {
            if !gamma_eff.is_finite() {
                return Err(ModelError::NonFinite { name: "gamma_eff" });
            }
            if *gamma_eff <= 0.0 {
                return Err(ModelError::ZeroGamma);
            }
            Ok(*gamma_eff)
        }
        SpectrumSource::ThreeLevel {
            omega_p,
            gamma_g,
            gamma_e,
        } => {
            let probe = ThreeLevelParams::new(0.0, 0.0, *omega_p, *gamma_g, *gamma_e)?;
            let g = effective_decay_rate(&probe)?;
            if g <= 0.0 {
                return Err(ModelError::ZeroGamma);
            }
            Ok(g)
        }
    }
}

/// Locate the exceptional point by bisecting the phase discriminant over the
/// drive-to-decay ratio `r = omega / gamma_eff` in `[r_lo, r_hi]`.
///
/// `rel_tol` is the relative width of the final bracket
/// (`r_hi - r_lo <= rel_tol * r_mid`); [`tol::LEP_LOCATE_DEFAULT`] is the
/// conventional value. Fails with [`ModelError::NoBracket`] when the bracket
/// does not straddle a sign change.
pub fn lep_locate(
    source: &SpectrumSource,
    r_lo: f64,
    r_hi: f64,
    rel_tol: f64,
) -> Result<LepLocation, ModelError> {
    if !(r_lo.is_finite() && r_hi.is_finite() && rel_tol.is_finite())
        || r_lo <= 0.0
        || r_hi <= r_lo
        || rel_tol <= 0.0
    {
        return Err(ModelError::InvalidBracket { lo: r_lo, hi: r_hi });
    }
    let gamma_eff = source_gamma_eff(source)?;
    let mut lo = r_lo;
    let mut hi = r_hi;
    let f_lo = phase_discriminant(source, lo)?;
    let f_hi = phase_discriminant(source, hi)?;
    if f_lo == 0.0 {
        return Ok(LepLocation {
            ratio: lo,
            omega: lo * gamma_eff,
            gamma_eff,
            iterations: 0,
        });
    }
    if f_hi == 0.0 {
        return Ok(LepLocation {
            ratio: hi,
            omega: hi * gamma_eff,
            gamma_eff,
            iterations: 0,
        });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(ModelError::NoBracket);
    }
    let mut sign_lo = f_lo.signum();
    let mut iterations = 0;
    let max_iterations = 200;
    while iterations < max_iterations {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid {
            return Ok(LepLocation {
                ratio: mid,
                omega: mid * gamma_eff,
                gamma_eff,
                iterations,
            });
        }
        let f_mid = phase_discriminant(source, mid)?;
        iterations += 1;
        if f_mid == 0.0 {
            return Ok(LepLocation {
                ratio: mid,
                omega: mid * gamma_eff,
                gamma_eff,
                iterations,
            });
        }
        if f_mid.signum() == sign_lo {
            lo = mid;
            sign_lo = f_mid.signum();
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    Ok(LepLocation {
        ratio: mid,
        omega: mid * gamma_eff,
        gamma_eff,
        iterations,
    })
}
