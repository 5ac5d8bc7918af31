//! First-law bookkeeping along trajectories and thermodynamic figures of
//! merit.
//!
//! The accounting Hamiltonian is the bare splitting term `H = delta |e><e|`
//! only: the drive `omega` is bath machinery, not stored energy. With
//! `hbar = 1`, energies are in rad/s. Work and heat increments use the
//! midpoint rule,
//!
//! `dW_k = (P_k + P_{k+1})/2 * (delta_{k+1} - delta_k)`,
//! `dQ_k = (delta_k + delta_{k+1})/2 * (P_{k+1} - P_k)`,
//!
//! whose sum telescopes *exactly* to `d(delta * P)` — the per-step first law
//! is an algebraic identity, so its closure over a cycle tests the trajectory
//! bookkeeping, not the quadrature. Sign conventions: `dW`, `dQ` are energy
//! into the system; `w_net = -sum(dW)` is the cycle's net output;
//! `q_in`/`q_out` split the heat increments by sign, with `q_out` kept
//! signed (non-positive).

use std::ops::Range;

use crate::dynamics::Trajectory;
use crate::linalg::LinalgError;
use crate::liouvillian::{steady_state_population, DensityMatrix, QubitParams};
use crate::tol;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ThermoError {
    #[error("trajectory slice unusable for accounting: {reason}")]
    InsufficientTrajectory { reason: String },
    #[error("no net heat absorbed (q_in = {q_in:.3e}); conventional efficiency undefined")]
    NoHeatAbsorbed { q_in: f64 },
    #[error("denominator below tolerance; efficiency undefined")]
    DegenerateDenominator,
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] LinalgError),
}

/// Energy bookkeeping over one trajectory slice (typically one cycle).
/// Stroke indices 1-4 are the cycle strokes; index 0 collects relaxation
/// waits. All energies in rad/s (`hbar = 1`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ThermoLedger {
    /// Signed work on the system, by stroke label.
    pub stroke_work: [f64; 5],
    /// Signed heat into the system, by stroke label.
    pub stroke_heat: [f64; 5],
    /// Total work done on the system.
    pub work_on_system: f64,
    /// Net work output of the cycle: `-work_on_system`.
    pub w_net: f64,
    /// Sum of positive heat increments.
    pub q_in: f64,
    /// Sum of negative heat increments (kept signed, <= 0).
    pub q_out: f64,
    /// Telescoped internal-energy change `delta*P_e` (end minus start).
    pub internal_energy_change: f64,
    /// Time spent in strokes 1-4 (s); the power denominator.
    pub active_duration: f64,
    /// Total slice duration including waits (s).
    pub total_duration: f64,
    /// Number of accumulated intervals.
    pub intervals: usize,
}

/// Accumulate midpoint-rule work and heat over the sample range
/// `range.start..range.end` of a trajectory (at least two samples). Each
/// interval is attributed to the stroke label of its *closing* sample.
pub fn first_law_accumulate(
    traj: &Trajectory,
    range: Range<usize>,
) -> Result<ThermoLedger, ThermoError> {
    if range.end > traj.len() || range.start >= range.end {
        return Err(ThermoError::InsufficientTrajectory {
            reason: format!(
                "range {}..{} out of bounds for {} samples",
                range.start,
                range.end,
                traj.len()
            ),
        });
    }
    if range.end - range.start < 2 {
        return Err(ThermoError::InsufficientTrajectory {
            reason: "need at least two samples".into(),
        });
    }
    let samples = &traj.samples[range.clone()];
    let mut ledger = ThermoLedger::default();
    for pair in samples.windows(2) {
        let (s0, s1) = (&pair[0], &pair[1]);
        let p0 = s0.rho.excited_population();
        let p1 = s1.rho.excited_population();
        let dw = 0.5 * (p0 + p1) * (s1.delta - s0.delta);
        let dq = 0.5 * (s0.delta + s1.delta) * (p1 - p0);
        let stroke = s1.stroke as usize;
        debug_assert!(stroke < 5, "stroke labels are 0-4");
        ledger.stroke_work[stroke] += dw;
        ledger.stroke_heat[stroke] += dq;
        ledger.work_on_system += dw;
        if dq > 0.0 {
            ledger.q_in += dq;
        } else {
            ledger.q_out += dq;
        }
        let dt = s1.t - s0.t;
        if (1..=4).contains(&stroke) {
            ledger.active_duration += dt;
        }
        ledger.total_duration += dt;
        ledger.intervals += 1;
    }
    ledger.w_net = -ledger.work_on_system;
    let first = &samples[0];
    let last = &samples[samples.len() - 1];
    ledger.internal_energy_change =
        last.delta * last.rho.excited_population() - first.delta * first.rho.excited_population();
    Ok(ledger)
}

/// Net output power: `w_net` over the active (stroke 1-4) duration, with
/// relaxation waits excluded. Zero if no active time was recorded.
pub fn output_power(ledger: &ThermoLedger) -> f64 {
    if ledger.active_duration > 0.0 {
        ledger.w_net / ledger.active_duration
    } else {
        0.0
    }
}

/// Ideal Otto efficiency `1 - delta_min/delta_max`. Caller guarantees
/// `delta_max > delta_min >= 0`.
pub fn eta_otto(delta_min: f64, delta_max: f64) -> f64 {
    1.0 - delta_min / delta_max
}

/// Conventional efficiency `w_net / q_in`. Fails when no heat was absorbed.
pub fn eta_conventional(ledger: &ThermoLedger) -> Result<f64, ThermoError> {
    if ledger.q_in <= 0.0 {
        return Err(ThermoError::NoHeatAbsorbed { q_in: ledger.q_in });
    }
    Ok(ledger.w_net / ledger.q_in)
}

/// Quantum efficiency based on heating-stroke population transfer:
///
/// `eta_q = W_q / Q_in^q` with
/// `W_q = (P_h(end) - P_h^S) * (delta_max - delta_min)` and
/// `Q_in^q = (P_h^L - P_h^S) * delta_max`,
///
/// where `P_h^S` is the population entering the heating stroke (the boundary
/// sample preceding the first heating-labeled sample), `P_h(end)` the
/// population leaving it, and `P_h^L` the analytic steady-state population of
/// the heating parameters (drive held at `delta_max`). Algebraically this
/// equals `(1 + (P_h(end) - P_h^L)/(P_h^L - P_h^S)) * eta_otto`.
///
/// `heating` must carry the heating-stroke parameters with
/// `delta = delta_max`.
pub fn eta_quantum(
    traj: &Trajectory,
    range: Range<usize>,
    heating: &QubitParams,
    delta_min: f64,
) -> Result<f64, ThermoError> {
    if range.end > traj.len() || range.start >= range.end {
        return Err(ThermoError::InsufficientTrajectory {
            reason: "range out of bounds".into(),
        });
    }
    let delta_max = heating.delta;
    if delta_max <= delta_min {
        return Err(ThermoError::DegenerateDenominator);
    }
    let samples = &traj.samples[range.clone()];
    let first_heating = samples
        .iter()
        .position(|s| s.stroke == 2)
        .ok_or_else(|| ThermoError::InsufficientTrajectory {
            reason: "no heating-stroke samples in range".into(),
        })?;
    if first_heating == 0 {
        return Err(ThermoError::InsufficientTrajectory {
            reason: "heating stroke has no entry boundary sample".into(),
        });
    }
    let last_heating = samples
        .iter()
        .rposition(|s| s.stroke == 2)
        .expect("a heating sample exists");
    let p_start = samples[first_heating - 1].rho.excited_population();
    let p_end = samples[last_heating].rho.excited_population();
    let p_limit = steady_state_population(heating);
    let denom = p_limit - p_start;
    if denom.abs() < tol::ETA_Q_DENOMINATOR {
        return Err(ThermoError::DegenerateDenominator);
    }
    Ok((p_end - p_start) * (delta_max - delta_min) / (denom * delta_max))
}

/// Boltzmann-consistent effective temperature of a qubit state at splitting
/// `delta` (`k_B = 1`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EffectiveTemperature {
    Finite(f64),
    /// Equal populations: infinite temperature.
    Infinite,
    /// An empty level: the `T -> 0+` limit, reported as zero with a flag.
    ZeroPopulation,
}

impl EffectiveTemperature {
    /// Collapse to a number for tabulation: `Infinite -> +inf`,
    /// `ZeroPopulation -> 0`.
    pub fn value(&self) -> f64 {
        match self {
            Self::Finite(t) => *t,
            Self::Infinite => f64::INFINITY,
            Self::ZeroPopulation => 0.0,
        }
    }
}

/// `T_eff = delta / ln(P_g / P_e)`: the temperature a thermal state at
/// splitting `delta` would need to reproduce the populations. Zero at zero
/// splitting, negative under population inversion.
pub fn effective_temperature(rho: &DensityMatrix, delta: f64) -> EffectiveTemperature {
    let p_g = rho.ground_population();
    let p_e = rho.excited_population();
    if (p_e - p_g).abs() <= tol::T_EFF_EQUAL_POPULATIONS {
        return EffectiveTemperature::Infinite;
    }
    if p_e <= tol::ENTROPY_EIGENVALUE_FLOOR || p_g <= tol::ENTROPY_EIGENVALUE_FLOOR {
        return EffectiveTemperature::ZeroPopulation;
    }
    EffectiveTemperature::Finite(delta / (p_g / p_e).ln())
}

/// l1 coherence: sum of absolute off-diagonal entries.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let n = m.nrows();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += m[(i, j)].norm();
            }
        }
    }
    total
}

/// Von Neumann entropy `-sum p ln p` over the state's eigenvalues
/// (`k_B = 1`); eigenvalues at or below [`tol::ENTROPY_EIGENVALUE_FLOOR`]
/// contribute nothing. The qubit case uses the closed-form spectrum, since
/// this runs on every trajectory sample.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64, ThermoError> {
    let eigenvalues: Vec<f64> = if rho.dim() == 2 {
        let m = rho.matrix();
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let gap = ((a - d).powi(2) + 4.0 * m[(0, 1)].norm_sqr()).sqrt();
        vec![0.5 * (a + d - gap), 0.5 * (a + d + gap)]
    } else {
        let herm = ndarray::Array2::from_shape_fn(rho.matrix().dim(), |(i, j)| {
            0.5 * (rho.matrix()[(i, j)] + rho.matrix()[(j, i)].conj())
        });
        crate::linalg::hermitian_eigenvalues(&crate::linalg::ComplexMatrix::new(herm)?)?
    };
    Ok(eigenvalues
        .iter()
        .filter(|&&p| p > tol::ENTROPY_EIGENVALUE_FLOOR)
        .map(|&p| -p * p.ln())
        .sum())
}
