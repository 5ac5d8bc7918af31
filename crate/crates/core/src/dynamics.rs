//! Time evolution of the qubit master equation under piecewise-constant
//! controls.
//!
//! Every drive schedule is flattened into pieces on which all parameters are
//! constant; each piece is propagated exactly as `exp(L dt)` applied to the
//! vectorized state, with one matrix exponential per piece step size. Linear
//! detuning ramps are discretized into midpoint-valued sub-pieces; hardware
//! staircase ramps are taken as given.
//!
//! Sampling convention: every piece boundary carries a sample, and interior
//! piece spacing never exceeds the requested `sample_dt`. A sample that sits
//! at a control discontinuity records the *average* of the detuning on the
//! two sides. That choice is what keeps midpoint-rule work integrals
//! second-order accurate across staircase jumps: the one-sided O(dt) errors
//! from the two adjacent intervals cancel exactly.

use ndarray::Array1;
use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, LinalgError};
use crate::liouvillian::{
    build_liouvillian, unvectorize, vectorize, DensityError, DensityMatrix, ModelError,
    QubitParams,
};
use crate::tol;

/// A linear ramp is cut into at least this many midpoint-valued sub-pieces.
pub const RAMP_MIN_SUBDIVISIONS: usize = 100;

/// Sub-pieces of a linear ramp never last longer than this (seconds).
pub const RAMP_MAX_SUB_DURATION_S: f64 = 50e-9;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("invalid segment: {reason}")]
    InvalidSegment { reason: String },
    #[error("relaxation did not converge within t_max = {t_max:.3e} s")]
    Timeout { t_max: f64 },
    #[error("model error: {0}")]
    Model(#[from] ModelError),
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] LinalgError),
    #[error("state left the physical manifold during propagation: {0}")]
    State(#[from] DensityError),
}

/// Detuning control over one segment. `omega` and `gamma_eff` are constant
/// within a segment; only the detuning has structure.
#[derive(Clone, Debug, PartialEq)]
pub enum DeltaProfile {
    Constant(f64),
    /// Continuous linear sweep, discretized internally into midpoint-valued
    /// sub-pieces.
    LinearRamp { from: f64, to: f64 },
    /// Explicit plateau list `(delta, dwell)`, e.g. from [`aom_discretize`].
    /// Dwells must sum to the segment duration.
    Staircase { plateaus: Vec<(f64, f64)> },
}

/// One stretch of evolution with fixed drive and decay parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    /// Duration in seconds, strictly positive.
    pub duration: f64,
    /// Rabi rate (rad/s).
    pub omega: f64,
    /// Engineered decay rate (1/s).
    pub gamma_eff: f64,
    pub profile: DeltaProfile,
}

/// One recorded point of a trajectory.
#[derive(Clone, Debug)]
pub struct Sample {
    /// Absolute time (s).
    pub t: f64,
    pub rho: DensityMatrix,
    /// Detuning recorded for quadrature (two-sided average at control jumps).
    pub delta: f64,
    pub omega: f64,
    pub gamma_eff: f64,
    /// Cycle stroke this sample closes: 1-4, or 0 for relaxation waits.
    pub stroke: u8,
}

#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }
}

/// Frobenius distance between two density matrices of equal dimension.
pub fn frobenius_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    a.matrix()
        .iter()
        .zip(b.matrix().iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Discretize a linear detuning sweep into the plateau staircase an AOM-style
/// synthesizer would output: plateau count `n = ceil(|to - from| / step)`
/// (with a small slack against floating-point ratios landing just above an
/// integer), plateau `k` (1-based) at `from + sign(to - from) * min(k * step,
/// |to - from|)`, each held for `dwell`. The first plateau is a jump away
/// from `from` at t = 0, and the last lands on `to` exactly. A zero sweep
/// yields a single plateau at `to`.
pub fn aom_discretize(
    from: f64,
    to: f64,
    step: f64,
    dwell: f64,
) -> Result<Vec<(f64, f64)>, DynamicsError> {
    for (name, v) in [("from", from), ("to", to), ("step", step), ("dwell", dwell)] {
        if !v.is_finite() {
            return Err(DynamicsError::InvalidSegment {
                reason: format!("{name} is not finite"),
            });
        }
    }
    if dwell <= 0.0 {
        return Err(DynamicsError::InvalidSegment {
            reason: format!("dwell must be positive, got {dwell}"),
        });
    }
    let span = (to - from).abs();
    if span == 0.0 {
        return Ok(vec![(to, dwell)]);
    }
    if step <= 0.0 {
        return Err(DynamicsError::InvalidSegment {
            reason: format!("step must be positive for a non-zero sweep, got {step}"),
        });
    }
    let n = (span / step - tol::STAIRCASE_COUNT_SLACK).ceil().max(1.0) as usize;
    let sign = (to - from).signum();
    let plateaus = (1..=n)
        .map(|k| (from + sign * (k as f64 * step).min(span), dwell))
        .collect();
    Ok(plateaus)
}

/// Flatten a segment into `(duration, delta)` pieces with all controls
/// constant. `ramp_subdivision` overrides the linear-ramp piece count (used
/// by refinement tests); `None` applies the standard policy.
fn flatten(
    seg: &Segment,
    ramp_subdivision: Option<usize>,
) -> Result<Vec<(f64, f64)>, DynamicsError> {
    if !seg.duration.is_finite() || seg.duration <= 0.0 {
        return Err(DynamicsError::InvalidSegment {
            reason: format!("duration must be positive, got {}", seg.duration),
        });
    }
    match &seg.profile {
        DeltaProfile::Constant(delta) => {
            if !delta.is_finite() {
                return Err(DynamicsError::InvalidSegment {
                    reason: "constant delta is not finite".into(),
                });
            }
            Ok(vec![(seg.duration, *delta)])
        }
        DeltaProfile::LinearRamp { from, to } => {
            if !from.is_finite() || !to.is_finite() {
                return Err(DynamicsError::InvalidSegment {
                    reason: "ramp endpoint is not finite".into(),
                });
            }
            let policy = (seg.duration / RAMP_MAX_SUB_DURATION_S - tol::STAIRCASE_COUNT_SLACK)
                .ceil()
                .max(1.0) as usize;
            let n = ramp_subdivision.unwrap_or_else(|| policy.max(RAMP_MIN_SUBDIVISIONS));
            let dt = seg.duration / n as f64;
            Ok((0..n)
                .map(|k| (dt, from + (to - from) * (k as f64 + 0.5) / n as f64))
                .collect())
        }
        DeltaProfile::Staircase { plateaus } => {
            if plateaus.is_empty() {
                return Err(DynamicsError::InvalidSegment {
                    reason: "staircase has no plateaus".into(),
                });
            }
            let mut total = 0.0;
            for (delta, dwell) in plateaus {
                if !delta.is_finite() || !dwell.is_finite() || *dwell <= 0.0 {
                    return Err(DynamicsError::InvalidSegment {
                        reason: format!("bad plateau ({delta}, {dwell})"),
                    });
                }
                total += dwell;
            }
            let slack = tol::SEGMENT_DURATION_SLACK_S.max(1e-12 * seg.duration);
            if (total - seg.duration).abs() > slack {
                return Err(DynamicsError::InvalidSegment {
                    reason: format!(
                        "plateau dwells sum to {total:.6e} s but segment lasts {:.6e} s",
                        seg.duration
                    ),
                });
            }
            Ok(plateaus.iter().map(|&(delta, dwell)| (dwell, delta)).collect())
        }
    }
}

/// Propagate a fresh trajectory through one segment, starting at `t0`.
/// The initial sample is included.
pub fn propagate_segment(
    rho0: &DensityMatrix,
    seg: &Segment,
    sample_dt: f64,
    t0: f64,
    stroke: u8,
) -> Result<Trajectory, DynamicsError> {
    let pieces = flatten(seg, None)?;
    let mut traj = Trajectory::default();
    traj.samples.push(Sample {
        t: t0,
        rho: rho0.clone(),
        delta: pieces[0].1,
        omega: seg.omega,
        gamma_eff: seg.gamma_eff,
        stroke,
    });
    extend_with_pieces(&mut traj, seg, &pieces, sample_dt, stroke)?;
    Ok(traj)
}

/// Continue an existing trajectory through another segment. The trajectory's
/// final sample becomes the shared boundary sample: its recorded detuning is
/// replaced by the two-sided average and it keeps its previous stroke label.
pub fn append_segment(
    traj: &mut Trajectory,
    seg: &Segment,
    sample_dt: f64,
    stroke: u8,
) -> Result<(), DynamicsError> {
    append_segment_with(traj, seg, sample_dt, stroke, None)
}

/// [`append_segment`] with an explicit linear-ramp subdivision override, for
/// refinement testing.
pub(crate) fn append_segment_with(
    traj: &mut Trajectory,
    seg: &Segment,
    sample_dt: f64,
    stroke: u8,
    ramp_subdivision: Option<usize>,
) -> Result<(), DynamicsError> {
    let pieces = flatten(seg, ramp_subdivision)?;
    let last = traj
        .samples
        .last_mut()
        .ok_or_else(|| DynamicsError::InvalidSegment {
            reason: "cannot append to an empty trajectory".into(),
        })?;
    last.delta = 0.5 * (last.delta + pieces[0].1);
    extend_with_pieces(traj, seg, &pieces, sample_dt, stroke)
}

/// Core propagation loop over constant-control pieces.
fn extend_with_pieces(
    traj: &mut Trajectory,
    seg: &Segment,
    pieces: &[(f64, f64)],
    sample_dt: f64,
    stroke: u8,
) -> Result<(), DynamicsError> {
    if !sample_dt.is_finite() || sample_dt <= 0.0 {
        return Err(DynamicsError::InvalidSegment {
            reason: format!("sample_dt must be positive, got {sample_dt}"),
        });
    }
    let start = traj.last().expect("caller pushed the initial sample");
    if start.rho.dim() != 2 {
        return Err(DynamicsError::InvalidSegment {
            reason: format!("propagation needs a qubit state, got dimension {}", start.rho.dim()),
        });
    }
    let mut v: Array1<Complex64> = vectorize(start.rho.matrix());
    let mut piece_t0 = start.t;

    for (p, &(dur, delta)) in pieces.iter().enumerate() {
        let params = QubitParams::new(delta, seg.omega, seg.gamma_eff)?;
        let lv = build_liouvillian(&params)?;
        let n = (dur / sample_dt - tol::STAIRCASE_COUNT_SLACK).ceil().max(1.0) as usize;
        let dt = dur / n as f64;
        let propagator = linalg::expm(&lv.scaled(Complex64::new(dt, 0.0))?)?;
        for k in 1..=n {
            v = propagator.apply(&v);
            let at_piece_end = k == n;
            let t = if at_piece_end {
                piece_t0 + dur
            } else {
                piece_t0 + k as f64 * dt
            };
            // A sample on an interior plateau boundary records the two-sided
            // detuning average; the segment's final sample stays one-sided
            // (a later append may still average it).
            let recorded_delta = if at_piece_end && p + 1 < pieces.len() {
                0.5 * (delta + pieces[p + 1].1)
            } else {
                delta
            };
            traj.samples.push(Sample {
                t,
                rho: DensityMatrix::new(unvectorize(&v, 2))?,
                delta: recorded_delta,
                omega: seg.omega,
                gamma_eff: seg.gamma_eff,
                stroke,
            });
        }
        piece_t0 += dur;
    }
    Ok(())
}

/// Options for [`relax_to_steady`].
#[derive(Clone, Copy, Debug)]
pub struct RelaxOptions {
    /// Convergence threshold on the Frobenius distance between states one
    /// relaxation time apart.
    pub tol: f64,
    /// Give up after `t_max_factor / gamma_eff` seconds.
    pub t_max_factor: f64,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self {
            tol: tol::RELAX_DEFAULT,
            t_max_factor: tol::RELAX_T_MAX_FACTOR,
        }
    }
}

/// Result of a relaxation run.
#[derive(Clone, Debug)]
pub struct Relaxation {
    pub state: DensityMatrix,
    /// Simulated time until convergence was declared (s).
    pub elapsed: f64,
    /// Number of `1/gamma_eff` chunks propagated.
    pub chunks: usize,
}

/// Evolve under fixed parameters until the state stops changing: propagate in
/// chunks of one relaxation time `1/gamma_eff` and declare convergence when
/// consecutive chunk-end states agree within `opts.tol` (Frobenius). Starting
/// at the steady state therefore still costs one chunk.
pub fn relax_to_steady(
    rho0: &DensityMatrix,
    params: &QubitParams,
    opts: &RelaxOptions,
) -> Result<Relaxation, DynamicsError> {
    if params.gamma_eff <= 0.0 {
        return Err(DynamicsError::Model(ModelError::ZeroGamma));
    }
    if !(opts.tol > 0.0) || !(opts.t_max_factor > 0.0) {
        return Err(DynamicsError::InvalidSegment {
            reason: "relaxation tolerance and t_max_factor must be positive".into(),
        });
    }
    let chunk = 1.0 / params.gamma_eff;
    let lv = build_liouvillian(params)?;
    let propagator = linalg::expm(&lv.scaled(Complex64::new(chunk, 0.0))?)?;
    let max_chunks = opts.t_max_factor.ceil() as usize;
    let mut v = vectorize(rho0.matrix());
    let mut previous = rho0.clone();
    for chunks in 1..=max_chunks {
        v = propagator.apply(&v);
        let state = DensityMatrix::new(unvectorize(&v, 2))?;
        if frobenius_distance(&state, &previous) <= opts.tol {
            return Ok(Relaxation {
                state,
                elapsed: chunks as f64 * chunk,
                chunks,
            });
        }
        previous = state;
    }
    Err(DynamicsError::Timeout {
        t_max: opts.t_max_factor * chunk,
    })
}
