//! Command-line surface and subcommand execution.
//!
//! Seven subcommands cover the solver crate's surface: single-point spectral
//! diagnostics (`spectrum`, `steady`), cycle execution (`cycle`), parameter
//! scans (`sweep-t2`, `sweep-ratio`), and exceptional-point searches
//! (`lep-locate`, `three-level-compare`). Each resolves its config, runs the
//! solvers, and writes artifacts into the output directory; see
//! [`crate::output`] for the artifact contract.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use qotto_core::dynamics::frobenius_distance;
use qotto_core::liouvillian::{
    analytic_eigenvalues, classify_phase, effective_decay_rate, lep_locate, spectrum,
    steady_state, steady_state_population, LepLocation, QubitParams, SpectralPhase,
    SpectrumSource, ThreeLevelParams,
};
use qotto_core::otto::{converged_metrics, run_cycle, sweep_ratio, sweep_t2};
use qotto_core::thermo::{
    effective_temperature, l1_coherence, von_neumann_entropy, EffectiveTemperature, ThermoLedger,
};
use qotto_core::tol;
use rand_chacha::ChaCha12Rng;
use serde_json::{json, Value};

use crate::config::{
    self, angular_to_khz, rate_to_khz, s_to_us, CliOverrides, Config, LepModel, ShotPlan,
};
use crate::error::CliError;
use crate::output::{
    self, fmt_float, SWEEP_FILE, SWEEP_RATIO_HEADER, SWEEP_T2_HEADER, TRAJECTORY_FILE,
    TRAJECTORY_HEADER,
};
use crate::shots::{emulate_shots, rng_from_seed, RNG_ALGORITHM};

/// Desk-scale simulator of a single-qubit Otto engine driven through the
/// exceptional point of its relaxation spectrum.
#[derive(Debug, Parser)]
#[command(name = "qotto", version, about, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON run configuration; omitted fields fall back to the preset.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Directory receiving trajectory.csv / sweep.csv / summary.json.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,

    /// Emulate finite projective readout with this many shots per sample
    /// (cycle and steady only).
    #[arg(long, global = true, value_name = "N")]
    pub shots: Option<u64>,

    /// Seed for the shot generator.
    #[arg(long, global = true, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Engine preset selecting the stroke baths.
    #[arg(long, global = true, value_enum)]
    pub preset: Option<PresetArg>,

    /// Detuning ramp shape for the work strokes.
    #[arg(long, global = true, value_enum)]
    pub ramp: Option<RampArg>,
}

/// Engine preset names accepted by `--preset`.
#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PresetArg {
    /// Both isochores relax oscillatorily (drive above the critical ratio).
    ExactExact,
    /// Both isochores relax overdamped.
    BrokenBroken,
    /// Oscillatory heating, overdamped cooling.
    ExactBroken,
}

impl PresetArg {
    fn label(self) -> &'static str {
        match self {
            PresetArg::ExactExact => "exact-exact",
            PresetArg::BrokenBroken => "broken-broken",
            PresetArg::ExactBroken => "exact-broken",
        }
    }
}

/// Ramp shapes accepted by `--ramp`.
#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RampArg {
    /// Stepped plateaus, as an AOM frequency-update loop produces.
    Staircase,
    /// Continuous sweep of the same duration.
    Linear,
}

impl RampArg {
    fn label(self) -> &'static str {
        match self {
            RampArg::Staircase => "staircase",
            RampArg::Linear => "linear",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and relaxation phase of the qubit Liouvillian.
    #[command(name = "spectrum")]
    Spectrum,
    /// Steady state of the driven-dissipative qubit and its descriptors.
    #[command(name = "steady")]
    Steady,
    /// Run consecutive engine cycles and write the sampled trajectory.
    #[command(name = "cycle")]
    Cycle,
    /// Sweep the heating-stroke duration; one figure-of-merit row per point.
    #[command(name = "sweep-t2")]
    SweepT2,
    /// Sweep the heating drive-to-decay ratio against heating time.
    #[command(name = "sweep-ratio")]
    SweepRatio,
    /// Bisect for the exceptional point of the relaxation spectrum.
    #[command(name = "lep-locate")]
    LepLocate,
    /// Compare exceptional-point locations of the three-level model and its
    /// two-level reduction.
    #[command(name = "three-level-compare")]
    ThreeLevelCompare,
}

impl Command {
    /// Kebab-case name, as spelled on the command line and in the config
    /// `command` field.
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Steady => "steady",
            Command::Cycle => "cycle",
            Command::SweepT2 => "sweep-t2",
            Command::SweepRatio => "sweep-ratio",
            Command::LepLocate => "lep-locate",
            Command::ThreeLevelCompare => "three-level-compare",
        }
    }

    fn supports_shots(&self) -> bool {
        matches!(self, Command::Cycle | Command::Steady)
    }
}

/// Load, resolve, run, and write artifacts for one invocation.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let name = cli.command.name();
    let config = config::load(cli.config.as_deref(), name)?;
    let over = CliOverrides {
        preset: cli.preset.map(PresetArg::label),
        ramp: cli.ramp.map(RampArg::label),
        shots: cli.shots,
        seed: cli.seed,
    };
    if over.shots.or(config.shots).is_some() && !cli.command.supports_shots() {
        return Err(CliError::validation(
            "shots",
            format!("not supported by `{name}`; only cycle and steady read out populations"),
        ));
    }
    match cli.command {
        Command::Spectrum => cmd_spectrum(cli, &config, &over),
        Command::Steady => cmd_steady(cli, &config, &over),
        Command::Cycle => cmd_cycle(cli, &config, &over),
        Command::SweepT2 => cmd_sweep_t2(cli, &config, &over),
        Command::SweepRatio => cmd_sweep_ratio(cli, &config, &over),
        Command::LepLocate => cmd_lep_locate(cli, &config),
        Command::ThreeLevelCompare => cmd_compare(cli, &config),
    }
}

// ---------------------------------------------------------------------------
// Summary assembly
// ---------------------------------------------------------------------------

fn rng_block(plan: &ShotPlan) -> Value {
    match plan.shots {
        Some(shots) => json!({
            "algorithm": RNG_ALGORITHM,
            "seed": plan.seed,
            "shots": shots,
        }),
        None => Value::Null,
    }
}

fn summary_envelope(command: &str, echo: &Config, rng: Value, results: Value) -> Value {
    json!({
        "artifact_version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": serde_json::to_value(echo).expect("config echo serializes"),
        "rng": rng,
        "results": results,
    })
}

/// JSON-safe float: non-finite values become `null` (JSON has no inf/NaN).
fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn phase_label(phase: SpectralPhase) -> &'static str {
    match phase {
        SpectralPhase::Exact => "exact",
        SpectralPhase::Broken => "broken",
        SpectralPhase::ExceptionalPoint => "exceptional-point",
    }
}

fn temperature_kind(t: EffectiveTemperature) -> &'static str {
    match t {
        EffectiveTemperature::Finite(_) => "finite",
        EffectiveTemperature::Infinite => "infinite",
        EffectiveTemperature::ZeroPopulation => "zero-population",
    }
}

fn ledger_block(ledger: &ThermoLedger) -> Value {
    let to_khz = |v: f64| num(angular_to_khz(v));
    let first_law_residual = ledger.internal_energy_change
        - (ledger.work_on_system + ledger.q_in + ledger.q_out);
    json!({
        "work_per_stroke_2pi_khz":
            Value::Array(ledger.stroke_work.iter().copied().map(to_khz).collect()),
        "heat_per_stroke_2pi_khz":
            Value::Array(ledger.stroke_heat.iter().copied().map(to_khz).collect()),
        "work_on_system_2pi_khz": to_khz(ledger.work_on_system),
        "q_in_2pi_khz": to_khz(ledger.q_in),
        "q_out_2pi_khz": to_khz(ledger.q_out),
        "internal_energy_change_2pi_khz": to_khz(ledger.internal_energy_change),
        "first_law_residual_2pi_khz": to_khz(first_law_residual),
        "active_duration_s": num(ledger.active_duration),
        "total_duration_s": num(ledger.total_duration),
        "intervals": ledger.intervals,
    })
}

// ---------------------------------------------------------------------------
// Single-point commands
// ---------------------------------------------------------------------------

fn cmd_spectrum(cli: &Cli, config: &Config, over: &CliOverrides) -> Result<(), CliError> {
    let q = config::resolve_qubit(config, over)?;
    let params = QubitParams::new(q.delta, q.omega, q.gamma_eff)?;
    let mut eigenvalues = spectrum(&params)?.eigenvalues;
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let eig_json: Vec<Value> = eigenvalues
        .iter()
        .map(|z| json!({"re_rad_s": num(z.re), "im_rad_s": num(z.im)}))
        .collect();
    let trace: num_complex::Complex64 = eigenvalues.iter().sum();

    // The closed-form comparison and phase classification apply at zero
    // detuning only.
    let (phase, ratio, closed_form_dev) = if q.delta == 0.0 {
        let classification = classify_phase(&params, tol::LEP_CLASSIFY)?;
        let analytic = analytic_eigenvalues(&params)?;
        let scale = eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max)
            .max(1e-300);
        let dev = analytic
            .iter()
            .map(|a| {
                eigenvalues
                    .iter()
                    .map(|z| (z - a).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0_f64, f64::max)
            / scale;
        (
            Value::String(phase_label(classification.phase).to_string()),
            num(classification.ratio),
            num(dev),
        )
    } else {
        (Value::Null, Value::Null, Value::Null)
    };

    let results = json!({
        "eigenvalues": Value::Array(eig_json),
        "trace_re_rad_s": num(trace.re),
        "trace_im_rad_s": num(trace.im),
        "phase": phase,
        "drive_to_decay_ratio": ratio,
        "closed_form_max_relative_deviation": closed_form_dev,
    });
    output::ensure_out_dir(&cli.out)?;
    output::write_summary(
        &cli.out,
        &summary_envelope("spectrum", &q.echo, Value::Null, results),
    )?;
    Ok(())
}

fn cmd_steady(cli: &Cli, config: &Config, over: &CliOverrides) -> Result<(), CliError> {
    let q = config::resolve_qubit(config, over)?;
    let params = QubitParams::new(q.delta, q.omega, q.gamma_eff)?;
    let rho = steady_state(&params)?;
    let p_e = rho.excited_population();
    let coherence = rho.coherence(1, 0);
    let t_eff = effective_temperature(&rho, q.delta);

    let measurement = match q.shot_plan.shots {
        Some(shots) => {
            let mut rng = rng_from_seed(q.shot_plan.seed);
            let m = emulate_shots(p_e, shots, &mut rng);
            json!({"P_e_mean": num(m.mean), "P_e_std": num(m.std)})
        }
        None => Value::Null,
    };

    let results = json!({
        "P_e": num(p_e),
        "P_g": num(rho.ground_population()),
        "P_e_closed_form": num(steady_state_population(&params)),
        "re_rho_eg": num(coherence.re),
        "im_rho_eg": num(coherence.im),
        "T_eff_rad_s": num(t_eff.value()),
        "T_eff_kind": temperature_kind(t_eff),
        "C_l1": num(l1_coherence(&rho)),
        "S": num(von_neumann_entropy(&rho)?),
        "measurement": measurement,
    });
    output::ensure_out_dir(&cli.out)?;
    output::write_summary(
        &cli.out,
        &summary_envelope("steady", &q.echo, rng_block(&q.shot_plan), results),
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Cycle execution
// ---------------------------------------------------------------------------

/// One `trajectory.csv` row. With shots active the populations are the
/// finite-readout estimate (`P_g = 1 - P_e` as the complementary count);
/// coherences and state functionals stay at their model values.
fn trajectory_row(
    sample: &qotto_core::dynamics::Sample,
    readout: Option<(u64, &mut ChaCha12Rng)>,
) -> Result<Vec<String>, CliError> {
    let p_e_model = sample.rho.excited_population();
    let (p_e, p_g) = match readout {
        Some((shots, rng)) => {
            let m = emulate_shots(p_e_model, shots, rng);
            (m.mean, 1.0 - m.mean)
        }
        None => (p_e_model, sample.rho.ground_population()),
    };
    let coherence = sample.rho.coherence(1, 0);
    let t_eff = effective_temperature(&sample.rho, sample.delta).value();
    Ok(vec![
        fmt_float(sample.t),
        fmt_float(p_e),
        fmt_float(p_g),
        fmt_float(coherence.re),
        fmt_float(coherence.im),
        fmt_float(sample.delta),
        fmt_float(sample.omega),
        fmt_float(sample.gamma_eff),
        fmt_float(t_eff),
        fmt_float(l1_coherence(&sample.rho)),
        fmt_float(von_neumann_entropy(&sample.rho)?),
        sample.stroke.to_string(),
    ])
}

fn cmd_cycle(cli: &Cli, config: &Config, over: &CliOverrides) -> Result<(), CliError> {
    let r = config::resolve_cycle(config, over)?;
    let run = run_cycle(&r.spec, None, r.n_cycles)?;
    let metrics = converged_metrics(&r.spec, &run)?;
    let ledger = run.converged_ledger();

    let mut rng = r.shot_plan.shots.map(|_| rng_from_seed(r.shot_plan.seed));
    let mut rows = Vec::with_capacity(run.trajectory.len());
    for sample in &run.trajectory.samples {
        let readout = match (r.shot_plan.shots, rng.as_mut()) {
            (Some(shots), Some(rng)) => Some((shots, rng)),
            _ => None,
        };
        rows.push(trajectory_row(sample, readout)?);
    }

    let end_state = &run
        .trajectory
        .samples
        .last()
        .expect("a run produces samples")
        .rho;
    let closure = frobenius_distance(end_state, &run.initial_state);

    let results = json!({
        "regime": r.regime.label(),
        "cycles": r.n_cycles,
        "samples": run.trajectory.len(),
        "metrics": {
            "W_2pi_khz": num(angular_to_khz(metrics.w_net)),
            "P_out_2pi_khz_per_s": num(angular_to_khz(metrics.power)),
            "eta_otto": num(metrics.eta_o),
            "eta_c": num(metrics.eta_c),
            "eta_q": num(metrics.eta_q),
        },
        "converged_ledger": ledger_block(ledger),
        "cycle_closure_distance": num(closure),
    });

    output::ensure_out_dir(&cli.out)?;
    output::write_csv(&cli.out, TRAJECTORY_FILE, TRAJECTORY_HEADER, &rows)?;
    output::write_summary(
        &cli.out,
        &summary_envelope("cycle", &r.echo, rng_block(&r.shot_plan), results),
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

fn cmd_sweep_t2(cli: &Cli, config: &Config, over: &CliOverrides) -> Result<(), CliError> {
    let mut r = config::resolve_cycle(config, over)?;
    let (grid, t2_values) = config::resolve_t2_grid(config)?;
    r.echo.t2_grid_us = Some(grid);
    let points = sweep_t2(&r.spec, &t2_values)?;

    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                fmt_float(p.t2),
                fmt_float(angular_to_khz(p.w_net)),
                fmt_float(angular_to_khz(p.power)),
                fmt_float(p.eta_c),
                fmt_float(p.eta_q),
            ]
        })
        .collect();

    let best = points
        .iter()
        .max_by(|a, b| a.w_net.total_cmp(&b.w_net))
        .expect("grid is non-empty");
    let results = json!({
        "regime": r.regime.label(),
        "rows": points.len(),
        "best_by_work": {
            "t2_us": num(s_to_us(best.t2)),
            "W_2pi_khz": num(angular_to_khz(best.w_net)),
            "P_out_2pi_khz_per_s": num(angular_to_khz(best.power)),
            "eta_c": num(best.eta_c),
            "eta_q": num(best.eta_q),
        },
    });

    output::ensure_out_dir(&cli.out)?;
    output::write_csv(&cli.out, SWEEP_FILE, SWEEP_T2_HEADER, &rows)?;
    output::write_summary(
        &cli.out,
        &summary_envelope("sweep-t2", &r.echo, Value::Null, results),
    )?;
    Ok(())
}

fn cmd_sweep_ratio(cli: &Cli, config: &Config, over: &CliOverrides) -> Result<(), CliError> {
    let mut r = config::resolve_cycle(config, over)?;
    let ratios = config::resolve_ratios(config)?;
    let (grid, t2_values) = config::resolve_t2_grid(config)?;
    r.echo.ratios = Some(ratios.clone());
    r.echo.t2_grid_us = Some(grid);
    let points = sweep_ratio(&r.spec, &ratios, &t2_values)?;

    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            vec![
                fmt_float(p.ratio),
                fmt_float(p.t2),
                fmt_float(angular_to_khz(p.w_net)),
            ]
        })
        .collect();

    let best = points
        .iter()
        .max_by(|a, b| a.w_net.total_cmp(&b.w_net))
        .expect("grid is non-empty");
    let results = json!({
        "regime": r.regime.label(),
        "rows": points.len(),
        "ratios": ratios.len(),
        "t2_points": t2_values.len(),
        "best_by_work": {
            "ratio": num(best.ratio),
            "t2_us": num(s_to_us(best.t2)),
            "W_2pi_khz": num(angular_to_khz(best.w_net)),
        },
    });

    output::ensure_out_dir(&cli.out)?;
    output::write_csv(&cli.out, SWEEP_FILE, SWEEP_RATIO_HEADER, &rows)?;
    output::write_summary(
        &cli.out,
        &summary_envelope("sweep-ratio", &r.echo, Value::Null, results),
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Exceptional-point searches
// ---------------------------------------------------------------------------

fn location_block(loc: &LepLocation) -> Value {
    json!({
        "ratio": num(loc.ratio),
        "omega_rad_s": num(loc.omega),
        "omega_khz": num(angular_to_khz(loc.omega)),
        "gamma_eff_s": num(loc.gamma_eff),
        "gamma_eff_khz": num(rate_to_khz(loc.gamma_eff)),
        "iterations": loc.iterations,
    })
}

fn cmd_lep_locate(cli: &Cli, config: &Config) -> Result<(), CliError> {
    let r = config::resolve_lep(config)?;
    let (source, model_label) = match r.model {
        LepModel::TwoLevel { gamma_eff } => (SpectrumSource::TwoLevel { gamma_eff }, "two-level"),
        LepModel::ThreeLevel {
            omega_p,
            gamma_g,
            gamma_e,
        } => (
            SpectrumSource::ThreeLevel {
                omega_p,
                gamma_g,
                gamma_e,
            },
            "three-level",
        ),
    };
    let location = lep_locate(&source, r.lo, r.hi, r.rel_tol)?;
    let results = json!({
        "model": model_label,
        "location": location_block(&location),
        "ratio_offset_from_quarter": num(location.ratio - 0.25),
    });
    output::ensure_out_dir(&cli.out)?;
    output::write_summary(
        &cli.out,
        &summary_envelope("lep-locate", &r.echo, Value::Null, results),
    )?;
    Ok(())
}

fn cmd_compare(cli: &Cli, config: &Config) -> Result<(), CliError> {
    let r = config::resolve_compare(config)?;
    let omega_p = config::khz_to_angular(r.three_level.omega_p_khz);
    let gamma_g = config::khz_to_rate(r.three_level.gamma_g_khz);
    let gamma_e = config::khz_to_rate(r.three_level.gamma_e_khz);
    let probe = ThreeLevelParams::new(0.0, 0.0, omega_p, gamma_g, gamma_e)?;
    let gamma_eff = effective_decay_rate(&probe)?;

    let full = lep_locate(
        &SpectrumSource::ThreeLevel {
            omega_p,
            gamma_g,
            gamma_e,
        },
        r.lo,
        r.hi,
        r.rel_tol,
    )?;
    let reduced = lep_locate(&SpectrumSource::TwoLevel { gamma_eff }, r.lo, r.hi, r.rel_tol)?;
    let relative_difference = (full.ratio - reduced.ratio).abs() / reduced.ratio;

    let results = json!({
        "gamma_eff_s": num(gamma_eff),
        "gamma_eff_khz": num(rate_to_khz(gamma_eff)),
        "three_level": location_block(&full),
        "two_level": location_block(&reduced),
        "ratio_relative_difference": num(relative_difference),
    });
    output::ensure_out_dir(&cli.out)?;
    output::write_summary(
        &cli.out,
        &summary_envelope("three-level-compare", &r.echo, Value::Null, results),
    )?;
    Ok(())
}
