//! JSON run configuration: schema, parsing, and resolution to solver inputs.
//!
//! All quantities in the file use benchtop units: drive amplitudes and
//! detunings as `frequency/2pi` in kHz, decay rates in kHz, stroke times in
//! microseconds, dwell and sampling intervals in nanoseconds. Resolution
//! converts them to the angular-frequency / rate / second units the solver
//! crate works in.
//!
//! Every field except `command` is optional; anything omitted falls back to
//! the selected preset (`exact-broken` unless chosen otherwise). The
//! `command` field must name the subcommand the binary was invoked with,
//! which keeps a config file from being silently replayed under the wrong
//! mode. Command-line flags (`--preset`, `--ramp`, `--shots`, `--seed`)
//! override their config-file counterparts.

use std::f64::consts::PI;
use std::path::Path;

use qotto_core::liouvillian::{omega_from_khz, rate_from_khz};
use qotto_core::otto::{
    preset, preset_strokes_khz, OttoCycleSpec, RampMode, Regime, StrokeParams,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

// ---------------------------------------------------------------------------
// Unit conversions
// ---------------------------------------------------------------------------
//
// Delegating to the solver crate's converters keeps config resolution
// bit-identical with the built-in presets; times divide by exact powers of
// ten so decimal values land on the same float a literal would.

/// kHz (as `omega/2pi`) to angular frequency in rad/s.
pub fn khz_to_angular(v_khz: f64) -> f64 {
    omega_from_khz(v_khz)
}

/// Angular frequency in rad/s to kHz (as `omega/2pi`).
pub fn angular_to_khz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1.0e3)
}

/// kHz to a plain rate in 1/s.
pub fn khz_to_rate(v_khz: f64) -> f64 {
    rate_from_khz(v_khz)
}

/// Plain rate in 1/s to kHz.
pub fn rate_to_khz(rate: f64) -> f64 {
    rate / 1.0e3
}

/// Microseconds to seconds.
pub fn us_to_s(v_us: f64) -> f64 {
    v_us / 1.0e6
}

/// Seconds to microseconds.
pub fn s_to_us(v_s: f64) -> f64 {
    v_s * 1.0e6
}

/// Nanoseconds to seconds.
pub fn ns_to_s(v_ns: f64) -> f64 {
    v_ns / 1.0e9
}

/// Seconds to nanoseconds.
pub fn s_to_ns(v_s: f64) -> f64 {
    v_s * 1.0e9
}

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

/// Drive and decay of one stroke's engineered bath, in benchtop units.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StrokeConfig {
    /// Rabi rate as `omega/2pi` in kHz.
    pub omega_khz: f64,
    /// Effective decay rate in kHz.
    pub gamma_khz: f64,
}

/// The four stroke baths of a cycle. When the section is present all four
/// strokes must be given.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StrokesConfig {
    pub compression: StrokeConfig,
    pub heating: StrokeConfig,
    pub expansion: StrokeConfig,
    pub cooling: StrokeConfig,
}

/// Inclusive arithmetic grid over the heating-stroke duration.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub start_us: f64,
    pub stop_us: f64,
    pub step_us: f64,
}

/// Engineered-bath scheme: auxiliary-level coupling and decay branches.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ThreeLevelConfig {
    /// Coupling to the auxiliary level as `omega_p/2pi` in kHz.
    pub omega_p_khz: f64,
    /// Auxiliary decay into the ground state, kHz.
    pub gamma_g_khz: f64,
    /// Auxiliary decay back into the excited state, kHz.
    pub gamma_e_khz: f64,
}

/// Search bracket for the exceptional-point bisection, in drive-to-decay
/// ratio units.
#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BracketConfig {
    pub lo: f64,
    pub hi: f64,
}

/// Full run configuration. See the module docs for units and precedence.
#[derive(Clone, Debug, Default, Deserialize, PartialEq, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Must equal the subcommand the binary was invoked with.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    /// Engine preset: `exact-exact`, `broken-broken`, or `exact-broken`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Detuning ramp shape: `staircase` or `linear`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp: Option<String>,
    /// Seed for the measurement-shot generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Number of projective shots per sample; omitted means noiseless.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    /// Consecutive cycles to run for the `cycle` command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_cycles: Option<usize>,

    /// Splitting at the cold end of the cycle, kHz.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_min_khz: Option<f64>,
    /// Splitting at the hot end of the cycle, kHz.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_max_khz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strokes: Option<StrokesConfig>,
    /// Heating-stroke duration, us.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2_us: Option<f64>,
    /// Cooling-stroke duration, us.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t4_us: Option<f64>,
    /// Staircase detuning increment, kHz.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_step_khz: Option<f64>,
    /// Staircase plateau dwell, ns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_dwell_ns: Option<f64>,
    /// Trajectory sampling interval, ns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_dt_ns: Option<f64>,

    /// Heating-time grid for the sweep commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2_grid_us: Option<GridConfig>,
    /// Heating-stroke drive-to-decay ratios for `sweep-ratio`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<f64>>,

    /// Drive amplitude for the single-point commands, kHz.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_khz: Option<f64>,
    /// Decay rate for the single-point commands, kHz.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_khz: Option<f64>,
    /// Detuning for the single-point commands, kHz.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_khz: Option<f64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub three_level: Option<ThreeLevelConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket: Option<BracketConfig>,
    /// Relative bracket width at which the exceptional-point search stops.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
}

impl Config {
    /// Serialize to pretty JSON (round-trips through [`parse`]).
    pub fn emit(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("config serialization cannot fail");
        text.push('\n');
        text
    }
}

/// Decode a config from JSON text. Malformed JSON (including unknown fields)
/// is a parse error carrying the decoder's line/column position.
pub fn parse(text: &str) -> Result<Config, CliError> {
    Ok(serde_json::from_str(text)?)
}

/// Load the config for an invocation: read/parse `path` when given, or start
/// from an empty config, then check the `command` field against the invoked
/// subcommand (filling it in when the file omitted everything).
pub fn load(path: Option<&Path>, command_name: &str) -> Result<Config, CliError> {
    let mut config = match path {
        None => Config::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::io(format!("reading config {}: {e}", p.display())))?;
            parse(&text)?
        }
    };
    match config.command.as_deref() {
        None => config.command = Some(command_name.to_string()),
        Some(c) if c == command_name => {}
        Some(c) => {
            return Err(CliError::validation(
                "command",
                format!("config is for `{c}` but the invoked subcommand is `{command_name}`"),
            ));
        }
    }
    Ok(config)
}

// ---------------------------------------------------------------------------
// Resolution
// ---------------------------------------------------------------------------

/// Command-line flags that override config-file fields.
#[derive(Clone, Copy, Debug, Default)]
pub struct CliOverrides<'a> {
    pub preset: Option<&'a str>,
    pub ramp: Option<&'a str>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
}

fn parse_regime(label: &str) -> Result<Regime, CliError> {
    Regime::all()
        .into_iter()
        .find(|r| r.label() == label)
        .ok_or_else(|| {
            CliError::validation(
                "preset",
                format!("unknown preset `{label}`; expected exact-exact, broken-broken, or exact-broken"),
            )
        })
}

fn parse_ramp(label: &str) -> Result<RampMode, CliError> {
    match label {
        "staircase" => Ok(RampMode::Staircase),
        "linear" => Ok(RampMode::Linear),
        other => Err(CliError::validation(
            "ramp",
            format!("unknown ramp mode `{other}`; expected staircase or linear"),
        )),
    }
}

fn ramp_label(mode: RampMode) -> &'static str {
    match mode {
        RampMode::Staircase => "staircase",
        RampMode::Linear => "linear",
    }
}

fn require_finite(field: &'static str, value: f64) -> Result<f64, CliError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(CliError::validation(field, "must be finite"))
    }
}

fn require_positive(field: &'static str, value: f64) -> Result<f64, CliError> {
    require_finite(field, value)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(CliError::validation(
            field,
            format!("must be positive, got {value}"),
        ))
    }
}

fn require_non_negative(field: &'static str, value: f64) -> Result<f64, CliError> {
    require_finite(field, value)?;
    if value >= 0.0 {
        Ok(value)
    } else {
        Err(CliError::validation(
            field,
            format!("must be non-negative, got {value}"),
        ))
    }
}

/// Shot count and generator seed shared by every command.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShotPlan {
    /// `None` means report noiseless expectation values.
    pub shots: Option<u64>,
    pub seed: u64,
}

fn resolve_shots(config: &Config, over: &CliOverrides) -> Result<ShotPlan, CliError> {
    let shots = over.shots.or(config.shots);
    if shots == Some(0) {
        return Err(CliError::validation("shots", "must be at least 1"));
    }
    Ok(ShotPlan {
        shots,
        seed: over.seed.or(config.seed).unwrap_or(0),
    })
}

/// A cycle-family command resolved to solver inputs plus the full-detail
/// config echo reported in `summary.json`.
#[derive(Clone, Debug)]
pub struct ResolvedCycle {
    pub spec: OttoCycleSpec,
    pub regime: Regime,
    pub n_cycles: usize,
    pub shot_plan: ShotPlan,
    pub echo: Config,
}

/// Preset cycle geometry shared by every regime, in benchtop units. The
/// config echo carries these (or the user's values) verbatim, so resolution
/// happens in kHz/us/ns space with exactly one conversion to solver units:
/// rerunning from an echoed config reproduces the run bit-for-bit.
pub const PRESET_DELTA_MIN_KHZ: f64 = 0.0;
pub const PRESET_DELTA_MAX_KHZ: f64 = 10.0;
pub const PRESET_T2_US: f64 = 12.0;
pub const PRESET_T4_US: f64 = 10.0;
pub const PRESET_RAMP_STEP_KHZ: f64 = 2.0;
pub const PRESET_RAMP_DWELL_NS: f64 = 400.0;
pub const PRESET_SAMPLE_DT_NS: f64 = 10.0;

fn preset_strokes_config(regime: Regime) -> StrokesConfig {
    let [compression, heating, expansion, cooling] = preset_strokes_khz(regime)
        .map(|(omega_khz, gamma_khz)| StrokeConfig {
            omega_khz,
            gamma_khz,
        });
    StrokesConfig {
        compression,
        heating,
        expansion,
        cooling,
    }
}

fn stroke_to_solver(s: StrokeConfig) -> StrokeParams {
    StrokeParams {
        omega: khz_to_angular(s.omega_khz),
        gamma_eff: khz_to_rate(s.gamma_khz),
    }
}

/// Resolve the engine configuration for `cycle`, `sweep-t2`, and
/// `sweep-ratio`: preset base, config-field overrides, flag overrides,
/// then a full validation pass.
pub fn resolve_cycle(config: &Config, over: &CliOverrides) -> Result<ResolvedCycle, CliError> {
    let regime_label = over
        .preset
        .or(config.preset.as_deref())
        .unwrap_or(Regime::ExactBroken.label());
    let regime = parse_regime(regime_label)?;

    // Fill in the benchtop-unit picture first; it becomes the echo.
    let strokes = match config.strokes {
        Some(strokes) => {
            for (field, s) in [
                ("strokes.compression", strokes.compression),
                ("strokes.heating", strokes.heating),
                ("strokes.expansion", strokes.expansion),
                ("strokes.cooling", strokes.cooling),
            ] {
                require_non_negative(field, s.omega_khz)?;
                require_non_negative(field, s.gamma_khz)?;
            }
            strokes
        }
        None => preset_strokes_config(regime),
    };
    let delta_min_khz = match config.delta_min_khz {
        Some(v) => require_non_negative("delta_min_khz", v)?,
        None => PRESET_DELTA_MIN_KHZ,
    };
    let delta_max_khz = match config.delta_max_khz {
        Some(v) => require_positive("delta_max_khz", v)?,
        None => PRESET_DELTA_MAX_KHZ,
    };
    let t2_us = match config.t2_us {
        Some(v) => require_positive("t2_us", v)?,
        None => PRESET_T2_US,
    };
    let t4_us = match config.t4_us {
        Some(v) => require_positive("t4_us", v)?,
        None => PRESET_T4_US,
    };
    let ramp_step_khz = match config.ramp_step_khz {
        Some(v) => require_positive("ramp_step_khz", v)?,
        None => PRESET_RAMP_STEP_KHZ,
    };
    let ramp_dwell_ns = match config.ramp_dwell_ns {
        Some(v) => require_positive("ramp_dwell_ns", v)?,
        None => PRESET_RAMP_DWELL_NS,
    };
    let sample_dt_ns = match config.sample_dt_ns {
        Some(v) => require_positive("sample_dt_ns", v)?,
        None => PRESET_SAMPLE_DT_NS,
    };
    let ramp_mode = match over.ramp.or(config.ramp.as_deref()) {
        Some(label) => parse_ramp(label)?,
        None => RampMode::Staircase,
    };

    // Convergence knobs are not config-exposed; take the solver defaults.
    let base = preset(regime);
    let spec = OttoCycleSpec {
        delta_min: khz_to_angular(delta_min_khz),
        delta_max: khz_to_angular(delta_max_khz),
        compression: stroke_to_solver(strokes.compression),
        heating: stroke_to_solver(strokes.heating),
        expansion: stroke_to_solver(strokes.expansion),
        cooling: stroke_to_solver(strokes.cooling),
        t2: us_to_s(t2_us),
        t4: us_to_s(t4_us),
        ramp_step: khz_to_angular(ramp_step_khz),
        ramp_dwell: ns_to_s(ramp_dwell_ns),
        ramp_mode,
        sample_dt: ns_to_s(sample_dt_ns),
        wait_tolerance: base.wait_tolerance,
        wait_max_chunks: base.wait_max_chunks,
    };
    spec.validate()?;

    let n_cycles = config.n_cycles.unwrap_or(2);
    if n_cycles == 0 {
        return Err(CliError::validation("n_cycles", "must be at least 1"));
    }
    let shot_plan = resolve_shots(config, over)?;

    let echo = Config {
        command: config.command.clone(),
        preset: Some(regime.label().to_string()),
        ramp: Some(ramp_label(ramp_mode).to_string()),
        seed: Some(shot_plan.seed),
        shots: shot_plan.shots,
        n_cycles: Some(n_cycles),
        delta_min_khz: Some(delta_min_khz),
        delta_max_khz: Some(delta_max_khz),
        strokes: Some(strokes),
        t2_us: Some(t2_us),
        t4_us: Some(t4_us),
        ramp_step_khz: Some(ramp_step_khz),
        ramp_dwell_ns: Some(ramp_dwell_ns),
        sample_dt_ns: Some(sample_dt_ns),
        t2_grid_us: config.t2_grid_us,
        ratios: config.ratios.clone(),
        ..Config::default()
    };

    Ok(ResolvedCycle {
        spec,
        regime,
        n_cycles,
        shot_plan,
        echo,
    })
}

/// Default heating-time sweep grid, matching the solver crate's convention:
/// 0.5 us to 20 us in 0.5 us steps.
pub const DEFAULT_T2_GRID: GridConfig = GridConfig {
    start_us: 0.5,
    stop_us: 20.0,
    step_us: 0.5,
};

/// Largest sweep grid the binary will expand.
pub const MAX_GRID_POINTS: usize = 10_000;

/// Expand the heating-time grid (config value or the default) into seconds.
/// Returns the resolved grid section alongside for the config echo.
pub fn resolve_t2_grid(config: &Config) -> Result<(GridConfig, Vec<f64>), CliError> {
    let grid = config.t2_grid_us.unwrap_or(DEFAULT_T2_GRID);
    require_positive("t2_grid_us.start_us", grid.start_us)?;
    require_positive("t2_grid_us.step_us", grid.step_us)?;
    require_finite("t2_grid_us.stop_us", grid.stop_us)?;
    if grid.stop_us < grid.start_us {
        return Err(CliError::validation(
            "t2_grid_us.stop_us",
            "must be at least start_us",
        ));
    }
    let count = ((grid.stop_us - grid.start_us) / grid.step_us).floor() as usize + 1;
    if count > MAX_GRID_POINTS {
        return Err(CliError::validation(
            "t2_grid_us",
            format!("expands to {count} points, above the {MAX_GRID_POINTS} cap"),
        ));
    }
    // Half-step slack keeps the intended endpoint on the grid despite
    // accumulated rounding.
    let values = (0..)
        .map(|k| grid.start_us + k as f64 * grid.step_us)
        .take_while(|v| *v <= grid.stop_us + 0.5 * grid.step_us * 1e-9)
        .take(count)
        .map(us_to_s)
        .collect();
    Ok((grid, values))
}

/// Default drive-ratio grid for `sweep-ratio`: 0.05 to 0.50 in steps of 0.05.
pub fn default_ratios() -> Vec<f64> {
    (1..=10).map(|k| k as f64 * 0.05).collect()
}

/// Ratio list for `sweep-ratio` (config value or the default).
pub fn resolve_ratios(config: &Config) -> Result<Vec<f64>, CliError> {
    let ratios = config.ratios.clone().unwrap_or_else(default_ratios);
    if ratios.is_empty() {
        return Err(CliError::validation("ratios", "must be non-empty"));
    }
    if ratios.len() > MAX_GRID_POINTS {
        return Err(CliError::validation(
            "ratios",
            format!("{} entries, above the {MAX_GRID_POINTS} cap", ratios.len()),
        ));
    }
    for &r in &ratios {
        require_positive("ratios", r)?;
    }
    Ok(ratios)
}

/// A single-point command (`spectrum`, `steady`) resolved to qubit
/// parameters in solver units.
#[derive(Clone, Debug)]
pub struct ResolvedQubit {
    /// Detuning (rad/s).
    pub delta: f64,
    /// Drive amplitude (rad/s).
    pub omega: f64,
    /// Effective decay rate (1/s).
    pub gamma_eff: f64,
    pub shot_plan: ShotPlan,
    pub echo: Config,
}

/// Resolve qubit parameters for the single-point commands. Defaults mirror
/// the selected preset's heating stroke at zero detuning.
pub fn resolve_qubit(config: &Config, over: &CliOverrides) -> Result<ResolvedQubit, CliError> {
    let regime_label = over
        .preset
        .or(config.preset.as_deref())
        .unwrap_or(Regime::ExactBroken.label());
    let regime = parse_regime(regime_label)?;
    let (heating_omega_khz, heating_gamma_khz) = preset_strokes_khz(regime)[1];

    let omega_khz = match config.omega_khz {
        Some(v) => require_non_negative("omega_khz", v)?,
        None => heating_omega_khz,
    };
    let gamma_khz = match config.gamma_khz {
        Some(v) => require_non_negative("gamma_khz", v)?,
        None => heating_gamma_khz,
    };
    let delta_khz = match config.delta_khz {
        Some(v) => require_finite("delta_khz", v)?,
        None => 0.0,
    };
    let shot_plan = resolve_shots(config, over)?;

    let echo = Config {
        command: config.command.clone(),
        preset: Some(regime.label().to_string()),
        seed: Some(shot_plan.seed),
        shots: shot_plan.shots,
        omega_khz: Some(omega_khz),
        gamma_khz: Some(gamma_khz),
        delta_khz: Some(delta_khz),
        ..Config::default()
    };

    Ok(ResolvedQubit {
        delta: khz_to_angular(delta_khz),
        omega: khz_to_angular(omega_khz),
        gamma_eff: khz_to_rate(gamma_khz),
        shot_plan,
        echo,
    })
}

/// Default two-level decay rate for `lep-locate` when none is configured.
pub const DEFAULT_LEP_GAMMA_KHZ: f64 = 100.0;
/// Default search bracket in ratio units.
pub const DEFAULT_BRACKET: BracketConfig = BracketConfig { lo: 0.05, hi: 0.45 };
/// Default relative bracket width at which the search stops.
pub const DEFAULT_LEP_REL_TOL: f64 = 1.0e-6;

/// Spectrum model the exceptional-point search runs on, in solver units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LepModel {
    TwoLevel {
        gamma_eff: f64,
    },
    ThreeLevel {
        omega_p: f64,
        gamma_g: f64,
        gamma_e: f64,
    },
}

/// `lep-locate` resolved to a model, bracket, and stop tolerance.
#[derive(Clone, Debug)]
pub struct ResolvedLep {
    pub model: LepModel,
    pub lo: f64,
    pub hi: f64,
    pub rel_tol: f64,
    pub echo: Config,
}

fn validated_three_level(tl: &ThreeLevelConfig) -> Result<(), CliError> {
    require_non_negative("three_level.omega_p_khz", tl.omega_p_khz)?;
    require_non_negative("three_level.gamma_g_khz", tl.gamma_g_khz)?;
    require_non_negative("three_level.gamma_e_khz", tl.gamma_e_khz)?;
    Ok(())
}

fn three_level_to_solver(tl: &ThreeLevelConfig) -> LepModel {
    LepModel::ThreeLevel {
        omega_p: khz_to_angular(tl.omega_p_khz),
        gamma_g: khz_to_rate(tl.gamma_g_khz),
        gamma_e: khz_to_rate(tl.gamma_e_khz),
    }
}

fn resolve_bracket(config: &Config) -> Result<(BracketConfig, f64), CliError> {
    let bracket = config.bracket.unwrap_or(DEFAULT_BRACKET);
    require_positive("bracket.lo", bracket.lo)?;
    require_finite("bracket.hi", bracket.hi)?;
    if bracket.hi <= bracket.lo {
        return Err(CliError::validation("bracket.hi", "must exceed bracket.lo"));
    }
    let rel_tol = match config.rel_tol {
        Some(v) => {
            require_positive("rel_tol", v)?;
            if v >= 1.0 {
                return Err(CliError::validation("rel_tol", "must be below 1"));
            }
            v
        }
        None => DEFAULT_LEP_REL_TOL,
    };
    Ok((bracket, rel_tol))
}

/// Resolve `lep-locate`: a `three_level` section selects the full model,
/// otherwise the two-level model runs at `gamma_khz` (default
/// [`DEFAULT_LEP_GAMMA_KHZ`]).
pub fn resolve_lep(config: &Config) -> Result<ResolvedLep, CliError> {
    let (bracket, rel_tol) = resolve_bracket(config)?;
    let (model, echo_gamma, echo_three_level) = match &config.three_level {
        Some(tl) => {
            validated_three_level(tl)?;
            (three_level_to_solver(tl), None, Some(*tl))
        }
        None => {
            let gamma_khz = match config.gamma_khz {
                Some(v) => require_positive("gamma_khz", v)?,
                None => DEFAULT_LEP_GAMMA_KHZ,
            };
            (
                LepModel::TwoLevel {
                    gamma_eff: khz_to_rate(gamma_khz),
                },
                Some(gamma_khz),
                None,
            )
        }
    };
    let echo = Config {
        command: config.command.clone(),
        gamma_khz: echo_gamma,
        three_level: echo_three_level,
        bracket: Some(bracket),
        rel_tol: Some(rel_tol),
        ..Config::default()
    };
    Ok(ResolvedLep {
        model,
        lo: bracket.lo,
        hi: bracket.hi,
        rel_tol,
        echo,
    })
}

/// `three-level-compare` resolved: the engineered-bath scheme plus the
/// search bracket shared by both models.
#[derive(Clone, Debug)]
pub struct ResolvedCompare {
    pub three_level: ThreeLevelConfig,
    pub lo: f64,
    pub hi: f64,
    pub rel_tol: f64,
    pub echo: Config,
}

/// Default engineered bath for `three-level-compare`: a weakly coupled
/// auxiliary level decaying only to ground. The coupling-to-decay ratio
/// `omega_p / gamma_total = 2pi*32e3 / 2e6 ~ 0.1` keeps the auxiliary level
/// adiabatically eliminable, so the two-level reduction is meaningful.
pub const DEFAULT_COMPARE_THREE_LEVEL: ThreeLevelConfig = ThreeLevelConfig {
    omega_p_khz: 32.0,
    gamma_g_khz: 2000.0,
    gamma_e_khz: 0.0,
};

/// Resolve `three-level-compare`.
pub fn resolve_compare(config: &Config) -> Result<ResolvedCompare, CliError> {
    let (bracket, rel_tol) = resolve_bracket(config)?;
    let tl = config.three_level.unwrap_or(DEFAULT_COMPARE_THREE_LEVEL);
    validated_three_level(&tl)?;
    let echo = Config {
        command: config.command.clone(),
        three_level: Some(tl),
        bracket: Some(bracket),
        rel_tol: Some(rel_tol),
        ..Config::default()
    };
    Ok(ResolvedCompare {
        three_level: tl,
        lo: bracket.lo,
        hi: bracket.hi,
        rel_tol,
        echo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_conversions_round_trip() {
        assert_relative_eq!(angular_to_khz(khz_to_angular(12.5)), 12.5, epsilon = 1e-12);
        assert_relative_eq!(rate_to_khz(khz_to_rate(370.0)), 370.0, epsilon = 1e-12);
        assert_relative_eq!(s_to_us(us_to_s(12.0)), 12.0, epsilon = 1e-12);
        assert_relative_eq!(s_to_ns(ns_to_s(400.0)), 400.0, epsilon = 1e-12);
        // 10 kHz of drive is 2pi * 1e4 rad/s.
        assert_relative_eq!(
            khz_to_angular(10.0),
            2.0 * PI * 1.0e4,
            max_relative = 1e-15
        );
        // 10 kHz of decay is a plain 1e4 1/s.
        assert_relative_eq!(khz_to_rate(10.0), 1.0e4, max_relative = 1e-15);
    }

    #[test]
    fn empty_config_resolves_to_the_exact_broken_preset() {
        let config = load(None, "cycle").unwrap();
        let resolved = resolve_cycle(&config, &CliOverrides::default()).unwrap();
        assert_eq!(resolved.spec, preset(Regime::ExactBroken));
        assert_eq!(resolved.n_cycles, 2);
        assert_eq!(resolved.shot_plan, ShotPlan { shots: None, seed: 0 });
        assert_eq!(resolved.echo.command.as_deref(), Some("cycle"));
        assert_eq!(resolved.echo.preset.as_deref(), Some("exact-broken"));
    }

    #[test]
    fn field_overrides_take_precedence_over_the_preset() {
        let config = parse(
            r#"{
                "command": "cycle",
                "preset": "broken-broken",
                "t2_us": 6.0,
                "delta_max_khz": 8.0,
                "shots": 250,
                "seed": 11
            }"#,
        )
        .unwrap();
        let resolved = resolve_cycle(&config, &CliOverrides::default()).unwrap();
        assert_relative_eq!(resolved.spec.t2, 6.0e-6, max_relative = 1e-12);
        assert_relative_eq!(
            resolved.spec.delta_max,
            khz_to_angular(8.0),
            max_relative = 1e-12
        );
        // Untouched fields still come from the broken-broken preset.
        assert_relative_eq!(
            resolved.spec.heating.gamma_eff,
            khz_to_rate(2500.0),
            max_relative = 1e-12
        );
        assert_eq!(
            resolved.shot_plan,
            ShotPlan {
                shots: Some(250),
                seed: 11
            }
        );
    }

    #[test]
    fn flag_overrides_beat_config_fields() {
        let config = parse(r#"{"command": "cycle", "preset": "exact-exact", "seed": 3}"#).unwrap();
        let over = CliOverrides {
            preset: Some("broken-broken"),
            ramp: Some("linear"),
            shots: Some(100),
            seed: Some(9),
        };
        let resolved = resolve_cycle(&config, &over).unwrap();
        assert_eq!(resolved.regime, Regime::BrokenBroken);
        assert_eq!(resolved.spec.ramp_mode, RampMode::Linear);
        assert_eq!(
            resolved.shot_plan,
            ShotPlan {
                shots: Some(100),
                seed: 9
            }
        );
        assert_eq!(resolved.echo.ramp.as_deref(), Some("linear"));
    }

    #[test]
    fn command_mismatch_is_a_validation_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"command": "cycle"}"#).unwrap();
        let err = load(Some(&path), "sweep-t2").unwrap_err();
        match err {
            CliError::Validation { field, .. } => assert_eq!(field, "command"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_parse_errors_with_position() {
        let err = parse(r#"{"command": "cycle", "t2_usec": 4.0}"#).unwrap_err();
        match err {
            CliError::Parse { message } => {
                assert!(message.contains("t2_usec"), "{message}");
                assert!(message.contains("line"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let err = parse("{\"command\": ").unwrap_err();
        assert!(matches!(err, CliError::Parse { .. }));
    }

    #[test]
    fn bad_field_values_are_validation_errors() {
        let config = parse(r#"{"command": "cycle", "t2_us": -1.0}"#).unwrap();
        let err = resolve_cycle(&config, &CliOverrides::default()).unwrap_err();
        match err {
            CliError::Validation { field, .. } => assert_eq!(field, "t2_us"),
            other => panic!("expected validation error, got {other:?}"),
        }
        let config = parse(r#"{"command": "cycle", "shots": 0}"#).unwrap();
        let err = resolve_cycle(&config, &CliOverrides::default()).unwrap_err();
        assert!(matches!(err, CliError::Validation { .. }));
    }

    #[test]
    fn inverted_cycle_geometry_is_rejected_during_validation() {
        // delta_max below delta_min passes field checks but fails the
        // whole-spec validation pass.
        let config = parse(
            r#"{"command": "cycle", "delta_min_khz": 12.0, "delta_max_khz": 8.0}"#,
        )
        .unwrap();
        let err = resolve_cycle(&config, &CliOverrides::default()).unwrap_err();
        assert!(matches!(err, CliError::Validation { .. }));
    }

    #[test]
    fn echo_round_trips_through_emit_and_parse() {
        let config = load(None, "cycle").unwrap();
        let resolved = resolve_cycle(&config, &CliOverrides::default()).unwrap();
        let reparsed = parse(&resolved.echo.emit()).unwrap();
        assert_eq!(reparsed, resolved.echo);
        // The echo resolves in benchtop units, so re-resolving it reproduces
        // the solver spec bit-for-bit.
        let re_resolved = resolve_cycle(&reparsed, &CliOverrides::default()).unwrap();
        assert_eq!(re_resolved.spec, resolved.spec);
    }

    #[test]
    fn default_t2_grid_matches_the_solver_convention() {
        let config = load(None, "sweep-t2").unwrap();
        let (grid, values) = resolve_t2_grid(&config).unwrap();
        assert_eq!(grid, DEFAULT_T2_GRID);
        let reference = qotto_core::otto::default_t2_grid();
        assert_eq!(values.len(), reference.len());
        for (got, want) in values.iter().zip(&reference) {
            assert_relative_eq!(got, want, max_relative = 1e-14);
        }
    }

    #[test]
    fn explicit_t2_grid_hits_both_endpoints() {
        let config = parse(
            r#"{
                "command": "sweep-t2",
                "t2_grid_us": {"start_us": 2.0, "stop_us": 8.0, "step_us": 1.5}
            }"#,
        )
        .unwrap();
        let (_, values) = resolve_t2_grid(&config).unwrap();
        let expected: Vec<f64> = [2.0, 3.5, 5.0, 6.5, 8.0].iter().map(|v| v * 1e-6).collect();
        assert_eq!(values.len(), expected.len());
        for (got, want) in values.iter().zip(&expected) {
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn degenerate_grid_is_rejected() {
        let config = parse(
            r#"{
                "command": "sweep-t2",
                "t2_grid_us": {"start_us": 2.0, "stop_us": 1.0, "step_us": 0.5}
            }"#,
        )
        .unwrap();
        assert!(matches!(
            resolve_t2_grid(&config),
            Err(CliError::Validation { .. })
        ));
        let config = parse(
            r#"{
                "command": "sweep-t2",
                "t2_grid_us": {"start_us": 2.0, "stop_us": 4.0, "step_us": 0.0}
            }"#,
        )
        .unwrap();
        assert!(matches!(
            resolve_t2_grid(&config),
            Err(CliError::Validation { .. })
        ));
    }

    #[test]
    fn lep_defaults_use_the_two_level_model() {
        let config = load(None, "lep-locate").unwrap();
        let resolved = resolve_lep(&config).unwrap();
        assert_eq!(
            resolved.model,
            LepModel::TwoLevel {
                gamma_eff: khz_to_rate(DEFAULT_LEP_GAMMA_KHZ)
            }
        );
        assert_relative_eq!(resolved.lo, 0.05);
        assert_relative_eq!(resolved.hi, 0.45);
        assert_relative_eq!(resolved.rel_tol, DEFAULT_LEP_REL_TOL);
    }

    #[test]
    fn lep_three_level_section_selects_the_full_model() {
        let config = parse(
            r#"{
                "command": "lep-locate",
                "three_level": {"omega_p_khz": 100.0, "gamma_g_khz": 1000.0, "gamma_e_khz": 0.0},
                "bracket": {"lo": 0.1, "hi": 0.4},
                "rel_tol": 1e-5
            }"#,
        )
        .unwrap();
        let resolved = resolve_lep(&config).unwrap();
        match resolved.model {
            LepModel::ThreeLevel {
                omega_p,
                gamma_g,
                gamma_e,
            } => {
                assert_relative_eq!(omega_p, khz_to_angular(100.0), max_relative = 1e-12);
                assert_relative_eq!(gamma_g, 1.0e6, max_relative = 1e-12);
                assert_relative_eq!(gamma_e, 0.0);
            }
            other => panic!("expected three-level model, got {other:?}"),
        }
        assert_relative_eq!(resolved.rel_tol, 1e-5);
    }

    #[test]
    fn ratios_default_covers_both_phases() {
        let config = load(None, "sweep-ratio").unwrap();
        let ratios = resolve_ratios(&config).unwrap();
        assert_eq!(ratios.len(), 10);
        assert!(ratios.first().unwrap() < &0.25);
        assert!(ratios.last().unwrap() > &0.25);
    }
}
