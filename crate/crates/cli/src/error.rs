//! Error taxonomy for the command-line driver.
//!
//! Every failure is folded into one of four categories, each mapped to a
//! stable process exit code so scripts can branch on the kind of failure:
//!
//! | category     | exit code | meaning                                        |
//! |--------------|-----------|------------------------------------------------|
//! | `Parse`      | 2         | the config file is not well-formed JSON        |
//! | `Validation` | 2         | the config is well-formed but inconsistent     |
//! | `Numerical`  | 3         | a solver or integrator failed during the run   |
//! | `Io`         | 4         | reading inputs or writing artifacts failed     |

use qotto_core::dynamics::DynamicsError;
use qotto_core::linalg::LinalgError;
use qotto_core::liouvillian::ModelError;
use qotto_core::otto::OttoError;
use qotto_core::thermo::ThermoError;
use thiserror::Error;

/// Exit code reported on success.
pub const EXIT_OK: i32 = 0;
/// Exit code for config parse and validation failures.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for numerical failures inside the solvers.
pub const EXIT_NUMERICAL: i32 = 3;
/// Exit code for filesystem failures.
pub const EXIT_IO: i32 = 4;

/// Top-level error type for the binary.
#[derive(Debug, Error)]
pub enum CliError {
    /// The config file could not be decoded as JSON. The message carries the
    /// line/column position reported by the decoder.
    #[error("config parse error: {message}")]
    Parse { message: String },

    /// The config decoded cleanly but a field is missing, out of range, or
    /// inconsistent with the invoked subcommand.
    #[error("config validation error: field `{field}`: {constraint}")]
    Validation { field: String, constraint: String },

    /// A solver, integrator, or root bracket failed at runtime.
    #[error("numerical error: {message}")]
    Numerical { message: String },

    /// A file or directory could not be read or written.
    #[error("io error: {message}")]
    Io { message: String },
}

impl CliError {
    /// Process exit code for this error category.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } => EXIT_CONFIG,
            CliError::Numerical { .. } => EXIT_NUMERICAL,
            CliError::Io { .. } => EXIT_IO,
        }
    }

    /// Convenience constructor for validation failures.
    pub fn validation(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            constraint: constraint.into(),
        }
    }

    /// Convenience constructor for io failures with a path for context.
    pub fn io(context: impl Into<String>) -> Self {
        CliError::Io {
            message: context.into(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        // serde_json reports "… at line L column C"; keep that intact.
        CliError::Parse {
            message: e.to_string(),
        }
    }
}

impl From<OttoError> for CliError {
    fn from(e: OttoError) -> Self {
        match e {
            // A rejected cycle spec means the resolved config was inconsistent.
            OttoError::InvalidSpec { field, constraint } => CliError::Validation {
                field: field.to_string(),
                constraint,
            },
            other => CliError::Numerical {
                message: other.to_string(),
            },
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Numerical {
            message: e.to_string(),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        CliError::Numerical {
            message: e.to_string(),
        }
    }
}

impl From<ThermoError> for CliError {
    fn from(e: ThermoError) -> Self {
        CliError::Numerical {
            message: e.to_string(),
        }
    }
}

impl From<LinalgError> for CliError {
    fn from(e: LinalgError) -> Self {
        CliError::Numerical {
            message: e.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_validation_share_the_config_exit_code() {
        let parse = CliError::Parse {
            message: "bad".into(),
        };
        let validation = CliError::validation("t2_us", "must be positive");
        assert_eq!(parse.exit_code(), EXIT_CONFIG);
        assert_eq!(validation.exit_code(), EXIT_CONFIG);
    }

    #[test]
    fn numerical_and_io_have_distinct_exit_codes() {
        let numerical = CliError::Numerical {
            message: "no convergence".into(),
        };
        let io = CliError::io("cannot write out/summary.json");
        assert_eq!(numerical.exit_code(), EXIT_NUMERICAL);
        assert_eq!(io.exit_code(), EXIT_IO);
        assert_ne!(EXIT_NUMERICAL, EXIT_IO);
    }

    #[test]
    fn json_decode_errors_keep_the_position_in_the_message() {
        let bad: Result<serde_json::Value, _> = serde_json::from_str("{\"a\": }");
        let err = CliError::from(bad.unwrap_err());
        let text = err.to_string();
        assert!(text.contains("line"), "missing position info: {text}");
        assert!(text.contains("column"), "missing position info: {text}");
    }

    #[test]
    fn invalid_cycle_spec_maps_to_validation() {
        let err = CliError::from(OttoError::InvalidSpec {
            field: "t2",
            constraint: "must be positive".into(),
        });
        assert_eq!(err.exit_code(), EXIT_CONFIG);
    }
}
