//! Artifact emission: CSV tables and the JSON run summary.
//!
//! Every run writes into one output directory. At most three files appear:
//! `trajectory.csv` (time series), `sweep.csv` (parameter-scan tables), and
//! `summary.json` (figures of merit plus the fully resolved config). Floats
//! are printed in scientific notation with 12 significant digits and rows
//! are newline-terminated, so identical runs produce byte-identical files.

use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::CliError;

/// Time-series artifact name.
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
/// Parameter-scan artifact name.
pub const SWEEP_FILE: &str = "sweep.csv";
/// Run-summary artifact name.
pub const SUMMARY_FILE: &str = "summary.json";

/// Column header of `trajectory.csv`. Populations and coherences are
/// dimensionless; `delta`/`omega` are angular frequencies in rad/s;
/// `gamma_eff` is a rate in 1/s; `T_eff` is in rad/s (`hbar = k_B = 1`);
/// `stroke` is 1-4 during the cycle and 0 during relaxation holds.
pub const TRAJECTORY_HEADER: &str =
    "t_s,P_e,P_g,re_rho_eg,im_rho_eg,delta_rad_s,omega_rad_s,gamma_eff_s,T_eff,C_l1,S,stroke";

/// Column header of `sweep.csv` for heating-time sweeps. `W` is net work
/// per cycle in 2pi kHz units; `P_out` is net power in 2pi kHz per second.
pub const SWEEP_T2_HEADER: &str = "t2_s,W,P_out,eta_c,eta_q";

/// Column header of `sweep.csv` for drive-ratio sweeps (ratio-major order).
pub const SWEEP_RATIO_HEADER: &str = "ratio,t2_s,W";

/// Scientific notation with 12 significant digits; the fixed width keeps
/// artifacts byte-stable across runs.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.11e}")
}

/// Create the output directory (and parents) if missing.
pub fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("creating output directory {}: {e}", dir.display())))
}

/// Write a CSV table. A table with no data rows is refused: an empty
/// artifact would silently break downstream plotting.
pub fn write_csv(dir: &Path, file: &str, header: &str, rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
    if rows.is_empty() {
        return Err(CliError::io(format!("refusing to write empty table {file}")));
    }
    let mut text = String::with_capacity(rows.len() * 128);
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    let path = dir.join(file);
    std::fs::write(&path, text)
        .map_err(|e| CliError::io(format!("writing {}: {e}", path.display())))?;
    Ok(path)
}

/// Write the run summary as pretty-printed JSON (keys sorted, trailing
/// newline).
pub fn write_summary(dir: &Path, summary: &Value) -> Result<PathBuf, CliError> {
    let mut text =
        serde_json::to_string_pretty(summary).expect("summary serialization cannot fail");
    text.push('\n');
    let path = dir.join(SUMMARY_FILE);
    std::fs::write(&path, text)
        .map_err(|e| CliError::io(format!("writing {}: {e}", path.display())))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_print_twelve_significant_digits() {
        assert_eq!(fmt_float(0.5), "5.00000000000e-1");
        assert_eq!(fmt_float(-1.0 / 3.0), "-3.33333333333e-1");
        assert_eq!(fmt_float(123456.0), "1.23456000000e5");
        assert_eq!(fmt_float(0.0), "0.00000000000e0");
    }

    #[test]
    fn non_finite_floats_still_print_deterministically() {
        assert_eq!(fmt_float(f64::INFINITY), "inf");
        assert_eq!(fmt_float(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_float(f64::NAN), "NaN");
    }

    #[test]
    fn csv_rows_are_newline_terminated() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![
            vec!["1".to_string(), "2".to_string()],
            vec!["3".to_string(), "4".to_string()],
        ];
        let path = write_csv(dir.path(), "t.csv", "a,b", &rows).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text, "a,b\n1,2\n3,4\n");
    }

    #[test]
    fn empty_tables_are_refused_as_io_errors() {
        let dir = tempfile::tempdir().unwrap();
        let err = write_csv(dir.path(), "t.csv", "a,b", &[]).unwrap_err();
        assert!(matches!(err, CliError::Io { .. }));
        assert!(!dir.path().join("t.csv").exists());
    }

    #[test]
    fn summary_json_ends_with_a_newline() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_summary(dir.path(), &serde_json::json!({"k": 1})).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert!(text.ends_with('\n'));
        assert!(serde_json::from_str::<Value>(&text).is_ok());
    }
}
